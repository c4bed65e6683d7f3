//! Recursive-descent parser for edge predicates.
//!
//! ```text
//! expr   := term (OR term)*
//! term   := factor (AND factor)*
//! factor := NOT factor | '(' expr ')' | atom | '*'
//! atom   := IDENT op literal
//! op     := = | != | ≠ | < | <= | ≤ | > | >= | ≥
//! ```
//!
//! `AND`/`OR`/`NOT` are accepted as `∧`/`∨`/`¬` or the case-insensitive words
//! `and`/`or`/`not`. Literals are bare words, decimal numbers, or single- or
//! double-quoted strings. Error offsets count characters from the start.

use super::{CompareOp, Predicate, PredicateError};

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Word(String),
    Quoted(String),
    Op(String),
    And,
    Or,
    Not,
    LParen,
    RParen,
    Star,
}

#[derive(Debug)]
struct Spanned {
    token: Token,
    offset: usize,
}

fn is_op_char(c: char) -> bool {
    matches!(c, '=' | '!' | '<' | '>' | '≠' | '≤' | '≥' | '~')
}

fn is_word_char(c: char) -> bool {
    !(c.is_whitespace() || is_op_char(c) || matches!(c, '(' | ')' | '\'' | '"' | '∧' | '∨' | '¬'))
}

fn tokenize(text: &str) -> Result<(Vec<Spanned>, usize), PredicateError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let offset = i;
        let token = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => {
                i += 1;
                Token::LParen
            }
            ')' => {
                i += 1;
                Token::RParen
            }
            '∧' => {
                i += 1;
                Token::And
            }
            '∨' => {
                i += 1;
                Token::Or
            }
            '¬' => {
                i += 1;
                Token::Not
            }
            '\'' | '"' => {
                let quote = c;
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&ch| ch == quote)
                    .map(|p| start + p)
                    .ok_or(PredicateError::Syntax {
                        offset,
                        message: "unterminated string literal".into(),
                    })?;
                i = end + 1;
                Token::Quoted(chars[start..end].iter().collect())
            }
            c if is_op_char(c) => {
                let start = i;
                while i < chars.len() && is_op_char(chars[i]) {
                    i += 1;
                }
                Token::Op(chars[start..i].iter().collect())
            }
            _ => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.to_ascii_lowercase().as_str() {
                    "and" => Token::And,
                    "or" => Token::Or,
                    "not" => Token::Not,
                    "*" => Token::Star,
                    _ => Token::Word(word),
                }
            }
        };
        tokens.push(Spanned { token, offset });
    }
    Ok((tokens, chars.len()))
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |s| s.offset)
    }

    fn error(&self, message: impl Into<String>) -> PredicateError {
        PredicateError::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Predicate, PredicateError> {
        let mut left = self.term()?;
        while self.peek() == Some(&Token::Or) {
            self.bump();
            let right = self.term()?;
            left = Predicate::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Predicate, PredicateError> {
        let mut left = self.factor()?;
        while self.peek() == Some(&Token::And) {
            self.bump();
            let right = self.factor()?;
            left = Predicate::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Predicate, PredicateError> {
        match self.peek() {
            Some(Token::Not) => {
                self.bump();
                Ok(Predicate::Not(Box::new(self.factor()?)))
            }
            Some(Token::LParen) => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(inner)
            }
            Some(Token::Star) => {
                self.bump();
                Ok(Predicate::True)
            }
            Some(Token::Word(_)) => self.atom(),
            Some(_) => Err(self.error("expected an attribute comparison, '*', 'not' or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn atom(&mut self) -> Result<Predicate, PredicateError> {
        let Some(Token::Word(attribute)) = self.bump() else {
            unreachable!("atom called on a non-word token");
        };
        let op_offset = self.offset();
        let op = match self.bump() {
            Some(Token::Op(op)) => CompareOp::from_symbol(&op).ok_or(PredicateError::UnknownOperator {
                offset: op_offset,
                operator: op,
            })?,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected a comparison operator"));
            }
        };
        let literal = match self.bump() {
            Some(Token::Word(w)) | Some(Token::Quoted(w)) => w,
            _ => {
                self.pos -= 1;
                return Err(self.error("expected a literal"));
            }
        };
        Ok(Predicate::Compare {
            attribute,
            op,
            literal,
        })
    }
}

pub fn parse(text: &str) -> Result<Predicate, PredicateError> {
    let (tokens, end) = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end };
    let predicate = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(predicate)
}
