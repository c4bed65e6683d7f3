//! Edge predicates and predicate pushdown.
//!
//! A predicate is a propositional formula over edge attribute comparisons.
//! Pushing it down to the edge column group yields the per-query
//! [`ActiveEdgeList`]. Atoms are evaluated once per dictionary entry and the
//! resulting truth table is mapped over the code column; on a type-clustered
//! group a type-only predicate is decided per type range without touching
//! individual records.

mod parser;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::bitset::Bitset;
use crate::storage::{Column, EdgeColumnGroup, TYPE_ATTRIBUTE};

pub use parser::parse;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredicateError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown operator {operator:?} at offset {offset}")]
    UnknownOperator { offset: usize, operator: String },
    #[error("predicate references unknown attribute {0:?}")]
    UnknownAttribute(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn from_symbol(symbol: &str) -> Option<Self> {
        Some(match symbol {
            "=" => Self::Eq,
            "!=" | "≠" => Self::Ne,
            "<" => Self::Lt,
            "<=" | "≤" => Self::Le,
            ">" => Self::Gt,
            ">=" | "≥" => Self::Ge,
            _ => return None,
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Self::Eq => "=",
            Self::Ne => "!=",
            Self::Lt => "<",
            Self::Le => "<=",
            Self::Gt => ">",
            Self::Ge => ">=",
        }
    }

    fn holds(self, ord: Ordering) -> bool {
        match self {
            Self::Eq => ord == Ordering::Equal,
            Self::Ne => ord != Ordering::Equal,
            Self::Lt => ord == Ordering::Less,
            Self::Le => ord != Ordering::Greater,
            Self::Gt => ord == Ordering::Greater,
            Self::Ge => ord != Ordering::Less,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Predicate {
    /// The constant TRUE, written `*`.
    True,
    Compare {
        attribute: String,
        op: CompareOp,
        literal: String,
    },
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
    Not(Box<Predicate>),
}

/// Numeric comparison when both sides parse as decimals, string order otherwise.
pub fn compare_values(stored: &str, literal: &str) -> Ordering {
    match (stored.trim().parse::<f64>(), literal.trim().parse::<f64>()) {
        (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => a.total_cmp(&b),
        _ => stored.cmp(literal),
    }
}

impl Predicate {
    pub fn attributes(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Predicate::True => {}
            Predicate::Compare { attribute, .. } => {
                out.insert(attribute);
            }
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.collect_attributes(out);
                b.collect_attributes(out);
            }
            Predicate::Not(a) => a.collect_attributes(out),
        }
    }

    /// Evaluates against one record; `lookup` returns `None` for nulls.
    pub fn matches<'a, F>(&self, lookup: &F) -> bool
    where
        F: Fn(&str) -> Option<&'a str>,
    {
        match self {
            Predicate::True => true,
            Predicate::Compare {
                attribute,
                op,
                literal,
            } => lookup(attribute).is_some_and(|v| op.holds(compare_values(v, literal))),
            Predicate::And(a, b) => a.matches(lookup) && b.matches(lookup),
            Predicate::Or(a, b) => a.matches(lookup) || b.matches(lookup),
            Predicate::Not(a) => !a.matches(lookup),
        }
    }

    fn check_attributes(&self, g: &EdgeColumnGroup) -> Result<(), PredicateError> {
        match self.attributes().into_iter().find(|a| g.attribute(a).is_none()) {
            Some(missing) => Err(PredicateError::UnknownAttribute(missing.to_string())),
            None => Ok(()),
        }
    }

    fn eval_bits(&self, g: &EdgeColumnGroup) -> Bitset {
        match self {
            Predicate::True => Bitset::full(g.len()),
            Predicate::Compare {
                attribute,
                op,
                literal,
            } => {
                let column = g.attribute(attribute).expect("attributes checked");
                atom_bits(column, *op, literal)
            }
            Predicate::And(a, b) => {
                let mut bits = a.eval_bits(g);
                bits.intersect_with(&b.eval_bits(g));
                bits
            }
            Predicate::Or(a, b) => {
                let mut bits = a.eval_bits(g);
                bits.union_with(&b.eval_bits(g));
                bits
            }
            Predicate::Not(a) => {
                let mut bits = a.eval_bits(g);
                bits.negate();
                bits
            }
        }
    }
}

fn atom_bits(column: &Column, op: CompareOp, literal: &str) -> Bitset {
    let table: Vec<bool> = column
        .dictionary()
        .values()
        .iter()
        .map(|v| op.holds(compare_values(v, literal)))
        .collect();
    let codes = column.raw_codes();
    let mut bits = Bitset::new(column.len());
    for pos in column.present().iter_ones() {
        if table[codes[pos] as usize] {
            bits.insert(pos);
        }
    }
    bits
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => f.write_str("*"),
            Predicate::Compare {
                attribute,
                op,
                literal,
            } => {
                let quote = if literal.contains('\'') { '"' } else { '\'' };
                write!(f, "{attribute}{}{quote}{literal}{quote}", op.symbol())
            }
            Predicate::And(a, b) => write!(f, "({a} and {b})"),
            Predicate::Or(a, b) => write!(f, "({a} or {b})"),
            Predicate::Not(a) => write!(f, "not {a}"),
        }
    }
}

impl std::str::FromStr for Predicate {
    type Err = PredicateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Per-query validity bitset over edge positions (1 = active).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveEdgeList {
    bits: Bitset,
}

impl ActiveEdgeList {
    pub fn all(len: usize) -> Self {
        Self {
            bits: Bitset::full(len),
        }
    }

    pub fn none(len: usize) -> Self {
        Self {
            bits: Bitset::new(len),
        }
    }

    pub fn from_bitset(bits: Bitset) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn is_active(&self, pos: usize) -> bool {
        self.bits.contains(pos)
    }

    /// Marks a traversed edge as consumed.
    #[inline]
    pub fn invalidate(&mut self, pos: usize) {
        self.bits.remove(pos);
    }

    /// Re-activates an edge this query consumed earlier.
    #[inline]
    pub(crate) fn restore(&mut self, pos: usize) {
        self.bits.insert(pos);
    }

    pub fn count_active(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn iter_active(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn as_bitset(&self) -> &Bitset {
        &self.bits
    }
}

/// Pushes `p` down to `g`, intersected with `visibility` (all visible when `None`).
pub fn evaluate(
    p: &Predicate,
    g: &EdgeColumnGroup,
    visibility: Option<&ActiveEdgeList>,
) -> Result<ActiveEdgeList, PredicateError> {
    p.check_attributes(g)?;
    let attrs = p.attributes();
    let type_only = attrs.iter().all(|a| *a == TYPE_ATTRIBUTE);
    let mut bits = match g.type_ranges() {
        Some(ranges) if type_only => {
            let mut bits = Bitset::new(g.len());
            let types = g.attribute(TYPE_ATTRIBUTE);
            for (&code, range) in ranges {
                let value = types.and_then(|c| c.dictionary().decode(code));
                if p.matches(&|_: &str| value) {
                    bits.insert_range(range.clone());
                }
            }
            bits
        }
        _ => p.eval_bits(g),
    };
    if let Some(visible) = visibility {
        bits.intersect_with(visible.as_bitset());
    }
    Ok(ActiveEdgeList::from_bitset(bits))
}

/// Record-at-a-time evaluation; the reference the vectorized paths are checked against.
pub fn evaluate_rowwise(p: &Predicate, g: &EdgeColumnGroup) -> Result<ActiveEdgeList, PredicateError> {
    p.check_attributes(g)?;
    let bits = (0..g.len())
        .map(|pos| p.matches(&|name: &str| g.attribute(name).and_then(|c| c.value(pos))))
        .collect();
    Ok(ActiveEdgeList::from_bitset(bits))
}
