use crate::bitset::Bitset;

use super::Dictionary;

/// Dictionary-encoded attribute column with a presence bitmap for nulls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    dictionary: Dictionary,
    codes: Vec<u32>,
    present: Bitset,
}

impl Column {
    pub fn from_values<'a, I>(values: I) -> Self
    where
        I: IntoIterator<Item = Option<&'a str>>,
    {
        let values: Vec<Option<&str>> = values.into_iter().collect();
        let dictionary = Dictionary::from_values(values.iter().flatten().copied());
        let encoder = dictionary.encoder();
        let mut present = Bitset::new(values.len());
        let codes = values
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Some(v) => {
                    present.insert(i);
                    encoder[v]
                }
                None => 0,
            })
            .collect();
        Self {
            dictionary,
            codes,
            present,
        }
    }

    /// Column over an existing dictionary; `None` codes are nulls.
    pub fn from_codes(dictionary: Dictionary, codes: Vec<Option<u32>>) -> Self {
        let mut present = Bitset::new(codes.len());
        let codes = codes
            .into_iter()
            .enumerate()
            .map(|(i, c)| match c {
                Some(c) => {
                    assert!((c as usize) < dictionary.len(), "code {c} outside dictionary");
                    present.insert(i);
                    c
                }
                None => 0,
            })
            .collect();
        Self {
            dictionary,
            codes,
            present,
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    #[inline]
    pub fn code(&self, pos: usize) -> Option<u32> {
        self.present.contains(pos).then(|| self.codes[pos])
    }

    pub fn value(&self, pos: usize) -> Option<&str> {
        self.code(pos).and_then(|c| self.dictionary.decode(c))
    }

    pub fn null_count(&self) -> usize {
        self.len() - self.present.count_ones()
    }

    pub(crate) fn present(&self) -> &Bitset {
        &self.present
    }

    /// Raw code slice; entries at null positions are meaningless.
    pub(crate) fn raw_codes(&self) -> &[u32] {
        &self.codes
    }

    pub(crate) fn permuted(&self, order: &[usize]) -> Self {
        let mut present = Bitset::new(order.len());
        let codes = order
            .iter()
            .enumerate()
            .map(|(dst, &src)| {
                if self.present.contains(src) {
                    present.insert(dst);
                }
                self.codes[src]
            })
            .collect();
        Self {
            dictionary: self.dictionary.clone(),
            codes,
            present,
        }
    }
}
