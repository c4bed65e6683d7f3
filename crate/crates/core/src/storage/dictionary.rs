use std::collections::HashMap;

/// Sorted value dictionary; a value's code is its rank.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dictionary {
    values: Vec<String>,
}

impl Dictionary {
    pub fn from_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut values: Vec<String> = values.into_iter().map(Into::into).collect();
        values.sort_unstable();
        values.dedup();
        Self { values }
    }

    pub fn encode(&self, value: &str) -> Option<u32> {
        self.values
            .binary_search_by(|probe| probe.as_str().cmp(value))
            .ok()
            .map(|i| i as u32)
    }

    pub fn decode(&self, code: u32) -> Option<&str> {
        self.values.get(code as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    /// Hash index for bulk encoding.
    pub(crate) fn encoder(&self) -> HashMap<&str, u32> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i as u32))
            .collect()
    }

    /// Rough heap footprint: string bytes plus one `String` header per entry.
    pub fn byte_size(&self) -> usize {
        self.values
            .iter()
            .map(|v| v.len() + std::mem::size_of::<String>())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn codes_follow_lexicographic_order() {
        let d = Dictionary::from_values(["b", "a", "c", "a"]);
        assert_eq!(d.values(), ["a", "b", "c"]);
        assert_eq!(d.encode("a"), Some(0));
        assert_eq!(d.encode("c"), Some(2));
        assert_eq!(d.encode("z"), None);
        assert_eq!(d.decode(3), None);
    }

    proptest! {
        #[test]
        fn roundtrip(values in proptest::collection::vec("[a-z0-9]{0,6}", 0..40)) {
            let d = Dictionary::from_values(values.iter().cloned());
            for w in d.values().windows(2) {
                prop_assert!(w[0] < w[1]);
            }
            for v in &values {
                let c = d.encode(v).unwrap();
                prop_assert_eq!(d.decode(c), Some(v.as_str()));
            }
            for c in 0..d.len() as u32 {
                prop_assert_eq!(d.encode(d.decode(c).unwrap()), Some(c));
            }
        }
    }
}
