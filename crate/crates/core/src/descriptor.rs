//! Occurrence-count vectors over a descriptor index set.
//!
//! The same type carries group counts, node-type counts and signature counts.
//! Zero entries are never stored, so an absent key and an explicit zero are
//! indistinguishable.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescriptorVector {
    counts: BTreeMap<String, u32>,
}

impl DescriptorVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I, K>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, u32)>,
        K: Into<String>,
    {
        let mut v = Self::new();
        for (k, c) in pairs {
            v.add(k, c);
        }
        v
    }

    pub fn get(&self, key: &str) -> u32 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn set(&mut self, key: impl Into<String>, count: u32) {
        let key = key.into();
        if count == 0 {
            self.counts.remove(&key);
        } else {
            self.counts.insert(key, count);
        }
    }

    pub fn add(&mut self, key: impl Into<String>, count: u32) {
        if count == 0 {
            return;
        }
        *self.counts.entry(key.into()).or_insert(0) += count;
    }

    /// Decrements `key` by one. Returns false if the count was already zero.
    pub fn remove_one(&mut self, key: &str) -> bool {
        match self.counts.get_mut(key) {
            Some(c) if *c > 1 => {
                *c -= 1;
                true
            }
            Some(_) => {
                self.counts.remove(key);
                true
            }
            None => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Element-wise sum.
    pub fn merged(&self, other: &DescriptorVector) -> DescriptorVector {
        let mut out = self.clone();
        for (k, c) in other.iter() {
            out.add(k, c);
        }
        out
    }

    /// Dense view in the given key order.
    pub fn to_dense(&self, order: &[String]) -> Vec<u32> {
        order.iter().map(|k| self.get(k)).collect()
    }

    pub fn from_dense(order: &[String], counts: &[u32]) -> Self {
        Self::from_pairs(order.iter().cloned().zip(counts.iter().copied()))
    }
}

impl fmt::Display for DescriptorVector {
    /// `name=count` pairs joined by `;`, sorted by name. The empty vector prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("-");
        }
        let mut first = true;
        for (k, c) in &self.counts {
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{k}={c}")?;
        }
        Ok(())
    }
}

impl<K: Into<String>> FromIterator<(K, u32)> for DescriptorVector {
    fn from_iter<T: IntoIterator<Item = (K, u32)>>(iter: T) -> Self {
        Self::from_pairs(iter)
    }
}
