//! Insertion-ordered set of byte-string keys. Lookups go through a 128-bit
//! fingerprint; a fingerprint hit is confirmed by comparing the stored bytes,
//! and genuine fingerprint collisions spill into an exact overflow map.

use std::collections::HashMap;

#[derive(Debug, Default)]
pub(crate) struct KeySet {
    bytes: Vec<u8>,
    offsets: Vec<usize>,
    by_fingerprint: HashMap<u128, u32>,
    overflow: HashMap<Box<[u8]>, u32>,
}

impl KeySet {
    pub(crate) fn len(&self) -> usize {
        self.offsets.len()
    }

    pub(crate) fn get(&self, i: usize) -> &[u8] {
        let start = if i == 0 { 0 } else { self.offsets[i - 1] };
        &self.bytes[start..self.offsets[i]]
    }

    pub(crate) fn find(&self, key: &[u8]) -> Option<u32> {
        let fp = xxhash_rust::xxh3::xxh3_128(key);
        match self.by_fingerprint.get(&fp) {
            Some(&i) if self.get(i as usize) == key => Some(i),
            Some(_) => self.overflow.get(key).copied(),
            None => None,
        }
    }

    pub(crate) fn contains(&self, key: &[u8]) -> bool {
        self.find(key).is_some()
    }

    /// Inserts `key`; returns false when it was already present.
    pub(crate) fn insert(&mut self, key: &[u8]) -> bool {
        let fp = xxhash_rust::xxh3::xxh3_128(key);
        let index = self.offsets.len() as u32;
        match self.by_fingerprint.get(&fp) {
            Some(&i) if self.get(i as usize) == key => return false,
            Some(_) => {
                if self.overflow.contains_key(key) {
                    return false;
                }
                self.overflow.insert(key.into(), index);
            }
            None => {
                self.by_fingerprint.insert(fp, index);
            }
        }
        self.bytes.extend_from_slice(key);
        self.offsets.push(self.bytes.len());
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_find_and_order() {
        let mut s = KeySet::default();
        assert!(s.insert(&[5, 0, 2]));
        assert!(s.insert(&[1]));
        assert!(!s.insert(&[5, 0, 2]));
        assert_eq!(s.find(&[1]), Some(1));
        assert_eq!(s.get(0), &[5, 0, 2]);
        assert!(!s.contains(&[2]));
    }

    #[test]
    fn forced_collision_uses_overflow() {
        let mut s = KeySet::default();
        s.insert(&[7, 7]);
        // Simulate a fingerprint collision by aliasing another key's slot.
        let fp = xxhash_rust::xxh3::xxh3_128(&[9]);
        s.by_fingerprint.insert(fp, 0);
        assert!(s.insert(&[9]));
        assert_eq!(s.find(&[9]), Some(1));
        assert!(!s.insert(&[9]));
        assert_eq!(s.find(&[7, 7]), Some(0));
    }
}
