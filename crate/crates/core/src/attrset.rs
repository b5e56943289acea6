//! Attribute sets: subsets of the variable universe `[n]` packed into a
//! machine word.
//!
//! Every set function, degree constraint, schema and proof-step coordinate in
//! this crate is indexed by an `AttrSet`. The universe is capped at
//! [`MAX_VARS`] variables so that a set always fits in a `u32` and dense
//! tables indexed by `2^[n]` stay addressable.

use std::fmt;

/// Hard cap on the number of variables in a universe.
pub const MAX_VARS: usize = 30;

/// A subset of the variable universe `{0, 1, ..., n-1}`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct AttrSet(u32);

impl AttrSet {
    /// The empty set.
    pub const EMPTY: AttrSet = AttrSet(0);

    /// Builds a set from a raw bitmask.
    pub fn from_bits(bits: u32) -> AttrSet {
        AttrSet(bits)
    }

    /// Builds the singleton `{v}`.
    pub fn singleton(v: usize) -> AttrSet {
        assert!(v < MAX_VARS, "variable index {v} out of range");
        AttrSet(1 << v)
    }

    /// Builds the full universe `{0, ..., n-1}`.
    pub fn full(n: usize) -> AttrSet {
        assert!(n <= MAX_VARS, "universe size {n} out of range");
        if n == 0 {
            AttrSet(0)
        } else {
            AttrSet(u32::MAX >> (32 - n))
        }
    }

    /// Builds a set from an iterator of variable indices.
    pub fn from_iter<I: IntoIterator<Item = usize>>(vars: I) -> AttrSet {
        let mut s = AttrSet::EMPTY;
        for v in vars {
            s = s.insert(v);
        }
        s
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Index of this set into a dense table over `2^[n]`.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, v: usize) -> bool {
        v < 32 && self.0 & (1 << v) != 0
    }

    #[must_use]
    pub fn insert(self, v: usize) -> AttrSet {
        assert!(v < MAX_VARS, "variable index {v} out of range");
        AttrSet(self.0 | (1 << v))
    }

    #[must_use]
    pub fn remove(self, v: usize) -> AttrSet {
        AttrSet(self.0 & !(1 << v))
    }

    #[must_use]
    pub fn union(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersect(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & other.0)
    }

    /// Set difference `self \ other`.
    #[must_use]
    pub fn difference(self, other: AttrSet) -> AttrSet {
        AttrSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AttrSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_strict_subset(self, other: AttrSet) -> bool {
        self.is_subset(other) && self != other
    }

    /// `I ⊥ J`: neither set contains the other.
    pub fn is_incomparable(self, other: AttrSet) -> bool {
        !self.is_subset(other) && !other.is_subset(self)
    }

    /// Iterates the variable indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |v| bits & (1 << v) != 0)
    }

    /// Iterates all subsets of `self` in ascending bitmask order (including
    /// the empty set and `self`).
    pub fn subsets(self) -> SubsetIter {
        SubsetIter {
            mask: self.0,
            next: Some(0),
        }
    }

    /// True if every set bit lies below `n`.
    pub fn fits_universe(self, n: usize) -> bool {
        self.is_subset(AttrSet::full(n))
    }
}

/// Iterator over the subsets of a fixed bitmask in ascending order.
pub struct SubsetIter {
    mask: u32,
    next: Option<u32>,
}

impl Iterator for SubsetIter {
    type Item = AttrSet;

    fn next(&mut self) -> Option<AttrSet> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            // Standard subset-stepping trick: the next subset of `mask`
            // after `cur` in ascending order.
            Some((cur.wrapping_sub(self.mask)) & self.mask)
        };
        Some(AttrSet(cur))
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_ops() {
        let a = AttrSet::from_iter([0, 2]);
        let b = AttrSet::from_iter([2, 3]);
        assert_eq!(a.union(b), AttrSet::from_iter([0, 2, 3]));
        assert_eq!(a.intersect(b), AttrSet::singleton(2));
        assert_eq!(a.difference(b), AttrSet::singleton(0));
        assert!(AttrSet::EMPTY.is_subset(a));
        assert!(a.is_strict_subset(AttrSet::full(4)));
        assert!(a.is_incomparable(b));
        assert!(!a.is_incomparable(a));
    }

    #[test]
    fn subsets_enumerate_in_order() {
        let s = AttrSet::from_iter([0, 2]);
        let subs: Vec<u32> = s.subsets().map(|t| t.bits()).collect();
        assert_eq!(subs, vec![0b000, 0b001, 0b100, 0b101]);
    }

    #[test]
    fn full_universe() {
        assert_eq!(AttrSet::full(0), AttrSet::EMPTY);
        assert_eq!(AttrSet::full(3).bits(), 0b111);
        assert_eq!(AttrSet::full(MAX_VARS).len(), MAX_VARS);
    }

    proptest! {
        // |A∪B| + |A∩B| = |A| + |B|, the bit-count identity the flow-network
        // cut arguments lean on.
        #[test]
        fn union_intersection_cardinality(a in 0u32..(1 << 12), b in 0u32..(1 << 12)) {
            let a = AttrSet::from_bits(a);
            let b = AttrSet::from_bits(b);
            prop_assert_eq!(
                a.union(b).len() + a.intersect(b).len(),
                a.len() + b.len()
            );
        }

        #[test]
        fn subset_iter_is_complete(mask in 0u32..(1 << 10)) {
            let s = AttrSet::from_bits(mask);
            let subs: Vec<AttrSet> = s.subsets().collect();
            prop_assert_eq!(subs.len(), 1 << s.len());
            for t in &subs {
                prop_assert!(t.is_subset(s));
            }
            let mut sorted = subs.clone();
            sorted.sort();
            sorted.dedup();
            prop_assert_eq!(sorted, subs);
        }
    }
}
