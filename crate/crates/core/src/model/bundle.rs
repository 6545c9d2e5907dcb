use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest item count a [`Bundle`] can address.
pub const MAX_ITEMS: usize = 64;

/// A set of item indices, stored as a bitmask (bit `i` set iff item `i` is in
/// the bundle).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub fn from_mask(mask: u64) -> Self {
        Bundle(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    /// All of `0..m`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ITEMS, "at most {MAX_ITEMS} items");
        if m == MAX_ITEMS {
            Bundle(u64::MAX)
        } else {
            Bundle((1u64 << m) - 1)
        }
    }

    pub fn singleton(item: usize) -> Self {
        assert!(item < MAX_ITEMS);
        Bundle(1u64 << item)
    }

    pub fn from_items<I: IntoIterator<Item = usize>>(items: I) -> Self {
        items.into_iter().fold(Bundle::EMPTY, |b, i| b.with(i))
    }

    pub fn contains(self, item: usize) -> bool {
        item < MAX_ITEMS && self.0 >> item & 1 == 1
    }

    #[must_use]
    pub fn with(self, item: usize) -> Self {
        Bundle(self.0 | Bundle::singleton(item).0)
    }

    #[must_use]
    pub fn without(self, item: usize) -> Self {
        Bundle(self.0 & !Bundle::singleton(item).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Bundle) -> Self {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Self {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Self {
        Bundle(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    /// Highest item index plus one; 0 for the empty bundle.
    pub fn span(self) -> usize {
        MAX_ITEMS - self.0.leading_zeros() as usize
    }

    /// Item indices in increasing order.
    pub fn items(self) -> Items {
        Items(self.0)
    }

    /// Every subset of this bundle (including the empty set and itself) in
    /// increasing mask order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Canonical tie-break order over bundles.
    ///
    /// Membership vectors are compared item by item from item 0, with
    /// "contains the item" ordered before "does not". Consequently a bundle
    /// precedes every proper subset of itself, and `{0}` precedes `{1}`.
    pub fn canonical_cmp(self, other: Bundle) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let low = diff & diff.wrapping_neg();
        if self.0 & low != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.items()).finish()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.items().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub struct Items(u64);

impl Iterator for Items {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Items {}

pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Bundle;

    fn next(&mut self) -> Option<Bundle> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some(cur.wrapping_sub(self.mask) & self.mask)
        };
        Some(Bundle(cur))
    }
}
