//! Bitmask subsets of the user set `{1, ..., L}`.
//!
//! Bit `i` of the mask stands for user `i + 1`. All routines in this crate
//! index users from zero and only translate to one-based labels when
//! rendering.

use std::fmt;

use crate::error::{Error, Result};

/// Largest number of users supported by the exhaustive subset machinery.
pub const MAX_USERS: usize = 12;

/// A subset of users encoded as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    /// Builds a subset from zero-based user indices.
    pub fn from_users<I: IntoIterator<Item = usize>>(users: I) -> Self {
        Subset(users.into_iter().fold(0, |acc, u| acc | (1 << u)))
    }

    /// The full set `{0, ..., users - 1}`.
    pub const fn full(users: usize) -> Self {
        Subset(((1u64 << users) - 1) as u32)
    }

    pub const fn singleton(user: usize) -> Self {
        Subset(1 << user)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Number of members, the weight of the corresponding atom.
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn contains(self, user: usize) -> bool {
        self.0 >> user & 1 == 1
    }

    pub const fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub const fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub const fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub const fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    /// Complement within the full set of `users` users.
    pub const fn complement(self, users: usize) -> Subset {
        Subset(Subset::full(users).0 & !self.0)
    }

    pub const fn with(self, user: usize) -> Subset {
        Subset(self.0 | 1 << user)
    }

    pub const fn without(self, user: usize) -> Subset {
        Subset(self.0 & !(1 << user))
    }

    /// Members in ascending order.
    pub fn members(self) -> Members {
        Members(self.0)
    }

    /// Nonempty subsets of `self`, in ascending mask order.
    pub fn nonempty_subsets(self) -> SubsetsOf {
        SubsetsOf {
            outer: self.0,
            next: Some(self.0 & self.0.wrapping_neg()),
        }
    }

    pub(crate) fn check(self, users: usize) -> Result<Self> {
        if self.0 > Subset::full(users).0 {
            return Err(Error::SubsetOutOfRange {
                mask: self.0,
                users,
            });
        }
        Ok(self)
    }
}

/// All nonempty subsets of `{0, ..., users - 1}` in ascending mask order.
pub fn all_nonempty(users: usize) -> impl DoubleEndedIterator<Item = Subset> + Clone {
    (1..=Subset::full(users).0).map(Subset)
}

/// Nonempty strict subsets, i.e. every subset except the empty and full set.
pub fn strict_nonempty(users: usize) -> impl DoubleEndedIterator<Item = Subset> + Clone {
    (1..Subset::full(users).0).map(Subset)
}

/// Subsets of exactly `weight` members, ascending.
pub fn of_weight(users: usize, weight: usize) -> impl Iterator<Item = Subset> {
    all_nonempty(users).filter(move |s| s.len() == weight)
}

#[derive(Debug, Clone)]
pub struct Members(u32);

impl Iterator for Members {
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

impl ExactSizeIterator for Members {}

/// Submask enumeration in ascending order using `next = (cur - outer) & outer`.
#[derive(Debug, Clone)]
pub struct SubsetsOf {
    outer: u32,
    next: Option<u32>,
}

impl Iterator for SubsetsOf {
    type Item = Subset;

    fn next(&mut self) -> Option<Subset> {
        let cur = self.next?;
        if cur == 0 {
            self.next = None;
            return None;
        }
        let following = cur.wrapping_sub(self.outer) & self.outer;
        self.next = if following == 0 {
            None
        } else {
            Some(following)
        };
        Some(Subset(cur))
    }
}

/// Binomial coefficient for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) as u64 / (j + 1) as u64)
}

impl fmt::Display for Subset {
    /// One-based member list, e.g. `{1,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, u) in self.members().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", u + 1)?;
        }
        f.write_str("}")
    }
}
