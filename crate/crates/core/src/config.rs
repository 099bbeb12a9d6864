//! Commodity configurations as 64-bit sets.

use core::fmt;

/// Largest supported commodity universe.
pub const MAX_COMMODITIES: usize = 64;

/// A set of commodity indices drawn from `0..|S|`, `|S| <= 64`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Config(pub u64);

impl Config {
    pub const EMPTY: Config = Config(0);

    pub fn singleton(e: usize) -> Self {
        debug_assert!(e < MAX_COMMODITIES);
        Config(1u64 << e)
    }

    /// The full universe `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_COMMODITIES);
        if n == MAX_COMMODITIES {
            Config(u64::MAX)
        } else {
            Config((1u64 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(Config::EMPTY, |c, e| c.with(e))
    }

    #[must_use]
    pub fn with(self, e: usize) -> Self {
        Config(self.0 | (1u64 << e))
    }

    pub fn contains(self, e: usize) -> bool {
        e < MAX_COMMODITIES && self.0 & (1u64 << e) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: Config) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Config) -> Self {
        Config(self.0 | other.0)
    }

    pub fn intersection(self, other: Config) -> Self {
        Config(self.0 & other.0)
    }

    pub fn difference(self, other: Config) -> Self {
        Config(self.0 & !other.0)
    }

    /// Largest index + 1, or 0 when empty.
    pub fn span(self) -> usize {
        (64 - self.0.leading_zeros()) as usize
    }

    /// Commodity indices in increasing order.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// All nonempty subsets of `self`, in increasing bit order.
    pub fn nonempty_subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(self.0 & self.0.wrapping_neg()),
        }
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for Config {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Config::from_indices(iter)
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let e = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(e)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

/// Submask enumeration in increasing numeric order.
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Config;

    fn next(&mut self) -> Option<Config> {
        let cur = self.next?;
        if cur == 0 {
            self.next = None;
            return None;
        }
        // next submask greater than cur
        let nxt = (cur.wrapping_sub(self.mask)) & self.mask;
        self.next = if nxt == 0 { None } else { Some(nxt) };
        Some(Config(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn subsets_enumerate_every_nonempty_submask_once() {
        let c = Config::from_indices([0, 2, 5]);
        let subs: Vec<u64> = c.nonempty_subsets().map(|s| s.0).collect();
        assert_eq!(subs.len(), 7);
        let mut sorted = subs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted, subs);
        assert!(subs.iter().all(|&s| s & !c.0 == 0 && s != 0));
    }

    #[test]
    fn empty_has_no_subsets() {
        assert_eq!(Config::EMPTY.nonempty_subsets().count(), 0);
    }

    #[test]
    fn full_64() {
        assert_eq!(Config::full(64).len(), 64);
        assert_eq!(Config::full(3), Config::from_indices([0, 1, 2]));
    }

    #[test]
    fn display() {
        assert_eq!(alloc::format!("{}", Config::from_indices([1, 3])), "{1,3}");
    }
}
