//! c-ordered covering: a weighted set cover family whose B-chains are
//! monotone, coverable at weight at most `2 c H_n`.
//!
//! Elements are `0..n`. Element `i` has disjoint `A_i`, `B_i` with
//! `A_i ∪ B_i = {0..i-1}`, and `B_i ⊆ B_j` for `i < j`. It offers the set
//! `{i}` at weight `c / (|B_i| + 1)` and the set `{i} ∪ A_i` at weight `c`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::oracle::harmonic;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct COrderedInstance {
    pub c: f64,
    pub a: Vec<BTreeSet<usize>>,
    pub b: Vec<BTreeSet<usize>>,
}

impl COrderedInstance {
    /// Builds an instance from the B-chains alone; `A_i` is the complement.
    pub fn from_b(c: f64, b: Vec<BTreeSet<usize>>) -> Self {
        let a = b
            .iter()
            .enumerate()
            .map(|(i, bi)| (0..i).filter(|k| !bi.contains(k)).collect())
            .collect();
        COrderedInstance { c, a, b }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

/// Every reason the instance is not c-ordered; empty iff valid.
pub fn validate_cordered(inst: &COrderedInstance) -> Vec<String> {
    let mut report = Vec::new();
    if !(inst.c >= 1.0) {
        report.push(format!("c = {} < 1", inst.c));
    }
    if inst.a.len() != inst.b.len() {
        report.push(format!("{} A sets but {} B sets", inst.a.len(), inst.b.len()));
        return report;
    }
    for i in 0..inst.len() {
        let (ai, bi) = (&inst.a[i], &inst.b[i]);
        if let Some(x) = ai.intersection(bi).next() {
            report.push(format!("element {i}: {x} in both A and B"));
        }
        let union: BTreeSet<usize> = ai.union(bi).copied().collect();
        if union != (0..i).collect() {
            report.push(format!("element {i}: A ∪ B is not {{0..{i}}}"));
        }
        if i > 0 && !inst.b[i - 1].is_subset(bi) {
            report.push(format!("B_{} is not a subset of B_{i}", i - 1));
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// `{i}` at weight `c / (|B_i| + 1)`.
    Singleton,
    /// `{i} ∪ A_i` at weight `c`.
    WithA,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChosenSet {
    /// Element (original label) that offers the set.
    pub element: usize,
    pub kind: SetKind,
    pub weight: f64,
    /// Original labels of the elements this set covers.
    pub covers: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    /// Instance length before the round.
    pub len: usize,
    pub covered: usize,
    pub weight: f64,
    /// Whether the reduced instance passed [`validate_cordered`].
    pub remainder_valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverResult {
    pub sets: Vec<ChosenSet>,
    pub total_weight: f64,
    pub rounds: Vec<Round>,
}

/// Block-based greedy cover.
///
/// Each round looks at the last element `n` and chooses the cheaper per
/// covered element of `{n} ∪ A_n` (weight `c`, covering `n - |B_n|`
/// elements) and the singletons of the last block (weight
/// `c / (|B_n| + 1)` each), preferring `{n} ∪ A_n` on ties. Covered elements
/// are removed and the rest renumbered.
pub fn greedy_cover(inst: &COrderedInstance) -> Result<CoverResult> {
    let report = validate_cordered(inst);
    if !report.is_empty() {
        return Err(Error::InvalidCOrdered(report.join("; ")));
    }
    let c = inst.c;
    let mut labels: Vec<usize> = (0..inst.len()).collect();
    let mut cur = inst.clone();
    let mut sets = Vec::new();
    let mut rounds = Vec::new();
    let mut total_weight = 0.0;

    while !cur.is_empty() {
        let n = cur.len();
        let last = n - 1;
        let b = cur.b[last].len();
        let mut removed = BTreeSet::new();
        let mut round_weight = 0.0;
        // {last} ∪ A_last covers n - b elements
        if n - b > b {
            let covers: BTreeSet<usize> = cur.a[last].iter().copied().chain([last]).collect();
            sets.push(ChosenSet {
                element: labels[last],
                kind: SetKind::WithA,
                weight: c,
                covers: covers.iter().map(|&k| labels[k]).collect(),
            });
            round_weight += c;
            removed = covers;
        } else {
            let start = (0..n).rev().take_while(|&i| cur.b[i] == cur.b[last]).last().unwrap();
            for i in start..n {
                let w = c / (cur.b[i].len() + 1) as f64;
                sets.push(ChosenSet {
                    element: labels[i],
                    kind: SetKind::Singleton,
                    weight: w,
                    covers: alloc::vec![labels[i]],
                });
                round_weight += w;
                removed.insert(i);
            }
        }
        total_weight += round_weight;
        cur = remove_elements(&cur, &removed);
        labels = labels
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, &l)| l)
            .collect();
        rounds.push(Round {
            len: n,
            covered: removed.len(),
            weight: round_weight,
            remainder_valid: validate_cordered(&cur).is_empty(),
        });
    }
    Ok(CoverResult {
        sets,
        total_weight,
        rounds,
    })
}

/// Drops `removed` and renumbers the survivors consecutively.
fn remove_elements(inst: &COrderedInstance, removed: &BTreeSet<usize>) -> COrderedInstance {
    let mut new_index = Vec::with_capacity(inst.len());
    let mut next = 0;
    for i in 0..inst.len() {
        new_index.push(if removed.contains(&i) {
            None
        } else {
            next += 1;
            Some(next - 1)
        });
    }
    let remap = |s: &BTreeSet<usize>| -> BTreeSet<usize> {
        s.iter().filter_map(|&k| new_index[k]).collect()
    };
    let keep = (0..inst.len()).filter(|i| !removed.contains(i));
    COrderedInstance {
        c: inst.c,
        a: keep.clone().map(|i| remap(&inst.a[i])).collect(),
        b: keep.map(|i| remap(&inst.b[i])).collect(),
    }
}

/// `2 c H_n`.
pub fn weight_bound(c: f64, n: usize) -> f64 {
    2.0 * c * harmonic(n)
}

/// Random valid instance: each `B_i` extends `B_{i-1}` by a random subset of
/// the earlier elements not yet in it, or repeats it (continuing a block).
pub fn random_cordered<R: Rng + ?Sized>(n: usize, c: f64, rng: &mut R) -> COrderedInstance {
    let mut b: Vec<BTreeSet<usize>> = Vec::with_capacity(n);
    let grow = rng.gen_range(0.0..1.0);
    let density = rng.gen_range(0.0..1.0);
    for i in 0..n {
        let mut bi = b.last().cloned().unwrap_or_default();
        if rng.gen_bool(grow) {
            for k in 0..i {
                if !bi.contains(&k) && rng.gen_bool(density) {
                    bi.insert(k);
                }
            }
        }
        b.push(bi);
    }
    COrderedInstance::from_b(c, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn validation_examples() {
        let one = COrderedInstance::from_b(1.0, vec![set(&[])]);
        assert!(validate_cordered(&one).is_empty());
        let two = COrderedInstance::from_b(1.0, vec![set(&[]), set(&[])]);
        assert_eq!(two.a[1], set(&[0]));
        assert!(validate_cordered(&two).is_empty());
        let broken = COrderedInstance::from_b(1.0, vec![set(&[]), set(&[0]), set(&[])]);
        let rep = validate_cordered(&broken);
        assert_eq!(rep.len(), 1);
        assert!(rep[0].contains("B_1"));
    }

    #[test]
    fn validation_catches_overlap_and_gaps() {
        let inst = COrderedInstance {
            c: 1.0,
            a: vec![set(&[]), set(&[0])],
            b: vec![set(&[]), set(&[0])],
        };
        assert!(!validate_cordered(&inst).is_empty());
        let inst = COrderedInstance {
            c: 1.0,
            a: vec![set(&[]), set(&[])],
            b: vec![set(&[]), set(&[])],
        };
        assert!(!validate_cordered(&inst).is_empty());
        assert!(greedy_cover(&inst).is_err());
    }

    #[test]
    fn single_element() {
        let r = greedy_cover(&COrderedInstance::from_b(3.0, vec![set(&[])])).unwrap();
        assert_eq!(r.total_weight, 3.0);
        assert!(r.total_weight <= weight_bound(3.0, 1));
    }

    #[test]
    fn one_block_of_two_picks_with_a() {
        let r = greedy_cover(&COrderedInstance::from_b(1.0, vec![set(&[]), set(&[])])).unwrap();
        assert_eq!(r.sets.len(), 1);
        assert_eq!(r.sets[0].kind, SetKind::WithA);
        assert_eq!(r.sets[0].covers, vec![0, 1]);
        assert_eq!(r.total_weight, 1.0);
    }

    #[test]
    fn two_blocks_two_rounds() {
        // blocks {0}, {1, 2}; B_1 = B_2 = {0}, A_2 = {1}
        let inst = COrderedInstance::from_b(1.0, vec![set(&[]), set(&[0]), set(&[0])]);
        assert_eq!(inst.a[2], set(&[1]));
        let r = greedy_cover(&inst).unwrap();
        assert_eq!(r.rounds.len(), 2);
        assert_eq!(r.sets[0].kind, SetKind::WithA);
        assert_eq!(r.sets[0].covers, vec![1, 2]);
        assert_eq!(r.total_weight, 2.0);
        assert!(r.total_weight <= weight_bound(1.0, 3));
        assert!(r.rounds.iter().all(|x| x.remainder_valid));
    }

    #[test]
    fn singletons_win_when_b_is_large() {
        // B_3 = {0, 1, 2}: WithA covers 1 element at c, singleton costs c/4
        let inst = COrderedInstance::from_b(
            4.0,
            vec![set(&[]), set(&[0]), set(&[0, 1]), set(&[0, 1, 2])],
        );
        let r = greedy_cover(&inst).unwrap();
        assert_eq!(r.sets[0].kind, SetKind::Singleton);
        assert_eq!(r.sets[0].weight, 1.0);
    }

    #[test]
    fn weight_bound_values() {
        assert_eq!(weight_bound(1.0, 1), 2.0);
        assert_eq!(weight_bound(1.0, 2), 3.0);
        assert!((weight_bound(5.0, 10) - 29.289682539682538).abs() < 1e-9);
    }
}
