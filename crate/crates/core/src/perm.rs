//! Finite permutations with explicit cycle structure.
//!
//! A [`Permutation`] acts on an arbitrary finite ground set of `u32` labels
//! (residues of `Z_v`, cell indices, column positions). Composition follows
//! the usual right-to-left convention: `a.compose(&b)` is `a ∘ b`, i.e. apply
//! `b` first.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Permutation {
    map: BTreeMap<u32, u32>,
}

impl Permutation {
    pub fn identity<I: IntoIterator<Item = u32>>(ground: I) -> Self {
        Permutation { map: ground.into_iter().map(|x| (x, x)).collect() }
    }

    /// Build from explicit `(point, image)` pairs; fails if the pairs do not
    /// describe a bijection of the listed points onto themselves.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (x, y) in pairs {
            if map.insert(x, y).is_some() {
                return Err(Error::InvalidPermutation(format!("point {x} mapped twice")));
            }
        }
        let images: BTreeSet<u32> = map.values().copied().collect();
        if images.len() != map.len() || images.iter().any(|y| !map.contains_key(y)) {
            return Err(Error::InvalidPermutation("images are not a rearrangement of the domain".into()));
        }
        Ok(Permutation { map })
    }

    /// Product of disjoint cycles. Each inner slice `(c_0, ..., c_{l-1})`
    /// sends `c_i` to `c_{i+1}` and `c_{l-1}` back to `c_0`.
    pub fn from_cycles<C: AsRef<[u32]>>(cycles: &[C]) -> Result<Self> {
        let mut pairs = Vec::new();
        for cycle in cycles {
            let c = cycle.as_ref();
            for (i, &x) in c.iter().enumerate() {
                pairs.push((x, c[(i + 1) % c.len()]));
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, x: u32) -> Option<u32> {
        self.map.get(&x).copied()
    }

    pub fn domain(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.map.iter().map(|(&x, &y)| (x, y))
    }

    pub fn same_ground_set(&self, other: &Permutation) -> bool {
        self.map.len() == other.map.len() && self.map.keys().eq(other.map.keys())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if !self.same_ground_set(other) {
            return Err(Error::GroundSetMismatch);
        }
        Ok(Permutation { map: other.map.iter().map(|(&x, &y)| (x, self.map[&y])).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        Permutation { map: self.map.iter().map(|(&x, &y)| (y, x)).collect() }
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let e = e.unsigned_abs();
        let map = self
            .map
            .keys()
            .map(|&x| {
                // Walk each orbit; e is reduced modulo the orbit length.
                let mut orbit = vec![x];
                let mut y = base.map[&x];
                while y != x {
                    orbit.push(y);
                    y = base.map[&y];
                }
                (x, orbit[(e % orbit.len() as u64) as usize])
            })
            .collect();
        Permutation { map }
    }

    /// Disjoint cycles, each starting at its least element, ordered by that
    /// element. Fixed points appear as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.map.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            seen.insert(start);
            let mut y = self.map[&start];
            while y != start {
                seen.insert(y);
                cycle.push(y);
                y = self.map[&y];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// True when the permutation is one cycle through every point of its
    /// ground set. The empty permutation is not a cycle.
    pub fn is_full_cycle(&self) -> bool {
        let Some((&start, _)) = self.map.iter().next() else {
            return false;
        };
        let mut steps = 1;
        let mut y = self.map[&start];
        while y != start {
            steps += 1;
            y = self.map[&y];
        }
        steps == self.map.len()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(x, y)| x == y)
    }

    /// Orbit of `x` listed from `x`.
    pub fn orbit(&self, x: u32) -> Option<Vec<u32>> {
        let mut y = self.apply(x)?;
        let mut out = vec![x];
        while y != x {
            out.push(y);
            y = self.map[&y];
        }
        Some(out)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.cycles() {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Two cyclic sequences are equal up to rotation.
pub fn cyclically_equal(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    match b.iter().position(|&x| x == a[0]) {
        Some(off) => a.iter().enumerate().all(|(i, &x)| b[(i + off) % b.len()] == x),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn compose_applies_right_first() {
        let a = Permutation::from_cycles(&[vec![1, 2, 3]]).unwrap();
        let b = Permutation::from_cycles(&[vec![1, 2], vec![3]]).unwrap();
        // (a ∘ b)(1) = a(2) = 3
        assert_eq!(a.compose(&b).unwrap().apply(1), Some(3));
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(Permutation::from_pairs([(1, 2), (2, 2)]).is_err());
        assert!(Permutation::from_pairs([(1, 5)]).is_err());
    }

    #[test]
    fn mismatched_ground_sets() {
        let a = Permutation::identity([1, 2]);
        let b = Permutation::identity([1, 3]);
        assert!(matches!(a.compose(&b), Err(Error::GroundSetMismatch)));
    }

    #[test]
    fn full_cycle_detection() {
        assert!(Permutation::from_cycles(&[vec![4, 9, 1]]).unwrap().is_full_cycle());
        assert!(!Permutation::from_cycles(&[vec![4, 9], vec![1]]).unwrap().is_full_cycle());
        assert!(!Permutation::default().is_full_cycle());
        assert!(Permutation::identity([7]).is_full_cycle());
    }

    #[test]
    fn cyclic_equality() {
        assert!(cyclically_equal(&[1, 2, 3], &[3, 1, 2]));
        assert!(!cyclically_equal(&[1, 2, 3], &[1, 3, 2]));
    }

    fn arb_perm() -> impl Strategy<Value = Permutation> {
        (1usize..12).prop_flat_map(|n| {
            Just((0..n as u32).collect::<Vec<_>>()).prop_shuffle().prop_map(move |imgs| {
                Permutation::from_pairs((0..n as u32).zip(imgs)).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(p in arb_perm()) {
            prop_assert!(p.compose(&p.inverse()).unwrap().is_identity());
        }

        #[test]
        fn pow_matches_repeated_composition(p in arb_perm(), e in 0i64..7) {
            let mut acc = Permutation::identity(p.domain());
            for _ in 0..e {
                acc = p.compose(&acc).unwrap();
            }
            prop_assert_eq!(p.pow(e), acc.clone());
            prop_assert_eq!(p.pow(-e), acc.inverse());
        }

        #[test]
        fn cycles_roundtrip(p in arb_perm()) {
            prop_assert_eq!(Permutation::from_cycles(&p.cycles()).unwrap(), p.clone());
            prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), p.len());
        }
    }
}
