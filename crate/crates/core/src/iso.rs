//! Isomorphisms between `Z_v`-regular embeddings.
//!
//! A bijection `σ` of `Z_v` is orientation preserving when
//! `σ ∘ ρ = ρ' ∘ σ` and reversing when `σ ∘ ρ = ρ'^{-1} ∘ σ` on every
//! oriented edge. Since translations are automorphisms of both sides, a
//! search may assume `σ(0) = 0`; once the image of one neighbor of 0 and the
//! kind are fixed, the rotations determine `σ` everywhere.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::CombinatorialEmbedding;
use crate::error::{Error, Result};
use crate::heffter::{is_globally_simple, validate_heffter};
use crate::knight::{self, OrientationPair};
use crate::pfarray::{diagonal_of, PartiallyFilledArray};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MapKind {
    Preserving,
    Reversing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Preserving,
    Reversing,
    NotIso,
}

impl From<MapKind> for Verdict {
    fn from(k: MapKind) -> Self {
        match k {
            MapKind::Preserving => Verdict::Preserving,
            MapKind::Reversing => Verdict::Reversing,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct EmbeddingMap {
    /// `sigma[x]` is the image of vertex `x`.
    pub sigma: Vec<u32>,
    pub kind: MapKind,
}

impl EmbeddingMap {
    pub fn identity(v: u32) -> Self {
        EmbeddingMap { sigma: (0..v).collect(), kind: MapKind::Preserving }
    }

    pub fn translation(v: u32, g: u32) -> Self {
        EmbeddingMap { sigma: (0..v).map(|x| ((x as u64 + g as u64) % v as u64) as u32).collect(), kind: MapKind::Preserving }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn inverse_sigma(&self) -> Vec<u32> {
        let mut inv = vec![0; self.sigma.len()];
        for (x, &y) in self.sigma.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        inv
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &EmbeddingMap) -> EmbeddingMap {
        let kind = if self.kind == other.kind { MapKind::Preserving } else { MapKind::Reversing };
        EmbeddingMap { sigma: other.sigma.iter().map(|&x| self.sigma[x as usize]).collect(), kind }
    }
}

fn same_modulus(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding) -> Result<()> {
    if p1.modulus() != p2.modulus() {
        return Err(Error::ModulusDiffers(p1.modulus(), p2.modulus()));
    }
    Ok(())
}

fn is_bijection(sigma: &[u32], v: u32) -> bool {
    sigma.len() == v as usize && sigma.iter().all(|&x| x < v) && sigma.iter().all_unique()
}

/// Which of the two isomorphism conditions `σ` satisfies, checked on every
/// oriented edge; `Preserving` is tried first.
pub fn verify_map(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding, sigma: &[u32]) -> Result<Verdict> {
    same_modulus(p1, p2)?;
    let v = p1.modulus();
    if !is_bijection(sigma, v) {
        return Err(Error::InvalidPermutation("sigma is not a bijection of Z_v".into()));
    }
    if p1.connection_set().len() != p2.connection_set().len() {
        return Ok(Verdict::NotIso);
    }
    let img = |x: u32, a: u32| p2.sub(sigma[p1.add(x, a) as usize], sigma[x as usize]);
    let graph_iso = (0..v).into_par_iter().all(|x| p1.connection_set().iter().all(|&a| p2.is_edge(0, img(x, a))));
    if !graph_iso {
        return Ok(Verdict::NotIso);
    }
    let holds = |kind: MapKind| {
        (0..v).into_par_iter().all(|x| {
            p1.connection_set().iter().all(|&a| {
                let lhs = img(x, p1.rho0(a).expect("in connection set"));
                let b = img(x, a);
                let rhs = match kind {
                    MapKind::Preserving => p2.rho0(b),
                    MapKind::Reversing => p2.inverse_rho0(b),
                };
                rhs == Some(lhs)
            })
        })
    };
    Ok(if holds(MapKind::Preserving) {
        Verdict::Preserving
    } else if holds(MapKind::Reversing) {
        Verdict::Reversing
    } else {
        Verdict::NotIso
    })
}

/// The unique candidate with `σ(0) = 0`, `σ(x1) = b` and the given kind,
/// where `x1` is the least neighbor of 0; `None` when the rotations force a
/// contradiction.
fn propagate(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding, b: u32, kind: MapKind) -> Option<Vec<u32>> {
    const UNSET: u32 = u32::MAX;
    let v = p1.modulus() as usize;
    let x1 = p1.connection_set()[0];
    let mut sigma = vec![UNSET; v];
    let mut used = vec![false; v];
    let mut assign = |sigma: &mut Vec<u32>, x: u32, y: u32| -> bool {
        match sigma[x as usize] {
            UNSET if !used[y as usize] => {
                sigma[x as usize] = y;
                used[y as usize] = true;
                true
            }
            cur => cur == y,
        }
    };
    assign(&mut sigma, 0, 0);
    if !assign(&mut sigma, x1, b) {
        return None;
    }
    let deg = p1.connection_set().len();
    let step2 = |a: u32| match kind {
        MapKind::Preserving => p2.rho0(a),
        MapKind::Reversing => p2.inverse_rho0(a),
    };
    // (vertex, a neighbor whose image is known)
    let mut queue = VecDeque::from([(0u32, x1)]);
    let mut done = vec![false; v];
    while let Some((x, y)) = queue.pop_front() {
        if done[x as usize] {
            continue;
        }
        done[x as usize] = true;
        let sx = sigma[x as usize];
        let (mut a, mut b2) = (p1.sub(y, x), p2.sub(sigma[y as usize], sx));
        for _ in 0..deg {
            let nb = p1.add(x, a);
            if !assign(&mut sigma, nb, p2.add(sx, b2)) {
                return None;
            }
            if !done[nb as usize] {
                queue.push_back((nb, x));
            }
            a = p1.rho0(a)?;
            b2 = step2(b2)?;
        }
        if a != p1.sub(y, x) || b2 != p2.sub(sigma[y as usize], sx) {
            return None;
        }
    }
    sigma.iter().all(|&s| s != UNSET).then_some(sigma)
}

fn candidates(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding) -> Vec<(u32, MapKind)> {
    if p1.connection_set().len() != p2.connection_set().len() {
        return Vec::new();
    }
    p2.connection_set().iter().flat_map(|&b| [(b, MapKind::Preserving), (b, MapKind::Reversing)]).collect()
}

fn accept(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding, b: u32, kind: MapKind) -> Option<EmbeddingMap> {
    let sigma = propagate(p1, p2, b, kind)?;
    let verdict = verify_map(p1, p2, &sigma).expect("same modulus, bijective");
    (verdict == Verdict::from(kind)).then_some(EmbeddingMap { sigma, kind })
}

/// First isomorphism fixing 0, in the order (image of the least neighbor of
/// 0 ascending, Preserving before Reversing).
pub fn find_isomorphism(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding) -> Result<Option<EmbeddingMap>> {
    same_modulus(p1, p2)?;
    Ok(candidates(p1, p2).into_par_iter().find_map_first(|(b, kind)| accept(p1, p2, b, kind)))
}

/// Every isomorphism fixing 0, one candidate at a time.
pub fn isomorphisms_fixing_zero(p1: &CombinatorialEmbedding, p2: &CombinatorialEmbedding) -> Result<Vec<EmbeddingMap>> {
    same_modulus(p1, p2)?;
    Ok(candidates(p1, p2).into_par_iter().filter_map(|(b, kind)| accept(p1, p2, b, kind)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerGroup {
    pub elements: Vec<EmbeddingMap>,
    pub order: usize,
    pub order_preserving: usize,
    /// `(m - 1) t`, the degree of every vertex.
    pub degree: usize,
}

impl StabilizerGroup {
    /// `|Aut_0| <= 2 |Aut_0^+| <= 2 (m - 1) t`.
    pub fn within_bounds(&self) -> bool {
        self.order <= 2 * self.order_preserving && self.order_preserving <= self.degree
    }
}

pub fn stabilizer(p: &CombinatorialEmbedding) -> StabilizerGroup {
    let elements = isomorphisms_fixing_zero(p, p).expect("same embedding");
    let order_preserving = elements.iter().filter(|m| m.kind == MapKind::Preserving).count();
    StabilizerGroup { order: elements.len(), order_preserving, degree: p.connection_set().len(), elements }
}

/// `φ_{σ,g} = σ ∘ τ_g^{-1} ∘ σ^{-1} ∘ τ_{σ(g)}`, certified to lie in `Aut_0(Π')`.
pub fn phi(sigma: &EmbeddingMap, g: u32, p: &CombinatorialEmbedding, p2: &CombinatorialEmbedding) -> Result<EmbeddingMap> {
    same_modulus(p, p2)?;
    let v = p.modulus();
    if sigma.sigma.first() != Some(&0) {
        return Err(Error::Hypothesis("sigma must fix 0".into()));
    }
    if verify_map(p, p2, &sigma.sigma)? != Verdict::from(sigma.kind) {
        return Err(Error::Hypothesis("sigma is not an isomorphism of the stated kind".into()));
    }
    let inv = sigma.inverse_sigma();
    let sg = sigma.sigma[(g % v) as usize];
    let out: Vec<u32> = (0..v).map(|x| sigma.sigma[p.sub(inv[p.add(x, sg) as usize], g % v) as usize]).collect();
    match verify_map(p2, p2, &out)? {
        Verdict::Preserving if out[0] == 0 => Ok(EmbeddingMap { sigma: out, kind: MapKind::Preserving }),
        other => Err(Error::Internal(format!("phi is not in Aut_0: {other:?}"))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassMember {
    /// Index into the deduplicated family.
    pub index: usize,
    /// Isomorphism from the class representative to this member.
    pub map: EmbeddingMap,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingClass {
    pub representative: usize,
    pub members: Vec<ClassMember>,
    pub aut0_order: usize,
    /// `min(2 |Aut_0| (m - 1) t, 4 ((m - 1) t)^2)`.
    pub cap: u128,
    /// Within `2 ((m - 1) t)^2`.
    pub within_sharp_cap: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationResult {
    pub input_size: usize,
    pub distinct: usize,
    /// Deduplicated family sorted by serialized rotation map.
    #[serde(skip)]
    pub family: Vec<CombinatorialEmbedding>,
    pub classes: Vec<EmbeddingClass>,
}

impl ClassificationResult {
    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.members.len()).collect()
    }
}

/// Greedy partition into isomorphism classes. Aborts if a class exceeds the
/// proven size cap.
pub fn classify(family: &[CombinatorialEmbedding]) -> Result<ClassificationResult> {
    let input_size = family.len();
    if let Some(first) = family.first() {
        let key = |e: &CombinatorialEmbedding| (e.modulus(), e.subgroup_order(), e.connection_set().len());
        if family.iter().any(|e| key(e) != key(first)) {
            return Err(Error::Parameters("family mixes embeddings with different parameters".into()));
        }
    }
    let keyed: BTreeMap<Vec<u32>, &CombinatorialEmbedding> = family.iter().map(|e| (e.rho0_cycle(), e)).collect();
    let members: Vec<CombinatorialEmbedding> = keyed.into_values().cloned().collect();
    let mut classes: Vec<EmbeddingClass> = Vec::new();
    for (idx, e) in members.iter().enumerate() {
        let hit = classes
            .par_iter()
            .enumerate()
            .find_map_first(|(ci, c)| find_isomorphism(&members[c.representative], e).ok().flatten().map(|m| (ci, m)));
        match hit {
            Some((ci, map)) => classes[ci].members.push(ClassMember { index: idx, map }),
            None => {
                let v = e.modulus();
                let aut0 = stabilizer(e).order;
                let deg = e.connection_set().len() as u128;
                classes.push(EmbeddingClass {
                    representative: idx,
                    members: vec![ClassMember { index: idx, map: EmbeddingMap::identity(v) }],
                    aut0_order: aut0,
                    cap: (2 * aut0 as u128 * deg).min(4 * deg * deg),
                    within_sharp_cap: true,
                });
            }
        }
    }
    for c in &mut classes {
        let size = c.members.len() as u128;
        let deg = members[c.representative].connection_set().len() as u128;
        if size > c.cap {
            return Err(Error::Internal(format!(
                "class of representative {} has {size} members, above the cap {}",
                c.representative, c.cap
            )));
        }
        c.within_sharp_cap = size <= 2 * deg * deg;
    }
    Ok(ClassificationResult { input_size, distinct: members.len(), family: members, classes })
}

/// Number of distinct embeddings induced by a batch of `(array, solution)`
/// pairs satisfying the distinctness criterion: square k-diagonal globally
/// simple arrays with equal entry sets and skeletons, every two of which
/// agree on some filled diagonal. Under these hypotheses distinct pairs
/// give distinct embeddings, so nothing is built.
pub fn certify_distinct(batch: &[(PartiallyFilledArray, OrientationPair)]) -> Result<usize> {
    let Some((first, _)) = batch.first() else {
        return Ok(0);
    };
    let skel = first.skeleton();
    let prof = skel.classify_diagonality()?;
    let values: BTreeSet<u32> = first.entries().map(|(_, _, x)| x).collect();
    for (a, pair) in batch {
        if a.skeleton() != skel {
            return Err(Error::Hypothesis("skeletons differ".into()));
        }
        if a.modulus() != first.modulus() || a.entries().map(|(_, _, x)| x).collect::<BTreeSet<_>>() != values {
            return Err(Error::Hypothesis("entry sets differ".into()));
        }
        if !validate_heffter(a)?.pass {
            return Err(Error::Hypothesis("not a relative Heffter array".into()));
        }
        if !is_globally_simple(a) {
            return Err(Error::Hypothesis("array is not globally simple".into()));
        }
        if !knight::is_solution(&skel, pair)? {
            return Err(Error::Hypothesis("orientation pair is not a solution".into()));
        }
    }
    let n = prof.n;
    let distinct_arrays: Vec<&PartiallyFilledArray> = batch.iter().map(|(a, _)| a).unique().collect();
    for (a, b) in distinct_arrays.iter().tuple_combinations() {
        let shared = prof.filled.iter().any(|&d| {
            skel.positions().filter(|&(i, j)| diagonal_of(i, j, n) == d).all(|(i, j)| a.get(i, j) == b.get(i, j))
        });
        if !shared {
            return Err(Error::Hypothesis("two arrays agree on no filled diagonal".into()));
        }
    }
    Ok(batch.iter().unique().count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::build_embedding;
    use crate::fixtures;

    fn example() -> CombinatorialEmbedding {
        let a = fixtures::example_h9_11_9();
        let (r, c) = fixtures::example_orientation();
        build_embedding(&a, &OrientationPair::new(r, c).unwrap()).unwrap()
    }

    #[test]
    fn translations_preserve() {
        let e = example();
        for g in [0, 1, 17, 206] {
            assert_eq!(verify_map(&e, &e, &EmbeddingMap::translation(207, g).sigma).unwrap(), Verdict::Preserving);
        }
    }

    #[test]
    fn identity_onto_inverse_reverses() {
        let e = example();
        let inv = e.inverse();
        assert_eq!(verify_map(&e, &inv, &EmbeddingMap::identity(207).sigma).unwrap(), Verdict::Reversing);
        let found = find_isomorphism(&e, &inv).unwrap().unwrap();
        assert_eq!(verify_map(&e, &inv, &found.sigma).unwrap(), Verdict::from(found.kind));
    }

    #[test]
    fn self_isomorphism_is_identity() {
        let e = example();
        let m = find_isomorphism(&e, &e).unwrap().unwrap();
        assert!(m.is_identity());
        assert_eq!(m.kind, MapKind::Preserving);
    }

    #[test]
    fn phi_of_identity_is_identity() {
        let e = example();
        for g in [1, 5, 100] {
            assert!(phi(&EmbeddingMap::identity(207), g, &e, &e).unwrap().is_identity());
        }
        assert!(matches!(phi(&EmbeddingMap::translation(207, 1), 3, &e, &e), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn stabilizer_restricts_to_rho0_powers() {
        let e = example();
        let st = stabilizer(&e);
        assert!(st.within_bounds());
        let rho = e.rho0_perm();
        for m in st.elements.iter().filter(|m| m.kind == MapKind::Preserving) {
            let on_n0 = |x: u32| m.sigma[x as usize];
            assert!((0..198).any(|i| { let p = rho.pow(i); e.connection_set().iter().all(|&x| p.apply(x) == Some(on_n0(x))) }));
        }
    }

    #[test]
    fn single_member_family() {
        let r = classify(&[example()]).unwrap();
        assert_eq!(r.classes.len(), 1);
        assert_eq!(r.class_sizes(), vec![1]);
    }

    #[test]
    fn modulus_mismatch_is_an_error() {
        let e = example();
        let pos: BTreeSet<u32> = [1].into();
        let small = CombinatorialEmbedding::from_rho0(5, 1, &pos, &crate::perm::Permutation::from_cycles(&[vec![1u32, 4]]).unwrap()).unwrap();
        assert!(matches!(verify_map(&e, &small, &EmbeddingMap::translation(207, 1).sigma), Err(Error::ModulusDiffers(207, 5))));
        assert!(classify(&[e, small]).is_err());
    }
}
