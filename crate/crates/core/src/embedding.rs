//! Embeddings of `Cay[Z_v : ±E(A)]` and their faces.
//!
//! The rotation at every vertex is the translate of a single cyclic
//! permutation `ρ_0` of the connection set: `ρ(x, x+a) = (x, x + ρ_0(a))`,
//! where `ρ_0(a) = -ω_r(a)` for `a ∈ E(A)` and `ρ_0(a) = ω_c(-a)` for
//! `a ∈ -E(A)`. Faces are orbits of `(x, y) -> (y, y + ρ_0(x - y))`.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::heffter::orderings_from_orientations;
use crate::knight::OrientationPair;
use crate::perm::Permutation;
use crate::pfarray::{neg, signed, PartiallyFilledArray};

const NONE: u32 = u32::MAX;

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the array's text form.
    pub array_sha256: String,
    #[serde(rename = "R")]
    pub r: Vec<i8>,
    #[serde(rename = "C")]
    pub c: Vec<i8>,
}

/// A `Z_v`-regular rotation system given by `ρ_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombinatorialEmbedding {
    v: u32,
    t: u32,
    /// `rho0[a]` for `a` in the connection set, `NONE` elsewhere.
    rho0: Vec<u32>,
    rho0_inv: Vec<u32>,
    connection: Vec<u32>,
    /// Which elements of the connection set come from the array itself.
    positive: Vec<bool>,
    provenance: Option<Provenance>,
}

/// JSON form; `rho0_cycle` lists `ρ_0` as one cycle from its least element.
#[derive(Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub v: u32,
    pub t: u32,
    pub positive: Vec<i64>,
    pub rho0_cycle: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl CombinatorialEmbedding {
    /// From `ρ_0` on `±E`, where `positive` is `E`. `ρ_0` must be one cycle.
    pub fn from_rho0(v: u32, t: u32, positive: &BTreeSet<u32>, rho0: &Permutation) -> Result<Self> {
        if t == 0 || !v.is_multiple_of(t) {
            return Err(Error::SubgroupOrder { v: v as u64, t: t as u64 });
        }
        let step = v / t;
        let mut dense = vec![NONE; v as usize];
        let mut is_pos = vec![false; v as usize];
        for (a, b) in rho0.pairs() {
            if a >= v || b >= v {
                return Err(Error::InvalidPermutation(format!("{a} -> {b} outside Z_{v}")));
            }
            if a % step == 0 {
                return Err(Error::ValueInSubgroup(a));
            }
            dense[a as usize] = b;
        }
        for &a in positive {
            if (a as usize) >= dense.len() || dense[a as usize] == NONE || dense[neg(a, v) as usize] == NONE {
                return Err(Error::InvalidPermutation(format!("{a} and its negative must both be in the domain")));
            }
            if positive.contains(&neg(a, v)) {
                return Err(Error::InvalidPermutation(format!("{a} and -{a} are both marked positive")));
            }
            is_pos[a as usize] = true;
        }
        if positive.len() * 2 != rho0.len() {
            return Err(Error::InvalidPermutation("positive part must be half of the connection set".into()));
        }
        if !rho0.is_full_cycle() {
            return Err(Error::NotCompatible(format!("rho0 has cycle type {:?}", rho0.cycle_type())));
        }
        let connection = rho0.domain().collect();
        let mut inv = vec![NONE; v as usize];
        for (a, b) in rho0.pairs() {
            inv[b as usize] = a;
        }
        Ok(CombinatorialEmbedding { v, t, rho0: dense, rho0_inv: inv, connection, positive: is_pos, provenance: None })
    }

    pub fn modulus(&self) -> u32 {
        self.v
    }

    pub fn subgroup_order(&self) -> u32 {
        self.t
    }

    pub fn connection_set(&self) -> &[u32] {
        &self.connection
    }

    pub fn is_positive(&self, a: u32) -> bool {
        self.positive.get(a as usize).copied().unwrap_or(false)
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn rho0(&self, a: u32) -> Option<u32> {
        self.rho0.get(a as usize).copied().filter(|&b| b != NONE)
    }

    pub fn inverse_rho0(&self, a: u32) -> Option<u32> {
        self.rho0_inv.get(a as usize).copied().filter(|&b| b != NONE)
    }

    pub fn rho0_perm(&self) -> Permutation {
        Permutation::from_pairs(self.connection.iter().map(|&a| (a, self.rho0[a as usize]))).expect("stored rho0 is a bijection")
    }

    /// `ρ(x, y) = (x, x + ρ_0(y - x))`; `None` when `x, y` are not adjacent.
    pub fn rotate(&self, x: u32, y: u32) -> Option<(u32, u32)> {
        let a = self.rho0(self.sub(y, x))?;
        Some((x, self.add(x, a)))
    }

    pub fn is_edge(&self, x: u32, y: u32) -> bool {
        x < self.v && y < self.v && self.rho0(self.sub(y, x)).is_some()
    }

    /// The embedding with rotation `ρ^{-1}`.
    pub fn inverse(&self) -> CombinatorialEmbedding {
        CombinatorialEmbedding {
            rho0: self.rho0_inv.clone(),
            rho0_inv: self.rho0.clone(),
            provenance: None,
            ..self.clone()
        }
    }

    /// `ρ_0` as one cycle starting at the least element of the connection set.
    pub fn rho0_cycle(&self) -> Vec<u32> {
        let start = self.connection[0];
        let mut out = vec![start];
        let mut x = self.rho0[start as usize];
        while x != start {
            out.push(x);
            x = self.rho0[x as usize];
        }
        out
    }

    /// Stable fingerprint of the rotation map.
    pub fn rho0_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.v.to_le_bytes());
        for a in self.rho0_cycle() {
            h.update(a.to_le_bytes());
        }
        hex(&h.finalize())
    }

    pub fn add(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + y as u64) % self.v as u64) as u32
    }

    pub fn sub(&self, x: u32, y: u32) -> u32 {
        ((x as u64 + self.v as u64 - y as u64 % self.v as u64) % self.v as u64) as u32
    }

    pub fn to_file(&self) -> EmbeddingFile {
        let v = self.v;
        EmbeddingFile {
            v,
            t: self.t,
            positive: self.connection.iter().filter(|&&a| self.is_positive(a)).map(|&a| signed(a, v)).collect(),
            rho0_cycle: self.rho0_cycle().into_iter().map(|a| signed(a, v)).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_file(f: &EmbeddingFile) -> Result<Self> {
        if f.v == 0 {
            return Err(Error::Parameters("v must be positive".into()));
        }
        let red = |x: i64| crate::pfarray::reduce(x, f.v);
        let cyc: Vec<u32> = f.rho0_cycle.iter().map(|&x| red(x)).collect();
        let rho0 = Permutation::from_cycles(&[cyc])?;
        let positive: BTreeSet<u32> = f.positive.iter().map(|&x| red(x)).collect();
        let mut e = Self::from_rho0(f.v, f.t, &positive, &rho0)?;
        e.provenance = f.provenance.clone();
        Ok(e)
    }
}

impl Serialize for CombinatorialEmbedding {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}

impl<'de> Deserialize<'de> for CombinatorialEmbedding {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = EmbeddingFile::deserialize(d)?;
        Self::from_file(&f).map_err(serde::de::Error::custom)
    }
}

/// `ρ_0` from value-labelled `ω_r, ω_c` on `E(A)`.
pub fn build_rho0(a: &PartiallyFilledArray, omega_r: &Permutation, omega_c: &Permutation) -> Result<Permutation> {
    let v = a.modulus();
    let values: BTreeSet<u32> = a.entries().map(|(_, _, x)| x).collect();
    if values.len() != a.filled_count() {
        return Err(Error::RepeatedValues);
    }
    if let Some(x) = values.iter().find(|&&x| a.in_subgroup(x)) {
        return Err(Error::ValueInSubgroup(*x));
    }
    let ground: BTreeSet<u32> = omega_r.domain().collect();
    if ground != values || !omega_r.same_ground_set(omega_c) {
        return Err(Error::GroundSetMismatch);
    }
    let mut pairs = Vec::with_capacity(values.len() * 2);
    for &x in &values {
        pairs.push((x, neg(omega_r.apply(x).expect("in domain"), v)));
        pairs.push((neg(x, v), omega_c.apply(x).expect("in domain")));
    }
    Permutation::from_pairs(pairs)
}

/// The embedding induced by the orientation pair `(R, C)`.
pub fn build_embedding(a: &PartiallyFilledArray, pair: &OrientationPair) -> Result<CombinatorialEmbedding> {
    let ord = orderings_from_orientations(a, &pair.r, &pair.c)?;
    let (wr, wc) = (ord.omega_r()?, ord.omega_c()?);
    let rho0 = build_rho0(a, &wr, &wc)?;
    if !wc.compose(&wr)?.is_full_cycle() {
        return Err(Error::NotCompatible(format!("omega_c o omega_r has cycle type {:?}", wc.compose(&wr)?.cycle_type())));
    }
    let positive = a.entries().map(|(_, _, x)| x).collect();
    let mut e = CombinatorialEmbedding::from_rho0(a.modulus(), a.subgroup_order(), &positive, &rho0)?;
    e.provenance = Some(Provenance { array_sha256: sha256_hex(a.to_text().as_bytes()), r: pair.r.clone(), c: pair.c.clone() });
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FaceColor {
    /// Boundary differences in `-E(A)`: traced along the rows.
    Row,
    /// Boundary differences in `E(A)`: traced along the columns.
    Column,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    /// Vertices in trace order, rotated to the lexicographically least form.
    pub boundary: Vec<u32>,
    pub color: FaceColor,
    pub simple: bool,
}

impl Face {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn translate(&self, g: u32, v: u32) -> Face {
        let b: Vec<u32> = self.boundary.iter().map(|&x| ((x as u64 + g as u64) % v as u64) as u32).collect();
        Face { boundary: least_rotation(&b), ..self.clone() }
    }
}

fn least_rotation(b: &[u32]) -> Vec<u32> {
    (0..b.len())
        .map(|s| b[s..].iter().chain(&b[..s]).copied().collect_vec())
        .min()
        .unwrap_or_default()
}

/// Every face, sorted. Each oriented edge is traced exactly once.
pub fn trace_faces(emb: &CombinatorialEmbedding) -> Vec<Face> {
    let v = emb.v;
    let d = emb.connection.len();
    let mut slot = vec![usize::MAX; v as usize];
    for (i, &a) in emb.connection.iter().enumerate() {
        slot[a as usize] = i;
    }
    // Faces through (x, x + a) are translates of faces through (0, a), so
    // trace from vertex 0 only and translate.
    let mut seen = vec![false; d];
    let mut base: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for &a0 in &emb.connection {
        if seen[slot[a0 as usize]] {
            continue;
        }
        let (mut x, mut y) = (0u32, a0);
        let mut verts = Vec::new();
        let mut diffs = Vec::new();
        loop {
            verts.push(x);
            diffs.push(emb.sub(y, x));
            let nx = y;
            let ny = emb.add(y, emb.rho0[emb.sub(x, y) as usize]);
            x = nx;
            y = ny;
            if x == 0 && y == a0 {
                break;
            }
            if x == 0 {
                seen[slot[emb.sub(y, x) as usize]] = true;
            }
        }
        seen[slot[a0 as usize]] = true;
        base.push((verts, diffs));
    }
    let mut faces: Vec<Face> = (0..v)
        .into_par_iter()
        .flat_map_iter(|g| {
            base.iter().map(move |(verts, diffs)| {
                let b: Vec<u32> = verts.iter().map(|&x| emb.add(x, g)).collect();
                let color = if diffs.iter().all(|&a| emb.is_positive(a)) {
                    FaceColor::Column
                } else if diffs.iter().all(|&a| !emb.is_positive(a)) {
                    FaceColor::Row
                } else {
                    FaceColor::Mixed
                };
                let simple = b.iter().all_unique();
                Face { boundary: least_rotation(&b), color, simple }
            })
        })
        .collect();
    faces.sort_unstable();
    faces.dedup();
    faces
}

/// Genus `1 + (nk - n - m - 1)(2nk + t) / 2` of the biembedding from an
/// `H_t(m, n; h, k)`.
pub fn genus_formula(m: u64, n: u64, k: u64, t: u64) -> Result<i64> {
    let num = (n as i128 * k as i128 - n as i128 - m as i128 - 1) * (2 * n as i128 * k as i128 + t as i128);
    if num % 2 != 0 {
        return Err(Error::Domain(format!("genus formula is not an integer for m={m}, n={n}, k={k}, t={t}")));
    }
    i64::try_from(1 + num / 2).map_err(|_| Error::Domain("genus overflows i64".into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiembeddingReport {
    pub pass: bool,
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
    pub row_faces: u64,
    pub column_faces: u64,
    pub mixed_faces: u64,
    /// Row faces have length `h`, column faces length `k`.
    pub lengths_match: bool,
    pub two_colorable: bool,
    pub simple: bool,
    pub genus_euler: i64,
    pub genus_formula: i64,
    pub euler_consistent: bool,
    pub z_v_regular: bool,
}

/// Full biembedding check for an embedding built from `a`.
pub fn report(a: &PartiallyFilledArray, emb: &CombinatorialEmbedding) -> Result<BiembeddingReport> {
    if a.modulus() != emb.v {
        return Err(Error::ModulusDiffers(a.modulus(), emb.v));
    }
    let (m, n) = (a.rows(), a.cols());
    let nk = a.filled_count();
    let (h, k) = (nk / m, nk / n);
    let faces = trace_faces(emb);
    report_from_faces(emb, &faces, m as u64, n as u64, h, k)
}

pub fn report_from_faces(
    emb: &CombinatorialEmbedding,
    faces: &[Face],
    m: u64,
    n: u64,
    h: usize,
    k: usize,
) -> Result<BiembeddingReport> {
    let v = emb.v as u64;
    let edges = v * emb.connection.len() as u64 / 2;
    let count = |c: FaceColor| faces.iter().filter(|f| f.color == c).count() as u64;
    let (row_faces, column_faces, mixed_faces) = (count(FaceColor::Row), count(FaceColor::Column), count(FaceColor::Mixed));
    let lengths_match = faces.iter().all(|f| match f.color {
        FaceColor::Row => f.len() == h,
        FaceColor::Column => f.len() == k,
        FaceColor::Mixed => false,
    });
    let f = faces.len() as u64;
    let chi = v as i128 - edges as i128 + f as i128;
    if chi % 2 != 0 {
        return Err(Error::Internal(format!("odd Euler characteristic {chi}")));
    }
    let genus_euler = ((2 - chi) / 2) as i64;
    let genus_formula = genus_formula(m, n, k as u64, emb.t as u64)?;

    // Each unoriented edge {x, x+a} must border one Row and one Column face.
    let mut color_of = vec![None; emb.connection.len()];
    let slot = |a: u32| emb.connection.binary_search(&a).expect("difference in connection set");
    let mut multi = false;
    for face in faces {
        let b = &face.boundary;
        for i in 0..b.len() {
            let (x, y) = (b[i], b[(i + 1) % b.len()]);
            if x != 0 {
                continue;
            }
            let s = slot(emb.sub(y, x));
            multi |= color_of[s].replace(face.color).is_some();
        }
    }
    let two_colorable = !multi
        && emb.connection.iter().all(|&a| {
            let c1 = color_of[slot(a)];
            let c2 = color_of[slot(neg(a, emb.v))];
            matches!((c1, c2), (Some(FaceColor::Row), Some(FaceColor::Column)) | (Some(FaceColor::Column), Some(FaceColor::Row)))
        });
    let simple = faces.iter().all(|f| f.simple);
    let set: HashSet<&Face> = faces.iter().collect();
    let z_v_regular = faces.par_iter().all(|f| set.contains(&f.translate(1, emb.v)));
    let euler_consistent = genus_euler == genus_formula;
    let pass = mixed_faces == 0 && lengths_match && two_colorable && simple && euler_consistent && z_v_regular;
    Ok(BiembeddingReport {
        pass,
        vertices: v,
        edges,
        faces: f,
        row_faces,
        column_faces,
        mixed_faces,
        lengths_match,
        two_colorable,
        simple,
        genus_euler,
        genus_formula,
        euler_consistent,
        z_v_regular,
    })
}
