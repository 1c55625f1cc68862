//! The crazy knight's tour on a toroidal partially filled array.
//!
//! Given row orientations `R ∈ {±1}^m` and column orientations `C ∈ {±1}^n`,
//! the successor of a filled cell `(i, j)` is found by moving along row `i`
//! in direction `r_i` to the next filled cell, say in column `j'`, and then
//! along column `j'` in direction `c_{j'}` to the next filled cell. A pair
//! `(R, C)` is a *solution* when one orbit of this map covers every filled
//! cell. Rows scan left to right for `+1`, columns top to bottom for `+1`;
//! a line with a single filled cell wraps onto itself.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pfarray::Skeleton;
use crate::perm::Permutation;

/// Row and column orientations. `E` (the `-1` positions of `C`) is derived.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientationPair {
    pub r: Vec<i8>,
    pub c: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct PairFile {
    #[serde(rename = "R")]
    r: Vec<i8>,
    #[serde(rename = "C")]
    c: Vec<i8>,
    #[serde(rename = "E", default)]
    e: Option<Vec<usize>>,
}

impl Serialize for OrientationPair {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PairFile { r: self.r.clone(), c: self.c.clone(), e: Some(self.e()) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrientationPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PairFile::deserialize(d)?;
        let pair = OrientationPair::new(f.r, f.c).map_err(serde::de::Error::custom)?;
        if f.e.is_some_and(|e| e != pair.e()) {
            return Err(serde::de::Error::custom("E does not match the -1 positions of C"));
        }
        Ok(pair)
    }
}

impl OrientationPair {
    pub fn new(r: Vec<i8>, c: Vec<i8>) -> Result<Self> {
        if r.iter().chain(&c).any(|&x| x != 1 && x != -1) {
            return Err(Error::Parameters("orientations must be +1 or -1".into()));
        }
        Ok(OrientationPair { r, c })
    }

    /// `R = (1, ..., 1)` of length `m` and `C` with `-1` exactly at the
    /// 1-based positions in `e`.
    pub fn trivial_r(m: usize, n: usize, e: &[usize]) -> Result<Self> {
        let mut c = vec![1i8; n];
        for &p in e {
            if !(1..=n).contains(&p) {
                return Err(Error::Parameters(format!("position {p} outside 1..={n}")));
            }
            c[p - 1] = -1;
        }
        Ok(OrientationPair { r: vec![1; m], c })
    }

    /// Sorted positions of the `-1` entries of `C`.
    pub fn e(&self) -> Vec<usize> {
        self.c.iter().positions(|&x| x < 0).map(|p| p + 1).collect()
    }

    pub fn has_trivial_r(&self) -> bool {
        self.r.iter().all(|&x| x == 1)
    }

    /// `(-R, -C)`.
    pub fn negate(&self) -> OrientationPair {
        OrientationPair { r: self.r.iter().map(|x| -x).collect(), c: self.c.iter().map(|x| -x).collect() }
    }

    /// `(C, R)` on the same skeleton. Requires a cyclically k-diagonal
    /// skeleton and trivial `R`.
    pub fn swap(&self, skel: &Skeleton) -> Result<OrientationPair> {
        let prof = skel.classify_diagonality()?;
        if !prof.cyclic {
            return Err(Error::Hypothesis("swap needs a cyclically k-diagonal skeleton".into()));
        }
        if !self.has_trivial_r() {
            return Err(Error::Hypothesis("swap needs R = (1, ..., 1)".into()));
        }
        Ok(self.swapped())
    }

    fn swapped(&self) -> OrientationPair {
        OrientationPair { r: self.c.clone(), c: self.r.clone() }
    }
}

/// Per-line indices of a skeleton for constant-time successor lookups.
#[derive(Clone, Debug)]
pub struct Torus {
    rows: usize,
    cols: usize,
    row_cols: Vec<Vec<usize>>,
    col_rows: Vec<Vec<usize>>,
    row_idx: Vec<u32>,
    col_idx: Vec<u32>,
    first: (usize, usize),
    filled: usize,
}

impl Torus {
    pub fn new(skel: &Skeleton) -> Result<Self> {
        let (m, n) = (skel.rows(), skel.cols());
        let first = skel.positions().next().ok_or(Error::EmptySkeleton)?;
        let mut row_cols = vec![Vec::new(); m + 1];
        let mut col_rows = vec![Vec::new(); n + 1];
        let mut row_idx = vec![u32::MAX; (m + 1) * (n + 1)];
        let mut col_idx = vec![u32::MAX; (m + 1) * (n + 1)];
        // positions() is row-major, so both lists come out sorted.
        for (i, j) in skel.positions() {
            row_idx[i * (n + 1) + j] = row_cols[i].len() as u32;
            row_cols[i].push(j);
            col_idx[i * (n + 1) + j] = col_rows[j].len() as u32;
            col_rows[j].push(i);
        }
        Ok(Torus { rows: m, cols: n, row_cols, col_rows, row_idx, col_idx, first, filled: skel.len() })
    }

    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn is_filled(&self, (i, j): (usize, usize)) -> bool {
        (1..=self.rows).contains(&i) && (1..=self.cols).contains(&j) && self.row_idx[i * (self.cols + 1) + j] != u32::MAX
    }

    fn step(line: &[usize], pos: u32, dir: i8) -> usize {
        let len = line.len();
        let p = pos as usize;
        if dir > 0 {
            line[(p + 1) % len]
        } else {
            line[(p + len - 1) % len]
        }
    }

    /// `S_{R,C}` on a filled cell; the cell must be filled.
    pub fn successor(&self, r: &[i8], c: &[i8], (i, j): (usize, usize)) -> (usize, usize) {
        let w = self.cols + 1;
        let j2 = Self::step(&self.row_cols[i], self.row_idx[i * w + j], r[i - 1]);
        let i2 = Self::step(&self.col_rows[j2], self.col_idx[i * w + j2], c[j2 - 1]);
        (i2, j2)
    }

    fn check_pair(&self, pair: &OrientationPair) -> Result<()> {
        if pair.r.len() != self.rows {
            return Err(Error::OrientationLength { expected: self.rows, got: pair.r.len() });
        }
        if pair.c.len() != self.cols {
            return Err(Error::OrientationLength { expected: self.cols, got: pair.c.len() });
        }
        Ok(())
    }

    /// Length of the orbit through `start`.
    fn period(&self, r: &[i8], c: &[i8], start: (usize, usize)) -> usize {
        let mut cell = self.successor(r, c, start);
        let mut period = 1;
        while cell != start {
            cell = self.successor(r, c, cell);
            period += 1;
        }
        period
    }

    pub fn is_solution(&self, pair: &OrientationPair) -> Result<bool> {
        self.check_pair(pair)?;
        Ok(self.period(&pair.r, &pair.c, self.first) == self.filled)
    }

    pub fn tour(&self, pair: &OrientationPair, start: (usize, usize)) -> Result<TourResult> {
        self.check_pair(pair)?;
        if !self.is_filled(start) {
            return Err(Error::EmptyCell(start.0, start.1));
        }
        let mut visited = vec![start];
        let mut cell = self.successor(&pair.r, &pair.c, start);
        while cell != start {
            visited.push(cell);
            cell = self.successor(&pair.r, &pair.c, cell);
        }
        Ok(TourResult { start, period: visited.len(), covers_all: visited.len() == self.filled, visited })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TourResult {
    pub start: (usize, usize),
    /// The orbit of `start`, from step 0.
    pub visited: Vec<(usize, usize)>,
    pub covers_all: bool,
    pub period: usize,
}

pub fn successor(skel: &Skeleton, pair: &OrientationPair, cell: (usize, usize)) -> Result<(usize, usize)> {
    let torus = Torus::new(skel)?;
    torus.check_pair(pair)?;
    if !torus.is_filled(cell) {
        return Err(Error::EmptyCell(cell.0, cell.1));
    }
    Ok(torus.successor(&pair.r, &pair.c, cell))
}

pub fn tour(skel: &Skeleton, pair: &OrientationPair, start: (usize, usize)) -> Result<TourResult> {
    Torus::new(skel)?.tour(pair, start)
}

pub fn is_solution(skel: &Skeleton, pair: &OrientationPair) -> Result<bool> {
    Torus::new(skel)?.is_solution(pair)
}

/// Every orientation pair (or every `C` with trivial `R`) whose tour covers
/// the skeleton, in lexicographic order with `+1 < -1`.
pub fn enumerate_solutions(skel: &Skeleton, trivial_r: bool, budget: u128) -> Result<Vec<OrientationPair>> {
    let torus = Torus::new(skel)?;
    let (m, n) = (skel.rows(), skel.cols());
    let bits = if trivial_r { n } else { m + n };
    if bits >= 127 || (1u128 << bits) > budget {
        return Err(Error::Budget { needed: if bits >= 127 { u128::MAX } else { 1u128 << bits }, budget });
    }
    let total = 1u64 << bits;
    let decode = |idx: u64| -> OrientationPair {
        // Most significant bit first; a set bit means -1.
        let sign = |p: usize| if idx >> (bits - 1 - p) & 1 == 1 { -1 } else { 1 };
        if trivial_r {
            OrientationPair { r: vec![1; m], c: (0..n).map(sign).collect() }
        } else {
            OrientationPair { r: (0..m).map(sign).collect(), c: (m..m + n).map(sign).collect() }
        }
    };
    Ok((0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let pair = decode(idx);
            (torus.period(&pair.r, &pair.c, torus.first) == torus.filled).then_some(pair)
        })
        .collect())
}

fn covers_classes(e: &[usize], d: usize) -> bool {
    let classes: BTreeSet<usize> = e.iter().map(|&x| x % d).collect();
    classes.len() == d
}

/// The two conditions of the width characterization, evaluated separately.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WidthVerdict {
    /// `E` meets every residue class modulo `gcd(n, s_j)` for every strip.
    pub classes_covered: bool,
    /// The tour from (1,1) passes through every `(e, e)` with `e ∈ E`.
    pub diagonal_cells_reached: bool,
}

impl WidthVerdict {
    pub fn holds(&self) -> bool {
        self.classes_covered && self.diagonal_cells_reached
    }
}

/// Characterization of trivial-`R` solutions on a k-diagonal skeleton (k
/// odd, `n > k`, `D_1` filled). An empty `E` never covers the classes.
pub fn check_char_width(skel: &Skeleton, e: &[usize]) -> Result<WidthVerdict> {
    let prof = skel.classify_diagonality()?;
    let (n, k) = (prof.n, prof.k);
    if k % 2 == 0 || k < 3 {
        return Err(Error::Hypothesis(format!("k = {k} must be odd and at least 3")));
    }
    if n <= k {
        return Err(Error::Hypothesis(format!("size n = {n} must exceed k = {k}")));
    }
    if !prof.filled.contains(&1) {
        return Err(Error::Hypothesis("diagonal D_1 must be filled".into()));
    }
    let pair = OrientationPair::trivial_r(n, n, e)?;
    let classes_covered = !e.is_empty() && prof.strip_gcds.iter().all(|&d| covers_classes(e, d));
    let orbit: BTreeSet<(usize, usize)> = tour(skel, &pair, (1, 1))?.visited.into_iter().collect();
    let diagonal_cells_reached = e.iter().all(|&x| orbit.contains(&(x, x)));
    Ok(WidthVerdict { classes_covered, diagonal_cells_reached })
}

fn cyclic_hypotheses(n: usize, k: usize, e: &[usize]) -> Result<Vec<usize>> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::Hypothesis(format!("k = {k} must be odd and at least 3")));
    }
    if n <= k {
        return Err(Error::Hypothesis(format!("size n = {n} must exceed k = {k}")));
    }
    let sorted: Vec<usize> = e.iter().copied().sorted().dedup().collect();
    if sorted.len() != e.len() || sorted.iter().any(|&x| !(1..=n).contains(&x)) {
        return Err(Error::Parameters(format!("E must be distinct positions in 1..={n}")));
    }
    Ok(sorted)
}

/// `(ω_1, ω_2)` on `E`: `ω_1(e)` is the first element of `E` met when
/// stepping from `e` backwards by `k - 1` modulo `n`; `ω_2(e_i) = e_{i+k-1}`
/// with indices modulo `|E|`.
pub fn omega_pair_cyclic(n: usize, k: usize, e: &[usize]) -> Result<(Permutation, Permutation)> {
    let e = cyclic_hypotheses(n, k, e)?;
    let members: BTreeSet<usize> = e.iter().copied().collect();
    let step = (k - 1) % n;
    let back = |x: usize| (x + n - 1 - step) % n + 1;
    let omega1 = e.iter().map(|&x| {
        let mut y = back(x);
        while !members.contains(&y) {
            y = back(y);
        }
        (x as u32, y as u32)
    });
    let omega1 = Permutation::from_pairs(omega1)?;
    let r = e.len();
    let omega2 = Permutation::from_pairs((0..r).map(|i| (e[i] as u32, e[(i + k - 1) % r] as u32)))?;
    Ok((omega1, omega2))
}

/// Characterization of trivial-`R` solutions on a cyclically k-diagonal
/// skeleton: `E` covers every class mod `gcd(n, k-1)` and `ω_2 ∘ ω_1` is a
/// single `|E|`-cycle. An empty `E` never qualifies.
pub fn check_char_cyclic(n: usize, k: usize, e: &[usize]) -> Result<bool> {
    let (w1, w2) = omega_pair_cyclic(n, k, e)?;
    if e.is_empty() {
        return Ok(false);
    }
    Ok(covers_classes(e, n.gcd(&(k - 1))) && w2.compose(&w1)?.is_full_cycle())
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    ThreeDiag,
    PowerTwo,
    KSeven,
    PrimeN,
    PairsGeneral,
}

impl std::str::FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "three-diag" | "3diag" => FamilyId::ThreeDiag,
            "power-two" | "power2" => FamilyId::PowerTwo,
            "k-seven" | "k7" => FamilyId::KSeven,
            "prime-n" | "prime" => FamilyId::PrimeN,
            "pairs-general" | "pairs" => FamilyId::PairsGeneral,
            _ => return Err(Error::Parameters(format!("unknown family `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
}

fn check(name: impl Into<String>, ok: bool) -> Check {
    Check { name: name.into(), ok }
}

#[derive(Clone, Debug, Default)]
pub struct FamilyOptions {
    /// Explicit `|E|`; must still satisfy the construction's arithmetic
    /// condition (coprimality or congruence).
    pub r: Option<usize>,
    /// Generate even when admissibility checks fail.
    pub force: bool,
}

/// Parameters, admissibility diagnostics and the target skeleton of one
/// solution family.
#[derive(Clone, Debug, Serialize)]
pub struct FamilySpec {
    pub id: FamilyId,
    pub n: usize,
    pub k: usize,
    pub r: Option<usize>,
    pub filled_diagonals: Vec<usize>,
    pub admissibility: Vec<Check>,
    /// Positions from which the base `E` sets are drawn.
    pub pool: Vec<usize>,
    /// Positions present in every base `E`.
    pub fixed: Vec<usize>,
}

impl FamilySpec {
    pub fn admissible(&self) -> bool {
        self.admissibility.iter().all(|c| c.ok)
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton::from_diagonals(self.n, &self.filled_diagonals).expect("family diagonals are in range")
    }

    /// Cyclic families are closed under swap as well as negation.
    pub fn cyclic(&self) -> bool {
        matches!(self.id, FamilyId::ThreeDiag | FamilyId::PowerTwo | FamilyId::KSeven)
    }

    /// Base `E` sets, lazily: every nonempty subset of the pool when `r` is
    /// unset, otherwise every `(r - |fixed|)`-subset joined with `fixed`.
    pub fn base_sets(&self) -> Box<dyn Iterator<Item = Vec<usize>> + Send + '_> {
        match self.r {
            None => Box::new((1..=self.pool.len()).flat_map(move |s| {
                self.pool.iter().copied().combinations(s).map(move |c| self.with_fixed(c))
            })),
            Some(r) => {
                Box::new(self.pool.iter().copied().combinations(r - self.fixed.len()).map(move |c| self.with_fixed(c)))
            }
        }
    }

    fn with_fixed(&self, mut c: Vec<usize>) -> Vec<usize> {
        c.extend(&self.fixed);
        c.sort_unstable();
        c
    }

    pub fn base_count(&self) -> u128 {
        let p = self.pool.len() as u128;
        match self.r {
            None => (1u128 << p) - 1,
            Some(r) => binom_u128(p, (r - self.fixed.len()) as u128),
        }
    }

    /// Base pairs `(1, C_E)` followed, per base, by their images under
    /// negation and (for cyclic families) swap. No pair is repeated.
    pub fn pairs(&self) -> impl Iterator<Item = OrientationPair> + '_ {
        let n = self.n;
        let cyclic = self.cyclic();
        self.base_sets().flat_map(move |e| {
            let base = OrientationPair::trivial_r(n, n, &e).expect("pool positions are in range");
            let mut out = vec![base.clone(), base.negate()];
            if cyclic {
                let sw = base.swapped();
                out.push(sw.negate());
                out.push(sw);
            }
            out.into_iter().unique()
        })
    }
}

fn binom_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn finish(mut spec: FamilySpec, force: bool) -> Result<FamilySpec> {
    if !spec.admissible() && !force {
        let failed = spec.admissibility.iter().filter(|c| !c.ok).map(|c| c.name.as_str()).join("; ");
        return Err(Error::Hypothesis(failed));
    }
    if let Some(r) = spec.r {
        if r < spec.fixed.len() || r - spec.fixed.len() > spec.pool.len() {
            return Err(Error::Hypothesis(format!("|E| = {r} cannot be drawn from {} positions", spec.pool.len())));
        }
    }
    spec.pool.retain(|p| !spec.fixed.contains(p));
    Ok(spec)
}

/// Every nonempty subset of the odd positions, on `D_1, D_2, D_3`.
pub fn gen_family_3diag(n: usize) -> Result<FamilySpec> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(Error::Hypothesis(format!("n = {n} must be odd and at least 3")));
    }
    finish(
        FamilySpec {
            id: FamilyId::ThreeDiag,
            n,
            k: 3,
            r: None,
            filled_diagonals: vec![1, 2, 3],
            admissibility: vec![check("n odd, n >= 3", true)],
            pool: (1..=n).step_by(2).collect(),
            fixed: vec![],
        },
        false,
    )
}

/// `r`-subsets of the positions `≡ 1 (mod k-1)`, `r` coprime with `k-2`, on
/// the cyclically k-diagonal skeleton `D_1..D_k`.
pub fn gen_family_power2(n: usize, k: usize, opts: &FamilyOptions) -> Result<FamilySpec> {
    if k < 3 {
        return Err(Error::Hypothesis("k must be at least 3".into()));
    }
    let admissibility = vec![
        check("k odd", k % 2 == 1),
        check("n odd", n % 2 == 1),
        check("n >= 4k - 3", n + 3 >= 4 * k),
        check("gcd(n, k-1) = 1", n.gcd(&(k - 1)) == 1),
    ];
    let coprime = |r: usize| r.gcd(&(k - 2)) == 1;
    let r = match opts.r {
        Some(r) if !coprime(r) => return Err(Error::Hypothesis(format!("r = {r} is not coprime with k-2 = {}", k - 2))),
        Some(r) => r,
        None => pick_r_range(n, 4 * (k - 1), 2 * (k - 1), |r| is_prime(r) && coprime(r))
            .ok_or_else(|| Error::Hypothesis(format!("no prime r coprime with {} in [n/(4(k-1)), n/(2(k-1))]", k - 2)))?,
    };
    finish(
        FamilySpec {
            id: FamilyId::PowerTwo,
            n,
            k,
            r: Some(r),
            filled_diagonals: (1..=k).collect(),
            admissibility,
            pool: (1..=n).step_by(k - 1).collect(),
            fixed: vec![],
        },
        opts.force,
    )
}

/// Smallest `r` with `n / lo_den <= r <= n / hi_den` satisfying `pred`.
fn pick_r_range(n: usize, lo_den: usize, hi_den: usize, pred: impl Fn(usize) -> bool) -> Option<usize> {
    let lo = n.div_ceil(lo_den).max(1);
    let hi = n / hi_den;
    (lo..=hi).find(|&r| pred(r))
}

/// Cyclically 7-diagonal family. Delegates to [`gen_family_power2`] when
/// `gcd(n, 6) = 1`; when `gcd(n, 6) = 3` uses `E = {1, 2} ∪ S` with `S`
/// drawn from the positions `≡ 3 (mod 6)` and `|E| ≡ 4 (mod 5)`.
pub fn gen_family_k7(n: usize, opts: &FamilyOptions) -> Result<FamilySpec> {
    if n.is_multiple_of(2) {
        return Err(Error::Hypothesis(format!("n = {n} must be odd")));
    }
    if n.gcd(&6) == 1 {
        let mut spec = gen_family_power2(n, 7, opts)?;
        spec.id = FamilyId::KSeven;
        spec.admissibility.push(check("n > 120", n > 120));
        return finish(spec, opts.force);
    }
    let admissibility = vec![check("n odd", true), check("n > 120", n > 120), check("gcd(n, 6) = 3", true)];
    let r = match opts.r {
        Some(r) if r % 5 != 4 => return Err(Error::Hypothesis(format!("r = {r} is not 4 mod 5"))),
        Some(r) => r,
        None => pick_r_range(n, 24, 12, |r| r % 5 == 4)
            .ok_or_else(|| Error::Hypothesis("no r = 4 (mod 5) in [n/24, n/12]".into()))?,
    };
    finish(
        FamilySpec {
            id: FamilyId::KSeven,
            n,
            k: 7,
            r: Some(r),
            filled_diagonals: (1..=7).collect(),
            admissibility,
            pool: (3..=n).step_by(6).collect(),
            fixed: vec![1, 2],
        },
        opts.force,
    )
}

/// Skeleton `D_1..D_{k-3}, D_{k-1}, D_k, D_{k+1}` with `n` prime; `E` drawn
/// from the positions `≡ 1 (mod 2k)`, `|E|` coprime with `k-2`.
pub fn gen_family_prime(n: usize, k: usize, opts: &FamilyOptions) -> Result<FamilySpec> {
    if k < 5 || k.is_multiple_of(2) {
        return Err(Error::Hypothesis(format!("k = {k} must be odd and at least 5")));
    }
    if n <= k + 1 {
        return Err(Error::Hypothesis(format!("n = {n} too small for the diagonal pattern")));
    }
    let admissibility = vec![check("n prime", is_prime(n)), check("n > 8k", n > 8 * k)];
    let coprime = |r: usize| r.gcd(&(k - 2)) == 1;
    let r = match opts.r {
        Some(r) if !coprime(r) => return Err(Error::Hypothesis(format!("r = {r} is not coprime with k-2 = {}", k - 2))),
        Some(r) => r,
        None => pick_r_range(n, 8 * k, 4 * k, |r| is_prime(r) && coprime(r))
            .ok_or_else(|| Error::Hypothesis(format!("no prime r coprime with {} in [n/(8k), n/(4k)]", k - 2)))?,
    };
    let mut diags: Vec<usize> = (1..=k - 3).collect();
    diags.extend([k - 1, k, k + 1]);
    finish(
        FamilySpec {
            id: FamilyId::PrimeN,
            n,
            k,
            r: Some(r),
            filled_diagonals: diags,
            admissibility,
            pool: (1..=n).step_by(2 * k).collect(),
            fixed: vec![],
        },
        opts.force,
    )
}

/// Skeleton `D_1..D_i, D_{i+s1}, D_{i+s1+2}, ..., D_{k+s1}`; every 2-subset of
/// `[1, n]`.
pub fn gen_family_pairs(n: usize, k: usize, i: usize, s1: usize, opts: &FamilyOptions) -> Result<FamilySpec> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::Hypothesis(format!("k = {k} must be odd and at least 3")));
    }
    if i == 0 || i > k - 2 || s1 < 2 || k + s1 > n {
        return Err(Error::Hypothesis(format!("diagonal pattern i = {i}, s1 = {s1} does not fit n = {n}, k = {k}")));
    }
    let admissibility = vec![
        check("gcd(n, 2) = 1", n.gcd(&2) == 1),
        check("gcd(n, s1) = 1", n.gcd(&s1) == 1),
        check("gcd(n, k+s1-1) = 1", n.gcd(&(k + s1 - 1)) == 1),
    ];
    let mut diags: Vec<usize> = (1..=i).collect();
    diags.push(i + s1);
    diags.extend(i + s1 + 2..=k + s1);
    if let Some(r) = opts.r.filter(|&r| r != 2) {
        return Err(Error::Hypothesis(format!("this family uses |E| = 2, not {r}")));
    }
    finish(
        FamilySpec {
            id: FamilyId::PairsGeneral,
            n,
            k,
            r: Some(2),
            filled_diagonals: diags,
            admissibility,
            pool: (1..=n).collect(),
            fixed: vec![],
        },
        opts.force,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn example() -> (Skeleton, OrientationPair) {
        let (r, c) = fixtures::example_orientation();
        (fixtures::example_h9_11_9().skeleton(), OrientationPair::new(r, c).unwrap())
    }

    #[test]
    fn first_successor_of_example() {
        let (s, p) = example();
        assert_eq!(successor(&s, &p, (1, 1)).unwrap(), (2, 2));
        let t = tour(&s, &p, (1, 1)).unwrap();
        assert_eq!(t.visited[13], (1, 3));
        assert!(t.covers_all);
        assert_eq!(t.period, 99);
    }

    #[test]
    fn single_cell_is_a_fixed_point() {
        let s = Skeleton::full(1, 1);
        let p = OrientationPair::new(vec![1], vec![-1]).unwrap();
        assert_eq!(successor(&s, &p, (1, 1)).unwrap(), (1, 1));
        assert!(is_solution(&s, &p).unwrap());
    }

    #[test]
    fn two_by_two_trace() {
        // (1,1) -> row right -> col 2 -> down -> (2,2) -> col 1 -> (1,1): period 2.
        let s = Skeleton::full(2, 2);
        let p = OrientationPair::new(vec![1, 1], vec![1, 1]).unwrap();
        let t = tour(&s, &p, (1, 1)).unwrap();
        assert_eq!(t.visited, vec![(1, 1), (2, 2)]);
        assert!(!t.covers_all);
    }

    #[test]
    fn errors() {
        let s = Skeleton::new(2, 2, [(1, 1)]).unwrap();
        let p = OrientationPair::new(vec![1, 1], vec![1, 1]).unwrap();
        assert!(matches!(successor(&s, &p, (2, 2)), Err(Error::EmptyCell(2, 2))));
        assert!(matches!(is_solution(&Skeleton::new(2, 2, []).unwrap(), &p), Err(Error::EmptySkeleton)));
        let short = OrientationPair::new(vec![1], vec![1, 1]).unwrap();
        assert!(matches!(is_solution(&s, &short), Err(Error::OrientationLength { .. })));
        assert!(OrientationPair::new(vec![0], vec![1]).is_err());
    }

    #[test]
    fn negate_and_swap() {
        let p = OrientationPair::trivial_r(5, 5, &[1, 3]).unwrap();
        assert_eq!(p.negate().negate(), p);
        let cyc = Skeleton::cyclic_diagonals(5, 1, 3).unwrap();
        let sw = p.swap(&cyc).unwrap();
        assert_eq!((sw.r.clone(), sw.c.clone()), (p.c.clone(), p.r.clone()));
        let (s, ex) = example();
        assert!(matches!(ex.swap(&s), Err(Error::Hypothesis(_))));
        assert!(matches!(p.negate().swap(&cyc), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn pair_json_shape() {
        let p = OrientationPair::trivial_r(2, 3, &[2]).unwrap();
        let j = serde_json::to_string(&p).unwrap();
        assert_eq!(j, r#"{"R":[1,1],"C":[1,-1,1],"E":[2]}"#);
        assert_eq!(serde_json::from_str::<OrientationPair>(&j).unwrap(), p);
        assert!(serde_json::from_str::<OrientationPair>(r#"{"R":[1],"C":[1,-1],"E":[1]}"#).is_err());
    }

    #[test]
    fn omega_pair_small_case() {
        let (w1, w2) = omega_pair_cyclic(5, 3, &[1, 3]).unwrap();
        assert_eq!(w1, Permutation::from_cycles(&[vec![1, 3]]).unwrap());
        assert!(w2.is_identity());
        assert!(check_char_cyclic(5, 3, &[1, 3]).unwrap());
        assert!(check_char_cyclic(5, 3, &[4]).unwrap());
        assert!(!check_char_cyclic(5, 3, &[]).unwrap());
        assert!(matches!(check_char_cyclic(5, 4, &[1]), Err(Error::Hypothesis(_))));
        assert!(matches!(check_char_cyclic(3, 3, &[1]), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn width_characterization_on_example() {
        let (s, _) = example();
        let v = check_char_width(&s, &[1]).unwrap();
        assert!(v.holds());
        assert!(!check_char_width(&s, &[]).unwrap().holds());
        let even = Skeleton::cyclic_diagonals(6, 1, 4).unwrap();
        assert!(matches!(check_char_width(&even, &[1]), Err(Error::Hypothesis(_))));
        let no_d1 = Skeleton::from_diagonals(7, &[2, 3, 4]).unwrap();
        assert!(matches!(check_char_width(&no_d1, &[1]), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn empty_e_fails_class_cover_when_some_gcd_exceeds_one() {
        // n = 9, diagonals D_1, D_2, D_3 leave one strip of width 6: gcd 3.
        let s = Skeleton::cyclic_diagonals(9, 1, 3).unwrap();
        assert!(!check_char_width(&s, &[]).unwrap().classes_covered);
        assert!(!check_char_width(&s, &[1, 4]).unwrap().classes_covered);
    }

    #[test]
    fn enumeration_budget_and_order() {
        let s = Skeleton::cyclic_diagonals(5, 1, 3).unwrap();
        assert!(matches!(enumerate_solutions(&s, false, 100), Err(Error::Budget { .. })));
        let sols = enumerate_solutions(&s, true, 1 << 10).unwrap();
        assert!(sols.windows(2).all(|w| {
            let key = |p: &OrientationPair| p.c.iter().map(|&x| (x < 0) as u8).collect_vec();
            key(&w[0]) < key(&w[1])
        }));
    }

    #[test]
    fn degenerate_one_by_one_everything_solves() {
        let s = Skeleton::full(1, 1);
        assert_eq!(enumerate_solutions(&s, false, 16).unwrap().len(), 4);
    }

    #[test]
    fn three_diag_family_n5() {
        let f = gen_family_3diag(5).unwrap();
        let bases: Vec<_> = f.base_sets().collect();
        assert_eq!(bases.len(), 7);
        assert!(bases.iter().all(|e| check_char_cyclic(5, 3, e).unwrap()));
        assert!(matches!(gen_family_3diag(6), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn power2_parameters() {
        let f = gen_family_power2(21, 5, &FamilyOptions::default()).unwrap();
        assert_eq!(f.r, Some(2));
        assert_eq!(f.pool, vec![1, 5, 9, 13, 17, 21]);
        assert_eq!(f.base_count(), 15);
        assert!(matches!(gen_family_power2(20, 5, &FamilyOptions::default()), Err(Error::Hypothesis(_))));
        let r3 = FamilyOptions { r: Some(3), force: true };
        assert!(matches!(gen_family_power2(13, 5, &r3), Err(Error::Hypothesis(_))));
        // n = 13 < 4k - 3 and the default range holds no prime: both need the override.
        assert!(gen_family_power2(13, 5, &FamilyOptions::default()).is_err());
        let forced = gen_family_power2(13, 5, &FamilyOptions { r: Some(2), force: true }).unwrap();
        assert!(!forced.admissible());
        assert_eq!(forced.pool, vec![1, 5, 9, 13]);
    }

    #[test]
    fn k7_dispatch_and_r_choice() {
        let f = gen_family_k7(123, &FamilyOptions::default()).unwrap();
        assert_eq!(f.r, Some(9));
        assert_eq!(f.fixed, vec![1, 2]);
        assert_eq!(f.pool.len(), 21);
        let g = gen_family_k7(125, &FamilyOptions::default()).unwrap();
        assert_eq!((g.id, g.k), (FamilyId::KSeven, 7));
        assert_eq!(g.pool, (1..=125).step_by(6).collect_vec());
        assert!(matches!(gen_family_k7(124, &FamilyOptions::default()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn k7_composite_cycle_images() {
        let f = gen_family_k7(123, &FamilyOptions::default()).unwrap();
        let e = f.base_sets().next().unwrap();
        let (w1, w2) = omega_pair_cyclic(123, 7, &e).unwrap();
        let img = |x: usize| w2.compose(&w1).unwrap().apply(x as u32).unwrap() as usize;
        assert_eq!(img(e[0]), e[6]);
        assert_eq!(img(e[1]), e[7]);
        assert_eq!(img(e[2]), e[5]);
        assert_eq!(w1.apply(e[2] as u32), Some(*e.last().unwrap() as u32));
    }

    #[test]
    fn prime_family_parameters() {
        let f = gen_family_prime(41, 5, &FamilyOptions::default()).unwrap();
        assert_eq!(f.r, Some(2));
        assert_eq!(f.pool, vec![1, 11, 21, 31, 41]);
        assert_eq!(f.filled_diagonals, vec![1, 2, 4, 5, 6]);
        assert!(matches!(gen_family_prime(45, 5, &FamilyOptions::default()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn pairs_family_parameters() {
        let f = gen_family_pairs(11, 5, 3, 2, &FamilyOptions::default()).unwrap();
        assert_eq!(f.filled_diagonals, vec![1, 2, 3, 5, 7]);
        assert_eq!(f.base_count(), 55);
        assert!(matches!(gen_family_pairs(12, 5, 3, 2, &FamilyOptions::default()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn generators_never_repeat() {
        let f = gen_family_3diag(7).unwrap();
        let all: Vec<_> = f.pairs().collect();
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        assert_eq!(all.len(), distinct.len());
        assert_eq!(all.len(), 60);
    }
}
