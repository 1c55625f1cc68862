//! Relative (and λ-fold) Heffter arrays: validation, simple and compatible
//! orderings, and a small exhaustive search used to produce test fixtures.

use itertools::Itertools;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pfarray::{neg, PartiallyFilledArray, Skeleton};
use crate::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// Uniform row weight h and column weight k.
    Weights,
    /// One of ±x per class outside J (λ = 1), or λ-fold cover of `Z_v \ J`.
    Support,
    RowSums,
    ColumnSums,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub id: ConditionId,
    pub pass: bool,
    /// Offending lines or values, human readable.
    pub offenders: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub h: Option<usize>,
    pub k: Option<usize>,
    pub v: u32,
    pub t: u32,
    pub lambda: u32,
    /// Conditions in evaluation order; evaluation stops after a weight failure.
    pub conditions: Vec<Condition>,
}

impl ValidationReport {
    pub fn condition(&self, id: ConditionId) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn bad_rows(&self) -> Vec<usize> {
        self.offending_lines(ConditionId::RowSums)
    }

    pub fn bad_cols(&self) -> Vec<usize> {
        self.offending_lines(ConditionId::ColumnSums)
    }

    fn offending_lines(&self, id: ConditionId) -> Vec<usize> {
        self.condition(id)
            .map(|c| c.offenders.iter().filter_map(|s| s.split_whitespace().nth(1)?.parse().ok()).collect())
            .unwrap_or_default()
    }
}

pub fn validate_heffter(a: &PartiallyFilledArray) -> Result<ValidationReport> {
    let (m, n, v, t, lambda) = (a.rows(), a.cols(), a.modulus(), a.subgroup_order(), a.lambda());
    if v % t != 0 {
        return Err(Error::SubgroupOrder { v: v as u64, t: t as u64 });
    }
    let skel = a.skeleton();
    let row_w: Vec<usize> = (1..=m).map(|i| skel.row_weight(i)).collect();
    let col_w: Vec<usize> = (1..=n).map(|j| skel.col_weight(j)).collect();
    let h = row_w.iter().all_equal_value().ok().copied();
    let k = col_w.iter().all_equal_value().ok().copied();
    let mut report = ValidationReport { pass: false, h, k, v, t, lambda, conditions: Vec::new() };

    let mut weight_off = Vec::new();
    if h.is_none() {
        weight_off.extend(row_w.iter().enumerate().map(|(i, w)| format!("row {} weight {w}", i + 1)));
    }
    if k.is_none() {
        weight_off.extend(col_w.iter().enumerate().map(|(j, w)| format!("column {} weight {w}", j + 1)));
    }
    report.conditions.push(Condition { id: ConditionId::Weights, pass: weight_off.is_empty(), offenders: weight_off });
    let Some(k) = k else { return Ok(report) };
    if h.is_none() {
        return Ok(report);
    }

    let two_nk = 2 * (n as u64) * (k as u64);
    if !two_nk.is_multiple_of(lambda as u64) || two_nk / lambda as u64 + t as u64 != v as u64 {
        return Err(Error::ModulusMismatch { v: v as u64, expected: two_nk / lambda as u64 + t as u64 });
    }

    let mut count = vec![0u32; v as usize];
    for (_, _, x) in a.entries() {
        count[x as usize] += 1;
        count[neg(x, v) as usize] += 1;
    }
    let support_off: Vec<String> = (0..v)
        .filter_map(|x| {
            let c = count[x as usize];
            let want = if a.in_subgroup(x) { 0 } else { lambda };
            (c != want).then(|| format!("{} covered {c} times, expected {want}", a.signed(x)))
        })
        .collect();
    report.conditions.push(Condition { id: ConditionId::Support, pass: support_off.is_empty(), offenders: support_off });

    let line_sum = |vals: Vec<u32>| vals.iter().fold(0u64, |s, &x| (s + x as u64) % v as u64);
    let row_off: Vec<String> = (1..=m)
        .filter_map(|i| {
            let s = line_sum(a.row_values(i));
            (s != 0).then(|| format!("row {i} sums to {}", a.signed(s as u32)))
        })
        .collect();
    let col_off: Vec<String> = (1..=n)
        .filter_map(|j| {
            let s = line_sum(a.col_values(j));
            (s != 0).then(|| format!("column {j} sums to {}", a.signed(s as u32)))
        })
        .collect();
    report.conditions.push(Condition { id: ConditionId::RowSums, pass: row_off.is_empty(), offenders: row_off });
    report.conditions.push(Condition { id: ConditionId::ColumnSums, pass: col_off.is_empty(), offenders: col_off });
    report.pass = report.conditions.iter().all(|c| c.pass);
    Ok(report)
}

/// Partial sums `s_1, ..., s_k` of an ordering are pairwise distinct mod `v`.
pub fn is_simple_ordering(values: &[u32], v: u32) -> bool {
    let mut seen = std::collections::HashSet::with_capacity(values.len());
    let mut s = 0u64;
    values.iter().all(|&x| {
        s = (s + x as u64) % v as u64;
        seen.insert(s)
    })
}

/// Natural orderings of every row and column are simple.
pub fn is_globally_simple(a: &PartiallyFilledArray) -> bool {
    let v = a.modulus();
    (1..=a.rows()).all(|i| is_simple_ordering(&a.row_values(i), v))
        && (1..=a.cols()).all(|j| is_simple_ordering(&a.col_values(j), v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub value: u32,
}

/// One ordering per row and per column, as sequences of filled cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineOrderingSet {
    pub modulus: u32,
    pub cols: usize,
    pub rows_order: Vec<Vec<Cell>>,
    pub cols_order: Vec<Vec<Cell>>,
}

impl LineOrderingSet {
    fn perm_by_value(lines: &[Vec<Cell>]) -> Result<Permutation> {
        Permutation::from_cycles(&lines.iter().map(|l| l.iter().map(|c| c.value).collect_vec()).collect_vec())
            .map_err(|_| Error::RepeatedValues)
    }

    fn perm_by_cell(&self, lines: &[Vec<Cell>]) -> Permutation {
        let idx = |c: &Cell| ((c.row - 1) * self.cols + c.col - 1) as u32;
        Permutation::from_cycles(&lines.iter().map(|l| l.iter().map(idx).collect_vec()).collect_vec())
            .expect("cells are distinct")
    }

    /// `ω_r` on the entries of the array. Fails when entries repeat.
    pub fn omega_r(&self) -> Result<Permutation> {
        Self::perm_by_value(&self.rows_order)
    }

    pub fn omega_c(&self) -> Result<Permutation> {
        Self::perm_by_value(&self.cols_order)
    }

    /// `ω_r` acting on row-major cell indices; defined for repeated entries too.
    pub fn omega_r_cells(&self) -> Permutation {
        self.perm_by_cell(&self.rows_order)
    }

    pub fn omega_c_cells(&self) -> Permutation {
        self.perm_by_cell(&self.cols_order)
    }

    pub fn all_simple(&self) -> bool {
        self.rows_order
            .iter()
            .chain(&self.cols_order)
            .all(|l| is_simple_ordering(&l.iter().map(|c| c.value).collect_vec(), self.modulus))
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::OrientationLength { expected, got });
    }
    Ok(())
}

/// Row `i` read left to right when `r[i] = 1`, right to left when `-1`;
/// column `j` top to bottom when `c[j] = 1`, bottom to top when `-1`.
pub fn orderings_from_orientations(a: &PartiallyFilledArray, r: &[i8], c: &[i8]) -> Result<LineOrderingSet> {
    check_len(a.rows(), r.len())?;
    check_len(a.cols(), c.len())?;
    let rows_order = (1..=a.rows())
        .map(|i| {
            let mut cells: Vec<Cell> =
                (1..=a.cols()).filter_map(|j| a.get(i, j).map(|value| Cell { row: i, col: j, value })).collect();
            if r[i - 1] < 0 {
                cells.reverse();
            }
            cells
        })
        .collect();
    let cols_order = (1..=a.cols())
        .map(|j| {
            let mut cells: Vec<Cell> =
                (1..=a.rows()).filter_map(|i| a.get(i, j).map(|value| Cell { row: i, col: j, value })).collect();
            if c[j - 1] < 0 {
                cells.reverse();
            }
            cells
        })
        .collect();
    Ok(LineOrderingSet { modulus: a.modulus(), cols: a.cols(), rows_order, cols_order })
}

pub fn natural_orderings(a: &PartiallyFilledArray) -> LineOrderingSet {
    orderings_from_orientations(a, &vec![1; a.rows()], &vec![1; a.cols()]).expect("lengths match")
}

/// `ω_c ∘ ω_r` is a single cycle through the whole ground set.
pub fn are_compatible(omega_r: &Permutation, omega_c: &Permutation) -> Result<bool> {
    Ok(omega_c.compose(omega_r)?.is_full_cycle())
}

fn first_simple_arrangement(line: &[Cell], v: u32) -> Option<Vec<Cell>> {
    // itertools yields index permutations in lexicographic order, identity first.
    (0..line.len()).permutations(line.len()).map(|p| p.iter().map(|&i| line[i]).collect_vec()).find(|cand| {
        is_simple_ordering(&cand.iter().map(|c| c.value).collect_vec(), v)
    })
}

/// A simple ordering for every row and column, the lexicographically first
/// per line; `None` when some line admits no simple ordering.
pub fn find_simple_line_orderings(a: &PartiallyFilledArray) -> Option<LineOrderingSet> {
    let natural = natural_orderings(a);
    let v = a.modulus();
    let rows_order = natural.rows_order.iter().map(|l| first_simple_arrangement(l, v)).collect::<Option<Vec<_>>>()?;
    let cols_order = natural.cols_order.iter().map(|l| first_simple_arrangement(l, v)).collect::<Option<Vec<_>>>()?;
    Some(LineOrderingSet { rows_order, cols_order, ..natural })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SkeletonConstraint {
    /// Fully filled when `h = n` and `k = m`, otherwise cyclically k-diagonal
    /// on `D_1..D_k` for square arrays.
    Auto,
    Full,
    /// Square arrays only: `D_1, ..., D_k`.
    CyclicDiagonal,
    Given(Skeleton),
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub m: usize,
    pub n: usize,
    pub h: usize,
    pub k: usize,
    pub t: u32,
    pub limit: usize,
    pub skeleton: SkeletonConstraint,
}

impl SearchParams {
    pub fn new(m: usize, n: usize, h: usize, k: usize, t: u32) -> Self {
        SearchParams { m, n, h, k, t, limit: 1, skeleton: SkeletonConstraint::Auto }
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn skeleton(mut self, s: SkeletonConstraint) -> Self {
        self.skeleton = s;
        self
    }

    fn resolve_skeleton(&self) -> Result<Skeleton> {
        let s = match &self.skeleton {
            SkeletonConstraint::Auto if self.h == self.n && self.k == self.m => Skeleton::full(self.m, self.n),
            SkeletonConstraint::Auto | SkeletonConstraint::CyclicDiagonal => {
                if self.m != self.n || self.h != self.k {
                    return Err(Error::Parameters("diagonal skeletons need m = n and h = k".into()));
                }
                Skeleton::cyclic_diagonals(self.n, 1, self.k)?
            }
            SkeletonConstraint::Full => Skeleton::full(self.m, self.n),
            SkeletonConstraint::Given(s) => s.clone(),
        };
        let ok = s.rows() == self.m
            && s.cols() == self.n
            && (1..=self.m).all(|i| s.row_weight(i) == self.h)
            && (1..=self.n).all(|j| s.col_weight(j) == self.k);
        if !ok {
            return Err(Error::Parameters(format!(
                "skeleton does not have row weight {} and column weight {}",
                self.h, self.k
            )));
        }
        Ok(s)
    }
}

/// Exhaustive backtracking search for `H_t(m,n;h,k)` on a fixed skeleton.
///
/// Cells are filled in row-major order; the last cell of each line is forced
/// by the zero-sum condition. Global negation is factored out by requiring
/// the first filled cell to hold a value in `[1, v/2]`. Results come out in
/// a fixed order and each one is re-validated.
pub fn search_heffter(params: &SearchParams) -> Result<Vec<PartiallyFilledArray>> {
    let SearchParams { m, n, h, k, t, limit, .. } = *params;
    if m * h != n * k {
        return Err(Error::Parameters(format!("mh = {} differs from nk = {}", m * h, n * k)));
    }
    if !(3..=n).contains(&h) || !(3..=m).contains(&k) {
        return Err(Error::Parameters("need 3 <= h <= n and 3 <= k <= m".into()));
    }
    let two_nk = (2 * n * k) as u32;
    if t == 0 || !two_nk.is_multiple_of(t) {
        return Err(Error::Parameters(format!("t = {t} must divide 2nk = {two_nk}")));
    }
    let skel = params.resolve_skeleton()?;
    let v = two_nk + t;
    let step = v / t;
    let cells: Vec<(usize, usize)> = skel.positions().collect();
    let mut row_left: Vec<usize> = (0..=m).map(|i| if i == 0 { 0 } else { skel.row_weight(i) }).collect();
    let mut col_left: Vec<usize> = (0..=n).map(|j| if j == 0 { 0 } else { skel.col_weight(j) }).collect();

    struct State {
        v: u32,
        step: u32,
        used: Vec<bool>,
        row_sum: Vec<u32>,
        col_sum: Vec<u32>,
        values: Vec<u32>,
        found: Vec<Vec<u32>>,
        limit: usize,
    }

    fn class(x: u32, v: u32) -> usize {
        x.min(v - x) as usize
    }

    fn recurse(
        st: &mut State,
        cells: &[(usize, usize)],
        idx: usize,
        row_left: &mut [usize],
        col_left: &mut [usize],
    ) {
        if st.found.len() >= st.limit {
            return;
        }
        if idx == cells.len() {
            st.found.push(st.values.clone());
            return;
        }
        let (i, j) = cells[idx];
        let v = st.v;
        let forced_row = (row_left[i] == 1).then(|| neg(st.row_sum[i], v));
        let forced_col = (col_left[j] == 1).then(|| neg(st.col_sum[j], v));
        let candidates: Vec<u32> = match (forced_row, forced_col) {
            (Some(a), Some(b)) if a != b => return,
            (Some(a), _) | (None, Some(a)) => vec![a],
            (None, None) => (1..=v / 2).flat_map(|x| [x, v - x]).dedup().collect(),
        };
        for x in candidates {
            if x % st.step == 0 || st.used[class(x, v)] {
                continue;
            }
            if idx == 0 && x > v / 2 {
                continue;
            }
            st.used[class(x, v)] = true;
            st.row_sum[i] = (st.row_sum[i] + x) % v;
            st.col_sum[j] = (st.col_sum[j] + x) % v;
            row_left[i] -= 1;
            col_left[j] -= 1;
            st.values.push(x);
            recurse(st, cells, idx + 1, row_left, col_left);
            st.values.pop();
            row_left[i] += 1;
            col_left[j] += 1;
            st.row_sum[i] = (st.row_sum[i] + v - x) % v;
            st.col_sum[j] = (st.col_sum[j] + v - x) % v;
            st.used[class(x, v)] = false;
            if st.found.len() >= st.limit {
                return;
            }
        }
    }

    let mut st = State {
        v,
        step,
        used: vec![false; v as usize / 2 + 1],
        row_sum: vec![0; m + 1],
        col_sum: vec![0; n + 1],
        values: Vec::with_capacity(cells.len()),
        found: Vec::new(),
        limit,
    };
    recurse(&mut st, &cells, 0, &mut row_left, &mut col_left);

    st.found
        .into_iter()
        .map(|vals| {
            let mut grid = vec![vec![None; n]; m];
            for (&(i, j), &x) in cells.iter().zip(&vals) {
                grid[i - 1][j - 1] = Some(x as i64);
            }
            let a = PartiallyFilledArray::new(v, t, 1, grid)?;
            if !validate_heffter(&a)?.pass {
                return Err(Error::Internal("search produced an invalid array".into()));
            }
            Ok(a)
        })
        .collect()
}

/// `v = 2nk + t` and the size of the subgroup step `v / t`.
pub fn heffter_modulus(n: usize, k: usize, t: u32) -> u32 {
    (2 * n * k) as u32 + t
}

/// `gcd` helper shared by the hypothesis checkers.
pub fn gcd(a: usize, b: usize) -> usize {
    a.gcd(&b)
}
