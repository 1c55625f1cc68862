//! Partially filled arrays over `Z_v`, their skeletons and diagonal structure.
//!
//! Every public position is 1-based: row `i` is in `1..=m`, column `j` in
//! `1..=n`. Diagonal `D_i` of an `n x n` array is the set
//! `{(i,1), (i+1,2), ..., (i-1,n)}` with indices reduced into `1..=n`, so
//! the cell `(r, c)` lies on `D_{((r - c) mod n) + 1}`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce a signed integer into `[0, v)`.
pub fn reduce(x: i64, v: u32) -> u32 {
    x.rem_euclid(v as i64) as u32
}

/// Symmetric representative in `[-floor(v/2), floor(v/2)]`.
pub fn signed(x: u32, v: u32) -> i64 {
    if x as u64 * 2 > v as u64 {
        x as i64 - v as i64
    } else {
        x as i64
    }
}

pub fn neg(x: u32, v: u32) -> u32 {
    if x == 0 {
        0
    } else {
        v - x
    }
}

/// 1-based index of the diagonal through `(row, col)` in an `n x n` grid.
pub fn diagonal_of(row: usize, col: usize, n: usize) -> usize {
    (row as i64 - col as i64).rem_euclid(n as i64) as usize + 1
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartiallyFilledArray {
    rows: usize,
    cols: usize,
    modulus: u32,
    subgroup_order: u32,
    lambda: u32,
    cells: Vec<Option<u32>>,
}

impl PartiallyFilledArray {
    /// Build from signed entries in row-major order (`None` = empty cell).
    /// Entries are reduced modulo `v`.
    pub fn new(modulus: u32, subgroup_order: u32, lambda: u32, grid: Vec<Vec<Option<i64>>>) -> Result<Self> {
        if modulus == 0 || subgroup_order == 0 || lambda == 0 {
            return Err(Error::Parameters("v, t and lambda must be positive".into()));
        }
        if !modulus.is_multiple_of(subgroup_order) {
            return Err(Error::SubgroupOrder { v: modulus as u64, t: subgroup_order as u64 });
        }
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Parameters("array needs at least one row and one column".into()));
        }
        let mut cells = Vec::with_capacity(rows * cols);
        for (i, row) in grid.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("row {} has {} fields, expected {cols}", i + 1, row.len()),
                });
            }
            cells.extend(row.into_iter().map(|c| c.map(|x| reduce(x, modulus))));
        }
        Ok(PartiallyFilledArray { rows, cols, modulus, subgroup_order, lambda, cells })
    }

    /// An array with every cell of `skel` filled with `fill`.
    pub fn from_skeleton(skel: &Skeleton, modulus: u32, fill: u32) -> Result<Self> {
        let grid = (1..=skel.rows)
            .map(|i| {
                (1..=skel.cols).map(|j| skel.contains(i, j).then_some(fill as i64)).collect()
            })
            .collect();
        Self::new(modulus, 1, 1, grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn modulus(&self) -> u32 {
        self.modulus
    }
    pub fn subgroup_order(&self) -> u32 {
        self.subgroup_order
    }
    pub fn lambda(&self) -> u32 {
        self.lambda
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Option<u32> {
        assert!((1..=self.rows).contains(&row) && (1..=self.cols).contains(&col), "cell out of range");
        self.cells[(row - 1) * self.cols + col - 1]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Option<i64>) {
        assert!((1..=self.rows).contains(&row) && (1..=self.cols).contains(&col), "cell out of range");
        self.cells[(row - 1) * self.cols + col - 1] = value.map(|x| reduce(x, self.modulus));
    }

    /// Filled cells `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.cells.iter().enumerate().filter_map(move |(idx, c)| {
            c.map(|x| (idx / self.cols + 1, idx % self.cols + 1, x))
        })
    }

    pub fn filled_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// Entries of row `i`, left to right.
    pub fn row_values(&self, i: usize) -> Vec<u32> {
        (1..=self.cols).filter_map(|j| self.get(i, j)).collect()
    }

    /// Entries of column `j`, top to bottom.
    pub fn col_values(&self, j: usize) -> Vec<u32> {
        (1..=self.rows).filter_map(|i| self.get(i, j)).collect()
    }

    pub fn signed(&self, x: u32) -> i64 {
        signed(x, self.modulus)
    }

    /// `x` belongs to the subgroup `J` of order `t`.
    pub fn in_subgroup(&self, x: u32) -> bool {
        x.is_multiple_of(self.modulus / self.subgroup_order)
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton {
            rows: self.rows,
            cols: self.cols,
            filled: self.entries().map(|(i, j, _)| (i, j)).collect(),
        }
    }

    pub fn transpose(&self) -> PartiallyFilledArray {
        let mut cells = vec![None; self.cells.len()];
        for (i, j, x) in self.entries() {
            cells[(j - 1) * self.rows + i - 1] = Some(x);
        }
        PartiallyFilledArray { rows: self.cols, cols: self.rows, cells, ..self.clone() }
    }

    /// Move row `i` to row `i + shift` (cyclically); entries travel with their row.
    pub fn row_translate(&self, shift: i64) -> PartiallyFilledArray {
        let mut cells = vec![None; self.cells.len()];
        for i in 0..self.rows {
            let dest = (i as i64 + shift).rem_euclid(self.rows as i64) as usize;
            cells[dest * self.cols..(dest + 1) * self.cols]
                .copy_from_slice(&self.cells[i * self.cols..(i + 1) * self.cols]);
        }
        PartiallyFilledArray { cells, ..self.clone() }
    }

    /// Same cells with the sign of every entry flipped.
    pub fn negated(&self) -> PartiallyFilledArray {
        let v = self.modulus;
        PartiallyFilledArray { cells: self.cells.iter().map(|c| c.map(|x| neg(x, v))).collect(), ..self.clone() }
    }

    /// Parse the text array format:
    ///
    /// ```text
    /// v=207 t=9 m=11 n=11
    /// 10,55,101,-90,,13,-22,,-78,67,-56
    /// ...
    /// ```
    ///
    /// `lambda` (or `λ`), `m` and `n` are optional in the header. Blank lines
    /// and lines starting with `#` are ignored. A JSON document (first
    /// non-blank character `{`) is accepted as well.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let file: ArrayFile = serde_json::from_str(text)
                .map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
            return file.try_into();
        }
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty input".into() })?;
        let (mut v, mut t, mut lambda, mut m, mut n) = (None, 1u32, 1u32, None, None);
        for tok in header.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line: hline,
                msg: format!("header token `{tok}` is not key=value"),
            })?;
            let num: u32 = val.parse().map_err(|_| Error::Parse {
                line: hline,
                msg: format!("header value `{val}` is not a positive integer"),
            })?;
            match key {
                "v" => v = Some(num),
                "t" => t = num,
                "lambda" | "λ" => lambda = num,
                "m" => m = Some(num as usize),
                "n" => n = Some(num as usize),
                _ => return Err(Error::Parse { line: hline, msg: format!("unknown header key `{key}`") }),
            }
        }
        let v = v.ok_or(Error::Parse { line: hline, msg: "header lacks v=".into() })?;
        if t == 0 || v % t != 0 {
            return Err(Error::SubgroupOrder { v: v as u64, t: t as u64 });
        }
        let mut grid = Vec::new();
        let mut width = None;
        for (ln, line) in lines {
            let row = line
                .split(',')
                .map(|f| {
                    let f = f.trim();
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        f.parse::<i64>().map(Some).map_err(|_| Error::Parse {
                            line: ln,
                            msg: format!("`{f}` is not an integer"),
                        })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::Parse { line: ln, msg: format!("ragged row: {} fields, expected {w}", row.len()) })
                }
                _ => {}
            }
            grid.push(row);
        }
        if grid.is_empty() {
            return Err(Error::Parse { line: hline, msg: "no rows after header".into() });
        }
        if m.is_some_and(|m| m != grid.len()) || n.is_some_and(|n| Some(n) != width) {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header dimensions disagree with body ({}x{})", grid.len(), width.unwrap_or(0)),
            });
        }
        Self::new(v, t, lambda, grid)
    }

    /// Text form with signed entries; `parse(to_text(a)) == a`.
    pub fn to_text(&self) -> String {
        let mut s = format!("v={} t={}", self.modulus, self.subgroup_order);
        if self.lambda != 1 {
            s.push_str(&format!(" lambda={}", self.lambda));
        }
        s.push_str(&format!(" m={} n={}\n", self.rows, self.cols));
        for i in 1..=self.rows {
            let row: Vec<String> = (1..=self.cols)
                .map(|j| self.get(i, j).map_or(String::new(), |x| self.signed(x).to_string()))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_file(&self) -> ArrayFile {
        ArrayFile {
            v: self.modulus,
            t: self.subgroup_order,
            lambda: self.lambda,
            m: self.rows,
            n: self.cols,
            cells: (1..=self.rows)
                .map(|i| (1..=self.cols).map(|j| self.get(i, j).map(|x| self.signed(x))).collect())
                .collect(),
        }
    }
}

impl fmt::Debug for PartiallyFilledArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// JSON mirror of the text array format.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ArrayFile {
    pub v: u32,
    #[serde(default = "one")]
    pub t: u32,
    #[serde(default = "one")]
    pub lambda: u32,
    pub m: usize,
    pub n: usize,
    pub cells: Vec<Vec<Option<i64>>>,
}

fn one() -> u32 {
    1
}

impl TryFrom<ArrayFile> for PartiallyFilledArray {
    type Error = Error;

    fn try_from(f: ArrayFile) -> Result<Self> {
        if f.cells.len() != f.m || f.cells.iter().any(|r| r.len() != f.n) {
            return Err(Error::Parse { line: 0, msg: format!("cells do not form a {}x{} grid", f.m, f.n) });
        }
        PartiallyFilledArray::new(f.v, f.t, f.lambda, f.cells)
    }
}

/// The set of filled positions of an array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Skeleton {
    rows: usize,
    cols: usize,
    filled: BTreeSet<(usize, usize)>,
}

impl Skeleton {
    pub fn new(rows: usize, cols: usize, filled: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Parameters("skeleton needs positive dimensions".into()));
        }
        let filled: BTreeSet<_> = filled.into_iter().collect();
        if let Some(&(i, j)) = filled.iter().find(|&&(i, j)| !(1..=rows).contains(&i) || !(1..=cols).contains(&j)) {
            return Err(Error::Parameters(format!("position ({i},{j}) outside {rows}x{cols}")));
        }
        Ok(Skeleton { rows, cols, filled })
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        Skeleton { rows, cols, filled: (1..=rows).flat_map(|i| (1..=cols).map(move |j| (i, j))).collect() }
    }

    /// `n x n` skeleton whose filled cells are exactly the listed diagonals.
    pub fn from_diagonals(n: usize, diagonals: &[usize]) -> Result<Self> {
        if let Some(&d) = diagonals.iter().find(|&&d| d == 0 || d > n) {
            return Err(Error::Parameters(format!("diagonal index {d} outside 1..={n}")));
        }
        let filled = diagonals.iter().flat_map(|&d| (1..=n).map(move |j| ((d - 1 + j - 1) % n + 1, j)));
        Skeleton::new(n, n, filled)
    }

    /// `k` consecutive diagonals `D_first, ..., D_{first+k-1}` (indices mod n).
    pub fn cyclic_diagonals(n: usize, first: usize, k: usize) -> Result<Self> {
        let diags: Vec<usize> = (0..k).map(|s| (first - 1 + s) % n + 1).collect();
        Self::from_diagonals(n, &diags)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn len(&self) -> usize {
        self.filled.len()
    }
    pub fn is_empty(&self) -> bool {
        self.filled.is_empty()
    }
    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.filled.contains(&(row, col))
    }
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.filled.iter().copied()
    }
    pub fn row_weight(&self, i: usize) -> usize {
        self.filled.range((i, 0)..(i + 1, 0)).count()
    }
    pub fn col_weight(&self, j: usize) -> usize {
        self.filled.iter().filter(|&&(_, c)| c == j).count()
    }

    pub fn transpose(&self) -> Skeleton {
        Skeleton { rows: self.cols, cols: self.rows, filled: self.filled.iter().map(|&(i, j)| (j, i)).collect() }
    }

    pub fn row_translate(&self, shift: i64) -> Skeleton {
        let m = self.rows as i64;
        Skeleton {
            filled: self.filled.iter().map(|&(i, j)| (((i as i64 - 1 + shift).rem_euclid(m) + 1) as usize, j)).collect(),
            ..self.clone()
        }
    }

    pub fn classify_diagonality(&self) -> Result<DiagonalProfile> {
        DiagonalProfile::of(self)
    }
}

/// A maximal run of empty diagonals `D_first, ..., D_{first+width-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Strip {
    pub first: usize,
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalProfile {
    pub n: usize,
    /// Filled diagonal indices, ascending.
    pub filled: Vec<usize>,
    pub k: usize,
    /// Empty strips ordered by their first diagonal.
    pub strips: Vec<Strip>,
    pub cyclic: bool,
    /// `gcd(n, width)` per strip, aligned with `strips`.
    pub strip_gcds: Vec<usize>,
}

impl DiagonalProfile {
    pub fn of(skel: &Skeleton) -> Result<Self> {
        if skel.rows != skel.cols {
            return Err(Error::NotSquare { rows: skel.rows, cols: skel.cols });
        }
        let n = skel.rows;
        let mut count = vec![0usize; n + 1];
        for (i, j) in skel.positions() {
            count[diagonal_of(i, j, n)] += 1;
        }
        if let Some(d) = (1..=n).find(|&d| count[d] != 0 && count[d] != n) {
            return Err(Error::NotDiagonal(d));
        }
        let filled: Vec<usize> = (1..=n).filter(|&d| count[d] == n).collect();
        if filled.is_empty() {
            return Err(Error::EmptySkeleton);
        }
        let is_filled = |d: usize| count[(d - 1) % n + 1] == n;
        // Every strip starts right after a filled diagonal.
        let mut strips = Vec::new();
        for &d in &filled {
            let start = d % n + 1;
            if is_filled(start) {
                continue;
            }
            let mut width = 0;
            while !is_filled(start + width) {
                width += 1;
            }
            strips.push(Strip { first: start, width });
        }
        strips.sort_by_key(|s| s.first);
        let strip_gcds = strips.iter().map(|s| n.gcd(&s.width)).collect();
        Ok(DiagonalProfile { n, k: filled.len(), cyclic: strips.len() <= 1, filled, strips, strip_gcds })
    }

    pub fn strip_widths(&self) -> Vec<usize> {
        self.strips.iter().map(|s| s.width).collect()
    }

    /// First diagonal of the consecutive block, for cyclic profiles.
    pub fn cyclic_start(&self) -> Option<usize> {
        if !self.cyclic {
            return None;
        }
        Some(match self.strips.first() {
            Some(s) => (s.first - 1 + s.width) % self.n + 1,
            None => 1,
        })
    }
}
