//! Sparse integer matrices and their Smith invariants.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Column-major sparse integer matrix. Each column holds `(row, value)`
/// pairs sorted by row, without zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZSparse {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<Vec<(usize, i64)>>,
}

impl ZSparse {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ZSparse { rows, cols, columns: vec![Vec::new(); cols] }
    }

    /// Builds a column from unsorted entries, summing duplicates.
    pub fn push_column<I: IntoIterator<Item = (usize, i64)>>(&mut self, entries: I) {
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (r, v) in entries {
            assert!(r < self.rows, "row index {r} out of range {}", self.rows);
            *acc.entry(r).or_insert(0) += v;
        }
        self.columns.push(acc.into_iter().filter(|&(_, v)| v != 0).collect());
        self.cols = self.columns.len();
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.columns[c]
            .binary_search_by_key(&r, |&(i, _)| i)
            .map(|k| self.columns[c][k].1)
            .unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0i64; self.cols]; self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                d[r][c] = v;
            }
        }
        d
    }

    pub fn from_dense(d: &[Vec<i64>], cols: usize) -> Self {
        let mut m = ZSparse::zero(d.len(), 0);
        for c in 0..cols {
            m.push_column(d.iter().enumerate().map(|(r, row)| (r, row[c])));
        }
        m
    }

    /// `self * other`, where `self` is `a x b` and `other` is `b x c`.
    pub fn mul(&self, other: &ZSparse) -> ZSparse {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = ZSparse::zero(self.rows, 0);
        for col in &other.columns {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, v) in col {
                for &(r, w) in &self.columns[k] {
                    *acc.entry(r).or_insert(0) += v * w;
                }
            }
            out.push_column(acc);
        }
        out
    }

    pub fn rank(&self) -> usize {
        smith_invariants(self).len()
    }
}

/// Nonzero Smith invariants `d_1 | d_2 | ...`, all positive.
///
/// Unit pivots are eliminated sparsely first; whatever is left is reduced
/// densely, pivoting on the entry of least absolute value.
pub fn smith_invariants(m: &ZSparse) -> Vec<BigInt> {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = vec![BTreeMap::new(); m.rows];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (c, col) in m.columns.iter().enumerate() {
        for &(r, v) in col {
            if v != 0 {
                rows[r].insert(c, BigInt::from(v));
                col_rows[c].insert(r);
            }
        }
    }
    let mut units = 0usize;
    while let Some((pr, pc)) = best_unit(&rows, &col_rows) {
        let pivot_row = std::mem::take(&mut rows[pr]);
        let u = pivot_row[&pc].clone();
        let others: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in others {
            // u is a unit, so u^{-1} = u
            let factor = &rows[r][&pc] * &u;
            for (j, v) in &pivot_row {
                let entry = rows[r].entry(*j).or_insert_with(BigInt::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[r].remove(j);
                    col_rows[*j].remove(&r);
                } else {
                    col_rows[*j].insert(r);
                }
            }
        }
        for j in pivot_row.keys() {
            col_rows[*j].remove(&pr);
        }
        debug_assert!(col_rows[pc].is_empty());
        units += 1;
    }

    let live_rows: Vec<usize> = (0..m.rows).filter(|&r| !rows[r].is_empty()).collect();
    let live_cols: Vec<usize> = (0..m.cols).filter(|&c| !col_rows[c].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> =
        live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
    for (i, &r) in live_rows.iter().enumerate() {
        for (c, v) in &rows[r] {
            dense[i][col_pos[c]] = v.clone();
        }
    }
    let mut out = vec![BigInt::one(); units];
    out.extend(dense_smith(dense));
    normalize_chain(&mut out);
    out
}

fn best_unit(
    rows: &[BTreeMap<usize, BigInt>],
    col_rows: &[BTreeSet<usize>],
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, (usize, usize))> = None;
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row {
            if v.abs().is_one() {
                let cost = (row.len() - 1) * (col_rows[*c].len() - 1);
                if best.is_none_or(|(b, _)| cost < b) {
                    best = Some((cost, (r, *c)));
                    if cost == 0 {
                        return Some((r, *c));
                    }
                }
            }
        }
    }
    best.map(|(_, p)| p)
}

fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nr = a.len();
    let nc = if nr == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr.min(nc) {
        let Some((pi, pj)) = min_entry(&a, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                for j in t..nc {
                    let sub = &q * &a[t][j];
                    a[i][j] -= sub;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..nc {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                for row in a.iter_mut().skip(t) {
                    let sub = &q * &row[t];
                    row[j] -= sub;
                }
                dirty |= !a[t][j].is_zero();
            }
            if !dirty {
                break;
            }
            // a remainder smaller than the pivot survived; move it into place
            let (mut bi, mut bj) = (t, t);
            for i in t..nr {
                if !a[i][t].is_zero() && a[i][t].abs() < a[bi][bj].abs() {
                    (bi, bj) = (i, t);
                }
            }
            for j in t..nc {
                if !a[t][j].is_zero() && a[t][j].abs() < a[bi][bj].abs() {
                    (bi, bj) = (t, j);
                }
            }
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

fn min_entry(a: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, v) in row.iter().enumerate().skip(t) {
            if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Replaces a diagonal by the equivalent divisibility chain using
/// `diag(a, b) ~ diag(gcd, lcm)`.
fn normalize_chain(d: &mut [BigInt]) {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
}
