//! Sparse rational vectors and an incremental row-echelon basis.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Sparse rational vector as `(index, value)` pairs sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseQ(pub Vec<(usize, BigRational)>);

impl SparseQ {
    pub fn new() -> Self {
        SparseQ(Vec::new())
    }

    pub fn unit(i: usize) -> Self {
        SparseQ(vec![(i, BigRational::from_integer(1.into()))])
    }

    pub fn from_ints<I: IntoIterator<Item = (usize, i64)>>(it: I) -> Self {
        let mut v: Vec<(usize, BigRational)> = Vec::new();
        let mut raw: Vec<(usize, i64)> = it.into_iter().collect();
        raw.sort_by_key(|&(i, _)| i);
        for (i, x) in raw {
            match v.last_mut() {
                Some((j, acc)) if *j == i => *acc += BigRational::from_integer(x.into()),
                _ => v.push((i, BigRational::from_integer(x.into()))),
            }
        }
        v.retain(|(_, x)| !x.is_zero());
        SparseQ(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lead(&self) -> Option<(usize, &BigRational)> {
        self.0.first().map(|(i, x)| (*i, x))
    }

    /// `self + k * other`.
    pub fn axpy(&self, k: &BigRational, other: &SparseQ) -> SparseQ {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, k * &b[j].1));
                j += 1;
            } else {
                let v = &a[i].1 + k * &b[j].1;
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseQ(out)
    }

    /// Keeps only indices satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> SparseQ {
        SparseQ(self.0.iter().filter(|(i, _)| keep(*i)).cloned().collect())
    }

    pub fn get(&self, i: usize) -> BigRational {
        self.0
            .binary_search_by_key(&i, |(j, _)| *j)
            .map(|k| self.0[k].1.clone())
            .unwrap_or_else(|_| BigRational::zero())
    }
}

/// Row-echelon basis built one vector at a time, optionally tracking each
/// reduced vector as a combination of the inserted inputs.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    pivots: HashMap<usize, (SparseQ, SparseQ)>,
    track: bool,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn tracking() -> Self {
        Echelon { track: true, ..Echelon::default() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the basis; returns the residue and, when tracking,
    /// the combination of inputs it equals.
    fn reduce(&self, mut v: SparseQ, mut combo: SparseQ) -> (SparseQ, SparseQ) {
        while let Some((lead, x)) = v.lead() {
            let Some((pv, pc)) = self.pivots.get(&lead) else { break };
            let k = -(x / &pv.0[0].1);
            v = v.axpy(&k, pv);
            if self.track {
                combo = combo.axpy(&k, pc);
            }
        }
        (v, combo)
    }

    /// Inserts `v`; returns the kernel relation among inputs when `v` was
    /// dependent (only meaningful when tracking).
    pub fn insert(&mut self, v: SparseQ) -> Option<SparseQ> {
        let combo = if self.track { SparseQ::unit(self.inserted) } else { SparseQ::new() };
        self.inserted += 1;
        let (r, c) = self.reduce(v, combo);
        match r.lead() {
            Some((lead, _)) => {
                self.pivots.insert(lead, (r, c));
                None
            }
            None => Some(c),
        }
    }

    /// `v` as a combination of the inserted inputs, if it lies in their span
    /// (requires tracking).
    pub fn express(&self, v: &SparseQ) -> Option<SparseQ> {
        let (r, c) = self.reduce(v.clone(), SparseQ::new());
        r.is_zero().then(|| SparseQ::new().axpy(&-BigRational::one(), &c))
    }

    pub fn contains(&self, v: &SparseQ) -> bool {
        self.reduce(v.clone(), SparseQ::new()).0.is_zero()
    }
}

/// Rank of a family of sparse vectors.
pub fn rank_of(vectors: &[SparseQ]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v.clone());
    }
    e.rank()
}

/// Basis of the kernel of the map sending the `j`-th domain basis vector to
/// `images[j]`, expressed in domain coordinates.
pub fn kernel_of(images: &[SparseQ]) -> Vec<SparseQ> {
    let mut e = Echelon::tracking();
    images.iter().filter_map(|v| e.insert(v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let vs = vec![
            SparseQ::from_ints([(0, 1), (1, 1)]),
            SparseQ::from_ints([(1, 1), (2, 1)]),
            SparseQ::from_ints([(0, 1), (2, -1)]),
        ];
        assert_eq!(rank_of(&vs), 2);
        let k = kernel_of(&vs);
        assert_eq!(k.len(), 1);
        // the relation v0 - v1 - v2 = 0, up to scale
        let mut total = SparseQ::new();
        for (j, c) in &k[0].0 {
            total = total.axpy(c, &vs[*j]);
        }
        assert!(total.is_zero());
    }

    #[test]
    fn axpy_cancels() {
        let a = SparseQ::from_ints([(0, 2), (3, 1)]);
        let b = SparseQ::from_ints([(0, 1), (2, 5)]);
        let c = a.axpy(&BigRational::from_integer((-2).into()), &b);
        assert_eq!(c, SparseQ::from_ints([(2, -10), (3, 1)]));
    }
}
