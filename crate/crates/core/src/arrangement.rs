//! Affine subspace arrangements over the rationals: the intersection poset,
//! the power-set poset ranked by codimension, and the Galois connection
//! between them.

use std::collections::BTreeSet;

use num_rational::BigRational;
use thiserror::Error;

use crate::fcat::{FCatError, Poset, RankedPoset};
use crate::linalg::QMatrix;
use crate::magnitude::{poincare_polynomial, MagnitudeError, Poincare};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("equation {0} has {1} entries, expected {2}")]
    Shape(usize, usize, usize),
    #[error("Galois connection fails: {0}")]
    Galois(String),
    #[error(transparent)]
    Category(#[from] FCatError),
    #[error(transparent)]
    Magnitude(#[from] MagnitudeError),
}

/// Solution set of `A x = b` in `ℚ^dim`, stored as the reduced row echelon
/// form of `[A | b]` so equal sets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AffineSubspace {
    Empty,
    Flat(Vec<Vec<BigRational>>),
}

impl AffineSubspace {
    pub fn from_equations(dim: usize, rows: &[Vec<BigRational>]) -> AffineSubspace {
        let mut m = QMatrix::zeros(rows.len(), dim + 1);
        for (i, r) in rows.iter().enumerate() {
            m.data[i].clone_from(r);
        }
        let pivots = m.rref();
        if pivots.contains(&dim) {
            return AffineSubspace::Empty;
        }
        AffineSubspace::Flat(m.data.into_iter().take(pivots.len()).collect())
    }

    /// Codimension in `ℚ^dim`; the empty set counts as `dim + 1`.
    pub fn codim(&self, dim: usize) -> u64 {
        match self {
            AffineSubspace::Empty => dim as u64 + 1,
            AffineSubspace::Flat(rows) => rows.len() as u64,
        }
    }

    pub fn intersect(&self, other: &AffineSubspace, dim: usize) -> AffineSubspace {
        match (self, other) {
            (AffineSubspace::Flat(a), AffineSubspace::Flat(b)) => {
                let rows: Vec<_> = a.iter().chain(b).cloned().collect();
                AffineSubspace::from_equations(dim, &rows)
            }
            _ => AffineSubspace::Empty,
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &AffineSubspace, dim: usize) -> bool {
        self.intersect(other, dim) == *self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangement {
    pub dim: usize,
    pub subspaces: Vec<AffineSubspace>,
}

impl Arrangement {
    /// Each subspace is a list of equations `c_1 x_1 + … + c_dim x_dim = b`
    /// written as `[c_1, …, c_dim, b]`.
    pub fn from_integer_equations(dim: usize, subspaces: &[Vec<Vec<i64>>]) -> Result<Self, ArrangementError> {
        let mut out = Vec::new();
        for eqs in subspaces {
            let mut rows = Vec::new();
            for (i, e) in eqs.iter().enumerate() {
                if e.len() != dim + 1 {
                    return Err(ArrangementError::Shape(i, e.len(), dim + 1));
                }
                rows.push(e.iter().map(|&x| BigRational::from_integer(x.into())).collect());
            }
            out.push(AffineSubspace::from_equations(dim, &rows));
        }
        Ok(Arrangement { dim, subspaces: out })
    }

    fn whole(&self) -> AffineSubspace {
        AffineSubspace::Flat(Vec::new())
    }

    fn meet(&self, set: &BTreeSet<usize>) -> AffineSubspace {
        set.iter().fold(self.whole(), |acc, &i| acc.intersect(&self.subspaces[i], self.dim))
    }

    fn subsets(&self) -> Vec<BTreeSet<usize>> {
        let n = self.subspaces.len();
        (0u64..1 << n).map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect()).collect()
    }

    fn containing(&self, y: &AffineSubspace) -> BTreeSet<usize> {
        (0..self.subspaces.len()).filter(|&i| y.is_subset(&self.subspaces[i], self.dim)).collect()
    }

    /// Distinct intersections ordered by reverse inclusion, ranked by
    /// codimension. Each element is labelled by the subspaces containing it.
    pub fn intersection_poset(&self) -> Result<(RankedPoset, Vec<AffineSubspace>), ArrangementError> {
        let mut flats: Vec<AffineSubspace> = Vec::new();
        for t in self.subsets() {
            let x = self.meet(&t);
            if !flats.contains(&x) {
                flats.push(x);
            }
        }
        let labels = flats.iter().map(|y| set_label(&self.containing(y))).collect();
        let mut rel = Vec::new();
        for (a, x) in flats.iter().enumerate() {
            for (b, y) in flats.iter().enumerate() {
                if a != b && y.is_subset(x, self.dim) {
                    rel.push((a, b));
                }
            }
        }
        let poset = Poset::from_relations(labels, &rel)?;
        let rank = flats.iter().map(|x| x.codim(self.dim)).collect();
        Ok((RankedPoset::new(poset, rank)?, flats))
    }

    /// All subsets ordered by inclusion, `φ(T) = codim ∩T`.
    pub fn power_set_poset(&self) -> Result<(RankedPoset, Vec<BTreeSet<usize>>), ArrangementError> {
        let sets = self.subsets();
        let labels = sets.iter().map(set_label).collect();
        let mut rel = Vec::new();
        for (a, s) in sets.iter().enumerate() {
            for (b, t) in sets.iter().enumerate() {
                if a != b && s.is_subset(t) {
                    rel.push((a, b));
                }
            }
        }
        let poset = Poset::from_relations(labels, &rel)?;
        let rank = sets.iter().map(|t| self.meet(t).codim(self.dim)).collect();
        Ok((RankedPoset::new(poset, rank)?, sets))
    }
}

fn set_label(s: &BTreeSet<usize>) -> String {
    let inner: Vec<String> = s.iter().map(|i| format!("s{i}")).collect();
    format!("{{{}}}", inner.join(","))
}

/// Order-preserving maps `F: P → Q`, `G: Q → P` between ranked posets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisConnection {
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
}

impl GaloisConnection {
    /// Checks `x ≤ GFx`, `FGy ≤ y`, monotonicity, `ψF = φ`, `φG = ψ`, and
    /// that only the minima have rank zero.
    pub fn validate(&self, p: &RankedPoset, q: &RankedPoset) -> Result<(), ArrangementError> {
        let fail = |s: String| Err(ArrangementError::Galois(s));
        let (pp, qq) = (&p.poset, &q.poset);
        if self.forward.len() != pp.len() || self.backward.len() != qq.len() {
            return fail("maps have the wrong length".into());
        }
        for (ranked, name) in [(p, "source"), (q, "target")] {
            let zeros = ranked.rank.iter().filter(|&&r| r == 0).count();
            if zeros != 1 {
                return fail(format!("{name} has {zeros} elements of rank 0"));
            }
        }
        for a in 0..pp.len() {
            for b in 0..pp.len() {
                if pp.leq(a, b) && !qq.leq(self.forward[a], self.forward[b]) {
                    return fail(format!("F is not monotone on {} <= {}", pp.elements[a], pp.elements[b]));
                }
            }
        }
        for a in 0..qq.len() {
            for b in 0..qq.len() {
                if qq.leq(a, b) && !pp.leq(self.backward[a], self.backward[b]) {
                    return fail(format!("G is not monotone on {} <= {}", qq.elements[a], qq.elements[b]));
                }
            }
        }
        for x in 0..pp.len() {
            if !pp.leq(x, self.backward[self.forward[x]]) {
                return fail(format!("{} is not below GF of itself", pp.elements[x]));
            }
            if q.rank[self.forward[x]] != p.rank[x] {
                return fail(format!("rank changes under F at {}", pp.elements[x]));
            }
        }
        for y in 0..qq.len() {
            if !qq.leq(self.forward[self.backward[y]], y) {
                return fail(format!("FG of {} is not below it", qq.elements[y]));
            }
            if p.rank[self.backward[y]] != q.rank[y] {
                return fail(format!("rank changes under G at {}", qq.elements[y]));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementPoincare {
    pub power_set: Poincare,
    pub intersection: Poincare,
}

impl ArrangementPoincare {
    pub fn agree(&self) -> bool {
        self.power_set.classical == self.intersection.classical
            && self.power_set.weighting_form == self.intersection.weighting_form
    }
}

/// `F(T) = ∩T` and `G(y) = {s : y ⊆ s}`.
pub fn galois_connection(
    arr: &Arrangement,
) -> Result<(RankedPoset, RankedPoset, GaloisConnection), ArrangementError> {
    let (p, sets) = arr.power_set_poset()?;
    let (q, flats) = arr.intersection_poset()?;
    let forward = sets
        .iter()
        .map(|t| {
            let x = arr.meet(t);
            flats.iter().position(|y| *y == x).expect("every intersection is listed")
        })
        .collect();
    let backward = flats
        .iter()
        .map(|y| {
            let g = arr.containing(y);
            sets.iter().position(|t| *t == g).expect("every subset is listed")
        })
        .collect();
    let conn = GaloisConnection { forward, backward };
    conn.validate(&p, &q)?;
    Ok((p, q, conn))
}

/// Poincaré polynomials of both posets, each computed as a weighting and
/// through the Möbius function.
pub fn arrangement_poincare(arr: &Arrangement) -> Result<ArrangementPoincare, ArrangementError> {
    let (p, q, _) = galois_connection(arr)?;
    Ok(ArrangementPoincare { power_set: poincare_polynomial(&p)?, intersection: poincare_polynomial(&q)? })
}

/// Lines through the origin of the plane, `a x + b y = 0` for each `(a, b)`.
pub fn central_lines(normals: &[(i64, i64)]) -> Arrangement {
    let eqs: Vec<Vec<Vec<i64>>> = normals.iter().map(|&(a, b)| vec![vec![a, b, 0]]).collect();
    Arrangement::from_integer_equations(2, &eqs).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::novikov::{Exponent, NSeries};

    fn poly(cut: u64, c: &[i64]) -> NSeries {
        NSeries::from_int_coeffs(Exponent::from_int(cut), c)
    }

    #[test]
    fn two_lines() {
        let arr = central_lines(&[(1, 0), (0, 1)]);
        let (q, _) = arr.intersection_poset().unwrap();
        assert_eq!(q.poset.len(), 4);
        let mut ranks = q.rank.clone();
        ranks.sort();
        assert_eq!(ranks, vec![0, 1, 1, 2]);
        let res = arrangement_poincare(&arr).unwrap();
        assert!(res.agree());
        assert_eq!(res.intersection.classical, poly(2, &[1, 2, 1]));
        assert_eq!(res.intersection.weighting_form, poly(2, &[1, -2, 1]));
    }

    #[test]
    fn three_lines() {
        let arr = central_lines(&[(1, 0), (0, 1), (1, 1)]);
        let (p, _) = arr.power_set_poset().unwrap();
        assert_eq!(p.poset.len(), 8);
        let (q, _) = arr.intersection_poset().unwrap();
        assert_eq!(q.poset.len(), 5);
        let res = arrangement_poincare(&arr).unwrap();
        assert!(res.agree());
        // 1 + (#lines) q + (#lines - 1) q^2
        assert_eq!(res.power_set.classical, poly(2, &[1, 3, 2]));
    }

    #[test]
    fn parallel_lines_meet_in_the_empty_set() {
        let arr = Arrangement::from_integer_equations(2, &[vec![vec![1, 0, 0]], vec![vec![1, 0, 1]]]).unwrap();
        let (q, flats) = arr.intersection_poset().unwrap();
        assert!(flats.contains(&AffineSubspace::Empty));
        assert!(q.rank.contains(&3));
        let res = arrangement_poincare(&arr).unwrap();
        assert!(res.agree());
        assert_eq!(res.intersection.classical, poly(3, &[1, 2, 0, -1]));
    }

    #[test]
    fn canonical_form() {
        let r = |v: &[i64]| v.iter().map(|&x| BigRational::from_integer(x.into())).collect::<Vec<_>>();
        let a = AffineSubspace::from_equations(2, &[r(&[2, 4, 6])]);
        let b = AffineSubspace::from_equations(2, &[r(&[1, 2, 3]), r(&[3, 6, 9])]);
        assert_eq!(a, b);
        assert_eq!(a.codim(2), 1);
    }

    #[test]
    fn broken_connection_rejected() {
        let arr = central_lines(&[(1, 0), (0, 1)]);
        let (p, q, mut conn) = galois_connection(&arr).unwrap();
        conn.forward.swap(0, 3);
        assert!(conn.validate(&p, &q).is_err());
    }
}
