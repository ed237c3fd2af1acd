use super::metric::build;
use super::{FCat, FCatError, Morphism};
use crate::novikov::Exponent;

/// A finite poset stored as its full order relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    pub elements: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Reflexive-transitive closure of the given pairs `a < b`.
    pub fn from_covers(elements: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, FCatError> {
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        let p = Poset { elements, leq };
        p.check_antisymmetric()?;
        Ok(p)
    }

    /// The pairs must already form a transitive relation (reflexivity is
    /// added).
    pub fn from_relations(elements: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, FCatError> {
        let n = elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in pairs {
            leq[a][b] = true;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(FCatError::NotTransitive(
                            elements[a].clone(),
                            elements[b].clone(),
                            elements[c].clone(),
                        ));
                    }
                }
            }
        }
        let p = Poset { elements, leq };
        p.check_antisymmetric()?;
        Ok(p)
    }

    fn check_antisymmetric(&self) -> Result<(), FCatError> {
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                if self.leq[a][b] && self.leq[b][a] {
                    return Err(FCatError::NotAntisymmetric(self.elements[a].clone(), self.elements[b].clone()));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq[a][b]
    }

    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&m| (0..self.len()).all(|x| self.leq[m][x]))
    }

    /// Cover relations `a ⋖ b`.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.lt(a, b) && !(0..n).any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The 0/1 matrix of the order relation.
    pub fn zeta_01(&self) -> Vec<Vec<i64>> {
        self.leq.iter().map(|r| r.iter().map(|&x| i64::from(x)).collect()).collect()
    }
}

/// A finite poset with a minimum and an order-preserving map to the
/// non-negative integers vanishing at the minimum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedPoset {
    pub poset: Poset,
    pub rank: Vec<u64>,
}

impl RankedPoset {
    pub fn new(poset: Poset, rank: Vec<u64>) -> Result<Self, FCatError> {
        let p = RankedPoset { poset, rank };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FCatError> {
        let p = &self.poset;
        if self.rank.len() != p.len() {
            return Err(FCatError::NotSquare);
        }
        let m = p.minimum().ok_or(FCatError::NoMinimum)?;
        if self.rank[m] != 0 {
            return Err(FCatError::RankAtMinimum(p.elements[m].clone()));
        }
        for a in 0..p.len() {
            for b in 0..p.len() {
                if p.leq(a, b) && self.rank[a] > self.rank[b] {
                    return Err(FCatError::NonMonotone(p.elements[a].clone(), p.elements[b].clone()));
                }
            }
        }
        Ok(())
    }

    pub fn minimum(&self) -> usize {
        self.poset.minimum().expect("validated ranked poset")
    }
}

/// The metrization `d(a, b) = φ(b) − φ(a)` for `a <= b`, infinite otherwise.
pub fn from_poset_ranked(p: &RankedPoset) -> Result<FCat, FCatError> {
    p.validate()?;
    let n = p.poset.len();
    let d: Vec<Vec<Option<Exponent>>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| p.poset.leq(a, b).then(|| Exponent::from_int(p.rank[b] - p.rank[a])))
                .collect()
        })
        .collect();
    build(&p.poset.elements, &d, None)
}

/// One morphism per relation `a <= b`, of degree 1 unless it is an identity.
pub fn from_finite_poset_unit(p: &Poset) -> Result<FCat, FCatError> {
    let n = p.len();
    let mut morphisms = Vec::new();
    let mut index = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if p.leq(a, b) {
                index[a][b] = Some(morphisms.len());
                let name = if a == b {
                    format!("id_{}", p.elements[a])
                } else {
                    format!("{}<{}", p.elements[a], p.elements[b])
                };
                let degree = Exponent::from_int(u64::from(a != b));
                morphisms.push(Morphism { name, source: a, target: b, degree, identity: a == b });
            }
        }
    }
    let mut comp = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if let (Some(f), Some(g), Some(h)) = (index[a][b], index[b][c], index[a][c]) {
                    comp.push((g, f, h));
                }
            }
        }
    }
    FCat::new(p.elements.clone(), morphisms, comp, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn antichain_and_chain() {
        let a = Poset::from_covers(names(&["x", "y", "z"]), &[]).unwrap();
        assert_eq!(from_finite_poset_unit(&a).unwrap().morphisms().len(), 3);
        let c = Poset::from_covers(names(&["0", "1", "2"]), &[(0, 1), (1, 2)]).unwrap();
        let cat = from_finite_poset_unit(&c).unwrap();
        assert_eq!(cat.non_identities().count(), 3);
        let f = cat.hom(0, 1)[0];
        let g = cat.hom(1, 2)[0];
        assert_eq!(cat.compose(g, f), Some(cat.hom(0, 2)[0]));
    }

    #[test]
    fn triangle_face_poset_has_six_relations() {
        let p = Poset::from_covers(
            names(&["a", "b", "c", "ab", "bc", "ca"]),
            &[(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5)],
        )
        .unwrap();
        let cat = from_finite_poset_unit(&p).unwrap();
        // oracle: count strict relations directly
        let strict = (0..6).flat_map(|a| (0..6).map(move |b| (a, b))).filter(|&(a, b)| p.lt(a, b)).count();
        assert_eq!(strict, 6);
        assert_eq!(cat.non_identities().count(), strict);
    }

    #[test]
    fn ranked_chain_and_boolean() {
        let chain = Poset::from_covers(names(&["0", "a"]), &[(0, 1)]).unwrap();
        let c = from_poset_ranked(&RankedPoset::new(chain, vec![0, 1]).unwrap()).unwrap();
        assert_eq!(c.non_identities().count(), 1);
        let b2 = Poset::from_covers(names(&["0", "x", "y", "1"]), &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let c = from_poset_ranked(&RankedPoset::new(b2, vec![0, 1, 1, 2]).unwrap()).unwrap();
        assert_eq!(c.distance(0, 3), Some(&Exponent::from_int(2)));
        assert_eq!(c.distance(3, 0), None);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Poset::from_covers(names(&["a", "b"]), &[(0, 1), (1, 0)]),
            Err(FCatError::NotAntisymmetric(..))
        ));
        assert!(matches!(
            Poset::from_relations(names(&["a", "b", "c"]), &[(0, 1), (1, 2)]),
            Err(FCatError::NotTransitive(..))
        ));
        let anti = Poset::from_covers(names(&["a", "b"]), &[]).unwrap();
        assert_eq!(RankedPoset::new(anti, vec![0, 0]), Err(FCatError::NoMinimum));
        let chain = Poset::from_covers(names(&["0", "a", "b"]), &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(RankedPoset::new(chain, vec![0, 2, 1]), Err(FCatError::NonMonotone(..))));
    }
}
