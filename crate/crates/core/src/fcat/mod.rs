//! Categories enriched over filtered sets, at desk scale.
//!
//! Every morphism carries a non-negative rational degree and composition may
//! only lower degrees: `deg(g∘f) <= deg f + deg g`.

mod functor;
mod graph;
mod group;
mod metric;
mod poset;

use std::collections::HashMap;

use thiserror::Error;

use crate::novikov::Exponent;

pub use functor::Functor;
pub use graph::{from_graph, LocallyFiniteGraph, NeighborOracle};
pub use group::{from_group, GroupElem, GroupFamily, GroupPresentationBall};
pub use metric::{kolmogorov_quotient, MetricSpace};
pub use poset::{from_finite_poset_unit, from_poset_ranked, Poset, RankedPoset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FCatError {
    #[error("morphism {0}: {1}")]
    BadMorphism(String, String),
    #[error("object {0} must have exactly one identity, found {1}")]
    IdentityCount(String, usize),
    #[error("identity of {0} has nonzero degree")]
    IdentityDegree(String),
    #[error("composite {0} ∘ {1} is not defined")]
    MissingComposite(String, String),
    #[error("composite {0} ∘ {1} = {2} has the wrong source or target")]
    BadComposite(String, String, String),
    #[error("composite {0} ∘ {1} is listed twice")]
    DuplicateComposite(String, String),
    #[error("unit law fails for {0}")]
    NotUnital(String),
    #[error("associativity fails for ({0}, {1}, {2})")]
    NotAssociative(String, String, String),
    #[error("deg({0} ∘ {1}) exceeds deg {0} + deg {1}")]
    FilteredLaw(String, String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("nonzero diagonal at {0}")]
    Diagonal(String),
    #[error("triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    Triangle(String, String, String),
    #[error("graph is not symmetric: {0} -> {1} without {1} -> {0}")]
    Asymmetric(String, String),
    #[error("relation is not antisymmetric: {0} and {1}")]
    NotAntisymmetric(String, String),
    #[error("relation is not transitive: {0} <= {1} <= {2}")]
    NotTransitive(String, String, String),
    #[error("poset has no minimum element")]
    NoMinimum,
    #[error("rank of the minimum {0} is not zero")]
    RankAtMinimum(String),
    #[error("rank is not order preserving: {0} <= {1}")]
    NonMonotone(String, String),
    #[error("group table: {0}")]
    GroupTable(String),
    #[error("not metric-like: {0} parallel morphisms {1} -> {2}")]
    NotMetricLike(usize, String, String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("not a filtered functor: {0}")]
    NotFunctor(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub degree: Exponent,
    pub identity: bool,
}

#[derive(Debug, Clone)]
pub struct FCat {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<usize>,
    hom: Vec<Vec<Vec<usize>>>,
    comp: HashMap<(usize, usize), usize>,
    horizon: Option<Exponent>,
    base: Vec<usize>,
}

impl PartialEq for FCat {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.comp == other.comp
            && self.horizon == other.horizon
            && self.base == other.base
    }
}

impl Eq for FCat {}

impl FCat {
    /// Builds and validates. `composition` lists `(g, f, g∘f)` by morphism
    /// index. With a `horizon`, a composite may be absent when
    /// `deg f + deg g` exceeds it (the category is a truncation).
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        composition: Vec<(usize, usize, usize)>,
        horizon: Option<Exponent>,
    ) -> Result<FCat, FCatError> {
        let n = objects.len();
        let mut seen = std::collections::HashSet::new();
        for o in &objects {
            if !seen.insert(o) {
                return Err(FCatError::DuplicateLabel(o.clone()));
            }
        }
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut ids: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, m) in morphisms.iter().enumerate() {
            if m.source >= n || m.target >= n {
                return Err(FCatError::BadMorphism(m.name.clone(), "endpoint out of range".into()));
            }
            hom[m.source][m.target].push(i);
            if m.identity {
                if m.source != m.target {
                    return Err(FCatError::BadMorphism(m.name.clone(), "identity is not an endomorphism".into()));
                }
                ids[m.source].push(i);
                if !m.degree.is_zero() {
                    return Err(FCatError::IdentityDegree(objects[m.source].clone()));
                }
            }
        }
        let mut identity = Vec::with_capacity(n);
        for (a, v) in ids.iter().enumerate() {
            if v.len() != 1 {
                return Err(FCatError::IdentityCount(objects[a].clone(), v.len()));
            }
            identity.push(v[0]);
        }
        let mut comp = HashMap::new();
        for (g, f, h) in composition {
            let name = |i: usize| morphisms.get(i).map_or_else(|| format!("#{i}"), |m| m.name.clone());
            if g >= morphisms.len() || f >= morphisms.len() || h >= morphisms.len() {
                return Err(FCatError::BadComposite(name(g), name(f), name(h)));
            }
            if comp.insert((g, f), h).is_some() {
                return Err(FCatError::DuplicateComposite(name(g), name(f)));
            }
        }
        let c = FCat { objects, morphisms, identity, hom, comp, horizon, base: Vec::new() };
        c.validate()?;
        Ok(c)
    }

    /// Checks units, composite endpoints, the filtered law and associativity
    /// on every composable triple.
    pub fn validate(&self) -> Result<(), FCatError> {
        let name = |i: usize| self.morphisms[i].name.clone();
        for (f, mf) in self.morphisms.iter().enumerate() {
            for &g in self.hom[mf.target].iter().flatten() {
                let mg = &self.morphisms[g];
                match self.comp.get(&(g, f)) {
                    Some(&h) => {
                        let mh = &self.morphisms[h];
                        if mh.source != mf.source || mh.target != mg.target {
                            return Err(FCatError::BadComposite(name(g), name(f), name(h)));
                        }
                        if mh.degree > &mf.degree + &mg.degree {
                            return Err(FCatError::FilteredLaw(name(g), name(f)));
                        }
                    }
                    None => {
                        let within = match &self.horizon {
                            Some(r) => &mf.degree + &mg.degree <= *r,
                            None => true,
                        };
                        if within {
                            return Err(FCatError::MissingComposite(name(g), name(f)));
                        }
                    }
                }
            }
        }
        for (g, f, h) in self.composition_table() {
            if self.morphisms[f].target != self.morphisms[g].source {
                return Err(FCatError::BadComposite(name(g), name(f), name(h)));
            }
        }
        for (f, mf) in self.morphisms.iter().enumerate() {
            let left = self.compose(self.identity[mf.target], f);
            let right = self.compose(f, self.identity[mf.source]);
            if left != Some(f) || right != Some(f) {
                return Err(FCatError::NotUnital(name(f)));
            }
        }
        for (f, mf) in self.morphisms.iter().enumerate() {
            for &g in self.hom[mf.target].iter().flatten() {
                let Some(gf) = self.compose(g, f) else { continue };
                for &h in self.hom[self.morphisms[g].target].iter().flatten() {
                    let (Some(hg), Some(h_gf)) = (self.compose(h, g), self.compose(h, gf)) else {
                        continue;
                    };
                    if let Some(hg_f) = self.compose(hg, f) {
                        if hg_f != h_gf {
                            return Err(FCatError::NotAssociative(name(f), name(g), name(h)));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == label)
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism(&self, i: usize) -> &Morphism {
        &self.morphisms[i]
    }

    pub fn identity_of(&self, a: usize) -> usize {
        self.identity[a]
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.hom[a][b]
    }

    /// `g ∘ f`, if defined.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g, f)).copied()
    }

    /// All composition triples `(g, f, g∘f)` sorted for reproducible output.
    pub fn composition_table(&self) -> Vec<(usize, usize, usize)> {
        let mut t: Vec<_> = self.comp.iter().map(|(&(g, f), &h)| (g, f, h)).collect();
        t.sort_unstable();
        t
    }

    /// Truncation radius for categories cut out of an infinite one.
    pub fn horizon(&self) -> Option<&Exponent> {
        self.horizon.as_ref()
    }

    /// Objects the truncation was centred on.
    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn with_base(mut self, base: Vec<usize>) -> Self {
        assert!(base.iter().all(|&b| b < self.objects.len()));
        self.base = base;
        self
    }

    pub fn non_identities(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.morphisms.len()).filter(|&i| !self.morphisms[i].identity)
    }

    /// At most one morphism between any ordered pair of objects.
    pub fn check_metric_like(&self) -> Result<(), FCatError> {
        for a in 0..self.objects.len() {
            for b in 0..self.objects.len() {
                if self.hom[a][b].len() > 1 {
                    return Err(FCatError::NotMetricLike(
                        self.hom[a][b].len(),
                        self.objects[a].clone(),
                        self.objects[b].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_metric_like(&self) -> bool {
        self.check_metric_like().is_ok()
    }

    /// Degree of the unique morphism `a -> b` of a metric-like category.
    pub fn distance(&self, a: usize, b: usize) -> Option<&Exponent> {
        self.hom[a][b].first().map(|&m| &self.morphisms[m].degree)
    }

    pub fn integral_degrees(&self) -> bool {
        self.morphisms.iter().all(|m| m.degree.is_integer())
    }

    /// Smallest degree of a non-identity morphism.
    pub fn min_positive_degree(&self) -> Option<Exponent> {
        self.non_identities().map(|i| self.morphisms[i].degree.clone()).min()
    }

    pub fn max_degree(&self) -> Exponent {
        self.morphisms.iter().map(|m| m.degree.clone()).max().unwrap_or_else(Exponent::zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(name: &str, s: usize, t: usize, deg: u64, id: bool) -> Morphism {
        Morphism { name: name.into(), source: s, target: t, degree: Exponent::from_int(deg), identity: id }
    }

    fn z2(deg_g: u64) -> Result<FCat, FCatError> {
        FCat::new(
            vec!["*".into()],
            vec![m("id", 0, 0, 0, true), m("g", 0, 0, deg_g, false)],
            vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            None,
        )
    }

    #[test]
    fn z2_as_category() {
        let c = z2(0).unwrap();
        assert_eq!(c.compose(1, 1), Some(0));
        assert!(z2(3).is_ok());
    }

    #[test]
    fn filtered_law_is_enforced() {
        // g∘g = h with deg h = 3 > 1 + 1
        let r = FCat::new(
            vec!["*".into()],
            vec![m("id", 0, 0, 0, true), m("g", 0, 0, 1, false), m("h", 0, 0, 3, false)],
            vec![
                (0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2),
                (1, 1, 2), (1, 2, 2), (2, 1, 2), (2, 2, 2),
            ],
            None,
        );
        assert_eq!(r, Err(FCatError::FilteredLaw("g".into(), "g".into())));
    }

    #[test]
    fn interval_i0() {
        let c = FCat::new(
            vec!["0".into(), "1".into()],
            vec![m("id0", 0, 0, 0, true), m("id1", 1, 1, 0, true), m("u", 0, 1, 0, false)],
            vec![(0, 0, 0), (1, 1, 1), (2, 0, 2), (1, 2, 2)],
            None,
        )
        .unwrap();
        assert_eq!(c.hom(0, 1), &[2]);
    }

    #[test]
    fn missing_composite_rejected() {
        let r = FCat::new(
            vec!["*".into()],
            vec![m("id", 0, 0, 0, true), m("g", 0, 0, 0, false)],
            vec![(0, 0, 0), (0, 1, 1), (1, 0, 1)],
            None,
        );
        assert!(matches!(r, Err(FCatError::MissingComposite(..))));
    }

    #[test]
    fn non_associative_rejected() {
        // (x∘y)∘x = e∘x = x but x∘(y∘x) = x∘x = y
        let r = FCat::new(
            vec!["*".into()],
            vec![m("e", 0, 0, 0, true), m("x", 0, 0, 0, false), m("y", 0, 0, 0, false)],
            vec![
                (0, 0, 0), (0, 1, 1), (1, 0, 1), (0, 2, 2), (2, 0, 2),
                (1, 1, 2), (1, 2, 0), (2, 1, 1), (2, 2, 2),
            ],
            None,
        );
        assert!(matches!(r, Err(FCatError::NotAssociative(..))));
    }
}
