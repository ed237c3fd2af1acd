//! Zeta matrices, weightings and magnitude, and the classical invariants
//! they specialise to.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::fcat::{from_finite_poset_unit, from_graph, from_group, from_poset_ranked, FCat, FCatError};
use crate::fcat::{GroupPresentationBall, Poset, RankedPoset};
use crate::linalg::QMatrix;
use crate::novikov::{format_rational, Exponent, NSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagnitudeError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Category(#[from] FCatError),
    #[error("strategy not applicable: {0}")]
    Strategy(String),
    #[error("constant-term matrix is singular; kernel vector [{}]", .0.join(", "))]
    NotInvertible(Vec<String>),
    #[error("ball radius {radius} is below the cutoff {cutoff}")]
    Horizon { radius: Exponent, cutoff: Exponent },
    #[error("independent computations disagree: {0}")]
    OracleMismatch(String),
}

/// Square matrix of series sharing one cutoff, indexed by objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    pub labels: Vec<String>,
    pub cutoff: Exponent,
    pub entries: Vec<Vec<NSeries>>,
}

impl SeriesMatrix {
    pub fn identity(labels: Vec<String>, cutoff: Exponent) -> Self {
        let n = labels.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { NSeries::one(cutoff.clone()) } else { NSeries::zero(cutoff.clone()) })
                    .collect()
            })
            .collect();
        SeriesMatrix { labels, cutoff, entries }
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix, SeriesError> {
        let n = self.size();
        let mut out = SeriesMatrix {
            labels: self.labels.clone(),
            cutoff: self.cutoff.clone(),
            entries: vec![vec![NSeries::zero(self.cutoff.clone()); n]; n],
        };
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k][j];
                    if !b.is_zero() {
                        out.entries[i][j] = out.entries[i][j].add(&a.mul(b)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &SeriesMatrix) -> Result<SeriesMatrix, SeriesError> {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesMatrix { labels: self.labels.clone(), cutoff: self.cutoff.clone(), entries })
    }

    pub fn neg(&self) -> SeriesMatrix {
        SeriesMatrix {
            labels: self.labels.clone(),
            cutoff: self.cutoff.clone(),
            entries: self.entries.iter().map(|r| r.iter().map(NSeries::neg).collect()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(NSeries::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        let one = NSeries::one(self.cutoff.clone());
        (0..self.size()).all(|i| {
            (0..self.size()).all(|j| if i == j { self.entries[i][j] == one } else { self.entries[i][j].is_zero() })
        })
    }

    /// Coefficients at `q^0`.
    pub fn constant_matrix(&self) -> QMatrix {
        let n = self.size();
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.data[i][j] = self.entries[i][j].constant_term();
            }
        }
        m
    }

    fn from_rationals(labels: Vec<String>, cutoff: Exponent, m: &QMatrix) -> SeriesMatrix {
        let entries = m
            .data
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| NSeries::monomial(x.clone(), Exponent::zero(), cutoff.clone()))
                    .collect()
            })
            .collect();
        SeriesMatrix { labels, cutoff, entries }
    }

    pub fn row_sums(&self) -> Result<Vec<NSeries>, SeriesError> {
        self.entries
            .iter()
            .map(|r| r.iter().try_fold(NSeries::zero(self.cutoff.clone()), |acc, x| acc.add(x)))
            .collect()
    }

    pub fn column_sums(&self) -> Result<Vec<NSeries>, SeriesError> {
        (0..self.size())
            .map(|j| {
                self.entries
                    .iter()
                    .try_fold(NSeries::zero(self.cutoff.clone()), |acc, r| acc.add(&r[j]))
            })
            .collect()
    }

    pub fn total(&self) -> Result<NSeries, SeriesError> {
        self.row_sums()?
            .iter()
            .try_fold(NSeries::zero(self.cutoff.clone()), |acc, x| acc.add(x))
    }

    /// Smallest positive exponent among the entries.
    fn min_positive_exponent(&self) -> Option<Exponent> {
        self.entries
            .iter()
            .flatten()
            .flat_map(|s| s.terms().map(|(e, _)| e.clone()))
            .filter(|e| !e.is_zero())
            .min()
    }
}

/// `ζ(a, b) = Σ_{f: a → b} q^{deg f}`.
pub fn zeta_matrix(c: &FCat, cutoff: &Exponent) -> SeriesMatrix {
    let n = c.object_count();
    let entries = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    NSeries::from_terms(
                        cutoff.clone(),
                        c.hom(a, b)
                            .iter()
                            .map(|&f| (c.morphism(f).degree.clone(), BigRational::one())),
                    )
                })
                .collect()
        })
        .collect();
    SeriesMatrix { labels: c.objects().to_vec(), cutoff: cutoff.clone(), entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Neumann,
    ConstantTermLu,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub objects: usize,
    pub morphisms: usize,
    /// Radius of truncation for categories cut out of infinite graphs.
    pub truncated_at: Option<Exponent>,
    pub metric_like: bool,
    pub uniform: bool,
    /// Least non-identity degree when it is positive.
    pub epsilon: Option<Exponent>,
    pub tame: bool,
    /// A cycle of degree-0 non-identity morphisms, when not tame.
    pub tame_witness: Option<Vec<String>>,
    pub quasi_tame: bool,
    /// Points at mutual distance zero (metric-like inputs).
    pub degenerate_pair: Option<(String, String)>,
    pub nontrivial_endomorphism: Option<String>,
    pub skeletal: bool,
    /// Finitely many non-degenerate paths in total, with the longest length.
    pub longest_path: Option<Exponent>,
}

/// Tameness of a finite category is decided exactly: the degree-0
/// non-identity morphisms must not contain a cycle.
pub fn classify(c: &FCat) -> Classification {
    let n = c.object_count();
    let non_id: Vec<usize> = c.non_identities().collect();
    let epsilon = c.min_positive_degree().filter(|e| !e.is_zero());
    let uniform = non_id.is_empty() || epsilon.is_some();
    let zero_edges: Vec<usize> = non_id.iter().copied().filter(|&f| c.morphism(f).degree.is_zero()).collect();
    let tame_witness = find_cycle(c, &zero_edges);
    let tame = tame_witness.is_none();
    let metric_like = c.is_metric_like();
    let degenerate_pair = if metric_like {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).find_map(|(a, b)| {
            let z = |x: Option<&Exponent>| x.is_some_and(Exponent::is_zero);
            (z(c.distance(a, b)) && z(c.distance(b, a))).then(|| (c.objects()[a].clone(), c.objects()[b].clone()))
        })
    } else {
        None
    };
    let nontrivial_endomorphism =
        non_id.iter().find(|&&f| c.morphism(f).source == c.morphism(f).target).map(|&f| c.morphism(f).name.clone());
    let mut skeletal = true;
    'outer: for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for &f in c.hom(a, b) {
                for &g in c.hom(b, a) {
                    if c.compose(g, f) == Some(c.identity_of(a)) && c.compose(f, g) == Some(c.identity_of(b)) {
                        skeletal = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let longest_path = if find_cycle(c, &non_id).is_none() { Some(longest_path(c, &non_id)) } else { None };
    Classification {
        objects: n,
        morphisms: c.morphisms().len(),
        truncated_at: c.horizon().cloned(),
        metric_like,
        uniform,
        epsilon,
        tame,
        tame_witness,
        quasi_tame: tame,
        degenerate_pair,
        nontrivial_endomorphism,
        skeletal,
        longest_path,
    }
}

/// A directed cycle through the given morphisms, as a list of their names.
fn find_cycle(c: &FCat, edges: &[usize]) -> Option<Vec<String>> {
    let n = c.object_count();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &f in edges {
        out[c.morphism(f).source].push(f);
    }
    // 0 unvisited, 1 on stack, 2 done
    let mut state = vec![0u8; n];
    let mut stack_edges: Vec<usize> = Vec::new();
    fn dfs(
        v: usize,
        c: &FCat,
        out: &[Vec<usize>],
        state: &mut [u8],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<String>> {
        state[v] = 1;
        for &f in &out[v] {
            let w = c.morphism(f).target;
            stack.push(f);
            if state[w] == 1 {
                let start = stack.iter().position(|&e| c.morphism(e).source == w).unwrap_or(0);
                return Some(stack[start..].iter().map(|&e| c.morphism(e).name.clone()).collect());
            }
            if state[w] == 0 {
                if let Some(cyc) = dfs(w, c, out, state, stack) {
                    return Some(cyc);
                }
            }
            stack.pop();
        }
        state[v] = 2;
        None
    }
    for v in 0..n {
        if state[v] == 0 {
            if let Some(cyc) = dfs(v, c, &out, &mut state, &mut stack_edges) {
                return Some(cyc);
            }
        }
    }
    None
}

/// Longest weighted path through acyclic edges.
fn longest_path(c: &FCat, edges: &[usize]) -> Exponent {
    let n = c.object_count();
    let mut memo: Vec<Option<Exponent>> = vec![None; n];
    fn go(v: usize, c: &FCat, edges: &[usize], memo: &mut Vec<Option<Exponent>>) -> Exponent {
        if let Some(x) = &memo[v] {
            return x.clone();
        }
        let best = edges
            .iter()
            .filter(|&&f| c.morphism(f).source == v)
            .map(|&f| &c.morphism(f).degree + &go(c.morphism(f).target, c, edges, memo))
            .max()
            .unwrap_or_else(Exponent::zero);
        memo[v] = Some(best.clone());
        best
    }
    (0..n).map(|v| go(v, c, edges, &mut memo)).max().unwrap_or_else(Exponent::zero)
}

/// `ζ^{-1}` modulo `q^{>cutoff}`.
pub fn zeta_inverse(z: &SeriesMatrix, strategy: Strategy) -> Result<SeriesMatrix, MagnitudeError> {
    let n = z.size();
    let id = SeriesMatrix::identity(z.labels.clone(), z.cutoff.clone());
    match strategy {
        Strategy::Neumann => {
            let m = id.add(&z.neg())?;
            let z0 = z.constant_matrix();
            if z0 != QMatrix::identity(n) {
                return Err(MagnitudeError::Strategy(
                    "Neumann series needs every non-identity morphism to have positive degree".into(),
                ));
            }
            let steps = match m.min_positive_exponent() {
                Some(eps) => z.cutoff.ceil_div(&eps),
                None => 0,
            };
            let mut acc = id.clone();
            let mut power = id;
            for _ in 0..steps {
                power = power.mul(&m)?;
                if power.is_zero() {
                    break;
                }
                acc = acc.add(&power)?;
            }
            Ok(acc)
        }
        Strategy::ConstantTermLu => {
            let z0 = z.constant_matrix();
            let z0_inv = z0.inverse().map_err(|w| {
                MagnitudeError::NotInvertible(w.iter().map(format_rational).collect())
            })?;
            let z0_inv = SeriesMatrix::from_rationals(z.labels.clone(), z.cutoff.clone(), &z0_inv);
            let z0s = SeriesMatrix::from_rationals(z.labels.clone(), z.cutoff.clone(), &z0);
            // ζ = Z0 (1 + N) with N = Z0^{-1}(ζ - Z0) of positive valuation
            let nmat = z0_inv.mul(&z.add(&z0s.neg())?)?;
            let neg_n = nmat.neg();
            let steps = match nmat.min_positive_exponent() {
                Some(eps) => z.cutoff.ceil_div(&eps),
                None => 0,
            };
            let mut acc = id.clone();
            let mut power = id;
            for _ in 0..steps {
                power = power.mul(&neg_n)?;
                if power.is_zero() {
                    break;
                }
                acc = acc.add(&power)?;
            }
            Ok(acc.mul(&z0_inv)?)
        }
    }
}

/// Neumann when uniform, otherwise constant-term inversion.
pub fn auto_strategy(c: &FCat) -> Strategy {
    if classify(c).uniform {
        Strategy::Neumann
    } else {
        Strategy::ConstantTermLu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Weighting,
    Coweighting,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector {
    pub labels: Vec<String>,
    pub values: Vec<NSeries>,
    pub side: Side,
    /// Common exactness bound; `None` means exact up to the cutoff.
    pub horizon: Option<Exponent>,
    /// Per-object exactness bound for truncated categories.
    pub entry_horizons: Vec<Option<Exponent>>,
}

fn entry_horizons(c: &FCat, side: Side) -> Vec<Option<Exponent>> {
    let n = c.object_count();
    let Some(r) = c.horizon() else { return vec![None; n] };
    if c.base().is_empty() {
        return vec![Some(Exponent::zero()); n];
    }
    let symmetric = (0..n).all(|a| (0..n).all(|b| c.distance(a, b) == c.distance(b, a)));
    (0..n)
        .map(|v| {
            if side == Side::Coweighting && !symmetric {
                // in-balls are not visible through an out-neighbour oracle
                return Some(Exponent::zero());
            }
            let near = c.base().iter().filter_map(|&b| c.distance(b, v)).min()?;
            Some(r.checked_sub(near).unwrap_or_else(Exponent::zero))
        })
        .collect()
}

fn weights(c: &FCat, cutoff: &Exponent, side: Side, strategy: Option<Strategy>) -> Result<WeightVector, MagnitudeError> {
    let z = zeta_matrix(c, cutoff);
    let inv = zeta_inverse(&z, strategy.unwrap_or_else(|| auto_strategy(c)))?;
    let values = match side {
        Side::Weighting => inv.row_sums()?,
        Side::Coweighting => inv.column_sums()?,
    };
    Ok(WeightVector {
        labels: c.objects().to_vec(),
        values,
        side,
        horizon: c.horizon().cloned(),
        entry_horizons: entry_horizons(c, side),
    })
}

/// `k^a = Σ_b ζ^{-1}(a, b)`.
pub fn weighting(c: &FCat, cutoff: &Exponent) -> Result<WeightVector, MagnitudeError> {
    weights(c, cutoff, Side::Weighting, None)
}

/// `k_b = Σ_a ζ^{-1}(a, b)`.
pub fn coweighting(c: &FCat, cutoff: &Exponent) -> Result<WeightVector, MagnitudeError> {
    weights(c, cutoff, Side::Coweighting, None)
}

pub fn magnitude_with(c: &FCat, cutoff: &Exponent, strategy: Strategy) -> Result<NSeries, MagnitudeError> {
    let z = zeta_matrix(c, cutoff);
    let total = zeta_inverse(&z, strategy)?.total()?;
    let class = classify(c);
    let all_constant = c.morphisms().iter().all(|m| m.degree.is_zero());
    let polynomial = c.horizon().is_none()
        && (all_constant || class.longest_path.as_ref().is_some_and(|l| l <= cutoff));
    Ok(total.with_exact(polynomial))
}

/// Sum of all entries of `ζ^{-1}`. Flagged exact when the category has
/// finitely many non-degenerate paths, all of length at most the cutoff.
pub fn magnitude(c: &FCat, cutoff: &Exponent) -> Result<NSeries, MagnitudeError> {
    magnitude_with(c, cutoff, auto_strategy(c))
}

/// `#Ob + Σ_k (-1)^k Σ q^{length}` over explicitly enumerated non-degenerate
/// paths of length at most the cutoff.
pub fn path_expansion_magnitude(c: &FCat, cutoff: &Exponent) -> Result<NSeries, MagnitudeError> {
    let class = classify(c);
    if !class.uniform {
        return Err(MagnitudeError::Strategy(
            "path expansion needs every non-identity morphism to have positive degree".into(),
        ));
    }
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); c.object_count()];
    for f in c.non_identities() {
        out_edges[c.morphism(f).source].push(f);
    }
    let mut acc = NSeries::from_terms(
        cutoff.clone(),
        [(Exponent::zero(), BigRational::from_integer(c.object_count().into()))],
    );
    let mut terms: Vec<(Exponent, BigRational)> = Vec::new();
    // explicit stack of (object, steps, length)
    let mut stack: Vec<(usize, usize, Exponent)> = (0..c.object_count()).map(|a| (a, 0, Exponent::zero())).collect();
    while let Some((v, k, len)) = stack.pop() {
        for &f in &out_edges[v] {
            let l2 = &len + &c.morphism(f).degree;
            if l2 > *cutoff {
                continue;
            }
            let sign = if (k + 1) % 2 == 0 { 1 } else { -1 };
            terms.push((l2.clone(), BigRational::from_integer(sign.into())));
            stack.push((c.morphism(f).target, k + 1, l2));
        }
    }
    acc = acc.add(&NSeries::from_terms(cutoff.clone(), terms))?;
    Ok(acc)
}

/// Möbius function of a finite poset as `ζ^{-1}` at `q = 1`, checked against
/// direct inversion of the 0/1 incidence matrix.
pub fn mobius(p: &Poset) -> Result<Vec<Vec<i64>>, MagnitudeError> {
    let c = from_finite_poset_unit(p)?;
    let cutoff = Exponent::from_int(p.len().max(1) as u64);
    let inv = zeta_inverse(&zeta_matrix(&c, &cutoff), Strategy::Neumann)?;
    let mut via_series = vec![vec![0i64; p.len()]; p.len()];
    for (i, row) in inv.entries.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            let v = s.clone().with_exact(true).eval_at_one()?;
            via_series[i][j] = v.to_integer().to_i64().expect("small Möbius value");
        }
    }
    let direct = QMatrix::from_ints(&p.zeta_01())
        .inverse()
        .map_err(|_| MagnitudeError::OracleMismatch("incidence matrix is singular".into()))?;
    let direct_int: Vec<Vec<i64>> = direct
        .data
        .iter()
        .map(|r| r.iter().map(|x| x.to_integer().to_i64().expect("small Möbius value")).collect())
        .collect();
    if direct_int != via_series {
        return Err(MagnitudeError::OracleMismatch("Möbius function via q = 1 vs matrix inverse".into()));
    }
    Ok(via_series)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poincare {
    /// `k^{0̂}` of the metrization, which equals `π(-q)`.
    pub weighting_form: NSeries,
    /// `π(q) = Σ_a μ(0̂, a) (-q)^{φ(a)}`.
    pub classical: NSeries,
}

pub fn poincare_polynomial(p: &RankedPoset) -> Result<Poincare, MagnitudeError> {
    let c = from_poset_ranked(p)?;
    let top = p.rank.iter().copied().max().unwrap_or(0);
    let cutoff = Exponent::from_int(top);
    let zero = p.minimum();
    let w = weighting(&c, &cutoff)?;
    let weighting_form = w.values[zero].clone().with_exact(true);
    let mu = mobius(&p.poset)?;
    let classical = NSeries::from_terms(
        cutoff.clone(),
        (0..p.poset.len()).map(|a| {
            let sign = if p.rank[a] % 2 == 0 { 1 } else { -1 };
            (Exponent::from_int(p.rank[a]), BigRational::from_integer((sign * mu[zero][a]).into()))
        }),
    )
    .with_exact(true);
    if classical.substitute_neg_q()? != weighting_form {
        return Err(MagnitudeError::OracleMismatch(format!(
            "π(-q) = {} but k^0 = {}",
            classical.substitute_neg_q()?,
            weighting_form
        )));
    }
    Ok(Poincare { weighting_form, classical })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Growth {
    pub growth: NSeries,
    /// Magnitude of the one-object category: the inverse growth series.
    pub magnitude: NSeries,
    /// Weighting of the Cayley graph at the identity.
    pub cayley_weighting: NSeries,
}

/// Word-length census `Σ_g q^{wl(g)}`, its inverse, and the Cayley-graph
/// weighting at the identity, which must agree with the inverse.
pub fn growth_series(g: &GroupPresentationBall, cutoff: &Exponent) -> Result<Growth, MagnitudeError> {
    let (ball, complete) = g.ball();
    let radius = Exponent::from_int(g.radius);
    if !complete && radius < *cutoff {
        return Err(MagnitudeError::Horizon { radius, cutoff: cutoff.clone() });
    }
    let growth = NSeries::from_terms(
        cutoff.clone(),
        ball.iter().map(|(_, wl)| (Exponent::from_int(*wl), BigRational::one())),
    );
    let (one, cayley) = from_group(g)?;
    let magnitude = magnitude(&one, cutoff)?;
    let inverse = growth.invert()?;
    if inverse != magnitude {
        return Err(MagnitudeError::OracleMismatch("one-object magnitude vs inverse growth series".into()));
    }
    let graph_radius = if complete { Exponent::from_int(ball.len() as u64) } else { radius };
    let graph_radius = graph_radius.max(cutoff.clone());
    let cat = from_graph(&cayley, &graph_radius)?;
    let w = weighting(&cat, cutoff)?;
    let cayley_weighting = w.values[cat.base()[0]].clone();
    if cayley_weighting != magnitude {
        return Err(MagnitudeError::OracleMismatch("Cayley weighting vs inverse growth series".into()));
    }
    Ok(Growth { growth, magnitude, cayley_weighting })
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Weighting => "weighting",
            Side::Coweighting => "coweighting",
        })
    }
}

/// Coefficients of `a` at integer exponents `0..=n`, zero-filled.
pub fn int_coefficients(a: &NSeries, n: u64) -> Vec<BigRational> {
    (0..=n).map(|k| a.coeff(&Exponent::from_int(k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcat::{FCat, GroupFamily, LocallyFiniteGraph, MetricSpace, Morphism};
    use proptest::prelude::{any, prop, prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use proptest::strategy::Strategy as _;

    fn e(k: u64) -> Exponent {
        Exponent::from_int(k)
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn complete(n: usize) -> FCat {
        let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        MetricSpace::from_edges(labels, &edges, false).to_fcat().unwrap()
    }

    fn cycle(n: usize) -> FCat {
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        MetricSpace::from_edges(labels, &edges, false).to_fcat().unwrap()
    }

    fn poly(cut: u64, c: &[i64]) -> NSeries {
        NSeries::from_int_coeffs(e(cut), c)
    }

    /// Oracle: Σ_{n=0}^{N} (1 - ζ)^n with integer-exponent dense polynomials.
    fn neumann_oracle(z: &[Vec<Vec<i64>>], cut: usize) -> Vec<Vec<Vec<i64>>> {
        let n = z.len();
        let trunc = |p: &mut Vec<i64>| p.resize(cut + 1, 0);
        let mut m = vec![vec![vec![0i64; cut + 1]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for (k, &c) in z[i][j].iter().enumerate().take(cut + 1) {
                    m[i][j][k] -= c;
                }
                if i == j {
                    m[i][j][0] += 1;
                }
                trunc(&mut m[i][j]);
            }
        }
        let mul = |a: &Vec<Vec<Vec<i64>>>, b: &Vec<Vec<Vec<i64>>>| {
            let mut out = vec![vec![vec![0i64; cut + 1]; n]; n];
            for i in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        for x in 0..=cut {
                            for y in 0..=cut - x {
                                out[i][j][x + y] += a[i][k][x] * b[k][j][y];
                            }
                        }
                    }
                }
            }
            out
        };
        let mut acc = vec![vec![vec![0i64; cut + 1]; n]; n];
        let mut pow = acc.clone();
        for i in 0..n {
            acc[i][i][0] = 1;
            pow[i][i][0] = 1;
        }
        for _ in 0..=cut {
            pow = mul(&pow, &m);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..=cut {
                        acc[i][j][k] += pow[i][j][k];
                    }
                }
            }
        }
        acc
    }

    #[test]
    fn zeta_examples() {
        let k2 = complete(2);
        let z = zeta_matrix(&k2, &e(3));
        assert_eq!(z.entries[0][1], poly(3, &[0, 1]));
        assert_eq!(z.entries[0][0], poly(3, &[1]));
        assert_eq!(zeta_matrix(&complete(1), &e(3)).entries, vec![vec![poly(3, &[1])]]);
    }

    fn z2() -> FCat {
        let m = |name: &str, id| Morphism { name: name.into(), source: 0, target: 0, degree: e(0), identity: id };
        FCat::new(
            vec!["*".into()],
            vec![m("id", true), m("g", false)],
            vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            None,
        )
        .unwrap()
    }

    #[test]
    fn k2_inverse_matches_oracle() {
        let z = zeta_matrix(&complete(2), &e(2));
        let inv = zeta_inverse(&z, Strategy::Neumann).unwrap();
        let oracle = neumann_oracle(&[vec![vec![1], vec![0, 1]], vec![vec![0, 1], vec![1]]], 2);
        assert_eq!(oracle[0][0], vec![1, 0, 1]);
        assert_eq!(oracle[0][1], vec![0, -1, 0]);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(inv.entries[i][j], poly(2, &oracle[i][j]));
            }
        }
        assert!(z.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&z).unwrap().is_identity());
        // the other strategy agrees
        assert_eq!(zeta_inverse(&z, Strategy::ConstantTermLu).unwrap(), inv);
    }

    #[test]
    fn k3_magnitude() {
        let k3 = complete(3);
        assert_eq!(magnitude(&k3, &e(2)).unwrap(), poly(2, &[3, -6, 12]));
        let one = vec![1];
        let q = vec![0, 1];
        let oracle = neumann_oracle(
            &[vec![one.clone(), q.clone(), q.clone()], vec![q.clone(), one.clone(), q.clone()], vec![q.clone(), q.clone(), one]],
            2,
        );
        let total: Vec<i64> =
            (0..3).map(|k| oracle.iter().flatten().map(|p| p[k]).sum()).collect();
        assert_eq!(total, vec![3, -6, 12]);
        assert_eq!(path_expansion_magnitude(&k3, &e(2)).unwrap(), poly(2, &[3, -6, 12]));
    }

    #[test]
    fn point_and_k2_path_expansion() {
        assert_eq!(magnitude(&complete(1), &e(4)).unwrap(), poly(4, &[1]));
        assert_eq!(path_expansion_magnitude(&complete(1), &e(4)).unwrap(), poly(4, &[1]));
        assert_eq!(path_expansion_magnitude(&complete(2), &e(2)).unwrap(), poly(2, &[2, -2, 2]));
    }

    #[test]
    fn z2_half() {
        let c = z2();
        assert_eq!(zeta_matrix(&c, &e(2)).entries[0][0], poly(2, &[2]));
        let class = classify(&c);
        assert!(!class.tame);
        assert_eq!(class.nontrivial_endomorphism.as_deref(), Some("g"));
        assert!(matches!(zeta_inverse(&zeta_matrix(&c, &e(2)), Strategy::Neumann), Err(MagnitudeError::Strategy(_))));
        let m = magnitude(&c, &e(2)).unwrap();
        assert_eq!(m.eval_at_one().unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(path_expansion_magnitude(&c, &e(2)).is_err());
    }

    #[test]
    fn classification_examples() {
        let k2 = classify(&complete(2));
        assert!(k2.uniform && k2.tame);
        assert_eq!(k2.epsilon, Some(e(1)));
        let deg = MetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![Some(e(0)), Some(e(0))], vec![Some(e(0)), Some(e(0))]],
        )
        .unwrap()
        .to_fcat()
        .unwrap();
        let d = classify(&deg);
        assert!(!d.quasi_tame);
        assert_eq!(d.degenerate_pair, Some(("a".into(), "b".into())));
        assert!(!d.skeletal);
    }

    #[test]
    fn singular_constant_term() {
        let deg = MetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![Some(e(0)), Some(e(0))], vec![Some(e(0)), Some(e(0))]],
        )
        .unwrap()
        .to_fcat()
        .unwrap();
        assert!(matches!(magnitude(&deg, &e(1)), Err(MagnitudeError::NotInvertible(_))));
    }

    fn triangle_face_poset() -> Poset {
        let names = ["a", "b", "c", "ab", "bc", "ca"].iter().map(|s| s.to_string()).collect();
        Poset::from_covers(names, &[(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5)]).unwrap()
    }

    #[test]
    fn face_poset_euler_characteristic() {
        let p = triangle_face_poset();
        let c = from_finite_poset_unit(&p).unwrap();
        let m = magnitude(&c, &e(3)).unwrap();
        // chain count oracle: 6 elements, 6 strict relations, no longer chains
        let chains1 = (0..6).flat_map(|a| (0..6).map(move |b| (a, b))).filter(|&(a, b)| p.lt(a, b)).count() as i64;
        assert_eq!(m, poly(3, &[6, -chains1]));
        assert!(m.is_exact());
        assert_eq!(m.eval_at_one().unwrap(), r(0));
    }

    #[test]
    fn integer_ball_weighting() {
        let c = from_graph(&LocallyFiniteGraph::integer_line(0), &e(4)).unwrap();
        let w = weighting(&c, &e(4)).unwrap();
        let base = c.base()[0];
        assert_eq!(w.values[base], poly(4, &[1, -2, 2, -2, 2]));
        assert_eq!(w.entry_horizons[base], Some(e(4)));
        // brute-force path oracle from 0 within the infinite line
        let mut counts = vec![0i64; 5];
        fn walk(x: i64, len: u64, k: usize, counts: &mut Vec<i64>) {
            for y in x - 4..=x + 4 {
                let d = (y - x).unsigned_abs();
                if y != x && len + d <= 4 {
                    counts[(len + d) as usize] += if (k + 1) % 2 == 0 { 1 } else { -1 };
                    walk(y, len + d, k + 1, counts);
                }
            }
        }
        counts[0] = 1;
        walk(0, 0, 0, &mut counts);
        assert_eq!(counts, vec![1, -2, 2, -2, 2]);
    }

    #[test]
    fn cycle_weighting_is_inverse_growth() {
        let c5 = cycle(5);
        let w = weighting(&c5, &e(6)).unwrap();
        let inv = poly(6, &[1, 2, 2]).invert().unwrap();
        assert!(w.values.iter().all(|v| *v == inv));
        let cw = coweighting(&c5, &e(6)).unwrap();
        let sum = |v: &[NSeries]| v.iter().try_fold(NSeries::zero(e(6)), |a, x| a.add(x)).unwrap();
        assert_eq!(sum(&w.values), sum(&cw.values));
    }

    #[test]
    fn mobius_examples() {
        let chain = Poset::from_covers(vec!["0".into(), "1".into()], &[(0, 1)]).unwrap();
        assert_eq!(mobius(&chain).unwrap()[0][1], -1);
        let b2 = Poset::from_covers(
            ["0", "x", "y", "1"].iter().map(|s| s.to_string()).collect(),
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        assert_eq!(mobius(&b2).unwrap()[0], vec![1, -1, -1, 1]);
        let anti = Poset::from_covers(vec!["a".into(), "b".into()], &[]).unwrap();
        assert_eq!(mobius(&anti).unwrap(), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn poincare_examples() {
        let pt = RankedPoset::new(Poset::from_covers(vec!["0".into()], &[]).unwrap(), vec![0]).unwrap();
        assert_eq!(poincare_polynomial(&pt).unwrap().classical, poly(0, &[1]));
        let b2 = Poset::from_covers(
            ["0", "x", "y", "1"].iter().map(|s| s.to_string()).collect(),
            &[(0, 1), (0, 2), (1, 3), (2, 3)],
        )
        .unwrap();
        let p = poincare_polynomial(&RankedPoset::new(b2, vec![0, 1, 1, 2]).unwrap()).unwrap();
        assert_eq!(p.weighting_form, poly(2, &[1, -2, 1]));
        assert_eq!(p.classical, poly(2, &[1, 2, 1]));
    }

    #[test]
    fn growth_examples() {
        let z5 = GroupPresentationBall::new(GroupFamily::Cyclic(5), vec![vec![1]], 8).unwrap();
        let g = growth_series(&z5, &e(8)).unwrap();
        assert_eq!(g.growth, poly(8, &[1, 2, 2]));
        let triv = GroupPresentationBall::new(GroupFamily::Cyclic(1), vec![], 3).unwrap();
        assert_eq!(growth_series(&triv, &e(3)).unwrap().growth, poly(3, &[1]));
        let z = GroupPresentationBall::new(GroupFamily::Free(1), vec![vec![1]], 3).unwrap();
        assert_eq!(growth_series(&z, &e(3)).unwrap().growth, poly(3, &[1, 2, 2, 2]));
        let short = GroupPresentationBall::new(GroupFamily::Free(1), vec![vec![1]], 2).unwrap();
        assert!(matches!(growth_series(&short, &e(3)), Err(MagnitudeError::Horizon { .. })));
    }

    fn arb_metric() -> impl proptest::strategy::Strategy<Value = FCat> {
        // random connected graphs on up to 5 vertices
        (2usize..6, prop::collection::vec(any::<bool>(), 10)).prop_map(|(n, bits)| {
            let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            let mut k = 0;
            for i in 0..n {
                for j in i + 2..n {
                    if bits[k % bits.len()] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            let labels = (0..n).map(|i| i.to_string()).collect();
            MetricSpace::from_edges(labels, &edges, false).to_fcat().unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn inverse_and_oracle_agree(c in arb_metric()) {
            let cut = e(4);
            let z = zeta_matrix(&c, &cut);
            let inv = zeta_inverse(&z, Strategy::Neumann).unwrap();
            prop_assert!(z.mul(&inv).unwrap().is_identity());
            prop_assert!(inv.mul(&z).unwrap().is_identity());
            prop_assert_eq!(inv.total().unwrap(), path_expansion_magnitude(&c, &cut).unwrap());
            let w = weighting(&c, &cut).unwrap();
            let cw = coweighting(&c, &cut).unwrap();
            let s = |v: &[NSeries]| v.iter().try_fold(NSeries::zero(cut.clone()), |a, x| a.add(x)).unwrap();
            prop_assert_eq!(s(&w.values), s(&cw.values));
            prop_assert!(!w.values[0].is_zero());
        }
    }
}
