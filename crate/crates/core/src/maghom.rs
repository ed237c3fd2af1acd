//! Magnitude chain complexes, integral homology, and the Euler
//! characteristic and Hochschild cross-checks.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fcat::{FCat, FCatError, Functor};
use crate::linalg::{kernel_of, smith_invariants, Echelon, QMatrix, SparseQ, ZSparse};
use crate::magnitude::{classify, magnitude, MagnitudeError};
use crate::novikov::{Exponent, SeriesError};

/// Default bound on `|Mor|^n · |Ob|²` for the Hochschild complex.
pub const DEFAULT_GUARDRAIL: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagHomError {
    #[error("object {object} is not T1: {morphism} has degree 0")]
    NotT1 { object: String, morphism: String },
    #[error("category is not tame: degree-0 cycle {}", .0.join(" "))]
    NotTame(Vec<String>),
    #[error("max_n = {given} is below the path bound {needed}")]
    Bound { needed: usize, given: usize },
    #[error("chain degree {n} needs the complex up to {}, built up to {max_n}", n + 1)]
    Cap { n: usize, max_n: usize },
    #[error("Hochschild complex has {cells} cells, above the limit {limit}")]
    Guardrail { cells: u128, limit: u128 },
    #[error("boundary squares to a nonzero map in degree {0}")]
    NonZeroSquare(usize),
    #[error("not a chain map in degree {0}")]
    NotChainMap(usize),
    #[error(transparent)]
    Category(#[from] FCatError),
    #[error(transparent)]
    Magnitude(#[from] MagnitudeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basepoints {
    Free,
    Start(usize),
    Ends(usize, usize),
}

/// A chain `(f₁, …, f_n)` starting at `start`. For `n = 0` it is the
/// object itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathGenerator {
    pub start: usize,
    pub morphisms: Vec<usize>,
}

impl PathGenerator {
    pub fn len(&self) -> usize {
        self.morphisms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.morphisms.is_empty()
    }

    pub fn end(&self, c: &FCat) -> usize {
        self.morphisms.last().map_or(self.start, |&f| c.morphism(f).target)
    }

    pub fn degree(&self, c: &FCat) -> Exponent {
        self.morphisms.iter().map(|&f| c.morphism(f).degree.clone()).sum()
    }

    pub fn label(&self, c: &FCat) -> String {
        if self.morphisms.is_empty() {
            return c.objects()[self.start].clone();
        }
        let names: Vec<&str> = self.morphisms.iter().map(|&f| c.morphism(f).name.as_str()).collect();
        format!("({})", names.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologySummary {
    pub betti: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologySummary {
    pub fn zero() -> Self {
        HomologySummary { betti: 0, torsion: Vec::new() }
    }
}

impl std::fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if self.betti > 0 {
            parts.push(if self.betti == 1 { "Z".into() } else { format!("Z^{}", self.betti) });
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Free abelian chain groups `C_0 … C_N` with boundaries `∂_n: C_n → C_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainComplexZ {
    pub labels: Vec<Vec<String>>,
    /// `boundaries[n]` is `∂_n`; `boundaries[0]` is the zero map to `0`.
    pub boundaries: Vec<ZSparse>,
}

impl ChainComplexZ {
    pub fn max_n(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.labels.get(n).map_or(0, Vec::len)
    }

    pub fn check_square_zero(&self) -> Result<(), MagHomError> {
        for n in 2..self.boundaries.len() {
            if !self.boundaries[n - 1].mul(&self.boundaries[n]).is_zero() {
                return Err(MagHomError::NonZeroSquare(n));
            }
        }
        Ok(())
    }

    /// `H_n = ker ∂_n / im ∂_{n+1}` over the integers. The top degree is not
    /// available since `∂_{N+1}` was not built.
    pub fn homology(&self, n: usize) -> Result<HomologySummary, MagHomError> {
        if n >= self.max_n() {
            return Err(MagHomError::Cap { n, max_n: self.max_n() });
        }
        let rank_out = smith_invariants(&self.boundaries[n]).len();
        let incoming = smith_invariants(&self.boundaries[n + 1]);
        Ok(HomologySummary {
            betti: self.dim(n) - rank_out - incoming.len(),
            torsion: incoming.into_iter().filter(|d| !d.is_one()).collect(),
        })
    }

    /// Rational homology in degree `n` with a chosen basis of classes.
    pub fn rational_homology(&self, n: usize) -> Result<QHomology, MagHomError> {
        if n >= self.max_n() {
            return Err(MagHomError::Cap { n, max_n: self.max_n() });
        }
        let cycles = kernel_of(&columns_q(&self.boundaries[n]));
        Ok(QHomology::new(columns_q(&self.boundaries[n + 1]), cycles))
    }
}

pub(crate) fn columns_q(m: &ZSparse) -> Vec<SparseQ> {
    m.columns.iter().map(|col| SparseQ::from_ints(col.iter().copied())).collect()
}

/// A subquotient `cycles / boundaries` over ℚ with representatives for a
/// basis of classes.
#[derive(Debug, Clone)]
pub struct QHomology {
    echelon: Echelon,
    boundaries: usize,
    pub representatives: Vec<SparseQ>,
}

impl QHomology {
    pub fn new(boundaries: Vec<SparseQ>, cycles: Vec<SparseQ>) -> Self {
        let mut echelon = Echelon::tracking();
        let mut inserted = 0;
        for b in boundaries {
            echelon.insert(b);
            inserted += 1;
        }
        let mut representatives = Vec::new();
        for z in cycles {
            if !echelon.contains(&z) {
                echelon.insert(z.clone());
                representatives.push(z);
            }
        }
        QHomology { echelon, boundaries: inserted, representatives }
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    /// Coordinates of the class of the cycle `z`.
    pub fn coordinates(&self, z: &SparseQ) -> Option<Vec<BigRational>> {
        let combo = self.echelon.express(z)?;
        // inputs after the boundaries are the representatives, in order
        Some((0..self.dim()).map(|i| combo.get(self.boundaries + i)).collect())
    }
}

/// Magnitude chain complex at one level together with its generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnitudeComplex {
    pub level: Exponent,
    pub basepoints: Basepoints,
    pub generators: Vec<Vec<PathGenerator>>,
    pub chain: ChainComplexZ,
}

impl MagnitudeComplex {
    pub fn homology(&self, n: usize) -> Result<HomologySummary, MagHomError> {
        self.chain.homology(n)
    }
}

fn check_t1(c: &FCat, a: usize) -> Result<(), MagHomError> {
    for f in c.non_identities() {
        let m = c.morphism(f);
        if (m.source == a || m.target == a) && m.degree.is_zero() {
            return Err(MagHomError::NotT1 { object: c.objects()[a].clone(), morphism: m.name.clone() });
        }
    }
    Ok(())
}

/// Chains of total degree exactly `level` with at most `max_n` steps,
/// sorted by start object and then morphism ids.
fn enumerate(c: &FCat, level: &Exponent, max_n: usize, identities: bool, bp: Basepoints) -> Vec<Vec<PathGenerator>> {
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); c.object_count()];
    for (f, m) in c.morphisms().iter().enumerate() {
        if identities || !m.identity {
            out_edges[m.source].push(f);
        }
    }
    let mut gens: Vec<Vec<PathGenerator>> = vec![Vec::new(); max_n + 1];
    let starts: Vec<usize> = match bp {
        Basepoints::Free => (0..c.object_count()).collect(),
        Basepoints::Start(a) | Basepoints::Ends(a, _) => vec![a],
    };
    let end_ok = |v: usize| match bp {
        Basepoints::Ends(_, b) => v == b,
        _ => true,
    };
    for a in starts {
        let mut stack: Vec<(usize, Vec<usize>, Exponent)> = vec![(a, Vec::new(), Exponent::zero())];
        while let Some((v, path, deg)) = stack.pop() {
            if deg == *level && end_ok(v) {
                gens[path.len()].push(PathGenerator { start: a, morphisms: path.clone() });
            }
            if path.len() == max_n {
                continue;
            }
            for &f in out_edges[v].iter().rev() {
                let d = &deg + &c.morphism(f).degree;
                if d <= *level {
                    let mut p = path.clone();
                    p.push(f);
                    stack.push((c.morphism(f).target, p, d));
                }
            }
        }
    }
    for g in &mut gens {
        g.sort();
    }
    gens
}

/// Faces `d_0 … d_n` of a generator in `FC_ℓ / FC_{<ℓ}`, with signs. Faces
/// that lower the total degree vanish; with `normalized`, so do faces whose
/// result contains an identity.
fn faces(c: &FCat, g: &PathGenerator, normalized: bool) -> Vec<(PathGenerator, i64)> {
    let n = g.len();
    let fs = &g.morphisms;
    let mut out = Vec::new();
    let sign = |i: usize| if i % 2 == 0 { 1 } else { -1 };
    if n == 0 {
        return out;
    }
    if c.morphism(fs[0]).degree.is_zero() {
        out.push((PathGenerator { start: c.morphism(fs[0]).target, morphisms: fs[1..].to_vec() }, 1));
    }
    for i in 1..n {
        let (f, h) = (fs[i - 1], fs[i]);
        let Some(comp) = c.compose(h, f) else { continue };
        if c.morphism(comp).degree != &c.morphism(f).degree + &c.morphism(h).degree {
            continue;
        }
        if normalized && c.morphism(comp).identity {
            continue;
        }
        let mut ms = fs[..i - 1].to_vec();
        ms.push(comp);
        ms.extend_from_slice(&fs[i + 1..]);
        out.push((PathGenerator { start: g.start, morphisms: ms }, sign(i)));
    }
    if c.morphism(fs[n - 1]).degree.is_zero() {
        out.push((PathGenerator { start: g.start, morphisms: fs[..n - 1].to_vec() }, sign(n)));
    }
    out
}

fn assemble(
    c: &FCat,
    level: &Exponent,
    bp: Basepoints,
    generators: Vec<Vec<PathGenerator>>,
    normalized: bool,
) -> Result<MagnitudeComplex, MagHomError> {
    let labels: Vec<Vec<String>> = generators.iter().map(|gs| gs.iter().map(|g| g.label(c)).collect()).collect();
    let mut boundaries = vec![ZSparse::zero(0, generators[0].len())];
    for n in 1..generators.len() {
        let index: HashMap<&PathGenerator, usize> = generators[n - 1].iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut m = ZSparse::zero(generators[n - 1].len(), 0);
        for g in &generators[n] {
            let col = faces(c, g, normalized).into_iter().map(|(h, s)| {
                let row = *index.get(&h).expect("faces of a T1-based chain stay in the complex");
                (row, s)
            });
            m.push_column(col.collect::<Vec<_>>());
        }
        boundaries.push(m);
    }
    let chain = ChainComplexZ { labels, boundaries };
    chain.check_square_zero()?;
    Ok(MagnitudeComplex { level: level.clone(), basepoints: bp, generators, chain })
}

fn check_basepoints(c: &FCat, bp: Basepoints) -> Result<(), MagHomError> {
    match bp {
        Basepoints::Free => Ok(()),
        Basepoints::Start(a) => check_t1(c, a),
        Basepoints::Ends(a, b) => {
            check_t1(c, a)?;
            check_t1(c, b)
        }
    }
}

/// Normalized magnitude chain complex `MC^ℓ_•` in chain degrees `0..=max_n`.
pub fn mc_complex(c: &FCat, level: &Exponent, max_n: usize, bp: Basepoints) -> Result<MagnitudeComplex, MagHomError> {
    check_basepoints(c, bp)?;
    let gens = enumerate(c, level, max_n, false, bp);
    assemble(c, level, bp, gens, true)
}

/// The complex before dividing out degenerate chains: identities allowed.
pub fn unnormalized_complex(c: &FCat, level: &Exponent, max_n: usize) -> Result<MagnitudeComplex, MagHomError> {
    let gens = enumerate(c, level, max_n, true, Basepoints::Free);
    assemble(c, level, Basepoints::Free, gens, false)
}

pub fn magnitude_homology(c: &FCat, level: &Exponent, n: usize, bp: Basepoints) -> Result<HomologySummary, MagHomError> {
    mc_complex(c, level, n + 1, bp)?.homology(n)
}

/// Longest number of steps in a non-degenerate chain of total degree at most
/// `cutoff`, and the set of total degrees that occur.
pub fn path_bound(c: &FCat, cutoff: &Exponent) -> Result<(usize, BTreeSet<Exponent>), MagHomError> {
    let class = classify(c);
    if let Some(w) = class.tame_witness {
        return Err(MagHomError::NotTame(w));
    }
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); c.object_count()];
    for f in c.non_identities() {
        out_edges[c.morphism(f).source].push(f);
    }
    let mut best = 0;
    let mut levels = BTreeSet::from([Exponent::zero()]);
    let mut stack: Vec<(usize, usize, Exponent)> = (0..c.object_count()).map(|a| (a, 0, Exponent::zero())).collect();
    while let Some((v, k, deg)) = stack.pop() {
        best = best.max(k);
        levels.insert(deg.clone());
        for &f in &out_edges[v] {
            let d = &deg + &c.morphism(f).degree;
            if d <= *cutoff {
                stack.push((c.morphism(f).target, k + 1, d));
            }
        }
    }
    Ok((best, levels))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerRow {
    pub level: Exponent,
    /// `Σ_n (-1)^n rk MH^ℓ_n`.
    pub alternating: BigInt,
    /// Coefficient of `q^ℓ` in the magnitude.
    pub magnitude: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EulerReport {
    pub bound: usize,
    pub rows: Vec<EulerRow>,
}

impl EulerReport {
    pub fn first_divergence(&self) -> Option<&EulerRow> {
        self.rows.iter().find(|r| BigRational::from_integer(r.alternating.clone()) != r.magnitude)
    }

    pub fn agree(&self) -> bool {
        self.first_divergence().is_none()
    }
}

/// Compares the magnitude coefficientwise with alternating sums of ranks of
/// magnitude homology, for every level up to `cutoff`.
pub fn euler_categorification_check(c: &FCat, cutoff: &Exponent, max_n: usize) -> Result<EulerReport, MagHomError> {
    let (bound, mut levels) = path_bound(c, cutoff)?;
    if max_n < bound {
        return Err(MagHomError::Bound { needed: bound, given: max_n });
    }
    let mag = magnitude(c, cutoff)?;
    levels.extend(mag.terms().map(|(e, _)| e.clone()));
    let mut rows = Vec::new();
    for level in levels {
        let cx = mc_complex(c, &level, max_n + 1, Basepoints::Free)?;
        let mut alt = BigInt::zero();
        for n in 0..=max_n {
            let b = BigInt::from(cx.homology(n)?.betti);
            if n % 2 == 0 {
                alt += b;
            } else {
                alt -= b;
            }
        }
        rows.push(EulerRow { magnitude: mag.coeff(&level), level, alternating: alt });
    }
    Ok(EulerReport { bound, rows })
}

/// Chain complex of `Gr_ℓ` of the Hochschild complex of the graded category
/// algebra with coefficients in `ℤ(Ob × Ob)`.
pub fn hochschild_complex(c: &FCat, level: &Exponent, max_n: usize, guardrail: u128) -> Result<ChainComplexZ, MagHomError> {
    let mors = c.morphisms().len() as u128;
    let obs = c.object_count() as u128;
    let cells = mors.checked_pow(max_n as u32).and_then(|m| m.checked_mul(obs * obs)).unwrap_or(u128::MAX);
    if cells > guardrail {
        return Err(MagHomError::Guardrail { cells, limit: guardrail });
    }
    let n_ob = c.object_count();
    // generators: (r_1 … r_n, a, b)
    type Cell = (Vec<usize>, usize, usize);
    let mut cells_by_n: Vec<Vec<Cell>> = Vec::new();
    for n in 0..=max_n {
        let mut tuples: Vec<Vec<usize>> = Vec::new();
        let mut stack: Vec<(Vec<usize>, Exponent)> = vec![(Vec::new(), Exponent::zero())];
        while let Some((t, d)) = stack.pop() {
            if t.len() == n {
                if d == *level {
                    tuples.push(t);
                }
                continue;
            }
            for f in 0..c.morphisms().len() {
                let d2 = &d + &c.morphism(f).degree;
                if d2 <= *level {
                    let mut t2 = t.clone();
                    t2.push(f);
                    stack.push((t2, d2));
                }
            }
        }
        tuples.sort();
        let mut cs = Vec::new();
        for t in tuples {
            for a in 0..n_ob {
                for b in 0..n_ob {
                    cs.push((t.clone(), a, b));
                }
            }
        }
        cells_by_n.push(cs);
    }
    let product = |f: usize, g: usize| -> Option<usize> {
        // f · g = g ∘ f when degrees add
        let h = c.compose(g, f)?;
        (c.morphism(h).degree == &c.morphism(f).degree + &c.morphism(g).degree).then_some(h)
    };
    let label = |cell: &Cell| {
        let names: Vec<&str> = cell.0.iter().map(|&f| c.morphism(f).name.as_str()).collect();
        format!("{} | ({}, {})", names.join(" ⊗ "), c.objects()[cell.1], c.objects()[cell.2])
    };
    let labels = cells_by_n.iter().map(|cs| cs.iter().map(label).collect()).collect();
    let mut boundaries = vec![ZSparse::zero(0, cells_by_n[0].len())];
    for n in 1..=max_n {
        let index: HashMap<&Cell, usize> = cells_by_n[n - 1].iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut m = ZSparse::zero(cells_by_n[n - 1].len(), 0);
        for (rs, a, b) in &cells_by_n[n] {
            let mut col: Vec<(usize, i64)> = Vec::new();
            let mut put = |cell: Cell, s: i64| col.push((index[&cell], s));
            // (a, b) · r_1 = (a, t r_1) when s r_1 = b
            let r1 = c.morphism(rs[0]);
            if r1.degree.is_zero() && r1.source == *b {
                put((rs[1..].to_vec(), *a, r1.target), 1);
            }
            for i in 1..n {
                if let Some(h) = product(rs[i - 1], rs[i]) {
                    let mut t = rs[..i - 1].to_vec();
                    t.push(h);
                    t.extend_from_slice(&rs[i + 1..]);
                    put((t, *a, *b), if i % 2 == 0 { 1 } else { -1 });
                }
            }
            // r_n · (a, b) = (s r_n, b) when t r_n = a
            let rn = c.morphism(rs[n - 1]);
            if rn.degree.is_zero() && rn.target == *a {
                put((rs[..n - 1].to_vec(), rn.source, *b), if n % 2 == 0 { 1 } else { -1 });
            }
            m.push_column(col);
        }
        boundaries.push(m);
    }
    let chain = ChainComplexZ { labels, boundaries };
    chain.check_square_zero()?;
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HochschildRow {
    pub n: usize,
    pub hochschild: HomologySummary,
    pub magnitude: HomologySummary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HochschildReport {
    pub level: Exponent,
    pub rows: Vec<HochschildRow>,
}

impl HochschildReport {
    pub fn agree(&self) -> bool {
        self.rows.iter().all(|r| r.hochschild == r.magnitude)
    }
}

/// Homology of both complexes in degrees `0..max_n`.
pub fn hochschild_graded_check(c: &FCat, level: &Exponent, max_n: usize, guardrail: u128) -> Result<HochschildReport, MagHomError> {
    let hc = hochschild_complex(c, level, max_n, guardrail)?;
    let mc = mc_complex(c, level, max_n, Basepoints::Free)?;
    let rows = (0..max_n)
        .map(|n| Ok(HochschildRow { n, hochschild: hc.homology(n)?, magnitude: mc.homology(n)? }))
        .collect::<Result<Vec<_>, MagHomError>>()?;
    Ok(HochschildReport { level: level.clone(), rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationRow {
    pub n: usize,
    pub normalized: HomologySummary,
    pub unnormalized: HomologySummary,
}

/// Homology of the normalized and un-normalized complexes side by side.
pub fn normalization_check(c: &FCat, level: &Exponent, max_n: usize) -> Result<Vec<NormalizationRow>, MagHomError> {
    let norm = mc_complex(c, level, max_n, Basepoints::Free)?;
    let full = unnormalized_complex(c, level, max_n)?;
    (0..max_n)
        .map(|n| Ok(NormalizationRow { n, normalized: norm.homology(n)?, unnormalized: full.homology(n)? }))
        .collect()
}

/// Chain map of a filtered functor on `MC^ℓ_n` and the induced map on
/// rational homology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedMap {
    pub chain: ZSparse,
    /// `dim H_n(target) × dim H_n(source)` in the chosen class bases.
    pub homology: QMatrix,
}

fn push_generator(f: &Functor, dst: &FCat, g: &PathGenerator, level: &Exponent) -> Option<PathGenerator> {
    let ms: Vec<usize> = g.morphisms.iter().map(|&m| f.morphisms[m]).collect();
    if ms.iter().any(|&m| dst.morphism(m).identity) {
        return None;
    }
    let image = PathGenerator { start: f.objects[g.start], morphisms: ms };
    (image.degree(dst) == *level).then_some(image)
}

fn chain_map(f: &Functor, src: &MagnitudeComplex, dst_c: &FCat, dst: &MagnitudeComplex, n: usize) -> ZSparse {
    let index: HashMap<&PathGenerator, usize> = dst.generators[n].iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut m = ZSparse::zero(dst.generators[n].len(), 0);
    for g in &src.generators[n] {
        let col: Vec<(usize, i64)> =
            push_generator(f, dst_c, g, &src.level).map(|h| (index[&h], 1)).into_iter().collect();
        m.push_column(col);
    }
    m
}

pub fn induced_map(f: &Functor, src: &FCat, dst: &FCat, level: &Exponent, n: usize) -> Result<InducedMap, MagHomError> {
    f.validate(src, dst)?;
    let a = mc_complex(src, level, n + 1, Basepoints::Free)?;
    let b = mc_complex(dst, level, n + 1, Basepoints::Free)?;
    let chain = chain_map(f, &a, dst, &b, n);
    if n > 0 {
        let lower = chain_map(f, &a, dst, &b, n - 1);
        if lower.mul(&a.chain.boundaries[n]) != b.chain.boundaries[n].mul(&chain) {
            return Err(MagHomError::NotChainMap(n));
        }
    }
    let upper = chain_map(f, &a, dst, &b, n + 1);
    if chain.mul(&a.chain.boundaries[n + 1]) != b.chain.boundaries[n + 1].mul(&upper) {
        return Err(MagHomError::NotChainMap(n + 1));
    }
    let ha = a.chain.rational_homology(n)?;
    let hb = b.chain.rational_homology(n)?;
    let mut homology = QMatrix::zeros(hb.dim(), ha.dim());
    for (j, z) in ha.representatives.iter().enumerate() {
        let mut image = SparseQ::new();
        for (col, x) in &z.0 {
            for &(row, v) in &chain.columns[*col] {
                image = image.axpy(&(x * BigRational::from_integer(v.into())), &SparseQ::unit(row));
            }
        }
        let coords = hb.coordinates(&image).expect("image of a cycle is a cycle");
        for (i, x) in coords.into_iter().enumerate() {
            homology.data[i][j] = x;
        }
    }
    Ok(InducedMap { chain, homology })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcat::{kolmogorov_quotient, MetricSpace, Morphism};
    use crate::magnitude::path_expansion_magnitude;
    use proptest::prelude::*;

    fn e(k: u64) -> Exponent {
        Exponent::from_int(k)
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> FCat {
        let labels = (0..n).map(|i| i.to_string()).collect();
        MetricSpace::from_edges(labels, edges, false).to_fcat().unwrap()
    }

    fn complete(n: usize) -> FCat {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        graph(n, &edges)
    }

    fn cycle(n: usize) -> FCat {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        graph(n, &edges)
    }

    fn degenerate_pair() -> FCat {
        MetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![Some(e(0)), Some(e(0))], vec![Some(e(0)), Some(e(0))]],
        )
        .unwrap()
        .to_fcat()
        .unwrap()
    }

    fn summary(betti: usize) -> HomologySummary {
        HomologySummary { betti, torsion: vec![] }
    }

    #[test]
    fn point_homology() {
        let pt = complete(1);
        assert_eq!(magnitude_homology(&pt, &e(0), 0, Basepoints::Free).unwrap(), summary(1));
        for l in 0..=3 {
            for n in 0..=3 {
                if (l, n) != (0, 0) {
                    assert_eq!(magnitude_homology(&pt, &e(l), n, Basepoints::Free).unwrap(), summary(0));
                }
            }
        }
    }

    #[test]
    fn k2_generators() {
        let cx = mc_complex(&complete(2), &e(2), 3, Basepoints::Free).unwrap();
        let sizes: Vec<usize> = cx.generators.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![0, 0, 2, 0]);
        let lab = &cx.chain.labels[2];
        assert_eq!(lab, &vec!["(0->1, 1->0)".to_string(), "(1->0, 0->1)".to_string()]);
    }

    #[test]
    fn k2_homology_diagonal() {
        let k2 = complete(2);
        for l in 0..=4u64 {
            for n in 0..=4usize {
                let want = if l as usize == n { 2 } else { 0 };
                assert_eq!(magnitude_homology(&k2, &e(l), n, Basepoints::Free).unwrap(), summary(want), "l={l} n={n}");
            }
        }
    }

    /// Oracle: enumerate chains by brute force over all object sequences of
    /// a metric space and compare counts.
    #[test]
    fn c5_generator_counts() {
        let c5 = cycle(5);
        let d = |a: usize, b: usize| {
            let k = (a as i64 - b as i64).rem_euclid(5) as u64;
            k.min(5 - k)
        };
        for l in 0..=3u64 {
            let cx = mc_complex(&c5, &e(l), 3, Basepoints::Free).unwrap();
            for n in 0..=3usize {
                let mut count = 0;
                let mut seqs: Vec<Vec<usize>> = (0..5).map(|a| vec![a]).collect();
                for _ in 0..n {
                    let mut next = Vec::new();
                    for s in &seqs {
                        for b in (0..5).filter(|&b| b != *s.last().unwrap()) {
                            next.push([s.clone(), vec![b]].concat());
                        }
                    }
                    seqs = next;
                }
                for s in &seqs {
                    if s.windows(2).map(|w| d(w[0], w[1])).sum::<u64>() == l {
                        count += 1;
                    }
                }
                assert_eq!(cx.generators[n].len(), count, "l={l} n={n}");
            }
        }
    }

    #[test]
    fn pointed_decomposition() {
        for c in [complete(3), cycle(4), cycle(5)] {
            for l in 0..=3u64 {
                for n in 0..=2usize {
                    let total = magnitude_homology(&c, &e(l), n, Basepoints::Free).unwrap();
                    let mut betti = 0;
                    let mut torsion = Vec::new();
                    for a in 0..c.object_count() {
                        let h = magnitude_homology(&c, &e(l), n, Basepoints::Start(a)).unwrap();
                        betti += h.betti;
                        torsion.extend(h.torsion);
                        let mut b2 = 0;
                        for b in 0..c.object_count() {
                            b2 += magnitude_homology(&c, &e(l), n, Basepoints::Ends(a, b)).unwrap().betti;
                        }
                        assert_eq!(b2, h.betti);
                    }
                    torsion.sort();
                    let mut t = total.torsion.clone();
                    t.sort();
                    assert_eq!((betti, torsion), (total.betti, t));
                }
            }
        }
    }

    #[test]
    fn non_t1_basepoint_rejected() {
        let err = mc_complex(&degenerate_pair(), &e(0), 2, Basepoints::Start(0)).unwrap_err();
        assert!(matches!(err, MagHomError::NotT1 { .. }));
    }

    #[test]
    fn kolmogorov_invariance() {
        let x = degenerate_pair();
        let (kq, _) = kolmogorov_quotient(&x).unwrap();
        assert_eq!(kq.object_count(), 1);
        for l in 0..=3u64 {
            for n in 0..=3usize {
                assert_eq!(
                    magnitude_homology(&x, &e(l), n, Basepoints::Free).unwrap(),
                    magnitude_homology(&kq, &e(l), n, Basepoints::Free).unwrap()
                );
            }
        }
    }

    #[test]
    fn euler_check_examples() {
        let r = euler_categorification_check(&complete(1), &e(3), 0).unwrap();
        assert!(r.agree());
        let r = euler_categorification_check(&complete(2), &e(4), 4).unwrap();
        assert!(r.agree());
        let alt: Vec<i64> = r.rows.iter().map(|x| i64::try_from(x.alternating.clone()).unwrap()).collect();
        assert_eq!(alt, vec![2, -2, 2, -2, 2]);
        assert!(euler_categorification_check(&cycle(5), &e(3), 3).unwrap().agree());
        assert!(matches!(
            euler_categorification_check(&complete(2), &e(4), 2),
            Err(MagHomError::Bound { needed: 4, given: 2 })
        ));
    }

    #[test]
    fn hochschild_examples() {
        let pt = complete(1);
        let r = hochschild_graded_check(&pt, &e(0), 1, DEFAULT_GUARDRAIL).unwrap();
        assert!(r.agree());
        assert_eq!(r.rows[0].hochschild, summary(1));
        let k2 = complete(2);
        let r = hochschild_graded_check(&k2, &e(1), 3, DEFAULT_GUARDRAIL).unwrap();
        assert!(r.agree());
        assert_eq!(r.rows[1].hochschild, summary(2));
        let r = hochschild_graded_check(&k2, &e(2), 3, DEFAULT_GUARDRAIL).unwrap();
        assert!(r.agree());
        assert_eq!(r.rows[2].magnitude, summary(2));
        assert!(matches!(
            hochschild_graded_check(&k2, &e(2), 3, 100),
            Err(MagHomError::Guardrail { cells: 256, limit: 100 })
        ));
    }

    #[test]
    fn hochschild_on_a_category_with_endomorphism() {
        // ℤ/2 in degree 0: magnitude homology is group homology of ℤ/2
        let m = |name: &str, id| Morphism { name: name.into(), source: 0, target: 0, degree: e(0), identity: id };
        let z2 = FCat::new(
            vec!["*".into()],
            vec![m("id", true), m("g", false)],
            vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            None,
        )
        .unwrap();
        let r = hochschild_graded_check(&z2, &e(0), 3, DEFAULT_GUARDRAIL).unwrap();
        assert!(r.agree());
        assert_eq!(r.rows[1].magnitude, HomologySummary { betti: 0, torsion: vec![BigInt::from(2)] });
    }

    #[test]
    fn normalization_agrees() {
        for c in [complete(2), complete(3), cycle(4)] {
            for l in 0..=2u64 {
                for row in normalization_check(&c, &e(l), 3).unwrap() {
                    assert_eq!(row.normalized, row.unnormalized);
                }
            }
        }
    }

    #[test]
    fn induced_maps() {
        let c5 = cycle(5);
        let id = Functor::identity(&c5);
        let m = induced_map(&id, &c5, &c5, &e(2), 2).unwrap();
        assert_eq!(m.homology, QMatrix::identity(m.homology.cols));
        let pt = complete(1);
        let k = Functor::from_object_map(&c5, &pt, vec![0; 5]).unwrap();
        let m = induced_map(&k, &c5, &pt, &e(1), 1).unwrap();
        assert!(m.chain.is_zero());

        let x = degenerate_pair();
        let (kq, _) = kolmogorov_quotient(&x).unwrap();
        let p = Functor::from_object_map(&x, &kq, vec![0, 0]).unwrap();
        let q = Functor::from_object_map(&kq, &x, vec![0]).unwrap();
        for n in 0..=2 {
            let pm = induced_map(&p, &x, &kq, &e(0), n).unwrap();
            let qm = induced_map(&q, &kq, &x, &e(0), n).unwrap();
            let qp = qm.homology.mul(&pm.homology);
            assert_eq!(qp, QMatrix::identity(qp.rows));
            let pq = pm.homology.mul(&qm.homology);
            assert_eq!(pq, QMatrix::identity(pq.rows));
        }
    }

    #[test]
    fn top_degree_is_capped() {
        let cx = mc_complex(&complete(2), &e(1), 1, Basepoints::Free).unwrap();
        assert!(matches!(cx.homology(1), Err(MagHomError::Cap { .. })));
    }

    fn arb_graph() -> impl Strategy<Value = FCat> {
        (2usize..5, prop::collection::vec(any::<bool>(), 6)).prop_map(|(n, bits)| {
            let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
            let mut k = 0;
            for i in 0..n {
                for j in i + 2..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            graph(n, &edges)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn euler_matches_path_expansion(c in arb_graph()) {
            let r = euler_categorification_check(&c, &e(3), 3).unwrap();
            prop_assert!(r.agree());
            let p = path_expansion_magnitude(&c, &e(3)).unwrap();
            for row in &r.rows {
                prop_assert_eq!(BigRational::from_integer(row.alternating.clone()), p.coeff(&row.level));
            }
        }
    }
}
