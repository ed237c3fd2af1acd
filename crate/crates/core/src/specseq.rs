//! The spectral sequence of the degree filtration on the nerve complex, an
//! independent path-homology computation for digraphs, and invariance of
//! pages under r-natural transformations.

use std::collections::HashMap;

use thiserror::Error;

use crate::fcat::{FCat, FCatError, Functor, MetricSpace};
use crate::linalg::{kernel_of, rank_of, QMatrix, SparseQ, ZSparse};
use crate::maghom::{columns_q, PathGenerator, QHomology};
use crate::novikov::Exponent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecSeqError {
    #[error("morphism {0} has non-integral degree")]
    NonIntegral(String),
    #[error("composite {0} ∘ {1} is missing below the filtration cap")]
    Truncated(String, String),
    #[error("r-natural transformation fails: {0}")]
    NotRNatural(String),
    #[error("edge {0} is a loop")]
    Loop(String),
    #[error(transparent)]
    Category(#[from] FCatError),
}

/// The nerve complex `FC_•` with identities, truncated to chain degree
/// `≤ max_n` and filtration degree `≤ max_l`.
#[derive(Debug, Clone)]
pub struct FilteredChainQ {
    pub max_l: u64,
    pub max_n: usize,
    pub generators: Vec<Vec<PathGenerator>>,
    pub degrees: Vec<Vec<u64>>,
    /// `boundaries[n]`: `C_n → C_{n-1}`, the full alternating face sum.
    pub boundaries: Vec<ZSparse>,
    index: Vec<HashMap<PathGenerator, usize>>,
}

fn int_degree(c: &FCat, f: usize) -> u64 {
    c.morphism(f).degree.as_u64().expect("integral degrees are checked on construction")
}

pub fn build_filtered_chain(c: &FCat, max_l: u64, max_n: usize) -> Result<FilteredChainQ, SpecSeqError> {
    for m in c.morphisms() {
        if !m.degree.is_integer() {
            return Err(SpecSeqError::NonIntegral(m.name.clone()));
        }
    }
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); c.object_count()];
    for (f, m) in c.morphisms().iter().enumerate() {
        out_edges[m.source].push(f);
    }
    let mut gens: Vec<Vec<(PathGenerator, u64)>> = vec![Vec::new(); max_n + 1];
    for a in 0..c.object_count() {
        let mut stack = vec![(a, Vec::<usize>::new(), 0u64)];
        while let Some((v, path, deg)) = stack.pop() {
            if path.len() == max_n {
                gens[max_n].push((PathGenerator { start: a, morphisms: path }, deg));
                continue;
            }
            for &f in &out_edges[v] {
                let d = deg + int_degree(c, f);
                if d <= max_l {
                    let mut p = path.clone();
                    p.push(f);
                    stack.push((c.morphism(f).target, p, d));
                }
            }
            gens[path.len()].push((PathGenerator { start: a, morphisms: path }, deg));
        }
    }
    for g in &mut gens {
        g.sort();
    }
    let generators: Vec<Vec<PathGenerator>> = gens.iter().map(|g| g.iter().map(|x| x.0.clone()).collect()).collect();
    let degrees = gens.iter().map(|g| g.iter().map(|x| x.1).collect()).collect();
    let index: Vec<HashMap<PathGenerator, usize>> =
        generators.iter().map(|gs| gs.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect()).collect();
    let mut boundaries = vec![ZSparse::zero(0, generators[0].len())];
    for n in 1..=max_n {
        let mut m = ZSparse::zero(generators[n - 1].len(), 0);
        for g in &generators[n] {
            let mut col = Vec::new();
            for (h, s) in nerve_faces(c, g)? {
                col.push((index[n - 1][&h], s));
            }
            m.push_column(col);
        }
        boundaries.push(m);
    }
    Ok(FilteredChainQ { max_l, max_n, generators, degrees, boundaries, index })
}

fn nerve_faces(c: &FCat, g: &PathGenerator) -> Result<Vec<(PathGenerator, i64)>, SpecSeqError> {
    let fs = &g.morphisms;
    let n = fs.len();
    let sign = |i: usize| if i % 2 == 0 { 1 } else { -1 };
    let mut out = vec![(PathGenerator { start: c.morphism(fs[0]).target, morphisms: fs[1..].to_vec() }, 1)];
    for i in 1..n {
        let comp = c.compose(fs[i], fs[i - 1]).ok_or_else(|| {
            SpecSeqError::Truncated(c.morphism(fs[i]).name.clone(), c.morphism(fs[i - 1]).name.clone())
        })?;
        let mut ms = fs[..i - 1].to_vec();
        ms.push(comp);
        ms.extend_from_slice(&fs[i + 1..]);
        out.push((PathGenerator { start: g.start, morphisms: ms }, sign(i)));
    }
    out.push((PathGenerator { start: g.start, morphisms: fs[..n - 1].to_vec() }, sign(n)));
    Ok(out)
}

impl FilteredChainQ {
    fn dim(&self, n: usize) -> usize {
        self.generators.get(n).map_or(0, Vec::len)
    }

    /// `{x ∈ F_p C_n : ∂x ∈ F_{p-s} C_{n-1}}` as vectors in `C_n`.
    fn z_space(&self, n: usize, p: i64, s: i64) -> Vec<SparseQ> {
        let cols: Vec<usize> = (0..self.dim(n)).filter(|&i| (self.degrees[n][i] as i64) <= p).collect();
        if n == 0 {
            return cols.into_iter().map(SparseQ::unit).collect();
        }
        let low = &self.degrees[n - 1];
        let images: Vec<SparseQ> = cols
            .iter()
            .map(|&j| {
                SparseQ::from_ints(self.boundaries[n].columns[j].iter().copied())
                    .restrict(|r| low[r] as i64 > p - s)
            })
            .collect();
        kernel_of(&images)
            .into_iter()
            .map(|k| SparseQ(k.0.into_iter().map(|(i, x)| (cols[i], x)).collect()))
            .collect()
    }

    fn apply_boundary(&self, n: usize, v: &SparseQ) -> SparseQ {
        let mut out = SparseQ::new();
        for (j, x) in &v.0 {
            out = out.axpy(x, &SparseQ::from_ints(self.boundaries[n].columns[*j].iter().copied()));
        }
        out
    }

    /// Whether `E^r_{p,q}` depends on chains beyond the caps.
    pub fn cap_limited(&self, r: u64, p: i64, q: i64) -> bool {
        let n = p + q;
        n < 0 || p < 0 || n as usize + 1 > self.max_n || p as u64 > self.max_l || (p + r as i64 - 1) > self.max_l as i64
    }

    /// `E^r_{p,q} = Z^r_p / (Z^{r-1}_{p-1} + ∂ Z^{r-1}_{p+r-1})` in chain
    /// degree `p + q`, with a basis of classes.
    fn presentation(&self, r: u64, p: i64, q: i64) -> QHomology {
        let n = (p + q) as usize;
        let r = r as i64;
        let z = self.z_space(n, p, r);
        let mut denominators = self.z_space(n, p - 1, r - 1);
        if n < self.max_n {
            for y in self.z_space(n + 1, p + r - 1, r - 1) {
                denominators.push(self.apply_boundary(n + 1, &y));
            }
        }
        QHomology::new(denominators, z)
    }

    pub fn page(&self, r: u64, p: i64, q: i64) -> PageEntry {
        let cap_limited = self.cap_limited(r, p, q);
        let dim = if p < 0 || p + q < 0 || (p + q) as usize > self.max_n {
            0
        } else {
            self.presentation(r, p, q).dim()
        };
        PageEntry { r, p, q, dim, cap_limited }
    }

    /// Chain map of a functor on the nerve, as a matrix `C_n(src) → C_n(dst)`.
    fn push(&self, f: &Functor, dst: &FilteredChainQ, n: usize) -> Vec<SparseQ> {
        self.generators[n]
            .iter()
            .map(|g| {
                let image = PathGenerator {
                    start: f.objects[g.start],
                    morphisms: g.morphisms.iter().map(|&m| f.morphisms[m]).collect(),
                };
                SparseQ::unit(dst.index[n][&image])
            })
            .collect()
    }

    /// Matrix of the map induced by `f` from `E^r_{p,q}` of this complex to
    /// that of `dst`.
    pub fn induced(&self, f: &Functor, dst: &FilteredChainQ, r: u64, p: i64, q: i64) -> QMatrix {
        let src = self.presentation(r, p, q);
        let tgt = dst.presentation(r, p, q);
        let chain = self.push(f, dst, (p + q) as usize);
        let mut m = QMatrix::zeros(tgt.dim(), src.dim());
        for (j, z) in src.representatives.iter().enumerate() {
            let mut image = SparseQ::new();
            for (i, x) in &z.0 {
                image = image.axpy(x, &chain[*i]);
            }
            let coords = tgt.coordinates(&image).expect("filtered chain maps preserve Z^r");
            for (i, x) in coords.into_iter().enumerate() {
                m.data[i][j] = x;
            }
        }
        m
    }

    /// Betti number of the truncated complex itself, ignoring the filtration.
    pub fn total_betti(&self, n: usize) -> Option<usize> {
        if n >= self.max_n {
            return None;
        }
        let out = rank_of(&columns_q(&self.boundaries[n]));
        let inc = rank_of(&columns_q(&self.boundaries[n + 1]));
        Some(self.dim(n) - out - inc)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageEntry {
    pub r: u64,
    pub p: i64,
    pub q: i64,
    pub dim: usize,
    /// Set when the entry needs chains beyond the caps and is only a bound.
    pub cap_limited: bool,
}

/// A finite digraph without loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(vertices: Vec<String>, mut edges: Vec<(usize, usize)>) -> Result<Self, SpecSeqError> {
        edges.sort();
        edges.dedup();
        if let Some(&(a, _)) = edges.iter().find(|(a, b)| a == b) {
            return Err(SpecSeqError::Loop(vertices[a].clone()));
        }
        Ok(Digraph { vertices, edges })
    }

    /// The directed shortest-path metric as a category.
    pub fn to_fcat(&self) -> Result<FCat, SpecSeqError> {
        Ok(MetricSpace::from_edges(self.vertices.clone(), &self.edges, true).to_fcat()?)
    }
}

/// Rational homology of the GLMY path complex `Ω_•`, reduced in degree 0.
pub fn path_homology(d: &Digraph, max_p: usize) -> Vec<usize> {
    let n = d.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &d.edges {
        adj[a].push(b);
    }
    // allowed elementary paths by length
    let mut allowed: Vec<Vec<Vec<usize>>> = vec![(0..n).map(|v| vec![v]).collect()];
    for p in 1..=max_p + 1 {
        let next = allowed[p - 1]
            .iter()
            .flat_map(|path| adj[*path.last().unwrap()].iter().map(move |&w| [path.as_slice(), &[w]].concat()))
            .collect();
        allowed.push(next);
    }
    let index: Vec<HashMap<Vec<usize>, usize>> =
        allowed.iter().map(|a| a.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect()).collect();
    // ∂ of an allowed path: allowed faces by index, non-allowed regular faces
    // by a separate table
    let boundary = |p: usize, path: &[usize], extra: &mut HashMap<Vec<usize>, usize>| -> (SparseQ, SparseQ) {
        let mut inside = Vec::new();
        let mut outside = Vec::new();
        for i in 0..path.len() {
            let face: Vec<usize> = path.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect();
            if face.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            let s = if i % 2 == 0 { 1 } else { -1 };
            match index[p - 1].get(&face) {
                Some(&k) => inside.push((k, s)),
                None => {
                    let next = extra.len();
                    let k = *extra.entry(face).or_insert(next);
                    outside.push((k, s));
                }
            }
        }
        (SparseQ::from_ints(inside), SparseQ::from_ints(outside))
    };
    // Ω_p as coordinates in A_p, and ∂ restricted to it
    let mut omega: Vec<Vec<SparseQ>> = vec![(0..n).map(SparseQ::unit).collect()];
    let mut d_omega: Vec<Vec<SparseQ>> = vec![Vec::new()];
    for p in 1..=max_p + 1 {
        let mut extra = HashMap::new();
        let faces: Vec<(SparseQ, SparseQ)> = allowed[p].iter().map(|path| boundary(p, path, &mut extra)).collect();
        let outside: Vec<SparseQ> = faces.iter().map(|f| f.1.clone()).collect();
        let basis = kernel_of(&outside);
        let images = basis
            .iter()
            .map(|v| v.0.iter().fold(SparseQ::new(), |acc, (j, x)| acc.axpy(x, &faces[*j].0)))
            .collect();
        omega.push(basis);
        d_omega.push(images);
    }
    (0..=max_p)
        .map(|p| {
            let out = rank_of(&d_omega[p]);
            let inc = rank_of(&d_omega[p + 1]);
            let betti = omega[p].len() - out - inc;
            if p == 0 {
                betti.saturating_sub(1)
            } else {
                betti
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E2Row {
    pub p: usize,
    pub e2: PageEntry,
    /// Reduced path homology, or unreduced `H_0` at `p = 0`, which is what
    /// `E²_{0,0}` counts.
    pub oracle: usize,
}

impl E2Row {
    pub fn agree(&self) -> bool {
        self.e2.cap_limited || self.e2.dim == self.oracle
    }
}

pub fn e2_vs_path_homology(d: &Digraph, max_p: usize, max_l: u64, max_n: usize) -> Result<Vec<E2Row>, SpecSeqError> {
    let fc = build_filtered_chain(&d.to_fcat()?, max_l, max_n)?;
    let oracle = path_homology(d, max_p);
    Ok((0..=max_p)
        .map(|p| {
            let extra = usize::from(p == 0 && !d.vertices.is_empty());
            E2Row { p, e2: fc.page(2, p as i64, 0), oracle: oracle[p] + extra }
        })
        .collect())
}

/// Components `τ_a: Fa → Ga` of a functor `C × I_r → D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RNatural {
    pub r: Exponent,
    pub components: Vec<usize>,
}

impl RNatural {
    /// Checks endpoints, `deg τ_a ≤ r`, and that for every `f: a → b` the
    /// two composites `τ_b ∘ Ff` and `Gf ∘ τ_a` exist, agree, and have degree
    /// at most `deg f + r`.
    pub fn validate(&self, c: &FCat, d: &FCat, f: &Functor, g: &Functor) -> Result<(), SpecSeqError> {
        let fail = |s: String| Err(SpecSeqError::NotRNatural(s));
        f.validate(c, d)?;
        g.validate(c, d)?;
        if self.components.len() != c.object_count() {
            return fail("one component per object is required".into());
        }
        for a in 0..c.object_count() {
            let t = d.morphism(self.components[a]);
            if t.source != f.objects[a] || t.target != g.objects[a] {
                return fail(format!("component at {} has the wrong endpoints", c.objects()[a]));
            }
            if t.degree > self.r {
                return fail(format!("component at {} has degree above r", c.objects()[a]));
            }
        }
        for (i, m) in c.morphisms().iter().enumerate() {
            let top = d.compose(self.components[m.target], f.morphisms[i]);
            let bottom = d.compose(g.morphisms[i], self.components[m.source]);
            match (top, bottom) {
                (Some(x), Some(y)) if x == y => {
                    if d.morphism(x).degree > &m.degree + &self.r {
                        return fail(format!("square at {} raises degree", m.name));
                    }
                }
                _ => return fail(format!("square at {} does not commute", m.name)),
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyRow {
    pub p: i64,
    pub q: i64,
    pub dim_source: usize,
    pub dim_target: usize,
    pub equal: bool,
}

/// Compares the maps induced by `f` and `g` on every `E^{r+1}_{p,q}` inside
/// the caps. The degree `r` must be an integer.
pub fn r_homotopy_invariance_check(
    c: &FCat,
    d: &FCat,
    f: &Functor,
    g: &Functor,
    tau: &RNatural,
    max_l: u64,
    max_n: usize,
) -> Result<Vec<HomotopyRow>, SpecSeqError> {
    tau.validate(c, d, f, g)?;
    let r = tau.r.as_u64().ok_or_else(|| SpecSeqError::NonIntegral(format!("r = {}", tau.r)))?;
    let fc = build_filtered_chain(c, max_l, max_n)?;
    let fd = build_filtered_chain(d, max_l, max_n)?;
    let mut rows = Vec::new();
    for n in 0..max_n as i64 {
        for p in 0..=max_l as i64 {
            let q = n - p;
            if fc.cap_limited(r + 1, p, q) || fd.cap_limited(r + 1, p, q) {
                continue;
            }
            let mf = fc.induced(f, &fd, r + 1, p, q);
            let mg = fc.induced(g, &fd, r + 1, p, q);
            rows.push(HomotopyRow { p, q, dim_source: mf.cols, dim_target: mf.rows, equal: mf == mg });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maghom::{magnitude_homology, Basepoints};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn k2() -> FCat {
        MetricSpace::from_edges(labels(2), &[(0, 1)], false).to_fcat().unwrap()
    }

    fn diamond() -> Digraph {
        Digraph::new(
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect(),
            vec![(0, 1), (1, 3), (0, 2), (2, 3)],
        )
        .unwrap()
    }

    fn directed_cycle(n: usize) -> Digraph {
        Digraph::new(labels(n), (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap()
    }

    #[test]
    fn point_nerve() {
        let pt = MetricSpace::from_edges(labels(1), &[], false).to_fcat().unwrap();
        let fc = build_filtered_chain(&pt, 0, 2).unwrap();
        assert_eq!(fc.generators.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 1, 1]);
        assert_eq!(fc.page(1, 0, 0).dim, 1);
        assert_eq!(fc.page(1, 0, 1).dim, 0);
    }

    #[test]
    fn square_zero_and_filtration() {
        let fc = build_filtered_chain(&diamond().to_fcat().unwrap(), 4, 4).unwrap();
        for n in 2..=4 {
            assert!(fc.boundaries[n - 1].mul(&fc.boundaries[n]).is_zero());
        }
        for n in 1..=4 {
            for (j, col) in fc.boundaries[n].columns.iter().enumerate() {
                for &(i, _) in col {
                    assert!(fc.degrees[n - 1][i] <= fc.degrees[n][j]);
                }
            }
        }
    }

    #[test]
    fn e0_counts_exact_degree_tuples() {
        let fc = build_filtered_chain(&k2(), 3, 3).unwrap();
        for p in 0..=2i64 {
            for q in 0..=(2 - p) {
                let n = (p + q) as usize;
                let count = fc.degrees[n].iter().filter(|&&d| d as i64 == p).count();
                assert_eq!(fc.page(0, p, q).dim, count);
            }
        }
    }

    #[test]
    fn e1_is_magnitude_homology() {
        for c in [k2(), diamond().to_fcat().unwrap()] {
            let fc = build_filtered_chain(&c, 5, 5).unwrap();
            for p in 0..=3i64 {
                for q in -p..=(4 - p) {
                    let entry = fc.page(1, p, q);
                    assert!(!entry.cap_limited);
                    let mh = magnitude_homology(&c, &Exponent::from_int(p as u64), (p + q) as usize, Basepoints::Free).unwrap();
                    assert_eq!(entry.dim, mh.betti, "p={p} q={q}");
                }
            }
        }
    }

    #[test]
    fn path_homology_examples() {
        let single = Digraph::new(labels(1), vec![]).unwrap();
        assert_eq!(path_homology(&single, 2), vec![0, 0, 0]);
        assert_eq!(path_homology(&diamond(), 2), vec![0, 0, 0]);
        assert_eq!(path_homology(&directed_cycle(5), 2), vec![0, 1, 0]);
        // a directed square with one diagonal-free orientation a→b→c, a→d→c
        // is the diamond again; two disjoint edges give two components
        let two = Digraph::new(labels(4), vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(path_homology(&two, 1), vec![1, 0]);
        assert!(Digraph::new(labels(1), vec![(0, 0)]).is_err());
    }

    #[test]
    fn e2_matches_path_homology() {
        for d in [Digraph::new(labels(1), vec![]).unwrap(), diamond(), directed_cycle(5)] {
            for row in e2_vs_path_homology(&d, 2, 5, 5).unwrap() {
                assert!(!row.e2.cap_limited);
                assert!(row.agree(), "{row:?}");
            }
        }
        let rows = e2_vs_path_homology(&directed_cycle(5), 2, 5, 5).unwrap();
        assert_eq!(rows[1].e2.dim, 1);
    }

    #[test]
    fn pages_shrink_and_stabilize() {
        let fc = build_filtered_chain(&k2(), 6, 4).unwrap();
        for n in 0..3i64 {
            let mut total = 0;
            for p in 0..=n {
                let mut last = usize::MAX;
                for r in 0..=4 {
                    let e = fc.page(r, p, n - p);
                    assert!(e.dim <= last);
                    last = e.dim;
                }
                assert_eq!(fc.page(5, p, n - p).dim, last);
                total += last;
            }
            assert_eq!(Some(total), fc.total_betti(n as usize));
        }
    }

    #[test]
    fn cap_flags() {
        let fc = build_filtered_chain(&k2(), 3, 3).unwrap();
        assert!(fc.page(1, 1, 2).cap_limited);
        assert!(fc.page(2, 3, -1).cap_limited);
        assert!(!fc.page(1, 1, 0).cap_limited);
    }

    #[test]
    fn non_integral_rejected() {
        let c = MetricSpace::new(
            labels(2),
            vec![
                vec![Some(Exponent::zero()), Some(Exponent::new(1, 2).unwrap())],
                vec![Some(Exponent::new(1, 2).unwrap()), Some(Exponent::zero())],
            ],
        )
        .unwrap()
        .to_fcat()
        .unwrap();
        assert!(matches!(build_filtered_chain(&c, 2, 2), Err(SpecSeqError::NonIntegral(_))));
    }

    #[test]
    fn identity_homotopy() {
        let c = diamond().to_fcat().unwrap();
        let id = Functor::identity(&c);
        let tau = RNatural { r: Exponent::zero(), components: (0..4).map(|a| c.identity_of(a)).collect() };
        let rows = r_homotopy_invariance_check(&c, &c, &id, &id, &tau, 4, 4).unwrap();
        assert!(!rows.is_empty() && rows.iter().all(|r| r.equal));
    }

    #[test]
    fn one_step_digraph_homotopy() {
        let c = diamond().to_fcat().unwrap();
        let edge = Digraph::new(vec!["x".into(), "y".into()], vec![(0, 1)]).unwrap().to_fcat().unwrap();
        let f = Functor::from_object_map(&c, &edge, vec![0, 0, 0, 1]).unwrap();
        let g = Functor::from_object_map(&c, &edge, vec![0, 1, 1, 1]).unwrap();
        let comps = (0..4).map(|a| edge.hom(f.objects[a], g.objects[a])[0]).collect();
        let tau = RNatural { r: Exponent::from_int(1), components: comps };
        let rows = r_homotopy_invariance_check(&c, &edge, &f, &g, &tau, 5, 5).unwrap();
        assert!(rows.iter().all(|r| r.equal));
        assert!(rows.iter().any(|r| r.dim_source > 0));
    }

    #[test]
    fn close_maps_on_a_path() {
        let p3 = MetricSpace::from_edges(labels(3), &[(0, 1), (1, 2)], false).to_fcat().unwrap();
        let id = Functor::identity(&p3);
        let shift = Functor::from_object_map(&p3, &p3, vec![1, 2, 2]).unwrap();
        let comps = (0..3).map(|a| p3.hom(a, shift.objects[a])[0]).collect();
        let tau = RNatural { r: Exponent::from_int(1), components: comps };
        let rows = r_homotopy_invariance_check(&p3, &p3, &id, &shift, &tau, 4, 4).unwrap();
        assert!(rows.iter().all(|r| r.equal));
        // at r = 0 the same components are rejected
        let bad = RNatural { r: Exponent::zero(), ..tau };
        assert!(matches!(bad.validate(&p3, &p3, &id, &shift), Err(SpecSeqError::NotRNatural(_))));
    }
}
