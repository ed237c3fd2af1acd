//! Metric actions and normal oplax functors, their Grothendieck
//! constructions, metric fibrations, and the product formula for magnitude.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::fcat::{FCat, FCatError, Functor, MetricSpace, Morphism};
use crate::magnitude::{magnitude, weighting, MagnitudeError};
use crate::novikov::{Exponent, NSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FibrationError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("transport {from} -> {to} is not an isometric bijection")]
    NotIsometry { from: String, to: String },
    #[error("transports between {0} and {1} are not mutually inverse")]
    NotInverse(String, String),
    #[error("oplax defect too large over {x} -> {y} -> {z} at point {point}")]
    Oplax { x: String, y: String, z: String, point: String },
    #[error("normal oplax functor: {0}")]
    Raw(String),
    #[error("projection is not 1-Lipschitz: {0}, {1}")]
    NotLipschitz(String, String),
    #[error("projection misses {0}")]
    NotSurjective(String),
    #[error("fiber over {0} is not isometric to the first fiber")]
    FibersDiffer(String),
    #[error("fiber over {0} has a different magnitude from the first fiber")]
    FiberMagnitudes(String),
    #[error(transparent)]
    Category(#[from] FCatError),
    #[error(transparent)]
    Magnitude(#[from] MagnitudeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn add(a: &Option<Exponent>, b: &Option<Exponent>) -> Option<Exponent> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

fn is_isometric_bijection(src: &MetricSpace, dst: &MetricSpace, map: &[usize]) -> bool {
    if map.len() != src.len() || src.len() != dst.len() || map.iter().any(|&i| i >= dst.len()) {
        return false;
    }
    let mut hit = vec![false; dst.len()];
    for &i in map {
        if std::mem::replace(&mut hit[i], true) {
            return false;
        }
    }
    (0..src.len()).all(|a| (0..src.len()).all(|b| src.d[a][b] == dst.d[map[a]][map[b]]))
}

/// A base metric space, a fiber over each point, and an isometric transport
/// `F(x, x')` for every ordered pair. Diagonal transports are identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricAction {
    pub base: MetricSpace,
    pub fibers: Vec<MetricSpace>,
    pub transport: Vec<Vec<Vec<usize>>>,
}

impl MetricAction {
    pub fn new(base: MetricSpace, fibers: Vec<MetricSpace>, transport: Vec<Vec<Vec<usize>>>) -> Result<Self, FibrationError> {
        let a = MetricAction { base, fibers, transport };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<(), FibrationError> {
        let n = self.base.len();
        let name = |x: usize| self.base.labels[x].clone();
        if self.fibers.len() != n || self.transport.len() != n || self.transport.iter().any(|r| r.len() != n) {
            return Err(FibrationError::Shape("one fiber and one transport row per base point".into()));
        }
        for x in 0..n {
            for y in 0..n {
                if self.base.d[x][y].is_none() {
                    return Err(FibrationError::Shape(format!("base distance {} -> {} is infinite", name(x), name(y))));
                }
                let t = &self.transport[x][y];
                let ok = if x == y {
                    t.iter().copied().eq(0..self.fibers[x].len())
                } else {
                    is_isometric_bijection(&self.fibers[x], &self.fibers[y], t)
                };
                if !ok {
                    return Err(FibrationError::NotIsometry { from: name(x), to: name(y) });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if (0..self.fibers[x].len()).any(|a| self.transport[y][x][self.transport[x][y][a]] != a) {
                    return Err(FibrationError::NotInverse(name(x), name(y)));
                }
            }
        }
        // deg τ_{f,g}a = d(F(x,z)a, F(y,z)F(x,y)a) ≤ d(x,y) + d(y,z) - d(x,z)
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let defect = self.base.d[x][y].as_ref().unwrap() + self.base.d[y][z].as_ref().unwrap();
                    let defect = defect.checked_sub(self.base.d[x][z].as_ref().unwrap()).ok_or_else(|| {
                        FibrationError::Shape(format!("base triangle inequality fails at {}", name(y)))
                    })?;
                    for a in 0..self.fibers[x].len() {
                        let direct = self.transport[x][z][a];
                        let via = self.transport[y][z][self.transport[x][y][a]];
                        if !matches!(&self.fibers[z].d[direct][via], Some(e) if *e <= defect) {
                            return Err(FibrationError::Oplax {
                                x: name(x),
                                y: name(y),
                                z: name(z),
                                point: self.fibers[x].labels[a].clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The same data as a normal oplax functor between categories.
    pub fn to_oplax(&self) -> Result<OplaxFunctor, FibrationError> {
        let base = self.base.to_fcat()?;
        let fibers = self.fibers.iter().map(MetricSpace::to_fcat).collect::<Result<Vec<_>, _>>()?;
        let mut maps = Vec::new();
        for m in base.morphisms() {
            let objects = self.transport[m.source][m.target].clone();
            maps.push(Functor::from_object_map(&fibers[m.source], &fibers[m.target], objects)?);
        }
        let mut tau = HashMap::new();
        for (g, f, _) in base.composition_table() {
            let (x, z) = (base.morphism(f).source, base.morphism(g).target);
            let h = base.hom(x, z)[0];
            let comps = (0..self.fibers[x].len())
                .map(|a| fibers[z].hom(maps[h].objects[a], maps[g].objects[maps[f].objects[a]])[0])
                .collect();
            tau.insert((f, g), comps);
        }
        let raw = OplaxFunctor { base, fibers, maps, tau };
        raw.validate()?;
        Ok(raw)
    }
}

/// `E(F)` of a metric action as a metric space together with its projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalSpace {
    pub space: MetricSpace,
    /// `(x, a)` for each point.
    pub points: Vec<(usize, usize)>,
    pub projection: Vec<usize>,
}

/// `d((x,a),(x',b)) = d(x,x') + d(F(x,x')a, b)`.
pub fn grothendieck(action: &MetricAction) -> Result<TotalSpace, FibrationError> {
    action.validate()?;
    let points: Vec<(usize, usize)> =
        (0..action.base.len()).flat_map(|x| (0..action.fibers[x].len()).map(move |a| (x, a))).collect();
    let labels = points
        .iter()
        .map(|&(x, a)| format!("({},{})", action.base.labels[x], action.fibers[x].labels[a]))
        .collect();
    let d = points
        .iter()
        .map(|&(x, a)| {
            points
                .iter()
                .map(|&(y, b)| add(&action.base.d[x][y], &action.fibers[y].d[action.transport[x][y][a]][b]))
                .collect()
        })
        .collect();
    let space = MetricSpace::new(labels, d)?;
    let projection = points.iter().map(|p| p.0).collect();
    Ok(TotalSpace { space, points, projection })
}

/// A normal oplax functor `X → Fsetcat` given by fiber categories, a functor
/// per base morphism, and components `τ_{f,g}a: F(g∘f)a → Fg Ff a`. Missing
/// components are identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OplaxFunctor {
    pub base: FCat,
    pub fibers: Vec<FCat>,
    pub maps: Vec<Functor>,
    pub tau: HashMap<(usize, usize), Vec<usize>>,
}

impl OplaxFunctor {
    fn tau_at(&self, f: usize, g: usize, a: usize) -> usize {
        match self.tau.get(&(f, g)) {
            Some(v) => v[a],
            None => {
                let h = self.base.compose(g, f).expect("composable");
                let z = self.base.morphism(g).target;
                self.fibers[z].identity_of(self.maps[h].objects[a])
            }
        }
    }

    pub fn validate(&self) -> Result<(), FibrationError> {
        let bad = |s: String| Err(FibrationError::Raw(s));
        let b = &self.base;
        if self.fibers.len() != b.object_count() || self.maps.len() != b.morphisms().len() {
            return bad("one fiber per object and one functor per morphism".into());
        }
        if b.horizon().is_some() {
            return bad("the base must not be truncated".into());
        }
        for (i, m) in b.morphisms().iter().enumerate() {
            self.maps[i].validate(&self.fibers[m.source], &self.fibers[m.target])?;
            if m.identity && self.maps[i] != Functor::identity(&self.fibers[m.source]) {
                return bad(format!("F({}) is not the identity", m.name));
            }
        }
        for (&(f, g), comps) in &self.tau {
            if f >= b.morphisms().len() || g >= b.morphisms().len() || b.compose(g, f).is_none() {
                return bad("τ given for a non-composable pair".into());
            }
            if comps.len() != self.fibers[b.morphism(f).source].object_count() {
                return bad(format!("τ({}, {}) has the wrong length", b.morphism(f).name, b.morphism(g).name));
            }
        }
        for (g, f, h) in b.composition_table() {
            let (x, z) = (b.morphism(f).source, b.morphism(g).target);
            let (fx, fz) = (&self.fibers[x], &self.fibers[z]);
            let label = format!("τ({}, {})", b.morphism(f).name, b.morphism(g).name);
            let bound = (&b.morphism(f).degree + &b.morphism(g).degree)
                .checked_sub(&b.morphism(h).degree)
                .ok_or_else(|| FibrationError::Raw(format!("base violates the filtered law at {label}")))?;
            let trivial = b.morphism(f).identity || b.morphism(g).identity;
            for a in 0..fx.object_count() {
                let t = self.tau_at(f, g, a);
                if t >= fz.morphisms().len() {
                    return bad(format!("{label} is out of range"));
                }
                let tm = fz.morphism(t);
                if tm.source != self.maps[h].objects[a] || tm.target != self.maps[g].objects[self.maps[f].objects[a]] {
                    return bad(format!("{label} at {} has the wrong endpoints", fx.objects()[a]));
                }
                if trivial && !tm.identity {
                    return bad(format!("{label} must be an identity"));
                }
                if tm.degree > bound {
                    return bad(format!("{label} at {} has degree above the triangle defect", fx.objects()[a]));
                }
            }
            for (i, xi) in fx.morphisms().iter().enumerate() {
                let left = fz.compose(self.maps[g].morphisms[self.maps[f].morphisms[i]], self.tau_at(f, g, xi.source));
                let right = fz.compose(self.tau_at(f, g, xi.target), self.maps[h].morphisms[i]);
                if left.is_none() || left != right {
                    return bad(format!("{label} is not natural at {}", xi.name));
                }
            }
        }
        let table = b.composition_table();
        for &(g, f, gf) in &table {
            for &(h, g2, hg) in &table {
                if g2 != g {
                    continue;
                }
                let hgf = b.compose(h, gf).expect("composable");
                let w = b.morphism(h).target;
                let fw = &self.fibers[w];
                for a in 0..self.fibers[b.morphism(f).source].object_count() {
                    let left = fw.compose(self.maps[h].morphisms[self.tau_at(f, g, a)], self.tau_at(gf, h, a));
                    let right = fw.compose(self.tau_at(g, h, self.maps[f].objects[a]), self.tau_at(f, hg, a));
                    if left.is_none() || left != right {
                        return bad(format!(
                            "coherence fails for ({}, {}, {})",
                            b.morphism(f).name,
                            b.morphism(g).name,
                            b.morphism(h).name
                        ));
                    }
                }
                debug_assert_eq!(b.compose(hg, f), Some(hgf));
            }
        }
        Ok(())
    }

    /// `E(F)` with `(g,θ)∘(f,ξ) = (g∘f, θ ∘ Fg(ξ) ∘ τ_{f,g}a)` and
    /// `deg(f,ξ) = deg f + deg ξ`; also returns `(x, a)` per object.
    pub fn grothendieck(&self) -> Result<(FCat, Vec<(usize, usize)>), FibrationError> {
        self.validate()?;
        let b = &self.base;
        let points: Vec<(usize, usize)> =
            (0..b.object_count()).flat_map(|x| (0..self.fibers[x].object_count()).map(move |a| (x, a))).collect();
        let pos: HashMap<(usize, usize), usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let objects: Vec<String> =
            points.iter().map(|&(x, a)| format!("({},{})", b.objects()[x], self.fibers[x].objects()[a])).collect();
        let mut morphisms = Vec::new();
        let mut index = HashMap::new();
        for &(x, a) in &points {
            for (f, m) in b.morphisms().iter().enumerate() {
                if m.source != x {
                    continue;
                }
                let fib = &self.fibers[m.target];
                let start = self.maps[f].objects[a];
                for (xi, xm) in fib.morphisms().iter().enumerate() {
                    if xm.source != start {
                        continue;
                    }
                    index.insert((f, xi, a), morphisms.len());
                    morphisms.push(Morphism {
                        name: format!("({},{})", m.name, xm.name),
                        source: pos[&(x, a)],
                        target: pos[&(m.target, xm.target)],
                        degree: &m.degree + &xm.degree,
                        identity: m.identity && xm.identity,
                    });
                }
            }
        }
        let entries: Vec<((usize, usize, usize), usize)> = index.iter().map(|(&k, &v)| (k, v)).collect();
        let mut composition = Vec::new();
        for &((f, xi, a), first) in &entries {
            let y = b.morphism(f).target;
            let c = self.fibers[y].morphism(xi).target;
            for &((g, theta, c2), second) in &entries {
                if c2 != c || b.morphism(g).source != y {
                    continue;
                }
                let h = b.compose(g, f).expect("base is not truncated");
                let z = b.morphism(g).target;
                let fz = &self.fibers[z];
                let moved = fz.compose(self.maps[g].morphisms[xi], self.tau_at(f, g, a));
                let comp = moved.and_then(|m| fz.compose(theta, m));
                let Some(comp) = comp else {
                    return Err(FibrationError::Raw("a fiber composite is missing".into()));
                };
                composition.push((second, first, index[&(h, comp, a)]));
            }
        }
        composition.sort();
        Ok((FCat::new(objects, morphisms, composition, None)?, points))
    }
}

/// A category with only identities.
pub fn discrete(labels: Vec<String>) -> Result<FCat, FCatError> {
    let morphisms = (0..labels.len())
        .map(|i| Morphism { name: format!("id_{}", labels[i]), source: i, target: i, degree: Exponent::zero(), identity: true })
        .collect();
    let composition = (0..labels.len()).map(|i| (i, i, i)).collect();
    FCat::new(labels, morphisms, composition, None)
}

/// A one-object category acting on its own morphisms by left composition,
/// with discrete fiber and identity comparison cells.
pub fn regular_action(c: &FCat) -> Result<OplaxFunctor, FibrationError> {
    if c.object_count() != 1 || c.horizon().is_some() {
        return Err(FibrationError::Shape("regular action needs a one-object untruncated category".into()));
    }
    let n = c.morphisms().len();
    let fiber = discrete(c.morphisms().iter().map(|m| m.name.clone()).collect())?;
    let maps = (0..n)
        .map(|g| {
            let objects: Vec<usize> = (0..n).map(|h| c.compose(g, h).expect("untruncated")).collect();
            Functor { morphisms: objects.clone(), objects }
        })
        .collect();
    let raw = OplaxFunctor { base: c.clone(), fibers: vec![fiber], maps, tau: HashMap::new() };
    raw.validate()?;
    Ok(raw)
}

/// `Y` over the `n`-cycle with identity transports except across the edge
/// from the last vertex to the first, where it is `θ`; other transports
/// compose along the shortest path; on ties both directions use the path
/// through increasing labels from the smaller one.
pub fn cyclic_twist(fiber: &MetricSpace, theta: &[usize], n: usize) -> Result<MetricAction, FibrationError> {
    if n < 3 {
        return Err(FibrationError::Shape("the cycle needs at least 3 vertices".into()));
    }
    if !is_isometric_bijection(fiber, fiber, theta) {
        return Err(FibrationError::NotIsometry { from: "θ".into(), to: "θ".into() });
    }
    let mut inverse = vec![0; theta.len()];
    for (a, &b) in theta.iter().enumerate() {
        inverse[b] = a;
    }
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let base = MetricSpace::from_edges(labels, &edges, false);
    let identity: Vec<usize> = (0..fiber.len()).collect();
    let mut transport = vec![vec![identity.clone(); n]; n];
    for x in 0..n {
        for y in 0..n {
            let forward = (y + n - x) % n;
            let mut t = identity.clone();
            if forward < n - forward || (forward == n - forward && x < y) {
                for k in 0..forward {
                    if (x + k) % n == n - 1 {
                        t = t.iter().map(|&a| theta[a]).collect();
                    }
                }
            } else {
                for k in 0..n - forward {
                    if (x + n - k) % n == 0 {
                        t = t.iter().map(|&a| inverse[a]).collect();
                    }
                }
            }
            transport[x][y] = t;
        }
    }
    MetricAction::new(base, vec![fiber.clone(); n], transport)
}

/// The same fiber over every base point, the given permutations on base
/// edges (pairs with nothing strictly between them), identities on other
/// edges, and composites through the first intermediate point elsewhere.
pub fn action_from_twists(
    base: &MetricSpace,
    fiber: &MetricSpace,
    twists: &[((usize, usize), Vec<usize>)],
) -> Result<MetricAction, FibrationError> {
    let n = base.len();
    if base.d.iter().flatten().any(Option::is_none) {
        return Err(FibrationError::Shape("base distances must be finite".into()));
    }
    let d = |a: usize, b: usize| base.d[a][b].clone().expect("finite");
    let between = |x: usize, y: usize| {
        (0..n).find(|&z| z != x && z != y && !d(x, z).is_zero() && !d(z, y).is_zero() && &d(x, z) + &d(z, y) == d(x, y))
    };
    let mut edge_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for ((x, y), perm) in twists {
        if *x == *y || between(*x, *y).is_some() {
            return Err(FibrationError::Shape(format!("{} -- {} is not an edge", base.labels[*x], base.labels[*y])));
        }
        if !is_isometric_bijection(fiber, fiber, perm) {
            return Err(FibrationError::NotIsometry { from: base.labels[*x].clone(), to: base.labels[*y].clone() });
        }
        let mut inv = vec![0; perm.len()];
        for (a, &b) in perm.iter().enumerate() {
            inv[b] = a;
        }
        edge_map.insert((*x, *y), perm.clone());
        edge_map.insert((*y, *x), inv);
    }
    let identity: Vec<usize> = (0..fiber.len()).collect();
    // fill by increasing distance so intermediate transports exist
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    pairs.sort_by_key(|&(x, y)| d(x, y));
    let mut transport = vec![vec![identity.clone(); n]; n];
    for (x, y) in pairs {
        if x == y {
            continue;
        }
        transport[x][y] = match between(x, y) {
            None => edge_map.get(&(x, y)).cloned().unwrap_or_else(|| identity.clone()),
            Some(z) => transport[x][z].iter().map(|&a| transport[z][y][a]).collect(),
        };
    }
    MetricAction::new(base.clone(), vec![fiber.clone(); n], transport)
}

/// The unique lift `z ∈ π⁻¹y` for each `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationWitness {
    pub projection: Vec<usize>,
    pub fibers: Vec<Vec<usize>>,
    pub lifts: Vec<Vec<usize>>,
}

/// A pair with no lift or with several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftFailure {
    pub x: String,
    pub y: String,
    pub candidates: Vec<String>,
}

impl fmt::Display for LiftFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.candidates.is_empty() {
            write!(f, "no lift of {} over {}", self.x, self.y)
        } else {
            write!(f, "lifts of {} over {} are not unique: {}", self.x, self.y, self.candidates.join(", "))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FibrationCheck {
    Fibration(FibrationWitness),
    Counterexample(LiftFailure),
}

/// Exhaustive lift check: for every `x` and `y` exactly one `z ∈ π⁻¹y` with
/// `d(x,z) = d(πx,y)` and `d(x,w) = d(x,z) + d(z,w)` for all `w ∈ π⁻¹y`.
pub fn is_metric_fibration(total: &MetricSpace, base: &MetricSpace, projection: &[usize]) -> Result<FibrationCheck, FibrationError> {
    if projection.len() != total.len() || projection.iter().any(|&y| y >= base.len()) {
        return Err(FibrationError::Shape("projection has the wrong shape".into()));
    }
    let mut fibers = vec![Vec::new(); base.len()];
    for (x, &y) in projection.iter().enumerate() {
        fibers[y].push(x);
    }
    if let Some(y) = fibers.iter().position(Vec::is_empty) {
        return Err(FibrationError::NotSurjective(base.labels[y].clone()));
    }
    for a in 0..total.len() {
        for b in 0..total.len() {
            let (pa, pb) = (&base.d[projection[a]][projection[b]], &total.d[a][b]);
            let ok = match (pa, pb) {
                (_, None) => true,
                (None, Some(_)) => false,
                (Some(u), Some(v)) => u <= v,
            };
            if !ok {
                return Err(FibrationError::NotLipschitz(total.labels[a].clone(), total.labels[b].clone()));
            }
        }
    }
    let mut lifts = vec![vec![0; base.len()]; total.len()];
    for x in 0..total.len() {
        for y in 0..base.len() {
            let candidates: Vec<usize> = fibers[y]
                .iter()
                .copied()
                .filter(|&z| {
                    total.d[x][z] == base.d[projection[x]][y]
                        && fibers[y].iter().all(|&w| total.d[x][w] == add(&total.d[x][z], &total.d[z][w]))
                })
                .collect();
            if candidates.len() != 1 {
                return Ok(FibrationCheck::Counterexample(LiftFailure {
                    x: total.labels[x].clone(),
                    y: base.labels[y].clone(),
                    candidates: candidates.iter().map(|&z| total.labels[z].clone()).collect(),
                }));
            }
            lifts[x][y] = candidates[0];
        }
    }
    Ok(FibrationCheck::Fibration(FibrationWitness { projection: projection.to_vec(), fibers, lifts }))
}

fn submetric(m: &MetricSpace, points: &[usize]) -> MetricSpace {
    MetricSpace {
        labels: points.iter().map(|&p| m.labels[p].clone()).collect(),
        d: points.iter().map(|&a| points.iter().map(|&b| m.d[a][b].clone()).collect()).collect(),
    }
}

/// Fibers as induced subspaces and transports from the unique lifts.
pub fn extract_action(total: &MetricSpace, base: &MetricSpace, w: &FibrationWitness) -> Result<MetricAction, FibrationError> {
    let fibers: Vec<MetricSpace> = w.fibers.iter().map(|f| submetric(total, f)).collect();
    let position: HashMap<usize, usize> =
        w.fibers.iter().flat_map(|f| f.iter().enumerate().map(|(i, &p)| (p, i))).collect();
    let transport = (0..base.len())
        .map(|x| (0..base.len()).map(|y| w.fibers[x].iter().map(|&a| position[&w.lifts[a][y]]).collect()).collect())
        .collect();
    MetricAction::new(base.clone(), fibers, transport)
}

/// An isometry `a → b` respecting the colourings, by backtracking with
/// distance-profile pruning.
pub fn find_isometry(a: &MetricSpace, b: &MetricSpace, colors: Option<(&[usize], &[usize])>) -> Option<Vec<usize>> {
    let n = a.len();
    if b.len() != n {
        return None;
    }
    let profile = |m: &MetricSpace, i: usize| {
        let mut out: Vec<Option<Exponent>> = m.d[i].clone();
        let mut inc: Vec<Option<Exponent>> = (0..n).map(|j| m.d[j][i].clone()).collect();
        out.sort();
        inc.sort();
        (out, inc)
    };
    let pa: Vec<_> = (0..n).map(|i| profile(a, i)).collect();
    let pb: Vec<_> = (0..n).map(|i| profile(b, i)).collect();
    let color = |side: usize, i: usize| colors.map_or(0, |c| if side == 0 { c.0[i] } else { c.1[i] });
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| pa[i] == pb[j] && color(0, i) == color(1, j)).collect()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| candidates[i].len());
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        k: usize,
        order: &[usize],
        candidates: &[Vec<usize>],
        a: &MetricSpace,
        b: &MetricSpace,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let i = order[k];
        for &j in &candidates[i] {
            if used[j] {
                continue;
            }
            let fits = order[..k].iter().all(|&p| a.d[i][p] == b.d[j][map[p]] && a.d[p][i] == b.d[map[p]][j]);
            if fits {
                map[i] = j;
                used[j] = true;
                if go(k + 1, order, candidates, a, b, map, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        map[i] = usize::MAX;
        false
    }
    go(0, &order, &candidates, a, b, &mut map, &mut used).then_some(map)
}

/// Girth of the graph of pairs at distance 1 in both directions.
pub fn girth(m: &MetricSpace) -> Option<usize> {
    let one = Some(Exponent::from_int(1));
    let n = m.len();
    let adj: Vec<Vec<usize>> =
        (0..n).map(|i| (0..n).filter(|&j| m.d[i][j] == one && m.d[j][i] == one).collect()).collect();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    let len = dist[v] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

pub fn distance_multiset(m: &MetricSpace) -> BTreeMap<Option<Exponent>, usize> {
    let mut out = BTreeMap::new();
    for row in &m.d {
        for x in row {
            *out.entry(x.clone()).or_insert(0) += 1;
        }
    }
    out
}

/// Round trip through fibration detection and action extraction; returns an
/// isometry from the rebuilt total space onto the original over the base.
pub fn round_trip(total: &MetricSpace, base: &MetricSpace, projection: &[usize]) -> Result<Result<Vec<usize>, LiftFailure>, FibrationError> {
    let w = match is_metric_fibration(total, base, projection)? {
        FibrationCheck::Fibration(w) => w,
        FibrationCheck::Counterexample(e) => return Ok(Err(e)),
    };
    let rebuilt = grothendieck(&extract_action(total, base, &w)?)?;
    let iso = find_isometry(&rebuilt.space, total, Some((&rebuilt.projection, projection)));
    Ok(iso.ok_or_else(|| LiftFailure { x: "round trip".into(), y: "isometry".into(), candidates: Vec::new() }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductReport {
    pub total: NSeries,
    pub base: NSeries,
    pub fiber: NSeries,
    pub product: NSeries,
    pub magnitude_agrees: bool,
    /// `k^{(x,a)} = k^x k^a` at every point.
    pub weighting_agrees: bool,
}

impl ProductReport {
    pub fn holds(&self) -> bool {
        self.magnitude_agrees && self.weighting_agrees
    }
}

fn product_report(
    total: &FCat,
    points: &[(usize, usize)],
    base: &FCat,
    fibers: &[FCat],
    cutoff: &Exponent,
) -> Result<ProductReport, FibrationError> {
    let mag_total = magnitude(total, cutoff)?;
    let mag_base = magnitude(base, cutoff)?;
    let mag_fiber = magnitude(&fibers[0], cutoff)?;
    let product = mag_base.mul(&mag_fiber)?;
    let k_total = weighting(total, cutoff)?;
    let k_base = weighting(base, cutoff)?;
    let k_fibers = fibers.iter().map(|f| weighting(f, cutoff)).collect::<Result<Vec<_>, _>>()?;
    let mut weighting_agrees = true;
    for (i, &(x, a)) in points.iter().enumerate() {
        weighting_agrees &= k_total.values[i] == k_base.values[x].mul(&k_fibers[x].values[a])?;
    }
    Ok(ProductReport {
        magnitude_agrees: mag_total == product,
        total: mag_total,
        base: mag_base,
        fiber: mag_fiber,
        product,
        weighting_agrees,
    })
}

/// `Mag E(F) = Mag X · Mag Fx` mod `q^{>cutoff}`, with fibers required to be
/// isometric.
pub fn product_formula_check(action: &MetricAction, cutoff: &Exponent) -> Result<ProductReport, FibrationError> {
    for (x, f) in action.fibers.iter().enumerate() {
        if find_isometry(&action.fibers[0], f, None).is_none() {
            return Err(FibrationError::FibersDiffer(action.base.labels[x].clone()));
        }
    }
    let total = grothendieck(action)?;
    let fibers = action.fibers.iter().map(MetricSpace::to_fcat).collect::<Result<Vec<_>, _>>()?;
    product_report(&total.space.to_fcat()?, &total.points, &action.base.to_fcat()?, &fibers, cutoff)
}

/// The same check for a general normal oplax functor; fibers must have equal
/// magnitude.
pub fn oplax_product_check(raw: &OplaxFunctor, cutoff: &Exponent) -> Result<ProductReport, FibrationError> {
    let first = magnitude(&raw.fibers[0], cutoff)?;
    for (x, f) in raw.fibers.iter().enumerate() {
        if magnitude(f, cutoff)? != first {
            return Err(FibrationError::FiberMagnitudes(raw.base.objects()[x].clone()));
        }
    }
    let (total, points) = raw.grothendieck()?;
    product_report(&total, &points, &raw.base, &raw.fibers, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcat::{from_group, GroupFamily, GroupPresentationBall};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn complete(n: usize) -> MetricSpace {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        MetricSpace::from_edges(labels(n), &edges, false)
    }

    fn k33() -> MetricSpace {
        let edges: Vec<_> = (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect();
        MetricSpace::from_edges(labels(6), &edges, false)
    }

    fn cycle(n: usize) -> MetricSpace {
        MetricSpace::from_edges(labels(n), &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>(), false)
    }

    fn trivial(base: &MetricSpace, fiber: &MetricSpace) -> MetricAction {
        let n = base.len();
        let id: Vec<usize> = (0..fiber.len()).collect();
        MetricAction::new(base.clone(), vec![fiber.clone(); n], vec![vec![id; n]; n]).unwrap()
    }

    fn q(n: u64) -> Exponent {
        Exponent::from_int(n)
    }

    #[test]
    fn trivial_action_is_product() {
        let (k3, k2) = (complete(3), complete(2));
        let e = grothendieck(&trivial(&k3, &k2)).unwrap();
        assert!(find_isometry(&e.space, &k3.product(&k2), None).is_some());
        let pt = complete(1);
        let e = grothendieck(&trivial(&pt, &k3)).unwrap();
        assert_eq!(e.space.d, k3.d);
    }

    #[test]
    fn twisted_triangle_is_k33() {
        let a = cyclic_twist(&complete(2), &[1, 0], 3).unwrap();
        let e = grothendieck(&a).unwrap();
        assert!(find_isometry(&e.space, &k33(), None).is_some());
        let prod = complete(3).product(&complete(2));
        assert!(find_isometry(&e.space, &prod, None).is_none());
        assert_eq!(girth(&e.space), Some(4));
        assert_eq!(girth(&prod), Some(3));
        // same distance multiset, so only girth tells them apart
        assert_eq!(distance_multiset(&e.space), distance_multiset(&prod));
    }

    #[test]
    fn even_cycle_twist_is_rejected() {
        let err = cyclic_twist(&complete(2), &[1, 0], 4).unwrap_err();
        assert!(matches!(err, FibrationError::Oplax { .. }));
        let a = cyclic_twist(&complete(2), &[0, 1], 4).unwrap();
        let e = grothendieck(&a).unwrap();
        assert!(find_isometry(&e.space, &complete(2).product(&cycle(4)), None).is_some());
        assert!(cyclic_twist(&complete(2), &[0, 0], 3).is_err());
    }

    #[test]
    fn twists_match_cyclic_builder() {
        for n in [3, 5] {
            let direct = cyclic_twist(&complete(2), &[1, 0], n).unwrap();
            let built = action_from_twists(&cycle(n), &complete(2), &[((n - 1, 0), vec![1, 0])]).unwrap();
            assert_eq!(grothendieck(&direct).unwrap().space.d, grothendieck(&built).unwrap().space.d);
        }
        assert!(action_from_twists(&cycle(5), &complete(2), &[((0, 2), vec![1, 0])]).is_err());
        assert!(action_from_twists(&cycle(4), &complete(2), &[((3, 0), vec![1, 0])]).is_err());
    }

    #[test]
    fn odd_twists_are_fibrations() {
        for n in [3, 5] {
            let e = grothendieck(&cyclic_twist(&cycle(4), &[1, 2, 3, 0], n).unwrap()).unwrap();
            let iso = round_trip(&e.space, &cycle(n), &e.projection).unwrap();
            assert!(iso.is_ok());
        }
    }

    #[test]
    fn metric_and_categorical_routes_agree() {
        for a in [
            cyclic_twist(&complete(2), &[1, 0], 3).unwrap(),
            cyclic_twist(&cycle(4), &[3, 2, 1, 0], 5).unwrap(),
            trivial(&cycle(4), &complete(3)),
        ] {
            let metric = grothendieck(&a).unwrap();
            let (cat, points) = a.to_oplax().unwrap().grothendieck().unwrap();
            assert_eq!(points, metric.points);
            for i in 0..points.len() {
                for j in 0..points.len() {
                    let hom = cat.hom(i, j);
                    assert_eq!(hom.len(), 1);
                    assert_eq!(Some(cat.morphism(hom[0]).degree.clone()), metric.space.d[i][j]);
                }
            }
        }
    }

    #[test]
    fn fibration_detection() {
        let prod = complete(3).product(&complete(2));
        let proj: Vec<usize> = (0..6).map(|i| i / 2).collect();
        assert!(matches!(is_metric_fibration(&prod, &complete(3), &proj).unwrap(), FibrationCheck::Fibration(_)));
        let e = grothendieck(&cyclic_twist(&complete(2), &[1, 0], 3).unwrap()).unwrap();
        assert!(matches!(is_metric_fibration(&e.space, &complete(3), &e.projection).unwrap(), FibrationCheck::Fibration(_)));
        // C6 folded onto K3 by antipodes: each point has two candidate lifts
        // over its own image's neighbours or none at all
        let folded: Vec<usize> = (0..6).map(|i| i % 3).collect();
        let c6 = cycle(6);
        assert!(matches!(is_metric_fibration(&c6, &complete(3), &folded).unwrap(), FibrationCheck::Counterexample(_)));
        // a path onto an edge: the far end has no lift at the right distance
        let p3 = MetricSpace::from_edges(labels(3), &[(0, 1), (1, 2)], false);
        let r = is_metric_fibration(&p3, &complete(2), &[0, 1, 1]).unwrap();
        assert!(matches!(r, FibrationCheck::Counterexample(_)));
        assert!(matches!(is_metric_fibration(&complete(2), &complete(2), &[0, 0]), Err(FibrationError::NotSurjective(_))));
        assert!(matches!(
            is_metric_fibration(&complete(2), &MetricSpace::from_edges(labels(2), &[], false), &[0, 1]),
            Err(FibrationError::NotLipschitz(..))
        ));
    }

    #[test]
    fn extraction_recovers_one_twist() {
        let e = grothendieck(&cyclic_twist(&complete(2), &[1, 0], 3).unwrap()).unwrap();
        let FibrationCheck::Fibration(w) = is_metric_fibration(&e.space, &complete(3), &e.projection).unwrap() else {
            panic!()
        };
        let a = extract_action(&e.space, &complete(3), &w).unwrap();
        // the holonomy around the triangle is the swap
        let around: Vec<usize> = (0..2).map(|p| a.transport[2][0][a.transport[1][2][a.transport[0][1][p]]]).collect();
        assert_eq!(around, vec![1, 0]);
        assert!(round_trip(&e.space, &complete(3), &e.projection).unwrap().is_ok());
    }

    #[test]
    fn product_formula() {
        let cutoff = q(9);
        let twisted = product_formula_check(&cyclic_twist(&complete(2), &[1, 0], 3).unwrap(), &cutoff).unwrap();
        assert!(twisted.holds());
        let plain = product_formula_check(&trivial(&complete(3), &complete(2)), &cutoff).unwrap();
        assert!(plain.holds());
        assert_eq!(twisted.total, plain.total);
        let pt = product_formula_check(&trivial(&complete(1), &cycle(5)), &cutoff).unwrap();
        assert_eq!(pt.total, pt.fiber);
    }

    #[test]
    fn validation_errors() {
        let k2 = complete(2);
        let bad = MetricAction::new(k2.clone(), vec![k2.clone(), k2.clone()], vec![vec![vec![0, 1], vec![0, 0]], vec![vec![0, 1], vec![0, 1]]]);
        assert!(matches!(bad, Err(FibrationError::NotIsometry { .. })));
        let bad = MetricAction::new(k2.clone(), vec![complete(3), complete(3)], vec![
            vec![vec![0, 1, 2], vec![1, 2, 0]],
            vec![vec![1, 2, 0], vec![0, 1, 2]],
        ]);
        assert!(matches!(bad, Err(FibrationError::NotInverse(..))));
    }

    #[test]
    fn cayley_regular_action() {
        let ball = GroupPresentationBall::new(
            GroupFamily::Cyclic(5),
            vec![vec![1]],
            5,
        )
        .unwrap();
        let (g, _) = from_group(&ball).unwrap();
        let raw = regular_action(&g).unwrap();
        let (e, _) = raw.grothendieck().unwrap();
        let c5 = cycle(5).to_fcat().unwrap();
        let as_metric = MetricSpace::from_fcat(&e).unwrap();
        assert!(find_isometry(&as_metric, &cycle(5), None).is_some());
        let cutoff = q(7);
        let report = oplax_product_check(&raw, &cutoff).unwrap();
        assert!(report.holds());
        assert_eq!(report.total, magnitude(&c5, &cutoff).unwrap());
        // discrete fiber of 5 points: weighting at each is the group magnitude
        let k = weighting(&e, &cutoff).unwrap();
        assert!(k.values.iter().all(|v| *v == report.base));
    }

    #[test]
    fn raw_validation_catches_bad_tau() {
        let ball = GroupPresentationBall::new(GroupFamily::Cyclic(3), vec![vec![1]], 3).unwrap();
        let (g, _) = from_group(&ball).unwrap();
        let mut raw = regular_action(&g).unwrap();
        let f = g.non_identities().next().unwrap();
        raw.tau.insert((f, f), vec![0; 3]);
        assert!(raw.validate().is_err());
    }
}
