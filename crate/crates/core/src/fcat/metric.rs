use std::collections::VecDeque;

use super::{FCat, FCatError, Morphism};
use crate::novikov::Exponent;

/// A finite generalized metric space: distances may be asymmetric, zero
/// between distinct points, or infinite (`None`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    pub labels: Vec<String>,
    pub d: Vec<Vec<Option<Exponent>>>,
}

fn add(a: &Option<Exponent>, b: &Option<Exponent>) -> Option<Exponent> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

/// `a <= b` with `None` read as infinity.
fn le(a: &Option<Exponent>, b: &Option<Exponent>) -> bool {
    match (a, b) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(x), Some(y)) => x <= y,
    }
}

impl MetricSpace {
    pub fn new(labels: Vec<String>, d: Vec<Vec<Option<Exponent>>>) -> Result<Self, FCatError> {
        let m = MetricSpace { labels, d };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self) -> Result<(), FCatError> {
        let n = self.labels.len();
        if self.d.len() != n || self.d.iter().any(|r| r.len() != n) {
            return Err(FCatError::NotSquare);
        }
        for i in 0..n {
            if self.d[i][i].as_ref().is_none_or(|x| !x.is_zero()) {
                return Err(FCatError::Diagonal(self.labels[i].clone()));
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if !le(&self.d[x][z], &add(&self.d[x][y], &self.d[y][z])) {
                        return Err(FCatError::Triangle(
                            self.labels[x].clone(),
                            self.labels[y].clone(),
                            self.labels[z].clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Shortest-path metric of an unweighted graph (`directed` for digraphs).
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)], directed: bool) -> Self {
        let n = labels.len();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            adj[u].push(v);
            if !directed {
                adj[v].push(u);
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let d = (0..n)
            .map(|s| {
                let mut dist: Vec<Option<u64>> = vec![None; n];
                dist[s] = Some(0);
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    let du = dist[u].unwrap();
                    for &v in &adj[u] {
                        if dist[v].is_none() {
                            dist[v] = Some(du + 1);
                            queue.push_back(v);
                        }
                    }
                }
                dist.into_iter().map(|x| x.map(Exponent::from_int)).collect()
            })
            .collect();
        MetricSpace { labels, d }
    }

    /// The ℓ¹ product, with points labelled `(x,y)` in row-major order.
    pub fn product(&self, other: &MetricSpace) -> MetricSpace {
        let mut labels = Vec::new();
        for x in &self.labels {
            for y in &other.labels {
                labels.push(format!("({x},{y})"));
            }
        }
        let m = other.len();
        let n = self.len() * m;
        let d = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| add(&self.d[i / m][j / m], &other.d[i % m][j % m]))
                    .collect()
            })
            .collect();
        MetricSpace { labels, d }
    }

    pub fn to_fcat(&self) -> Result<FCat, FCatError> {
        self.validate()?;
        build(&self.labels, &self.d, None)
    }

    /// Distance data of a metric-like category.
    pub fn from_fcat(c: &FCat) -> Result<MetricSpace, FCatError> {
        c.check_metric_like()?;
        let n = c.object_count();
        let d = (0..n).map(|a| (0..n).map(|b| c.distance(a, b).cloned()).collect()).collect();
        Ok(MetricSpace { labels: c.objects().to_vec(), d })
    }

    /// Symmetric and zero only on the diagonal.
    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.d[i][j] == self.d[j][i]))
    }

    /// A pair at mutual distance zero, if any.
    pub fn degenerate_pair(&self) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let zero = |x: &Option<Exponent>| x.as_ref().is_some_and(Exponent::is_zero);
                if zero(&self.d[i][j]) && zero(&self.d[j][i]) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// Metric-like category with one morphism per finite distance. With a
/// horizon, composites whose endpoints are not joined are left undefined.
pub(super) fn build(
    labels: &[String],
    d: &[Vec<Option<Exponent>>],
    horizon: Option<Exponent>,
) -> Result<FCat, FCatError> {
    let n = labels.len();
    let mut morphisms = Vec::new();
    let mut index = vec![vec![None; n]; n];
    for a in 0..n {
        for b in 0..n {
            if let Some(x) = &d[a][b] {
                index[a][b] = Some(morphisms.len());
                let name = if a == b { format!("id_{}", labels[a]) } else { format!("{}->{}", labels[a], labels[b]) };
                morphisms.push(Morphism { name, source: a, target: b, degree: x.clone(), identity: a == b });
            }
        }
    }
    let mut comp = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let Some(f) = index[a][b] else { continue };
            for c in 0..n {
                let Some(g) = index[b][c] else { continue };
                if let Some(h) = index[a][c] {
                    comp.push((g, f, h));
                }
            }
        }
    }
    FCat::new(labels.to_vec(), morphisms, comp, horizon)
}

/// Collapses points at mutual distance zero. Returns the quotient together
/// with the class index of every input object.
pub fn kolmogorov_quotient(c: &FCat) -> Result<(FCat, Vec<usize>), FCatError> {
    let ms = MetricSpace::from_fcat(c)?;
    let n = ms.len();
    let zero = |i: usize, j: usize| ms.d[i][j].as_ref().is_some_and(Exponent::is_zero);
    let mut class = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for i in 0..n {
        if class[i] != usize::MAX {
            continue;
        }
        let k = reps.len();
        reps.push(i);
        for j in i..n {
            if class[j] == usize::MAX && zero(i, j) && zero(j, i) {
                class[j] = k;
            }
        }
    }
    let labels: Vec<String> = reps.iter().map(|&r| ms.labels[r].clone()).collect();
    let d: Vec<Vec<Option<Exponent>>> =
        reps.iter().map(|&a| reps.iter().map(|&b| ms.d[a][b].clone()).collect()).collect();
    let q = build(&labels, &d, c.horizon().cloned())?;
    Ok((q, class))
}
