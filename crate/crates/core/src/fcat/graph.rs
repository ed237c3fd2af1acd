use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use super::metric::build;
use super::{FCat, FCatError};
use crate::novikov::Exponent;

/// Deterministic out-neighbour function. Implementations must be safe to
/// call concurrently.
pub type NeighborOracle = Arc<dyn Fn(&str) -> Vec<String> + Send + Sync>;

/// A possibly infinite graph known only through its neighbour oracle.
#[derive(Clone)]
pub struct LocallyFiniteGraph {
    oracle: NeighborOracle,
    pub base: Vec<String>,
    pub symmetric: bool,
}

impl fmt::Debug for LocallyFiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocallyFiniteGraph")
            .field("base", &self.base)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl LocallyFiniteGraph {
    pub fn new(oracle: NeighborOracle, base: Vec<String>, symmetric: bool) -> Self {
        LocallyFiniteGraph { oracle, base, symmetric }
    }

    /// A finite graph given by labels and an edge list.
    pub fn from_edges(labels: &[String], edges: &[(usize, usize)], symmetric: bool, base: Vec<String>) -> Self {
        let mut adj: HashMap<String, Vec<String>> =
            labels.iter().map(|l| (l.clone(), Vec::new())).collect();
        for &(u, v) in edges {
            adj.get_mut(&labels[u]).unwrap().push(labels[v].clone());
            if symmetric {
                adj.get_mut(&labels[v]).unwrap().push(labels[u].clone());
            }
        }
        for v in adj.values_mut() {
            v.dedup();
        }
        let adj = Arc::new(adj);
        let oracle: NeighborOracle = Arc::new(move |x: &str| adj.get(x).cloned().unwrap_or_default());
        LocallyFiniteGraph { oracle, base, symmetric }
    }

    /// The infinite path graph on the integers.
    pub fn integer_line(base: i64) -> Self {
        let oracle: NeighborOracle = Arc::new(|x: &str| {
            let n: i64 = x.parse().expect("integer vertex label");
            vec![(n - 1).to_string(), (n + 1).to_string()]
        });
        LocallyFiniteGraph { oracle, base: vec![base.to_string()], symmetric: true }
    }

    pub fn neighbors(&self, v: &str) -> Vec<String> {
        let mut out: Vec<String> = (self.oracle)(v).into_iter().filter(|u| u != v).collect();
        let mut seen = std::collections::HashSet::new();
        out.retain(|u| seen.insert(u.clone()));
        out
    }

    /// Breadth-first distances from `start` up to `radius` steps.
    pub fn ball(&self, start: &str, radius: u64) -> Vec<(String, u64)> {
        let mut dist: HashMap<String, u64> = HashMap::from([(start.to_string(), 0)]);
        let mut order = vec![(start.to_string(), 0)];
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(u) = queue.pop_front() {
            let du = dist[&u];
            if du == radius {
                continue;
            }
            for v in self.neighbors(&u) {
                if !dist.contains_key(&v) {
                    dist.insert(v.clone(), du + 1);
                    order.push((v.clone(), du + 1));
                    queue.push_back(v);
                }
            }
        }
        order
    }
}

/// Restricts to the union of the closed balls of radius `⌊radius⌋` around
/// the base labels. Distances come from the whole graph; pairs further apart
/// than the radius get no morphism, and the result records the radius as its
/// horizon.
pub fn from_graph(g: &LocallyFiniteGraph, radius: &Exponent) -> Result<FCat, FCatError> {
    let r = radius.value().floor().to_integer();
    let r: u64 = num_traits::ToPrimitive::to_u64(&r).unwrap_or(u64::MAX);
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for b in &g.base {
        for (v, _) in g.ball(b, r) {
            if !index.contains_key(&v) {
                index.insert(v.clone(), labels.len());
                labels.push(v);
            }
        }
    }
    if g.symmetric {
        for v in &labels {
            for u in g.neighbors(v) {
                if index.contains_key(&u) && !g.neighbors(&u).contains(v) {
                    return Err(FCatError::Asymmetric(v.clone(), u));
                }
            }
        }
    }
    let n = labels.len();
    let mut d = vec![vec![None; n]; n];
    for (i, v) in labels.iter().enumerate() {
        for (u, k) in g.ball(v, r) {
            if let Some(&j) = index.get(&u) {
                d[i][j] = Some(Exponent::from_int(k));
            }
        }
    }
    let base = g.base.iter().map(|b| index[b]).collect();
    Ok(build(&labels, &d, Some(Exponent::from_int(r)))?.with_base(base))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex() {
        let g = LocallyFiniteGraph::from_edges(&["v".to_string()], &[], true, vec!["v".into()]);
        let c = from_graph(&g, &Exponent::from_int(3)).unwrap();
        assert_eq!(c.object_count(), 1);
        assert_eq!(c.morphisms().len(), 1);
    }

    #[test]
    fn integer_ball() {
        let c = from_graph(&LocallyFiniteGraph::integer_line(0), &Exponent::from_int(3)).unwrap();
        assert_eq!(c.object_count(), 7);
        for a in 0..7 {
            for b in 0..7 {
                let (i, j): (i64, i64) = (c.objects()[a].parse().unwrap(), c.objects()[b].parse().unwrap());
                let want = if (i - j).abs() <= 3 { Some(Exponent::from_int((i - j).unsigned_abs())) } else { None };
                assert_eq!(c.distance(a, b).cloned(), want);
            }
        }
        assert_eq!(c.horizon(), Some(&Exponent::from_int(3)));
    }

    #[test]
    fn cycle_ball_covers_everything() {
        let labels: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let g = LocallyFiniteGraph::from_edges(&labels, &edges, true, vec!["0".into()]);
        let c = from_graph(&g, &Exponent::from_int(2)).unwrap();
        assert_eq!(c.object_count(), 5);
        for a in 0..5 {
            for b in 0..5 {
                let (u, v): (i64, i64) = (c.objects()[a].parse().unwrap(), c.objects()[b].parse().unwrap());
                let k = (u - v).rem_euclid(5).min((v - u).rem_euclid(5)) as u64;
                assert_eq!(c.distance(a, b), Some(&Exponent::from_int(k)));
            }
        }
    }

    #[test]
    fn asymmetry_detected() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let oracle: NeighborOracle = Arc::new(|x: &str| if x == "a" { vec!["b".into()] } else { vec![] });
        let g = LocallyFiniteGraph::new(oracle, labels[..1].to_vec(), true);
        assert!(matches!(from_graph(&g, &Exponent::from_int(1)), Err(FCatError::Asymmetric(..))));
    }

    #[test]
    fn enlarging_radius_keeps_distances() {
        let g = LocallyFiniteGraph::integer_line(0);
        let small = from_graph(&g, &Exponent::from_int(2)).unwrap();
        let big = from_graph(&g, &Exponent::from_int(4)).unwrap();
        for a in 0..small.object_count() {
            for b in 0..small.object_count() {
                let (ba, bb) = (
                    big.object_index(&small.objects()[a]).unwrap(),
                    big.object_index(&small.objects()[b]).unwrap(),
                );
                if let Some(x) = small.distance(a, b) {
                    assert_eq!(big.distance(ba, bb), Some(x));
                }
            }
        }
    }
}
