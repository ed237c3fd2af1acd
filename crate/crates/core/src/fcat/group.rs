use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use super::graph::{LocallyFiniteGraph, NeighborOracle};
use super::{FCat, FCatError, Morphism};
use crate::novikov::Exponent;

/// Cyclic: `[k]`; free abelian: coordinates; free: reduced word with letters
/// `±(i+1)`; table: `[index]`.
pub type GroupElem = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupFamily {
    Cyclic(u64),
    FreeAbelian(usize),
    Free(usize),
    /// `mul[a][b]` is the index of `a·b`.
    Table { names: Vec<String>, mul: Vec<Vec<usize>> },
}

impl GroupFamily {
    pub fn validate(&self) -> Result<(), FCatError> {
        let err = |m: String| Err(FCatError::GroupTable(m));
        match self {
            GroupFamily::Cyclic(0) => err("cyclic group of order 0".into()),
            GroupFamily::Free(k) if *k > 26 => err("at most 26 free generators".into()),
            GroupFamily::Table { names, mul } => {
                let n = names.len();
                if n == 0 {
                    return err("empty table".into());
                }
                if mul.len() != n || mul.iter().any(|r| r.len() != n) {
                    return err("table is not square".into());
                }
                for (a, row) in mul.iter().enumerate() {
                    for (b, &c) in row.iter().enumerate() {
                        if c >= n {
                            return err(format!("{}·{} is not in the table", names[a], names[b]));
                        }
                    }
                }
                let Some(e) = (0..n).find(|&e| (0..n).all(|x| mul[e][x] == x && mul[x][e] == x)) else {
                    return err("no identity element".into());
                };
                for a in 0..n {
                    if !(0..n).any(|b| mul[a][b] == e && mul[b][a] == e) {
                        return err(format!("{} has no inverse", names[a]));
                    }
                    for b in 0..n {
                        for c in 0..n {
                            if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                                return err(format!(
                                    "not associative at ({}, {}, {})",
                                    names[a], names[b], names[c]
                                ));
                            }
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            GroupFamily::Cyclic(_) => vec![0],
            GroupFamily::FreeAbelian(k) => vec![0; *k],
            GroupFamily::Free(_) => vec![],
            GroupFamily::Table { mul, .. } => {
                let n = mul.len();
                let e = (0..n).find(|&e| (0..n).all(|x| mul[e][x] == x)).unwrap_or(0);
                vec![e as i64]
            }
        }
    }

    pub fn mul(&self, a: &GroupElem, b: &GroupElem) -> GroupElem {
        match self {
            GroupFamily::Cyclic(n) => vec![(a[0] + b[0]).rem_euclid(*n as i64)],
            GroupFamily::FreeAbelian(_) => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            GroupFamily::Free(_) => {
                let mut w = a.clone();
                for &x in b {
                    if w.last() == Some(&-x) {
                        w.pop();
                    } else {
                        w.push(x);
                    }
                }
                w
            }
            GroupFamily::Table { mul, .. } => vec![mul[a[0] as usize][b[0] as usize] as i64],
        }
    }

    pub fn inverse(&self, a: &GroupElem) -> GroupElem {
        match self {
            GroupFamily::Cyclic(n) => vec![(-a[0]).rem_euclid(*n as i64)],
            GroupFamily::FreeAbelian(_) => a.iter().map(|x| -x).collect(),
            GroupFamily::Free(_) => a.iter().rev().map(|x| -x).collect(),
            GroupFamily::Table { mul, .. } => {
                let e = self.identity()[0] as usize;
                let i = (0..mul.len()).find(|&b| mul[a[0] as usize][b] == e).expect("validated table");
                vec![i as i64]
            }
        }
    }

    /// Brings user input into canonical form, rejecting invalid data.
    pub fn normalize(&self, a: &GroupElem) -> Result<GroupElem, FCatError> {
        let bad = || FCatError::GroupTable(format!("invalid element {a:?}"));
        match self {
            GroupFamily::Cyclic(n) if a.len() == 1 => Ok(vec![a[0].rem_euclid(*n as i64)]),
            GroupFamily::FreeAbelian(k) if a.len() == *k => Ok(a.clone()),
            GroupFamily::Free(k) => {
                if a.iter().any(|&x| x == 0 || x.unsigned_abs() as usize > *k) {
                    return Err(bad());
                }
                Ok(self.mul(&vec![], a))
            }
            GroupFamily::Table { names, .. } if a.len() == 1 && (a[0] as usize) < names.len() && a[0] >= 0 => {
                Ok(a.clone())
            }
            _ => Err(bad()),
        }
    }

    pub fn label(&self, a: &GroupElem) -> String {
        match self {
            GroupFamily::Cyclic(_) => a[0].to_string(),
            GroupFamily::FreeAbelian(_) => {
                let parts: Vec<String> = a.iter().map(i64::to_string).collect();
                format!("({})", parts.join(","))
            }
            GroupFamily::Free(_) => {
                if a.is_empty() {
                    return "1".into();
                }
                a.iter()
                    .map(|&x| {
                        let c = (b'a' + (x.unsigned_abs() - 1) as u8) as char;
                        if x > 0 { c } else { c.to_ascii_uppercase() }
                    })
                    .collect()
            }
            GroupFamily::Table { names, .. } => names[a[0] as usize].clone(),
        }
    }

    pub fn parse_label(&self, s: &str) -> Option<GroupElem> {
        match self {
            GroupFamily::Cyclic(_) => s.parse().ok().map(|k| vec![k]),
            GroupFamily::FreeAbelian(_) => {
                let inner = s.strip_prefix('(')?.strip_suffix(')')?;
                if inner.is_empty() {
                    return Some(vec![]);
                }
                inner.split(',').map(|x| x.trim().parse().ok()).collect()
            }
            GroupFamily::Free(_) => {
                if s == "1" {
                    return Some(vec![]);
                }
                s.chars()
                    .map(|c| {
                        let k = (c.to_ascii_lowercase() as i64) - ('a' as i64) + 1;
                        (1..=26).contains(&k).then_some(if c.is_ascii_uppercase() { -k } else { k })
                    })
                    .collect()
            }
            GroupFamily::Table { names, .. } => names.iter().position(|n| n == s).map(|i| vec![i as i64]),
        }
    }
}

/// A ball in a Cayley graph, defining word lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentationBall {
    pub family: GroupFamily,
    pub generators: Vec<GroupElem>,
    /// Replace `S` by `S ∪ S⁻¹` (undirected Cayley graph).
    pub symmetrize: bool,
    pub radius: u64,
}

impl GroupPresentationBall {
    pub fn new(family: GroupFamily, generators: Vec<GroupElem>, radius: u64) -> Result<Self, FCatError> {
        let b = GroupPresentationBall { family, generators, symmetrize: true, radius };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), FCatError> {
        self.family.validate()?;
        for g in &self.generators {
            self.family.normalize(g)?;
        }
        Ok(())
    }

    /// Effective generating set, without the identity and without repeats.
    pub fn generating_set(&self) -> Vec<GroupElem> {
        let e = self.family.identity();
        let mut out: Vec<GroupElem> = Vec::new();
        let mut push = |g: GroupElem| {
            if g != e && !out.contains(&g) {
                out.push(g);
            }
        };
        for g in &self.generators {
            let g = self.family.normalize(g).expect("validated generator");
            let inv = self.family.inverse(&g);
            push(g);
            if self.symmetrize {
                push(inv);
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        let s = self.generating_set();
        s.iter().all(|g| s.contains(&self.family.inverse(g)))
    }

    /// Elements of word length at most `radius` in breadth-first order, and
    /// whether this is the whole group.
    pub fn ball(&self) -> (Vec<(GroupElem, u64)>, bool) {
        let s = self.generating_set();
        let e = self.family.identity();
        let mut seen: HashMap<GroupElem, u64> = HashMap::from([(e.clone(), 0)]);
        let mut order = vec![(e.clone(), 0)];
        let mut queue = VecDeque::from([e]);
        let mut complete = true;
        while let Some(g) = queue.pop_front() {
            let wl = seen[&g];
            for x in &s {
                let h = self.family.mul(&g, x);
                if seen.contains_key(&h) {
                    continue;
                }
                if wl == self.radius {
                    complete = false;
                    continue;
                }
                seen.insert(h.clone(), wl + 1);
                order.push((h.clone(), wl + 1));
                queue.push_back(h);
            }
        }
        (order, complete)
    }

    pub fn cayley_graph(&self) -> LocallyFiniteGraph {
        let family = self.family.clone();
        let s = self.generating_set();
        let f2 = family.clone();
        let oracle: NeighborOracle = Arc::new(move |label: &str| {
            let g = f2.parse_label(label).expect("vertex label of this group");
            s.iter().map(|x| f2.label(&f2.mul(&g, x))).collect()
        });
        LocallyFiniteGraph::new(oracle, vec![family.label(&family.identity())], self.is_symmetric())
    }
}

/// The one-object category with `deg g = wl(g)` and composition `g∘f = g·f`,
/// together with the Cayley graph. A ball that is not the whole group gives a
/// category truncated at the radius.
pub fn from_group(g: &GroupPresentationBall) -> Result<(FCat, LocallyFiniteGraph), FCatError> {
    g.validate()?;
    let (ball, complete) = g.ball();
    let index: HashMap<GroupElem, usize> = ball.iter().enumerate().map(|(i, (x, _))| (x.clone(), i)).collect();
    let morphisms = ball
        .iter()
        .enumerate()
        .map(|(i, (x, wl))| Morphism {
            name: g.family.label(x),
            source: 0,
            target: 0,
            degree: Exponent::from_int(*wl),
            identity: i == 0,
        })
        .collect();
    let mut comp = Vec::new();
    for (fi, (f, _)) in ball.iter().enumerate() {
        for (gi, (h, _)) in ball.iter().enumerate() {
            if let Some(&k) = index.get(&g.family.mul(h, f)) {
                comp.push((gi, fi, k));
            }
        }
    }
    let horizon = (!complete).then(|| Exponent::from_int(g.radius));
    let cat = FCat::new(vec!["*".into()], morphisms, comp, horizon)?;
    Ok((cat, g.cayley_graph()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z5_word_lengths() {
        let b = GroupPresentationBall::new(GroupFamily::Cyclic(5), vec![vec![1]], 10).unwrap();
        let (ball, complete) = b.ball();
        assert!(complete);
        let mut wl = vec![0u64; 5];
        for (x, l) in &ball {
            wl[x[0] as usize] = *l;
        }
        assert_eq!(wl, vec![0, 1, 2, 2, 1]);
        let (c, cay) = from_group(&b).unwrap();
        assert_eq!(c.morphisms().len(), 5);
        assert_eq!(cay.neighbors("0"), vec!["1".to_string(), "4".to_string()]);
    }

    #[test]
    fn trivial_group() {
        let b = GroupPresentationBall::new(GroupFamily::Cyclic(1), vec![], 3).unwrap();
        let (c, _) = from_group(&b).unwrap();
        assert_eq!(c.morphisms().len(), 1);
    }

    #[test]
    fn free_group_rank_one_ball() {
        let b = GroupPresentationBall::new(GroupFamily::Free(1), vec![vec![1]], 3).unwrap();
        let (ball, complete) = b.ball();
        assert!(!complete);
        assert_eq!(ball.len(), 7);
        let (c, _) = from_group(&b).unwrap();
        assert_eq!(c.horizon(), Some(&Exponent::from_int(3)));
    }

    #[test]
    fn free_group_reduction_and_labels() {
        let f = GroupFamily::Free(2);
        let w = f.mul(&vec![1, 2], &vec![-2, 1]);
        assert_eq!(w, vec![1, 1]);
        assert_eq!(f.label(&vec![1, -2]), "aB");
        assert_eq!(f.parse_label("aB"), Some(vec![1, -2]));
        // rank 2: 1 + 4 + 12 elements in the ball of radius 2
        let b = GroupPresentationBall::new(f, vec![vec![1], vec![2]], 2).unwrap();
        assert_eq!(b.ball().0.len(), 17);
    }

    #[test]
    fn bad_table_rejected() {
        let t = GroupFamily::Table { names: vec!["e".into(), "x".into()], mul: vec![vec![0, 1], vec![1, 1]] };
        assert!(matches!(t.validate(), Err(FCatError::GroupTable(_))));
        let t = GroupFamily::Table { names: vec!["e".into(), "x".into()], mul: vec![vec![0, 1], vec![1, 2]] };
        assert!(t.validate().is_err());
    }
}
