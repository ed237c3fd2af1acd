//! Built-in inputs, addressable as `builtin:<name>`.

use crate::fcat::{GroupFamily, GroupPresentationBall, MetricSpace, Poset};
use crate::fibration::cyclic_twist;
use crate::formats::Input;
use crate::novikov::Exponent;
use crate::specseq::Digraph;

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn graph(vertices: Vec<String>, mut edges: Vec<(usize, usize)>) -> Input {
    edges.sort();
    Input::Graph { vertices, edges }
}

fn complete(n: usize) -> Input {
    graph(numbered(n), (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect())
}

fn cycle(n: usize) -> Input {
    graph(numbered(n), (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect())
}

fn k3_times_k2() -> Input {
    let vertices = (0..3).flat_map(|i| (0..2).map(move |a| format!("{i}{a}"))).collect();
    let v = |i: usize, a: usize| 2 * i + a;
    let mut edges = Vec::new();
    for i in 0..3 {
        edges.push((v(i, 0), v(i, 1)));
        for j in i + 1..3 {
            for a in 0..2 {
                edges.push((v(i, a), v(j, a)));
            }
        }
    }
    graph(vertices, edges)
}

fn k33() -> Input {
    graph(names(&["a0", "a1", "a2", "b0", "b1", "b2"]), (0..3).flat_map(|i| (3..6).map(move |j| (i, j))).collect())
}

pub const NAMES: [&str; 15] = [
    "point",
    "K2",
    "K3",
    "C4",
    "C5",
    "K3xK2",
    "K33",
    "B2",
    "face-poset",
    "Z5",
    "Z-ball",
    "diamond",
    "C5-directed",
    "degenerate-pair",
    "K3-twist",
];

pub fn get(name: &str) -> Option<Input> {
    Some(match name {
        "point" => graph(names(&["x"]), vec![]),
        "K2" => complete(2),
        "K3" => complete(3),
        "C4" => cycle(4),
        "C5" => cycle(5),
        "K3xK2" => k3_times_k2(),
        "K33" => k33(),
        "B2" => Input::Poset {
            poset: Poset::from_covers(names(&["0", "x", "y", "1"]), &[(0, 1), (0, 2), (1, 3), (2, 3)]).ok()?,
            ranks: Some(vec![0, 1, 1, 2]),
        },
        "face-poset" => Input::Poset {
            poset: Poset::from_covers(
                names(&["a", "b", "c", "ab", "bc", "ca"]),
                &[(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5)],
            )
            .ok()?,
            ranks: None,
        },
        "Z5" => Input::Group(GroupPresentationBall::new(GroupFamily::Cyclic(5), vec![vec![1]], 8).ok()?),
        "Z-ball" => Input::Group(GroupPresentationBall::new(GroupFamily::Free(1), vec![vec![1]], 4).ok()?),
        "diamond" => Input::Digraph(Digraph::new(names(&["a", "b", "c", "d"]), vec![(0, 1), (0, 2), (1, 3), (2, 3)]).ok()?),
        "C5-directed" => Input::Digraph(Digraph::new(numbered(5), (0..5).map(|i| (i, (i + 1) % 5)).collect()).ok()?),
        "degenerate-pair" => {
            let z = Some(Exponent::zero());
            Input::Metric(MetricSpace::new(names(&["a", "b"]), vec![vec![z.clone(), z.clone()], vec![z.clone(), z]]).ok()?)
        }
        "K3-twist" => {
            let k2 = MetricSpace::from_edges(names(&["u", "v"]), &[(0, 1)], false);
            Input::Action(cyclic_twist(&k2, &[1, 0], 3).ok()?)
        }
        _ => return None,
    })
}

pub fn all() -> Vec<(&'static str, Input)> {
    NAMES.iter().map(|&n| (n, get(n).expect("built-in inputs are valid"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::parse_input;

    #[test]
    fn corpus_builds_and_round_trips() {
        for (name, input) in all() {
            let json = input.to_json();
            let again = parse_input(&json, Some(input.kind())).unwrap();
            assert_eq!(again, input, "{name}");
            assert_eq!(again.to_json(), json, "{name}");
            input.to_fcat().unwrap();
        }
        assert!(get("nothing").is_none());
    }
}
