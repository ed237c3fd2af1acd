//! Input formats. Line formats for graphs, digraphs, metric matrices and
//! posets; a JSON document for every kind, which is also the canonical
//! emission.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fcat::{
    from_finite_poset_unit, from_group, from_poset_ranked, FCat, FCatError, GroupFamily, GroupPresentationBall,
    MetricSpace, Morphism, Poset, RankedPoset,
};
use crate::fibration::{grothendieck, MetricAction};
use crate::novikov::Exponent;
use crate::specseq::Digraph;

/// Where the first problem was found: a line of a text file or a field path
/// of a JSON document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.field) {
            (Some(l), _) => write!(f, "line {l}: {}", self.message),
            (None, Some(p)) => write!(f, "{p}: {}", self.message),
            (None, None) => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ParseError {}

fn at_line(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line: Some(line), field: None, message: message.into() }
}

fn at_field(field: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError { line: None, field: Some(field.into()), message: message.into() }
}

fn whole(message: impl fmt::Display) -> ParseError {
    ParseError { line: None, field: None, message: message.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Graph,
    Digraph,
    Metric,
    Poset,
    Category,
    Group,
    Action,
}

impl Kind {
    pub const ALL: [Kind; 7] =
        [Kind::Graph, Kind::Digraph, Kind::Metric, Kind::Poset, Kind::Category, Kind::Group, Kind::Action];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Graph => "graph",
            Kind::Digraph => "digraph",
            Kind::Metric => "metric",
            Kind::Poset => "poset",
            Kind::Category => "category",
            Kind::Group => "group",
            Kind::Action => "action",
        }
    }
}

impl FromStr for Kind {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| whole(format!("unknown input kind '{s}'")))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A parsed and validated input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Graph { vertices: Vec<String>, edges: Vec<(usize, usize)> },
    Digraph(Digraph),
    Metric(MetricSpace),
    Poset { poset: Poset, ranks: Option<Vec<u64>> },
    Category(FCat),
    Group(GroupPresentationBall),
    Action(MetricAction),
}

impl Input {
    pub fn kind(&self) -> Kind {
        match self {
            Input::Graph { .. } => Kind::Graph,
            Input::Digraph(_) => Kind::Digraph,
            Input::Metric(_) => Kind::Metric,
            Input::Poset { .. } => Kind::Poset,
            Input::Category(_) => Kind::Category,
            Input::Group(_) => Kind::Group,
            Input::Action(_) => Kind::Action,
        }
    }

    /// The metric space behind a graph, digraph, matrix or action total space.
    pub fn metric(&self) -> Option<MetricSpace> {
        match self {
            Input::Graph { vertices, edges } => Some(MetricSpace::from_edges(vertices.clone(), edges, false)),
            Input::Digraph(d) => Some(MetricSpace::from_edges(d.vertices.clone(), &d.edges, true)),
            Input::Metric(m) => Some(m.clone()),
            Input::Action(a) => grothendieck(a).ok().map(|t| t.space),
            _ => None,
        }
    }

    /// Posets with ranks use rank differences as degrees, otherwise every
    /// strict relation has degree 1; groups give the one-object word-length
    /// category.
    pub fn to_fcat(&self) -> Result<FCat, FCatError> {
        match self {
            Input::Poset { poset, ranks: Some(r) } => from_poset_ranked(&RankedPoset::new(poset.clone(), r.clone())?),
            Input::Poset { poset, ranks: None } => from_finite_poset_unit(poset),
            Input::Category(c) => Ok(c.clone()),
            Input::Group(g) => Ok(from_group(g)?.0),
            other => other.metric().expect("metric-backed input").to_fcat(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Doc::from_input(self)).expect("documents serialize");
        s.push('\n');
        s
    }
}

// ---- line formats ----

fn records(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

#[derive(Default)]
struct Names {
    list: Vec<String>,
    index: HashMap<String, usize>,
}

impl Names {
    fn get(&mut self, s: &str) -> usize {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        self.list.push(s.to_string());
        self.index.insert(s.to_string(), self.list.len() - 1);
        self.list.len() - 1
    }
}

fn check_name(line: usize, s: &str) -> Result<(), ParseError> {
    if s.is_empty() || s.chars().any(char::is_whitespace) {
        return Err(at_line(line, format!("bad vertex name '{s}'")));
    }
    Ok(())
}

fn parse_edges(text: &str, arrow: &str) -> Result<(Vec<String>, Vec<(usize, usize)>), ParseError> {
    let mut names = Names::default();
    let mut edges = Vec::new();
    for (line, rec) in records(text) {
        match rec.split_once(arrow) {
            Some((a, b)) => {
                let (a, b) = (a.trim(), b.trim());
                check_name(line, a)?;
                check_name(line, b)?;
                if a == b {
                    return Err(at_line(line, format!("loop at '{a}'")));
                }
                let e = (names.get(a), names.get(b));
                edges.push(e);
            }
            None => {
                check_name(line, rec)?;
                names.get(rec);
            }
        }
    }
    edges.sort();
    edges.dedup();
    Ok((names.list, edges))
}

fn parse_distance(s: &str) -> Result<Option<Exponent>, String> {
    if s == "inf" {
        return Ok(None);
    }
    s.parse::<Exponent>().map(Some).map_err(|e| e.to_string())
}

/// Rows of distances separated by newlines or `/`; an optional first record
/// `labels: a b c` names the points.
fn parse_metric_text(text: &str) -> Result<MetricSpace, ParseError> {
    let mut labels: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, Vec<Option<Exponent>>)> = Vec::new();
    for (line, rec) in records(text) {
        if let Some(rest) = rec.strip_prefix("labels:") {
            labels = Some(rest.split_whitespace().map(str::to_string).collect());
            continue;
        }
        // "/" separates rows only when surrounded by spaces, so "1/2" is a rational
        for row in rec.split(" / ") {
            let mut r = Vec::new();
            for tok in row.split_whitespace() {
                r.push(parse_distance(tok).map_err(|e| at_line(line, e))?);
            }
            rows.push((line, r));
        }
    }
    let n = rows.len();
    for (line, r) in &rows {
        if r.len() != n {
            return Err(at_line(*line, format!("row has {} entries, expected {n}", r.len())));
        }
    }
    let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
    if labels.len() != n {
        return Err(whole(format!("{} labels for {n} rows", labels.len())));
    }
    MetricSpace::new(labels, rows.into_iter().map(|r| r.1).collect()).map_err(whole)
}

fn parse_poset_text(text: &str) -> Result<Input, ParseError> {
    let mut names = Names::default();
    let mut covers = Vec::new();
    let mut ranks: Vec<(String, u64)> = Vec::new();
    for (line, rec) in records(text) {
        if let Some(rest) = rec.strip_prefix("rank ") {
            let (a, k) = rest.split_once('=').ok_or_else(|| at_line(line, "expected 'rank a = k'"))?;
            let k: u64 = k.trim().parse().map_err(|_| at_line(line, format!("bad rank '{}'", k.trim())))?;
            check_name(line, a.trim())?;
            names.get(a.trim());
            ranks.push((a.trim().to_string(), k));
        } else if let Some((a, b)) = rec.split_once('<') {
            let (a, b) = (a.trim(), b.trim());
            check_name(line, a)?;
            check_name(line, b)?;
            let e = (names.get(a), names.get(b));
            covers.push(e);
        } else {
            check_name(line, rec)?;
            names.get(rec);
        }
    }
    let poset = Poset::from_covers(names.list.clone(), &covers).map_err(whole)?;
    let ranks: Option<Vec<u64>> = if ranks.is_empty() {
        None
    } else {
        let mut r: Vec<Option<u64>> = vec![None; names.list.len()];
        for (a, k) in ranks {
            r[names.index[&a]] = Some(k);
        }
        let missing = r.iter().position(Option::is_none);
        if let Some(i) = missing {
            return Err(whole(format!("no rank for '{}'", names.list[i])));
        }
        Some(r.into_iter().map(Option::unwrap).collect())
    };
    if let Some(r) = &ranks {
        RankedPoset::new(poset.clone(), r.clone()).map_err(whole)?;
    }
    Ok(Input::Poset { poset, ranks })
}

// ---- JSON documents ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricDoc {
    points: Vec<String>,
    distances: Vec<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MorphismDoc {
    name: String,
    source: String,
    target: String,
    degree: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    identity: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum FamilyDoc {
    Cyclic { order: u64 },
    FreeAbelian { rank: usize },
    Free { rank: usize },
    Table { elements: Vec<String>, products: Vec<(String, String, String)> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransportDoc {
    from: String,
    to: String,
    map: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Doc {
    Graph {
        vertices: Vec<String>,
        edges: Vec<(String, String)>,
    },
    Digraph {
        vertices: Vec<String>,
        edges: Vec<(String, String)>,
    },
    Metric {
        points: Vec<String>,
        distances: Vec<Vec<String>>,
    },
    Poset {
        elements: Vec<String>,
        covers: Vec<(String, String)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ranks: Option<BTreeMap<String, u64>>,
    },
    Category {
        objects: Vec<String>,
        morphisms: Vec<MorphismDoc>,
        /// `(g, f, g∘f)` by morphism name.
        composition: Vec<(String, String, String)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<String>,
    },
    Group {
        family: FamilyDoc,
        generators: Vec<String>,
        #[serde(default = "yes")]
        symmetrize: bool,
        radius: u64,
    },
    Action {
        base: MetricDoc,
        fibers: Vec<MetricDoc>,
        transport: Vec<TransportDoc>,
    },
}

fn yes() -> bool {
    true
}

fn metric_doc(m: &MetricSpace) -> MetricDoc {
    MetricDoc {
        points: m.labels.clone(),
        distances: m.d.iter().map(|r| r.iter().map(|x| x.as_ref().map_or("inf".into(), |e| e.to_string())).collect()).collect(),
    }
}

fn pairs(names: &[String], edges: &[(usize, usize)]) -> Vec<(String, String)> {
    edges.iter().map(|&(a, b)| (names[a].clone(), names[b].clone())).collect()
}

impl Doc {
    fn from_input(input: &Input) -> Doc {
        match input {
            Input::Graph { vertices, edges } => Doc::Graph { vertices: vertices.clone(), edges: pairs(vertices, edges) },
            Input::Digraph(d) => Doc::Digraph { vertices: d.vertices.clone(), edges: pairs(&d.vertices, &d.edges) },
            Input::Metric(m) => {
                let MetricDoc { points, distances } = metric_doc(m);
                Doc::Metric { points, distances }
            }
            Input::Poset { poset, ranks } => Doc::Poset {
                elements: poset.elements.clone(),
                covers: pairs(&poset.elements, &poset.covers()),
                ranks: ranks.as_ref().map(|r| poset.elements.iter().cloned().zip(r.iter().copied()).collect()),
            },
            Input::Category(c) => {
                let name = |i: usize| c.morphism(i).name.clone();
                Doc::Category {
                    objects: c.objects().to_vec(),
                    morphisms: c
                        .morphisms()
                        .iter()
                        .map(|m| MorphismDoc {
                            name: m.name.clone(),
                            source: c.objects()[m.source].clone(),
                            target: c.objects()[m.target].clone(),
                            degree: m.degree.to_string(),
                            identity: m.identity,
                        })
                        .collect(),
                    composition: c.composition_table().into_iter().map(|(g, f, h)| (name(g), name(f), name(h))).collect(),
                    horizon: c.horizon().map(Exponent::to_string),
                }
            }
            Input::Group(g) => Doc::Group {
                family: match &g.family {
                    GroupFamily::Cyclic(n) => FamilyDoc::Cyclic { order: *n },
                    GroupFamily::FreeAbelian(k) => FamilyDoc::FreeAbelian { rank: *k },
                    GroupFamily::Free(k) => FamilyDoc::Free { rank: *k },
                    GroupFamily::Table { names, mul } => FamilyDoc::Table {
                        elements: names.clone(),
                        products: (0..names.len())
                            .flat_map(|a| (0..names.len()).map(move |b| (a, b)))
                            .map(|(a, b)| (names[a].clone(), names[b].clone(), names[mul[a][b]].clone()))
                            .collect(),
                    },
                },
                generators: g.generators.iter().map(|s| g.family.label(s)).collect(),
                symmetrize: g.symmetrize,
                radius: g.radius,
            },
            Input::Action(a) => Doc::Action {
                base: metric_doc(&a.base),
                fibers: a.fibers.iter().map(metric_doc).collect(),
                transport: (0..a.base.len())
                    .flat_map(|x| (0..a.base.len()).map(move |y| (x, y)))
                    .filter(|(x, y)| x != y)
                    .map(|(x, y)| TransportDoc {
                        from: a.base.labels[x].clone(),
                        to: a.base.labels[y].clone(),
                        map: a.transport[x][y].iter().map(|&p| a.fibers[y].labels[p].clone()).collect(),
                    })
                    .collect(),
            },
        }
    }
}

fn lookup(names: &[String], s: &str, field: &str) -> Result<usize, ParseError> {
    names.iter().position(|n| n == s).ok_or_else(|| at_field(field, format!("unknown name '{s}'")))
}

fn metric_from_doc(doc: MetricDoc, field: &str) -> Result<MetricSpace, ParseError> {
    let n = doc.points.len();
    let mut d = Vec::new();
    for (i, row) in doc.distances.iter().enumerate() {
        if row.len() != n {
            return Err(at_field(format!("{field}distances[{i}]"), format!("expected {n} entries")));
        }
        let mut r = Vec::new();
        for (j, s) in row.iter().enumerate() {
            r.push(parse_distance(s).map_err(|e| at_field(format!("{field}distances[{i}][{j}]"), e))?);
        }
        d.push(r);
    }
    if d.len() != n {
        return Err(at_field(format!("{field}distances"), format!("expected {n} rows")));
    }
    MetricSpace::new(doc.points, d).map_err(|e| at_field(format!("{field}distances"), e.to_string()))
}

fn edges_from_doc(vertices: &[String], edges: &[(String, String)]) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut out = Vec::new();
    for (i, (a, b)) in edges.iter().enumerate() {
        let f = format!("edges[{i}]");
        let e = (lookup(vertices, a, &f)?, lookup(vertices, b, &f)?);
        if e.0 == e.1 {
            return Err(at_field(f, format!("loop at '{a}'")));
        }
        out.push(e);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn distinct(names: &[String], field: &str) -> Result<(), ParseError> {
    let mut seen = std::collections::HashSet::new();
    for (i, n) in names.iter().enumerate() {
        if !seen.insert(n) {
            return Err(at_field(format!("{field}[{i}]"), format!("duplicate name '{n}'")));
        }
    }
    Ok(())
}

fn from_doc(doc: Doc) -> Result<Input, ParseError> {
    match doc {
        Doc::Graph { vertices, edges } => {
            distinct(&vertices, "vertices")?;
            let edges = edges_from_doc(&vertices, &edges)?;
            Ok(Input::Graph { vertices, edges })
        }
        Doc::Digraph { vertices, edges } => {
            distinct(&vertices, "vertices")?;
            let edges = edges_from_doc(&vertices, &edges)?;
            Ok(Input::Digraph(Digraph::new(vertices, edges).map_err(whole)?))
        }
        Doc::Metric { points, distances } => Ok(Input::Metric(metric_from_doc(MetricDoc { points, distances }, "")?)),
        Doc::Poset { elements, covers, ranks } => {
            distinct(&elements, "elements")?;
            let mut cs = Vec::new();
            for (i, (a, b)) in covers.iter().enumerate() {
                let f = format!("covers[{i}]");
                cs.push((lookup(&elements, a, &f)?, lookup(&elements, b, &f)?));
            }
            let poset = Poset::from_covers(elements.clone(), &cs).map_err(|e| at_field("covers", e.to_string()))?;
            let ranks = match ranks {
                None => None,
                Some(map) => {
                    let mut r = Vec::new();
                    for e in &elements {
                        r.push(*map.get(e).ok_or_else(|| at_field("ranks", format!("no rank for '{e}'")))?);
                    }
                    if let Some(k) = map.keys().find(|k| !elements.contains(k)) {
                        return Err(at_field("ranks", format!("unknown name '{k}'")));
                    }
                    RankedPoset::new(poset.clone(), r.clone()).map_err(|e| at_field("ranks", e.to_string()))?;
                    Some(r)
                }
            };
            Ok(Input::Poset { poset, ranks })
        }
        Doc::Category { objects, morphisms, composition, horizon } => {
            let mut ms = Vec::new();
            let names: Vec<String> = morphisms.iter().map(|m| m.name.clone()).collect();
            distinct(&names, "morphisms")?;
            for (i, m) in morphisms.into_iter().enumerate() {
                let f = format!("morphisms[{i}]");
                ms.push(Morphism {
                    source: lookup(&objects, &m.source, &format!("{f}.source"))?,
                    target: lookup(&objects, &m.target, &format!("{f}.target"))?,
                    degree: m.degree.parse().map_err(|e: crate::novikov::SeriesError| at_field(format!("{f}.degree"), e.to_string()))?,
                    identity: m.identity,
                    name: m.name,
                });
            }
            let mut table = Vec::new();
            for (i, (g, f, h)) in composition.iter().enumerate() {
                let field = format!("composition[{i}]");
                table.push((lookup(&names, g, &field)?, lookup(&names, f, &field)?, lookup(&names, h, &field)?));
            }
            let horizon = match horizon {
                Some(h) => Some(h.parse().map_err(|e: crate::novikov::SeriesError| at_field("horizon", e.to_string()))?),
                None => None,
            };
            Ok(Input::Category(FCat::new(objects, ms, table, horizon).map_err(whole)?))
        }
        Doc::Group { family, generators, symmetrize, radius } => {
            let family = match family {
                FamilyDoc::Cyclic { order } => GroupFamily::Cyclic(order),
                FamilyDoc::FreeAbelian { rank } => GroupFamily::FreeAbelian(rank),
                FamilyDoc::Free { rank } => GroupFamily::Free(rank),
                FamilyDoc::Table { elements, products } => {
                    distinct(&elements, "family.elements")?;
                    let n = elements.len();
                    let mut mul = vec![vec![usize::MAX; n]; n];
                    for (i, (a, b, c)) in products.iter().enumerate() {
                        let f = format!("family.products[{i}]");
                        let (a, b, c) = (lookup(&elements, a, &f)?, lookup(&elements, b, &f)?, lookup(&elements, c, &f)?);
                        mul[a][b] = c;
                    }
                    if mul.iter().flatten().any(|&x| x == usize::MAX) {
                        return Err(at_field("family.products", "multiplication table is incomplete"));
                    }
                    GroupFamily::Table { names: elements, mul }
                }
            };
            family.validate().map_err(|e| at_field("family", e.to_string()))?;
            let mut gens = Vec::new();
            for (i, s) in generators.iter().enumerate() {
                let g = family
                    .parse_label(s)
                    .ok_or_else(|| at_field(format!("generators[{i}]"), format!("cannot read '{s}'")))?;
                gens.push(family.normalize(&g).map_err(|e| at_field(format!("generators[{i}]"), e.to_string()))?);
            }
            let ball = GroupPresentationBall { family, generators: gens, symmetrize, radius };
            ball.validate().map_err(whole)?;
            Ok(Input::Group(ball))
        }
        Doc::Action { base, fibers, transport } => {
            let base = metric_from_doc(base, "base.")?;
            let mut fs = Vec::new();
            for (i, f) in fibers.into_iter().enumerate() {
                fs.push(metric_from_doc(f, &format!("fibers[{i}]."))?);
            }
            let n = base.len();
            if fs.len() != n {
                return Err(at_field("fibers", format!("expected {n} fibers")));
            }
            let mut t: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
            for (x, row) in t.iter_mut().enumerate() {
                row[x] = Some((0..fs[x].len()).collect());
            }
            for (i, doc) in transport.iter().enumerate() {
                let f = format!("transport[{i}]");
                let (x, y) = (lookup(&base.labels, &doc.from, &f)?, lookup(&base.labels, &doc.to, &f)?);
                let mut map = Vec::new();
                for p in &doc.map {
                    map.push(lookup(&fs[y].labels, p, &format!("{f}.map"))?);
                }
                t[x][y] = Some(map);
            }
            let mut transport = Vec::new();
            for (x, row) in t.into_iter().enumerate() {
                let mut r = Vec::new();
                for (y, m) in row.into_iter().enumerate() {
                    r.push(m.ok_or_else(|| {
                        at_field("transport", format!("missing {} -> {}", base.labels[x], base.labels[y]))
                    })?);
                }
                transport.push(r);
            }
            Ok(Input::Action(MetricAction::new(base, fs, transport).map_err(whole)?))
        }
    }
}

fn parse_json(text: &str, kind: Option<Kind>) -> Result<Input, ParseError> {
    let doc: Doc = serde_json::from_str(text)
        .map_err(|e| ParseError { line: Some(e.line()), field: None, message: e.to_string() })?;
    let input = from_doc(doc)?;
    if let Some(k) = kind {
        if k != input.kind() {
            return Err(at_field("kind", format!("expected {k}, found {}", input.kind())));
        }
    }
    Ok(input)
}

/// Parses a document. JSON is recognised by a leading `{`; otherwise the
/// line format of `kind`, or of the inferred kind, is used.
pub fn parse_input(text: &str, kind: Option<Kind>) -> Result<Input, ParseError> {
    if text.trim_start().starts_with('{') {
        return parse_json(text, kind);
    }
    match kind {
        Some(Kind::Graph) => {
            let (vertices, edges) = parse_edges(text, "--")?;
            Ok(Input::Graph { vertices, edges })
        }
        Some(Kind::Digraph) => {
            let (vertices, edges) = parse_edges(text, "->")?;
            Ok(Input::Digraph(Digraph::new(vertices, edges).map_err(whole)?))
        }
        Some(Kind::Metric) => Ok(Input::Metric(parse_metric_text(text)?)),
        Some(Kind::Poset) => parse_poset_text(text),
        Some(k) => Err(whole(format!("{k} inputs must be JSON documents"))),
        None => parse_input(text, Some(infer_kind(text))),
    }
}

/// Guesses the line format from the first line that names an edge or
/// relation. Rows of numbers are a metric and bare names an edgeless graph.
pub fn infer_kind(text: &str) -> Kind {
    let numeric = |t: &str| t == "inf" || t.parse::<Exponent>().is_ok();
    let mut names = false;
    for (_, line) in records(text) {
        if line.contains("->") {
            return Kind::Digraph;
        }
        if line.contains("--") {
            return Kind::Graph;
        }
        if line.contains('<') || line.starts_with("rank ") {
            return Kind::Poset;
        }
        if !line.starts_with("labels:") && !line.split_whitespace().filter(|t| *t != "/").all(numeric) {
            names = true;
        }
    }
    if names {
        Kind::Graph
    } else {
        Kind::Metric
    }
}

/// Twist lines `u -- v : p q ...`: `F(u,v)` sends the fiber points in order
/// to the listed labels, and `F(v,u)` is its inverse.
pub fn parse_twists(text: &str, base: &MetricSpace, fiber: &MetricSpace) -> Result<Vec<((usize, usize), Vec<usize>)>, ParseError> {
    let mut out = Vec::new();
    for (line, rec) in records(text) {
        let (edge, perm) = rec.split_once(':').ok_or_else(|| at_line(line, "expected 'u -- v : permutation'"))?;
        let (a, b) = edge.split_once("--").ok_or_else(|| at_line(line, "expected 'u -- v'"))?;
        let find = |s: &str, names: &[String]| {
            names.iter().position(|n| n == s).ok_or_else(|| at_line(line, format!("unknown name '{s}'")))
        };
        let (x, y) = (find(a.trim(), &base.labels)?, find(b.trim(), &base.labels)?);
        let map = perm.split_whitespace().map(|p| find(p, &fiber.labels)).collect::<Result<Vec<_>, _>>()?;
        if map.len() != fiber.len() {
            return Err(at_line(line, format!("permutation has {} entries, fiber has {}", map.len(), fiber.len())));
        }
        out.push(((x, y), map));
    }
    Ok(out)
}

/// Map lines `a -> x` from total-space points to base points.
pub fn parse_point_map(text: &str, total: &MetricSpace, base: &MetricSpace) -> Result<Vec<usize>, ParseError> {
    let mut out = vec![None; total.len()];
    for (line, rec) in records(text) {
        let (a, x) = rec.split_once("->").ok_or_else(|| at_line(line, "expected 'a -> x'"))?;
        let find = |s: &str, names: &[String]| {
            names.iter().position(|n| n == s).ok_or_else(|| at_line(line, format!("unknown name '{s}'")))
        };
        let (a, x) = (find(a.trim(), &total.labels)?, find(x.trim(), &base.labels)?);
        if out[a].replace(x).is_some() {
            return Err(at_line(line, format!("'{}' is mapped twice", total.labels[a])));
        }
    }
    out.iter()
        .enumerate()
        .map(|(a, x)| x.ok_or_else(|| whole(format!("'{}' is not mapped", total.labels[a]))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_are_inferred() {
        assert_eq!(infer_kind("a -- b"), Kind::Graph);
        assert_eq!(infer_kind("x\ny"), Kind::Graph);
        assert_eq!(infer_kind("# note\na -> b"), Kind::Digraph);
        assert_eq!(infer_kind("a < b\nrank a = 0"), Kind::Poset);
        assert_eq!(infer_kind("labels: a b\n0 1/2 / inf 0"), Kind::Metric);
    }

    #[test]
    fn edge_list_is_k2() {
        let g = parse_input("a -- b\n", Some(Kind::Graph)).unwrap();
        let m = g.metric().unwrap();
        assert_eq!(m.labels, vec!["a", "b"]);
        assert_eq!(m.d[0][1], Some(Exponent::from_int(1)));
    }

    #[test]
    fn inline_matrix_is_k2() {
        let m = parse_input("0 1 / 1 0", Some(Kind::Metric)).unwrap();
        let g = parse_input("0 -- 1", Some(Kind::Graph)).unwrap();
        assert_eq!(m.metric(), g.metric());
        let half = parse_input("0 1/2\n1/2 0", Some(Kind::Metric)).unwrap();
        assert_eq!(half.metric().unwrap().d[0][1], Some(Exponent::new(1, 2).unwrap()));
    }

    #[test]
    fn diagnostics() {
        let e = parse_input("0 1/0\n1 0", Some(Kind::Metric)).unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse_input("a -- b\nc --\n", Some(Kind::Graph)).unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = parse_input("0 1\n1", Some(Kind::Metric)).unwrap_err();
        assert_eq!(e.line, Some(2));
        let doc = r#"{"kind":"category","objects":["x"],"morphisms":[{"name":"id","source":"x","target":"y","degree":"0","identity":true}],"composition":[]}"#;
        let e = parse_input(doc, None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("morphisms[0].target"));
        let doc = r#"{"kind":"category","objects":["x"],"morphisms":[{"name":"id","source":"x","target":"x","degree":"1/0","identity":true}],"composition":[]}"#;
        let e = parse_input(doc, None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("morphisms[0].degree"));
        assert!(parse_input("{\"kind\": \"graph\",\n \"vertices\": [1]}", None).unwrap_err().line.is_some());
        assert!(parse_input("a -- b", Some(Kind::Category)).is_err());
    }

    #[test]
    fn posets() {
        let p = parse_input("0 < x\n0 < y\nx < 1\ny < 1\nrank 0 = 0\nrank x = 1\nrank y = 1\nrank 1 = 2", Some(Kind::Poset)).unwrap();
        let Input::Poset { ranks, .. } = &p else { panic!() };
        assert_eq!(ranks.as_deref(), Some(&[0, 1, 1, 2][..]));
        assert!(parse_input("a < b\nrank a = 0", Some(Kind::Poset)).is_err());
        let round = parse_input(&p.to_json(), None).unwrap();
        assert_eq!(round, p);
    }

    #[test]
    fn json_round_trips() {
        for (text, kind) in [
            ("a -- b\nb -- c\nd", Kind::Graph),
            ("a -> b\nb -> c", Kind::Digraph),
            ("labels: p q\n0 inf\n2 0", Kind::Metric),
        ] {
            let a = parse_input(text, Some(kind)).unwrap();
            let json = a.to_json();
            let b = parse_input(&json, Some(kind)).unwrap();
            assert_eq!(a, b);
            assert_eq!(json, b.to_json());
        }
    }
}
