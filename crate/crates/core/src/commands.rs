//! Command implementations behind the `magcat` binary. Each returns both a
//! text and a JSON rendering; all output is deterministic.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::fcat::{FCat, MetricSpace, RankedPoset};
use crate::fibration::{
    action_from_twists, girth, grothendieck, is_metric_fibration, oplax_product_check, product_formula_check,
    regular_action, FibrationCheck, FibrationError, MetricAction, ProductReport,
};
use crate::formats::{Input, Kind};
use crate::maghom::{
    euler_categorification_check, hochschild_graded_check, mc_complex, path_bound, Basepoints, MagHomError,
};
use crate::magnitude::{classify as classify_cat, coweighting, growth_series, magnitude as mag_of, mobius as mobius_of, poincare_polynomial, weighting, Side};
use crate::novikov::{format_rational, Exponent, NSeries};
use crate::specseq::{build_filtered_chain, path_homology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub text: String,
    pub json: Value,
}

impl Emission {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
                s.push('\n');
                s
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CommandError {
    Validation(String),
    Guardrail(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Validation(_) => 1,
            CommandError::Guardrail(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CommandError::Validation(m) | CommandError::Guardrail(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CommandError {
    CommandError::Validation(e.to_string())
}

fn from_maghom(e: MagHomError) -> CommandError {
    match e {
        MagHomError::Guardrail { .. } => CommandError::Guardrail(e.to_string()),
        other => invalid(other),
    }
}

type Out = Result<Emission, CommandError>;

fn fcat(input: &Input) -> Result<FCat, CommandError> {
    input.to_fcat().map_err(invalid)
}

fn series_json(s: &NSeries) -> Value {
    json!({
        "series": s.to_string(),
        "exact": s.is_exact(),
        "cutoff": s.cutoff().to_string(),
        "terms": s.terms().map(|(e, c)| json!([e.to_string(), format_rational(c)])).collect::<Vec<_>>(),
    })
}

fn object(c: &FCat, name: &str) -> Result<usize, CommandError> {
    c.object_index(name).ok_or_else(|| invalid(format!("unknown object '{name}'")))
}

pub fn magnitude(input: &Input, cutoff: &Exponent) -> Out {
    let m = mag_of(&fcat(input)?, cutoff).map_err(invalid)?;
    Ok(Emission { text: format!("{m}\n"), json: json!({ "magnitude": series_json(&m) }) })
}

pub fn weights(input: &Input, cutoff: &Exponent, side: Side) -> Out {
    let c = fcat(input)?;
    let w = match side {
        Side::Weighting => weighting(&c, cutoff),
        Side::Coweighting => coweighting(&c, cutoff),
    }
    .map_err(invalid)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for (i, (l, v)) in w.labels.iter().zip(&w.values).enumerate() {
        let horizon = w.entry_horizons.get(i).cloned().flatten();
        let _ = write!(text, "{l}: {v}");
        if let Some(h) = &horizon {
            let _ = write!(text, "  (exact to q^{h})");
        }
        text.push('\n');
        rows.push(json!({ "object": l, "value": series_json(v), "exact_to": horizon.map(|h| h.to_string()) }));
    }
    Ok(Emission { text, json: json!({ "side": side.to_string(), "entries": rows }) })
}

pub fn classify(input: &Input) -> Out {
    let k = classify_cat(&fcat(input)?);
    let opt = |e: &Option<Exponent>| e.as_ref().map_or("none".to_string(), Exponent::to_string);
    let text = [
        format!("objects: {}", k.objects),
        format!("morphisms: {}", k.morphisms),
        format!("truncated at: {}", opt(&k.truncated_at)),
        format!("metric-like: {}", k.metric_like),
        format!("uniform: {}", k.uniform),
        format!("epsilon: {}", opt(&k.epsilon)),
        format!("tame: {}", k.tame),
        format!("quasi-tame: {}", k.quasi_tame),
        format!("skeletal: {}", k.skeletal),
        format!("longest path: {}", opt(&k.longest_path)),
        format!("zero-degree cycle: {}", k.tame_witness.as_ref().map_or("none".into(), |w| w.join(", "))),
        format!("degenerate pair: {}", k.degenerate_pair.as_ref().map_or("none".into(), |(a, b)| format!("{a}, {b}"))),
        format!("nontrivial endomorphism: {}", k.nontrivial_endomorphism.clone().unwrap_or_else(|| "none".into())),
    ]
    .join("\n")
        + "\n";
    let json = json!({
        "objects": k.objects,
        "morphisms": k.morphisms,
        "truncated_at": k.truncated_at.map(|e| e.to_string()),
        "metric_like": k.metric_like,
        "uniform": k.uniform,
        "epsilon": k.epsilon.map(|e| e.to_string()),
        "tame": k.tame,
        "tame_witness": k.tame_witness,
        "quasi_tame": k.quasi_tame,
        "skeletal": k.skeletal,
        "longest_path": k.longest_path.map(|e| e.to_string()),
        "degenerate_pair": k.degenerate_pair,
        "nontrivial_endomorphism": k.nontrivial_endomorphism,
    });
    Ok(Emission { text, json })
}

/// `MH^ℓ_n` for `n < max_n`, optionally pointed at `start` (and `end`).
pub fn homology(input: &Input, level: &Exponent, max_n: usize, start: Option<&str>, end: Option<&str>) -> Out {
    let c = fcat(input)?;
    let bp = match (start, end) {
        (None, None) => Basepoints::Free,
        (Some(a), None) => Basepoints::Start(object(&c, a)?),
        (Some(a), Some(b)) => Basepoints::Ends(object(&c, a)?, object(&c, b)?),
        (None, Some(_)) => return Err(invalid("an end point needs a start point")),
    };
    let cx = mc_complex(&c, level, max_n, bp).map_err(from_maghom)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for n in 0..max_n {
        let h = cx.homology(n).map_err(from_maghom)?;
        let _ = writeln!(text, "MH^{level}_{n} = {h}");
        rows.push(json!({
            "n": n,
            "rank": h.betti,
            "torsion": h.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "generators": cx.generators.get(n).map_or(0, Vec::len),
        }));
    }
    Ok(Emission { text, json: json!({ "level": level.to_string(), "homology": rows }) })
}

/// Without `max_n`, the path bound for the cutoff is used.
pub fn euler_check(input: &Input, cutoff: &Exponent, max_n: Option<usize>) -> Out {
    let c = fcat(input)?;
    let max_n = match max_n {
        Some(n) => n,
        None => path_bound(&c, cutoff).map_err(from_maghom)?.0,
    };
    let report = euler_categorification_check(&c, cutoff, max_n).map_err(from_maghom)?;
    let mut text = format!("path bound: {}\n", report.bound);
    let mut rows = Vec::new();
    for r in &report.rows {
        let ok = num_rational::BigRational::from_integer(r.alternating.clone()) == r.magnitude;
        let _ = writeln!(
            text,
            "l = {}: alternating sum {}, magnitude coefficient {}{}",
            r.level,
            r.alternating,
            format_rational(&r.magnitude),
            if ok { "" } else { "  MISMATCH" }
        );
        rows.push(json!({
            "level": r.level.to_string(),
            "alternating": r.alternating.to_string(),
            "magnitude": format_rational(&r.magnitude),
            "agree": ok,
        }));
    }
    let _ = writeln!(text, "{}", if report.agree() { "agree" } else { "disagree" });
    Ok(Emission { text, json: json!({ "bound": report.bound, "rows": rows, "agree": report.agree() }) })
}

pub fn hochschild_check(input: &Input, level: &Exponent, max_n: usize, guardrail: u128) -> Out {
    let c = fcat(input)?;
    let report = hochschild_graded_check(&c, level, max_n, guardrail).map_err(from_maghom)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &report.rows {
        let _ = writeln!(text, "n = {}: HH = {}, MH = {}", r.n, r.hochschild, r.magnitude);
        rows.push(json!({ "n": r.n, "hochschild": r.hochschild.to_string(), "magnitude": r.magnitude.to_string() }));
    }
    let _ = writeln!(text, "{}", if report.agree() { "agree" } else { "disagree" });
    Ok(Emission { text, json: json!({ "level": level.to_string(), "rows": rows, "agree": report.agree() }) })
}

/// `E^r_{p,q}` for `0 ≤ p ≤ max_l` and `0 ≤ p + q < max_n`.
pub fn specseq(input: &Input, page: u64, max_l: u64, max_n: usize) -> Out {
    let fc = build_filtered_chain(&fcat(input)?, max_l, max_n).map_err(invalid)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for p in 0..=max_l as i64 {
        for n in 0..max_n as i64 {
            let e = fc.page(page, p, n - p);
            if e.dim == 0 && e.cap_limited {
                continue;
            }
            let _ = writeln!(text, "E^{page}_{{{},{}}} = {}{}", e.p, e.q, e.dim, if e.cap_limited { "  (cap)" } else { "" });
            rows.push(json!({ "p": e.p, "q": e.q, "dim": e.dim, "cap_limited": e.cap_limited }));
        }
    }
    Ok(Emission { text, json: json!({ "page": page, "max_l": max_l, "max_n": max_n, "entries": rows }) })
}

pub fn pathhom(input: &Input, max_p: usize) -> Out {
    let Input::Digraph(d) = input else {
        return Err(invalid(format!("path homology needs a digraph, got a {}", input.kind())));
    };
    let h = path_homology(d, max_p);
    let text: String = h.iter().enumerate().map(|(p, b)| format!("reduced H_{p} = {b}\n")).collect();
    Ok(Emission { text, json: json!({ "reduced_betti": h }) })
}

pub fn mobius(input: &Input) -> Out {
    let Input::Poset { poset, .. } = input else {
        return Err(invalid(format!("the Möbius function needs a poset, got a {}", input.kind())));
    };
    let mu = mobius_of(poset).map_err(invalid)?;
    let width = poset.elements.iter().map(String::len).max().unwrap_or(1).max(3);
    let mut text = format!("{:>width$}", "");
    for e in &poset.elements {
        let _ = write!(text, " {e:>width$}");
    }
    text.push('\n');
    for (i, row) in mu.iter().enumerate() {
        let _ = write!(text, "{:>width$}", poset.elements[i]);
        for x in row {
            let _ = write!(text, " {x:>width$}");
        }
        text.push('\n');
    }
    Ok(Emission { text, json: json!({ "elements": poset.elements, "mobius": mu }) })
}

pub fn poincare(input: &Input) -> Out {
    let Input::Poset { poset, ranks: Some(r) } = input else {
        return Err(invalid("the Poincaré polynomial needs a ranked poset"));
    };
    let p = poincare_polynomial(&RankedPoset::new(poset.clone(), r.clone()).map_err(invalid)?).map_err(invalid)?;
    Ok(Emission {
        text: format!("pi(q) = {}\nk^min(q) = {}\n", p.classical, p.weighting_form),
        json: json!({ "classical": series_json(&p.classical), "weighting": series_json(&p.weighting_form) }),
    })
}

pub fn growth(input: &Input, cutoff: &Exponent) -> Out {
    let Input::Group(g) = input else {
        return Err(invalid(format!("growth needs a group, got a {}", input.kind())));
    };
    let r = growth_series(g, cutoff).map_err(invalid)?;
    Ok(Emission {
        text: format!(
            "growth = {}\nmagnitude = {}\ncayley weighting = {}\n",
            r.growth, r.magnitude, r.cayley_weighting
        ),
        json: json!({
            "growth": series_json(&r.growth),
            "magnitude": series_json(&r.magnitude),
            "cayley_weighting": series_json(&r.cayley_weighting),
        }),
    })
}

fn metric_text(m: &MetricSpace) -> String {
    let mut s = format!("labels: {}\n", m.labels.join(" "));
    for row in &m.d {
        let cells: Vec<String> = row.iter().map(|x| x.as_ref().map_or("inf".into(), Exponent::to_string)).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

fn fib_err(e: FibrationError) -> CommandError {
    invalid(e)
}

pub fn fib_build(base: &MetricSpace, fiber: &MetricSpace, twists: &[((usize, usize), Vec<usize>)]) -> Out {
    let action = action_from_twists(base, fiber, twists).map_err(fib_err)?;
    let total = grothendieck(&action).map_err(fib_err)?;
    Ok(Emission { text: metric_text(&total.space), json: serde_json::from_str(&Input::Action(action).to_json()).expect("valid json") })
}

pub fn fib_check(total: &MetricSpace, base: &MetricSpace, projection: &[usize]) -> Out {
    match is_metric_fibration(total, base, projection).map_err(fib_err)? {
        FibrationCheck::Fibration(w) => {
            let mut text = String::from("metric fibration\n");
            let mut lifts = Vec::new();
            for (x, row) in w.lifts.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|&z| total.labels[z].clone()).collect();
                let _ = writeln!(text, "lifts of {}: {}", total.labels[x], cells.join(" "));
                lifts.push(json!({ "point": total.labels[x], "lifts": cells }));
            }
            Ok(Emission { text, json: json!({ "fibration": true, "lifts": lifts }) })
        }
        FibrationCheck::Counterexample(f) => Ok(Emission {
            text: format!("not a metric fibration: {f}\n"),
            json: json!({ "fibration": false, "point": f.x, "over": f.y, "candidates": f.candidates }),
        }),
    }
}

fn product_emission(r: &ProductReport, extra: Value) -> Emission {
    let text = format!(
        "Mag E = {}\nMag X = {}\nMag F = {}\nMag X * Mag F = {}\nmagnitude product: {}\nweighting product: {}\n",
        r.total,
        r.base,
        r.fiber,
        r.product,
        if r.magnitude_agrees { "holds" } else { "fails" },
        if r.weighting_agrees { "holds" } else { "fails" },
    );
    let mut json = json!({
        "total": series_json(&r.total),
        "base": series_json(&r.base),
        "fiber": series_json(&r.fiber),
        "product": series_json(&r.product),
        "magnitude_agrees": r.magnitude_agrees,
        "weighting_agrees": r.weighting_agrees,
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut json, extra) {
        m.extend(e);
    }
    Emission { text, json }
}

/// For an action, the metric product formula; for a group, the regular
/// action on its elements.
pub fn fib_product_check(input: &Input, cutoff: &Exponent) -> Out {
    match input {
        Input::Action(a) => {
            let r = product_formula_check(a, cutoff).map_err(fib_err)?;
            let total = grothendieck(a).map_err(fib_err)?;
            let mut e = product_emission(&r, json!({ "girth": girth(&total.space) }));
            let _ = writeln!(e.text, "girth of E: {}", girth(&total.space).map_or("none".into(), |g| g.to_string()));
            Ok(e)
        }
        Input::Group(_) => {
            let raw = regular_action(&fcat(input)?).map_err(fib_err)?;
            let r = oplax_product_check(&raw, cutoff).map_err(fib_err)?;
            Ok(product_emission(&r, json!({})))
        }
        other => Err(invalid(format!("product check needs an action or a group, got a {}", other.kind()))),
    }
}

pub fn validate(input: &Input) -> Out {
    let summary = match input {
        Input::Graph { vertices, edges } => format!("graph: {} vertices, {} edges", vertices.len(), edges.len()),
        Input::Digraph(d) => format!("digraph: {} vertices, {} edges", d.vertices.len(), d.edges.len()),
        Input::Metric(m) => format!("metric: {} points", m.len()),
        Input::Poset { poset, ranks } => {
            format!("poset: {} elements{}", poset.len(), if ranks.is_some() { ", ranked" } else { "" })
        }
        Input::Category(c) => format!("category: {} objects, {} morphisms", c.object_count(), c.morphisms().len()),
        Input::Group(g) => format!("group: {} generators, radius {}", g.generators.len(), g.radius),
        Input::Action(a) => action_summary(a),
    };
    Ok(Emission {
        text: format!("ok: {summary}\n"),
        json: serde_json::from_str(&input.to_json()).expect("valid json"),
    })
}

fn action_summary(a: &MetricAction) -> String {
    format!("action: {} base points, {} fiber points each", a.base.len(), a.fibers.first().map_or(0, MetricSpace::len))
}

/// Runs the acceptance suite. The flag is false when any criterion fails.
pub fn check_all() -> (Emission, bool) {
    let outcomes = crate::checks::run_all();
    let mut text = String::new();
    // elapsed times are left out so the report is reproducible
    for o in &outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{verdict} {:>2} {} (budget {}s): {}", o.id, o.title, o.budget, o.detail);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(text, "{passed} of {} criteria pass", outcomes.len());
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "id": o.id, "title": o.title, "passed": o.passed, "detail": o.detail, "budget_seconds": o.budget }))
        .collect();
    (Emission { text, json: json!({ "criteria": rows, "passed": passed }) }, passed == outcomes.len())
}

/// Kinds accepted by each input-taking command.
pub fn accepts(command: &str, kind: Kind) -> bool {
    match command {
        "pathhom" => kind == Kind::Digraph,
        "mobius" | "poincare" => kind == Kind::Poset,
        "growth" => kind == Kind::Group,
        "fib-product-check" => matches!(kind, Kind::Action | Kind::Group),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn e(n: u64) -> Exponent {
        Exponent::from_int(n)
    }

    #[test]
    fn magnitude_texts() {
        let pt = corpus::get("point").unwrap();
        assert_eq!(magnitude(&pt, &e(3)).unwrap().text, "1\n");
        let k3 = corpus::get("K3").unwrap();
        assert_eq!(magnitude(&k3, &e(2)).unwrap().text, "3 - 6q + 12q^2\n");
    }

    #[test]
    fn guardrail_exit_code() {
        let k3 = corpus::get("K3").unwrap();
        let err = hochschild_check(&k3, &e(2), 3, 10).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = pathhom(&k3, 2).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn homology_text() {
        let k2 = corpus::get("K2").unwrap();
        let out = homology(&k2, &e(1), 2, None, None).unwrap();
        assert_eq!(out.text, "MH^1_0 = 0\nMH^1_1 = Z^2\n");
    }
}
