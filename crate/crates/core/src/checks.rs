//! The acceptance suite: one check per criterion, each timed against its
//! budget and run from the built-in corpus.

use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{arrangement_poincare, central_lines};
use crate::commands::{self, Emission, Format};
use crate::corpus;
use crate::fcat::{FCat, Functor, MetricSpace, Morphism};
use crate::fibration::{
    find_isometry, girth, grothendieck, product_formula_check, regular_action, round_trip,
};
use crate::formats::Input;
use crate::maghom::{
    euler_categorification_check, hochschild_complex, hochschild_graded_check, mc_complex, path_bound, Basepoints,
    HomologySummary,
};
use crate::magnitude::{
    classify, growth_series, magnitude, magnitude_with, path_expansion_magnitude, weighting, Side, Strategy,
};
use crate::novikov::{Exponent, NSeries};
use crate::specseq::{build_filtered_chain, e2_vs_path_homology, r_homotopy_invariance_check, Digraph, RNatural};

pub const GUARDRAIL: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:>2} {} ({:.3}s of {}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.budget,
            self.detail
        )
    }
}

type Check = fn() -> Result<String, String>;

const CHECKS: [(&str, f64, Check); 13] = [
    ("point normalization", 0.1, point),
    ("product formula", 1.0, product_formula),
    ("oracle equivalence", 5.0, oracle_equivalence),
    ("finite category", 0.1, finite_category),
    ("simplicial Euler characteristic", 0.1, simplicial),
    ("growth series", 1.0, growth),
    ("Poincaré polynomial", 0.5, poincare),
    ("categorification", 30.0, categorification),
    ("Kolmogorov invariance", 0.5, kolmogorov),
    ("Hochschild agreement", 10.0, hochschild),
    ("spectral sequence", 30.0, spectral_sequence),
    ("r-homotopy", 10.0, r_homotopy),
    ("property suites", 60.0, properties),
];

pub fn count() -> usize {
    CHECKS.len()
}

/// Runs criterion `id` (1-based).
pub fn run(id: usize) -> Outcome {
    let (title, budget, check) = CHECKS[id - 1];
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let within = elapsed <= Duration::from_secs_f64(budget);
    let (passed, detail) = match result {
        Ok(d) if within => (true, d),
        Ok(d) => (false, format!("{d}; over budget")),
        Err(e) => (false, e),
    };
    Outcome { id, title, passed, detail, seconds: elapsed.as_secs_f64(), budget }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=CHECKS.len()).map(run).collect()
}

fn e(n: u64) -> Exponent {
    Exponent::from_int(n)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn builtin(name: &str) -> Result<Input, String> {
    corpus::get(name).ok_or_else(|| format!("missing built-in {name}"))
}

fn cat(name: &str) -> Result<FCat, String> {
    builtin(name)?.to_fcat().map_err(|e| e.to_string())
}

fn metric(name: &str) -> Result<MetricSpace, String> {
    builtin(name)?.metric().ok_or_else(|| format!("{name} is not a metric space"))
}

fn homology_table(c: &FCat, levels: u64, max_n: usize) -> Result<Vec<Vec<HomologySummary>>, String> {
    (0..=levels)
        .map(|l| {
            let cx = mc_complex(c, &e(l), max_n + 1, Basepoints::Free).map_err(|e| e.to_string())?;
            (0..=max_n).map(|n| cx.homology(n).map_err(|e| e.to_string())).collect()
        })
        .collect()
}

fn point() -> Result<String, String> {
    let c = cat("point")?;
    let m = magnitude(&c, &e(3)).map_err(|e| e.to_string())?;
    ensure(m == NSeries::one(e(3)), || format!("Mag = {m}"))?;
    for (l, row) in homology_table(&c, 3, 3)?.iter().enumerate() {
        for (n, h) in row.iter().enumerate() {
            let want = if l == 0 && n == 0 { HomologySummary { betti: 1, torsion: vec![] } } else { HomologySummary::zero() };
            ensure(*h == want, || format!("MH^{l}_{n} = {h}"))?;
        }
    }
    Ok("Mag = 1, MH^0_0 = Z, all else 0".into())
}

fn product_formula() -> Result<String, String> {
    let cutoff = e(9);
    let mag = |name: &str| magnitude(&cat(name)?, &cutoff).map_err(|e| e.to_string());
    let (a, b) = (mag("K3xK2")?, mag("K33")?);
    let prod = mag("K3")?.mul(&mag("K2")?).map_err(|e| e.to_string())?;
    ensure(a == b && b == prod, || format!("{a} / {b} / {prod}"))?;
    let (x, y) = (metric("K3xK2")?, metric("K33")?);
    ensure(girth(&x) == Some(3) && girth(&y) == Some(4), || "girths differ from 3 and 4".into())?;
    ensure(find_isometry(&x, &y, None).is_none(), || "found an isometry".into())?;
    let Input::Action(twist) = builtin("K3-twist")? else {
        return Err("K3-twist is not an action".into());
    };
    let r = product_formula_check(&twist, &cutoff).map_err(|e| e.to_string())?;
    ensure(r.holds(), || "twisted bundle breaks the product formula".into())?;
    Ok(format!("Mag = {a}; girth 3 vs 4, not isometric"))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut tested = Vec::new();
    for (name, input) in corpus::all() {
        let c = input.to_fcat().map_err(|e| e.to_string())?;
        if !classify(&c).uniform {
            continue;
        }
        let cutoff = c.horizon().map_or(e(5), |h| h.clone().min(e(5)));
        let a = magnitude_with(&c, &cutoff, Strategy::Neumann).map_err(|e| format!("{name}: {e}"))?;
        let b = path_expansion_magnitude(&c, &cutoff).map_err(|e| format!("{name}: {e}"))?;
        ensure(a == b, || format!("{name}: {a} vs {b}"))?;
        tested.push(name);
    }
    ensure(tested.len() >= 10, || format!("only {} uniform categories", tested.len()))?;
    Ok(format!("{} categories agree", tested.len()))
}

/// `ℤ/2` as a one-object category with every morphism in degree 0.
pub fn z2_degree_zero() -> FCat {
    let m = |name: &str, identity| Morphism { name: name.into(), source: 0, target: 0, degree: Exponent::zero(), identity };
    FCat::new(
        vec!["*".into()],
        vec![m("e", true), m("s", false)],
        vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
        None,
    )
    .expect("the group axioms hold")
}

fn finite_category() -> Result<String, String> {
    let cutoff = e(3);
    let m = magnitude_with(&z2_degree_zero(), &cutoff, Strategy::ConstantTermLu).map_err(|e| e.to_string())?;
    let half = NSeries::monomial(BigRational::new(1.into(), 2.into()), Exponent::zero(), cutoff);
    ensure(m == half, || format!("Mag = {m}"))?;
    Ok(format!("Mag = {m}"))
}

fn simplicial() -> Result<String, String> {
    let c = cat("face-poset")?;
    let m = magnitude(&c, &e(4)).map_err(|e| e.to_string())?;
    ensure(m == NSeries::from_int_coeffs(e(4), &[6, -6]), || format!("Mag = {m}"))?;
    ensure(m.is_exact(), || "not exact".into())?;
    let chi = m.eval_at_one().map_err(|e| e.to_string())?;
    ensure(chi.is_zero(), || format!("value {chi} at q = 1"))?;
    Ok(format!("Mag = {m}, 0 at q = 1"))
}

fn growth() -> Result<String, String> {
    let cutoff = e(7);
    let Input::Group(z5) = builtin("Z5")? else {
        return Err("Z5 is not a group".into());
    };
    let g = growth_series(&z5, &cutoff).map_err(|e| e.to_string())?;
    let want = NSeries::from_int_coeffs(cutoff.clone(), &[1, 2, 2]).invert().map_err(|e| e.to_string())?;
    ensure(g.magnitude == want, || format!("Mag = {}", g.magnitude))?;
    let raw = regular_action(&cat("Z5")?).map_err(|e| e.to_string())?;
    let (total, _) = raw.grothendieck().map_err(|e| e.to_string())?;
    let w = weighting(&total, &cutoff).map_err(|e| e.to_string())?;
    ensure(w.values.iter().all(|v| *v == want), || "Cayley weighting differs at some vertex".into())?;
    let c5 = weighting(&cat("C5")?, &cutoff).map_err(|e| e.to_string())?;
    ensure(c5.values.iter().all(|v| *v == want), || "C5 weighting differs".into())?;

    let Input::Group(line) = builtin("Z-ball")? else {
        return Err("Z-ball is not a group".into());
    };
    let g = growth_series(&line, &e(4)).map_err(|e| e.to_string())?;
    let want = NSeries::from_int_coeffs(e(4), &[1, -2, 2, -2, 2]);
    ensure(g.cayley_weighting == want, || format!("weighting at 0 = {}", g.cayley_weighting))?;
    Ok(format!("Mag(Z/5) = {}; weighting at 0 in Z = {want}", g.magnitude.truncate(&e(3))))
}

fn poincare() -> Result<String, String> {
    let p = arrangement_poincare(&central_lines(&[(1, 0), (0, 1)])).map_err(|e| e.to_string())?;
    ensure(p.agree(), || "power set and intersection poset disagree".into())?;
    let want = NSeries::from_int_coeffs(e(2), &[1, 2, 1]);
    for side in [&p.power_set, &p.intersection] {
        ensure(side.classical == want, || format!("pi = {}", side.classical))?;
        let flipped = side.classical.substitute_neg_q().map_err(|e| e.to_string())?;
        ensure(flipped == side.weighting_form, || format!("k^0 = {}", side.weighting_form))?;
    }
    Ok(format!("pi = {want}, k^0 = {}", p.intersection.weighting_form))
}

fn categorification() -> Result<String, String> {
    let cutoff = e(5);
    for name in ["K2", "K3", "C4", "C5"] {
        let c = cat(name)?;
        let (bound, _) = path_bound(&c, &cutoff).map_err(|e| e.to_string())?;
        let r = euler_categorification_check(&c, &cutoff, bound).map_err(|e| format!("{name}: {e}"))?;
        if let Some(row) = r.first_divergence() {
            return Err(format!("{name} at level {}", row.level));
        }
    }
    Ok("K2, K3, C4, C5 agree for l <= 5".into())
}

fn kolmogorov() -> Result<String, String> {
    let a = homology_table(&cat("degenerate-pair")?, 3, 3)?;
    let b = homology_table(&cat("point")?, 3, 3)?;
    ensure(a == b, || "summaries differ".into())?;
    Ok("equal for l, n <= 3".into())
}

fn hochschild() -> Result<String, String> {
    let c = cat("K2")?;
    for l in 0..=2 {
        let r = hochschild_graded_check(&c, &e(l), 3, GUARDRAIL).map_err(|e| e.to_string())?;
        ensure(r.agree(), || format!("level {l} disagrees"))?;
    }
    Ok("K2 agrees for l <= 2, n <= 2".into())
}

fn spectral_sequence() -> Result<String, String> {
    let mut entries = 0;
    for name in ["K2", "diamond"] {
        let c = cat(name)?;
        let fc = build_filtered_chain(&c, 5, 5).map_err(|e| e.to_string())?;
        let table = homology_table(&c, 3, 4)?;
        for p in 0..=3i64 {
            for q in -p..=(4 - p) {
                let entry = fc.page(1, p, q);
                ensure(!entry.cap_limited, || format!("{name}: E^1_{{{p},{q}}} is cap limited"))?;
                let mh = &table[p as usize][(p + q) as usize];
                ensure(entry.dim == mh.betti, || format!("{name}: E^1_{{{p},{q}}} = {} vs {}", entry.dim, mh.betti))?;
                entries += 1;
            }
        }
    }
    for (name, h1) in [("diamond", 0), ("C5-directed", 1)] {
        let Input::Digraph(d) = builtin(name)? else {
            return Err(format!("{name} is not a digraph"));
        };
        let rows = e2_vs_path_homology(&d, 2, 5, 5).map_err(|e| e.to_string())?;
        for r in &rows {
            ensure(!r.e2.cap_limited && r.agree(), || format!("{name}: E^2_{{{},0}} = {} vs {}", r.p, r.e2.dim, r.oracle))?;
        }
        ensure(rows[1].oracle == h1, || format!("{name}: H_1 = {}", rows[1].oracle))?;
    }
    Ok(format!("{entries} E^1 entries; E^2 matches path homology"))
}

fn r_homotopy() -> Result<String, String> {
    let Input::Digraph(d) = builtin("diamond")? else {
        return Err("diamond is not a digraph".into());
    };
    let c = d.to_fcat().map_err(|e| e.to_string())?;
    let edge = Digraph::new(vec!["x".into(), "y".into()], vec![(0, 1)]).map_err(|e| e.to_string())?;
    let edge = edge.to_fcat().map_err(|e| e.to_string())?;
    let f = Functor::from_object_map(&c, &edge, vec![0, 0, 0, 1]).map_err(|e| e.to_string())?;
    let g = Functor::from_object_map(&c, &edge, vec![0, 1, 1, 1]).map_err(|e| e.to_string())?;
    let components = (0..4).map(|a| edge.hom(f.objects[a], g.objects[a])[0]).collect();
    let tau = RNatural { r: e(1), components };
    let rows = r_homotopy_invariance_check(&c, &edge, &f, &g, &tau, 5, 5).map_err(|e| e.to_string())?;
    ensure(rows.iter().any(|r| r.dim_source > 0), || "no nonzero entries compared".into())?;
    if let Some(r) = rows.iter().find(|r| !r.equal) {
        return Err(format!("maps differ on E^2_{{{},{}}}", r.p, r.q));
    }
    Ok(format!("{} entries of E^2 agree", rows.len()))
}

fn random_series(rng: &mut ChaCha8Rng, cutoff: &Exponent) -> NSeries {
    let n = rng.gen_range(0..6);
    NSeries::from_terms(
        cutoff.clone(),
        (0..n).map(|_| {
            let e = Exponent::new(rng.gen_range(0..10), 2).expect("nonzero denominator");
            let c = BigRational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into());
            (e, c)
        }),
    )
}

pub fn ring_laws(triples: usize, seed: u64) -> Result<(), String> {
    let cutoff = e(4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = NSeries::one(cutoff.clone());
    let zero = NSeries::zero(cutoff.clone());
    let m = |r: Result<NSeries, _>| r.map_err(|e: crate::novikov::SeriesError| e.to_string());
    for i in 0..triples {
        let (a, b, c) = (random_series(&mut rng, &cutoff), random_series(&mut rng, &cutoff), random_series(&mut rng, &cutoff));
        let fail = |law: &str| format!("{law} fails on triple {i}: {a}, {b}, {c}");
        ensure(m(m(a.add(&b))?.add(&c))? == m(a.add(&m(b.add(&c))?))?, || fail("additive associativity"))?;
        ensure(m(a.add(&b))? == m(b.add(&a))?, || fail("additive commutativity"))?;
        ensure(m(m(a.mul(&b))?.mul(&c))? == m(a.mul(&m(b.mul(&c))?))?, || fail("associativity"))?;
        ensure(m(a.mul(&b))? == m(b.mul(&a))?, || fail("commutativity"))?;
        ensure(m(a.mul(&m(b.add(&c))?))? == m(m(a.mul(&b))?.add(&m(a.mul(&c))?))?, || fail("distributivity"))?;
        ensure(m(a.mul(&one))? == a && m(a.add(&zero))? == a, || fail("units"))?;
        ensure(m(a.sub(&a))?.is_zero(), || fail("negation"))?;
        if !a.constant_term().is_zero() {
            ensure(m(a.mul(&m(a.invert())?))? == one, || fail("inversion"))?;
        }
    }
    Ok(())
}

fn square_zero() -> Result<usize, String> {
    let mut built = 0;
    for (name, input) in corpus::all() {
        let c = input.to_fcat().map_err(|e| e.to_string())?;
        if !c.integral_degrees() || c.horizon().is_some() {
            continue;
        }
        for l in 0..=3 {
            let cx = mc_complex(&c, &e(l), 3, Basepoints::Free).map_err(|e| format!("{name}: {e}"))?;
            cx.chain.check_square_zero().map_err(|e| format!("{name}: {e}"))?;
            built += 1;
        }
        if c.object_count() <= 6 {
            let fc = build_filtered_chain(&c, 3, 4).map_err(|e| format!("{name}: {e}"))?;
            for n in 2..fc.boundaries.len() {
                ensure(fc.boundaries[n - 1].mul(&fc.boundaries[n]).is_zero(), || format!("{name}: filtered d^2 at {n}"))?;
            }
            built += 1;
        }
    }
    for l in 0..=2 {
        hochschild_complex(&cat("K2")?, &e(l), 3, GUARDRAIL)
            .and_then(|h| h.check_square_zero())
            .map_err(|e| e.to_string())?;
        built += 1;
    }
    Ok(built)
}

fn round_trips() -> Result<usize, String> {
    let mut cases: Vec<(String, MetricSpace, MetricSpace, Vec<usize>)> = Vec::new();
    let k3 = metric("K3")?;
    cases.push(("K3xK2 over K3".into(), metric("K3xK2")?, k3.clone(), (0..6).map(|v| v / 2).collect()));
    cases.push(("K33 over K3".into(), metric("K33")?, k3, (0..6).map(|v| v % 3).collect()));
    let Input::Action(twist) = builtin("K3-twist")? else {
        return Err("K3-twist is not an action".into());
    };
    let total = grothendieck(&twist).map_err(|e| e.to_string())?;
    cases.push(("K3-twist".into(), total.space, twist.base.clone(), total.projection));
    let pt = metric("point")?;
    for (name, input) in corpus::all() {
        let Some(m) = input.metric() else { continue };
        // lifts are unique only when distinct points are apart
        if m.is_empty() || m.d.iter().flatten().any(Option::is_none) || m.degenerate_pair().is_some() {
            continue;
        }
        cases.push((format!("{name} over the point"), m.clone(), pt.clone(), vec![0; m.len()]));
        cases.push((format!("{name} over itself"), m.clone(), m.clone(), (0..m.len()).collect()));
    }
    for (name, total, base, proj) in &cases {
        match round_trip(total, base, proj).map_err(|e| format!("{name}: {e}"))? {
            Ok(_) => {}
            Err(f) => return Err(format!("{name}: {f}")),
        }
    }
    Ok(cases.len())
}

/// Every command on every applicable built-in input, rendered twice.
pub fn command_outputs() -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    let cutoff = e(3);
    for (name, input) in corpus::all() {
        let mut runs: Vec<(&str, Result<Emission, commands::CommandError>)> = vec![
            ("validate", commands::validate(&input)),
            ("classify", commands::classify(&input)),
        ];
        if input.to_fcat().is_ok_and(|c| classify(&c).tame) {
            runs.push(("mag", commands::magnitude(&input, &cutoff)));
            runs.push(("weighting", commands::weights(&input, &cutoff, Side::Weighting)));
            runs.push(("coweighting", commands::weights(&input, &cutoff, Side::Coweighting)));
        }
        match &input {
            Input::Digraph(_) => {
                runs.push(("pathhom", commands::pathhom(&input, 2)));
                runs.push(("specseq", commands::specseq(&input, 2, 3, 3)));
            }
            Input::Poset { ranks, .. } => {
                runs.push(("mobius", commands::mobius(&input)));
                if ranks.is_some() {
                    runs.push(("poincare", commands::poincare(&input)));
                }
            }
            Input::Group(_) => runs.push(("growth", commands::growth(&input, &cutoff))),
            Input::Action(_) => runs.push(("fib product-check", commands::fib_product_check(&input, &cutoff))),
            Input::Graph { vertices, .. } if vertices.len() <= 4 => {
                runs.push(("homology", commands::homology(&input, &e(2), 3, None, None)));
                runs.push(("euler-check", commands::euler_check(&input, &e(2), None)));
            }
            _ => {}
        }
        for (cmd, r) in runs {
            let text = match r {
                Ok(em) => em.render(Format::Text) + &em.render(Format::Json),
                Err(err) => format!("error {}: {}", err.exit_code(), err.message()),
            };
            out.push((format!("{cmd} {name}"), text));
        }
    }
    Ok(out)
}

fn properties() -> Result<String, String> {
    ring_laws(1000, 7)?;
    let complexes = square_zero()?;
    let trips = round_trips()?;
    let first = command_outputs()?;
    let second = command_outputs()?;
    ensure(first == second, || "command output changed between runs".into())?;
    Ok(format!(
        "1000 ring-law triples; {complexes} complexes square to zero; {trips} round trips; {} outputs stable",
        first.len()
    ))
}
