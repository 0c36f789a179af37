//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use causal_id::enumerate::{admgs_up_to, singleton_queries};
use causal_id::expr::assignments_of;
use causal_id::oracle::{expr_deviation, plan_deviation, query_deviation, random_scm, witness_search, DiscreteScm, SearchBounds};
use causal_id::{
    conditionally_identifiable, cond_identify, d_separated, id_query, idc_query, identify_plan, max_rule2_set, parse_graph,
    rule_applies, validate_hedge, Admg, Assignment, DistTable, IdentResult, Plan, Policy, ProbExpr, Query, Rule, Stage, VarSet,
};

use common::{dependence, graph_from_bits, vs};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2?} (limit {:?})", e, limit))
}

fn assign(pairs: &[(&str, usize)]) -> Assignment {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn binary(names: &VarSet) -> Vec<(String, usize)> {
    names.iter().map(|n| (n.clone(), 2)).collect()
}

fn merged(parts: &[&Assignment]) -> Assignment {
    parts.iter().flat_map(|p| p.iter().map(|(k, v)| (k.clone(), *v))).collect()
}

fn conditional(t: &DistTable<BigRational>, target: &Assignment, given: &Assignment) -> Option<BigRational> {
    let den = t.prob_of(given).unwrap();
    if den.is_zero() {
        return None;
    }
    Some(t.prob_of(&merged(&[target, given])).unwrap() / den)
}

fn latents_at_most(m: &DiscreteScm, d: usize) -> bool {
    m.shared_weights().iter().chain(m.own_weights()).all(|w| w.len() <= d)
}

fn mediator_graph() -> Verdict {
    let t = Instant::now();
    let g = parse_graph("X -> Z\nZ -> Y\nX <-> Z").unwrap();
    let q = Query::parse("P(Y | do(X), Z)").unwrap();
    let e = match idc_query(&g, &q).unwrap() {
        IdentResult::Identified(e) => e,
        IdentResult::NotIdentifiable(_) => return verdict(false, "not identified"),
    };
    let naive = ProbExpr::term(vs(&["Y"]), vs(&["X", "Z"]));
    let vars = binary(&vs(&["X", "Y", "Z"]));
    let (mut worst_cond, mut worst_effect, mut skipped) = (0f64, 0f64, 0);
    for seed in 0..100 {
        let m = random_scm(&g, 2, seed);
        let d = expr_deviation(&m.joint::<f64>(), &e, &naive, &vars).unwrap();
        worst_cond = worst_cond.max(d.max);
        skipped += d.skipped;
        let d = query_deviation::<f64>(&m, &q, &e).unwrap();
        worst_effect = worst_effect.max(d.max);
        skipped += d.skipped;
    }
    let (fast, time) = within(t, Duration::from_secs(1));
    verdict(
        worst_cond <= 1e-9 && worst_effect <= 1e-9 && skipped == 0 && fast,
        format!("estimand {e}; max |est - P(y|x,z)| = {worst_cond:.1e}, max |est - P_x(y|z)| = {worst_effect:.1e}; {time}"),
    )
}

fn bow() -> Verdict {
    let t = Instant::now();
    let g = parse_graph("X -> Y\nX <-> Y").unwrap();
    let (x, y) = (vs(&["X"]), vs(&["Y"]));
    let f = match id_query(&g, &y, &x).unwrap() {
        IdentResult::NotIdentifiable(f) => f,
        IdentResult::Identified(e) => return verdict(false, format!("identified as {e}")),
    };
    let hedge_ok = validate_hedge(&f.hedge, &g, &x, &y).is_ok()
        && f.hedge.f_nodes().is_subset(&f.hedge.fprime_nodes().union(&x));
    let out = witness_search(&g, &Query::parse("P(Y | do(X))").unwrap(), &SearchBounds::default()).unwrap();
    let Some(w) = out.witness else {
        return verdict(false, format!("no witness after {} models", out.models_examined));
    };
    let small = latents_at_most(&w.first, 4) && latents_at_most(&w.second, 4);
    let none = Assignment::new();
    let same = w.first.interventional_exact(&none).unwrap() == w.second.interventional_exact(&none).unwrap();
    let mut gap = BigRational::zero();
    for xv in 0..2 {
        let a = w.first.interventional_exact(&assign(&[("X", xv)])).unwrap();
        let b = w.second.interventional_exact(&assign(&[("X", xv)])).unwrap();
        let yv = assign(&[("Y", 1)]);
        let d = a.prob_of(&yv).unwrap() - b.prob_of(&yv).unwrap();
        let d = if d < BigRational::zero() { -d } else { d };
        gap = gap.max(d);
    }
    let (fast, time) = within(t, Duration::from_secs(60));
    verdict(
        hedge_ok && small && same && !gap.is_zero() && fast,
        format!(
            "hedge valid {hedge_ok}; witness after {} models, latents <= 4 {small}, P1(V) = P2(V) {same}, max |P1_x(y) - P2_x(y)| = {gap}; {time}",
            out.models_examined
        ),
    )
}

fn collider_query() -> Verdict {
    let t = Instant::now();
    let g = parse_graph("X -> Z\nX <-> Z\nY -> Z\nW -> Y").unwrap();
    let q = Query::parse("P(W | do(X), Z)").unwrap();
    let cond = cond_identify(&g, &q).unwrap();
    let tr = &cond.trace;
    let mut comps = tr.components.clone();
    comps.sort();
    let trace_ok = tr.d == vs(&["Y", "Z", "W"])
        && tr.f == vs(&["Y"])
        && comps == vec![vs(&["W"]), vs(&["Y"]), vs(&["Z"])]
        && tr.failed == vec![vs(&["Z"])]
        && tr.f0 == vs(&["Y"])
        && tr.line6_noop()
        && tr.line8_noop();
    let cond_ok = cond.estimand.is_some();
    let idc_fails = !idc_query(&g, &q).unwrap().is_identified();

    let out = witness_search(&g, &q, &SearchBounds::default()).unwrap();
    let certified = out.witness.as_ref().is_some_and(|w| {
        let none = Assignment::new();
        let same = w.first.interventional_exact(&none).unwrap() == w.second.interventional_exact(&none).unwrap();
        let differs = (0..2).any(|xv| {
            let a = w.first.interventional_exact(&assign(&[("X", xv)])).unwrap();
            let b = w.second.interventional_exact(&assign(&[("X", xv)])).unwrap();
            (0..2).any(|zv| {
                let z = assign(&[("Z", zv)]);
                let wv = assign(&[("W", 1)]);
                matches!((conditional(&a, &wv, &z), conditional(&b, &wv, &z)), (Some(p), Some(q)) if p != q)
            })
        });
        same && differs
    });
    let (fast, time) = within(t, Duration::from_secs(60));
    verdict(
        trace_ok && cond_ok && idc_fails && certified && fast,
        format!(
            "trace as expected {trace_ok}; cond-identify succeeds {cond_ok}; IDC fails {idc_fails}; witness certified {certified} after {} models; {time}",
            out.models_examined
        ),
    )
}

/// Every singleton query on every graph with at most four nodes.
fn sweep() -> Vec<(Admg, Query, IdentResult)> {
    let mut out = Vec::new();
    for g in admgs_up_to(4) {
        for q in singleton_queries(&g, 1) {
            let r = idc_query(&g, &q).unwrap();
            out.push((g.clone(), q, r));
        }
    }
    out
}

fn coherence(cases: &[(Admg, Query, IdentResult)]) -> Verdict {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut identified = 0;
    for (g, q, r) in cases {
        let graphical = conditionally_identifiable(g, q).unwrap();
        let z = max_rule2_set(g, q).unwrap();
        let (y2, x2) = (q.y.union(&q.w.difference(&z)), q.x.union(&z));
        let reduced = id_query(g, &y2, &x2).unwrap();
        if r.is_identified() != graphical || graphical != reduced.is_identified() {
            bad.push(format!("{q} on {:?}", g.to_graph_text()));
        }
        if let IdentResult::NotIdentifiable(f) = r {
            if f.validate(g, &x2, &y2).is_err() {
                bad.push(format!("invalid hedge for {q} on {:?}", g.to_graph_text()));
            }
        } else {
            identified += 1;
        }
    }
    let (fast, time) = within(t, Duration::from_secs(600));
    let first = bad.first().map(|b| format!("; first: {b}")).unwrap_or_default();
    verdict(
        bad.is_empty() && fast,
        format!(
            "{} queries, {identified} identifiable, {} discrepancies{first}; {time}",
            cases.len(),
            bad.len()
        ),
    )
}

fn soundness(cases: &[(Admg, Query, IdentResult)]) -> Verdict {
    let mut worst = 0f64;
    let (mut float_cases, mut exact_cases, mut exact_failures, mut skipped, mut case) = (0, 0, 0, 0, 0u64);
    for (i, (g, q, r)) in cases.iter().enumerate() {
        let Some(e) = r.estimand() else { continue };
        for s in 0..20u64 {
            let m = random_scm(g, 2, (i as u64) * 20 + s);
            let d = query_deviation::<f64>(&m, q, e).unwrap();
            worst = worst.max(d.max);
            skipped += d.skipped;
            float_cases += 1;
            if case % 10 == 0 {
                let d = query_deviation::<BigRational>(&m, q, e).unwrap();
                exact_cases += 1;
                skipped += d.skipped;
                if !d.max.is_zero() {
                    exact_failures += 1;
                }
            }
            case += 1;
        }
    }
    verdict(
        worst <= 1e-9 && exact_failures == 0 && skipped == 0 && float_cases > 0,
        format!(
            "{float_cases} model evaluations, max deviation {worst:.1e}; {exact_cases} exact checks, {exact_failures} inexact; {skipped} undefined cells"
        ),
    )
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Admg {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let pairs = n * (n - 1) / 2;
    let (mut dmask, mut bmask) = (0u32, 0u32);
    for k in 0..pairs {
        if rng.random_bool(0.5) {
            dmask |= 1 << k;
        }
        if rng.random_bool(0.25) {
            bmask |= 1 << k;
        }
    }
    graph_from_bits(n, &order, dmask, bmask)
}

/// Random disjoint sets, one per role, each node in at most one role.
fn random_roles<const R: usize>(rng: &mut ChaCha8Rng, g: &Admg) -> [VarSet; R] {
    let mut sets: [VarSet; R] = std::array::from_fn(|_| VarSet::new());
    for n in g.nodes() {
        let r = rng.random_range(0..=R);
        if r < R {
            sets[r].insert(n.clone());
        }
    }
    sets
}

/// Both sides of a rule's identity for one model, cell by cell.
fn rule_identity_holds(rule: Rule, m: &DiscreteScm, y: &VarSet, x: &VarSet, z: &VarSet, w: &VarSet) -> Option<bool> {
    for xa in assignments_of(&binary(x)) {
        let tx = m.interventional_exact(&xa).unwrap();
        for za in assignments_of(&binary(z)) {
            let txz = m.interventional_exact(&merged(&[&xa, &za])).unwrap();
            for wa in assignments_of(&binary(w)) {
                for ya in assignments_of(&binary(y)) {
                    let (lhs, rhs) = match rule {
                        Rule::One => (conditional(&tx, &ya, &merged(&[&za, &wa])), conditional(&tx, &ya, &wa)),
                        Rule::Two => (conditional(&txz, &ya, &wa), conditional(&tx, &ya, &merged(&[&za, &wa]))),
                        Rule::Three => (conditional(&txz, &ya, &wa), conditional(&tx, &ya, &wa)),
                    };
                    match (lhs, rhs) {
                        (Some(a), Some(b)) if a != b => return Some(false),
                        (Some(_), Some(_)) => {}
                        _ => return None,
                    }
                }
            }
        }
    }
    Some(true)
}

fn rules() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut report = Vec::new();
    let mut pass = true;
    for (rule, label) in [(Rule::One, "rule 1"), (Rule::Two, "rule 2"), (Rule::Three, "rule 3")] {
        let (mut instances, mut violations, mut undefined) = (0, 0, 0);
        while instances < 50 {
            let n = rng.random_range(3..=5);
            let g = random_graph(&mut rng, n);
            let [y, x, z, w] = random_roles::<4>(&mut rng, &g);
            if y.is_empty() || z.is_empty() || !rule_applies(rule, &g, &y, &x, &z, &w).unwrap() {
                continue;
            }
            instances += 1;
            for s in 0..100 {
                let m = random_scm(&g, 2, rng.random());
                match rule_identity_holds(rule, &m, &y, &x, &z, &w) {
                    Some(true) => {}
                    Some(false) => {
                        violations += 1;
                        if violations == 1 {
                            report.push(format!("{label} violated on {:?} model {s}", g.to_graph_text()));
                        }
                    }
                    None => undefined += 1,
                }
            }
        }
        pass &= violations == 0 && undefined == 0;
        report.push(format!("{label}: {instances} instances x 100 models, {violations} violations, {undefined} undefined"));
    }
    verdict(pass, report.join("; "))
}

fn plans() -> Verdict {
    let g = parse_graph("X1 -> Z\nZ -> X2\nX2 -> Y\nX1 -> Y\nZ -> Y\nZ <-> Y").unwrap();
    let plan = Plan {
        outcome: vs(&["Y"]),
        stages: vec![
            Stage {
                action: "X1".into(),
                observes: VarSet::new(),
                policy: Policy {
                    inputs: vec![],
                    values: vec![1],
                },
            },
            Stage {
                action: "X2".into(),
                observes: vs(&["Z"]),
                policy: Policy {
                    inputs: vec!["Z".into(), "X1".into()],
                    values: vec![0, 1, 1, 0],
                },
            },
        ],
        domains: Default::default(),
    };
    let e = match identify_plan(&g, &plan).unwrap() {
        IdentResult::Identified(e) => e,
        IdentResult::NotIdentifiable(_) => return verdict(false, "plan not identified"),
    };
    let (mut worst, mut compared, mut skipped) = (0f64, 0, 0);
    for seed in 0..50 {
        let m = random_scm(&g, 2, 7000 + seed);
        let d = plan_deviation::<f64>(&m, &plan, &e).unwrap();
        worst = worst.max(d.max);
        compared += d.compared;
        skipped += d.skipped;
    }
    verdict(
        worst <= 1e-9 && skipped == 0 && compared == 100,
        format!("estimand {e}; {compared} cells over 50 models, max deviation {worst:.1e}"),
    )
}

fn separation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut instances, mut attempts, mut worst) = (0, 0, 0f64);
    let mut conditioned = 0;
    while instances < 200 && attempts < 100_000 {
        attempts += 1;
        let n = rng.random_range(2..=5);
        let g = random_graph(&mut rng, n);
        let [x, y, z] = random_roles::<3>(&mut rng, &g);
        if x.is_empty() || y.is_empty() || !d_separated(&g, &x, &y, &z).unwrap() {
            continue;
        }
        instances += 1;
        if !z.is_empty() {
            conditioned += 1;
        }
        let m = random_scm(&g, 2, rng.random());
        let dep = dependence(&m.interventional_exact(&Assignment::new()).unwrap(), &x, &y, &z);
        worst = worst.max(causal_id::Scalar::to_f64(&dep));
    }
    verdict(
        instances == 200 && worst <= 1e-12,
        format!("{instances} d-separated instances ({conditioned} with a conditioning set), max dependence {worst:.1e}"),
    )
}

fn main() {
    let mut cases = None;
    let mut failed = 0;
    let mut run = |k: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {k} {}: {name}: {} [{:.2?}]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed()
        );
    };
    run(1, "conditional effect on X -> Z -> Y, X <-> Z", &mut mediator_graph);
    run(2, "bow graph non-identifiability", &mut bow);
    run(3, "cond-identify on X -> Z <- Y <- W, X <-> Z", &mut collider_query);
    run(4, "completeness coherence over graphs with <= 4 nodes", &mut || {
        let c = cases.get_or_insert_with(sweep);
        coherence(c)
    });
    run(5, "soundness sweep", &mut || {
        let c = cases.get_or_insert_with(sweep);
        soundness(c)
    });
    run(6, "do-calculus rule identities", &mut rules);
    run(7, "two-stage plan against policy simulation", &mut plans);
    run(8, "d-separation implies independence", &mut separation);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
