//! Numeric comparison of estimands with enumerated models.

use crate::admg::Admg;
use crate::error::OracleError;
use crate::expr::{assignments_of, Assignment, DistTable, Evaluator, ProbExpr};
use crate::identify::Plan;
use crate::query::Query;
use crate::scalar::Scalar;

use super::scm::{random_scm, DiscreteScm};

/// Largest absolute difference found over the compared cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation<T> {
    pub max: T,
    pub compared: usize,
    /// Cells with a zero-mass conditioning event or an undefined estimand.
    pub skipped: usize,
}

impl<T: Scalar> Default for Deviation<T> {
    fn default() -> Self {
        Deviation {
            max: T::zero(),
            compared: 0,
            skipped: 0,
        }
    }
}

impl<T: Scalar> Deviation<T> {
    fn record(&mut self, a: &T, b: &T) {
        let d = if a > b { a.clone() - b.clone() } else { b.clone() - a.clone() };
        if d > self.max {
            self.max = d;
        }
        self.compared += 1;
    }

    /// Folds in the cells of another comparison.
    pub fn merge(&mut self, other: Deviation<T>) {
        if other.max > self.max {
            self.max = other.max;
        }
        self.compared += other.compared;
        self.skipped += other.skipped;
    }
}

fn expr_err(e: crate::error::ExprError) -> OracleError {
    OracleError::Assignment(e.to_string())
}

fn consistent(a: &Assignment, fixed: &Assignment) -> bool {
    a.iter().all(|(k, v)| fixed.get(k).is_none_or(|f| f == v))
}

fn joined(parts: &[&Assignment]) -> Assignment {
    parts.iter().flat_map(|p| p.iter().map(|(k, v)| (k.clone(), *v))).collect()
}

fn domains(m: &DiscreteScm, names: &crate::admg::VarSet) -> Result<Vec<(String, usize)>, OracleError> {
    names
        .iter()
        .map(|n| {
            m.domain(n)
                .map(|d| (n.clone(), d))
                .ok_or_else(|| OracleError::Assignment(format!("unknown variable {n}")))
        })
        .collect()
}

/// Compares `estimand`, evaluated on the observational distribution of `m`,
/// with the enumerated `P_x(y | w)` for every value combination allowed by the
/// query's bindings. Free variables of the estimand outside the query range
/// over all their values.
pub fn query_deviation<T: Scalar>(m: &DiscreteScm, q: &Query, estimand: &ProbExpr) -> Result<Deviation<T>, OracleError> {
    let joint = m.joint::<T>();
    let mut eval = Evaluator::new(estimand, &joint).map_err(expr_err)?;
    let ys = assignments_of(&domains(m, &q.y)?);
    let ws = assignments_of(&domains(m, &q.w)?);
    let named = q.y.union(&q.x).union(&q.w);
    let extra = assignments_of(&domains(m, &estimand.free_vars().difference(&named))?);
    let mut dev = Deviation::default();
    for xa in assignments_of(&domains(m, &q.x)?) {
        if !consistent(&xa, &q.values) {
            continue;
        }
        let t = m.interventional::<T>(&xa)?;
        for wa in ws.iter().filter(|a| consistent(a, &q.values)) {
            let pw = t.prob_of(wa).map_err(expr_err)?;
            for ya in ys.iter().filter(|a| consistent(a, &q.values)) {
                if pw.is_zero() {
                    dev.skipped += 1;
                    continue;
                }
                let truth = t.prob_of(&joined(&[ya, wa])).map_err(expr_err)? / pw.clone();
                for ea in &extra {
                    match eval.evaluate(&joined(&[&xa, wa, ya, ea])).map_err(expr_err)? {
                        Some(v) => dev.record(&v, &truth),
                        None => dev.skipped += 1,
                    }
                }
            }
        }
    }
    Ok(dev)
}

/// Compares two expressions on one table over every assignment of `vars`.
/// Cells where either side is undefined are skipped.
pub fn expr_deviation<T: Scalar>(
    table: &DistTable<T>,
    a: &ProbExpr,
    b: &ProbExpr,
    vars: &[(String, usize)],
) -> Result<Deviation<T>, OracleError> {
    let mut ea = Evaluator::new(a, table).map_err(expr_err)?;
    let mut eb = Evaluator::new(b, table).map_err(expr_err)?;
    let mut dev = Deviation::default();
    for binding in assignments_of(vars) {
        match (
            ea.evaluate(&binding).map_err(expr_err)?,
            eb.evaluate(&binding).map_err(expr_err)?,
        ) {
            (Some(u), Some(v)) => dev.record(&u, &v),
            _ => dev.skipped += 1,
        }
    }
    Ok(dev)
}

/// Compares a plan estimand with the outcome marginal of the model run under
/// the plan's policies.
pub fn plan_deviation<T: Scalar>(m: &DiscreteScm, plan: &Plan, estimand: &ProbExpr) -> Result<Deviation<T>, OracleError> {
    let joint = m.joint::<T>();
    let sim = m.plan_distribution::<T>(plan)?;
    let mut eval = Evaluator::new(estimand, &joint).map_err(expr_err)?;
    let mut dev = Deviation::default();
    for ya in assignments_of(&domains(m, &plan.outcome)?) {
        let truth = sim.prob_of(&ya).map_err(expr_err)?;
        match eval.evaluate(&ya).map_err(expr_err)? {
            Some(v) => dev.record(&v, &truth),
            None => dev.skipped += 1,
        }
    }
    Ok(dev)
}

/// [`query_deviation`] accumulated over `trials` random binary models with
/// seeds `seed, seed + 1, ...`.
pub fn verify_query(g: &Admg, q: &Query, estimand: &ProbExpr, trials: u64, seed: u64) -> Result<Deviation<f64>, OracleError> {
    let mut dev = Deviation::default();
    for i in 0..trials {
        let m = random_scm(g, 2, seed.wrapping_add(i));
        dev.merge(query_deviation::<f64>(&m, q, estimand)?);
    }
    Ok(dev)
}

/// Largest deviation between two estimands over random binary models,
/// binding every variable of `g`.
pub fn compare_estimands(g: &Admg, a: &ProbExpr, b: &ProbExpr, trials: u64, seed: u64) -> Result<Deviation<f64>, OracleError> {
    let vars: Vec<(String, usize)> = g.nodes().iter().map(|n| (n.clone(), 2)).collect();
    let mut dev = Deviation::default();
    for i in 0..trials {
        let m = random_scm(g, 2, seed.wrapping_add(i));
        dev.merge(expr_deviation(&m.joint::<f64>(), a, b, &vars)?);
    }
    Ok(dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::{parse_graph, VarSet};
    use crate::identify::idc_query;
    use num_rational::BigRational;
    use num_traits::Zero;

    #[test]
    fn backdoor_formula_matches_intervention() {
        let g = parse_graph("Z -> X\nX -> Y\nZ -> Y").unwrap();
        let q = Query::parse("P(Y | do(X))").unwrap();
        let e = ProbExpr::sum(
            VarSet::from(["Z"]),
            ProbExpr::product(vec![
                ProbExpr::term(VarSet::from(["Y"]), VarSet::from(["X", "Z"])),
                ProbExpr::marginal(VarSet::from(["Z"])),
            ]),
        );
        for seed in 0..5 {
            let m = random_scm(&g, 2, seed);
            let d = query_deviation::<BigRational>(&m, &q, &e).unwrap();
            assert!(d.max.is_zero());
            assert_eq!(d.compared, 4);
        }
    }

    #[test]
    fn naive_conditional_is_biased_under_confounding() {
        let g = parse_graph("Z -> X\nX -> Y\nZ -> Y").unwrap();
        let q = Query::parse("P(Y | do(X))").unwrap();
        let naive = ProbExpr::term(VarSet::from(["Y"]), VarSet::from(["X"]));
        let d = verify_query(&g, &q, &naive, 10, 0).unwrap();
        assert!(d.max > 1e-6);
    }

    #[test]
    fn bound_values_restrict_cells() {
        let g = parse_graph("X -> Z\nZ -> Y\nX <-> Z").unwrap();
        let q = Query::parse("P(Y=1 | do(X=0), Z)").unwrap();
        let e = idc_query(&g, &q).unwrap().estimand().unwrap().clone();
        let d = verify_query(&g, &q, &e, 3, 7).unwrap();
        assert_eq!(d.compared, 3 * 2);
        assert!(d.max < 1e-12);
    }
}
