//! Identification of interventional and conditional interventional
//! distributions, and of sequential plans.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::admg::{Admg, VarSet};
use crate::confounding::{effect_hedge_free, hedge_from_components, validate_hedge, Hedge, HedgeViolation};
use crate::error::{PlanError, QueryError};
use crate::expr::ProbExpr;
use crate::nodeset::NodeSet;
use crate::query::Query;
use crate::separation::{rule_holds, Rule};

/// A failed identification: the hedge found by the algorithm together with
/// the intervention set of the call that failed, restricted to `F`.
///
/// That set contains the query's treatments inside `F` and may add nodes the
/// algorithm moved into the intervention because they cannot reach the
/// outcome except through it; `F ⊆ F' ∪ treatment` always holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub hedge: Hedge,
    pub treatment: VarSet,
}

impl Failure {
    /// Checks the hedge conditions against the query `P_x(y)` whose
    /// identification failed, with the containment `F ⊆ F' ∪ X` taken
    /// relative to the failing call's intervention set.
    pub fn validate(&self, g: &Admg, x: &VarSet, y: &VarSet) -> Result<(), Vec<HedgeViolation>> {
        let mut problems = match validate_hedge(&self.hedge, g, x, y) {
            Ok(()) => Vec::new(),
            Err(v) => v,
        };
        problems.retain(|v| *v != HedgeViolation::FExceedsFPrimeAndTreatment);
        let f = self.hedge.f_nodes();
        if !f.is_subset(&self.hedge.fprime_nodes().union(&self.treatment))
            || !f.intersection(x).is_subset(&self.treatment)
        {
            problems.push(HedgeViolation::FExceedsFPrimeAndTreatment);
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentResult {
    Identified(ProbExpr),
    NotIdentifiable(Failure),
}

impl IdentResult {
    pub fn is_identified(&self) -> bool {
        matches!(self, IdentResult::Identified(_))
    }

    pub fn estimand(&self) -> Option<&ProbExpr> {
        match self {
            IdentResult::Identified(e) => Some(e),
            IdentResult::NotIdentifiable(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            IdentResult::Identified(_) => None,
            IdentResult::NotIdentifiable(f) => Some(f),
        }
    }
}

/// The distribution argument of a recursive call: either the observational
/// marginal over the call's node set, or an explicit expression over it.
enum Dist {
    Observed,
    Expr(ProbExpr),
}

struct Id<'a> {
    g: &'a Admg,
}

impl Id<'_> {
    fn vars(&self, s: NodeSet) -> VarSet {
        self.g.var_set(s)
    }

    /// `P(v_i | v_π^(i-1))` computed from `p`, a distribution over `v`.
    fn conditional(&self, p: &Dist, v: NodeSet, i: usize) -> ProbExpr {
        let pred = v & NodeSet::full(i);
        match p {
            Dist::Observed => ProbExpr::term(self.vars(NodeSet::single(i)), self.vars(pred)),
            Dist::Expr(e) => {
                let num = ProbExpr::sum(self.vars(v - pred - NodeSet::single(i)), e.clone());
                if pred.is_empty() {
                    num
                } else {
                    ProbExpr::quotient(num, ProbExpr::sum(self.vars(v - pred), e.clone()))
                }
            }
        }
    }

    fn run(&self, y: NodeSet, x: NodeSet, p: &Dist, v: NodeSet) -> Result<ProbExpr, Failure> {
        let edges = self.g.edges();
        let measure = (v.len(), (v - x).len());

        if x.is_empty() {
            let body = match p {
                Dist::Observed => ProbExpr::marginal(self.vars(v)),
                Dist::Expr(e) => e.clone(),
            };
            return Ok(ProbExpr::sum(self.vars(v - y), body));
        }

        let an = edges.ancestors_within(y, v);
        if an != v {
            let restricted = match p {
                Dist::Observed => Dist::Observed,
                Dist::Expr(e) => Dist::Expr(ProbExpr::sum(self.vars(v - an), e.clone())),
            };
            assert!(an.len() < measure.0);
            return self.run(y, x & an, &restricted, an);
        }

        let w = (v - x) - edges.mutilated(x, NodeSet::EMPTY).ancestors_within(y, v);
        if !w.is_empty() {
            assert!((v - x - w).len() < measure.1);
            return self.run(y, x | w, p, v);
        }

        let parts = edges.c_components_within(v - x);
        if parts.len() > 1 {
            let mut factors = Vec::with_capacity(parts.len());
            for &s in &parts {
                assert!(s.len() < measure.1);
                factors.push(self.run(s, v - s, p, v)?);
            }
            return Ok(ProbExpr::sum(self.vars(v - (y | x)), ProbExpr::product(factors)));
        }
        let s = parts[0];

        let whole = edges.c_components_within(v);
        if whole.len() == 1 {
            return Err(Failure {
                hedge: hedge_from_components(self.g, v, s, y),
                treatment: self.vars(x),
            });
        }

        if whole.contains(&s) {
            let factors = s.iter().map(|i| self.conditional(p, v, i)).collect();
            return Ok(ProbExpr::sum(self.vars(s - y), ProbExpr::product(factors)));
        }

        let s2 = *whole
            .iter()
            .find(|c| s.is_subset(**c))
            .expect("a C-component of G \\ X lies inside one of G");
        assert!(s2.len() < measure.0);
        let factors = s2.iter().map(|i| self.conditional(p, v, i)).collect();
        self.run(y, x & s2, &Dist::Expr(ProbExpr::product(factors)), s2)
    }
}

fn check_effect(g: &Admg, y: &VarSet, x: &VarSet) -> Result<(NodeSet, NodeSet), QueryError> {
    Query::new(y.clone(), x.clone(), VarSet::new())?;
    Ok((g.node_set(y)?, g.node_set(x)?))
}

pub(crate) fn id_sets(g: &Admg, y: NodeSet, x: NodeSet) -> IdentResult {
    match (Id { g }).run(y, x, &Dist::Observed, g.all()) {
        Ok(e) => IdentResult::Identified(e),
        Err(f) => IdentResult::NotIdentifiable(f),
    }
}

/// Identifies `P_x(y)` from the observational distribution over all nodes.
pub fn id_query(g: &Admg, y: &VarSet, x: &VarSet) -> Result<IdentResult, QueryError> {
    let (ys, xs) = check_effect(g, y, x)?;
    Ok(id_sets(g, ys, xs))
}

/// Identifies `P_x(y)` from `dist`, an expression for the joint distribution
/// over all nodes of `g`.
pub fn id_query_from(g: &Admg, y: &VarSet, x: &VarSet, dist: &ProbExpr) -> Result<IdentResult, QueryError> {
    let (ys, xs) = check_effect(g, y, x)?;
    let p = if *dist == ProbExpr::marginal(g.var_set(g.all())) {
        Dist::Observed
    } else {
        Dist::Expr(dist.clone())
    };
    Ok(match (Id { g }).run(ys, xs, &p, g.all()) {
        Ok(e) => IdentResult::Identified(e),
        Err(f) => IdentResult::NotIdentifiable(f),
    })
}

/// Greedily moves members of `w` whose exchange by rule 2 is licensed into
/// the intervention, scanning `order` repeatedly until nothing moves.
fn rule2_closure(g: &Admg, y: NodeSet, x: NodeSet, w: NodeSet, order: &[usize]) -> NodeSet {
    let edges = g.edges();
    let (mut x, mut w) = (x, w);
    let mut moved = NodeSet::EMPTY;
    loop {
        let hit = order.iter().copied().find(|&z| {
            w.contains(z) && rule_holds(Rule::Two, edges, y, x, NodeSet::single(z), w - NodeSet::single(z))
        });
        match hit {
            Some(z) => {
                x.insert(z);
                w.remove(z);
                moved.insert(z);
            }
            None => return moved,
        }
    }
}

struct Sets {
    y: NodeSet,
    x: NodeSet,
    w: NodeSet,
}

fn query_sets(g: &Admg, q: &Query) -> Result<Sets, QueryError> {
    Query::new(q.y.clone(), q.x.clone(), q.w.clone())?;
    Ok(Sets {
        y: g.node_set(&q.y)?,
        x: g.node_set(&q.x)?,
        w: g.node_set(&q.w)?,
    })
}

/// The largest subset of `W` that can be moved into the intervention by
/// repeated application of rule 2, scanning candidates in topological order.
pub fn max_rule2_set(g: &Admg, q: &Query) -> Result<VarSet, QueryError> {
    let s = query_sets(g, q)?;
    let order: Vec<usize> = (0..g.len()).collect();
    Ok(g.var_set(rule2_closure(g, s.y, s.x, s.w, &order)))
}

/// [`max_rule2_set`] with an explicit candidate order.
pub fn max_rule2_set_in_order(g: &Admg, q: &Query, order: &[String]) -> Result<VarSet, QueryError> {
    let s = query_sets(g, q)?;
    let order: Vec<usize> = order
        .iter()
        .map(|n| g.index_of(n).ok_or_else(|| crate::GraphError::UnknownNode(n.clone())))
        .collect::<Result<_, _>>()?;
    Ok(g.var_set(rule2_closure(g, s.y, s.x, s.w, &order)))
}

/// Identifies `P_x(y | w)`.
pub fn idc_query(g: &Admg, q: &Query) -> Result<IdentResult, QueryError> {
    let s = query_sets(g, q)?;
    let order: Vec<usize> = (0..g.len()).collect();
    let z = rule2_closure(g, s.y, s.x, s.w, &order);
    let (x, w) = (s.x | z, s.w - z);
    Ok(match id_sets(g, s.y | w, x) {
        IdentResult::Identified(p) if w.is_empty() => IdentResult::Identified(p),
        IdentResult::Identified(p) => {
            let den = ProbExpr::sum(g.var_set(s.y), p.clone());
            IdentResult::Identified(ProbExpr::quotient(p, den))
        }
        failed => failed,
    })
}

/// Decides identifiability of `P_x(y | w)` without running the
/// identification algorithm: after the maximal rule-2 reduction `Z`, the
/// effect of `X ∪ Z` on `Y ∪ (W \ Z)` must be hedge-free, which is checked by
/// C-component reductions on the graph alone.
pub fn conditionally_identifiable(g: &Admg, q: &Query) -> Result<bool, QueryError> {
    let s = query_sets(g, q)?;
    if s.x.is_empty() {
        return Ok(true);
    }
    let order: Vec<usize> = (0..g.len()).collect();
    let z = rule2_closure(g, s.y, s.x, s.w, &order);
    Ok(effect_hedge_free(g.edges(), s.y | (s.w - z), s.x | z))
}

/// A deterministic policy: the value of an action for each combination of
/// input values, in mixed radix with the last input varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub inputs: Vec<String>,
    pub values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub action: String,
    #[serde(default)]
    pub observes: VarSet,
    pub policy: Policy,
}

/// A sequential plan: at stage `i` observe `observes`, then set `action`
/// by its policy applied to what has been observed or done so far.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub outcome: VarSet,
    pub stages: Vec<Stage>,
    /// Domain sizes; variables not listed are binary.
    #[serde(default)]
    pub domains: BTreeMap<String, usize>,
}

impl Plan {
    pub fn domain(&self, name: &str) -> usize {
        self.domains.get(name).copied().unwrap_or(2)
    }

    pub fn actions(&self) -> VarSet {
        self.stages.iter().map(|s| s.action.clone()).collect()
    }

    pub fn observations(&self) -> VarSet {
        self.stages
            .iter()
            .fold(VarSet::new(), |acc, s| acc.union(&s.observes))
    }

    pub fn from_json(text: &str) -> Result<Plan, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Checks the plan's shape against `g`.
    pub fn validate(&self, g: &Admg) -> Result<(), PlanError> {
        if self.stages.is_empty() || self.outcome.is_empty() {
            return Err(PlanError::Empty);
        }
        g.node_set(&self.outcome)?;
        let mut seen = VarSet::new();
        for st in &self.stages {
            g.node_set([&st.action])?;
            g.node_set(&st.observes)?;
            g.node_set(&st.policy.inputs)?;
            for n in std::iter::once(&st.action).chain(st.observes.iter()) {
                if !seen.insert(n.clone()) {
                    return Err(PlanError::Overlap(n.clone()));
                }
            }
        }
        if let Some(n) = self.outcome.intersection(&seen).iter().next() {
            return Err(PlanError::Overlap(n.clone()));
        }

        let mut available = VarSet::new();
        for (i, st) in self.stages.iter().enumerate() {
            available = available.union(&st.observes);
            for inp in &st.policy.inputs {
                if !available.contains(inp) {
                    return Err(PlanError::UndeclaredInput {
                        stage: i + 1,
                        var: inp.clone(),
                    });
                }
            }
            let expected: usize = st.policy.inputs.iter().map(|n| self.domain(n)).product();
            if st.policy.values.len() != expected {
                return Err(PlanError::PolicyShape {
                    action: st.action.clone(),
                    found: st.policy.values.len(),
                    expected,
                });
            }
            let d = self.domain(&st.action);
            if let Some(&bad) = st.policy.values.iter().find(|&&v| v >= d) {
                return Err(PlanError::PolicyValue {
                    action: st.action.clone(),
                    value: bad,
                    domain: d,
                });
            }
            available.insert(st.action.clone());

            let later: VarSet = self.stages[i..].iter().map(|s| s.action.clone()).collect();
            let affected = g.descendants(&later)?;
            if let Some(n) = st.observes.intersection(&affected).iter().next() {
                return Err(PlanError::ObservationAfterAction {
                    stage: i + 1,
                    var: n.clone(),
                });
            }
            let earlier_ancestors = g.ancestors(&[st.action.as_str()].into())?;
            for (j, later_stage) in self.stages.iter().enumerate().skip(i + 1) {
                if earlier_ancestors.contains(&later_stage.action) {
                    return Err(PlanError::StageOrder {
                        stage: j + 1,
                        var: later_stage.action.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Identifies the outcome distribution under a sequential plan as
/// `Σ_{z,x} Π_i [x_i = g_i(..)] P_x(y | z) P_x(z)`, with both conditional
/// effects identified by [`idc_query`].
pub fn identify_plan(g: &Admg, plan: &Plan) -> Result<IdentResult, PlanError> {
    plan.validate(g)?;
    let x = plan.actions();
    let z = plan.observations();
    let effect = idc_query(g, &Query::new(plan.outcome.clone(), x.clone(), z.clone())?)?;
    let effect = match effect {
        IdentResult::Identified(e) => e,
        failed => return Ok(failed),
    };
    let mut factors: Vec<ProbExpr> = plan
        .stages
        .iter()
        .map(|st| ProbExpr::Policy {
            action: st.action.clone(),
            inputs: st.policy.inputs.clone(),
            values: st.policy.values.clone(),
        })
        .collect();
    if !z.is_empty() {
        match id_query(g, &z, &x)? {
            IdentResult::Identified(e) => factors.push(e),
            failed => return Ok(failed),
        }
    }
    factors.push(effect);
    Ok(IdentResult::Identified(ProbExpr::sum(
        x.union(&z),
        ProbExpr::product(factors),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::parse_graph;

    fn vs<const N: usize>(n: [&str; N]) -> VarSet {
        VarSet::from(n)
    }

    fn mediator_graph() -> Admg {
        parse_graph("X -> Z\nZ -> Y\nX <-> Z").unwrap()
    }

    fn collider_graph() -> Admg {
        parse_graph("X -> Z\nX <-> Z\nY -> Z\nW -> Y").unwrap()
    }

    #[test]
    fn joint_intervention_on_mediator_graph() {
        let r = id_query(&mediator_graph(), &vs(["Y"]), &vs(["X", "Z"])).unwrap();
        assert_eq!(r.estimand().unwrap().to_text(), "P(Y|X,Z)");
    }

    #[test]
    fn empty_intervention_is_line_one() {
        let r = id_query(&mediator_graph(), &vs(["Y"]), &vs([])).unwrap();
        assert_eq!(r.estimand().unwrap().to_text(), "Σ_{X,Z} P(X,Y,Z)");
        let g = parse_graph("X -> Y").unwrap();
        let r = id_query(&g, &vs(["Y"]), &vs([])).unwrap();
        assert_eq!(r.estimand().unwrap().to_text(), "Σ_{X} P(X,Y)");
    }

    #[test]
    fn bow_fails_with_hedge() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let r = id_query(&g, &vs(["Y"]), &vs(["X"])).unwrap();
        let f = r.failure().expect("bow is not identifiable");
        assert_eq!(f.hedge.root, vs(["Y"]));
        assert_eq!(f.hedge.f_nodes(), vs(["X", "Y"]));
        assert_eq!(f.hedge.fprime_nodes(), vs(["Y"]));
        assert_eq!(validate_hedge(&f.hedge, &g, &vs(["X"]), &vs(["Y"])), Ok(()));
        assert_eq!(f.validate(&g, &vs(["X"]), &vs(["Y"])), Ok(()));
    }

    #[test]
    fn treatment_can_exceed_query_intervention() {
        // W reaches Y only through X, so it joins the intervention; the
        // resulting hedge needs W in F
        let g = parse_graph("W -> X\nX -> Y\nW <-> X\nW <-> Y").unwrap();
        let r = id_query(&g, &vs(["Y"]), &vs(["X"])).unwrap();
        let f = r.failure().unwrap();
        assert_eq!(f.hedge.f_nodes(), vs(["W", "X", "Y"]));
        assert_eq!(f.treatment, vs(["W", "X"]));
        assert_eq!(f.validate(&g, &vs(["X"]), &vs(["Y"])), Ok(()));
        assert_eq!(
            validate_hedge(&f.hedge, &g, &vs(["X"]), &vs(["Y"])),
            Err(vec![HedgeViolation::FExceedsFPrimeAndTreatment])
        );
    }

    #[test]
    fn front_door_identified() {
        let g = parse_graph("X -> M\nM -> Y\nX <-> Y").unwrap();
        let r = id_query(&g, &vs(["Y"]), &vs(["X"])).unwrap();
        let e = r.estimand().unwrap();
        assert!(e.free_vars().is_subset(&vs(["X", "Y"])));
    }

    #[test]
    fn backdoor_shape() {
        let g = parse_graph("Z -> X\nX -> Y\nZ -> Y").unwrap();
        let e = id_query(&g, &vs(["Y"]), &vs(["X"])).unwrap();
        assert_eq!(e.estimand().unwrap().free_vars(), vs(["X", "Y"]));
    }

    #[test]
    fn rule2_sets() {
        let q = Query::parse("P(Y | do(X), Z)").unwrap();
        assert_eq!(max_rule2_set(&mediator_graph(), &q).unwrap(), vs(["Z"]));
        let q = Query::parse("P(W | do(X), Z)").unwrap();
        assert_eq!(max_rule2_set(&collider_graph(), &q).unwrap(), vs([]));
        let q = Query::parse("P(Y | do(X))").unwrap();
        assert_eq!(max_rule2_set(&mediator_graph(), &q).unwrap(), vs([]));
    }

    #[test]
    fn idc_examples() {
        let q = Query::parse("P(Y | do(X), Z)").unwrap();
        let r = idc_query(&mediator_graph(), &q).unwrap();
        assert_eq!(r.estimand().unwrap().to_text(), "P(Y|X,Z)");

        let q = Query::parse("P(W | do(X), Z)").unwrap();
        let r = idc_query(&collider_graph(), &q).unwrap();
        let f = r.failure().expect("not identifiable in G''");
        assert_eq!(f.hedge.f_nodes(), vs(["X", "Z"]));
        assert!(f.hedge.root.contains("Z"));
        assert_eq!(f.validate(&collider_graph(), &vs(["X"]), &vs(["W", "Z"])), Ok(()));

        let q = Query::parse("P(Y | do(X))").unwrap();
        assert_eq!(
            idc_query(&mediator_graph(), &q).unwrap(),
            id_query(&mediator_graph(), &vs(["Y"]), &vs(["X"])).unwrap()
        );
    }

    #[test]
    fn back_door_hedge_criterion() {
        let q = Query::parse("P(Y | do(X), Z)").unwrap();
        assert!(conditionally_identifiable(&mediator_graph(), &q).unwrap());
        let q = Query::parse("P(W | do(X), Z)").unwrap();
        assert!(!conditionally_identifiable(&collider_graph(), &q).unwrap());
        let bow = parse_graph("X -> Y\nX <-> Y").unwrap();
        let q = Query::parse("P(Y | X)").unwrap();
        assert!(conditionally_identifiable(&bow, &q).unwrap());
    }

    #[test]
    fn given_distribution_is_used() {
        let g = parse_graph("X -> Y").unwrap();
        let all = ProbExpr::marginal(vs(["X", "Y"]));
        assert_eq!(
            id_query_from(&g, &vs(["Y"]), &vs(["X"]), &all).unwrap(),
            id_query(&g, &vs(["Y"]), &vs(["X"])).unwrap()
        );
    }

    #[test]
    fn bad_queries() {
        let g = mediator_graph();
        assert!(id_query(&g, &vs(["Y"]), &vs(["Y"])).is_err());
        assert!(id_query(&g, &vs([]), &vs(["X"])).is_err());
        assert!(id_query(&g, &vs(["Q"]), &vs(["X"])).is_err());
    }

    fn plan(outcome: &[&str], stages: Vec<Stage>) -> Plan {
        Plan {
            outcome: outcome.into(),
            stages,
            domains: BTreeMap::new(),
        }
    }

    fn stage(action: &str, observes: &[&str], inputs: &[&str], values: Vec<usize>) -> Stage {
        Stage {
            action: action.into(),
            observes: observes.into(),
            policy: Policy {
                inputs: inputs.iter().map(|s| s.to_string()).collect(),
                values,
            },
        }
    }

    #[test]
    fn plan_validation() {
        let g = parse_graph("X1 -> Z\nZ -> X2\nX2 -> Y\nX1 -> Y\nZ -> Y").unwrap();
        let ok = plan(&["Y"], vec![stage("X1", &[], &[], vec![1]), stage("X2", &["Z"], &["Z", "X1"], vec![0, 1, 1, 0])]);
        assert_eq!(ok.validate(&g), Ok(()));
        let undeclared = plan(&["Y"], vec![stage("X1", &[], &["Z"], vec![0, 1])]);
        assert!(matches!(undeclared.validate(&g), Err(PlanError::UndeclaredInput { .. })));
        let late = plan(&["Y"], vec![stage("X1", &["Z"], &[], vec![0])]);
        assert!(matches!(late.validate(&g), Err(PlanError::ObservationAfterAction { .. })));
        let shape = plan(&["Y"], vec![stage("X1", &[], &[], vec![0, 1])]);
        assert!(matches!(shape.validate(&g), Err(PlanError::PolicyShape { .. })));
        let order = plan(&["Y"], vec![stage("X2", &[], &[], vec![0]), stage("X1", &[], &[], vec![0])]);
        assert!(matches!(order.validate(&g), Err(PlanError::StageOrder { .. })));
        let r = identify_plan(&g, &ok).unwrap();
        assert!(r.is_identified());
    }

    #[test]
    fn constant_single_stage_plan() {
        let g = parse_graph("Z -> X\nX -> Y\nZ -> Y").unwrap();
        let p = plan(&["Y"], vec![stage("X", &[], &[], vec![1])]);
        let e = identify_plan(&g, &p).unwrap();
        assert_eq!(e.estimand().unwrap().free_vars(), vs(["Y"]));
    }
}
