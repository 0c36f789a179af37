//! The C-component identification procedure and the conditional
//! identification procedure built on it, reproduced to be checked against
//! IDC and the oracle. Its answers are not trusted anywhere else.

use std::fmt;

use serde::Serialize;

use crate::admg::{Admg, VarSet};
use crate::error::{OracleError, QueryError};
use crate::expr::ProbExpr;
use crate::identify::{idc_query, Failure, IdentResult};
use crate::nodeset::NodeSet;
use crate::oracle::{query_deviation, random_scm, witness_search, SearchBounds};
use crate::query::Query;

/// `Q[t]` computed from `Q[a]` for a C-component `t` of `G_a`: the product
/// over `t` of `Q[H_i] / Q[H_{i-1}]`, where `H_i` holds the members of `a`
/// up to `V_i` in topological order and `Q[H_i]` sums `Q[a]` over `a \ H_i`.
fn factor_from(g: &Admg, qa: &ProbExpr, a: NodeSet, t: NodeSet) -> ProbExpr {
    let factors = t
        .iter()
        .map(|i| {
            let pred = a & NodeSet::full(i);
            let num = ProbExpr::sum(g.var_set(a - pred - NodeSet::single(i)), qa.clone());
            if pred.is_empty() {
                num
            } else {
                ProbExpr::quotient(num, ProbExpr::sum(g.var_set(a - pred), qa.clone()))
            }
        })
        .collect();
    ProbExpr::product(factors)
}

/// The c-factor of a C-component `c` of `G` read off the observational
/// distribution.
fn observed_factor(g: &Admg, c: NodeSet) -> ProbExpr {
    ProbExpr::product(
        c.iter()
            .map(|i| ProbExpr::term(g.var_set(NodeSet::single(i)), g.var_set(NodeSet::full(i))))
            .collect(),
    )
}

fn c_identify_sets(g: &Admg, c: NodeSet, mut t: NodeSet, mut qt: ProbExpr) -> Option<ProbExpr> {
    let edges = g.edges();
    loop {
        let a = edges.ancestors_within(c, t);
        if a == c {
            return Some(ProbExpr::sum(g.var_set(t - c), qt));
        }
        if a == t {
            return None;
        }
        let qa = ProbExpr::sum(g.var_set(t - a), qt);
        let inner = edges.c_component_of(c.first().expect("nonempty"), a);
        qt = factor_from(g, &qa, a, inner);
        t = inner;
    }
}

/// Expression for `Q[c]` in terms of `qt = Q[t]`, or `None` on failure.
///
/// `c ⊆ t` must both be single C-components of their induced subgraphs.
pub fn c_identify(g: &Admg, c: &VarSet, t: &VarSet, qt: &ProbExpr) -> Result<Option<ProbExpr>, QueryError> {
    let (cs, ts) = (g.node_set(c)?, g.node_set(t)?);
    if cs.is_empty() || !cs.is_subset(ts) {
        return Err(QueryError::NotNested {
            inner: c.to_string(),
            outer: t.to_string(),
        });
    }
    for (s, names) in [(cs, c), (ts, t)] {
        if g.edges().c_components_within(s).len() != 1 {
            return Err(QueryError::NotCComponent(names.to_string()));
        }
    }
    Ok(c_identify_sets(g, cs, ts, qt.clone()))
}

/// Every intermediate value of a [`cond_identify`] run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CondTrace {
    /// Ancestors of `Y ∪ Z` once `X` is removed.
    pub d: VarSet,
    /// `D \ (Y ∪ Z)`.
    pub f: VarSet,
    /// C-components of `G_D`.
    pub components: Vec<VarSet>,
    /// Components whose c-factor could not be identified (`N`).
    pub failed: Vec<VarSet>,
    /// The remaining components before the fixpoint (`I`).
    pub identified: Vec<VarSet>,
    /// `F ∩ Pa(N)` before the fixpoint.
    pub f0_initial: VarSet,
    pub f0: VarSet,
    pub i0: Vec<VarSet>,
    pub i1: Vec<VarSet>,
    /// The literal reading `F \ F_0` of the summation set.
    pub f1_literal: VarSet,
    /// The summation set used: members of `F` among the nodes and parents of
    /// `I_1`.
    pub f1: VarSet,
    /// Components moved into `I_0` by each pass of line 6.
    pub line6_moves: Vec<Vec<VarSet>>,
    /// Nodes added to `F_0` by each pass of line 8.
    pub line8_additions: Vec<VarSet>,
    /// Line that produced the result, 4 or 9.
    pub returned_at: u8,
}

impl CondTrace {
    /// Line 6 never moved a component.
    pub fn line6_noop(&self) -> bool {
        self.line6_moves.iter().all(Vec::is_empty)
    }

    /// Line 8 never added a node.
    pub fn line8_noop(&self) -> bool {
        self.line8_additions.iter().all(|s| s.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CondIdentify {
    pub trace: CondTrace,
    /// `None` when the procedure fails.
    pub estimand: Option<ProbExpr>,
}

fn ratio(g: &Admg, body: ProbExpr, f: NodeSet, y: NodeSet) -> ProbExpr {
    ProbExpr::quotient(
        ProbExpr::sum(g.var_set(f), body.clone()),
        ProbExpr::sum(g.var_set(y | f), body),
    )
}

/// Runs the conditional identification procedure for `P_x(y | w)`.
///
/// Parents in lines 5 to 8 are strict parents; the final test of line 9 uses
/// the failed and excluded components together with their parents. The
/// summation set of the final ratio is taken as `F` restricted to the nodes
/// and parents of `I_1 = I \ I_0`; [`CondTrace::f1_literal`] keeps the plain
/// `F \ F_0` for comparison.
pub fn cond_identify(g: &Admg, q: &Query) -> Result<CondIdentify, QueryError> {
    Query::new(q.y.clone(), q.x.clone(), q.w.clone())?;
    let (y, x, z) = (g.node_set(&q.y)?, g.node_set(&q.x)?, g.node_set(&q.w)?);
    let edges = g.edges();
    let names = |sets: &[NodeSet]| sets.iter().map(|&s| g.var_set(s)).collect::<Vec<_>>();
    let pa = |s: NodeSet| edges.parents_of_set(s) - s;
    let pa_all = |sets: &[NodeSet]| sets.iter().fold(NodeSet::EMPTY, |acc, &s| acc | pa(s));

    let d = edges.ancestors_within(y | z, g.all() - x);
    let f = d - (y | z);
    let components = edges.c_components_within(d);
    let whole = edges.c_components_within(g.all());

    let mut factors = Vec::with_capacity(components.len());
    let mut failed = Vec::new();
    let mut identified = Vec::new();
    for &di in &components {
        let first = di.first().expect("nonempty");
        let ci = *whole.iter().find(|c| c.contains(first)).expect("partition covers");
        match c_identify_sets(g, di, ci, observed_factor(g, ci)) {
            Some(e) => {
                identified.push(di);
                factors.push((di, e));
            }
            None => failed.push(di),
        }
    }

    let mut trace = CondTrace {
        d: g.var_set(d),
        f: g.var_set(f),
        components: names(&components),
        failed: names(&failed),
        identified: names(&identified),
        f0_initial: VarSet::new(),
        f0: VarSet::new(),
        i0: Vec::new(),
        i1: Vec::new(),
        f1_literal: VarSet::new(),
        f1: VarSet::new(),
        line6_moves: Vec::new(),
        line8_additions: Vec::new(),
        returned_at: 4,
    };

    if failed.is_empty() {
        let body = ProbExpr::product(factors.into_iter().map(|(_, e)| e).collect());
        return Ok(CondIdentify {
            trace,
            estimand: Some(ratio(g, body, f, y)),
        });
    }

    let mut f0 = f & pa_all(&failed);
    trace.f0_initial = g.var_set(f0);
    let mut rest = identified;
    let mut i0: Vec<NodeSet> = Vec::new();
    loop {
        let (moved, kept): (Vec<NodeSet>, Vec<NodeSet>) = rest.into_iter().partition(|&di| pa(di).intersects(f0));
        rest = kept;
        trace.line6_moves.push(names(&moved));
        i0.extend(moved);
        let b = (f - f0) & pa_all(&i0);
        trace.line8_additions.push(g.var_set(b));
        if b.is_empty() {
            break;
        }
        f0 |= b;
    }
    let i1 = rest;
    let scope = i1.iter().fold(NodeSet::EMPTY, |acc, &s| acc | s | pa(s));
    let f1 = f & scope;
    trace.f0 = g.var_set(f0);
    trace.i0 = names(&i0);
    trace.i1 = names(&i1);
    trace.f1_literal = g.var_set(f - f0);
    trace.f1 = g.var_set(f1);
    trace.returned_at = 9;

    // outcomes may not lie in or point into a set whose factor is unusable
    let blocked = failed.iter().chain(&i0).fold(NodeSet::EMPTY, |acc, &s| acc | s | pa(s));
    let estimand = if y.intersects(blocked) {
        None
    } else {
        let body = ProbExpr::product(
            factors
                .into_iter()
                .filter(|(di, _)| i1.contains(di))
                .map(|(_, e)| e)
                .collect(),
        );
        Some(ratio(g, body, f1, y))
    };
    Ok(CondIdentify { trace, estimand })
}

/// How IDC, the conditional procedure above and the witness search relate on
/// one query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Agreement {
    /// Both succeed and agree numerically.
    AgreeIdentifiable,
    AgreeNonIdentifiable,
    /// The conditional procedure returns an estimand for a query IDC rejects
    /// and the search certifies, or one that disagrees with the models.
    CondIdentifyUnsound,
    /// IDC fails, the conditional procedure succeeds and no witness was
    /// found. IDC is complete, so this indicates a bug.
    IdcIncompleteCandidate,
    /// IDC succeeds where the conditional procedure fails.
    CondIdentifyIncomplete,
}

impl Agreement {
    pub fn is_bug(self) -> bool {
        self == Agreement::IdcIncompleteCandidate
    }

    pub fn label(self) -> &'static str {
        match self {
            Agreement::AgreeIdentifiable => "agree-identifiable",
            Agreement::AgreeNonIdentifiable => "agree-non-identifiable",
            Agreement::CondIdentifyUnsound => "cond-identify-unsound",
            Agreement::IdcIncompleteCandidate => "idc-incomplete-candidate",
            Agreement::CondIdentifyIncomplete => "cond-identify-incomplete",
        }
    }
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Number of random models used to check an estimand of the conditional
/// procedure against enumeration.
pub const REPORT_TRIALS: u64 = 20;
pub const REPORT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct UnsoundnessReport {
    pub query: String,
    pub idc_estimand: Option<ProbExpr>,
    pub idc_failure: Option<Failure>,
    pub cond: CondIdentify,
    /// Largest deviation of the conditional procedure's estimand from the
    /// enumerated effect over random models.
    pub cond_deviation: Option<f64>,
    pub witness_found: bool,
    pub models_examined: u64,
    pub search_exhausted: bool,
    pub classification: Agreement,
    pub notes: Vec<String>,
}

impl fmt::Display for UnsoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "query: {}", self.query)?;
        match (&self.idc_estimand, &self.idc_failure) {
            (Some(e), _) => writeln!(f, "idc: {e}")?,
            (None, Some(h)) => writeln!(f, "idc: FAIL, {}", h.hedge)?,
            (None, None) => writeln!(f, "idc: FAIL")?,
        }
        let t = &self.cond.trace;
        writeln!(f, "cond-identify: D = {}, F = {}, N = {:?}", t.d, t.f, t.failed)?;
        match &self.cond.estimand {
            Some(e) => writeln!(f, "cond-identify: {e} (line {})", t.returned_at)?,
            None => writeln!(f, "cond-identify: FAIL (line {})", t.returned_at)?,
        }
        if let Some(d) = self.cond_deviation {
            writeln!(f, "cond-identify deviation from models: {d:.3e}")?;
        }
        writeln!(
            f,
            "witness: {} after {} models{}",
            if self.witness_found { "found" } else { "none" },
            self.models_examined,
            if self.search_exhausted { " (exhausted)" } else { "" }
        )?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        write!(f, "classification: {}", self.classification)
    }
}

/// Runs IDC, [`cond_identify`] and the witness search on one query and
/// classifies the outcome.
pub fn unsoundness_report(g: &Admg, q: &Query, bounds: &SearchBounds) -> Result<UnsoundnessReport, OracleError> {
    let idc = idc_query(g, q)?;
    let cond = cond_identify(g, q)?;
    let search = witness_search(g, q, bounds)?;

    let mut notes = Vec::new();
    if cond.trace.returned_at == 9 && cond.trace.f1 != cond.trace.f1_literal {
        notes.push(format!(
            "final summation set read as {} (F \\ F_0 = {})",
            cond.trace.f1, cond.trace.f1_literal
        ));
    }

    let cond_deviation = match &cond.estimand {
        Some(e) => {
            let mut worst = 0.0f64;
            for seed in 0..REPORT_TRIALS {
                let m = random_scm(g, 2, seed);
                worst = worst.max(query_deviation::<f64>(&m, q, e)?.max);
            }
            Some(worst)
        }
        None => None,
    };
    let witness_found = search.witness.is_some();

    let classification = match (&idc, &cond.estimand) {
        (IdentResult::Identified(_), Some(_)) => {
            if cond_deviation.is_some_and(|d| d <= REPORT_TOLERANCE) {
                Agreement::AgreeIdentifiable
            } else {
                Agreement::CondIdentifyUnsound
            }
        }
        (IdentResult::Identified(_), None) => Agreement::CondIdentifyIncomplete,
        (IdentResult::NotIdentifiable(_), None) => Agreement::AgreeNonIdentifiable,
        (IdentResult::NotIdentifiable(_), Some(_)) => {
            if witness_found {
                Agreement::CondIdentifyUnsound
            } else {
                Agreement::IdcIncompleteCandidate
            }
        }
    };
    if classification.is_bug() {
        notes.push("IDC failed but no witness was found: check the implementation".into());
    }

    Ok(UnsoundnessReport {
        query: q.to_string(),
        idc_estimand: idc.estimand().cloned(),
        idc_failure: idc.failure().cloned(),
        cond,
        cond_deviation,
        witness_found,
        models_examined: search.models_examined,
        search_exhausted: search.exhausted,
        classification,
        notes,
    })
}
