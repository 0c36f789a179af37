//! Confounded components, C-forests and hedges.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::admg::{Admg, Edges, VarSet};
use crate::nodeset::NodeSet;

/// A partition of a graph's nodes into blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<VarSet>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, name: &str) -> Option<&VarSet> {
        self.blocks.iter().find(|b| b.contains(name))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

/// Maximal C-components, ordered by their earliest member in topological order.
pub fn c_components(g: &Admg) -> Partition {
    Partition {
        blocks: g
            .edges()
            .c_components_within(g.all())
            .into_iter()
            .map(|b| g.var_set(b))
            .collect(),
    }
}

/// True iff `g` is bidirected-connected, no node has more than one directed
/// child, and its root set is exactly `r`.
pub fn is_c_forest(g: &Admg, r: &VarSet) -> bool {
    if g.is_empty() {
        return false;
    }
    let edges = g.edges();
    if edges.c_components_within(g.all()).len() != 1 {
        return false;
    }
    if (0..g.len()).any(|v| edges.children(v).len() > 1) {
        return false;
    }
    g.root_set() == *r
}

/// A witness of non-identifiability: two R-rooted C-forests `F ⊇ F'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hedge {
    pub root: VarSet,
    pub forest_f: Admg,
    pub forest_fprime: Admg,
}

impl Hedge {
    pub fn f_nodes(&self) -> VarSet {
        self.forest_f.nodes().iter().cloned().collect()
    }

    pub fn fprime_nodes(&self) -> VarSet {
        self.forest_fprime.nodes().iter().cloned().collect()
    }
}

impl fmt::Display for Hedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hedge: R = {}, F = {}, F' = {}",
            self.root,
            self.f_nodes(),
            self.fprime_nodes()
        )
    }
}

/// A failed hedge condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HedgeViolation {
    UnknownNode(String),
    NotAnEdgeSubgraph(String),
    FPrimeNotContained,
    FNotCForest,
    FPrimeNotCForest,
    FMissesTreatment,
    FPrimeTouchesTreatment,
    /// `F ⊆ F' ∪ X` fails.
    FExceedsFPrimeAndTreatment,
    RootNotAncestorOfOutcome,
}

impl fmt::Display for HedgeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HedgeViolation::UnknownNode(n) => write!(f, "node {n} is not in the graph"),
            HedgeViolation::NotAnEdgeSubgraph(e) => write!(f, "edge {e} is not in the graph"),
            HedgeViolation::FPrimeNotContained => write!(f, "F' is not contained in F"),
            HedgeViolation::FNotCForest => write!(f, "F is not an R-rooted C-forest"),
            HedgeViolation::FPrimeNotCForest => write!(f, "F' is not an R-rooted C-forest"),
            HedgeViolation::FMissesTreatment => write!(f, "F does not intersect X"),
            HedgeViolation::FPrimeTouchesTreatment => write!(f, "F' intersects X"),
            HedgeViolation::FExceedsFPrimeAndTreatment => write!(f, "F is not contained in F' ∪ X"),
            HedgeViolation::RootNotAncestorOfOutcome => {
                write!(f, "R is not contained in the ancestors of Y with arrows into X cut")
            }
        }
    }
}

fn check_edge_subgraph(sub: &Admg, g: &Admg, out: &mut Vec<HedgeViolation>) {
    for n in sub.nodes() {
        if !g.contains(n) {
            out.push(HedgeViolation::UnknownNode(n.clone()));
        }
    }
    for (a, b) in sub.directed_edges() {
        if !g.has_directed(&a, &b) {
            out.push(HedgeViolation::NotAnEdgeSubgraph(format!("{a} -> {b}")));
        }
    }
    for (a, b) in sub.bidirected_edges() {
        if !g.has_bidirected(&a, &b) {
            out.push(HedgeViolation::NotAnEdgeSubgraph(format!("{a} <-> {b}")));
        }
    }
}

/// Checks every hedge condition for the effect of `x` on `y` in `g`.
pub fn validate_hedge(h: &Hedge, g: &Admg, x: &VarSet, y: &VarSet) -> Result<(), Vec<HedgeViolation>> {
    let mut out = Vec::new();
    check_edge_subgraph(&h.forest_f, g, &mut out);
    check_edge_subgraph(&h.forest_fprime, g, &mut out);
    for n in h.root.iter().chain(x.iter()).chain(y.iter()) {
        if !g.contains(n) {
            out.push(HedgeViolation::UnknownNode(n.clone()));
        }
    }
    if !out.is_empty() {
        return Err(out);
    }

    let f = h.f_nodes();
    let fp = h.fprime_nodes();
    if !fp.is_subset(&f) {
        out.push(HedgeViolation::FPrimeNotContained);
    }
    if !is_c_forest(&h.forest_f, &h.root) {
        out.push(HedgeViolation::FNotCForest);
    }
    if !is_c_forest(&h.forest_fprime, &h.root) {
        out.push(HedgeViolation::FPrimeNotCForest);
    }
    if f.is_disjoint(x) {
        out.push(HedgeViolation::FMissesTreatment);
    }
    if !fp.is_disjoint(x) {
        out.push(HedgeViolation::FPrimeTouchesTreatment);
    }
    if !f.is_subset(&fp.union(x)) {
        out.push(HedgeViolation::FExceedsFPrimeAndTreatment);
    }
    let an = g
        .mutilate(x, &VarSet::new())
        .and_then(|gx| gx.ancestors(y))
        .expect("names validated above");
    if !h.root.is_subset(&an) {
        out.push(HedgeViolation::RootNotAncestorOfOutcome);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Builds the hedge witnessed by a graph `v` that is a single C-component and
/// its sub-C-component `s`, rooted at `roots` (every node of `v` must be an
/// ancestor of `roots` within `v`, and likewise for `s`).
///
/// Each non-root node keeps one directed edge towards the roots, chosen so
/// that the forest on `s` is a sub-forest of the one on `v`; bidirected arcs
/// are thinned to spanning trees in the same nested way.
pub(crate) fn hedge_from_components(g: &Admg, v: NodeSet, s: NodeSet, roots: NodeSet) -> Hedge {
    let edges = g.edges();
    let n = g.len();
    let mut f_edges = Edges::empty(n);

    let mut reached = roots;
    grow_forest(edges, s, &mut reached, &mut f_edges);
    debug_assert_eq!(reached, s, "s must be ancestral to the roots");
    let mut fp_edges = f_edges.clone();
    grow_forest(edges, v, &mut reached, &mut f_edges);
    debug_assert_eq!(reached, v, "v must be ancestral to the roots");

    // nested spanning trees: arcs inside s first
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], a: usize) -> usize {
        let mut r = a;
        while comp[r] != r {
            r = comp[r];
        }
        let mut c = a;
        while comp[c] != r {
            let next = comp[c];
            comp[c] = r;
            c = next;
        }
        r
    }
    for (scope, target) in [(s, 0usize), (v, 1usize)] {
        for a in scope {
            for b in edges.siblings(a) & scope {
                if a >= b {
                    continue;
                }
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                if ra != rb {
                    comp[ra] = rb;
                    f_edges.add_bidirected(a, b);
                    if target == 0 {
                        fp_edges.add_bidirected(a, b);
                    }
                }
            }
        }
    }

    let names = g.nodes();
    let f = Admg::from_edges(names, &f_edges).expect("edge subgraph is acyclic");
    let fp = Admg::from_edges(names, &fp_edges).expect("edge subgraph is acyclic");
    let fv: VarSet = g.var_set(v);
    let sv: VarSet = g.var_set(s);
    Hedge {
        root: g.var_set(roots),
        forest_f: f.induced_subgraph(&fv).expect("nodes exist"),
        forest_fprime: fp.induced_subgraph(&sv).expect("nodes exist"),
    }
}

/// Attaches nodes of `scope` outside `reached` by one directed edge each to a
/// child already in the forest, until nothing more can be attached.
fn grow_forest(edges: &Edges, scope: NodeSet, reached: &mut NodeSet, out: &mut Edges) {
    loop {
        let mut grew = false;
        // latest nodes first: children come before parents when walking back
        let pending: Vec<usize> = (scope - *reached).iter().collect();
        for &u in pending.iter().rev() {
            if let Some(c) = (edges.children(u) & *reached).first() {
                out.add_directed(u, c);
                reached.insert(u);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
}

/// Graph-only C-component reduction: can the c-factor of `c` be obtained from
/// that of `t` (with `c ⊆ t` both C-components)? Follows the
/// ancestral-closure loop; the trace lists each `t` visited.
pub(crate) fn c_factor_reduction(edges: &Edges, c: NodeSet, mut t: NodeSet) -> (bool, Vec<NodeSet>) {
    let mut trace = vec![t];
    loop {
        let a = edges.ancestors_within(c, t);
        if a == c {
            return (true, trace);
        }
        if a == t {
            return (false, trace);
        }
        let first = c.first().expect("nonempty component");
        t = edges.c_component_of(first, a);
        trace.push(t);
    }
}

/// Hedge-freeness of `P_x(y)` decided through C-component reductions alone:
/// every C-component of the ancestors of `y` in `G \ X` must be reducible
/// from its enclosing C-component of `G`.
pub fn effect_hedge_free(edges: &Edges, y: NodeSet, x: NodeSet) -> bool {
    let all = edges.all();
    let rest = all - x;
    let d = edges.ancestors_within(y, rest);
    let whole = edges.c_components_within(all);
    edges.c_components_within(d).into_iter().all(|di| {
        let first = di.first().expect("nonempty");
        let ci = *whole.iter().find(|c| c.contains(first)).expect("partition covers");
        c_factor_reduction(edges, di, ci).0
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::parse_graph;

    fn vs<const N: usize>(n: [&str; N]) -> VarSet {
        VarSet::from(n)
    }

    #[test]
    fn components_of_small_graphs() {
        let g = parse_graph("X -> Z\nZ -> Y\nX <-> Z").unwrap();
        assert_eq!(c_components(&g).blocks, vec![vs(["X", "Z"]), vs(["Y"])]);
        let collider = parse_graph("X -> Z\nX <-> Z\nY -> Z\nW -> Y").unwrap();
        let p = c_components(&collider);
        assert_eq!(p.len(), 3);
        assert!(p.blocks.contains(&vs(["X", "Z"])));
        assert!(p.blocks.contains(&vs(["Y"])));
        assert!(p.blocks.contains(&vs(["W"])));
        let dag = parse_graph("A -> B\nB -> C").unwrap();
        assert!(c_components(&dag).blocks.iter().all(|b| b.len() == 1));
    }

    #[test]
    fn c_forests() {
        let y = parse_graph("Y").unwrap();
        assert!(is_c_forest(&y, &vs(["Y"])));
        let bow = parse_graph("X -> Y\nX <-> Y").unwrap();
        assert!(is_c_forest(&bow, &vs(["Y"])));
        assert!(!is_c_forest(&bow, &vs(["X"])));
        let mediator = parse_graph("X -> Z\nZ -> Y\nX <-> Z").unwrap();
        assert!(!is_c_forest(&mediator, &vs(["Y"])));
        let two_children = parse_graph("A -> B\nA -> C\nA <-> B\nB <-> C").unwrap();
        assert!(!is_c_forest(&two_children, &vs(["B", "C"])));
    }

    fn bow_hedge() -> (Admg, Hedge) {
        let bow = parse_graph("X -> Y\nX <-> Y").unwrap();
        let h = Hedge {
            root: vs(["Y"]),
            forest_f: bow.clone(),
            forest_fprime: parse_graph("Y").unwrap(),
        };
        (bow, h)
    }

    #[test]
    fn bow_hedge_validates() {
        let (bow, h) = bow_hedge();
        assert_eq!(validate_hedge(&h, &bow, &vs(["X"]), &vs(["Y"])), Ok(()));
    }

    #[test]
    fn broken_hedges_rejected() {
        let (bow, h) = bow_hedge();
        let swapped = Hedge {
            root: h.root.clone(),
            forest_f: h.forest_fprime.clone(),
            forest_fprime: h.forest_f.clone(),
        };
        let errs = validate_hedge(&swapped, &bow, &vs(["X"]), &vs(["Y"])).unwrap_err();
        assert!(errs.contains(&HedgeViolation::FPrimeNotContained));

        let errs = validate_hedge(&h, &bow, &vs([]), &vs(["Y"])).unwrap_err();
        assert!(errs.contains(&HedgeViolation::FMissesTreatment));
    }

    #[test]
    fn hedge_construction_matches_bow() {
        let bow = parse_graph("X -> Y\nX <-> Y").unwrap();
        let h = hedge_from_components(
            &bow,
            bow.all(),
            NodeSet::single(bow.index_of("Y").unwrap()),
            NodeSet::single(bow.index_of("Y").unwrap()),
        );
        let (_, expected) = bow_hedge();
        assert_eq!(h, expected);
    }

    #[test]
    fn hedge_free_route() {
        let bow = parse_graph("X -> Y\nX <-> Y").unwrap();
        let e = bow.edges();
        let (x, y) = (bow.node_set(&vs(["X"])).unwrap(), bow.node_set(&vs(["Y"])).unwrap());
        assert!(!effect_hedge_free(e, y, x));
        let front_door = parse_graph("X -> M\nM -> Y\nX <-> Y").unwrap();
        let e = front_door.edges();
        let (x, y) = (
            front_door.node_set(&vs(["X"])).unwrap(),
            front_door.node_set(&vs(["Y"])).unwrap(),
        );
        assert!(effect_hedge_free(e, y, x));
    }
}
