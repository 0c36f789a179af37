//! d-separation, back-door paths and the do-calculus rule predicates.
//!
//! A bidirected arc `A <-> B` behaves as a latent fork `A <- U -> B`: the
//! latent is never conditioned on, so the arc transmits dependence unless one
//! of its endpoints blocks the path.

use crate::admg::{Admg, Edges, VarSet};
use crate::error::GraphError;
use crate::nodeset::NodeSet;

/// Which do-calculus rule to test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Insertion or deletion of observations.
    One,
    /// Exchange of actions and observations.
    Two,
    /// Insertion or deletion of actions.
    Three,
}

impl Rule {
    pub fn from_number(n: u8) -> Option<Rule> {
        match n {
            1 => Some(Rule::One),
            2 => Some(Rule::Two),
            3 => Some(Rule::Three),
            _ => None,
        }
    }
}

/// Nodes reachable from `from` along d-connected walks given `given`.
///
/// `first_step_into_source` restricts the first edge to ones with an
/// arrowhead at the source (back-door walks).
fn reachable(edges: &Edges, from: NodeSet, given: NodeSet, first_step_into_source: bool) -> NodeSet {
    let collider_ok = edges.ancestors(given);
    // visited[v] bit 0: arrived with a tail at v; bit 1: arrived with an arrowhead at v
    let n = edges.len();
    let mut visited = vec![0u8; n];
    let mut stack: Vec<(usize, bool)> = Vec::new();
    let mut reached = NodeSet::EMPTY;

    for s in from {
        // parents and bidirected neighbours are entered against an arrowhead at s
        for p in edges.pa[s] {
            stack.push((p, false));
        }
        for b in edges.sib[s] {
            stack.push((b, true));
        }
        if !first_step_into_source {
            for c in edges.ch[s] {
                stack.push((c, true));
            }
        }
    }

    while let Some((v, head)) = stack.pop() {
        let bit = if head { 2 } else { 1 };
        if visited[v] & bit != 0 {
            continue;
        }
        visited[v] |= bit;
        reached.insert(v);

        let in_z = given.contains(v);
        if head {
            // arrived via an arrowhead at v: continuing through a tail is a chain
            // (needs v unobserved), continuing through another arrowhead is a collider
            if !in_z {
                for c in edges.ch[v] {
                    stack.push((c, true));
                }
            }
            if collider_ok.contains(v) {
                for p in edges.pa[v] {
                    stack.push((p, false));
                }
                for b in edges.sib[v] {
                    stack.push((b, true));
                }
            }
        } else if !in_z {
            // arrived via a tail at v (v is a parent of the previous node): fork or chain
            for c in edges.ch[v] {
                stack.push((c, true));
            }
            for p in edges.pa[v] {
                stack.push((p, false));
            }
            for b in edges.sib[v] {
                stack.push((b, true));
            }
        }
    }
    reached
}

/// Index-level d-separation test. Sets are assumed disjoint as required.
pub fn d_separated_sets(edges: &Edges, x: NodeSet, y: NodeSet, z: NodeSet) -> bool {
    if x.is_empty() || y.is_empty() {
        return true;
    }
    !reachable(edges, x, z, false).intersects(y)
}

fn check_disjoint(g: &Admg, x: NodeSet, y: NodeSet, z: NodeSet) -> Result<(), GraphError> {
    if x.intersects(y) {
        return Err(GraphError::Overlap(format!(
            "{} appears on both sides",
            g.var_set(x & y)
        )));
    }
    if z.intersects(x | y) {
        return Err(GraphError::Overlap(format!(
            "conditioning set shares {} with the separated sets",
            g.var_set(z & (x | y))
        )));
    }
    Ok(())
}

/// True iff every path between `x` and `y` is blocked by `z`.
pub fn d_separated(g: &Admg, x: &VarSet, y: &VarSet, z: &VarSet) -> Result<bool, GraphError> {
    let (xs, ys, zs) = (g.node_set(x)?, g.node_set(y)?, g.node_set(z)?);
    check_disjoint(g, xs, ys, zs)?;
    Ok(d_separated_sets(g.edges(), xs, ys, zs))
}

/// True iff a d-connected path from `w` to some member of `y` given `context`
/// starts with an arrowhead into `w`.
pub fn has_backdoor_path(
    g: &Admg,
    w: &str,
    y: &VarSet,
    context: &VarSet,
) -> Result<bool, GraphError> {
    let wi = g
        .index_of(w)
        .ok_or_else(|| GraphError::UnknownNode(w.to_string()))?;
    let ys = g.node_set(y)?;
    let cs = g.node_set(context)?;
    let ws = NodeSet::single(wi);
    check_disjoint(g, ws, ys, cs)?;
    Ok(backdoor_reaches(g.edges(), wi, ys, cs))
}

pub(crate) fn backdoor_reaches(edges: &Edges, w: usize, y: NodeSet, context: NodeSet) -> bool {
    reachable(edges, NodeSet::single(w), context, true).intersects(y)
}

/// Index-level rule predicate; sets must be pairwise disjoint.
pub fn rule_holds(rule: Rule, edges: &Edges, y: NodeSet, x: NodeSet, z: NodeSet, w: NodeSet) -> bool {
    let given = x | w;
    match rule {
        Rule::One => d_separated_sets(&edges.mutilated(x, NodeSet::EMPTY), y, z, given),
        Rule::Two => d_separated_sets(&edges.mutilated(x, z), y, z, given),
        Rule::Three => {
            let gx = edges.mutilated(x, NodeSet::EMPTY);
            let z_star = z - gx.ancestors(w);
            d_separated_sets(&edges.mutilated(x | z_star, NodeSet::EMPTY), y, z, given)
        }
    }
}

/// Evaluates the graphical condition of a do-calculus rule for
/// `P_x(y | z, w)` (rule 1) or `P_{x,z}(y | w)` (rules 2 and 3).
pub fn rule_applies(
    rule: Rule,
    g: &Admg,
    y: &VarSet,
    x: &VarSet,
    z: &VarSet,
    w: &VarSet,
) -> Result<bool, GraphError> {
    let sets = [g.node_set(y)?, g.node_set(x)?, g.node_set(z)?, g.node_set(w)?];
    for i in 0..4 {
        for j in i + 1..4 {
            if sets[i].intersects(sets[j]) {
                return Err(GraphError::Overlap(g.var_set(sets[i] & sets[j]).to_string()));
            }
        }
    }
    let [y, x, z, w] = sets;
    Ok(rule_holds(rule, g.edges(), y, x, z, w))
}
