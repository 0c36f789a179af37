//! Binary parity models built from a hedge.

use crate::admg::{Admg, VarSet};
use crate::confounding::{is_c_forest, Hedge};
use crate::error::OracleError;
use crate::nodeset::NodeSet;

use super::scm::{bidirected_pairs, DiscreteScm};

/// The two parity models for a hedge and outcome set `y`.
///
/// Both models live on `g`. Nodes in `H = An(Y) ∩ De(F)` are the parity of
/// their parents inside `H`, shared latents included (fair coins); all other
/// nodes are constant. In the second model, nodes of `F'` ignore parents in
/// `F \ F'`. Whether the pair witnesses non-identifiability is left to
/// [`check_lemma1`](super::witness::check_lemma1).
pub fn parity_pair(g: &Admg, h: &Hedge, y: &VarSet) -> Result<(DiscreteScm, DiscreteScm), OracleError> {
    parity_pair_along_path(g, h, y, &[])
}

/// [`parity_pair`] with the nodes of `path` added to the parity region, as
/// used to carry a hedge's effect along a back-door path.
pub fn parity_pair_along_path(
    g: &Admg,
    h: &Hedge,
    y: &VarSet,
    path: &[String],
) -> Result<(DiscreteScm, DiscreteScm), OracleError> {
    let f = g.node_set(h.forest_f.nodes())?;
    let fp = g.node_set(h.forest_fprime.nodes())?;
    if !fp.is_subset(f) || !is_c_forest(&h.forest_f, &h.root) || !is_c_forest(&h.forest_fprime, &h.root) {
        return Err(OracleError::InvalidHedge(
            "F and F' must be nested C-forests over the same root set".into(),
        ));
    }
    let ys = g.node_set(y)?;
    let edges = g.edges();
    let region = (edges.ancestors(ys) & edges.descendants(f)) | g.node_set(path)?;
    let first = build(g, region, NodeSet::EMPTY, NodeSet::EMPTY)?;
    let second = build(g, region, fp, f - fp)?;
    Ok((first, second))
}

/// Parity model on `region`; nodes of `deaf` ignore observable parents in
/// `muted`.
fn build(g: &Admg, region: NodeSet, deaf: NodeSet, muted: NodeSet) -> Result<DiscreteScm, OracleError> {
    let n = g.len();
    let pairs = bidirected_pairs(g);
    let edges = g.edges();
    let mut tables = Vec::with_capacity(n);
    for v in 0..n {
        let parents: Vec<usize> = edges.parents(v).iter().collect();
        let shared: Vec<usize> = pairs
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(i, _)| i)
            .collect();
        let inputs = parents.len() + shared.len();
        let mut table = Vec::with_capacity(1 << inputs);
        for idx in 0..1usize << inputs {
            if !region.contains(v) {
                table.push(0);
                continue;
            }
            let mut bit = 0;
            for (k, &p) in parents.iter().enumerate() {
                let listened = region.contains(p) && !(deaf.contains(v) && muted.contains(p));
                if listened {
                    bit ^= (idx >> (inputs - 1 - k)) & 1;
                }
            }
            for (k, &s) in shared.iter().enumerate() {
                let (a, b) = pairs[s];
                if region.contains(a) && region.contains(b) {
                    bit ^= (idx >> (shared.len() - 1 - k)) & 1;
                }
            }
            table.push(bit);
        }
        tables.push(table);
    }
    DiscreteScm::new(
        g.clone(),
        vec![2; n],
        vec![vec![1, 1]; pairs.len()],
        vec![vec![1]; n],
        tables,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::parse_graph;
    use crate::expr::Assignment;

    fn bow_hedge(g: &Admg) -> Hedge {
        Hedge {
            root: VarSet::from(["Y"]),
            forest_f: g.clone(),
            forest_fprime: g.induced_subgraph(&VarSet::from(["Y"])).unwrap(),
        }
    }

    #[test]
    fn bow_pair_shapes() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let (m1, m2) = parity_pair(&g, &bow_hedge(&g), &VarSet::from(["Y"])).unwrap();
        // X = U; first model Y = X xor U, second Y = U
        assert_eq!(m1.tables()[0], vec![0, 1]);
        assert_eq!(m1.tables()[1], vec![0, 1, 1, 0]);
        assert_eq!(m2.tables()[1], vec![0, 1, 0, 1]);
        assert_eq!(m1.shared_weights(), &[vec![1, 1]]);
        let j1 = m1.joint::<f64>();
        assert_eq!(j1.probs(), &[0.5, 0.0, 0.5, 0.0]);
        let _ = m2.interventional::<f64>(&[("X".to_string(), 1)].into_iter().collect::<Assignment>()).unwrap();
    }

    #[test]
    fn equal_forests_give_equal_models() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let h = Hedge {
            root: VarSet::from(["Y"]),
            forest_f: g.clone(),
            forest_fprime: g.clone(),
        };
        let (m1, m2) = parity_pair(&g, &h, &VarSet::from(["Y"])).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn rejects_non_forests() {
        let g = parse_graph("X -> Y").unwrap();
        let h = Hedge {
            root: VarSet::from(["Y"]),
            forest_f: g.clone(),
            forest_fprime: g.induced_subgraph(&VarSet::from(["Y"])).unwrap(),
        };
        assert!(parity_pair(&g, &h, &VarSet::from(["Y"])).is_err());
    }
}
