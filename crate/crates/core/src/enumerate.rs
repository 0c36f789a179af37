//! Exhaustive enumeration of small graphs and queries, for sweeping the
//! identification algorithms against each other and against the oracle.

use std::collections::BTreeSet;

use crate::admg::{Admg, VarSet};
use crate::query::Query;

const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

/// Largest node count [`admgs`] accepts.
pub const MAX_ENUMERATED_NODES: usize = NAMES.len();

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * n + b
}

/// Bit code of a labelled graph: directed edges in the low `n * n` bits,
/// bidirected pairs above them.
fn code(n: usize, directed: &[(usize, usize)], bidirected: &[(usize, usize)], perm: &[usize]) -> u64 {
    let mut c = 0u64;
    for &(u, v) in directed {
        c |= 1 << (perm[u] * n + perm[v]);
    }
    for &(u, v) in bidirected {
        c |= 1 << (n * n + pair_index(n, perm[u], perm[v]));
    }
    c
}

fn decode(n: usize, c: u64) -> Admg {
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if c >> (u * n + v) & 1 == 1 {
                directed.push((NAMES[u], NAMES[v]));
            }
            if u < v && c >> (n * n + pair_index(n, u, v)) & 1 == 1 {
                bidirected.push((NAMES[u], NAMES[v]));
            }
        }
    }
    Admg::new(NAMES[..n].iter().copied(), &directed, &bidirected).expect("enumerated graphs are acyclic")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !prefix.contains(&i) {
                prefix.push(i);
                go(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), n, &mut out);
    out
}

/// All acyclic directed mixed graphs on exactly `n` nodes, one per
/// isomorphism class, named `A, B, ...` in a canonical labelling.
pub fn admgs(n: usize) -> Vec<Admg> {
    assert!(n <= MAX_ENUMERATED_NODES, "at most {MAX_ENUMERATED_NODES} nodes");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    // every DAG has a labelling in which edges point from lower to higher
    for dmask in 0u64..1 << pairs.len() {
        let directed: Vec<(usize, usize)> = pick(&pairs, dmask);
        for bmask in 0u64..1 << pairs.len() {
            let bidirected = pick(&pairs, bmask);
            let canonical = perms
                .iter()
                .map(|p| code(n, &directed, &bidirected, p))
                .min()
                .expect("at least one permutation");
            seen.insert(canonical);
        }
    }
    seen.into_iter().map(|c| decode(n, c)).collect()
}

fn pick(pairs: &[(usize, usize)], mask: u64) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &p)| p)
        .collect()
}

/// [`admgs`] for every node count from 1 to `max_nodes`.
pub fn admgs_up_to(max_nodes: usize) -> Vec<Admg> {
    (1..=max_nodes).flat_map(admgs).collect()
}

/// Queries `P(y | do(x), w)` with single-variable `y` and `x` and at most
/// `max_w` conditioning variables, all pairwise distinct.
pub fn singleton_queries(g: &Admg, max_w: usize) -> Vec<Query> {
    let nodes = g.nodes();
    let mut out = Vec::new();
    for y in nodes {
        for x in nodes.iter().filter(|x| *x != y) {
            let rest: Vec<&String> = nodes.iter().filter(|v| *v != y && *v != x).collect();
            for mask in 0u64..1 << rest.len() {
                if mask.count_ones() as usize > max_w {
                    continue;
                }
                let w: VarSet = rest
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, v)| v.as_str())
                    .collect();
                out.push(
                    Query::new(VarSet::from([y.as_str()]), VarSet::from([x.as_str()]), w)
                        .expect("distinct roles"),
                );
            }
        }
    }
    out
}
