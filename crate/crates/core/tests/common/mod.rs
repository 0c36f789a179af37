#![allow(dead_code)]

use std::collections::BTreeSet;

use causal_id::expr::assignments_of;
use causal_id::{Admg, Assignment, DistTable, Scalar, VarSet};

pub const NAMES: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

pub fn vs(names: &[&str]) -> VarSet {
    names.iter().copied().collect()
}

/// A graph on `n` nodes whose directed edges follow `order` (a permutation of
/// `0..n`), so the result is acyclic whatever the masks hold.
pub fn graph_from_bits(n: usize, order: &[usize], dmask: u32, bmask: u32) -> Admg {
    let mut directed = Vec::new();
    let mut bidirected = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            if dmask >> k & 1 == 1 {
                directed.push((NAMES[order[i]], NAMES[order[j]]));
            }
            if bmask >> k & 1 == 1 {
                bidirected.push((NAMES[order[i]], NAMES[order[j]]));
            }
            k += 1;
        }
    }
    Admg::new(NAMES[..n].iter().copied(), &directed, &bidirected).unwrap()
}

/// Splits nodes into three disjoint sets by a base-4 code per node:
/// 0 none, 1 first, 2 second, 3 third.
pub fn split(g: &Admg, code: u32) -> (VarSet, VarSet, VarSet) {
    let mut out = (VarSet::new(), VarSet::new(), VarSet::new());
    for (i, n) in g.nodes().iter().enumerate() {
        match code >> (2 * i) & 3 {
            1 => out.0.insert(n.clone()),
            2 => out.1.insert(n.clone()),
            3 => out.2.insert(n.clone()),
            _ => false,
        };
    }
    out
}

/// Reference d-separation: bidirected arcs become explicit latent parents and
/// every simple path between `x` and `y` is checked for blocking.
pub fn naive_d_separated(g: &Admg, x: &VarSet, y: &VarSet, z: &VarSet) -> bool {
    let n = g.len();
    let mut children: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (u, v) in g.directed_edges() {
        children[g.index_of(&u).unwrap()].insert(g.index_of(&v).unwrap());
    }
    for (u, v) in g.bidirected_edges() {
        children.push([g.index_of(&u).unwrap(), g.index_of(&v).unwrap()].into_iter().collect());
    }
    let total = children.len();
    let mut neighbours: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); total];
    for (u, ch) in children.iter().enumerate() {
        for &v in ch {
            neighbours[u].insert(v);
            neighbours[v].insert(u);
        }
    }
    let idx = |s: &VarSet| -> BTreeSet<usize> { s.iter().map(|v| g.index_of(v).unwrap()).collect() };
    let (xs, ys, zs) = (idx(x), idx(y), idx(z));
    let descendants = |m: usize| -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([m]);
        let mut stack = vec![m];
        while let Some(u) = stack.pop() {
            for &c in &children[u] {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        seen
    };
    let blocked = |path: &[usize]| -> bool {
        (1..path.len() - 1).any(|k| {
            let (a, m, b) = (path[k - 1], path[k], path[k + 1]);
            let collider = children[a].contains(&m) && children[b].contains(&m);
            if collider {
                descendants(m).is_disjoint(&zs)
            } else {
                zs.contains(&m)
            }
        })
    };
    fn walk(
        path: &mut Vec<usize>,
        targets: &BTreeSet<usize>,
        neighbours: &[BTreeSet<usize>],
        blocked: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let u = *path.last().unwrap();
        if path.len() > 1 && targets.contains(&u) {
            return !blocked(path);
        }
        for &v in &neighbours[u] {
            if path.contains(&v) {
                continue;
            }
            path.push(v);
            let open = walk(path, targets, neighbours, blocked);
            path.pop();
            if open {
                return true;
            }
        }
        false
    }
    !xs.iter().any(|&s| walk(&mut vec![s], &ys, &neighbours, &blocked))
}

fn sub<T: Scalar>(a: T, b: T) -> T {
    if a > b {
        a - b
    } else {
        b - a
    }
}

/// Largest `|P(x, y | z) - P(x | z) P(y | z)|` over cells with `P(z) > 0`.
pub fn dependence<T: Scalar>(t: &DistTable<T>, x: &VarSet, y: &VarSet, z: &VarSet) -> T {
    let dom = |s: &VarSet| -> Vec<(String, usize)> { s.iter().map(|n| (n.clone(), t.domain(n).unwrap())).collect() };
    let merge = |parts: &[&Assignment]| -> Assignment {
        parts.iter().flat_map(|p| p.iter().map(|(k, v)| (k.clone(), *v))).collect()
    };
    let mut worst = T::zero();
    for za in assignments_of(&dom(z)) {
        let pz = t.prob_of(&za).unwrap();
        if pz.is_zero() {
            continue;
        }
        for xa in assignments_of(&dom(x)) {
            let pxz = t.prob_of(&merge(&[&xa, &za])).unwrap();
            for ya in assignments_of(&dom(y)) {
                let pyz = t.prob_of(&merge(&[&ya, &za])).unwrap();
                let pxyz = t.prob_of(&merge(&[&xa, &ya, &za])).unwrap();
                let d = sub(pxyz / pz.clone(), pxz.clone() * pyz / (pz.clone() * pz.clone()));
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}
