//! Two-model witnesses of non-identifiability.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::admg::{Admg, VarSet};
use crate::error::OracleError;
use crate::expr::{assignments_of, Assignment, DistTable};
use crate::query::Query;

use super::scm::{bidirected_pairs, DiscreteScm};

/// Two-model non-identifiability conditions for one choice of treatment values `x` and
/// conditioning values `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Check {
    pub x: Assignment,
    pub z: Assignment,
    /// `P¹(x | Pa(X) \ X) > 0` for every parent configuration of positive mass.
    pub treatment_positive: bool,
    pub first_condition_positive: bool,
    pub second_condition_positive: bool,
    /// `P¹_x(Y | z) ≠ P²_x(Y | z)`.
    pub effects_differ: bool,
    /// `P¹(x, z) > 0`: the values also co-occur without intervention.
    pub observed_jointly: bool,
}

impl Lemma1Check {
    /// All conditions as literally stated.
    pub fn literal(&self) -> bool {
        self.treatment_positive
            && self.first_condition_positive
            && self.second_condition_positive
            && self.effects_differ
    }

    /// The literal conditions plus joint observational support of `(x, z)`.
    pub fn guarded(&self) -> bool {
        self.literal() && self.observed_jointly
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Verdict {
    pub same_observational: bool,
    /// Every joint value of the observables has positive mass under the
    /// first model.
    pub positive_observational: bool,
    pub checks: Vec<Lemma1Check>,
}

impl Lemma1Verdict {
    /// The pair satisfies every literal condition for some values.
    pub fn holds(&self) -> bool {
        self.same_observational && self.checks.iter().any(Lemma1Check::literal)
    }

    /// The pair satisfies the literal conditions together with the joint
    /// support guard for some values.
    pub fn holds_guarded(&self) -> bool {
        self.same_observational && self.checks.iter().any(Lemma1Check::guarded)
    }

    /// [`Self::holds_guarded`] on a strictly positive observational
    /// distribution, where every identification formula is defined.
    pub fn holds_positive(&self) -> bool {
        self.positive_observational && self.holds_guarded()
    }

    /// First values satisfying the guarded conditions.
    pub fn witness(&self) -> Option<&Lemma1Check> {
        if !self.same_observational {
            return None;
        }
        self.checks.iter().find(|c| c.guarded())
    }
}

impl fmt::Display for Lemma1Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "same observational distribution: {}", self.same_observational)?;
        writeln!(f, "observational distribution positive: {}", self.positive_observational)?;
        for c in &self.checks {
            writeln!(
                f,
                "x = {:?}, z = {:?}: treatment positive {}, conditions positive {}/{}, effects differ {}, jointly observed {}",
                c.x,
                c.z,
                c.treatment_positive,
                c.first_condition_positive,
                c.second_condition_positive,
                c.effects_differ,
                c.observed_jointly
            )?;
        }
        Ok(())
    }
}

fn mass(t: &DistTable<BigRational>, event: &Assignment) -> BigRational {
    t.prob_of(event).expect("event over model variables")
}

/// Exact check of the two-model non-identifiability conditions for
/// `P_x(y | w)`, over every value combination of `X` and `W`.
pub fn check_lemma1(m1: &DiscreteScm, m2: &DiscreteScm, q: &Query) -> Result<Lemma1Verdict, OracleError> {
    if m1.graph() != m2.graph() || m1.domains() != m2.domains() {
        return Err(OracleError::GraphMismatch);
    }
    let g = m1.graph();
    q.check_against(g).map_err(|e| OracleError::Assignment(e.to_string()))?;
    let p1 = m1.interventional_exact(&Assignment::new())?;
    let p2 = m2.interventional_exact(&Assignment::new())?;
    let same_observational = p1 == p2;
    let positive_observational = p1.probs().iter().all(|p| !p.is_zero());

    let dom = |s: &VarSet| -> Vec<(String, usize)> {
        s.iter().map(|n| (n.clone(), m1.domain(n).expect("checked"))).collect()
    };
    let xs = g.node_set(&q.x)?;
    let pa: VarSet = g.var_set(g.edges().parents_of_set(xs) - xs);
    let pa_cfgs = assignments_of(&dom(&pa));
    let y_cfgs = assignments_of(&dom(&q.y));

    let mut checks = Vec::new();
    for x in assignments_of(&dom(&q.x)) {
        let treatment_positive = pa_cfgs.iter().all(|c| {
            let pc = mass(&p1, c);
            pc.is_zero() || {
                let mut both = c.clone();
                both.extend(x.clone());
                !mass(&p1, &both).is_zero()
            }
        });
        let i1 = m1.interventional_exact(&x)?;
        let i2 = m2.interventional_exact(&x)?;
        for z in assignments_of(&dom(&q.w)) {
            let (z1, z2) = (mass(&i1, &z), mass(&i2, &z));
            let mut xz = x.clone();
            xz.extend(z.clone());
            let effects_differ = !z1.is_zero()
                && !z2.is_zero()
                && y_cfgs.iter().any(|yv| {
                    let mut e = yv.clone();
                    e.extend(z.clone());
                    mass(&i1, &e) / z1.clone() != mass(&i2, &e) / z2.clone()
                });
            checks.push(Lemma1Check {
                x: x.clone(),
                z: z.clone(),
                treatment_positive,
                first_condition_positive: !z1.is_zero(),
                second_condition_positive: !z2.is_zero(),
                effects_differ,
                observed_jointly: !mass(&p1, &xz).is_zero(),
            });
        }
    }
    Ok(Lemma1Verdict {
        same_observational,
        positive_observational,
        checks,
    })
}

/// Limits for [`witness_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Largest domain of any latent variable.
    pub latent_domain: usize,
    /// Latent probabilities are multiples of `1 / grid`.
    pub grid: u64,
    /// Largest number of observable nodes searched.
    pub max_nodes: usize,
    /// Total number of candidate models examined before giving up.
    pub max_models: u64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            latent_domain: 4,
            grid: 8,
            max_nodes: 5,
            max_models: 8_000_000,
        }
    }
}

/// A pair of models certifying non-identifiability.
#[derive(Clone, Debug)]
pub struct Witness {
    pub first: DiscreteScm,
    pub second: DiscreteScm,
    pub verdict: Lemma1Verdict,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub witness: Option<Witness>,
    pub models_examined: u64,
    /// Every model within the latent-domain and grid bounds was examined.
    pub exhausted: bool,
}

/// Latent domain sizes for one search stratum: shared latents first, then
/// one private latent per node.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    shared: Vec<usize>,
    own: Vec<usize>,
}

/// Per-shape enumeration plan.
struct Stratum {
    shape: Shape,
    /// mechanism table size per node (binary observables)
    table_sizes: Vec<usize>,
    /// per node, the number of parent rows
    rows: Vec<usize>,
    /// compositions of `grid` for every latent, shared first
    compositions: Vec<Vec<Vec<u64>>>,
    /// joint latent configurations: per config, per node, the latent part of
    /// the mechanism index
    latent_index: Vec<Vec<usize>>,
    /// per config, per latent, the value taken
    latent_values: Vec<Vec<usize>>,
    count: u128,
}

fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts as u64 - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Tables of `rows` rows of `lat` bits each with no constant row. A constant
/// row leaves one value without mass under some parent configuration.
fn varying_tables(lat: usize, rows: usize) -> Vec<u64> {
    if lat < 2 || lat * rows >= 64 {
        return Vec::new();
    }
    let mut out = vec![0u64];
    for r in 0..rows {
        out = out
            .iter()
            .flat_map(|&t| (1..(1u64 << lat) - 1).map(move |row| t | row << (r * lat)))
            .collect();
    }
    out
}

impl Stratum {
    fn new(g: &Admg, pairs: &[(usize, usize)], shape: Shape, grid: u64) -> Stratum {
        let n = g.len();
        let shared_of: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| a == v || b == v)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let table_sizes: Vec<usize> = (0..n)
            .map(|v| {
                let pa = g.edges().parents(v).len();
                let sh: usize = shared_of[v].iter().map(|&s| shape.shared[s]).product();
                (1usize << pa) * sh * shape.own[v]
            })
            .collect();
        let domains: Vec<usize> = shape.shared.iter().chain(shape.own.iter()).copied().collect();
        let compositions: Vec<Vec<Vec<u64>>> = domains.iter().map(|&d| compositions(grid, d)).collect();
        let mut latent_index = Vec::new();
        let mut latent_values = Vec::new();
        for cfg in assignments_of(
            &domains
                .iter()
                .enumerate()
                .map(|(i, &d)| (format!("{i:04}"), d))
                .collect::<Vec<_>>(),
        ) {
            let values: Vec<usize> = cfg.values().copied().collect();
            let idx: Vec<usize> = (0..n)
                .map(|v| {
                    let sh = shared_of[v]
                        .iter()
                        .fold(0, |acc, &s| acc * shape.shared[s] + values[s]);
                    sh * shape.own[v] + values[pairs.len() + v]
                })
                .collect();
            latent_index.push(idx);
            latent_values.push(values);
        }
        let rows: Vec<usize> = (0..n).map(|v| 1 << g.edges().parents(v).len()).collect();
        let mut count: u128 = 1;
        for v in 0..n {
            let lat = table_sizes[v] / rows[v];
            let per_row = if lat < 2 || table_sizes[v] >= 64 { 0 } else { (1u128 << lat) - 2 };
            count = count.saturating_mul(per_row.saturating_pow(rows[v] as u32));
        }
        for c in &compositions {
            count = count.saturating_mul(c.len() as u128);
        }
        Stratum {
            shape,
            table_sizes,
            rows,
            compositions,
            latent_index,
            latent_values,
            count,
        }
    }
}

/// Evaluation context shared by all strata of one search.
struct Evaluator<'a> {
    g: &'a Admg,
    parents: Vec<Vec<usize>>,
    n: usize,
}

impl Evaluator<'_> {
    /// Counts over all binary nodes, with `fixed` nodes forced.
    fn counts(
        &self,
        stratum: &Stratum,
        weights: &[u64],
        tables: &[u64],
        fixed: &[Option<usize>],
        out: &mut [u64],
    ) {
        out.iter_mut().for_each(|c| *c = 0);
        let mut vals = vec![0usize; self.n];
        for (cfg, idx) in stratum.latent_index.iter().enumerate() {
            let w = weights[cfg];
            if w == 0 {
                continue;
            }
            let mut cell = 0usize;
            for v in 0..self.n {
                let val = match fixed[v] {
                    Some(c) => c,
                    None => {
                        let pa = self.parents[v].iter().fold(0, |a, &p| a * 2 + vals[p]);
                        let lat_cfgs = stratum.table_sizes[v] >> self.parents[v].len();
                        ((tables[v] >> (pa * lat_cfgs + idx[v])) & 1) as usize
                    }
                };
                vals[v] = val;
                cell = cell * 2 + val;
            }
            out[cell] += w;
        }
    }

    fn scm(&self, stratum: &Stratum, comps: &[usize], tables: &[u64]) -> DiscreteScm {
        let n = self.n;
        let n_shared = stratum.shape.shared.len();
        let weight_of = |l: usize| stratum.compositions[l][comps[l]].clone();
        let shared = (0..n_shared).map(weight_of).collect();
        let own = (0..n).map(|v| weight_of(n_shared + v)).collect();
        let full_tables = (0..n)
            .map(|v| (0..stratum.table_sizes[v]).map(|j| ((tables[v] >> j) & 1) as usize).collect())
            .collect();
        DiscreteScm::new(self.g.clone(), vec![2; n], shared, own, full_tables).expect("search models are well-formed")
    }
}

struct Entry {
    signature: Box<[u64]>,
    stratum: usize,
    comps: Vec<usize>,
    tables: Vec<u64>,
}

struct Bucket {
    /// per treatment value: `P(x | Pa(X) \ X) > 0`
    treatment_positive: Vec<bool>,
    /// per treatment value and conditioning value: `P(x, z) > 0`
    observed: Vec<Vec<bool>>,
    entries: Vec<Entry>,
    seen: HashSet<Box<[u64]>>,
}

/// Searches binary deterministic-mechanism models over `g` for two with
/// equal, strictly positive observational distributions but different
/// `P_x(y | w)`.
///
/// Models whose observational distribution has a zero cell are counted as
/// examined and otherwise skipped: on them identification formulas may
/// condition on null events, so a differing pair would not contradict an
/// identification result.
///
/// Latent weights range over positive multiples of `1 / grid`. Strata of
/// latent domain sizes are examined from the smallest number of candidate
/// models upwards; the first pair found, in this deterministic order, is
/// confirmed with [`check_lemma1`] before being returned.
pub fn witness_search(g: &Admg, q: &Query, bounds: &SearchBounds) -> Result<SearchOutcome, OracleError> {
    q.check_against(g).map_err(|e| OracleError::Assignment(e.to_string()))?;
    let n = g.len();
    let none = |examined, exhausted| SearchOutcome {
        witness: None,
        models_examined: examined,
        exhausted,
    };
    let pairs = bidirected_pairs(g);
    if n > bounds.max_nodes || n > 16 || bounds.latent_domain < 2 && !pairs.is_empty() || bounds.grid == 0 {
        return Ok(none(0, false));
    }
    let xs = g.node_set(&q.x)?;
    let ys = g.node_set(&q.y)?;
    let zs = g.node_set(&q.w)?;
    let pa = g.edges().parents_of_set(xs) - xs;

    // every stratum, ordered by model count then shape
    let mut shapes = Vec::new();
    let max = bounds.latent_domain;
    let grid = bounds.grid as usize;
    let n_lat = pairs.len() + n;
    let mut cur = vec![0usize; n_lat];
    loop {
        let shape = Shape {
            shared: cur[..pairs.len()].iter().map(|c| c + 2).collect(),
            own: cur[pairs.len()..].iter().map(|c| c + 1).collect(),
        };
        if shape.shared.iter().chain(&shape.own).all(|&d| d <= grid) {
            shapes.push(shape);
        }
        let mut i = n_lat;
        let done = loop {
            if i == 0 {
                break true;
            }
            i -= 1;
            cur[i] += 1;
            let limit = if i < pairs.len() { max - 1 } else { max };
            if cur[i] < limit {
                break false;
            }
            cur[i] = 0;
        };
        if done {
            break;
        }
    }
    let mut strata: Vec<Stratum> = shapes
        .into_iter()
        .map(|s| Stratum::new(g, &pairs, s, bounds.grid))
        .filter(|st| st.count > 0)
        .collect();
    strata.sort_by(|a, b| a.count.cmp(&b.count).then_with(|| a.shape.cmp(&b.shape)));

    let ev = Evaluator {
        g,
        parents: (0..n).map(|v| g.edges().parents(v).iter().collect()).collect(),
        n,
    };
    let cells = 1usize << n;
    let x_cfgs: Vec<Vec<Option<usize>>> = (0..1usize << xs.len())
        .map(|bits| {
            let mut f = vec![None; n];
            for (k, v) in xs.iter().enumerate() {
                f[v] = Some((bits >> (xs.len() - 1 - k)) & 1);
            }
            f
        })
        .collect();
    let z_list: Vec<usize> = zs.iter().collect();
    let y_list: Vec<usize> = ys.iter().collect();
    let bit = |cell: usize, v: usize| (cell >> (n - 1 - v)) & 1;
    let z_index = |cell: usize| z_list.iter().fold(0, |a, &v| a * 2 + bit(cell, v));
    let y_index = |cell: usize| y_list.iter().fold(0, |a, &v| a * 2 + bit(cell, v));
    let n_z = 1usize << z_list.len();
    let n_y = 1usize << y_list.len();

    let mut buckets: HashMap<Box<[u64]>, Bucket> = HashMap::new();
    let mut examined: u64 = 0;
    let mut joint = vec![0u64; cells];
    let mut scratch = vec![0u64; cells];
    let free = vec![None; n];

    for (si, st) in strata.iter().enumerate() {
        let candidates: Vec<Vec<u64>> = (0..n)
            .map(|v| varying_tables(st.table_sizes[v] / st.rows[v], st.rows[v]))
            .collect();
        let n_cfg = st.latent_index.len();
        let mut comps = vec![0usize; st.compositions.len()];
        loop {
            // configuration weights for this choice of latent distributions
            let weights: Vec<u64> = (0..n_cfg)
                .map(|c| {
                    st.latent_values[c]
                        .iter()
                        .enumerate()
                        .map(|(l, &val)| st.compositions[l][comps[l]][val])
                        .product()
                })
                .collect();
            let mut choice = vec![0usize; n];
            loop {
                let tables: Vec<u64> = (0..n).map(|v| candidates[v][choice[v]]).collect();
                if examined == bounds.max_models {
                    return Ok(none(examined, false));
                }
                examined += 1;
                ev.counts(st, &weights, &tables, &free, &mut joint);
                if joint.contains(&0) {
                    if !advance(&mut choice, &candidates) {
                        break;
                    }
                    continue;
                }

                // signature: per x, counts over (z, y)
                let mut sig = vec![0u64; x_cfgs.len() * n_z * n_y];
                for (xi, fixed) in x_cfgs.iter().enumerate() {
                    ev.counts(st, &weights, &tables, fixed, &mut scratch);
                    for (cell, &c) in scratch.iter().enumerate() {
                        if c > 0 {
                            sig[(xi * n_z + z_index(cell)) * n_y + y_index(cell)] += c;
                        }
                    }
                }

                let bucket = buckets.entry(joint.clone().into_boxed_slice()).or_insert_with(|| {
                    let x_of = |cell: usize| xs.iter().fold(0, |a, v| a * 2 + bit(cell, v));
                    let treatment_positive = (0..x_cfgs.len())
                        .map(|xi| {
                            // every parent configuration with mass admits x
                            let mut with_mass = HashMap::new();
                            for (cell, &c) in joint.iter().enumerate() {
                                if c == 0 {
                                    continue;
                                }
                                let key: usize = pa.iter().fold(0, |a, v| a * 2 + bit(cell, v));
                                let e = with_mass.entry(key).or_insert(false);
                                if x_of(cell) == xi {
                                    *e = true;
                                }
                            }
                            with_mass.values().all(|&b| b)
                        })
                        .collect();
                    let mut observed = vec![vec![false; n_z]; x_cfgs.len()];
                    for (cell, &c) in joint.iter().enumerate() {
                        if c > 0 {
                            observed[x_of(cell)][z_index(cell)] = true;
                        }
                    }
                    Bucket {
                        treatment_positive,
                        observed,
                        entries: Vec::new(),
                        seen: HashSet::new(),
                    }
                });

                if !bucket.seen.contains(sig.as_slice()) {
                    let hit = bucket.entries.iter().position(|e| {
                        differs(&e.signature, &sig, x_cfgs.len(), n_z, n_y, &bucket.treatment_positive, &bucket.observed)
                    });
                    if let Some(i) = hit {
                        let e = &bucket.entries[i];
                        let first = ev.scm(&strata[e.stratum], &e.comps, &e.tables);
                        let second = ev.scm(st, &comps, &tables);
                        let verdict = check_lemma1(&first, &second, q)?;
                        if verdict.holds_positive() {
                            return Ok(SearchOutcome {
                                witness: Some(Witness {
                                    first,
                                    second,
                                    verdict,
                                }),
                                models_examined: examined,
                                exhausted: false,
                            });
                        }
                        // the fast path and the exact check disagree: keep searching
                    }
                    let sig: Box<[u64]> = sig.into_boxed_slice();
                    bucket.seen.insert(sig.clone());
                    bucket.entries.push(Entry {
                        signature: sig,
                        stratum: si,
                        comps: comps.clone(),
                        tables,
                    });
                }

                if !advance(&mut choice, &candidates) {
                    break;
                }
            }
            // next latent distribution tuple
            let mut l = comps.len();
            let wrapped = loop {
                if l == 0 {
                    break true;
                }
                l -= 1;
                comps[l] += 1;
                if comps[l] < st.compositions[l].len() {
                    break false;
                }
                comps[l] = 0;
            };
            if wrapped {
                break;
            }
        }
    }
    Ok(none(examined, true))
}

/// Next mechanism tuple in odometer order; `false` once every tuple is used.
fn advance(choice: &mut [usize], tables: &[Vec<u64>]) -> bool {
    for v in (0..choice.len()).rev() {
        choice[v] += 1;
        if choice[v] < tables[v].len() {
            return true;
        }
        choice[v] = 0;
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn differs(
    a: &[u64],
    b: &[u64],
    n_x: usize,
    n_z: usize,
    n_y: usize,
    treatment_positive: &[bool],
    observed: &[Vec<bool>],
) -> bool {
    for xi in 0..n_x {
        if !treatment_positive[xi] {
            continue;
        }
        for zi in 0..n_z {
            if !observed[xi][zi] {
                continue;
            }
            let base = (xi * n_z + zi) * n_y;
            let ra = &a[base..base + n_y];
            let rb = &b[base..base + n_y];
            let (ma, mb): (u128, u128) = (
                ra.iter().map(|&c| c as u128).sum(),
                rb.iter().map(|&c| c as u128).sum(),
            );
            if ma == 0 || mb == 0 {
                continue;
            }
            if ra.iter().zip(rb).any(|(&p, &q)| p as u128 * mb != q as u128 * ma) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::parse_graph;

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(8, 1), vec![vec![8]]);
        assert_eq!(compositions(8, 2).len(), 7);
        assert_eq!(compositions(8, 3).len(), 21);
        assert!(compositions(8, 3).iter().all(|c| c.iter().sum::<u64>() == 8));
    }

    #[test]
    fn identical_models_fail_inequality() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let m = super::super::scm::random_scm(&g, 2, 5);
        let v = check_lemma1(&m, &m, &Query::parse("P(Y | do(X))").unwrap()).unwrap();
        assert!(v.same_observational);
        assert!(!v.holds());
        assert!(v.checks.iter().all(|c| !c.effects_differ));
    }

    #[test]
    fn different_observational_is_reported() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let a = super::super::scm::random_scm(&g, 2, 5);
        let b = super::super::scm::random_scm(&g, 2, 6);
        let v = check_lemma1(&a, &b, &Query::parse("P(Y | do(X))").unwrap()).unwrap();
        assert!(!v.same_observational);
        assert!(!v.holds());
    }

    #[test]
    fn mismatched_graphs() {
        let a = super::super::scm::random_scm(&parse_graph("X -> Y").unwrap(), 2, 1);
        let b = super::super::scm::random_scm(&parse_graph("X <-> Y").unwrap(), 2, 1);
        assert!(matches!(
            check_lemma1(&a, &b, &Query::parse("P(Y | do(X))").unwrap()),
            Err(OracleError::GraphMismatch)
        ));
    }

    #[test]
    fn bow_witness_is_small() {
        let g = parse_graph("X -> Y\nX <-> Y").unwrap();
        let out = witness_search(&g, &Query::parse("P(Y | do(X))").unwrap(), &SearchBounds::default()).unwrap();
        let w = out.witness.expect("bow is not identifiable");
        assert!(w.verdict.holds());
        assert!(w.verdict.holds_positive());
        assert!(w.first.shared_weights().iter().chain(w.first.own_weights()).all(|l| l.len() <= 4));
    }

    #[test]
    fn no_witness_without_confounding() {
        let g = parse_graph("X -> Y").unwrap();
        let bounds = SearchBounds {
            latent_domain: 3,
            ..SearchBounds::default()
        };
        let out = witness_search(&g, &Query::parse("P(Y | do(X))").unwrap(), &bounds).unwrap();
        assert!(out.witness.is_none());
        assert!(out.exhausted);
        // own domain a: 2^a - 2 varying rows, C(7, a - 1) weight vectors;
        // X has one row, Y one per value of X
        let x: u64 = 2 * 7 + 6 * 21;
        let y: u64 = 2 * 2 * 7 + 6 * 6 * 21;
        assert_eq!(out.models_examined, x * y);
    }
}
