//! Finite structural causal models and exact enumeration of their
//! observational, interventional and plan-induced distributions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::admg::{Admg, GraphSpec};
use crate::error::OracleError;
use crate::expr::{Assignment, DistTable};
use crate::identify::Plan;
use crate::nodeset::NodeSet;
use crate::scalar::Scalar;

/// Accumulator used by enumeration: probabilities in some numeric mode, or
/// integer numerators over the product of all latent weight totals.
pub(crate) trait Mass: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn weight(w: u64, total: u64) -> Self;
    fn add_to(&mut self, other: &Self);
    fn times(&self, other: &Self) -> Self;
}

impl Mass for u128 {
    fn zero() -> u128 {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn weight(w: u64, _total: u64) -> u128 {
        w as u128
    }
    fn add_to(&mut self, other: &u128) {
        *self += other;
    }
    fn times(&self, other: &u128) -> u128 {
        self * other
    }
}

impl<T: Scalar> Mass for T {
    fn zero() -> T {
        T::zero()
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn weight(w: u64, total: u64) -> T {
        T::from_ratio(w as u128, total as u128)
    }
    fn add_to(&mut self, other: &T) {
        *self = self.clone() + other.clone();
    }
    fn times(&self, other: &T) -> T {
        self.clone() * other.clone()
    }
}

/// An exogenous variable with a distribution proportional to `weights`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Latent {
    pub name: String,
    pub children: Vec<String>,
    pub weights: Vec<u64>,
}

/// A deterministic mechanism: `table` is indexed in mixed radix over
/// `inputs` (observable parents, then shared latents, then the node's own
/// latent), last input fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mechanism {
    pub node: String,
    pub inputs: Vec<String>,
    pub table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ScmSpec {
    graph: GraphSpec,
    domains: BTreeMap<String, usize>,
    latents: Vec<Latent>,
    mechanisms: Vec<Mechanism>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Layout {
    parents: Vec<usize>,
    /// indices into the shared latents
    shared: Vec<usize>,
}

/// A discrete structural causal model over an ADMG: one latent per
/// bidirected arc, one private latent per node, and a deterministic
/// mechanism per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteScm {
    graph: Admg,
    domains: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    shared: Vec<Vec<u64>>,
    own: Vec<Vec<u64>>,
    tables: Vec<Vec<usize>>,
    layout: Vec<Layout>,
}

/// Bidirected arcs as index pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn bidirected_pairs(g: &Admg) -> Vec<(usize, usize)> {
    let e = g.edges();
    let mut out = Vec::new();
    for a in 0..g.len() {
        for b in e.siblings(a) {
            if a < b {
                out.push((a, b));
            }
        }
    }
    out
}

fn layouts(g: &Admg, pairs: &[(usize, usize)]) -> Vec<Layout> {
    (0..g.len())
        .map(|v| Layout {
            parents: g.edges().parents(v).iter().collect(),
            shared: pairs
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(i, _)| i)
                .collect(),
        })
        .collect()
}

fn checked_total(w: &[u64]) -> Option<u64> {
    w.iter().try_fold(0u64, |a, &b| a.checked_add(b)).filter(|&t| t > 0)
}

/// How a node gets its value during enumeration.
#[derive(Clone, Debug)]
enum Rule<'a> {
    Natural,
    Fixed(usize),
    Policy { inputs: Vec<usize>, values: &'a [usize] },
}

impl DiscreteScm {
    /// Builds a model from per-node domains, shared-latent weights (one entry
    /// per pair of [`bidirected_pairs`]), private-latent weights, and
    /// mechanism tables laid out as described on [`Mechanism`].
    pub fn new(
        graph: Admg,
        domains: Vec<usize>,
        shared: Vec<Vec<u64>>,
        own: Vec<Vec<u64>>,
        tables: Vec<Vec<usize>>,
    ) -> Result<DiscreteScm, OracleError> {
        let n = graph.len();
        let pairs = bidirected_pairs(&graph);
        let bad = |m: String| Err(OracleError::InvalidModel(m));
        if domains.len() != n || own.len() != n || tables.len() != n {
            return bad("one domain, private latent and table per node required".into());
        }
        if shared.len() != pairs.len() {
            return bad(format!("{} bidirected arcs but {} shared latents", pairs.len(), shared.len()));
        }
        if domains.contains(&0) {
            return bad("empty domain".into());
        }
        for w in shared.iter().chain(own.iter()) {
            if checked_total(w).is_none() {
                return bad("latent weights must be nonempty with a positive total".into());
            }
        }
        let layout = layouts(&graph, &pairs);
        let scm = DiscreteScm {
            graph,
            domains,
            pairs,
            shared,
            own,
            tables,
            layout,
        };
        for v in 0..n {
            let size: usize = scm.input_domains(v).iter().product();
            if scm.tables[v].len() != size {
                return bad(format!(
                    "table for {} has {} entries, expected {size}",
                    scm.graph.name(v),
                    scm.tables[v].len()
                ));
            }
            if scm.tables[v].iter().any(|&x| x >= scm.domains[v]) {
                return bad(format!("table for {} leaves its domain", scm.graph.name(v)));
            }
        }
        Ok(scm)
    }

    pub fn graph(&self) -> &Admg {
        &self.graph
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn domain(&self, name: &str) -> Option<usize> {
        self.graph.index_of(name).map(|i| self.domains[i])
    }

    pub fn shared_weights(&self) -> &[Vec<u64>] {
        &self.shared
    }

    pub fn own_weights(&self) -> &[Vec<u64>] {
        &self.own
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    /// Domain sizes of node `v`'s mechanism inputs, in table order.
    pub fn input_domains(&self, v: usize) -> Vec<usize> {
        let l = &self.layout[v];
        l.parents
            .iter()
            .map(|&p| self.domains[p])
            .chain(l.shared.iter().map(|&s| self.shared[s].len()))
            .chain(std::iter::once(self.own[v].len()))
            .collect()
    }

    fn shared_name(&self, i: usize) -> String {
        let (a, b) = self.pairs[i];
        format!("U_{}_{}", self.graph.name(a), self.graph.name(b))
    }

    /// Names of node `v`'s mechanism inputs, in table order.
    pub fn input_names(&self, v: usize) -> Vec<String> {
        let l = &self.layout[v];
        l.parents
            .iter()
            .map(|&p| self.graph.name(p).to_string())
            .chain(l.shared.iter().map(|&s| self.shared_name(s)))
            .chain(std::iter::once(format!("U_{}", self.graph.name(v))))
            .collect()
    }

    /// Product of all latent weight totals: the common denominator of every
    /// probability the model assigns, if it fits in 128 bits.
    pub fn denominator(&self) -> Option<u128> {
        self.shared
            .iter()
            .chain(self.own.iter())
            .try_fold(1u128, |acc, w| acc.checked_mul(checked_total(w)? as u128))
    }

    fn variables(&self) -> Vec<(String, usize)> {
        (0..self.graph.len())
            .map(|v| (self.graph.name(v).to_string(), self.domains[v]))
            .collect()
    }

    fn resolve(&self, a: &Assignment) -> Result<Vec<Option<usize>>, OracleError> {
        let mut out = vec![None; self.graph.len()];
        for (name, &val) in a {
            let i = self
                .graph
                .index_of(name)
                .ok_or_else(|| OracleError::Assignment(format!("unknown variable {name}")))?;
            if val >= self.domains[i] {
                return Err(OracleError::Assignment(format!(
                    "value {val} for {name} outside domain of size {}",
                    self.domains[i]
                )));
            }
            out[i] = Some(val);
        }
        Ok(out)
    }

    /// Order in which nodes are assigned: topological, with policy inputs
    /// placed before the actions that read them.
    fn order(&self, rules: &[Rule]) -> Vec<usize> {
        let n = self.graph.len();
        let mut preds: Vec<NodeSet> = (0..n).map(|v| self.graph.edges().parents(v)).collect();
        for (v, r) in rules.iter().enumerate() {
            if let Rule::Policy { inputs, .. } = r {
                for &i in inputs {
                    preds[v].insert(i);
                }
            }
        }
        let mut placed = NodeSet::EMPTY;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let next = (0..n)
                .find(|&v| !placed.contains(v) && preds[v].is_subset(placed))
                .expect("policy inputs are not descendants of their actions");
            placed.insert(next);
            order.push(next);
        }
        order
    }

    /// Exact enumeration of the distribution over all nodes under `rules`.
    fn enumerate<M: Mass>(&self, rules: &[Rule]) -> Vec<M> {
        let n = self.graph.len();
        let order = self.order(rules);

        // kernel[v][(pa_idx * n_shared_cfg + shared_idx) * d + val]
        let mut kernels: Vec<Vec<M>> = Vec::with_capacity(n);
        let mut shared_cfgs: Vec<usize> = Vec::with_capacity(n);
        for v in 0..n {
            let l = &self.layout[v];
            let d = self.domains[v];
            let n_pa: usize = l.parents.iter().map(|&p| self.domains[p]).product();
            let n_sh: usize = l.shared.iter().map(|&s| self.shared[s].len()).product();
            shared_cfgs.push(n_sh);
            let own = &self.own[v];
            let total = checked_total(own).expect("validated");
            if !matches!(rules[v], Rule::Natural) {
                kernels.push(Vec::new());
                continue;
            }
            let mut k = vec![M::zero(); n_pa * n_sh * d];
            let table = &self.tables[v];
            for cfg in 0..n_pa * n_sh {
                for (u, &w) in own.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let val = table[cfg * own.len() + u];
                    k[cfg * d + val].add_to(&M::weight(w, total));
                }
            }
            kernels.push(k);
        }
        let one_own: Vec<M> = self
            .own
            .iter()
            .map(|w| {
                let t = checked_total(w).expect("validated");
                M::weight(t, t)
            })
            .collect();

        let cells: usize = self.domains.iter().product();
        let mut strides = vec![1usize; n];
        for v in (0..n.saturating_sub(1)).rev() {
            strides[v] = strides[v + 1] * self.domains[v + 1];
        }
        let mut out = vec![M::zero(); cells];

        let n_shared = self.shared.len();
        let mut u = vec![0usize; n_shared];
        let mut values = vec![0usize; n];
        let mut shared_idx = vec![0usize; n];
        loop {
            let mut w = M::weight(1, 1);
            let mut skip = false;
            for (i, &val) in u.iter().enumerate() {
                let ws = &self.shared[i];
                if ws[val] == 0 {
                    skip = true;
                    break;
                }
                w = w.times(&M::weight(ws[val], checked_total(ws).expect("validated")));
            }
            if !skip {
                for v in 0..n {
                    shared_idx[v] = self.layout[v]
                        .shared
                        .iter()
                        .fold(0, |acc, &s| acc * self.shared[s].len() + u[s]);
                }
                self.descend(
                    0,
                    &order,
                    rules,
                    &kernels,
                    &shared_cfgs,
                    &shared_idx,
                    &one_own,
                    &strides,
                    &mut values,
                    w,
                    &mut out,
                );
            }
            // next shared-latent assignment
            let mut i = n_shared;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                u[i] += 1;
                if u[i] < self.shared[i].len() {
                    break;
                }
                u[i] = 0;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<M: Mass>(
        &self,
        depth: usize,
        order: &[usize],
        rules: &[Rule],
        kernels: &[Vec<M>],
        shared_cfgs: &[usize],
        shared_idx: &[usize],
        one_own: &[M],
        strides: &[usize],
        values: &mut Vec<usize>,
        acc: M,
        out: &mut [M],
    ) {
        if depth == order.len() {
            let idx: usize = values.iter().zip(strides).map(|(v, s)| v * s).sum();
            out[idx].add_to(&acc);
            return;
        }
        let v = order[depth];
        let forced = match &rules[v] {
            Rule::Natural => None,
            Rule::Fixed(c) => Some(*c),
            Rule::Policy { inputs, values: table } => {
                let idx = inputs.iter().fold(0, |a, &i| a * self.domains[i] + values[i]);
                Some(table[idx])
            }
        };
        if let Some(c) = forced {
            values[v] = c;
            let next = acc.times(&one_own[v]);
            self.descend(depth + 1, order, rules, kernels, shared_cfgs, shared_idx, one_own, strides, values, next, out);
            return;
        }
        let d = self.domains[v];
        let pa_idx = self.layout[v]
            .parents
            .iter()
            .fold(0, |a, &p| a * self.domains[p] + values[p]);
        let base = (pa_idx * shared_cfgs[v] + shared_idx[v]) * d;
        for val in 0..d {
            let k = &kernels[v][base + val];
            if k.is_zero() {
                continue;
            }
            values[v] = val;
            let next = acc.times(k);
            self.descend(depth + 1, order, rules, kernels, shared_cfgs, shared_idx, one_own, strides, values, next, out);
        }
    }

    fn fixed_rules(&self, fixed: &[Option<usize>]) -> Vec<Rule<'static>> {
        fixed
            .iter()
            .map(|f| match f {
                Some(c) => Rule::Fixed(*c),
                None => Rule::Natural,
            })
            .collect()
    }

    fn table<T: Scalar>(&self, probs: Vec<T>) -> DistTable<T> {
        DistTable::from_parts(self.variables(), probs).expect("shape matches the model")
    }

    /// The observational distribution over all nodes.
    pub fn joint<T: Scalar>(&self) -> DistTable<T> {
        self.interventional(&Assignment::new()).expect("empty intervention")
    }

    /// The distribution over all nodes after setting `x` by intervention.
    /// Enumerates in integer counts when the common denominator fits in 128
    /// bits.
    pub fn interventional<T: Scalar>(&self, x: &Assignment) -> Result<DistTable<T>, OracleError> {
        let fixed = self.resolve(x)?;
        if let Some(c) = self.counts_fixed(&fixed) {
            return Ok(c.to_dist());
        }
        Ok(self.table(self.enumerate::<T>(&self.fixed_rules(&fixed))))
    }

    /// `P_x(v | w)` over all nodes, or `None` when `P_x(w) = 0`.
    pub fn conditional_interventional<T: Scalar>(
        &self,
        x: &Assignment,
        w: &Assignment,
    ) -> Result<Option<DistTable<T>>, OracleError> {
        let t = self.interventional::<T>(x)?;
        self.resolve(w)?;
        let mass = t.prob_of(w).map_err(|e| OracleError::Assignment(e.to_string()))?;
        if num_traits::Zero::is_zero(&mass) {
            return Ok(None);
        }
        let probs = t
            .assignments()
            .zip(t.probs())
            .map(|(a, p)| {
                if w.iter().all(|(k, v)| a.get(k) == Some(v)) {
                    p.clone() / mass.clone()
                } else {
                    T::zero()
                }
            })
            .collect();
        Ok(Some(self.table(probs)))
    }

    /// Integer numerators of the interventional distribution over
    /// [`denominator`](Self::denominator). `None` if the denominator does not
    /// fit in 128 bits.
    pub fn counts(&self, x: &Assignment) -> Result<Option<CountTable>, OracleError> {
        let fixed = self.resolve(x)?;
        Ok(self.counts_fixed(&fixed))
    }

    pub(crate) fn counts_fixed(&self, fixed: &[Option<usize>]) -> Option<CountTable> {
        let total = self.denominator()?;
        Some(CountTable {
            variables: self.variables(),
            counts: self.enumerate::<u128>(&self.fixed_rules(fixed)),
            total,
        })
    }

    /// Exact rational interventional distribution, through integer counts
    /// when they fit.
    pub fn interventional_exact(&self, x: &Assignment) -> Result<DistTable<BigRational>, OracleError> {
        match self.counts(x)? {
            Some(c) => Ok(c.to_rational()),
            None => self.interventional(x),
        }
    }

    /// Distribution over all nodes when each plan action follows its policy.
    pub fn plan_distribution<T: Scalar>(&self, plan: &Plan) -> Result<DistTable<T>, OracleError> {
        plan.validate(&self.graph)
            .map_err(|e| OracleError::InvalidModel(e.to_string()))?;
        let mut rules: Vec<Rule> = vec![Rule::Natural; self.graph.len()];
        for st in &plan.stages {
            let v = self.graph.index_of(&st.action).expect("validated");
            if plan.domain(&st.action) != self.domains[v]
                || st.policy.inputs.iter().any(|n| self.domain(n) != Some(plan.domain(n)))
            {
                return Err(OracleError::InvalidModel("plan domains differ from the model".into()));
            }
            rules[v] = Rule::Policy {
                inputs: st
                    .policy
                    .inputs
                    .iter()
                    .map(|n| self.graph.index_of(n).expect("validated"))
                    .collect(),
                values: &st.policy.values,
            };
        }
        Ok(self.table(self.enumerate::<T>(&rules)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<DiscreteScm, OracleError> {
        serde_json::from_str(text).map_err(|e| OracleError::InvalidModel(e.to_string()))
    }

    fn to_spec(&self) -> ScmSpec {
        let g = &self.graph;
        let mut latents: Vec<Latent> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| Latent {
                name: self.shared_name(i),
                children: vec![g.name(a).to_string(), g.name(b).to_string()],
                weights: self.shared[i].clone(),
            })
            .collect();
        latents.extend((0..g.len()).map(|v| Latent {
            name: format!("U_{}", g.name(v)),
            children: vec![g.name(v).to_string()],
            weights: self.own[v].clone(),
        }));
        ScmSpec {
            graph: GraphSpec::from(g),
            domains: (0..g.len()).map(|v| (g.name(v).to_string(), self.domains[v])).collect(),
            latents,
            mechanisms: (0..g.len())
                .map(|v| Mechanism {
                    node: g.name(v).to_string(),
                    inputs: self.input_names(v),
                    table: self.tables[v].clone(),
                })
                .collect(),
        }
    }

    fn from_spec(spec: ScmSpec) -> Result<DiscreteScm, OracleError> {
        let graph = Admg::try_from(spec.graph)?;
        let n = graph.len();
        let pairs = bidirected_pairs(&graph);
        let domains = (0..n)
            .map(|v| {
                spec.domains
                    .get(graph.name(v))
                    .copied()
                    .ok_or_else(|| OracleError::InvalidModel(format!("no domain for {}", graph.name(v))))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let find = |children: &[usize]| -> Result<Vec<u64>, OracleError> {
            let want: NodeSet = children.iter().copied().collect();
            let hits: Vec<&Latent> = spec
                .latents
                .iter()
                .filter(|l| {
                    l.children.len() == children.len()
                        && graph.node_set(&l.children).map(|s| s == want).unwrap_or(false)
                })
                .collect();
            match hits.as_slice() {
                [one] => Ok(one.weights.clone()),
                _ => Err(OracleError::InvalidModel(format!(
                    "expected exactly one latent over {:?}",
                    children.iter().map(|&c| graph.name(c)).collect::<Vec<_>>()
                ))),
            }
        };
        let shared = pairs.iter().map(|&(a, b)| find(&[a, b])).collect::<Result<Vec<_>, _>>()?;
        let own = (0..n).map(|v| find(&[v])).collect::<Result<Vec<_>, _>>()?;
        if spec.latents.len() != pairs.len() + n {
            return Err(OracleError::InvalidModel("unexpected extra latents".into()));
        }
        let mut tables = vec![Vec::new(); n];
        let mut seen = NodeSet::EMPTY;
        for m in spec.mechanisms {
            let v = graph
                .index_of(&m.node)
                .ok_or_else(|| OracleError::InvalidModel(format!("mechanism for unknown node {}", m.node)))?;
            if seen.contains(v) {
                return Err(OracleError::InvalidModel(format!("two mechanisms for {}", m.node)));
            }
            seen.insert(v);
            tables[v] = m.table;
            let probe = DiscreteScm {
                graph: graph.clone(),
                domains: domains.clone(),
                pairs: pairs.clone(),
                shared: shared.clone(),
                own: own.clone(),
                tables: Vec::new(),
                layout: layouts(&graph, &pairs),
            };
            if m.inputs != probe.input_names(v) {
                return Err(OracleError::InvalidModel(format!(
                    "mechanism for {} must read {:?}",
                    m.node,
                    probe.input_names(v)
                )));
            }
        }
        if seen != graph.all() {
            return Err(OracleError::InvalidModel("every node needs a mechanism".into()));
        }
        DiscreteScm::new(graph, domains, shared, own, tables)
    }
}

impl Serialize for DiscreteScm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteScm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<DiscreteScm, D::Error> {
        DiscreteScm::from_spec(ScmSpec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Integer numerators over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    variables: Vec<(String, usize)>,
    counts: Vec<u128>,
    total: u128,
}

impl CountTable {
    pub fn variables(&self) -> &[(String, usize)] {
        &self.variables
    }

    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn to_dist<T: Scalar>(&self) -> DistTable<T> {
        DistTable::from_parts(
            self.variables.clone(),
            self.counts.iter().map(|&c| T::from_ratio(c, self.total)).collect(),
        )
        .expect("shape matches")
    }

    pub fn to_rational(&self) -> DistTable<BigRational> {
        let total = BigInt::from(self.total);
        DistTable::from_parts(
            self.variables.clone(),
            self.counts
                .iter()
                .map(|&c| BigRational::new(BigInt::from(c), total.clone()))
                .collect(),
        )
        .expect("shape matches")
    }

    /// Exact cell-wise equality of the two distributions.
    pub fn same_distribution(&self, other: &CountTable) -> bool {
        if self.variables != other.variables {
            return false;
        }
        if self.total == other.total {
            return self.counts == other.counts;
        }
        let (ta, tb) = (BigInt::from(self.total), BigInt::from(other.total));
        self.counts
            .iter()
            .zip(&other.counts)
            .all(|(&a, &b)| BigInt::from(a) * &tb == BigInt::from(b) * &ta)
    }
}

/// A random model over `g` with all observables of size `domain_size`.
///
/// Every mechanism gives each value of its node positive probability for
/// every configuration of observable parents and shared latents, so all
/// observational and interventional cells are positive.
pub fn random_scm(g: &Admg, domain_size: usize, seed: u64) -> DiscreteScm {
    assert!(domain_size >= 2, "domain size must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.len();
    let pairs = bidirected_pairs(g);
    let shared: Vec<Vec<u64>> = pairs
        .iter()
        .map(|_| (0..2).map(|_| rng.random_range(1..=8)).collect())
        .collect();
    let own_size = domain_size + 2;
    let own: Vec<Vec<u64>> = (0..n)
        .map(|_| (0..own_size).map(|_| rng.random_range(1..=8)).collect())
        .collect();
    let domains = vec![domain_size; n];
    let layout = layouts(g, &pairs);
    let tables = (0..n)
        .map(|v| {
            let cfgs = domain_size.pow(layout[v].parents.len() as u32) * 2usize.pow(layout[v].shared.len() as u32);
            let mut t = Vec::with_capacity(cfgs * own_size);
            for _ in 0..cfgs {
                let mut perm: Vec<usize> = (0..domain_size).collect();
                perm.shuffle(&mut rng);
                t.extend(perm);
                for _ in domain_size..own_size {
                    t.push(rng.random_range(0..domain_size));
                }
            }
            t
        })
        .collect();
    DiscreteScm::new(g.clone(), domains, shared, own, tables).expect("well-formed by construction")
}
