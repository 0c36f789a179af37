//! Symbolic estimands over the observational distribution.
//!
//! A [`ProbExpr`] is built from conditional terms `P(a | b)`, products,
//! marginalizing sums, quotients, and deterministic policy indicators used by
//! sequential plans. Expressions are evaluated exactly against a
//! [`DistTable`]; any conditional whose conditioning event has zero mass
//! makes the enclosing value undefined (`Ok(None)`), unless a product it
//! belongs to already has an exactly-zero factor.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::admg::VarSet;
use crate::error::ExprError;
use crate::scalar::Scalar;

/// Values for named variables.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbExpr {
    One,
    /// `P(target | given)`; a marginal when `given` is empty.
    Term { target: VarSet, given: VarSet },
    Product { factors: Vec<ProbExpr> },
    Sum { over: VarSet, body: Box<ProbExpr> },
    Quotient {
        numerator: Box<ProbExpr>,
        denominator: Box<ProbExpr>,
    },
    /// Indicator that `action` equals the policy's choice for the current
    /// values of `inputs`. `values` is indexed in mixed radix over `inputs`,
    /// last input fastest.
    Policy {
        action: String,
        inputs: Vec<String>,
        values: Vec<usize>,
    },
}

impl ProbExpr {
    pub fn term(target: VarSet, given: VarSet) -> ProbExpr {
        ProbExpr::Term { target, given }
    }

    pub fn marginal(target: VarSet) -> ProbExpr {
        ProbExpr::Term {
            target,
            given: VarSet::new(),
        }
    }

    /// Product of `factors`; the empty product is `One` and a single factor is
    /// returned as is.
    pub fn product(mut factors: Vec<ProbExpr>) -> ProbExpr {
        match factors.len() {
            0 => ProbExpr::One,
            1 => factors.pop().expect("one factor"),
            _ => ProbExpr::Product { factors },
        }
    }

    /// Sum of `body` over `over`; summing over nothing returns `body`.
    pub fn sum(over: VarSet, body: ProbExpr) -> ProbExpr {
        if over.is_empty() {
            body
        } else {
            ProbExpr::Sum {
                over,
                body: Box::new(body),
            }
        }
    }

    pub fn quotient(numerator: ProbExpr, denominator: ProbExpr) -> ProbExpr {
        ProbExpr::Quotient {
            numerator: Box::new(numerator),
            denominator: Box::new(denominator),
        }
    }

    /// Variables the expression depends on that no enclosing sum binds.
    pub fn free_vars(&self) -> VarSet {
        match self {
            ProbExpr::One => VarSet::new(),
            ProbExpr::Term { target, given } => target.union(given),
            ProbExpr::Product { factors } => factors
                .iter()
                .fold(VarSet::new(), |acc, f| acc.union(&f.free_vars())),
            ProbExpr::Sum { over, body } => body.free_vars().difference(over),
            ProbExpr::Quotient {
                numerator,
                denominator,
            } => numerator.free_vars().union(&denominator.free_vars()),
            ProbExpr::Policy { action, inputs, .. } => {
                let mut s: VarSet = inputs.iter().cloned().collect();
                s.insert(action.clone());
                s
            }
        }
    }

    /// Evaluates under `binding`; `Ok(None)` is the undefined value.
    pub fn evaluate<T: Scalar>(
        &self,
        table: &DistTable<T>,
        binding: &Assignment,
    ) -> Result<Option<T>, ExprError> {
        Evaluator::new(self, table)?.evaluate(binding)
    }

    pub fn render(&self, format: RenderFormat) -> String {
        match format {
            RenderFormat::Text => self.to_text(),
            RenderFormat::Latex => self.to_latex(),
            RenderFormat::Json => self.to_json(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("expression serializes")
    }

    pub fn from_json(text: &str) -> Result<ProbExpr, ExprError> {
        serde_json::from_str(text).map_err(|e| ExprError::Json(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(&mut s);
        s
    }

    fn write_text(&self, out: &mut String) {
        match self {
            ProbExpr::One => out.push('1'),
            ProbExpr::Term { target, given } => {
                out.push_str("P(");
                out.push_str(&join(target, ","));
                if !given.is_empty() {
                    out.push('|');
                    out.push_str(&join(given, ","));
                }
                out.push(')');
            }
            ProbExpr::Product { factors } => {
                for (i, f) in factors.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    if matches!(f, ProbExpr::Sum { .. } | ProbExpr::Quotient { .. } | ProbExpr::Product { .. }) {
                        out.push('[');
                        f.write_text(out);
                        out.push(']');
                    } else {
                        f.write_text(out);
                    }
                }
            }
            ProbExpr::Sum { over, body } => {
                out.push_str("Σ_{");
                out.push_str(&join(over, ","));
                out.push_str("} ");
                if matches!(**body, ProbExpr::Quotient { .. }) {
                    out.push('[');
                    body.write_text(out);
                    out.push(']');
                } else {
                    body.write_text(out);
                }
            }
            ProbExpr::Quotient {
                numerator,
                denominator,
            } => {
                for (i, side) in [numerator, denominator].into_iter().enumerate() {
                    if i == 1 {
                        out.push_str(" / ");
                    }
                    if matches!(**side, ProbExpr::Term { .. } | ProbExpr::One) {
                        side.write_text(out);
                    } else {
                        out.push('(');
                        side.write_text(out);
                        out.push(')');
                    }
                }
            }
            ProbExpr::Policy { action, inputs, .. } => {
                out.push_str(&format!("[{action} = g_{action}({})]", inputs.join(",")));
            }
        }
    }

    pub fn to_latex(&self) -> String {
        match self {
            ProbExpr::One => "1".to_string(),
            ProbExpr::Term { target, given } => {
                if given.is_empty() {
                    format!("P({})", join(target, ", "))
                } else {
                    format!("P({} \\mid {})", join(target, ", "), join(given, ", "))
                }
            }
            ProbExpr::Product { factors } => factors
                .iter()
                .map(|f| match f {
                    ProbExpr::Sum { .. } | ProbExpr::Product { .. } => {
                        format!("\\left[{}\\right]", f.to_latex())
                    }
                    _ => f.to_latex(),
                })
                .collect::<Vec<_>>()
                .join(" \\, "),
            ProbExpr::Sum { over, body } => {
                format!("\\sum_{{{}}} {}", join(over, ", "), body.to_latex())
            }
            ProbExpr::Quotient {
                numerator,
                denominator,
            } => format!("\\frac{{{}}}{{{}}}", numerator.to_latex(), denominator.to_latex()),
            ProbExpr::Policy { action, inputs, .. } => {
                format!("\\mathbb{{1}}[{action} = g_{{{action}}}({})]", inputs.join(", "))
            }
        }
    }

    /// Flattens products, drops unit factors, merges directly nested sums over
    /// disjoint sets and orders product factors. Preserves evaluation.
    pub fn canonicalize(&self) -> ProbExpr {
        match self {
            ProbExpr::One | ProbExpr::Term { .. } | ProbExpr::Policy { .. } => self.clone(),
            ProbExpr::Product { factors } => {
                let mut flat = Vec::new();
                for f in factors {
                    match f.canonicalize() {
                        ProbExpr::One => {}
                        ProbExpr::Product { factors } => flat.extend(factors),
                        other => flat.push(other),
                    }
                }
                flat.sort();
                ProbExpr::product(flat)
            }
            ProbExpr::Sum { over, body } => {
                let body = body.canonicalize();
                if over.is_empty() {
                    return body;
                }
                match body {
                    ProbExpr::Sum {
                        over: inner,
                        body: inner_body,
                    } if inner.is_disjoint(over) => ProbExpr::Sum {
                        over: over.union(&inner),
                        body: inner_body,
                    },
                    body => ProbExpr::sum(over.clone(), body),
                }
            }
            ProbExpr::Quotient {
                numerator,
                denominator,
            } => {
                let n = numerator.canonicalize();
                match denominator.canonicalize() {
                    ProbExpr::One => n,
                    d => ProbExpr::quotient(n, d),
                }
            }
        }
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        match self {
            ProbExpr::One | ProbExpr::Term { .. } | ProbExpr::Policy { .. } => 1,
            ProbExpr::Product { factors } => 1 + factors.iter().map(ProbExpr::size).sum::<usize>(),
            ProbExpr::Sum { body, .. } => 1 + body.size(),
            ProbExpr::Quotient {
                numerator,
                denominator,
            } => 1 + numerator.size() + denominator.size(),
        }
    }
}

fn join(s: &VarSet, sep: &str) -> String {
    s.iter().map(String::as_str).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for ProbExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Latex,
    Json,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "latex" => Ok(RenderFormat::Latex),
            "json" => Ok(RenderFormat::Json),
            other => Err(format!("unknown format {other:?} (expected text, latex or json)")),
        }
    }
}

/// A joint distribution over finitely many discrete variables, stored densely
/// with the last variable varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct DistTable<T> {
    variables: Vec<(String, usize)>,
    probs: Vec<T>,
}

impl<T: Scalar> DistTable<T> {
    /// Validates shape, non-negativity and unit total mass.
    pub fn new(variables: Vec<(String, usize)>, probs: Vec<T>) -> Result<Self, ExprError> {
        let t = DistTable::from_parts(variables, probs)?;
        if t.probs.iter().any(|p| *p < T::zero()) {
            return Err(ExprError::InvalidTable("negative entry".into()));
        }
        let total = t.total();
        if !total.is_unit_total() {
            return Err(ExprError::InvalidTable(format!("total mass {total:?} is not one")));
        }
        Ok(t)
    }

    /// Shape-checked table without the normalization requirement, e.g. an
    /// unnormalized sub-distribution.
    pub fn from_parts(variables: Vec<(String, usize)>, probs: Vec<T>) -> Result<Self, ExprError> {
        let cells = variables.iter().try_fold(1usize, |acc, (_, d)| acc.checked_mul(*d));
        match cells {
            Some(c) if c == probs.len() => {}
            _ => {
                return Err(ExprError::InvalidTable(format!(
                    "{} entries do not match the variable domains",
                    probs.len()
                )))
            }
        }
        if variables.iter().any(|(_, d)| *d == 0) {
            return Err(ExprError::InvalidTable("empty domain".into()));
        }
        for (i, (n, _)) in variables.iter().enumerate() {
            if variables[..i].iter().any(|(m, _)| m == n) {
                return Err(ExprError::InvalidTable(format!("variable {n} listed twice")));
            }
        }
        Ok(DistTable { variables, probs })
    }

    pub fn variables(&self) -> &[(String, usize)] {
        &self.variables
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|(n, _)| n == name)
    }

    pub fn domain(&self, name: &str) -> Option<usize> {
        self.position(name).map(|i| self.variables[i].1)
    }

    pub fn total(&self) -> T {
        self.probs.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn index_of(&self, values: &[usize]) -> usize {
        debug_assert_eq!(values.len(), self.variables.len());
        values
            .iter()
            .zip(&self.variables)
            .fold(0, |acc, (&v, (_, d))| acc * d + v)
    }

    pub fn values_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.variables.len()];
        for (slot, (_, d)) in out.iter_mut().zip(&self.variables).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn get(&self, values: &[usize]) -> &T {
        &self.probs[self.index_of(values)]
    }

    /// Mass of the event fixing the named variables.
    pub fn prob_of(&self, event: &Assignment) -> Result<T, ExprError> {
        let mut fixed = Vec::with_capacity(event.len());
        for (name, &v) in event {
            let pos = self
                .position(name)
                .ok_or_else(|| ExprError::UnknownVariable(name.clone()))?;
            if v >= self.variables[pos].1 {
                return Err(ExprError::DomainMismatch {
                    var: name.clone(),
                    value: v,
                    domain: self.variables[pos].1,
                });
            }
            fixed.push((pos, v));
        }
        let mut total = T::zero();
        for (i, p) in self.probs.iter().enumerate() {
            let values = self.values_of(i);
            if fixed.iter().all(|&(pos, v)| values[pos] == v) {
                total = total + p.clone();
            }
        }
        Ok(total)
    }

    /// Conditional probability `P(target | given)`; `None` when `P(given) = 0`.
    pub fn conditional(&self, target: &Assignment, given: &Assignment) -> Result<Option<T>, ExprError> {
        let mut joint = given.clone();
        for (k, &v) in target {
            if let Some(&g) = given.get(k) {
                if g != v {
                    return Ok(Some(T::zero()));
                }
            }
            joint.insert(k.clone(), v);
        }
        let den = self.prob_of(given)?;
        if den.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.prob_of(&joint)? / den))
    }

    /// Marginal table over `names`, in the given order.
    pub fn marginal(&self, names: &[&str]) -> Result<DistTable<T>, ExprError> {
        let mut positions = Vec::with_capacity(names.len());
        for n in names {
            positions.push(
                self.position(n)
                    .ok_or_else(|| ExprError::UnknownVariable(n.to_string()))?,
            );
        }
        let vars: Vec<(String, usize)> = positions.iter().map(|&p| self.variables[p].clone()).collect();
        let cells: usize = vars.iter().map(|(_, d)| d).product();
        let mut probs = vec![T::zero(); cells];
        for (i, p) in self.probs.iter().enumerate() {
            let values = self.values_of(i);
            let j = positions
                .iter()
                .zip(&vars)
                .fold(0, |acc, (&pos, (_, d))| acc * d + values[pos]);
            probs[j] = probs[j].clone() + p.clone();
        }
        Ok(DistTable { variables: vars, probs })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DistTable<U> {
        DistTable {
            variables: self.variables.clone(),
            probs: self.probs.iter().map(f).collect(),
        }
    }

    /// All assignments of the table's variables, in storage order.
    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        (0..self.probs.len()).map(move |i| {
            self.values_of(i)
                .into_iter()
                .zip(&self.variables)
                .map(|(v, (n, _))| (n.clone(), v))
                .collect()
        })
    }
}

/// Enumerates every assignment of `vars` given their domain sizes.
pub fn assignments_of(vars: &[(String, usize)]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for (name, d) in vars {
        let mut next = Vec::with_capacity(out.len() * d);
        for a in &out {
            for v in 0..*d {
                let mut b = a.clone();
                b.insert(name.clone(), v);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

/// Index-resolved expression.
enum Node {
    One,
    Term { joint: u64, given: u64 },
    Product(Vec<Node>),
    Sum { over: Vec<usize>, body: Box<Node> },
    Quotient(Box<Node>, Box<Node>),
    Policy { action: usize, inputs: Vec<usize>, values: Vec<usize> },
}

/// Evaluates one expression against one table under many bindings, caching
/// marginals between calls.
pub struct Evaluator<'a, T> {
    root: Node,
    table: &'a DistTable<T>,
    marginals: HashMap<u64, Vec<T>>,
    free: Vec<usize>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub fn new(expr: &ProbExpr, table: &'a DistTable<T>) -> Result<Self, ExprError> {
        if table.variables.len() > 64 {
            return Err(ExprError::InvalidTable("more than 64 variables".into()));
        }
        let root = Self::compile(expr, table)?;
        let free = expr
            .free_vars()
            .iter()
            .map(|n| table.position(n).expect("compiled"))
            .collect();
        Ok(Evaluator {
            root,
            table,
            marginals: HashMap::new(),
            free,
        })
    }

    fn position(table: &DistTable<T>, name: &str) -> Result<usize, ExprError> {
        table
            .position(name)
            .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))
    }

    fn mask(table: &DistTable<T>, names: &VarSet) -> Result<u64, ExprError> {
        names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | 1u64 << Self::position(table, n)?))
    }

    fn compile(expr: &ProbExpr, table: &DistTable<T>) -> Result<Node, ExprError> {
        Ok(match expr {
            ProbExpr::One => Node::One,
            ProbExpr::Term { target, given } => {
                let g = Self::mask(table, given)?;
                Node::Term {
                    joint: Self::mask(table, target)? | g,
                    given: g,
                }
            }
            ProbExpr::Product { factors } => Node::Product(
                factors
                    .iter()
                    .map(|f| Self::compile(f, table))
                    .collect::<Result<_, _>>()?,
            ),
            ProbExpr::Sum { over, body } => Node::Sum {
                over: over
                    .iter()
                    .map(|n| Self::position(table, n))
                    .collect::<Result<_, _>>()?,
                body: Box::new(Self::compile(body, table)?),
            },
            ProbExpr::Quotient {
                numerator,
                denominator,
            } => Node::Quotient(
                Box::new(Self::compile(numerator, table)?),
                Box::new(Self::compile(denominator, table)?),
            ),
            ProbExpr::Policy {
                action,
                inputs,
                values,
            } => {
                let inputs: Vec<usize> = inputs
                    .iter()
                    .map(|n| Self::position(table, n))
                    .collect::<Result<_, _>>()?;
                let expected: usize = inputs.iter().map(|&p| table.variables[p].1).product();
                if values.len() != expected {
                    return Err(ExprError::PolicyShape {
                        action: action.clone(),
                        found: values.len(),
                        expected,
                    });
                }
                Node::Policy {
                    action: Self::position(table, action)?,
                    inputs,
                    values: values.clone(),
                }
            }
        })
    }

    pub fn evaluate(&mut self, binding: &Assignment) -> Result<Option<T>, ExprError> {
        let mut slots: Vec<Option<usize>> = vec![None; self.table.variables.len()];
        for (name, &v) in binding {
            // bindings for variables the table lacks are ignored unless used
            if let Some(p) = self.table.position(name) {
                let d = self.table.variables[p].1;
                if v >= d {
                    return Err(ExprError::DomainMismatch {
                        var: name.clone(),
                        value: v,
                        domain: d,
                    });
                }
                slots[p] = Some(v);
            }
        }
        for &p in &self.free {
            if slots[p].is_none() {
                return Err(ExprError::Unbound(self.table.variables[p].0.clone()));
            }
        }
        let root = std::mem::replace(&mut self.root, Node::One);
        let out = self.eval(&root, &mut slots);
        self.root = root;
        Ok(out)
    }

    fn marginal_value(&mut self, mask: u64, slots: &[Option<usize>]) -> T {
        let vars = &self.table.variables;
        let positions: Vec<usize> = (0..vars.len()).filter(|p| mask >> p & 1 == 1).collect();
        if !self.marginals.contains_key(&mask) {
            let cells: usize = positions.iter().map(|&p| vars[p].1).product();
            let mut m = vec![T::zero(); cells];
            for (i, pr) in self.table.probs.iter().enumerate() {
                let values = self.table.values_of(i);
                let j = positions.iter().fold(0, |acc, &p| acc * vars[p].1 + values[p]);
                m[j] = m[j].clone() + pr.clone();
            }
            self.marginals.insert(mask, m);
        }
        let j = positions.iter().fold(0, |acc, &p| {
            acc * vars[p].1 + slots[p].expect("bound variables checked before lookup")
        });
        self.marginals[&mask][j].clone()
    }

    fn eval(&mut self, node: &Node, slots: &mut Vec<Option<usize>>) -> Option<T> {
        match node {
            Node::One => Some(T::one()),
            Node::Term { joint, given } => {
                let num = self.marginal_value(*joint, slots);
                if *given == 0 {
                    return Some(num);
                }
                let den = self.marginal_value(*given, slots);
                if den.is_zero() {
                    None
                } else {
                    Some(num / den)
                }
            }
            Node::Product(factors) => {
                let mut acc = T::one();
                let mut undefined = false;
                for f in factors {
                    match self.eval(f, slots) {
                        Some(v) if v.is_zero() => return Some(T::zero()),
                        Some(v) => acc = acc * v,
                        None => undefined = true,
                    }
                }
                if undefined {
                    None
                } else {
                    Some(acc)
                }
            }
            Node::Sum { over, body } => {
                let saved: Vec<Option<usize>> = over.iter().map(|&p| slots[p]).collect();
                let domains: Vec<usize> = over.iter().map(|&p| self.table.variables[p].1).collect();
                let mut counter = vec![0usize; over.len()];
                let mut acc = T::zero();
                let mut result = Some(());
                'outer: loop {
                    for (k, &p) in over.iter().enumerate() {
                        slots[p] = Some(counter[k]);
                    }
                    match self.eval(body, slots) {
                        Some(v) => acc = acc + v,
                        None => {
                            result = None;
                            break 'outer;
                        }
                    }
                    let mut k = over.len();
                    loop {
                        if k == 0 {
                            break 'outer;
                        }
                        k -= 1;
                        counter[k] += 1;
                        if counter[k] < domains[k] {
                            break;
                        }
                        counter[k] = 0;
                    }
                }
                for (&p, s) in over.iter().zip(saved) {
                    slots[p] = s;
                }
                result.map(|_| acc)
            }
            Node::Quotient(n, d) => {
                let den = self.eval(d, slots)?;
                if den.is_zero() {
                    return None;
                }
                Some(self.eval(n, slots)? / den)
            }
            Node::Policy {
                action,
                inputs,
                values,
            } => {
                let vars = &self.table.variables;
                let idx = inputs
                    .iter()
                    .fold(0, |acc, &p| acc * vars[p].1 + slots[p].expect("bound"));
                let chosen = values[idx];
                Some(if slots[*action] == Some(chosen) {
                    T::one()
                } else {
                    T::zero()
                })
            }
        }
    }
}
