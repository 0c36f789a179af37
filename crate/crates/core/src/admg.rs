//! Acyclic directed mixed graphs.
//!
//! Directed edges encode direct causation, bidirected edges encode a hidden
//! common cause. Nodes are indexed by their position in the canonical
//! topological order (lexicographically least among all topological orders),
//! so `NodeSet` iteration order and `Admg::nodes` agree.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::nodeset::{NodeSet, MAX_NODES};

/// A set of variable names.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarSet(BTreeSet<String>);

impl VarSet {
    pub fn new() -> Self {
        VarSet(BTreeSet::new())
    }

    pub fn insert(&mut self, name: impl Into<String>) -> bool {
        self.0.insert(name.into())
    }

    pub fn remove(&mut self, name: &str) -> bool {
        self.0.remove(name)
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn into_inner(self) -> BTreeSet<String> {
        self.0
    }
}

impl Deref for VarSet {
    type Target = BTreeSet<String>;
    fn deref(&self) -> &BTreeSet<String> {
        &self.0
    }
}

impl<S: Into<String>> FromIterator<S> for VarSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        VarSet(iter.into_iter().map(Into::into).collect())
    }
}

impl<const N: usize> From<[&str; N]> for VarSet {
    fn from(names: [&str; N]) -> Self {
        names.into_iter().collect()
    }
}

impl From<&[&str]> for VarSet {
    fn from(names: &[&str]) -> Self {
        names.iter().copied().collect()
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = &'a String;
    type IntoIter = std::collections::btree_set::Iter<'a, String>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for VarSet {
    type Item = String;
    type IntoIter = std::collections::btree_set::IntoIter<String>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Adjacency in a fixed index space. Mutilations keep the index space, which
/// lets algorithms compare node sets across a graph and its edge subgraphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edges {
    pub(crate) pa: Vec<NodeSet>,
    pub(crate) ch: Vec<NodeSet>,
    pub(crate) sib: Vec<NodeSet>,
}

impl Edges {
    pub fn empty(n: usize) -> Self {
        Edges {
            pa: vec![NodeSet::EMPTY; n],
            ch: vec![NodeSet::EMPTY; n],
            sib: vec![NodeSet::EMPTY; n],
        }
    }

    pub fn len(&self) -> usize {
        self.pa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pa.is_empty()
    }

    pub fn all(&self) -> NodeSet {
        NodeSet::full(self.len())
    }

    pub fn add_directed(&mut self, from: usize, to: usize) {
        self.ch[from].insert(to);
        self.pa[to].insert(from);
    }

    pub fn add_bidirected(&mut self, a: usize, b: usize) {
        self.sib[a].insert(b);
        self.sib[b].insert(a);
    }

    pub fn parents(&self, v: usize) -> NodeSet {
        self.pa[v]
    }

    pub fn children(&self, v: usize) -> NodeSet {
        self.ch[v]
    }

    pub fn siblings(&self, v: usize) -> NodeSet {
        self.sib[v]
    }

    /// Reflexive ancestors of `seed` using only nodes and edges inside `within`.
    pub fn ancestors_within(&self, seed: NodeSet, within: NodeSet) -> NodeSet {
        self.closure(seed & within, within, &self.pa)
    }

    /// Reflexive descendants of `seed` using only nodes and edges inside `within`.
    pub fn descendants_within(&self, seed: NodeSet, within: NodeSet) -> NodeSet {
        self.closure(seed & within, within, &self.ch)
    }

    pub fn ancestors(&self, seed: NodeSet) -> NodeSet {
        self.ancestors_within(seed, self.all())
    }

    pub fn descendants(&self, seed: NodeSet) -> NodeSet {
        self.descendants_within(seed, self.all())
    }

    fn closure(&self, seed: NodeSet, within: NodeSet, step: &[NodeSet]) -> NodeSet {
        let mut seen = seed;
        let mut frontier = seed;
        while !frontier.is_empty() {
            let mut next = NodeSet::EMPTY;
            for v in frontier {
                next |= step[v];
            }
            next = (next & within) - seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Union of parents of `s` (members of `s` included when they are parents).
    pub fn parents_of_set(&self, s: NodeSet) -> NodeSet {
        s.iter().fold(NodeSet::EMPTY, |acc, v| acc | self.pa[v])
    }

    /// Removes edges into `cut_in` (bidirected edges at `cut_in` included) and
    /// directed edges out of `cut_out`.
    pub fn mutilated(&self, cut_in: NodeSet, cut_out: NodeSet) -> Edges {
        let n = self.len();
        let mut out = Edges::empty(n);
        for v in 0..n {
            if cut_out.contains(v) {
                continue;
            }
            for c in self.ch[v] - cut_in {
                out.add_directed(v, c);
            }
        }
        for a in 0..n {
            if cut_in.contains(a) {
                continue;
            }
            for b in self.sib[a] - cut_in {
                if a < b {
                    out.add_bidirected(a, b);
                }
            }
        }
        out
    }

    /// Connected components of the bidirected skeleton restricted to `within`,
    /// ordered by least member.
    pub fn c_components_within(&self, within: NodeSet) -> Vec<NodeSet> {
        let mut remaining = within;
        let mut blocks = Vec::new();
        while let Some(start) = remaining.first() {
            let block = self.closure(NodeSet::single(start), within, &self.sib);
            remaining -= block;
            blocks.push(block);
        }
        blocks
    }

    /// The bidirected-connected block of `within` containing `v`.
    pub fn c_component_of(&self, v: usize, within: NodeSet) -> NodeSet {
        self.closure(NodeSet::single(v) & within, within, &self.sib)
    }
}

/// An acyclic directed mixed graph over named variables.
#[derive(Clone, PartialEq, Eq)]
pub struct Admg {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Edges,
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Admg {
    /// Builds a graph from node declarations and edge lists. Endpoints of
    /// edges are declared implicitly.
    pub fn new<N, S>(
        nodes: N,
        directed: &[(S, S)],
        bidirected: &[(S, S)],
    ) -> Result<Admg, GraphError>
    where
        N: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut declare = |n: &str, names: &mut Vec<String>| -> Result<usize, GraphError> {
            if !valid_name(n) {
                return Err(GraphError::InvalidName(n.to_string()));
            }
            if let Some(&i) = index.get(n) {
                return Ok(i);
            }
            index.insert(n.to_string(), names.len());
            names.push(n.to_string());
            Ok(names.len() - 1)
        };
        let mut d = Vec::new();
        let mut b = Vec::new();
        for n in nodes {
            declare(n.as_ref(), &mut names)?;
        }
        for (u, v) in directed {
            d.push((declare(u.as_ref(), &mut names)?, declare(v.as_ref(), &mut names)?));
        }
        for (u, v) in bidirected {
            b.push((declare(u.as_ref(), &mut names)?, declare(v.as_ref(), &mut names)?));
        }
        if names.len() > MAX_NODES {
            return Err(GraphError::TooManyNodes(names.len()));
        }
        let mut edges = Edges::empty(names.len());
        for (u, v) in d {
            if u == v {
                return Err(GraphError::SelfLoop(names[u].clone()));
            }
            if edges.ch[u].contains(v) {
                return Err(GraphError::DuplicateEdge(format!("{} -> {}", names[u], names[v])));
            }
            edges.add_directed(u, v);
        }
        for (u, v) in b {
            if u == v {
                return Err(GraphError::SelfLoop(names[u].clone()));
            }
            if edges.sib[u].contains(v) {
                return Err(GraphError::DuplicateEdge(format!("{} <-> {}", names[u], names[v])));
            }
            edges.add_bidirected(u, v);
        }
        Admg::from_edges(&names, &edges)
    }

    /// Re-indexes `edges` (given over `names`) into canonical topological order.
    pub(crate) fn from_edges(names: &[String], edges: &Edges) -> Result<Admg, GraphError> {
        let order = lex_least_topological_order(names, edges)?;
        let mut position = vec![0usize; names.len()];
        for (pos, &old) in order.iter().enumerate() {
            position[old] = pos;
        }
        let mut out = Edges::empty(names.len());
        for u in 0..names.len() {
            for v in edges.ch[u] {
                out.add_directed(position[u], position[v]);
            }
            for v in edges.sib[u] {
                if u < v {
                    out.add_bidirected(position[u], position[v]);
                }
            }
        }
        let names: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Ok(Admg {
            names,
            index,
            edges: out,
        })
    }

    /// Node names in canonical topological order.
    pub fn nodes(&self) -> &[String] {
        &self.names
    }

    pub fn topo_order(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn edges(&self) -> &Edges {
        &self.edges
    }

    pub fn all(&self) -> NodeSet {
        NodeSet::full(self.len())
    }

    pub fn node_set<'a, I>(&self, names: I) -> Result<NodeSet, GraphError>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut s = NodeSet::EMPTY;
        for n in names {
            let i = self
                .index_of(n)
                .ok_or_else(|| GraphError::UnknownNode(n.clone()))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn var_set(&self, s: NodeSet) -> VarSet {
        s.iter().map(|i| self.names[i].clone()).collect()
    }

    /// Names of `s` in topological order.
    pub fn ordered_names(&self, s: NodeSet) -> Vec<String> {
        s.iter().map(|i| self.names[i].clone()).collect()
    }

    pub fn directed_edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in self.edges.ch[u] {
                out.push((self.names[u].clone(), self.names[v].clone()));
            }
        }
        out
    }

    pub fn bidirected_edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for u in 0..self.len() {
            for v in self.edges.sib[u] {
                if u < v {
                    out.push((self.names[u].clone(), self.names[v].clone()));
                }
            }
        }
        out
    }

    pub fn has_directed(&self, from: &str, to: &str) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(u), Some(v)) => self.edges.ch[u].contains(v),
            _ => false,
        }
    }

    pub fn has_bidirected(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(u), Some(v)) => self.edges.sib[u].contains(v),
            _ => false,
        }
    }

    pub fn ancestors(&self, s: &VarSet) -> Result<VarSet, GraphError> {
        Ok(self.var_set(self.edges.ancestors(self.node_set(s)?)))
    }

    pub fn descendants(&self, s: &VarSet) -> Result<VarSet, GraphError> {
        Ok(self.var_set(self.edges.descendants(self.node_set(s)?)))
    }

    pub fn parents(&self, s: &VarSet) -> Result<VarSet, GraphError> {
        Ok(self.var_set(self.edges.parents_of_set(self.node_set(s)?)))
    }

    pub fn children(&self, s: &VarSet) -> Result<VarSet, GraphError> {
        let s = self.node_set(s)?;
        Ok(self.var_set(s.iter().fold(NodeSet::EMPTY, |acc, v| acc | self.edges.ch[v])))
    }

    /// Nodes without directed children.
    pub fn root_set(&self) -> VarSet {
        self.var_set(
            (0..self.len())
                .filter(|&v| self.edges.ch[v].is_empty())
                .collect(),
        )
    }

    /// Edge subgraph with arrows into `cut_in` and out of `cut_out` removed.
    pub fn mutilate(&self, cut_in: &VarSet, cut_out: &VarSet) -> Result<Admg, GraphError> {
        let cut_in = self.node_set(cut_in)?;
        let cut_out = self.node_set(cut_out)?;
        Admg::from_edges(&self.names, &self.edges.mutilated(cut_in, cut_out))
    }

    pub fn induced_subgraph(&self, s: &VarSet) -> Result<Admg, GraphError> {
        let s = self.node_set(s)?;
        Ok(self.subgraph(s))
    }

    /// Induced subgraph on an index set.
    pub fn subgraph(&self, s: NodeSet) -> Admg {
        let keep: Vec<usize> = s.iter().collect();
        let mut position = vec![usize::MAX; self.len()];
        for (p, &v) in keep.iter().enumerate() {
            position[v] = p;
        }
        let names: Vec<String> = keep.iter().map(|&v| self.names[v].clone()).collect();
        let mut edges = Edges::empty(keep.len());
        for &u in &keep {
            for v in self.edges.ch[u] & s {
                edges.add_directed(position[u], position[v]);
            }
            for v in self.edges.sib[u] & s {
                if u < v {
                    edges.add_bidirected(position[u], position[v]);
                }
            }
        }
        Admg::from_edges(&names, &edges).expect("subgraph of an acyclic graph is acyclic")
    }

    /// Graph-file rendering; parses back to an equal graph.
    pub fn to_graph_text(&self) -> String {
        let mut out = String::new();
        let mut mentioned = NodeSet::EMPTY;
        for u in 0..self.len() {
            for v in self.edges.ch[u] {
                out.push_str(&format!("{} -> {}\n", self.names[u], self.names[v]));
                mentioned.insert(u);
                mentioned.insert(v);
            }
        }
        for (a, b) in self.bidirected_edges() {
            out.push_str(&format!("{a} <-> {b}\n"));
            mentioned.insert(self.index[&a]);
            mentioned.insert(self.index[&b]);
        }
        for v in self.all() - mentioned {
            out.push_str(&self.names[v]);
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for Admg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Admg")
            .field("nodes", &self.names)
            .field("directed", &self.directed_edges())
            .field("bidirected", &self.bidirected_edges())
            .finish()
    }
}

impl fmt::Display for Admg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_graph_text())
    }
}

/// Kahn's algorithm, always taking the lexicographically smallest ready node.
fn lex_least_topological_order(names: &[String], edges: &Edges) -> Result<Vec<usize>, GraphError> {
    let n = names.len();
    let mut indegree: Vec<usize> = (0..n).map(|v| edges.pa[v].len()).collect();
    let mut ready: BTreeSet<(&str, usize)> = (0..n)
        .filter(|&v| indegree[v] == 0)
        .map(|v| (names[v].as_str(), v))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(&first) = ready.iter().next() {
        ready.remove(&first);
        let v = first.1;
        order.push(v);
        for c in edges.ch[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert((names[c].as_str(), c));
            }
        }
    }
    if order.len() < n {
        let placed: NodeSet = order.iter().copied().collect();
        return Err(GraphError::Cycle(find_cycle(names, edges, NodeSet::full(n) - placed)));
    }
    Ok(order)
}

/// Every node in `stuck` has a parent in `stuck`; walking parents must revisit.
fn find_cycle(names: &[String], edges: &Edges, stuck: NodeSet) -> Vec<String> {
    let start = stuck.first().expect("a cycle leaves nodes unplaced");
    let mut path = vec![start];
    let mut pos = HashMap::from([(start, 0usize)]);
    let mut v = start;
    loop {
        let p = (edges.pa[v] & stuck).first().expect("stuck node has a stuck parent");
        if let Some(&at) = pos.get(&p) {
            // path[at..] walks parent links from p, so reversed it follows edges back into p
            let mut cycle = vec![names[p].clone()];
            cycle.extend(path[at..].iter().rev().map(|&i| names[i].clone()));
            return cycle;
        }
        pos.insert(p, path.len());
        path.push(p);
        v = p;
    }
}

/// Parses the line-oriented graph format: `A -> B`, `A <-> B`, a bare `A`,
/// and `#` comments.
pub fn parse_graph(text: &str) -> Result<Admg, GraphError> {
    let mut nodes: Vec<String> = Vec::new();
    let mut directed: Vec<(String, String)> = Vec::new();
    let mut bidirected: Vec<(String, String)> = Vec::new();
    let mut seen_d: HashMap<(String, String), usize> = HashMap::new();
    let mut seen_b: HashMap<(String, String), usize> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens = tokenize_line(content, line_no)?;
        match tokens.as_slice() {
            [] => {}
            [Token::Name(n, _)] => nodes.push(n.clone()),
            [Token::Name(a, _), Token::Arrow(kind, col), Token::Name(b, _)] => {
                if a == b {
                    return Err(GraphError::Syntax {
                        line: line_no,
                        column: *col,
                        message: format!("self-loop on {a}"),
                    });
                }
                match kind {
                    ArrowKind::Directed => {
                        let key = (a.clone(), b.clone());
                        if let Some(prev) = seen_d.insert(key, line_no) {
                            return Err(GraphError::DuplicateEdge(format!(
                                "{a} -> {b} (lines {prev} and {line_no})"
                            )));
                        }
                        directed.push((a.clone(), b.clone()));
                    }
                    ArrowKind::Bidirected => {
                        let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                        if let Some(prev) = seen_b.insert(key, line_no) {
                            return Err(GraphError::DuplicateEdge(format!(
                                "{a} <-> {b} (lines {prev} and {line_no})"
                            )));
                        }
                        bidirected.push((a.clone(), b.clone()));
                    }
                }
            }
            _ => {
                let column = syntax_column(&tokens);
                return Err(GraphError::Syntax {
                    line: line_no,
                    column,
                    message: "expected `A`, `A -> B` or `A <-> B`".to_string(),
                });
            }
        }
    }
    Admg::new(nodes, &directed, &bidirected)
}

impl FromStr for Admg {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Admg, GraphError> {
        parse_graph(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArrowKind {
    Directed,
    Bidirected,
}

#[derive(Debug)]
enum Token {
    Name(String, usize),
    Arrow(ArrowKind, usize),
}

impl Token {
    fn column(&self) -> usize {
        match self {
            Token::Name(_, c) | Token::Arrow(_, c) => *c,
        }
    }
}

/// Column of the first token that breaks the `Name [Arrow Name]` shape.
fn syntax_column(tokens: &[Token]) -> usize {
    for (i, t) in tokens.iter().enumerate() {
        let ok = matches!(
            (i, t),
            (0, Token::Name(..)) | (1, Token::Arrow(..)) | (2, Token::Name(..))
        );
        if !ok || i > 2 {
            return t.column();
        }
    }
    tokens.last().map(|t| t.column()).unwrap_or(1)
}

fn tokenize_line(line: &str, line_no: usize) -> Result<Vec<Token>, GraphError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token::Name(chars[start..i].iter().collect(), column));
        } else if chars[i..].starts_with(&['<', '-', '>']) {
            tokens.push(Token::Arrow(ArrowKind::Bidirected, column));
            i += 3;
        } else if chars[i..].starts_with(&['-', '>']) {
            tokens.push(Token::Arrow(ArrowKind::Directed, column));
            i += 2;
        } else {
            return Err(GraphError::Syntax {
                line: line_no,
                column,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(tokens)
}

/// Serialized form: node list plus edge lists.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub directed: Vec<(String, String)>,
    #[serde(default)]
    pub bidirected: Vec<(String, String)>,
}

impl From<&Admg> for GraphSpec {
    fn from(g: &Admg) -> Self {
        GraphSpec {
            nodes: g.nodes().to_vec(),
            directed: g.directed_edges(),
            bidirected: g.bidirected_edges(),
        }
    }
}

impl TryFrom<GraphSpec> for Admg {
    type Error = GraphError;
    fn try_from(spec: GraphSpec) -> Result<Admg, GraphError> {
        Admg::new(spec.nodes, &spec.directed, &spec.bidirected)
    }
}

impl Serialize for Admg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphSpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Admg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Admg, D::Error> {
        let spec = GraphSpec::deserialize(d)?;
        Admg::try_from(spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mediator_graph() -> Admg {
        parse_graph("X -> Z\nZ -> Y\nX <-> Z").unwrap()
    }

    #[test]
    fn parses_mediator_graph() {
        let g = mediator_graph();
        assert_eq!(g.nodes(), &["X", "Z", "Y"]);
        assert!(g.has_directed("X", "Z"));
        assert!(g.has_directed("Z", "Y"));
        assert!(g.has_bidirected("Z", "X"));
        assert_eq!(g.bidirected_edges().len(), 1);
    }

    #[test]
    fn single_node() {
        let g = parse_graph("A").unwrap();
        assert_eq!(g.nodes(), &["A"]);
        assert!(g.directed_edges().is_empty());
    }

    #[test]
    fn cycle_is_reported() {
        let err = parse_graph("A -> B\nB -> A").unwrap_err();
        match err {
            GraphError::Cycle(c) => {
                assert_eq!(c.first(), c.last());
                assert!(c.contains(&"A".to_string()) && c.contains(&"B".to_string()));
            }
            other => panic!("expected cycle, got {other:?}"),
        }
        let err = parse_graph("A -> B\nB -> C\nC -> A\nD -> A").unwrap_err();
        assert!(matches!(err, GraphError::Cycle(c) if c.len() == 4));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_graph("A -> B\nA -> -> C").unwrap_err() {
            GraphError::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 6);
            }
            other => panic!("{other:?}"),
        }
        match parse_graph("A => B").unwrap_err() {
            GraphError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn duplicates_rejected() {
        assert!(matches!(
            parse_graph("A -> B\nA -> B"),
            Err(GraphError::DuplicateEdge(_))
        ));
        assert!(matches!(
            parse_graph("A <-> B\nB <-> A"),
            Err(GraphError::DuplicateEdge(_))
        ));
        // a bow is two distinct edges
        assert!(parse_graph("A -> B\nA <-> B").is_ok());
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_graph("# header\n\nA -> B # trailing\n  C\n").unwrap();
        assert_eq!(g.nodes(), &["A", "B", "C"]);
    }

    #[test]
    fn lexicographic_tie_break() {
        let g = parse_graph("D -> A\nC").unwrap();
        assert_eq!(g.nodes(), &["C", "D", "A"]);
        let again = parse_graph("D -> A\nC").unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn ancestry() {
        let g = mediator_graph();
        assert_eq!(g.ancestors(&VarSet::from(["Y"])).unwrap(), VarSet::from(["X", "Y", "Z"]));
        assert_eq!(g.ancestors(&VarSet::new()).unwrap(), VarSet::new());
        assert_eq!(g.descendants(&VarSet::from(["Z"])).unwrap(), VarSet::from(["Y", "Z"]));
        assert_eq!(g.root_set(), VarSet::from(["Y"]));
        assert!(matches!(
            g.ancestors(&VarSet::from(["Q"])),
            Err(GraphError::UnknownNode(n)) if n == "Q"
        ));
    }

    #[test]
    fn mutilation() {
        let g = mediator_graph();
        let m = g.mutilate(&VarSet::from(["X"]), &VarSet::from(["Z"])).unwrap();
        assert_eq!(m.directed_edges(), vec![("X".to_string(), "Z".to_string())]);
        assert!(m.bidirected_edges().is_empty());
        assert_eq!(g.mutilate(&VarSet::new(), &VarSet::new()).unwrap(), g);
        let all: VarSet = g.nodes().iter().cloned().collect();
        let bare = g.mutilate(&all, &VarSet::new()).unwrap();
        assert!(bare.directed_edges().is_empty() && bare.bidirected_edges().is_empty());
        // bidirected arcs survive cut_out
        let m = g.mutilate(&VarSet::new(), &VarSet::from(["X"])).unwrap();
        assert!(m.has_bidirected("X", "Z"));
        assert!(!m.has_directed("X", "Z"));
    }

    #[test]
    fn induced_subgraphs() {
        let g = mediator_graph();
        let s = g.induced_subgraph(&VarSet::from(["Z", "Y"])).unwrap();
        assert_eq!(s.directed_edges(), vec![("Z".to_string(), "Y".to_string())]);
        assert!(s.bidirected_edges().is_empty());
        let all: VarSet = g.nodes().iter().cloned().collect();
        assert_eq!(g.induced_subgraph(&all).unwrap(), g);
        assert!(g.induced_subgraph(&VarSet::new()).unwrap().is_empty());
    }

    #[test]
    fn text_and_json_round_trip() {
        let g = parse_graph("X -> Z\nZ -> Y\nX <-> Z\nW").unwrap();
        assert_eq!(parse_graph(&g.to_graph_text()).unwrap(), g);
        let json = serde_json::to_string(&g).unwrap();
        let back: Admg = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_bad_names() {
        assert!(matches!(
            Admg::new(["a-b"], &[], &[]),
            Err(GraphError::InvalidName(_))
        ));
    }
}
