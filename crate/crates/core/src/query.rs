//! Queries of the form `P(Y | do(X), W)` and their text syntax.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::admg::{Admg, VarSet};
use crate::error::QueryError;
use crate::expr::Assignment;

/// `P(y | do(x), w)`, optionally with values for some of the variables.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Query {
    pub y: VarSet,
    pub x: VarSet,
    pub w: VarSet,
    #[serde(default)]
    pub values: Assignment,
}

impl Query {
    pub fn new(y: VarSet, x: VarSet, w: VarSet) -> Result<Query, QueryError> {
        let q = Query {
            y,
            x,
            w,
            values: Assignment::new(),
        };
        q.check_roles()?;
        Ok(q)
    }

    /// Parses `P(Y1, Y2 | do(X=0), W=1)`; values are optional.
    pub fn parse(text: &str) -> Result<Query, QueryError> {
        Parser::new(text).query()
    }

    fn check_roles(&self) -> Result<(), QueryError> {
        if self.y.is_empty() {
            return Err(QueryError::EmptyOutcome);
        }
        let clash = self
            .y
            .intersection(&self.x)
            .union(&self.y.intersection(&self.w))
            .union(&self.x.intersection(&self.w));
        if let Some(v) = clash.iter().next() {
            return Err(QueryError::Overlap(v.clone()));
        }
        Ok(())
    }

    /// Checks that every variable is a node of `g`.
    pub fn check_against(&self, g: &Admg) -> Result<(), QueryError> {
        g.node_set(self.y.iter().chain(self.x.iter()).chain(self.w.iter()))?;
        Ok(())
    }

    /// Whether the query is unconditional (`W` empty).
    pub fn is_effect(&self) -> bool {
        self.w.is_empty()
    }
}

impl FromStr for Query {
    type Err = QueryError;
    fn from_str(s: &str) -> Result<Query, QueryError> {
        Query::parse(s)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let item = |n: &String| match self.values.get(n) {
            Some(v) => format!("{n}={v}"),
            None => n.clone(),
        };
        let list = |s: &VarSet| s.iter().map(item).collect::<Vec<_>>().join(", ");
        write!(f, "P({}", list(&self.y))?;
        let mut parts = Vec::new();
        if !self.x.is_empty() {
            parts.push(format!("do({})", list(&self.x)));
        }
        if !self.w.is_empty() {
            parts.push(list(&self.w));
        }
        if !parts.is_empty() {
            write!(f, " | {}", parts.join(", "))?;
        }
        f.write_str(")")
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError::Syntax {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), QueryError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String, QueryError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_ascii_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a variable name");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<usize, QueryError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a value");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("value out of range")
        })
    }

    /// `name` or `name=value`
    fn item(&mut self, into: &mut VarSet, values: &mut Assignment) -> Result<(), QueryError> {
        let name = self.ident()?;
        if self.peek() == Some('=') {
            self.pos += 1;
            let v = self.number()?;
            values.insert(name.clone(), v);
        }
        if !into.insert(name.clone()) {
            return Err(QueryError::Overlap(name));
        }
        Ok(())
    }

    fn query(mut self) -> Result<Query, QueryError> {
        let mut q = Query::default();
        let head = self.ident()?;
        if head != "P" {
            self.pos -= head.chars().count();
            return self.err("query must start with P(");
        }
        self.expect('(')?;
        if matches!(self.peek(), Some(')') | Some('|')) {
            return Err(QueryError::EmptyOutcome);
        }
        loop {
            self.item(&mut q.y, &mut q.values)?;
            if self.peek() == Some(',') {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.peek() == Some('|') {
            self.pos += 1;
            loop {
                let save = self.pos;
                let name = self.ident()?;
                if name == "do" && self.peek() == Some('(') {
                    self.pos += 1;
                    loop {
                        self.item(&mut q.x, &mut q.values)?;
                        if self.peek() == Some(',') {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    self.expect(')')?;
                } else {
                    self.pos = save;
                    self.item(&mut q.w, &mut q.values)?;
                }
                if self.peek() == Some(',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(')')?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        q.check_roles()?;
        Ok(q)
    }
}
