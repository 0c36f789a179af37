//! Identification of interventional and conditional interventional
//! distributions in semi-Markovian causal models.
//!
//! Graphs are acyclic directed mixed graphs ([`Admg`]) whose bidirected arcs
//! stand for unobserved confounders. [`id_query`] and [`idc_query`] either
//! return an estimand over the observational distribution or a [`Hedge`]
//! certifying non-identifiability. The [`oracle`] module provides discrete
//! structural models for checking results numerically and for searching
//! counterexample model pairs.

pub mod admg;
pub mod confounding;
pub mod enumerate;
pub mod error;
pub mod expr;
pub mod identify;
pub mod nodeset;
pub mod oracle;
pub mod query;
pub mod scalar;
pub mod separation;
pub mod tian;

pub use admg::{parse_graph, Admg, GraphSpec, VarSet};
pub use confounding::{c_components, is_c_forest, validate_hedge, Hedge, HedgeViolation, Partition};
pub use error::{ExprError, GraphError, OracleError, PlanError, QueryError};
pub use expr::{Assignment, DistTable, Evaluator, ProbExpr, RenderFormat};
pub use scalar::Scalar;
pub use separation::{d_separated, has_backdoor_path, rule_applies, Rule};
pub use identify::{
    conditionally_identifiable, id_query, id_query_from, idc_query, identify_plan, max_rule2_set, max_rule2_set_in_order, Failure,
    IdentResult, Plan, Policy, Stage,
};
pub use query::Query;
pub use tian::{c_identify, cond_identify, unsoundness_report, Agreement, CondIdentify, CondTrace, UnsoundnessReport};
