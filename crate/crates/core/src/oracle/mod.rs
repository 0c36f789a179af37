//! Ground truth from explicit structural models: exact enumeration, parity
//! constructions and search for non-identifiability witnesses.

pub mod check;
pub mod parity;
pub mod scm;
pub mod witness;

pub use check::{compare_estimands, expr_deviation, plan_deviation, query_deviation, verify_query, Deviation};
pub use parity::{parity_pair, parity_pair_along_path};
pub use scm::{bidirected_pairs, random_scm, CountTable, DiscreteScm, Latent, Mechanism};
pub use witness::{check_lemma1, witness_search, Lemma1Check, Lemma1Verdict, SearchBounds, SearchOutcome, Witness};
