//! Proof-labeling schemes with one-round local verifiers, plus exact oracles
//! for measuring how many nodes reject on instances far from a language.

pub mod budget;
pub mod constructions;
pub mod enumerate;
pub mod graph;
pub mod io;
pub mod languages;
pub mod mst;
pub mod oracles;
pub mod pls;
pub mod schemes;

pub use budget::{Budget, BudgetExceeded};
pub use graph::{edit_distance_between, Graph, GraphError, Label, LabelKind, LabeledGraph, NodeId, Weight};
pub use io::{parse_instance, serialize_instance};
pub use languages::{decide_membership, edit_distance_to_language, LanguageError, LanguageId};
pub use pls::{
    build_views, check_completeness, run_typed, run_verifier, Certificate, CertificateMap, LocalView, Params, Scheme, Verdict,
};
