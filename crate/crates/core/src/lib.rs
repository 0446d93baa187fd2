//! Hybrid relevance scoring for knowledge-base triples.
//!
//! Three independent evidence sources each score a `(person, predicate, value)`
//! triple:
//!
//! * [`starpath`] matches the candidate value against the person's
//!   neighbourhood in an entailment-closed RDF graph ([`kg`]).
//! * [`graph_cross`] looks the pair up in a weighted instance/concept
//!   taxonomy and counts demonym mentions among the person's concepts.
//! * [`skipgram`] compares word vectors of the person and every candidate
//!   value.
//!
//! The five resulting features are stacked by a ridge-regularised linear model
//! and cut at a learned threshold ([`stacker`]). [`metrics`] and [`cv`] hold
//! the evaluation side and [`pipeline`] wires everything to files.

pub mod cv;
pub mod dataset;
pub mod error;
pub mod graph_cross;
pub mod kg;
pub mod metrics;
pub mod pipeline;
pub mod skipgram;
pub mod stacker;
pub mod starpath;
mod tsv;

pub use cv::CvOptions;
pub use dataset::{LabeledTriple, Predicate, WsdmTriple};
pub use error::{Error, Result};
pub use graph_cross::{ConceptGraph, DemonymMap, GraphCrossConfig};
pub use kg::{GraphIndex, Iri, Literal, Scc, Term, Triple};
pub use metrics::EvalReport;
pub use pipeline::{PipelineConfig, Resources, ScoredTriple};
pub use skipgram::{CandidateSet, VectorStore};
pub use stacker::{FeatureVector, RidgeModel, SuperClassifier, ThresholdClassifier};
pub use starpath::{EvidenceScore, PredicateMapping, SwmConfig};
