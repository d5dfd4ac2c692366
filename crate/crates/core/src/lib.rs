//! Ranking documents annotated with ontology concepts.
//!
//! A query is a set of concepts. Each document gets one elementary score per
//! query concept (its best-matching annotation under a concept similarity
//! measure), and the elementary scores are combined with a Yager power mean
//! whose exponent slides between "all concepts must match" and "any concept
//! may match".
//!
//! ```
//! use ontorank_core::{Engine, IngestMode, QueryRequest};
//! use ontorank_core::fixtures::{C1_TSV, O1_OBO};
//!
//! let (engine, _) = Engine::from_sources(O1_OBO, C1_TSV, IngestMode::Strict).unwrap();
//! let response = engine.respond(&QueryRequest::new(["A", "B"])).unwrap();
//! assert_eq!(response.results[0].doc_id, "D4");
//! assert_eq!(response.results[0].rsv, 0.5);
//! ```

pub mod bundle;
pub mod closure;
pub mod corpus;
pub mod engine;
pub mod fixtures;
pub mod generate;
pub mod layout;
pub mod lookup;
pub mod ontology;
pub mod relevance;
pub mod similarity;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown concept {0}")]
pub struct UnknownConcept(pub String);

pub use bundle::{Bundle, BundleError};
pub use closure::ClosureIndex;
pub use corpus::{load_annotations, CorpusError, CorpusIndex, Document, IngestMode, IngestReport};
pub use engine::{ApiError, Engine, ErrorCode, LoadError, QueryRequest, QueryResponse};
pub use generate::{generate, Synthetic};
pub use layout::{compute_layout, LayoutPoint};
pub use lookup::ConceptHit;
pub use ontology::{parse_ontology, Concept, ConceptId, OntologyError, OntologyGraph, ParseReport};
pub use relevance::{
    evaluate_exhaustive, evaluate_query, weighted_yager, yager_aggregate, ElementaryRelevance, MatchKind, Query,
    RelevanceError, ScoredDocument,
};
pub use similarity::{IcSource, IcTable, MeasureContext, MeasureKind, MeasureSpec, SimilarityError};
