//! An immutable, query-ready snapshot and the JSON shapes it answers with.
//!
//! The HTTP server, the command line and the browser demo all go through
//! [`Engine::respond`], so they produce identical result arrays.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::ClosureIndex;
use crate::corpus::{load_annotations, CorpusError, CorpusIndex, Document, IngestMode, IngestReport};
use crate::layout::LayoutPoint;
use crate::lookup::{ConceptHit, ConceptLookup};
use crate::ontology::{parse_ontology, ConceptId, OntologyError, OntologyGraph, ParseReport};
use crate::relevance::{
    evaluate_query, ElementaryRelevance, Query, RelevanceError, ScoredDocument, DEFAULT_LIMIT, DEFAULT_Q,
    DEFAULT_THRESHOLD,
};
use crate::similarity::{ic_extensional, ic_intrinsic, IcTable, MeasureContext, MeasureKind, MeasureSpec, SimilarityError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("ontology: {0}")]
    Ontology(#[from] OntologyError),
    #[error("annotations: {0}")]
    Corpus(#[from] CorpusError),
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LoadReport {
    pub ontology: ParseReport,
    pub annotations: IngestReport,
}

pub struct Engine {
    graph: OntologyGraph,
    closure: ClosureIndex,
    corpus: CorpusIndex,
    intrinsic: Option<IcTable>,
    extensional: Option<IcTable>,
    lookup: ConceptLookup,
}

impl Engine {
    pub fn new(graph: OntologyGraph, documents: Vec<Document>) -> Result<Self, CorpusError> {
        let closure = ClosureIndex::build(&graph);
        let corpus = CorpusIndex::build(documents, &closure)?;
        let intrinsic = ic_intrinsic(&closure).ok();
        let extensional = ic_extensional(&closure, &corpus).ok();
        let lookup = ConceptLookup::new(&graph);
        Ok(Self {
            graph,
            closure,
            corpus,
            intrinsic,
            extensional,
            lookup,
        })
    }

    /// Parses both inputs and builds every index.
    pub fn from_sources(ontology: &str, annotations: &str, mode: IngestMode) -> Result<(Self, LoadReport), LoadError> {
        let (graph, ontology) = parse_ontology(ontology)?;
        let closure = ClosureIndex::build(&graph);
        let (docs, annotations) = load_annotations(annotations, &closure, mode)?;
        let engine = Self::new(graph, docs)?;
        Ok((engine, LoadReport { ontology, annotations }))
    }

    pub fn graph(&self) -> &OntologyGraph {
        &self.graph
    }

    pub fn closure(&self) -> &ClosureIndex {
        &self.closure
    }

    pub fn corpus(&self) -> &CorpusIndex {
        &self.corpus
    }

    pub fn context(&self) -> MeasureContext<'_> {
        MeasureContext {
            graph: &self.graph,
            closure: &self.closure,
            intrinsic: self.intrinsic.as_ref(),
            extensional: self.extensional.as_ref(),
        }
    }

    pub fn evaluate(&self, query: &Query) -> Result<Vec<ScoredDocument>, RelevanceError> {
        evaluate_query(&self.context(), &self.corpus, query)
    }

    /// Answers a query request. `timing_ms` is left at 0 for the caller to
    /// fill in.
    pub fn respond(&self, request: &QueryRequest) -> Result<QueryResponse, ApiError> {
        let query = request.to_query()?;
        let ranked = self.evaluate(&query)?;
        let results = ranked
            .into_iter()
            .map(|doc| {
                let title = self
                    .corpus
                    .get(&doc.doc_id)
                    .map(|d| d.title.clone())
                    .unwrap_or_default();
                ResultEntry {
                    layout: LayoutPoint::place(doc.doc_id.clone(), doc.rsv, doc.rank - 1),
                    title,
                    rsv: doc.rsv,
                    rank: doc.rank,
                    elementary: doc.elementary,
                    doc_id: doc.doc_id,
                }
            })
            .collect();
        Ok(QueryResponse {
            query: QueryEcho::from(&query),
            results,
            timing_ms: 0.0,
        })
    }

    pub fn autocomplete(&self, prefix: &str, limit: usize) -> Vec<ConceptHit> {
        self.lookup.search(&self.graph, prefix, limit)
    }

    pub fn document(&self, id: &str) -> Option<DocumentView> {
        let doc = self.corpus.get(id)?;
        Some(DocumentView {
            id: doc.id.clone(),
            title: doc.title.clone(),
            annotation: doc
                .annotation
                .iter()
                .map(|c| ConceptHit {
                    id: c.clone(),
                    label: self.graph.get(c.as_str()).map(|x| x.label.clone()).unwrap_or_default(),
                })
                .collect(),
        })
    }

    pub fn health(&self) -> Health {
        Health {
            status: "ok",
            doc_count: self.corpus.len(),
            concept_count: self.graph.len(),
        }
    }

    /// Raw value and `[0, 1]` similarity of one concept pair.
    pub fn similarity(&self, measure: MeasureSpec, c1: &str, c2: &str) -> Result<PairSimilarity, SimilarityError> {
        let ctx = self.context();
        let a = self.closure.ordinal(c1)?;
        let b = self.closure.ordinal(c2)?;
        let ic = ctx.ic(&measure)?;
        let raw = ctx.raw(&measure, a, b)?;
        let similarity = measure.to_similarity(raw, ic.map_or(0.0, IcTable::max));
        Ok(PairSimilarity {
            measure: measure.to_string(),
            c1: self.closure.id(a).clone(),
            c2: self.closure.id(b).clone(),
            raw,
            similarity,
            integral: matches!(measure.kind, MeasureKind::Rada | MeasureKind::DIsa),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSimilarity {
    pub measure: String,
    pub c1: ConceptId,
    pub c2: ConceptId,
    /// `None` for an unreachable pair.
    pub raw: Option<f64>,
    pub similarity: f64,
    #[serde(skip)]
    pub integral: bool,
}

impl PairSimilarity {
    /// Raw value with 6 decimals, or as an integer for edge-count measures.
    pub fn raw_text(&self) -> String {
        match self.raw {
            None => "unreachable".to_owned(),
            Some(v) if self.integral => format!("{}", v as u64),
            Some(v) => format!("{v:.6}"),
        }
    }
}

// ---- wire types ----

/// Body of `POST /api/query`; omitted fields take their defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QueryRequest {
    pub concepts: Vec<String>,
    pub q: Option<f64>,
    pub threshold: Option<f64>,
    pub limit: Option<u64>,
    pub measure: Option<String>,
    pub weights: Option<Vec<f64>>,
    /// Hirst–St Onge turn cost.
    #[serde(rename = "K")]
    pub k: Option<f64>,
}

impl QueryRequest {
    pub fn new<S: Into<String>>(concepts: impl IntoIterator<Item = S>) -> Self {
        Self {
            concepts: concepts.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn to_query(&self) -> Result<Query, ApiError> {
        let mut measure: MeasureSpec = match &self.measure {
            Some(m) => m.parse().map_err(|e: SimilarityError| ApiError::bad_query(e.to_string()))?,
            None => MeasureSpec::jd(),
        };
        if let Some(k) = self.k {
            measure = measure.with_k(k).map_err(|e| ApiError::bad_query(e.to_string()))?;
        }
        let limit = match self.limit {
            Some(l) => usize::try_from(l).map_err(|_| ApiError::bad_query("limit is too large"))?,
            None => DEFAULT_LIMIT,
        };
        let mut query = Query::from_ids(&self.concepts)?
            .with_q(self.q.unwrap_or(DEFAULT_Q))
            .with_threshold(self.threshold.unwrap_or(DEFAULT_THRESHOLD))
            .with_limit(limit)
            .with_measure(measure);
        query.weights = self.weights.clone();
        query.validate()?;
        Ok(query)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryEcho {
    pub concepts: Vec<ConceptId>,
    pub q: f64,
    pub threshold: f64,
    pub limit: usize,
    pub measure: String,
    pub weights: Option<Vec<f64>>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
}

impl From<&Query> for QueryEcho {
    fn from(q: &Query) -> Self {
        Self {
            concepts: q.concepts.clone(),
            q: q.q,
            threshold: q.threshold,
            limit: q.limit,
            measure: q.measure.to_string(),
            weights: q.weights.clone(),
            k: (q.measure.kind == MeasureKind::HirstStOnge).then_some(q.measure.k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultEntry {
    pub doc_id: String,
    pub title: String,
    pub rsv: f64,
    pub rank: usize,
    pub layout: LayoutPoint,
    pub elementary: Vec<ElementaryRelevance>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct QueryResponse {
    pub query: QueryEcho,
    pub results: Vec<ResultEntry>,
    pub timing_ms: f64,
}

impl QueryResponse {
    /// Compact JSON of the result array alone.
    pub fn results_json(&self) -> String {
        serde_json::to_string(&self.results).expect("result entries always serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Health {
    pub status: &'static str,
    pub doc_count: usize,
    pub concept_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DocumentView {
    pub id: String,
    pub title: String,
    pub annotation: Vec<ConceptHit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    UnknownConcept,
    BadQuery,
    NotFound,
}

impl ErrorCode {
    pub fn http_status(self) -> u16 {
        match self {
            Self::UnknownConcept => 422,
            Self::BadQuery => 400,
            Self::NotFound => 404,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{message}")]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    pub fn bad_query(message: impl Into<String>) -> Self {
        Self {
            code: ErrorCode::BadQuery,
            message: message.into(),
        }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self {
            code: ErrorCode::NotFound,
            message: message.into(),
        }
    }

    /// `{"error": {...}}`
    pub fn body(&self) -> serde_json::Value {
        serde_json::json!({ "error": self })
    }
}

impl From<RelevanceError> for ApiError {
    fn from(e: RelevanceError) -> Self {
        let code = match &e {
            RelevanceError::UnknownConcept(_) | RelevanceError::Measure(SimilarityError::UnknownConcept(_)) => {
                ErrorCode::UnknownConcept
            }
            _ => ErrorCode::BadQuery,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}
