//! Document scoring: per-query-concept elementary relevance, Yager
//! aggregation into a retrieval status value (RSV), threshold, ranking.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::ClosureIndex;
use crate::corpus::{CorpusIndex, Document};
use crate::ontology::ConceptId;
use crate::similarity::{IcTable, MeasureContext, MeasureKind, MeasureSpec, Scorer, SimilarityError};
use crate::UnknownConcept;

pub const DEFAULT_Q: f64 = 1.0;
pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_LIMIT: usize = 50;
/// Exponents used for the strict ("rough") and tolerant ends of the scale.
pub const ROUGH_Q: f64 = -50.0;
pub const TOLERANT_Q: f64 = 50.0;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum RelevanceError {
    #[error(transparent)]
    UnknownConcept(#[from] UnknownConcept),
    #[error("cannot aggregate an empty score list")]
    EmptyScores,
    #[error("{weights} weights for {scores} scores")]
    WeightMismatch { weights: usize, scores: usize },
    #[error("bad weights: {0}")]
    BadWeights(String),
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error(transparent)]
    Measure(#[from] SimilarityError),
}

/// How the best-matching annotation concept relates to a query concept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchKind {
    Exact,
    Hyponym,
    Hypernym,
    None,
}

impl MatchKind {
    /// Tie-break rank among equal scores, lower wins.
    fn preference(self) -> u8 {
        match self {
            Self::Exact => 0,
            Self::Hyponym => 1,
            Self::Hypernym => 2,
            Self::None => 3,
        }
    }

    /// Relation of `doc_concept` to `query_concept`. Concepts off the
    /// subsumption line are `None`.
    pub fn classify(closure: &ClosureIndex, query_concept: u32, doc_concept: u32) -> Self {
        if query_concept == doc_concept {
            Self::Exact
        } else if closure.subsumes(query_concept, doc_concept) {
            Self::Hyponym
        } else if closure.subsumes(doc_concept, query_concept) {
            Self::Hypernym
        } else {
            Self::None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    pub concepts: Vec<ConceptId>,
    pub q: f64,
    pub threshold: f64,
    pub limit: usize,
    pub weights: Option<Vec<f64>>,
    pub measure: MeasureSpec,
}

impl Query {
    pub fn new(concepts: Vec<ConceptId>) -> Self {
        Self {
            concepts,
            q: DEFAULT_Q,
            threshold: DEFAULT_THRESHOLD,
            limit: DEFAULT_LIMIT,
            weights: None,
            measure: MeasureSpec::jd(),
        }
    }

    /// Parses ids, failing on malformed tokens.
    pub fn from_ids<S: AsRef<str>>(ids: &[S]) -> Result<Self, RelevanceError> {
        let concepts = ids
            .iter()
            .map(|s| {
                ConceptId::new(s.as_ref())
                    .ok_or_else(|| RelevanceError::BadQuery(format!("malformed concept id `{}`", s.as_ref())))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self::new(concepts))
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn with_measure(mut self, measure: MeasureSpec) -> Self {
        self.measure = measure;
        self
    }

    /// Checks the shape of the query; concept existence is checked when it
    /// is evaluated.
    pub fn validate(&self) -> Result<(), RelevanceError> {
        if self.concepts.is_empty() {
            return Err(RelevanceError::BadQuery("query has no concepts".into()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = self.concepts.iter().find(|c| !seen.insert(*c)) {
            return Err(RelevanceError::BadQuery(format!("concept {dup} listed twice")));
        }
        if !self.q.is_finite() {
            return Err(RelevanceError::BadQuery("q must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(RelevanceError::BadQuery("threshold must lie in [0, 1]".into()));
        }
        if self.limit == 0 {
            return Err(RelevanceError::BadQuery("limit must be at least 1".into()));
        }
        if let Some(w) = &self.weights {
            check_weights(w, self.concepts.len())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ElementaryRelevance {
    pub query_concept: ConceptId,
    pub best_doc_concept: Option<ConceptId>,
    pub score: f64,
    pub kind: MatchKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredDocument {
    pub doc_id: String,
    pub rsv: f64,
    pub elementary: Vec<ElementaryRelevance>,
    pub rank: usize,
}

// ---- aggregation ----

/// `((Σ s^q) / n)^(1/q)`: the geometric mean at `q = 0`, and 0 whenever a
/// score is 0 and `q <= 0`. Evaluated in log space; the result is clamped
/// to `[min(s), max(s)]` to absorb round-off.
pub fn yager_aggregate(scores: &[f64], q: f64) -> Result<f64, RelevanceError> {
    if scores.is_empty() {
        return Err(RelevanceError::EmptyScores);
    }
    if !q.is_finite() {
        return Err(RelevanceError::BadQuery("q must be finite".into()));
    }
    let n = scores.len() as f64;
    Ok(power_mean(scores.iter().map(|&s| (s, 1.0 / n)).collect(), q))
}

/// `(Σ p_t s_t^q)^(1/q)` with weights summing to 1. Zero-weight entries are
/// dropped before the `q <= 0` zero-score convention is applied.
pub fn weighted_yager(scores: &[f64], weights: &[f64], q: f64) -> Result<f64, RelevanceError> {
    if scores.is_empty() {
        return Err(RelevanceError::EmptyScores);
    }
    check_weights(weights, scores.len())?;
    if !q.is_finite() {
        return Err(RelevanceError::BadQuery("q must be finite".into()));
    }
    let pairs = scores.iter().copied().zip(weights.iter().copied()).filter(|&(_, w)| w > 0.0);
    Ok(power_mean(pairs.collect(), q))
}

fn check_weights(weights: &[f64], expected: usize) -> Result<(), RelevanceError> {
    if weights.len() != expected {
        return Err(RelevanceError::WeightMismatch {
            weights: weights.len(),
            scores: expected,
        });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(RelevanceError::BadWeights(format!("weight {w} is not a finite non-negative number")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(RelevanceError::BadWeights(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Weighted power mean over `(score, weight)` pairs with positive weights
/// summing to 1. Terms are summed in sorted order so that permuting the
/// input never changes the result bits.
fn power_mean(mut pairs: Vec<(f64, f64)>, q: f64) -> f64 {
    pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let (lo, hi) = match (pairs.first(), pairs.last()) {
        (Some(first), Some(last)) => (first.0, last.0),
        _ => return 0.0,
    };
    if hi <= 0.0 {
        return 0.0;
    }
    if lo <= 0.0 && q <= 0.0 {
        return 0.0;
    }
    let value = if q == 0.0 {
        pairs.iter().map(|&(s, w)| w * s.ln()).sum::<f64>().exp()
    } else {
        // ln Σ w s^q, via log-sum-exp over ln w + q ln s.
        let terms: Vec<f64> = pairs
            .iter()
            .filter(|&&(s, _)| s > 0.0)
            .map(|&(s, w)| w.ln() + q * s.ln())
            .collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
        ((top + sum.ln()) / q).exp()
    };
    value.clamp(lo.max(0.0), hi.min(1.0))
}

// ---- elementary relevance ----

fn best_match(closure: &ClosureIndex, scorer: &mut Scorer<'_>, annotation: &[u32]) -> (Option<u32>, f64, MatchKind) {
    let query = scorer.query();
    let mut best: Option<(u32, f64, MatchKind)> = None;
    for &c in annotation {
        let score = scorer.score(c);
        if score <= 0.0 {
            continue;
        }
        let kind = MatchKind::classify(closure, query, c);
        let better = match best {
            None => true,
            Some((b, bs, bk)) => match score.total_cmp(&bs) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => (kind.preference(), c) < (bk.preference(), b),
            },
        };
        if better {
            best = Some((c, score, kind));
        }
    }
    match best {
        Some((c, s, k)) => (Some(c), s, k),
        None => (None, 0.0, MatchKind::None),
    }
}

fn best_score(scorer: &mut Scorer<'_>, annotation: &[u32]) -> f64 {
    annotation.iter().map(|&c| scorer.score(c)).fold(0.0, f64::max)
}

/// Best match of one query concept against one document's annotation.
pub fn elementary_relevance(
    ctx: &MeasureContext<'_>,
    measure: MeasureSpec,
    query_concept: &str,
    doc: &Document,
) -> Result<ElementaryRelevance, RelevanceError> {
    let closure = ctx.closure;
    let q = closure.ordinal(query_concept)?;
    let annotation = doc
        .annotation
        .iter()
        .map(|c| closure.ordinal(c.as_str()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut scorer = ctx.scorer(measure, q)?;
    let (best, score, kind) = best_match(closure, &mut scorer, &annotation);
    Ok(ElementaryRelevance {
        query_concept: closure.id(q).clone(),
        best_doc_concept: best.map(|c| closure.id(c).clone()),
        score,
        kind,
    })
}

// ---- ranking ----

/// Scores the corpus against a query and returns the ranked, thresholded,
/// truncated result list.
///
/// With the Jaccard measure and a positive threshold only documents sharing
/// the subsumption line with some query concept are scored; every other
/// document has an all-zero score vector and cannot pass the threshold.
pub fn evaluate_query(
    ctx: &MeasureContext<'_>,
    corpus: &CorpusIndex,
    query: &Query,
) -> Result<Vec<ScoredDocument>, RelevanceError> {
    evaluate(ctx, corpus, query, true)
}

/// [`evaluate_query`] without candidate pruning.
pub fn evaluate_exhaustive(
    ctx: &MeasureContext<'_>,
    corpus: &CorpusIndex,
    query: &Query,
) -> Result<Vec<ScoredDocument>, RelevanceError> {
    evaluate(ctx, corpus, query, false)
}

fn evaluate(
    ctx: &MeasureContext<'_>,
    corpus: &CorpusIndex,
    query: &Query,
    prune: bool,
) -> Result<Vec<ScoredDocument>, RelevanceError> {
    query.validate()?;
    let closure = ctx.closure;
    let ordinals = query
        .concepts
        .iter()
        .map(|c| closure.ordinal(c.as_str()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut scorers = ordinals
        .iter()
        .map(|&q| ctx.scorer(query.measure, q))
        .collect::<Result<Vec<_>, _>>()?;

    let candidates: Vec<u32> = if prune && query.measure.kind == MeasureKind::Jd && query.threshold > 0.0 {
        corpus.candidates(closure, &ordinals)
    } else {
        (0..corpus.len() as u32).collect()
    };

    let mut scores = vec![0.0; ordinals.len()];
    let mut kept: Vec<(f64, u32)> = Vec::new();
    for d in candidates {
        let annotation = corpus.annotation_ordinals(d as usize);
        for (slot, scorer) in scores.iter_mut().zip(scorers.iter_mut()) {
            *slot = best_score(scorer, annotation);
        }
        let rsv = aggregate(&scores, query)?;
        if rsv >= query.threshold {
            kept.push((rsv, d));
        }
    }
    // Document indices follow id order, so the index breaks RSV ties.
    kept.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    kept.truncate(query.limit);

    Ok(kept
        .into_iter()
        .enumerate()
        .map(|(i, (rsv, d))| {
            let annotation = corpus.annotation_ordinals(d as usize);
            let elementary = scorers
                .iter_mut()
                .zip(&ordinals)
                .map(|(scorer, &q)| {
                    let (best, score, kind) = best_match(closure, scorer, annotation);
                    ElementaryRelevance {
                        query_concept: closure.id(q).clone(),
                        best_doc_concept: best.map(|c| closure.id(c).clone()),
                        score,
                        kind,
                    }
                })
                .collect();
            ScoredDocument {
                doc_id: corpus.document(d).id.clone(),
                rsv,
                elementary,
                rank: i + 1,
            }
        })
        .collect())
}

fn aggregate(scores: &[f64], query: &Query) -> Result<f64, RelevanceError> {
    match &query.weights {
        Some(w) => weighted_yager(scores, w, query.q),
        None => yager_aggregate(scores, query.q),
    }
}

/// Convenience bundle for callers holding every table.
pub fn context<'a>(
    graph: &'a crate::ontology::OntologyGraph,
    closure: &'a ClosureIndex,
    intrinsic: Option<&'a IcTable>,
    extensional: Option<&'a IcTable>,
) -> MeasureContext<'a> {
    MeasureContext {
        graph,
        closure,
        intrinsic,
        extensional,
    }
}
