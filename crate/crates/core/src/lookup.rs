//! Label and synonym search for query building.

use serde::Serialize;

use crate::ontology::{ConceptId, OntologyGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConceptHit {
    pub id: ConceptId,
    pub label: String,
}

struct Entry {
    ordinal: u32,
    label_len: usize,
    /// Lower-cased label followed by lower-cased synonyms.
    haystacks: Vec<String>,
}

/// Case-insensitive substring search over concept labels and synonyms.
pub struct ConceptLookup {
    entries: Vec<Entry>,
}

impl ConceptLookup {
    pub fn new(graph: &OntologyGraph) -> Self {
        let entries = graph
            .concepts()
            .iter()
            .enumerate()
            .map(|(i, c)| Entry {
                ordinal: i as u32,
                label_len: c.label.chars().count(),
                haystacks: std::iter::once(&c.label)
                    .chain(&c.synonyms)
                    .map(|s| s.to_lowercase())
                    .collect(),
            })
            .collect();
        Self { entries }
    }

    /// Matches ordered by earliest match position, then label length, then
    /// id.
    pub fn search(&self, graph: &OntologyGraph, needle: &str, limit: usize) -> Vec<ConceptHit> {
        let needle = needle.trim().to_lowercase();
        if needle.is_empty() || limit == 0 {
            return Vec::new();
        }
        let mut hits: Vec<(usize, usize, u32)> = self
            .entries
            .iter()
            .filter_map(|e| {
                e.haystacks
                    .iter()
                    .filter_map(|h| h.find(&needle).map(|byte| h[..byte].chars().count()))
                    .min()
                    .map(|pos| (pos, e.label_len, e.ordinal))
            })
            .collect();
        // Ordinals follow id order.
        hits.sort_unstable();
        hits.truncate(limit);
        hits.into_iter()
            .map(|(_, _, o)| {
                let c = graph.concept(o);
                ConceptHit {
                    id: c.id.clone(),
                    label: c.label.clone(),
                }
            })
            .collect()
    }
}
