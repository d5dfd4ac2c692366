//! Annotated documents and the concept → documents inverted index.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::ClosureIndex;
use crate::ontology::ConceptId;
use crate::UnknownConcept;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub title: String,
    /// Sorted, without duplicates.
    pub annotation: Vec<ConceptId>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IngestMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub rows: usize,
    pub dropped_rows: usize,
    pub dropped_documents: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: unknown concept {concept}")]
    UnknownConcept { line: usize, concept: String },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("annotation file has no data rows")]
    EmptyInput,
    #[error("duplicate document id {0}")]
    DuplicateDocId(String),
    #[error("document {0} has no annotation")]
    EmptyAnnotation(String),
    #[error("document {doc}: {source}")]
    Annotation {
        doc: String,
        #[source]
        source: UnknownConcept,
    },
}

/// Reads `doc_id \t concept_id [\t title]` rows. `#` lines are comments.
///
/// Documents come back in order of first appearance; the first non-empty
/// title of a document wins and defaults to its id.
pub fn load_annotations(
    text: &str,
    closure: &ClosureIndex,
    mode: IngestMode,
) -> Result<(Vec<Document>, IngestReport), CorpusError> {
    let mut report = IngestReport::default();
    let mut order: Vec<String> = Vec::new();
    let mut docs: HashMap<String, (Option<String>, Vec<ConceptId>)> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.trim().is_empty() || row.starts_with('#') {
            continue;
        }
        report.rows += 1;
        let mut fields = row.split('\t');
        let doc_id = fields.next().unwrap_or("").trim();
        let concept = fields.next().map(str::trim).unwrap_or("");
        let title = fields.next().map(str::trim).filter(|t| !t.is_empty());
        if doc_id.is_empty() || doc_id.contains(char::is_whitespace) {
            return Err(syntax(line, "doc_id must be a non-empty token"));
        }
        if concept.is_empty() {
            return Err(syntax(line, "missing concept_id column"));
        }

        let entry = docs.entry(doc_id.to_owned()).or_insert_with(|| {
            order.push(doc_id.to_owned());
            (None, Vec::new())
        });
        if entry.0.is_none() {
            entry.0 = title.map(str::to_owned);
        }
        if closure.ordinal(concept).is_err() {
            match mode {
                IngestMode::Strict => {
                    return Err(CorpusError::UnknownConcept {
                        line,
                        concept: concept.to_owned(),
                    })
                }
                IngestMode::Lenient => {
                    report.dropped_rows += 1;
                    continue;
                }
            }
        }
        entry.1.push(ConceptId::new(concept).expect("known concepts are valid ids"));
    }
    if report.rows == 0 {
        return Err(CorpusError::EmptyInput);
    }

    let mut out = Vec::with_capacity(order.len());
    for id in order {
        let (title, mut annotation) = docs.remove(&id).expect("every ordered id was inserted");
        annotation.sort();
        annotation.dedup();
        if annotation.is_empty() {
            report.dropped_documents.push(id);
            continue;
        }
        out.push(Document {
            title: title.unwrap_or_else(|| id.clone()),
            id,
            annotation,
        });
    }
    Ok((out, report))
}

fn syntax(line: usize, message: &str) -> CorpusError {
    CorpusError::Syntax {
        line,
        message: message.to_owned(),
    }
}

/// Documents sorted by id plus, for every concept ordinal, the sorted list
/// of documents annotated with exactly that concept.
#[derive(Clone, Debug)]
pub struct CorpusIndex {
    documents: Vec<Document>,
    annotations: Vec<Vec<u32>>,
    inverted: Vec<Vec<u32>>,
    by_id: HashMap<String, u32>,
}

impl CorpusIndex {
    pub fn build(mut documents: Vec<Document>, closure: &ClosureIndex) -> Result<Self, CorpusError> {
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = documents.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(CorpusError::DuplicateDocId(w[0].id.clone()));
        }
        let mut annotations = Vec::with_capacity(documents.len());
        let mut inverted = vec![Vec::new(); closure.len()];
        for (d, doc) in documents.iter_mut().enumerate() {
            doc.annotation.sort();
            doc.annotation.dedup();
            if doc.annotation.is_empty() {
                return Err(CorpusError::EmptyAnnotation(doc.id.clone()));
            }
            let mut ords = Vec::with_capacity(doc.annotation.len());
            for c in &doc.annotation {
                let o = closure.ordinal(c.as_str()).map_err(|source| CorpusError::Annotation {
                    doc: doc.id.clone(),
                    source,
                })?;
                ords.push(o);
                inverted[o as usize].push(d as u32);
            }
            annotations.push(ords);
        }
        let by_id = documents
            .iter()
            .enumerate()
            .map(|(i, d)| (d.id.clone(), i as u32))
            .collect();
        Ok(Self {
            documents,
            annotations,
            inverted,
            by_id,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn document(&self, index: u32) -> &Document {
        &self.documents[index as usize]
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.by_id.get(id).map(|&i| self.document(i))
    }

    pub fn annotation_ordinals(&self, index: usize) -> &[u32] {
        &self.annotations[index]
    }

    /// Documents annotated with exactly this concept.
    pub fn postings(&self, concept: u32) -> &[u32] {
        &self.inverted[concept as usize]
    }

    /// Documents annotated by a hyponym or hypernym of at least one of the
    /// given concepts, in index order. These are exactly the documents
    /// with some nonzero Jaccard elementary score.
    pub fn candidates(&self, closure: &ClosureIndex, concepts: &[u32]) -> Vec<u32> {
        if concepts.is_empty() {
            return Vec::new();
        }
        let mut related = FixedBitSet::with_capacity(closure.len());
        for &q in concepts {
            related.union_with(closure.hypo(q));
            related.union_with(closure.anc(q));
        }
        let mut hits = FixedBitSet::with_capacity(self.len());
        for c in related.ones() {
            for &d in &self.inverted[c] {
                hits.insert(d as usize);
            }
        }
        hits.ones().map(|d| d as u32).collect()
    }

    /// [`CorpusIndex::candidates`] keyed by ids.
    pub fn candidate_docs(&self, closure: &ClosureIndex, concepts: &[&str]) -> Result<Vec<String>, UnknownConcept> {
        let ords = concepts
            .iter()
            .map(|c| closure.ordinal(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .candidates(closure, &ords)
            .into_iter()
            .map(|d| self.document(d).id.clone())
            .collect())
    }
}
