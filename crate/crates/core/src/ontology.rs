//! OBO-lite ingestion and the validated is-a graph.
//!
//! Only `[Term]` stanzas are read. Inside a stanza the recognised keys are
//! `id`, `name`, `synonym` and `is_a`; `relationship` lines are counted and
//! skipped, any other key is ignored.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a concept, e.g. `GO:0006996`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConceptId(String);

impl ConceptId {
    /// Builds an id, rejecting empty tokens and tokens containing whitespace.
    pub fn new(value: impl Into<String>) -> Option<Self> {
        let value = value.into();
        if value.is_empty() || value.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Self(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ConceptId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Concept {
    pub id: ConceptId,
    pub label: String,
    pub synonyms: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("is_a cycle through concept {0}")]
    Cycle(ConceptId),
    #[error("line {line}: is_a target {target} of {child} is not defined")]
    DanglingReference {
        line: usize,
        child: ConceptId,
        target: ConceptId,
    },
    #[error("line {line}: duplicate concept id {id}")]
    DuplicateId { line: usize, id: ConceptId },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Counters collected while parsing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub concepts: usize,
    pub is_a_edges: usize,
    pub skipped_relationships: usize,
    pub skipped_stanzas: usize,
}

/// A validated is-a DAG.
///
/// Concepts are stored sorted by id, so a concept's position in
/// [`OntologyGraph::concepts`] is also its ordinal in the closure index.
#[derive(Clone, Debug, PartialEq)]
pub struct OntologyGraph {
    concepts: Vec<Concept>,
    /// `(child, parent)` ordinal pairs, sorted and deduplicated.
    edges: Vec<(u32, u32)>,
    lookup: HashMap<ConceptId, u32>,
    parents: Vec<Vec<u32>>,
    children: Vec<Vec<u32>>,
}

impl OntologyGraph {
    /// Builds a graph from concepts and `(child, parent)` id pairs, checking
    /// every invariant (known endpoints, no duplicates, no cycles).
    pub fn from_parts(
        concepts: Vec<Concept>,
        edges: impl IntoIterator<Item = (ConceptId, ConceptId)>,
    ) -> Result<Self, OntologyError> {
        let mut seen = HashSet::new();
        for c in &concepts {
            if !seen.insert(c.id.clone()) {
                return Err(OntologyError::DuplicateId {
                    line: 0,
                    id: c.id.clone(),
                });
            }
        }
        let mut concepts = concepts;
        concepts.sort_by(|a, b| a.id.cmp(&b.id));
        let lookup: HashMap<ConceptId, u32> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i as u32))
            .collect();
        let mut pairs = Vec::new();
        for (child, parent) in edges {
            let c = *lookup.get(&child).ok_or_else(|| OntologyError::DanglingReference {
                line: 0,
                child: child.clone(),
                target: child.clone(),
            })?;
            let p = *lookup.get(&parent).ok_or_else(|| OntologyError::DanglingReference {
                line: 0,
                child: child.clone(),
                target: parent.clone(),
            })?;
            if c == p {
                return Err(OntologyError::Cycle(child));
            }
            pairs.push((c, p));
        }
        pairs.sort_unstable();
        pairs.dedup();
        let graph = Self::assemble(concepts, pairs, lookup);
        graph.check_acyclic()?;
        Ok(graph)
    }

    fn assemble(concepts: Vec<Concept>, edges: Vec<(u32, u32)>, lookup: HashMap<ConceptId, u32>) -> Self {
        let n = concepts.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for &(c, p) in &edges {
            parents[c as usize].push(p);
            children[p as usize].push(c);
        }
        Self {
            concepts,
            edges,
            lookup,
            parents,
            children,
        }
    }

    fn check_acyclic(&self) -> Result<(), OntologyError> {
        match self.topological_order() {
            Some(_) => Ok(()),
            None => Err(OntologyError::Cycle(self.find_cycle_member())),
        }
    }

    /// Kahn ordering, parents before children. `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<u32>> {
        let n = self.len();
        let mut pending: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut order: Vec<u32> = (0..n as u32).filter(|&i| pending[i as usize] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let node = order[head];
            head += 1;
            for &child in &self.children[node as usize] {
                pending[child as usize] -= 1;
                if pending[child as usize] == 0 {
                    order.push(child);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn find_cycle_member(&self) -> ConceptId {
        // Strip nodes that cannot reach a cycle from both ends, then walk
        // parent links inside the remainder until a node repeats.
        let n = self.len();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for i in 0..n {
                if !alive[i] {
                    continue;
                }
                let has_parent = self.parents[i].iter().any(|&p| alive[p as usize]);
                let has_child = self.children[i].iter().any(|&c| alive[c as usize]);
                if !has_parent || !has_child {
                    alive[i] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let start = alive.iter().position(|&a| a).unwrap_or(0);
        let mut visited = vec![false; n];
        let mut node = start;
        while !visited[node] {
            visited[node] = true;
            node = self.parents[node]
                .iter()
                .map(|&p| p as usize)
                .find(|&p| alive[p])
                .unwrap_or(node);
        }
        self.concepts[node].id.clone()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept(&self, ordinal: u32) -> &Concept {
        &self.concepts[ordinal as usize]
    }

    pub fn ordinal(&self, id: &str) -> Option<u32> {
        // HashMap<ConceptId, _> can't be probed with &str without an owned key.
        self.lookup.get(&ConceptId(id.to_owned())).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Concept> {
        self.ordinal(id).map(|o| self.concept(o))
    }

    /// Edge count.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// `(child, parent)` pairs by id.
    pub fn edges(&self) -> impl Iterator<Item = (&ConceptId, &ConceptId)> + '_ {
        self.edges
            .iter()
            .map(|&(c, p)| (&self.concepts[c as usize].id, &self.concepts[p as usize].id))
    }

    pub fn parents(&self, ordinal: u32) -> &[u32] {
        &self.parents[ordinal as usize]
    }

    pub fn children(&self, ordinal: u32) -> &[u32] {
        &self.children[ordinal as usize]
    }
}

struct Stanza {
    line: usize,
    id: Option<ConceptId>,
    name: Option<String>,
    synonyms: Vec<String>,
    is_a: Vec<(usize, ConceptId)>,
}

impl Stanza {
    fn new(line: usize) -> Self {
        Self {
            line,
            id: None,
            name: None,
            synonyms: Vec::new(),
            is_a: Vec::new(),
        }
    }
}

/// Parses an OBO-lite document into a validated graph.
pub fn parse_ontology(text: &str) -> Result<(OntologyGraph, ParseReport), OntologyError> {
    let mut report = ParseReport::default();
    let mut stanzas: Vec<Stanza> = Vec::new();
    let mut current: Option<Stanza> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            stanzas.extend(current.take());
            continue;
        }
        if line.starts_with('[') {
            stanzas.extend(current.take());
            if line == "[Term]" {
                current = Some(Stanza::new(line_no));
            } else if line.ends_with(']') {
                report.skipped_stanzas += 1;
            } else {
                return Err(syntax(line_no, "unterminated stanza header"));
            }
            continue;
        }
        // Header lines and the bodies of skipped stanzas.
        let Some(stanza) = current.as_mut() else {
            continue;
        };
        let Some((key, value)) = line.split_once(':') else {
            return Err(syntax(line_no, "expected `key: value`"));
        };
        let value = value.trim();
        match key.trim() {
            "id" => {
                if stanza.id.is_some() {
                    return Err(syntax(line_no, "second id line in stanza"));
                }
                let id = ConceptId::new(value)
                    .ok_or_else(|| syntax(line_no, "concept id must be a non-empty token"))?;
                stanza.id = Some(id);
            }
            "name" => {
                if value.is_empty() {
                    return Err(syntax(line_no, "empty name"));
                }
                stanza.name = Some(value.to_owned());
            }
            "synonym" => stanza.synonyms.push(parse_synonym(value, line_no)?),
            "is_a" => {
                let target = value.split('!').next().unwrap_or("").trim();
                let target = target.split_whitespace().next().unwrap_or("");
                let id = ConceptId::new(target)
                    .ok_or_else(|| syntax(line_no, "is_a needs a target concept id"))?;
                stanza.is_a.push((line_no, id));
            }
            "relationship" => report.skipped_relationships += 1,
            _ => {}
        }
    }
    stanzas.extend(current.take());

    let mut lookup: HashMap<ConceptId, usize> = HashMap::new();
    let mut concepts = Vec::with_capacity(stanzas.len());
    for stanza in &stanzas {
        let id = stanza
            .id
            .clone()
            .ok_or_else(|| syntax(stanza.line, "[Term] stanza without id"))?;
        if lookup.insert(id.clone(), concepts.len()).is_some() {
            return Err(OntologyError::DuplicateId {
                line: stanza.line,
                id,
            });
        }
        concepts.push(Concept {
            label: stanza.name.clone().unwrap_or_else(|| id.to_string()),
            id,
            synonyms: stanza.synonyms.clone(),
        });
    }

    let mut edges = Vec::new();
    for stanza in &stanzas {
        let child = stanza.id.clone().expect("checked above");
        for (line, parent) in &stanza.is_a {
            if !lookup.contains_key(parent) {
                return Err(OntologyError::DanglingReference {
                    line: *line,
                    child,
                    target: parent.clone(),
                });
            }
            edges.push((child.clone(), parent.clone()));
        }
    }

    let graph = OntologyGraph::from_parts(concepts, edges)?;
    report.concepts = graph.len();
    report.is_a_edges = graph.edge_count();
    Ok((graph, report))
}

fn parse_synonym(value: &str, line: usize) -> Result<String, OntologyError> {
    let rest = value
        .strip_prefix('"')
        .ok_or_else(|| syntax(line, "synonym text must be quoted"))?;
    let mut out = String::new();
    let mut chars = rest.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => out.extend(chars.next()),
            '"' => return Ok(out),
            c => out.push(c),
        }
    }
    Err(syntax(line, "unterminated synonym"))
}

fn syntax(line: usize, message: &str) -> OntologyError {
    OntologyError::Syntax {
        line,
        message: message.to_owned(),
    }
}
