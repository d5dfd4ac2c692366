//! Concept-to-concept similarities and distances over the is-a graph.
//!
//! Functions taking `&str` ids resolve them and delegate to the ordinal
//! versions, which the ranking engine calls directly.

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::closure::ClosureIndex;
use crate::corpus::CorpusIndex;
use crate::ontology::{ConceptId, OntologyGraph};
use crate::UnknownConcept;

pub const DEFAULT_TURN_COST: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error(transparent)]
    UnknownConcept(#[from] UnknownConcept),
    #[error("no path between {0} and {1}")]
    Unreachable(ConceptId, ConceptId),
    #[error("{0} and {1} share no ancestor")]
    NoCommonAncestor(ConceptId, ConceptId),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("intrinsic information content needs at least two concepts")]
    DegenerateOntology,
    #[error("no {0} information content table is available")]
    MissingIc(IcSource),
    #[error("invalid measure: {0}")]
    BadMeasure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    Jd,
    Rada,
    HirstStOnge,
    DIsa,
    Resnik,
    Lin,
}

impl MeasureKind {
    pub fn is_distance(self) -> bool {
        matches!(self, Self::Rada | Self::HirstStOnge | Self::DIsa)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IcSource {
    Intrinsic,
    Extensional,
}

impl fmt::Display for IcSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Intrinsic => "intrinsic",
            Self::Extensional => "extensional",
        })
    }
}

/// A measure together with its parameters.
///
/// Textual form: `jd`, `rada`, `ho`, `disa`, `resnik`, `lin`; the IC-based
/// measures take an optional `:intrinsic` / `:extensional` suffix
/// (intrinsic by default).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    /// Turn cost, only read by Hirst–St Onge.
    pub k: f64,
    pub ic_source: Option<IcSource>,
}

impl MeasureSpec {
    pub fn new(kind: MeasureKind) -> Self {
        let ic_source = matches!(kind, MeasureKind::Resnik | MeasureKind::Lin).then_some(IcSource::Intrinsic);
        Self {
            kind,
            k: DEFAULT_TURN_COST,
            ic_source,
        }
    }

    pub fn jd() -> Self {
        Self::new(MeasureKind::Jd)
    }

    pub fn with_k(mut self, k: f64) -> Result<Self, SimilarityError> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(SimilarityError::BadMeasure(format!("K must be finite and >= 0, got {k}")));
        }
        self.k = k;
        Ok(self)
    }

    pub fn with_ic(mut self, source: IcSource) -> Result<Self, SimilarityError> {
        if self.ic_source.is_none() {
            return Err(SimilarityError::BadMeasure(format!("{self} takes no IC source")));
        }
        self.ic_source = Some(source);
        Ok(self)
    }

    /// Maps a raw measure value into `[0, 1]`; `None` stands for an
    /// unreachable pair. `ic_max` is only read for Resnik.
    pub fn to_similarity(&self, raw: Option<f64>, ic_max: f64) -> f64 {
        let Some(value) = raw else { return 0.0 };
        match self.kind {
            MeasureKind::Jd | MeasureKind::Lin => value,
            MeasureKind::Resnik if ic_max > 0.0 => (value / ic_max).clamp(0.0, 1.0),
            MeasureKind::Resnik => 0.0,
            MeasureKind::Rada | MeasureKind::HirstStOnge | MeasureKind::DIsa => 1.0 / (1.0 + value),
        }
    }
}

impl Default for MeasureSpec {
    fn default() -> Self {
        Self::jd()
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            MeasureKind::Jd => "jd",
            MeasureKind::Rada => "rada",
            MeasureKind::HirstStOnge => "ho",
            MeasureKind::DIsa => "disa",
            MeasureKind::Resnik => "resnik",
            MeasureKind::Lin => "lin",
        };
        match self.ic_source {
            Some(IcSource::Extensional) => write!(f, "{name}:extensional"),
            _ => f.write_str(name),
        }
    }
}

impl FromStr for MeasureSpec {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (name, source) = match lower.split_once(':') {
            Some((n, src)) => (n, Some(src)),
            None => (lower.as_str(), None),
        };
        let kind = match name {
            "jd" | "jaccard" => MeasureKind::Jd,
            "rada" => MeasureKind::Rada,
            "ho" | "hirst-st-onge" | "hso" => MeasureKind::HirstStOnge,
            "disa" | "d_isa" => MeasureKind::DIsa,
            "resnik" => MeasureKind::Resnik,
            "lin" => MeasureKind::Lin,
            _ => return Err(SimilarityError::BadMeasure(format!("unknown measure `{s}`"))),
        };
        let spec = Self::new(kind);
        match source {
            None => Ok(spec),
            Some("intrinsic") => spec.with_ic(IcSource::Intrinsic),
            Some("extensional") => spec.with_ic(IcSource::Extensional),
            Some(other) => Err(SimilarityError::BadMeasure(format!("unknown IC source `{other}`"))),
        }
    }
}

/// Per-concept information content.
#[derive(Clone, Debug, PartialEq)]
pub struct IcTable {
    ic: Vec<f64>,
    pub source: IcSource,
    /// Number of documents, for extensional tables.
    pub doc_count: Option<usize>,
    max: f64,
}

impl IcTable {
    fn new(ic: Vec<f64>, source: IcSource, doc_count: Option<usize>) -> Self {
        let max = ic.iter().copied().fold(0.0, f64::max);
        Self {
            ic,
            source,
            doc_count,
            max,
        }
    }

    #[inline]
    pub fn get(&self, ordinal: u32) -> f64 {
        self.ic[ordinal as usize]
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn values(&self) -> &[f64] {
        &self.ic
    }
}

// ---- Jaccard on hyponym sets ----

/// Jaccard index of the hyponym sets when one concept subsumes the other,
/// 0 otherwise.
///
/// Hyponym sets are reflexive, so `a ∈ hypo(b)` implies `hypo(a) ⊆ hypo(b)`
/// and the index reduces to a ratio of precomputed set sizes.
#[inline]
pub fn jd(closure: &ClosureIndex, a: u32, b: u32) -> f64 {
    if closure.subsumes(b, a) {
        closure.hypo_count(a) as f64 / closure.hypo_count(b) as f64
    } else if closure.subsumes(a, b) {
        closure.hypo_count(b) as f64 / closure.hypo_count(a) as f64
    } else {
        0.0
    }
}

pub fn sim_jd(closure: &ClosureIndex, c1: &str, c2: &str) -> Result<f64, UnknownConcept> {
    Ok(jd(closure, closure.ordinal(c1)?, closure.ordinal(c2)?))
}

// ---- path-based distances ----

/// Unweighted shortest-path lengths from `source` in the undirected view of
/// the graph; `None` marks unreachable concepts.
pub fn rada_from(graph: &OntologyGraph, source: u32) -> Vec<Option<u32>> {
    let mut dist = vec![None; graph.len()];
    let mut queue = VecDeque::new();
    dist[source as usize] = Some(0);
    queue.push_back(source);
    while let Some(node) = queue.pop_front() {
        let d = dist[node as usize].expect("queued nodes have a distance");
        for &next in graph.parents(node).iter().chain(graph.children(node)) {
            if dist[next as usize].is_none() {
                dist[next as usize] = Some(d + 1);
                queue.push_back(next);
            }
        }
    }
    dist
}

pub fn rada(graph: &OntologyGraph, a: u32, b: u32) -> Option<u32> {
    rada_from(graph, a)[b as usize]
}

pub fn rada_distance(graph: &OntologyGraph, c1: &str, c2: &str) -> Result<u32, SimilarityError> {
    let (a, b) = resolve_pair(graph, c1, c2)?;
    rada(graph, a, b).ok_or_else(|| unreachable_pair(graph, a, b))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Heading {
    Start = 0,
    Up = 1,
    Down = 2,
}

struct Frontier {
    cost: f64,
    node: u32,
    heading: Heading,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Frontier {}
impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Frontier {
    // Min-heap on cost.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| (other.heading as u8).cmp(&(self.heading as u8)))
    }
}

/// Least `length + k * turns` from `source` to every concept, where a turn is
/// a switch between moving to a parent ("up") and moving to a child
/// ("down"). Unreachable concepts get `f64::INFINITY`.
///
/// Dijkstra over `(concept, last heading)` states.
pub fn ho_from(graph: &OntologyGraph, source: u32, k: f64) -> Vec<f64> {
    ho_search(graph, source, k, None)
}

fn ho_search(graph: &OntologyGraph, source: u32, k: f64, target: Option<u32>) -> Vec<f64> {
    let n = graph.len();
    let mut best = vec![[f64::INFINITY; 3]; n];
    let mut heap = BinaryHeap::new();
    best[source as usize][Heading::Start as usize] = 0.0;
    heap.push(Frontier {
        cost: 0.0,
        node: source,
        heading: Heading::Start,
    });
    while let Some(Frontier { cost, node, heading }) = heap.pop() {
        if cost > best[node as usize][heading as usize] {
            continue;
        }
        if Some(node) == target {
            break;
        }
        let moves = [(Heading::Up, graph.parents(node)), (Heading::Down, graph.children(node))];
        for (step, neighbours) in moves {
            let turn = if heading != Heading::Start && heading != step { k } else { 0.0 };
            let next_cost = cost + 1.0 + turn;
            for &next in neighbours {
                let slot = &mut best[next as usize][step as usize];
                if next_cost < *slot {
                    *slot = next_cost;
                    heap.push(Frontier {
                        cost: next_cost,
                        node: next,
                        heading: step,
                    });
                }
            }
        }
    }
    best.into_iter()
        .map(|row| row.into_iter().fold(f64::INFINITY, f64::min))
        .collect()
}

pub fn ho(graph: &OntologyGraph, a: u32, b: u32, k: f64) -> Option<f64> {
    let d = ho_search(graph, a, k, Some(b))[b as usize];
    d.is_finite().then_some(d)
}

pub fn ho_distance(graph: &OntologyGraph, c1: &str, c2: &str, k: f64) -> Result<f64, SimilarityError> {
    let (a, b) = resolve_pair(graph, c1, c2)?;
    if !(k.is_finite() && k >= 0.0) {
        return Err(SimilarityError::BadMeasure(format!("K must be finite and >= 0, got {k}")));
    }
    ho(graph, a, b, k).ok_or_else(|| unreachable_pair(graph, a, b))
}

// ---- hyponym-count distance ----

/// `|(hypo(ancEx) ∪ hypo(a) ∪ hypo(b)) \ (hypo(a) ∩ hypo(b))|`, where
/// `ancEx` holds the concepts that are (reflexive) ancestors of exactly one
/// of the pair.
pub fn d_isa_ord(closure: &ClosureIndex, a: u32, b: u32) -> u32 {
    if a == b {
        return 0;
    }
    let mut exclusive = closure.anc(a).clone();
    exclusive.symmetric_difference_with(closure.anc(b));
    let mut union = closure.hypo(a).clone();
    union.union_with(closure.hypo(b));
    for member in exclusive.ones() {
        union.union_with(closure.hypo(member as u32));
    }
    let shared = closure.hypo(a).intersection_count(closure.hypo(b));
    // hypo(a) ∩ hypo(b) is contained in the union.
    (union.count_ones(..) - shared) as u32
}

pub fn d_isa(closure: &ClosureIndex, c1: &str, c2: &str) -> Result<u32, UnknownConcept> {
    Ok(d_isa_ord(closure, closure.ordinal(c1)?, closure.ordinal(c2)?))
}

// ---- information content ----

/// Corpus-based IC: `-ln P(C)` with `P(C)` the share of documents annotated
/// by `C` or one of its hyponyms. Concepts never reached get
/// `ln(docCount + 1)`.
pub fn ic_extensional(closure: &ClosureIndex, corpus: &CorpusIndex) -> Result<IcTable, SimilarityError> {
    let docs = corpus.len();
    if docs == 0 {
        return Err(SimilarityError::EmptyCorpus);
    }
    let n = closure.len();
    let mut counts = vec![0u32; n];
    let mut reached = FixedBitSet::with_capacity(n);
    for doc in 0..docs {
        reached.clear();
        for &c in corpus.annotation_ordinals(doc) {
            reached.union_with(closure.anc(c));
        }
        for c in reached.ones() {
            counts[c] += 1;
        }
    }
    let total = docs as f64;
    let cap = (total + 1.0).ln();
    let ic = counts
        .into_iter()
        .map(|count| if count == 0 { cap } else { -(count as f64 / total).ln() })
        .collect();
    Ok(IcTable::new(ic, IcSource::Extensional, Some(docs)))
}

/// Ontology-only IC: `1 - ln|hypo(C)| / ln N`.
pub fn ic_intrinsic(closure: &ClosureIndex) -> Result<IcTable, SimilarityError> {
    let n = closure.len();
    if n < 2 {
        return Err(SimilarityError::DegenerateOntology);
    }
    let ln_n = (n as f64).ln();
    let ic = (0..n as u32)
        .map(|c| 1.0 - (closure.hypo_count(c) as f64).ln() / ln_n)
        .collect();
    Ok(IcTable::new(ic, IcSource::Intrinsic, None))
}

/// Common ancestor with the highest IC; the lowest ordinal (smallest id)
/// wins ties.
pub fn mica_ord(closure: &ClosureIndex, ic: &IcTable, a: u32, b: u32) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for c in closure.common_ancestor_set(a, b).ones() {
        let value = ic.get(c as u32);
        if best.is_none_or(|(_, top)| value > top) {
            best = Some((c as u32, value));
        }
    }
    best.map(|(c, _)| c)
}

pub fn mica(closure: &ClosureIndex, ic: &IcTable, c1: &str, c2: &str) -> Result<ConceptId, SimilarityError> {
    let (a, b) = (closure.ordinal(c1)?, closure.ordinal(c2)?);
    mica_ord(closure, ic, a, b)
        .map(|m| closure.id(m).clone())
        .ok_or_else(|| SimilarityError::NoCommonAncestor(closure.id(a).clone(), closure.id(b).clone()))
}

pub fn resnik(closure: &ClosureIndex, ic: &IcTable, a: u32, b: u32) -> f64 {
    mica_ord(closure, ic, a, b).map_or(0.0, |m| ic.get(m))
}

pub fn sim_resnik(closure: &ClosureIndex, ic: &IcTable, c1: &str, c2: &str) -> Result<f64, UnknownConcept> {
    Ok(resnik(closure, ic, closure.ordinal(c1)?, closure.ordinal(c2)?))
}

/// `2 IC(MICA) / (IC(a) + IC(b))`, clamped to `[0, 1]`. Identical concepts
/// score 1 even when their IC is 0; distinct concepts with a zero
/// denominator score 0.
pub fn lin(closure: &ClosureIndex, ic: &IcTable, a: u32, b: u32) -> f64 {
    if a == b {
        return 1.0;
    }
    let denominator = ic.get(a) + ic.get(b);
    if denominator <= 0.0 {
        return 0.0;
    }
    (2.0 * resnik(closure, ic, a, b) / denominator).clamp(0.0, 1.0)
}

pub fn sim_lin(closure: &ClosureIndex, ic: &IcTable, c1: &str, c2: &str) -> Result<f64, UnknownConcept> {
    Ok(lin(closure, ic, closure.ordinal(c1)?, closure.ordinal(c2)?))
}

// ---- dispatch ----

/// Everything a measure may need.
#[derive(Clone, Copy)]
pub struct MeasureContext<'a> {
    pub graph: &'a OntologyGraph,
    pub closure: &'a ClosureIndex,
    pub intrinsic: Option<&'a IcTable>,
    pub extensional: Option<&'a IcTable>,
}

impl<'a> MeasureContext<'a> {
    pub fn ic(&self, spec: &MeasureSpec) -> Result<Option<&'a IcTable>, SimilarityError> {
        match spec.ic_source {
            None => Ok(None),
            Some(IcSource::Intrinsic) => self
                .intrinsic
                .map(Some)
                .ok_or(SimilarityError::MissingIc(IcSource::Intrinsic)),
            Some(IcSource::Extensional) => self
                .extensional
                .map(Some)
                .ok_or(SimilarityError::MissingIc(IcSource::Extensional)),
        }
    }

    /// Raw value of the measure; `None` for an unreachable pair.
    pub fn raw(&self, spec: &MeasureSpec, a: u32, b: u32) -> Result<Option<f64>, SimilarityError> {
        let ic = self.ic(spec)?;
        Ok(match spec.kind {
            MeasureKind::Jd => Some(jd(self.closure, a, b)),
            MeasureKind::Rada => rada(self.graph, a, b).map(f64::from),
            MeasureKind::HirstStOnge => ho(self.graph, a, b, spec.k),
            MeasureKind::DIsa => Some(d_isa_ord(self.closure, a, b) as f64),
            MeasureKind::Resnik => Some(resnik(self.closure, ic.expect("resolved"), a, b)),
            MeasureKind::Lin => Some(lin(self.closure, ic.expect("resolved"), a, b)),
        })
    }

    pub fn scorer(&self, spec: MeasureSpec, query: u32) -> Result<Scorer<'a>, SimilarityError> {
        Scorer::new(*self, spec, query)
    }
}

/// `[0, 1]` similarity of one fixed concept against many others.
///
/// Path measures run a single search from the fixed concept up front; the
/// set-based measures are evaluated on demand and memoised.
pub struct Scorer<'a> {
    ctx: MeasureContext<'a>,
    spec: MeasureSpec,
    query: u32,
    ic_max: f64,
    table: Option<Vec<f64>>,
    memo: HashMap<u32, f64>,
}

impl<'a> Scorer<'a> {
    fn new(ctx: MeasureContext<'a>, spec: MeasureSpec, query: u32) -> Result<Self, SimilarityError> {
        let ic_max = ctx.ic(&spec)?.map_or(0.0, IcTable::max);
        let table = match spec.kind {
            MeasureKind::Rada => Some(
                rada_from(ctx.graph, query)
                    .into_iter()
                    .map(|d| spec.to_similarity(d.map(f64::from), ic_max))
                    .collect(),
            ),
            MeasureKind::HirstStOnge => Some(
                ho_from(ctx.graph, query, spec.k)
                    .into_iter()
                    .map(|d| spec.to_similarity(d.is_finite().then_some(d), ic_max))
                    .collect(),
            ),
            _ => None,
        };
        Ok(Self {
            ctx,
            spec,
            query,
            ic_max,
            table,
            memo: HashMap::new(),
        })
    }

    pub fn query(&self) -> u32 {
        self.query
    }

    pub fn score(&mut self, concept: u32) -> f64 {
        if let Some(table) = &self.table {
            return table[concept as usize];
        }
        if self.spec.kind == MeasureKind::Jd {
            return jd(self.ctx.closure, self.query, concept);
        }
        if let Some(&s) = self.memo.get(&concept) {
            return s;
        }
        let raw = self
            .ctx
            .raw(&self.spec, self.query, concept)
            .expect("IC availability checked when the scorer was built");
        let s = self.spec.to_similarity(raw, self.ic_max);
        self.memo.insert(concept, s);
        s
    }
}

fn resolve_pair(graph: &OntologyGraph, c1: &str, c2: &str) -> Result<(u32, u32), UnknownConcept> {
    let a = graph.ordinal(c1).ok_or_else(|| UnknownConcept(c1.to_owned()))?;
    let b = graph.ordinal(c2).ok_or_else(|| UnknownConcept(c2.to_owned()))?;
    Ok((a, b))
}

fn unreachable_pair(graph: &OntologyGraph, a: u32, b: u32) -> SimilarityError {
    SimilarityError::Unreachable(graph.concept(a).id.clone(), graph.concept(b).id.clone())
}
