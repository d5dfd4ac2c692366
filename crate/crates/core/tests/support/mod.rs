//! Random instances and brute-force reference implementations.
//!
//! Nothing here calls into the crate's closure, similarity or ranking code;
//! every quantity is recomputed from adjacency lists with plain sets.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ontorank_core::{Concept, ConceptId, Document, Engine, OntologyGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod checks;

pub type Set = BTreeSet<usize>;

/// A random DAG in the crate's ordinal numbering (ids sorted), with its
/// adjacency lists kept separately for the oracles.
pub struct Dag {
    pub ids: Vec<String>,
    /// `parents[c]`, ordinals.
    pub parents: Vec<Vec<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl Dag {
    /// `n` concepts; each concept after the first draws up to `max_parents`
    /// parents among concepts generated before it. With `allow_roots`, some
    /// draw none, so the graph may be a forest. Ids are shuffled so ordinal
    /// order is unrelated to generation order.
    pub fn random(rng: &mut ChaCha8Rng, n: usize, max_parents: usize, allow_roots: bool) -> Self {
        let mut labels: Vec<usize> = (0..n).collect();
        labels.shuffle(rng);
        // generation index -> id, then re-index by sorted id.
        let gen_ids: Vec<String> = labels.iter().map(|l| format!("T{l:03}")).collect();
        let mut sorted = gen_ids.clone();
        sorted.sort();
        let ord_of = |g: usize| sorted.binary_search(&gen_ids[g]).unwrap();

        let mut parents = vec![Vec::new(); n];
        for g in 1..n {
            let lo = if allow_roots { 0 } else { 1 };
            let k = rng.random_range(lo..=max_parents).min(g);
            let mut pool: Vec<usize> = (0..g).collect();
            pool.shuffle(rng);
            for &p in &pool[..k] {
                parents[ord_of(g)].push(ord_of(p));
            }
        }
        let mut children = vec![Vec::new(); n];
        for (c, ps) in parents.iter_mut().enumerate() {
            ps.sort_unstable();
            for &p in ps.iter() {
                children[p].push(c);
            }
        }
        Self {
            ids: sorted,
            parents,
            children,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn graph(&self) -> OntologyGraph {
        let concepts = self
            .ids
            .iter()
            .map(|id| Concept {
                id: ConceptId::new(id.clone()).unwrap(),
                label: format!("label {id}"),
                synonyms: Vec::new(),
            })
            .collect();
        let edges = self.parents.iter().enumerate().flat_map(|(c, ps)| {
            ps.iter()
                .map(move |&p| (ConceptId::new(self.ids[c].clone()).unwrap(), ConceptId::new(self.ids[p].clone()).unwrap()))
        });
        OntologyGraph::from_parts(concepts, edges).unwrap()
    }

    pub fn obo(&self) -> String {
        let mut out = String::new();
        for (c, id) in self.ids.iter().enumerate() {
            out.push_str(&format!("[Term]\nid: {id}\nname: label {id}\n"));
            for &p in &self.parents[c] {
                out.push_str(&format!("is_a: {}\n", self.ids[p]));
            }
            out.push('\n');
        }
        out
    }

    /// Reflexive descendants by depth-first search.
    pub fn hypo(&self, c: usize) -> Set {
        reach(c, &self.children)
    }

    /// Reflexive ancestors by depth-first search.
    pub fn anc(&self, c: usize) -> Set {
        reach(c, &self.parents)
    }

    pub fn hypos(&self) -> Vec<Set> {
        (0..self.len()).map(|c| self.hypo(c)).collect()
    }

    pub fn ancs(&self) -> Vec<Set> {
        (0..self.len()).map(|c| self.anc(c)).collect()
    }

    pub fn undirected(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|c| self.parents[c].iter().chain(&self.children[c]).copied().collect())
            .collect()
    }
}

fn reach(start: usize, next: &[Vec<usize>]) -> Set {
    let mut seen = Set::new();
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        if seen.insert(c) {
            stack.extend(next[c].iter().copied());
        }
    }
    seen
}

/// Random documents, each annotated with 1..=`max_annotation` concepts.
pub fn random_docs(rng: &mut ChaCha8Rng, dag: &Dag, count: usize, max_annotation: usize) -> Vec<Document> {
    (0..count)
        .map(|d| {
            let k = rng.random_range(1..=max_annotation.min(dag.len()));
            let mut pool: Vec<usize> = (0..dag.len()).collect();
            pool.shuffle(rng);
            let mut annotation: Vec<ConceptId> = pool[..k]
                .iter()
                .map(|&c| ConceptId::new(dag.ids[c].clone()).unwrap())
                .collect();
            annotation.sort();
            Document {
                id: format!("doc{d:04}"),
                title: format!("document {d}"),
                annotation,
            }
        })
        .collect()
}

pub fn annotation_ordinals(dag: &Dag, doc: &Document) -> Vec<usize> {
    doc.annotation
        .iter()
        .map(|c| dag.ids.binary_search_by(|x| x.as_str().cmp(c.as_str())).unwrap())
        .collect()
}

/// One seeded instance: DAG, corpus and the engine built from them.
pub struct Instance {
    pub dag: Dag,
    pub docs: Vec<Document>,
    pub engine: Engine,
}

impl Instance {
    pub fn new(seed: u64, max_n: usize, doc_count: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=max_n);
        let max_parents = rng.random_range(1..=3);
        let forest = rng.random_bool(0.3);
        let dag = Dag::random(&mut rng, n, max_parents, forest);
        let docs = random_docs(&mut rng, &dag, doc_count, 4);
        let engine = Engine::new(dag.graph(), docs.clone()).unwrap();
        Self { dag, docs, engine }
    }
}

// ---- measure oracles ----

/// Set Jaccard of hyponym sets when the pair lies on one subsumption line.
pub fn jd(hypo: &[Set], a: usize, b: usize) -> f64 {
    if !(hypo[b].contains(&a) || hypo[a].contains(&b)) {
        return 0.0;
    }
    let inter = hypo[a].intersection(&hypo[b]).count();
    let union = hypo[a].union(&hypo[b]).count();
    inter as f64 / union as f64
}

pub fn d_isa(hypo: &[Set], anc: &[Set], a: usize, b: usize) -> usize {
    let exclusive: Set = anc[a].symmetric_difference(&anc[b]).copied().collect();
    let mut union: Set = hypo[a].union(&hypo[b]).copied().collect();
    for &x in &exclusive {
        union.extend(hypo[x].iter().copied());
    }
    let inter: Set = hypo[a].intersection(&hypo[b]).copied().collect();
    union.difference(&inter).count()
}

/// All-pairs undirected shortest edge counts (Floyd–Warshall); `None` when
/// disconnected.
pub fn rada_all(dag: &Dag) -> Vec<Vec<Option<u32>>> {
    let n = dag.len();
    const INF: u32 = u32::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (c, row) in d.iter_mut().enumerate() {
        row[c] = 0;
    }
    for (c, ns) in dag.undirected().iter().enumerate() {
        for &x in ns {
            d[c][x] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d.into_iter()
        .map(|row| row.into_iter().map(|x| (x < INF).then_some(x)).collect())
        .collect()
}

/// Minimum of `length + k * turns` over every simple undirected path,
/// enumerated exhaustively. Only for small graphs.
pub fn ho_exhaustive(dag: &Dag, a: usize, b: usize, k: f64) -> Option<f64> {
    if a == b {
        return Some(0.0);
    }
    // (neighbour, is_up)
    let moves: Vec<Vec<(usize, bool)>> = (0..dag.len())
        .map(|c| {
            dag.parents[c]
                .iter()
                .map(|&p| (p, true))
                .chain(dag.children[c].iter().map(|&x| (x, false)))
                .collect()
        })
        .collect();
    let mut best: Option<f64> = None;
    let mut on_path = vec![false; dag.len()];
    on_path[a] = true;
    walk(&moves, a, b, None, 0, 0, k, &mut on_path, &mut best);
    best
}

#[allow(clippy::too_many_arguments)]
fn walk(
    moves: &[Vec<(usize, bool)>],
    at: usize,
    target: usize,
    heading: Option<bool>,
    len: u32,
    turns: u32,
    k: f64,
    on_path: &mut [bool],
    best: &mut Option<f64>,
) {
    for &(next, up) in &moves[at] {
        if on_path[next] {
            continue;
        }
        let t = turns + u32::from(heading.is_some_and(|h| h != up));
        // Cost never decreases along a path, so a prefix already at least as
        // expensive as the best complete path cannot improve on it.
        let prefix = (len + 1) as f64 + k * t as f64;
        if best.is_some_and(|b| prefix >= b) {
            continue;
        }
        if next == target {
            let cost = (len + 1) as f64 + k * t as f64;
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            continue;
        }
        on_path[next] = true;
        walk(moves, next, target, Some(up), len + 1, t, k, on_path, best);
        on_path[next] = false;
    }
}

/// `-ln(share of documents annotated by c or a descendant)`, capped at
/// `ln(docCount + 1)` for concepts no document reaches.
pub fn ic_extensional(hypo: &[Set], annotations: &[Vec<usize>]) -> Vec<f64> {
    let total = annotations.len() as f64;
    (0..hypo.len())
        .map(|c| {
            let count = annotations
                .iter()
                .filter(|ann| ann.iter().any(|x| hypo[c].contains(x)))
                .count();
            if count == 0 {
                (total + 1.0).ln()
            } else {
                -(count as f64 / total).ln()
            }
        })
        .collect()
}

pub fn ic_intrinsic(hypo: &[Set]) -> Vec<f64> {
    let ln_n = (hypo.len() as f64).ln();
    hypo.iter().map(|h| 1.0 - (h.len() as f64).ln() / ln_n).collect()
}

/// Highest-IC common ancestor, smallest ordinal on ties.
pub fn mica(anc: &[Set], ic: &[f64], a: usize, b: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &c in anc[a].intersection(&anc[b]) {
        match best {
            Some(m) if ic[c] <= ic[m] => {}
            _ => best = Some(c),
        }
    }
    best
}

pub fn lin(anc: &[Set], ic: &[f64], a: usize, b: usize) -> f64 {
    if a == b {
        return 1.0;
    }
    let den = ic[a] + ic[b];
    if den <= 0.0 {
        return 0.0;
    }
    let num = mica(anc, ic, a, b).map_or(0.0, |m| 2.0 * ic[m]);
    (num / den).clamp(0.0, 1.0)
}

// ---- aggregation oracle ----

/// Direct power mean, for moderate exponents only.
pub fn power_mean(scores: &[f64], q: f64) -> f64 {
    let n = scores.len() as f64;
    if q == 0.0 {
        return scores.iter().product::<f64>().powf(1.0 / n);
    }
    if q < 0.0 && scores.contains(&0.0) {
        return 0.0;
    }
    (scores.iter().map(|s| s.powf(q)).sum::<f64>() / n).powf(1.0 / q)
}

/// `(Σ p s^q)^(1/q)` over the positive-weight entries.
pub fn weighted_power_mean(scores: &[f64], weights: &[f64], q: f64) -> f64 {
    let pairs: Vec<(f64, f64)> = scores
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&s, &w)| (s, w))
        .collect();
    if q == 0.0 {
        return pairs.iter().map(|(s, w)| s.powf(*w)).product();
    }
    if q < 0.0 && pairs.iter().any(|(s, _)| *s == 0.0) {
        return 0.0;
    }
    pairs.iter().map(|(s, w)| w * s.powf(q)).sum::<f64>().powf(1.0 / q)
}

pub fn random_scores(rng: &mut ChaCha8Rng, lo: f64) -> Vec<f64> {
    let n = rng.random_range(1..=10);
    (0..n)
        .map(|_| {
            if lo == 0.0 && rng.random_bool(0.1) {
                0.0
            } else {
                rng.random_range(lo..=1.0)
            }
        })
        .collect()
}
