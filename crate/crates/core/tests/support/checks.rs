//! Property checks shared by the integration tests and the acceptance run.
//! Each returns the list of violations it found.

use ontorank_core::relevance::{evaluate_exhaustive, evaluate_query};
use ontorank_core::similarity::{d_isa_ord, ho, ic_extensional, ic_intrinsic, jd, lin, mica_ord, rada_from};
use ontorank_core::{yager_aggregate, weighted_yager, ConceptId, LayoutPoint, MatchKind, Query, ScoredDocument};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{annotation_ordinals, Dag, Instance, Set};

pub type Violations = Vec<String>;

const REAL_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REAL_TOL || (a.is_infinite() && a == b)
}

/// Closure rows against depth-first reachability, plus the stated closure
/// invariants.
pub fn closure(inst: &Instance) -> Violations {
    let mut out = Vec::new();
    let c = inst.engine.closure();
    let hypo = inst.dag.hypos();
    let anc = inst.dag.ancs();
    for x in 0..inst.dag.len() {
        let row: Set = c.hypo(x as u32).ones().collect();
        if row != hypo[x] {
            out.push(format!("hypo({}) differs", inst.dag.ids[x]));
        }
        let row: Set = c.anc(x as u32).ones().collect();
        if row != anc[x] {
            out.push(format!("anc({}) differs", inst.dag.ids[x]));
        }
        for &d in &hypo[x] {
            if !anc[d].contains(&x) {
                out.push(format!("duality broken at {x}, {d}"));
            }
            if !c.hypo(d as u32).is_subset(c.hypo(x as u32)) {
                out.push(format!("monotonicity broken at {x}, {d}"));
            }
        }
    }
    out
}

/// Pairs to compare for measures whose oracle is expensive: all pairs on
/// small graphs, a seeded sample otherwise.
fn pairs(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if n <= 60 {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    } else {
        let mut v: Vec<_> = (0..3000).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
        v.extend((0..n).map(|a| (a, a)));
        v
    }
}

/// sim_jd, d_isa, Rada, extensional and intrinsic IC, MICA and Lin against
/// the set oracles.
pub fn measures(inst: &Instance, rng: &mut ChaCha8Rng) -> Violations {
    let mut out = Vec::new();
    let dag = &inst.dag;
    let n = dag.len();
    let c = inst.engine.closure();
    let g = inst.engine.graph();
    let hypo = dag.hypos();
    let anc = dag.ancs();
    let id = |x: usize| dag.ids[x].as_str();

    for a in 0..n {
        for b in 0..n {
            let (got, want) = (jd(c, a as u32, b as u32), super::jd(&hypo, a, b));
            if !close(got, want) {
                out.push(format!("jd({}, {}) = {got}, oracle {want}", id(a), id(b)));
            }
        }
    }
    for (a, b) in pairs(n, rng) {
        let (got, want) = (d_isa_ord(c, a as u32, b as u32) as usize, super::d_isa(&hypo, &anc, a, b));
        if got != want {
            out.push(format!("d_isa({}, {}) = {got}, oracle {want}", id(a), id(b)));
        }
    }
    let rada = super::rada_all(dag);
    for (a, row) in rada.iter().enumerate() {
        let got = rada_from(g, a as u32);
        for (b, want) in row.iter().enumerate() {
            if got[b] != *want {
                out.push(format!("rada({}, {}) = {:?}, oracle {want:?}", id(a), id(b), got[b]));
            }
        }
    }

    let annotations: Vec<Vec<usize>> = inst.docs.iter().map(|d| annotation_ordinals(dag, d)).collect();
    let ext_oracle = super::ic_extensional(&hypo, &annotations);
    let ext = ic_extensional(c, inst.engine.corpus()).unwrap();
    let int_oracle = super::ic_intrinsic(&hypo);
    let int = ic_intrinsic(c).unwrap();
    for x in 0..n {
        if !close(ext.get(x as u32), ext_oracle[x]) {
            out.push(format!("ic_ext({}) = {}, oracle {}", id(x), ext.get(x as u32), ext_oracle[x]));
        }
        if !close(int.get(x as u32), int_oracle[x]) {
            out.push(format!("ic_int({}) = {}, oracle {}", id(x), int.get(x as u32), int_oracle[x]));
        }
    }
    for (table, oracle) in [(&ext, &ext_oracle), (&int, &int_oracle)] {
        for a in 0..n {
            for b in 0..n {
                let got = mica_ord(c, table, a as u32, b as u32).map(|m| m as usize);
                let want = super::mica(&anc, oracle, a, b);
                if got != want {
                    out.push(format!("mica({}, {}) = {got:?}, oracle {want:?}", id(a), id(b)));
                }
                let (got, want) = (lin(c, table, a as u32, b as u32), super::lin(&anc, oracle, a, b));
                if !close(got, want) {
                    out.push(format!("lin({}, {}) = {got}, oracle {want}", id(a), id(b)));
                }
            }
        }
    }
    out
}

/// Hirst–St Onge cost against exhaustive simple-path enumeration, for
/// several turn costs. Meant for graphs of at most 12 concepts.
pub fn hirst_st_onge(inst: &Instance) -> Violations {
    let mut out = Vec::new();
    let g = inst.engine.graph();
    let n = inst.dag.len();
    for k in [0.0, 1.0, 2.0, 3.5] {
        for a in 0..n {
            for b in 0..n {
                let got = ho(g, a as u32, b as u32, k);
                let want = super::ho_exhaustive(&inst.dag, a, b, k);
                let same = match (got, want) {
                    (Some(x), Some(y)) => close(x, y),
                    (None, None) => true,
                    _ => false,
                };
                if !same {
                    out.push(format!("ho({a}, {b}, K={k}) = {got:?}, oracle {want:?}"));
                }
            }
        }
    }
    out
}

/// Identity 1, distinct < 1, > 0 exactly on subsumption-related pairs,
/// range [0, 1], symmetry. Returns (violations, pairs checked).
pub fn jd_properties(inst: &Instance) -> (Violations, usize) {
    let mut out = Vec::new();
    let c = inst.engine.closure();
    let hypo = inst.dag.hypos();
    let n = inst.dag.len();
    for a in 0..n {
        for b in 0..n {
            let s = jd(c, a as u32, b as u32);
            let related = hypo[a].contains(&b) || hypo[b].contains(&a);
            let ok = (0.0..=1.0).contains(&s)
                && s.to_bits() == jd(c, b as u32, a as u32).to_bits()
                && (a != b || s == 1.0)
                && (a == b || s < 1.0)
                && (related == (s > 0.0));
            if !ok {
                out.push(format!("jd({}, {}) = {s}", inst.dag.ids[a], inst.dag.ids[b]));
            }
        }
    }
    (out, n * n)
}

/// d_isa metric axioms. Symmetry, identity and positivity go in the first
/// list; triangle-inequality violations in the second.
pub fn d_isa_axioms(inst: &Instance) -> (Violations, Violations) {
    let c = inst.engine.closure();
    let n = inst.dag.len();
    let d: Vec<Vec<u32>> = (0..n)
        .map(|a| (0..n).map(|b| d_isa_ord(c, a as u32, b as u32)).collect())
        .collect();
    let mut basic = Vec::new();
    let mut triangle = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if d[a][b] != d[b][a] || (a == b) != (d[a][b] == 0) {
                basic.push(format!("d({a}, {b}) = {}, d({b}, {a}) = {}", d[a][b], d[b][a]));
            }
            for m in 0..n {
                if d[a][b] > d[a][m] + d[m][b] {
                    triangle.push(format!(
                        "d({a},{b}) = {} > d({a},{m}) + d({m},{b}) = {} + {}",
                        d[a][b], d[a][m], d[m][b]
                    ));
                }
            }
        }
    }
    (basic, triangle)
}

const QS: [f64; 9] = [-50.0, -5.0, -1.0, 0.0, 0.85, 1.0, 2.0, 5.0, 50.0];

/// Yager aggregation conditions over `trials` random vectors.
pub fn aggregation(rng: &mut ChaCha8Rng, trials: usize) -> Violations {
    let mut out = Vec::new();
    for _ in 0..trials {
        let q = if rng.random_bool(0.3) {
            *QS.choose(rng).unwrap()
        } else {
            rng.random_range(-50.0..=50.0)
        };
        let s = super::random_scores(rng, 0.0);
        let n = s.len();
        let y = yager_aggregate(&s, q).unwrap();

        if yager_aggregate(&vec![0.0; n], q).unwrap() != 0.0 || yager_aggregate(&vec![1.0; n], q).unwrap() != 1.0 {
            out.push(format!("boundary values at q={q}, n={n}"));
        }
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(0.0, f64::max);
        if !(lo <= y && y <= hi) {
            out.push(format!("{y} outside [{lo}, {hi}] for {s:?}, q={q}"));
        }
        let mut raised = s.clone();
        let i = rng.random_range(0..n);
        raised[i] = rng.random_range(raised[i]..=1.0);
        let y2 = yager_aggregate(&raised, q).unwrap();
        if y2 < y {
            out.push(format!("raising {s:?} to {raised:?} at q={q} lowered {y} to {y2}"));
        }
        if s.iter().all(|&x| x > 0.0) {
            let q2 = rng.random_range(q..=50.0);
            let y3 = yager_aggregate(&s, q2).unwrap();
            if y3 < y {
                out.push(format!("{s:?}: q={q} gives {y} but q={q2} gives {y3}"));
            }
        }
        if q.abs() <= 20.0 {
            let want = super::power_mean(&s, q);
            if (want - y).abs() > 1e-9 * want.max(1e-300) && (want - y).abs() > 1e-12 {
                out.push(format!("{s:?}, q={q}: {y}, direct power mean {want}"));
            }
        }

        let s = super::random_scores(rng, 0.1);
        let hi = s.iter().copied().fold(0.0, f64::max);
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let top = yager_aggregate(&s, 200.0).unwrap();
        let bottom = yager_aggregate(&s, -200.0).unwrap();
        if (top - hi).abs() > 0.02 * hi {
            out.push(format!("Y_200({s:?}) = {top}, max {hi}"));
        }
        if (bottom - lo).abs() > 0.02 {
            out.push(format!("Y_-200({s:?}) = {bottom}, min {lo}"));
        }
    }
    out
}

fn ids(dag: &Dag, ords: &[usize]) -> Vec<ConceptId> {
    ords.iter().map(|&c| ConceptId::new(dag.ids[c].clone()).unwrap()).collect()
}

/// Query concepts: sometimes drawn from one document's annotation so the
/// conjunctive exact-match set is non-empty.
fn random_query_concepts(inst: &Instance, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = inst.dag.len();
    let mut chosen: Vec<usize> = if rng.random_bool(0.5) {
        let doc = inst.docs.choose(rng).unwrap();
        let mut ann = annotation_ordinals(&inst.dag, doc);
        ann.shuffle(rng);
        ann.truncate(rng.random_range(1..=ann.len()));
        ann
    } else {
        let mut pool: Vec<usize> = (0..n).collect();
        pool.shuffle(rng);
        pool.truncate(rng.random_range(1..=4.min(n)));
        pool
    };
    chosen.sort_unstable();
    chosen
}

fn everything(query: Query) -> Query {
    query.with_threshold(0.0).with_limit(usize::MAX)
}

/// Exact-match conjunction at the rough end, disjunction at the tolerant end.
pub fn boolean_bracketing(inst: &Instance, rng: &mut ChaCha8Rng) -> Violations {
    let mut out = Vec::new();
    let concepts = random_query_concepts(inst, rng);
    let base = everything(Query::new(ids(&inst.dag, &concepts)));
    let rough = inst.engine.evaluate(&base.clone().with_q(-50.0)).unwrap();
    let tolerant = inst.engine.evaluate(&base.with_q(50.0)).unwrap();

    let mut full: Vec<&str> = rough.iter().filter(|d| d.rsv == 1.0).map(|d| d.doc_id.as_str()).collect();
    full.sort_unstable();
    let mut conjunctive: Vec<&str> = inst
        .docs
        .iter()
        .filter(|d| {
            let ann = annotation_ordinals(&inst.dag, d);
            concepts.iter().all(|c| ann.contains(c))
        })
        .map(|d| d.id.as_str())
        .collect();
    conjunctive.sort_unstable();
    if full != conjunctive {
        out.push(format!("query {concepts:?}: RSV = 1 at q=-50 for {full:?}, exact conjunction {conjunctive:?}"));
    }
    for d in &inst.docs {
        let ann = annotation_ordinals(&inst.dag, d);
        if concepts.iter().any(|c| ann.contains(c)) {
            let rsv = tolerant.iter().find(|r| r.doc_id == d.id).map_or(0.0, |r| r.rsv);
            if rsv <= 0.0 {
                out.push(format!("query {concepts:?}: {} has an exact match but RSV {rsv} at q=50", d.id));
            }
        }
    }
    out
}

fn random_query(inst: &Instance, rng: &mut ChaCha8Rng) -> Query {
    let concepts = random_query_concepts(inst, rng);
    let mut query = Query::new(ids(&inst.dag, &concepts))
        .with_q(if rng.random_bool(0.5) {
            *QS.choose(rng).unwrap()
        } else {
            rng.random_range(-50.0..=50.0)
        })
        .with_threshold({
            let any = rng.random_range(0.0..=1.0);
            *[0.0, 0.05, 0.1, 0.3, 0.5, any].choose(rng).unwrap()
        })
        .with_limit(rng.random_range(1..=inst.docs.len() + 2));
    if rng.random_bool(0.3) {
        let mut w: Vec<f64> = (0..concepts.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        if concepts.len() > 1 && rng.random_bool(0.3) {
            w[0] = 0.0;
        }
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|x| *x /= total);
            let drift = 1.0 - w.iter().sum::<f64>();
            w[concepts.len() - 1] += drift;
            query = query.with_weights(w);
        }
    }
    query
}

fn same_ranking(a: &[ScoredDocument], b: &[ScoredDocument]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.doc_id == y.doc_id && x.rank == y.rank && x.rsv.to_bits() == y.rsv.to_bits() && x.elementary == y.elementary
        })
}

/// Candidate-pruned evaluation against exhaustive evaluation, on `queries`
/// random JD queries.
pub fn pruning(inst: &Instance, rng: &mut ChaCha8Rng, queries: usize) -> Violations {
    let ctx = inst.engine.context();
    let corpus = inst.engine.corpus();
    let mut out = Vec::new();
    for _ in 0..queries {
        let mut query = random_query(inst, rng);
        // Pruning only applies above a zero threshold.
        if query.threshold == 0.0 {
            query.threshold = 0.01;
        }
        let pruned = evaluate_query(&ctx, corpus, &query).unwrap();
        let full = evaluate_exhaustive(&ctx, corpus, &query).unwrap();
        if !same_ranking(&pruned, &full) {
            out.push(format!("{query:?}: pruned and exhaustive rankings differ"));
        }
    }
    out
}

/// Recomputes every document's elementary scores and RSV from the set
/// oracles and compares them with an unthresholded evaluation.
pub fn ranking(inst: &Instance, rng: &mut ChaCha8Rng) -> Violations {
    let mut out = Vec::new();
    let dag = &inst.dag;
    let hypo = dag.hypos();
    let mut query = random_query(inst, rng);
    query.q = query.q.clamp(-20.0, 20.0);
    let concepts: Vec<usize> = query
        .concepts
        .iter()
        .map(|c| dag.ids.binary_search_by(|x| x.as_str().cmp(c.as_str())).unwrap())
        .collect();
    let results = inst.engine.evaluate(&everything(query.clone())).unwrap();
    if results.len() != inst.docs.len() {
        out.push(format!("{} of {} documents returned at threshold 0", results.len(), inst.docs.len()));
    }
    for (r, w) in results.windows(2).map(|w| (&w[0], &w[1])) {
        if r.rsv < w.rsv || (r.rsv == w.rsv && r.doc_id > w.doc_id) || w.rank != r.rank + 1 {
            out.push(format!("order broken between {} and {}", r.doc_id, w.doc_id));
        }
    }
    for r in &results {
        let doc = inst.docs.iter().find(|d| d.id == r.doc_id).unwrap();
        let ann = annotation_ordinals(dag, doc);
        let mut scores = Vec::new();
        for (t, &qc) in concepts.iter().enumerate() {
            let kind = |c: usize| {
                if c == qc {
                    MatchKind::Exact
                } else if hypo[qc].contains(&c) {
                    MatchKind::Hyponym
                } else if hypo[c].contains(&qc) {
                    MatchKind::Hypernym
                } else {
                    MatchKind::None
                }
            };
            let pref = |k: MatchKind| [MatchKind::Exact, MatchKind::Hyponym, MatchKind::Hypernym].iter().position(|&x| x == k).unwrap_or(3);
            let best = ann
                .iter()
                .map(|&c| (c, super::jd(&hypo, qc, c)))
                .filter(|&(_, s)| s > 0.0)
                .min_by(|a, b| b.1.total_cmp(&a.1).then(pref(kind(a.0)).cmp(&pref(kind(b.0)))).then(a.0.cmp(&b.0)));
            let e = &r.elementary[t];
            let (want_best, want_score, want_kind) = match best {
                Some((c, s)) => (Some(dag.ids[c].as_str()), s, kind(c)),
                None => (None, 0.0, MatchKind::None),
            };
            if e.best_doc_concept.as_ref().map(|c| c.as_str()) != want_best || e.score != want_score || e.kind != want_kind {
                out.push(format!("{} / {}: {e:?}, oracle {want_best:?} {want_score} {want_kind:?}", r.doc_id, dag.ids[qc]));
            }
            scores.push(want_score);
        }
        let want = match &query.weights {
            Some(w) => super::weighted_power_mean(&scores, w, query.q),
            None => super::power_mean(&scores, query.q),
        };
        // Sanity check of the crate's own aggregation on the same vector.
        let direct = match &query.weights {
            Some(w) => weighted_yager(&scores, w, query.q).unwrap(),
            None => yager_aggregate(&scores, query.q).unwrap(),
        };
        if (r.rsv - want).abs() > 1e-9 || r.rsv != direct {
            out.push(format!("{}: rsv {}, oracle {want}", r.doc_id, r.rsv));
        }
    }
    out
}

/// radius = 1 - rsv, strictly increasing as rsv decreases, and the polar
/// coordinates agree with (x, y).
pub fn layout(points: &[LayoutPoint], rsvs: &[f64]) -> Violations {
    let mut out = Vec::new();
    for (p, &rsv) in points.iter().zip(rsvs) {
        let (x, y) = (p.radius * p.angle_deg.to_radians().cos(), p.radius * p.angle_deg.to_radians().sin());
        if p.radius != 1.0 - rsv || (p.x - x).abs() > 1e-12 || (p.y - y).abs() > 1e-12 {
            out.push(format!("{p:?} for rsv {rsv}"));
        }
    }
    for i in 0..points.len() {
        for j in 0..points.len() {
            if rsvs[i] > rsvs[j] && points[i].radius >= points[j].radius {
                out.push(format!("rsv {} > {} but radius {} >= {}", rsvs[i], rsvs[j], points[i].radius, points[j].radius));
            }
        }
    }
    out
}
