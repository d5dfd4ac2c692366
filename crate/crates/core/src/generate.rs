//! Seeded synthetic ontology and corpus, written in the same text formats
//! the loaders read.

use std::fmt::Write;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MIN_PARENTS: usize = 1;
pub const MAX_PARENTS: usize = 3;
pub const MIN_ANNOTATION: usize = 3;
pub const MAX_ANNOTATION: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synthetic {
    pub ontology: String,
    pub annotations: String,
}

/// Concept `C…0` is the root; every later concept draws 1–3 distinct parents
/// among the concepts before it, and every document 3–10 distinct concepts
/// (fewer when the ontology is smaller). Ids are zero-padded so that their
/// lexicographic order is the generation order.
pub fn generate(concept_count: usize, doc_count: usize, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cw = width(concept_count);
    let dw = width(doc_count);
    let cid = |i: usize| format!("C{i:0cw$}");

    let mut ontology = String::with_capacity(concept_count * 48);
    ontology.push_str("format-version: 1.2\n");
    for i in 0..concept_count {
        let _ = write!(ontology, "\n[Term]\nid: {}\nname: concept {i}\n", cid(i));
        if i == 0 {
            continue;
        }
        let k = rng.random_range(MIN_PARENTS..=MAX_PARENTS).min(i);
        let mut parents = sample(&mut rng, i, k).into_vec();
        parents.sort_unstable();
        for p in parents {
            let _ = writeln!(ontology, "is_a: {} ! concept {p}", cid(p));
        }
    }

    let mut annotations = String::with_capacity(doc_count * 64);
    annotations.push_str("# doc_id\tconcept_id\ttitle\n");
    if concept_count > 0 {
        for d in 0..doc_count {
            let k = rng.random_range(MIN_ANNOTATION..=MAX_ANNOTATION).min(concept_count);
            let mut picks = sample(&mut rng, concept_count, k).into_vec();
            picks.sort_unstable();
            for (j, c) in picks.into_iter().enumerate() {
                let _ = write!(annotations, "D{d:0dw$}\t{}", cid(c));
                if j == 0 {
                    let _ = write!(annotations, "\tdocument {d}");
                }
                annotations.push('\n');
            }
        }
    }
    Synthetic { ontology, annotations }
}

fn width(count: usize) -> usize {
    count.saturating_sub(1).to_string().len()
}
