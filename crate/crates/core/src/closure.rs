//! Reflexive transitive closure of the is-a relation.
//!
//! Every concept gets two dense bit rows keyed by ordinal: its hyponyms
//! (descendants, itself included) and its ancestors (itself included).

use fixedbitset::FixedBitSet;

use crate::ontology::{ConceptId, OntologyGraph};
use crate::UnknownConcept;

#[derive(Clone, Debug)]
pub struct ClosureIndex {
    ids: Vec<ConceptId>,
    hypo: Vec<FixedBitSet>,
    anc: Vec<FixedBitSet>,
    hypo_len: Vec<u32>,
    anc_len: Vec<u32>,
}

impl ClosureIndex {
    pub fn build(graph: &OntologyGraph) -> Self {
        let n = graph.len();
        let order = graph
            .topological_order()
            .expect("OntologyGraph is acyclic by construction");
        let mut hypo = vec![FixedBitSet::with_capacity(n); n];
        let mut anc = vec![FixedBitSet::with_capacity(n); n];

        // Parents come first in `order`: ancestors flow forward, hyponyms
        // flow backward.
        for &node in &order {
            let node = node as usize;
            let mut row = std::mem::replace(&mut anc[node], FixedBitSet::new());
            row.insert(node);
            for &p in graph.parents(node as u32) {
                row.union_with(&anc[p as usize]);
            }
            anc[node] = row;
        }
        for &node in order.iter().rev() {
            let node = node as usize;
            let mut row = std::mem::replace(&mut hypo[node], FixedBitSet::new());
            row.insert(node);
            for &c in graph.children(node as u32) {
                row.union_with(&hypo[c as usize]);
            }
            hypo[node] = row;
        }

        let hypo_len = hypo.iter().map(|s| s.count_ones(..) as u32).collect();
        let anc_len = anc.iter().map(|s| s.count_ones(..) as u32).collect();
        Self {
            ids: graph.concepts().iter().map(|c| c.id.clone()).collect(),
            hypo,
            anc,
            hypo_len,
            anc_len,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Ordinals follow lexicographic id order.
    pub fn ordinal(&self, id: &str) -> Result<u32, UnknownConcept> {
        self.ids
            .binary_search_by(|probe| probe.as_str().cmp(id))
            .map(|i| i as u32)
            .map_err(|_| UnknownConcept(id.to_owned()))
    }

    pub fn id(&self, ordinal: u32) -> &ConceptId {
        &self.ids[ordinal as usize]
    }

    pub fn hypo(&self, ordinal: u32) -> &FixedBitSet {
        &self.hypo[ordinal as usize]
    }

    pub fn anc(&self, ordinal: u32) -> &FixedBitSet {
        &self.anc[ordinal as usize]
    }

    pub fn hypo_count(&self, ordinal: u32) -> u32 {
        self.hypo_len[ordinal as usize]
    }

    pub fn anc_count(&self, ordinal: u32) -> u32 {
        self.anc_len[ordinal as usize]
    }

    /// `descendant ∈ hypo(ancestor)`.
    #[inline]
    pub fn subsumes(&self, ancestor: u32, descendant: u32) -> bool {
        self.hypo[ancestor as usize].contains(descendant as usize)
    }

    /// True iff `c1` is a (reflexive) hyponym of `c2`.
    pub fn is_hyponym(&self, c1: &str, c2: &str) -> Result<bool, UnknownConcept> {
        Ok(self.subsumes(self.ordinal(c2)?, self.ordinal(c1)?))
    }

    pub fn common_ancestor_set(&self, a: u32, b: u32) -> FixedBitSet {
        let mut set = self.anc[a as usize].clone();
        set.intersect_with(&self.anc[b as usize]);
        set
    }

    /// `anc(c1) ∩ anc(c2)`, sorted by id.
    pub fn common_ancestors(&self, c1: &str, c2: &str) -> Result<Vec<ConceptId>, UnknownConcept> {
        let set = self.common_ancestor_set(self.ordinal(c1)?, self.ordinal(c2)?);
        Ok(set.ones().map(|i| self.ids[i].clone()).collect())
    }

    /// Ids of a bit row, in ordinal order.
    pub fn ids_of<'a>(&'a self, set: &'a FixedBitSet) -> impl Iterator<Item = &'a ConceptId> + 'a {
        set.ones().map(move |i| &self.ids[i])
    }
}
