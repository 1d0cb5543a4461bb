//! Concept enumeration and the concept order.

use crate::context::{FeatureSet, FormalContext, ObjectSet};
use crate::error::{Error, Result};

/// Default upper bound on the number of concepts enumerated for one context.
pub const DEFAULT_CONCEPT_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Concept {
    pub extent: ObjectSet,
    pub intent: FeatureSet,
}

impl Concept {
    /// Subconcept order: `self <= other` iff `self`'s extent is contained in
    /// `other`'s.
    pub fn leq(&self, other: &Concept) -> bool {
        self.extent.is_subset(&other.extent)
    }
}

pub fn concept_leq(c: &Concept, d: &Concept) -> bool {
    c.leq(d)
}

/// Both fixed-point conditions of a formal concept.
pub fn is_concept(ctx: &FormalContext, extent: &ObjectSet, intent: &FeatureSet) -> bool {
    ctx.derive_intent(extent) == *intent && ctx.derive_extent(intent) == *extent
}

/// All concepts of a context, sorted lexicographically by extent.
#[derive(Clone, Debug)]
pub struct ConceptLattice {
    context: FormalContext,
    concepts: Vec<Concept>,
    agenda: Option<FeatureSet>,
}

impl ConceptLattice {
    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// The parent-context feature set that induced this lattice, if any.
    pub fn agenda(&self) -> Option<&FeatureSet> {
        self.agenda.as_ref()
    }

    pub fn with_agenda(mut self, agenda: FeatureSet) -> Self {
        self.agenda = Some(agenda);
        self
    }

    /// The concept whose extent is every object.
    pub fn top(&self) -> &Concept {
        self.concepts
            .iter()
            .find(|c| c.extent.is_full())
            .expect("a lattice always contains its top concept")
    }

    /// The concept whose intent is the closure of every feature.
    pub fn bottom(&self) -> &Concept {
        let bottom_extent = self.context.derive_extent(&self.context.all_features());
        self.concepts
            .iter()
            .find(|c| c.extent == bottom_extent)
            .expect("a lattice always contains its bottom concept")
    }

    /// Meet of two concepts: intersect the extents and close.
    pub fn meet(&self, c: &Concept, d: &Concept) -> Concept {
        let extent = c.extent.intersection(&d.extent);
        let intent = self.context.derive_intent(&extent);
        Concept { extent, intent }
    }

    /// Replaces the stored concept order. Results of every query are
    /// independent of it; exposed for order-invariance checks.
    pub fn reordered(mut self, permutation: &[usize]) -> Self {
        assert_eq!(permutation.len(), self.concepts.len());
        self.concepts = permutation.iter().map(|&i| self.concepts[i].clone()).collect();
        self
    }
}

/// Enumerates every concept with the default concept cap.
pub fn enumerate_concepts(ctx: &FormalContext) -> Result<ConceptLattice> {
    enumerate_concepts_capped(ctx, DEFAULT_CONCEPT_CAP)
}

/// Close-by-One over object sets.
///
/// Each concept is generated exactly once: from extent `B` with last added
/// object below `i`, the closure of `B + i` is accepted only if it adds no
/// object below `i`.
pub fn enumerate_concepts_capped(ctx: &FormalContext, cap: usize) -> Result<ConceptLattice> {
    let n = ctx.num_objects();
    let mut concepts = Vec::new();

    let intent = ctx.all_features();
    let extent = ctx.derive_extent(&intent);
    let intent = ctx.derive_intent(&extent);

    let mut stack = vec![(extent, intent, 0usize)];
    while let Some((extent, intent, start)) = stack.pop() {
        if concepts.len() >= cap {
            return Err(Error::ConceptCapExceeded {
                cap,
                found: concepts.len(),
            });
        }
        // Children pushed in reverse so the DFS visits them in ascending order.
        let mut children = Vec::new();
        for i in start..n {
            if extent.contains(i) {
                continue;
            }
            let mut child_intent = intent.clone();
            child_intent.intersect_with(ctx.row(i));
            let child_extent = ctx.derive_extent(&child_intent);
            if child_extent.agrees_below(&extent, i) {
                children.push((child_extent, child_intent, i + 1));
            }
        }
        concepts.push(Concept { extent, intent });
        stack.extend(children.into_iter().rev());
    }

    concepts.sort_by(|a, b| a.extent.cmp(&b.extent));
    Ok(ConceptLattice {
        context: ctx.clone(),
        concepts,
        agenda: None,
    })
}

/// Lattice of the subcontext induced by `agenda`, tagged with the agenda.
pub fn agenda_lattice(ctx: &FormalContext, agenda: &FeatureSet, cap: usize) -> Result<ConceptLattice> {
    let sub = ctx.induce_subcontext(agenda);
    Ok(enumerate_concepts_capped(&sub, cap)?.with_agenda(agenda.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::BitSet;

    fn identity2() -> FormalContext {
        FormalContext::new(
            vec!["a1".into(), "a2".into()],
            vec!["x1".into(), "x2".into()],
            [(0, 0), (1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn single_cell_context_has_one_concept() {
        let c = FormalContext::new(vec!["a".into()], vec!["x".into()], [(0, 0)]).unwrap();
        let l = enumerate_concepts(&c).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.concepts()[0].extent.to_vec(), vec![0]);
        assert_eq!(l.concepts()[0].intent.to_vec(), vec![0]);
    }

    #[test]
    fn identity_relation_has_four_concepts() {
        let l = enumerate_concepts(&identity2()).unwrap();
        let extents: Vec<Vec<usize>> = l.concepts().iter().map(|c| c.extent.to_vec()).collect();
        assert_eq!(extents, vec![vec![], vec![0], vec![0, 1], vec![1]]);
        assert_eq!(l.top().intent.to_vec(), Vec::<usize>::new());
        assert_eq!(l.bottom().intent.to_vec(), vec![0, 1]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_concepts_capped(&identity2(), 2).unwrap_err();
        assert!(matches!(err, Error::ConceptCapExceeded { cap: 2, found: 2 }));
    }

    #[test]
    fn order_is_reflexive_and_bottom_below_top() {
        let l = enumerate_concepts(&identity2()).unwrap();
        for c in l.concepts() {
            assert!(concept_leq(c, c));
        }
        assert!(concept_leq(l.bottom(), l.top()));
    }

    #[test]
    fn is_concept_rejects_non_closed_extent() {
        let c = FormalContext::new(vec!["a".into(), "b".into()], vec!["x".into()], [(0, 0), (1, 0)]).unwrap();
        let ext = BitSet::from_indices(2, [0]);
        let int = c.derive_intent(&ext);
        assert!(!is_concept(&c, &ext, &int));
        assert!(is_concept(&c, &c.all_objects(), &int));
    }

    #[test]
    fn empty_agenda_gives_single_concept() {
        let l = agenda_lattice(&identity2(), &BitSet::empty(2), DEFAULT_CONCEPT_CAP).unwrap();
        assert_eq!(l.len(), 1);
        assert!(l.concepts()[0].extent.is_full());
        assert!(l.concepts()[0].intent.is_empty());
    }
}
