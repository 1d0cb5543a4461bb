//! Per-lattice base learners: JSM hypothesis classification and two
//! lattice-based outlier degrees.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::{FeatureSet, FormalContext, ObjectSet};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_concepts_capped, ConceptLattice};

/// Positive, negative and unlabeled objects of one binary target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledSplit {
    positives: ObjectSet,
    negatives: ObjectSet,
    unlabeled: ObjectSet,
}

impl LabeledSplit {
    /// Objects in neither set are unlabeled.
    pub fn new(positives: ObjectSet, negatives: ObjectSet) -> Result<Self> {
        if positives.universe() != negatives.universe() {
            return Err(Error::InvalidConfig("split sets over different universes".into()));
        }
        if !positives.is_disjoint(&negatives) {
            return Err(Error::InvalidConfig("positive and negative examples overlap".into()));
        }
        let mut unlabeled = BitSet::full(positives.universe());
        unlabeled.difference_with(&positives);
        unlabeled.difference_with(&negatives);
        Ok(LabeledSplit {
            positives,
            negatives,
            unlabeled,
        })
    }

    /// One-vs-rest split for class `k` from optional per-object labels.
    pub fn one_vs_rest(labels: &[Option<usize>], k: usize) -> Self {
        let n = labels.len();
        let positives = BitSet::from_indices(n, (0..n).filter(|&o| labels[o] == Some(k)));
        let negatives = BitSet::from_indices(n, (0..n).filter(|&o| matches!(labels[o], Some(c) if c != k)));
        LabeledSplit::new(positives, negatives).expect("one-vs-rest sets are disjoint")
    }

    pub fn positives(&self) -> &ObjectSet {
        &self.positives
    }

    pub fn negatives(&self) -> &ObjectSet {
        &self.negatives
    }

    pub fn unlabeled(&self) -> &ObjectSet {
        &self.unlabeled
    }

    /// The same split with the roles of the two classes exchanged.
    pub fn swapped(&self) -> Self {
        LabeledSplit {
            positives: self.negatives.clone(),
            negatives: self.positives.clone(),
            unlabeled: self.unlabeled.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JsmMode {
    /// Closed `H` with non-empty extent avoiding every counter-example.
    #[default]
    Strict,
    /// Closed `H` whose extent meets the examples and avoids every
    /// counter-example.
    Classic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JsmVerdict {
    Positive,
    Negative,
    Undetermined,
    Conflict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsmOutcome {
    pub verdict: JsmVerdict,
    pub positive_witnesses: Vec<FeatureSet>,
    pub negative_witnesses: Vec<FeatureSet>,
}

/// Per-class membership values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipVector(pub Vec<f64>);

impl MembershipVector {
    pub const ABSTAIN: f64 = 0.5;

    pub fn abstention(classes: usize) -> Self {
        MembershipVector(vec![Self::ABSTAIN; classes])
    }

    pub fn is_abstention(&self) -> bool {
        self.0.iter().all(|&v| v == Self::ABSTAIN)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

fn hypotheses(lattice: &ConceptLattice, split: &LabeledSplit, mode: JsmMode) -> Vec<FeatureSet> {
    lattice
        .concepts()
        .iter()
        .filter(|c| {
            !c.extent.is_empty()
                && c.extent.is_disjoint(split.negatives())
                && (mode == JsmMode::Strict || !c.extent.is_disjoint(split.positives()))
        })
        .map(|c| c.intent.clone())
        .collect()
}

/// Intents of the lattice that qualify as positive hypotheses.
pub fn positive_hypotheses(lattice: &ConceptLattice, split: &LabeledSplit, mode: JsmMode) -> Vec<FeatureSet> {
    hypotheses(lattice, split, mode)
}

pub fn negative_hypotheses(lattice: &ConceptLattice, split: &LabeledSplit, mode: JsmMode) -> Vec<FeatureSet> {
    hypotheses(lattice, &split.swapped(), mode)
}

/// Brings a query intent into the lattice's feature universe. Parent-context
/// intents are restricted to the lattice's agenda.
pub fn query_in_lattice(lattice: &ConceptLattice, query: &FeatureSet) -> FeatureSet {
    match lattice.agenda() {
        Some(agenda) if query.universe() == agenda.universe() => FormalContext::restrict_to_agenda(query, agenda),
        _ => {
            assert_eq!(
                query.universe(),
                lattice.context().num_features(),
                "query intent over a foreign feature universe"
            );
            query.clone()
        }
    }
}

fn verdict_of(pos: bool, neg: bool) -> JsmVerdict {
    match (pos, neg) {
        (true, false) => JsmVerdict::Positive,
        (false, true) => JsmVerdict::Negative,
        (true, true) => JsmVerdict::Conflict,
        (false, false) => JsmVerdict::Undetermined,
    }
}

fn verdict_membership(verdict: JsmVerdict) -> f64 {
    match verdict {
        JsmVerdict::Positive => 1.0,
        JsmVerdict::Negative => 0.0,
        JsmVerdict::Undetermined | JsmVerdict::Conflict => MembershipVector::ABSTAIN,
    }
}

/// Binary JSM decision for a query intent. The membership vector is
/// `(positive, negative)`.
pub fn classify_jsm(
    lattice: &ConceptLattice,
    split: &LabeledSplit,
    query_intent: &FeatureSet,
    mode: JsmMode,
) -> (JsmOutcome, MembershipVector) {
    let q = query_in_lattice(lattice, query_intent);
    let contained = |hs: Vec<FeatureSet>| -> Vec<FeatureSet> { hs.into_iter().filter(|h| h.is_subset(&q)).collect() };
    let positive_witnesses = contained(positive_hypotheses(lattice, split, mode));
    let negative_witnesses = contained(negative_hypotheses(lattice, split, mode));
    let verdict = verdict_of(!positive_witnesses.is_empty(), !negative_witnesses.is_empty());
    let p = verdict_membership(verdict);
    let membership = MembershipVector(vec![p, 1.0 - p]);
    (
        JsmOutcome {
            verdict,
            positive_witnesses,
            negative_witnesses,
        },
        membership,
    )
}

/// `1 - |Cl({a})| / |A|`.
pub fn closure_outlier_degree(ctx: &FormalContext, object: usize) -> f64 {
    let single = BitSet::from_indices(ctx.num_objects(), [object]);
    let closure = ctx.closure_objects(&single);
    1.0 - closure.count() as f64 / ctx.num_objects() as f64
}

/// Closure degree of an arbitrary intent: the objects sharing all of its
/// features play the role of the closure. For an object of the context this
/// equals [`closure_outlier_degree`].
pub fn closure_degree_of_intent(ctx: &FormalContext, intent: &FeatureSet) -> f64 {
    if ctx.num_objects() == 0 {
        return 1.0;
    }
    1.0 - ctx.derive_extent(intent).count() as f64 / ctx.num_objects() as f64
}

/// Number of concepts `(G, Y)` with `B ⊆ G` or `B' ⊆ Y`.
pub fn sugiyama_q(lattice: &ConceptLattice, objects: &ObjectSet) -> usize {
    let intent = lattice.context().derive_intent(objects);
    lattice
        .concepts()
        .iter()
        .filter(|c| objects.is_subset(&c.extent) || intent.is_subset(&c.intent))
        .count()
}

/// The same count for a single object given only by its intent `q`:
/// concepts with `Y ⊆ q` or `q ⊆ Y`.
pub fn sugiyama_q_of_intent(lattice: &ConceptLattice, intent: &FeatureSet) -> usize {
    lattice
        .concepts()
        .iter()
        .filter(|c| c.intent.is_subset(intent) || intent.is_subset(&c.intent))
        .count()
}

/// `1 - q({a}) / |L|`.
pub fn sugiyama_outlier_degree(lattice: &ConceptLattice, object: usize) -> f64 {
    let single = BitSet::from_indices(lattice.context().num_objects(), [object]);
    1.0 - sugiyama_q(lattice, &single) as f64 / lattice.len() as f64
}

pub fn sugiyama_degree_of_intent(lattice: &ConceptLattice, intent: &FeatureSet) -> f64 {
    1.0 - sugiyama_q_of_intent(lattice, intent) as f64 / lattice.len() as f64
}

/// Which base learner runs on every basis lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LearnerKind {
    #[serde(rename = "jsm-strict")]
    JsmStrict,
    #[serde(rename = "jsm-classic")]
    JsmClassic,
    #[serde(rename = "closure")]
    Closure,
    #[serde(rename = "sugiyama")]
    Sugiyama,
}

impl LearnerKind {
    pub fn id(self) -> &'static str {
        match self {
            LearnerKind::JsmStrict => "jsm-strict",
            LearnerKind::JsmClassic => "jsm-classic",
            LearnerKind::Closure => "closure",
            LearnerKind::Sugiyama => "sugiyama",
        }
    }

    pub fn parse(id: &str) -> Option<Self> {
        [
            LearnerKind::JsmStrict,
            LearnerKind::JsmClassic,
            LearnerKind::Closure,
            LearnerKind::Sugiyama,
        ]
        .into_iter()
        .find(|k| k.id() == id)
    }

    pub fn is_classifier(self) -> bool {
        matches!(self, LearnerKind::JsmStrict | LearnerKind::JsmClassic)
    }

    pub fn jsm_mode(self) -> Option<JsmMode> {
        match self {
            LearnerKind::JsmStrict => Some(JsmMode::Strict),
            LearnerKind::JsmClassic => Some(JsmMode::Classic),
            _ => None,
        }
    }
}

/// Per-concept class summary used for fast one-vs-rest JSM queries.
#[derive(Clone, Debug)]
struct ConceptClasses {
    intent: FeatureSet,
    /// Bit `k` set when the extent holds a labeled object of class `k`.
    classes: BitSet,
}

/// A base learner fitted on one lattice, answering membership queries for
/// intents over the parent feature universe.
#[derive(Clone, Debug)]
pub struct FittedLearner {
    kind: LearnerKind,
    classes: usize,
    lattice: ConceptLattice,
    summaries: Vec<ConceptClasses>,
}

impl FittedLearner {
    /// Fits a learner on `ctx` (already restricted to the agenda when
    /// `agenda` is given). `labels` are class indices; `None` is unlabeled.
    pub fn fit(
        kind: LearnerKind,
        ctx: &FormalContext,
        agenda: Option<&FeatureSet>,
        labels: &[Option<usize>],
        classes: usize,
        cap: usize,
    ) -> Result<Self> {
        let mut lattice = enumerate_concepts_capped(ctx, cap)?;
        if let Some(a) = agenda {
            lattice = lattice.with_agenda(a.clone());
        }
        let summaries = if kind.is_classifier() {
            lattice
                .concepts()
                .iter()
                .filter(|c| !c.extent.is_empty())
                .map(|c| ConceptClasses {
                    intent: c.intent.clone(),
                    classes: BitSet::from_indices(classes, c.extent.iter().filter_map(|o| labels[o])),
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(FittedLearner {
            kind,
            classes,
            lattice,
            summaries,
        })
    }

    pub fn lattice(&self) -> &ConceptLattice {
        &self.lattice
    }

    pub fn kind(&self) -> LearnerKind {
        self.kind
    }

    /// Number of output channels: classes for JSM, one for outlier scorers.
    pub fn outputs(&self) -> usize {
        if self.kind.is_classifier() {
            self.classes
        } else {
            1
        }
    }

    /// Membership (or outlier degree) of an object with the given intent.
    pub fn evaluate(&self, query: &FeatureSet) -> MembershipVector {
        let q = query_in_lattice(&self.lattice, query);
        match self.kind {
            LearnerKind::Closure => MembershipVector(vec![closure_degree_of_intent(self.lattice.context(), &q)]),
            LearnerKind::Sugiyama => MembershipVector(vec![sugiyama_degree_of_intent(&self.lattice, &q)]),
            LearnerKind::JsmStrict | LearnerKind::JsmClassic => {
                let classic = self.kind == LearnerKind::JsmClassic;
                let inside: Vec<&ConceptClasses> = self.summaries.iter().filter(|s| s.intent.is_subset(&q)).collect();
                let values = (0..self.classes)
                    .map(|k| {
                        let pos = inside
                            .iter()
                            .any(|s| s.classes.iter().all(|c| c == k) && (!classic || s.classes.contains(k)));
                        let neg = inside
                            .iter()
                            .any(|s| !s.classes.contains(k) && (!classic || !s.classes.is_empty()));
                        verdict_membership(verdict_of(pos, neg))
                    })
                    .collect();
                MembershipVector(values)
            }
        }
    }
}
