//! Formal concept analysis classifiers and outlier scorers whose feature-set
//! "agenda" is learned.
//!
//! A many-valued table is scaled into a binary [`FormalContext`]. Base
//! learners (JSM hypotheses, closure-size and concept-count outlier degrees)
//! run on the concept lattices induced by a basis of feature subsets, and a
//! gradient-descent loop learns one real weight per basis lattice. The weights
//! give both predictions and an importance measure over feature sets.

pub mod agenda;
pub mod bitset;
pub mod cli;
pub mod context;
pub mod decimal;
pub mod error;
pub mod lattice;
pub mod learners;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod scaling;
pub mod trainer;

pub use agenda::{AgendaWeights, MassFunction};
pub use bitset::BitSet;
pub use context::{FeatureSet, FormalContext, ObjectSet};
pub use error::{Error, Result};
pub use lattice::{Concept, ConceptLattice};
pub use learners::{JsmMode, JsmVerdict, LabeledSplit, LearnerKind, MembershipVector};
pub use model::TrainedModel;
pub use scaling::{AttributeGroups, ManyValuedContext, ScalingSpec};
pub use trainer::{Ensemble, Prediction, TrainingConfig};
