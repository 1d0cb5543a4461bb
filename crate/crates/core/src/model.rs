//! Trained models and their canonical JSON persistence.
//!
//! The file stores the scaling spec, the scaled training context, the basis
//! agendas (as sorted feature-name lists) and the learned weights. Lattices
//! are derived data and are recomputed on load.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agenda::AgendaWeights;
use crate::bitset::BitSet;
use crate::context::{FeatureSet, FormalContext};
use crate::decimal;
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::scaling::{scale_object, ScalingSpec};
use crate::trainer::{Ensemble, LossKind, Prediction, Task, TrainingMetadata, TrainingOutputs};

pub const FORMAT_VERSION: u32 = 1;

/// A scaling spec plus a trained ensemble: everything needed to score raw
/// objects.
#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub spec: ScalingSpec,
    pub ensemble: Ensemble,
    /// Name of the label column in the training table, if known.
    pub label_column: Option<String>,
}

impl TrainedModel {
    pub fn new(spec: ScalingSpec, ensemble: Ensemble) -> Result<Self> {
        if spec.feature_names() != ensemble.context().features() {
            return Err(Error::ModelFormat(
                "scaling spec does not produce the context's features".into(),
            ));
        }
        Ok(TrainedModel {
            spec,
            ensemble,
            label_column: None,
        })
    }

    pub fn with_label_column(mut self, name: impl Into<String>) -> Self {
        self.label_column = Some(name.into());
        self
    }

    pub fn predict(&self, raw_object: &HashMap<String, String>) -> Result<Prediction> {
        let intent = scale_object(&self.spec, raw_object)?;
        self.ensemble.predict_intent(&intent)
    }

    pub fn score_outlier(&self, raw_object: &HashMap<String, String>) -> Result<f64> {
        let intent = scale_object(&self.spec, raw_object)?;
        self.ensemble.score_intent(&intent)
    }

    /// Feature names of an agenda in sorted order.
    pub fn agenda_names(&self, agenda: &FeatureSet) -> Vec<String> {
        agenda_names(self.ensemble.context().features(), agenda)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile::from_model(self);
        let value = serde_json::to_value(&file)?;
        let mut text = serde_json::to_string_pretty(&value)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::ModelFormat("missing format_version".into()))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(Error::ModelFormat(format!(
                "unsupported format version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let file: ModelFile = serde_json::from_value(value)?;
        file.into_model()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    model.save(path)
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    TrainedModel::load(path)
}

pub fn predict(model: &TrainedModel, raw_object: &HashMap<String, String>) -> Result<Prediction> {
    model.predict(raw_object)
}

pub fn score_outlier(model: &TrainedModel, raw_object: &HashMap<String, String>) -> Result<f64> {
    model.score_outlier(raw_object)
}

pub fn agenda_names(features: &[String], agenda: &FeatureSet) -> Vec<String> {
    let mut names: Vec<String> = agenda.iter().map(|f| features[f].clone()).collect();
    names.sort();
    names
}

#[derive(Serialize, Deserialize)]
struct TrainingData {
    objects: Vec<String>,
    rows: Vec<Vec<usize>>,
    labels: Vec<Option<usize>>,
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    seed: u64,
    epochs: usize,
    #[serde(with = "decimal")]
    learning_rate: f64,
    loss: LossKind,
    #[serde(with = "decimal")]
    delta: f64,
    training_outputs: TrainingOutputs,
    #[serde(with = "decimal::vec")]
    loss_curve: Vec<f64>,
    #[serde(with = "decimal")]
    final_loss: f64,
    skipped_steps: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format_version: u32,
    task: Task,
    learner: LearnerKind,
    scaling: ScalingSpec,
    features: Vec<String>,
    groups: Vec<(String, usize, usize)>,
    classes: Vec<String>,
    basis: Vec<Vec<String>>,
    #[serde(with = "decimal::vec")]
    weights: Vec<f64>,
    training: TrainingData,
    metadata: Metadata,
    concept_cap: usize,
    label_column: Option<String>,
}

impl ModelFile {
    fn from_model(model: &TrainedModel) -> Self {
        let e = &model.ensemble;
        let ctx = e.context();
        let m = &e.metadata;
        ModelFile {
            format_version: FORMAT_VERSION,
            task: e.task(),
            learner: e.learner(),
            scaling: model.spec.clone(),
            features: ctx.features().to_vec(),
            groups: model
                .spec
                .groups()
                .blocks()
                .iter()
                .map(|(n, r)| (n.clone(), r.start, r.end))
                .collect(),
            classes: e.classes().to_vec(),
            basis: e.weights().basis().iter().map(|a| model.agenda_names(a)).collect(),
            weights: e.weights().weights().to_vec(),
            training: TrainingData {
                objects: ctx.objects().to_vec(),
                rows: (0..ctx.num_objects()).map(|o| ctx.row(o).to_vec()).collect(),
                labels: e.labels().to_vec(),
            },
            metadata: Metadata {
                seed: m.seed,
                epochs: m.epochs,
                learning_rate: m.learning_rate,
                loss: m.loss,
                delta: m.delta,
                training_outputs: m.outputs,
                loss_curve: m.loss_curve.clone(),
                final_loss: m.final_loss,
                skipped_steps: m.skipped_steps,
            },
            concept_cap: e.concept_cap(),
            label_column: model.label_column.clone(),
        }
    }

    fn into_model(self) -> Result<TrainedModel> {
        if (self.task == Task::Classify) != self.learner.is_classifier() {
            return Err(Error::ModelFormat(format!(
                "learner `{}` does not fit the {:?} task",
                self.learner.id(),
                self.task
            )));
        }
        self.scaling.validate()?;
        if self.scaling.feature_names() != self.features {
            return Err(Error::ModelFormat(
                "feature names disagree with the scaling spec".into(),
            ));
        }
        let groups: Vec<(String, usize, usize)> = self
            .scaling
            .groups()
            .blocks()
            .iter()
            .map(|(n, r)| (n.clone(), r.start, r.end))
            .collect();
        if groups != self.groups {
            return Err(Error::ModelFormat(
                "attribute groups disagree with the scaling spec".into(),
            ));
        }
        let m = self.features.len();
        let index: HashMap<&str, usize> = self.features.iter().enumerate().map(|(i, f)| (f.as_str(), i)).collect();
        let basis: Vec<FeatureSet> = self
            .basis
            .iter()
            .map(|names| {
                let mut set = BitSet::empty(m);
                for n in names {
                    let f = index.get(n.as_str()).ok_or_else(|| Error::UnknownFeature(n.clone()))?;
                    set.insert(*f);
                }
                Ok(set)
            })
            .collect::<Result<_>>()?;
        let weights = AgendaWeights::new(basis, self.weights)?;

        let t = self.training;
        if t.rows.len() != t.objects.len() || t.labels.len() != t.objects.len() {
            return Err(Error::ModelFormat(
                "training rows, labels and objects differ in length".into(),
            ));
        }
        if t.rows.iter().flatten().any(|&f| f >= m) {
            return Err(Error::ModelFormat("training row references an unknown feature".into()));
        }
        if t.labels.iter().flatten().any(|&c| c >= self.classes.len()) {
            return Err(Error::ModelFormat("training label references an unknown class".into()));
        }
        let rows = t.rows.into_iter().map(|r| BitSet::from_indices(m, r)).collect();
        let context = FormalContext::from_rows(t.objects, self.features, rows)?;

        let md = self.metadata;
        let metadata = TrainingMetadata {
            seed: md.seed,
            epochs: md.epochs,
            learning_rate: md.learning_rate,
            loss: md.loss,
            delta: md.delta,
            outputs: md.training_outputs,
            loss_curve: md.loss_curve,
            final_loss: md.final_loss,
            skipped_steps: md.skipped_steps,
        };
        if metadata.delta.is_nan() || metadata.delta <= 0.0 {
            return Err(Error::ModelFormat("denominator guard must be positive".into()));
        }
        let ensemble = Ensemble::from_parts(
            context,
            t.labels,
            self.classes,
            self.task,
            self.learner,
            weights,
            metadata,
            self.concept_cap,
        )?;
        let mut model = TrainedModel::new(self.scaling, ensemble)?;
        model.label_column = self.label_column;
        Ok(model)
    }
}
