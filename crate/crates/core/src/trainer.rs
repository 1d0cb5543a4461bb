//! Weighted ensembles over basis lattices and the gradient-descent loop that
//! learns their weights.
//!
//! For weights `w` over the basis lattices `L_1..L_n` and per-lattice outputs
//! `alg_k(a, L_i)`, the ensemble output is
//!
//! ```text
//! out_k(a, w) = sum_i w_i * alg_k(a, L_i) / sum_i w_i
//! ```
//!
//! which is invariant under rescaling `w` by any non-zero constant. Training
//! runs full-batch gradient descent on this output; after every step the
//! weights are rescaled to unit L1 norm with a positive sum, which changes no
//! prediction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agenda::AgendaWeights;
use crate::context::{FeatureSet, FormalContext};
use crate::error::{Error, Result};
use crate::lattice::DEFAULT_CONCEPT_CAP;
use crate::learners::{FittedLearner, LearnerKind, MembershipVector};

/// Clamp applied to outputs before taking logarithms.
pub const CE_EPS: f64 = 1e-7;
/// Learning-rate halvings tried when a step violates the denominator guard.
pub const MAX_HALVINGS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LossKind {
    #[default]
    #[serde(rename = "mse")]
    Mse,
    #[serde(rename = "cross-entropy")]
    CrossEntropy,
}

/// How the base learners score the training objects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TrainingOutputs {
    /// Each labeled object is scored by lattices built without it. Applies
    /// to the JSM classifiers; outlier scorers ignore labels and always use
    /// the full lattice.
    #[default]
    #[serde(rename = "leave-one-out")]
    LeaveOneOut,
    /// Each object is scored by the lattice that contains it.
    #[serde(rename = "resubstitution")]
    Resubstitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classify,
    Outlier,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub loss: LossKind,
    /// Smallest admissible `|sum w|`.
    pub delta: f64,
    /// Initial weights are drawn from `[-init_range, init_range]`.
    pub init_range: f64,
    pub outputs: TrainingOutputs,
    pub concept_cap: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            epochs: 500,
            learning_rate: 0.1,
            seed: 42,
            loss: LossKind::Mse,
            delta: 1e-3,
            init_range: 0.5,
            outputs: TrainingOutputs::LeaveOneOut,
            concept_cap: DEFAULT_CONCEPT_CAP,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be positive".into()));
        }
        if self.delta.is_nan() || self.delta <= 0.0 {
            return Err(Error::InvalidConfig("denominator guard must be positive".into()));
        }
        if !(self.init_range > 0.0 && self.init_range.is_finite()) {
            return Err(Error::InvalidConfig("init range must be positive".into()));
        }
        Ok(())
    }
}

/// Ensemble output for one object.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub memberships: Vec<f64>,
    /// Highest membership, lowest index on ties; `None` when every basis
    /// lattice abstained.
    pub decided: Option<usize>,
}

impl Prediction {
    pub fn is_undecided(&self) -> bool {
        self.decided.is_none()
    }
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn guarded_sum(weights: &[f64], delta: f64) -> Result<f64> {
    let sum: f64 = weights.iter().sum();
    if sum.is_nan() || sum.abs() < delta {
        return Err(Error::DenominatorGuard { sum, delta });
    }
    Ok(sum)
}

/// Weighted average of per-lattice outputs, normalized by the plain sum of
/// the weights. With mixed signs the result can leave `[0, 1]`; it is
/// unchanged by any nonzero rescaling of `weights`.
pub fn ensemble_output(weights: &[f64], outputs: &[MembershipVector], delta: f64) -> Result<Prediction> {
    if weights.is_empty() || weights.len() != outputs.len() {
        return Err(Error::InvalidConfig(format!(
            "{} weights for {} lattice outputs",
            weights.len(),
            outputs.len()
        )));
    }
    let sum = guarded_sum(weights, delta)?;
    let k = outputs[0].0.len();
    let mut memberships = vec![0.0; k];
    for (w, out) in weights.iter().zip(outputs) {
        for (m, a) in memberships.iter_mut().zip(&out.0) {
            *m += w * a;
        }
    }
    for m in memberships.iter_mut() {
        *m /= sum;
    }
    let decided = if outputs.iter().all(MembershipVector::is_abstention) {
        None
    } else {
        Some(argmax(&memberships))
    };
    Ok(Prediction { memberships, decided })
}

/// Per-lattice outputs of every training object, `[object][lattice][k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputTable {
    objects: usize,
    lattices: usize,
    channels: usize,
    values: Vec<f64>,
}

impl OutputTable {
    pub fn new(objects: usize, lattices: usize, channels: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), objects * lattices * channels);
        OutputTable {
            objects,
            lattices,
            channels,
            values,
        }
    }

    /// Builds the table from `[lattice][object]` membership vectors.
    pub fn from_columns(columns: &[Vec<MembershipVector>]) -> Self {
        let lattices = columns.len();
        let objects = columns.first().map_or(0, Vec::len);
        let channels = columns.first().and_then(|c| c.first()).map_or(0, |m| m.0.len());
        let mut values = Vec::with_capacity(objects * lattices * channels);
        for a in 0..objects {
            for col in columns {
                values.extend_from_slice(&col[a].0);
            }
        }
        OutputTable::new(objects, lattices, channels, values)
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn lattices(&self) -> usize {
        self.lattices
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn get(&self, object: usize, lattice: usize, k: usize) -> f64 {
        self.values[(object * self.lattices + lattice) * self.channels + k]
    }

    pub fn row(&self, object: usize) -> Vec<MembershipVector> {
        (0..self.lattices)
            .map(|l| MembershipVector((0..self.channels).map(|k| self.get(object, l, k)).collect()))
            .collect()
    }
}

/// Ensemble outputs for every object of the table.
pub fn predictions(weights: &[f64], table: &OutputTable, delta: f64) -> Result<Vec<Vec<f64>>> {
    let sum = guarded_sum(weights, delta)?;
    Ok((0..table.objects)
        .map(|a| {
            (0..table.channels)
                .map(|k| {
                    let num: f64 = weights.iter().enumerate().map(|(l, w)| w * table.get(a, l, k)).sum();
                    num / sum
                })
                .collect()
        })
        .collect())
}

/// Mean loss over all (object, channel) pairs.
pub fn loss_value(predictions: &[Vec<f64>], targets: &[Vec<f64>], kind: LossKind) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (p, y) in predictions.iter().zip(targets) {
        for (&o, &t) in p.iter().zip(y) {
            total += match kind {
                LossKind::Mse => (o - t) * (o - t),
                LossKind::CrossEntropy => {
                    let c = o.clamp(CE_EPS, 1.0 - CE_EPS);
                    -(t * c.ln() + (1.0 - t) * (1.0 - c).ln())
                }
            };
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

fn loss_derivative(o: f64, t: f64, kind: LossKind) -> f64 {
    match kind {
        LossKind::Mse => 2.0 * (o - t),
        LossKind::CrossEntropy => {
            if o <= CE_EPS || o >= 1.0 - CE_EPS {
                0.0
            } else {
                (o - t) / (o * (1.0 - o))
            }
        }
    }
}

/// Analytic gradient of the loss with respect to every basis weight, using
/// `d out_k / d w_i = (alg_k(a, L_i) - out_k) / sum w`.
pub fn grad_weights(
    weights: &[f64],
    table: &OutputTable,
    targets: &[Vec<f64>],
    kind: LossKind,
    delta: f64,
) -> Result<Vec<f64>> {
    let sum = guarded_sum(weights, delta)?;
    let preds = predictions(weights, table, delta)?;
    let n = (table.objects * table.channels).max(1) as f64;
    let mut grad = vec![0.0; weights.len()];
    for a in 0..table.objects {
        for k in 0..table.channels {
            let o = preds[a][k];
            let dl = loss_derivative(o, targets[a][k], kind) / n;
            if dl == 0.0 {
                continue;
            }
            for (l, g) in grad.iter_mut().enumerate() {
                *g += dl * (table.get(a, l, k) - o) / sum;
            }
        }
    }
    Ok(grad)
}

/// Rescales to unit L1 norm with a positive sum.
fn canonical_scale(weights: &mut [f64]) {
    let norm: f64 = weights.iter().map(|w| w.abs()).sum();
    let sum: f64 = weights.iter().sum();
    if norm > 0.0 {
        let c = sum.signum() / norm;
        for w in weights.iter_mut() {
            *w *= c;
        }
    }
}

/// Result of the weight-learning loop.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub weights: Vec<f64>,
    /// Loss before each epoch's update.
    pub loss_curve: Vec<f64>,
    pub final_loss: f64,
    /// Epochs whose step was abandoned after exhausting the halvings.
    pub skipped_steps: usize,
}

/// Initial weights from the seeded generator, resampled until the guard holds.
pub fn initial_weights(n: usize, config: &TrainingConfig) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    loop {
        let mut w: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(-config.init_range..=config.init_range))
            .collect();
        canonical_scale(&mut w);
        if w.iter().sum::<f64>().abs() >= config.delta {
            return w;
        }
    }
}

/// Gradient descent on a fixed output table.
pub fn fit_weights(table: &OutputTable, targets: &[Vec<f64>], config: &TrainingConfig) -> Result<FitResult> {
    config.validate()?;
    if table.lattices == 0 {
        return Err(Error::EmptyBasis);
    }
    if table.objects == 0 {
        return Err(Error::NoLabels);
    }
    let mut w = initial_weights(table.lattices, config);
    let mut loss_curve = Vec::with_capacity(config.epochs);
    let mut skipped_steps = 0;
    for _ in 0..config.epochs {
        let preds = predictions(&w, table, config.delta)?;
        loss_curve.push(loss_value(&preds, targets, config.loss));
        let grad = grad_weights(&w, table, targets, config.loss, config.delta)?;
        let mut eta = config.learning_rate;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let mut cand: Vec<f64> = w.iter().zip(&grad).map(|(w, g)| w - eta * g).collect();
            canonical_scale(&mut cand);
            if cand.iter().all(|c| c.is_finite()) && cand.iter().sum::<f64>().abs() >= config.delta {
                accepted = Some(cand);
                break;
            }
            eta /= 2.0;
        }
        match accepted {
            Some(cand) => w = cand,
            None => skipped_steps += 1,
        }
    }
    let final_loss = loss_value(&predictions(&w, table, config.delta)?, targets, config.loss);
    Ok(FitResult {
        weights: w,
        loss_curve,
        final_loss,
        skipped_steps,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingMetadata {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub loss: LossKind,
    pub delta: f64,
    pub outputs: TrainingOutputs,
    pub loss_curve: Vec<f64>,
    pub final_loss: f64,
    pub skipped_steps: usize,
}

/// Learned weights together with the base learners fitted on every basis
/// lattice of the training context.
#[derive(Clone, Debug)]
pub struct Ensemble {
    context: FormalContext,
    labels: Vec<Option<usize>>,
    classes: Vec<String>,
    task: Task,
    learner: LearnerKind,
    weights: AgendaWeights,
    learners: Vec<FittedLearner>,
    delta: f64,
    concept_cap: usize,
    pub metadata: TrainingMetadata,
}

/// Names the agenda whose lattice blew the concept cap.
fn tag_agenda(ctx: &FormalContext, agenda: &FeatureSet, err: Error) -> Error {
    match err {
        Error::ConceptCapExceeded { cap, found } => Error::AgendaCapExceeded {
            agenda: agenda.iter().map(|f| ctx.features()[f].clone()).collect(),
            cap,
            found,
        },
        other => other,
    }
}

fn fit_basis(
    ctx: &FormalContext,
    basis: &[FeatureSet],
    learner: LearnerKind,
    labels: &[Option<usize>],
    classes: usize,
    cap: usize,
) -> Result<Vec<FittedLearner>> {
    basis
        .par_iter()
        .map(|agenda| {
            let sub = ctx.induce_subcontext(agenda);
            FittedLearner::fit(learner, &sub, Some(agenda), labels, classes, cap)
                .map_err(|e| tag_agenda(ctx, agenda, e))
        })
        .collect()
}

/// Per-lattice outputs of the labeled objects, `[lattice][labeled object]`.
fn training_columns(
    ctx: &FormalContext,
    basis: &[FeatureSet],
    fitted: &[FittedLearner],
    labels: &[Option<usize>],
    classes: usize,
    config: &TrainingConfig,
) -> Result<Vec<Vec<MembershipVector>>> {
    let labeled: Vec<usize> = (0..labels.len()).filter(|&o| labels[o].is_some()).collect();
    basis
        .par_iter()
        .zip(fitted)
        .map(|(agenda, full)| {
            let loo = full.kind().is_classifier() && config.outputs == TrainingOutputs::LeaveOneOut;
            if !loo {
                return Ok(labeled.iter().map(|&a| full.evaluate(ctx.row(a))).collect());
            }
            let sub = ctx.induce_subcontext(agenda);
            labeled
                .iter()
                .map(|&a| {
                    let held_out = sub.without_object(a);
                    let rest: Vec<Option<usize>> = labels
                        .iter()
                        .enumerate()
                        .filter(|&(o, _)| o != a)
                        .map(|(_, l)| *l)
                        .collect();
                    let fitted =
                        FittedLearner::fit(full.kind(), &held_out, Some(agenda), &rest, classes, config.concept_cap)
                            .map_err(|e| tag_agenda(ctx, agenda, e))?;
                    Ok(fitted.evaluate(ctx.row(a)))
                })
                .collect()
        })
        .collect()
}

/// Training table and targets; exposed so tests and tools can inspect the
/// exact inputs of the weight-learning loop.
pub fn training_table(
    ctx: &FormalContext,
    basis: &[FeatureSet],
    learner: LearnerKind,
    labels: &[Option<usize>],
    classes: usize,
    config: &TrainingConfig,
) -> Result<(Vec<FittedLearner>, OutputTable)> {
    let fitted = fit_basis(ctx, basis, learner, labels, classes, config.concept_cap)?;
    let columns = training_columns(ctx, basis, &fitted, labels, classes, config)?;
    Ok((fitted, OutputTable::from_columns(&columns)))
}

fn check_inputs(ctx: &FormalContext, basis: &[FeatureSet], labels: &[Option<usize>]) -> Result<()> {
    if basis.is_empty() {
        return Err(Error::EmptyBasis);
    }
    if labels.len() != ctx.num_objects() {
        return Err(Error::InvalidConfig(format!(
            "{} labels for {} objects",
            labels.len(),
            ctx.num_objects()
        )));
    }
    if labels.iter().all(Option::is_none) {
        return Err(Error::NoLabels);
    }
    if let Some(a) = basis.iter().find(|a| a.universe() != ctx.num_features()) {
        return Err(Error::InvalidConfig(format!(
            "agenda over {} features, context has {}",
            a.universe(),
            ctx.num_features()
        )));
    }
    Ok(())
}

/// Learns agenda weights for a JSM classifier. `labels[o]` is a class index
/// into `classes`; unlabeled objects stay in the lattices but not the loss.
pub fn train(
    ctx: &FormalContext,
    labels: &[Option<usize>],
    classes: Vec<String>,
    basis: &[FeatureSet],
    learner: LearnerKind,
    config: &TrainingConfig,
) -> Result<Ensemble> {
    config.validate()?;
    check_inputs(ctx, basis, labels)?;
    if !learner.is_classifier() {
        return Err(Error::InvalidConfig(format!("`{}` is not a classifier", learner.id())));
    }
    if let Some(bad) = labels.iter().flatten().find(|&&c| c >= classes.len()) {
        return Err(Error::InvalidConfig(format!("label index {bad} without a class name")));
    }
    let (fitted, table) = training_table(ctx, basis, learner, labels, classes.len(), config)?;
    let targets: Vec<Vec<f64>> = labels
        .iter()
        .flatten()
        .map(|&c| (0..classes.len()).map(|k| if k == c { 1.0 } else { 0.0 }).collect())
        .collect();
    let fit = fit_weights(&table, &targets, config)?;
    Ensemble::assemble(
        ctx,
        labels.to_vec(),
        classes,
        Task::Classify,
        learner,
        basis,
        fitted,
        fit,
        config,
    )
}

/// Learns agenda weights for an outlier scorer from 0/1 outlier indicators.
pub fn train_outlier(
    ctx: &FormalContext,
    outlier_labels: &[Option<bool>],
    basis: &[FeatureSet],
    scorer: LearnerKind,
    config: &TrainingConfig,
) -> Result<Ensemble> {
    config.validate()?;
    let labels: Vec<Option<usize>> = outlier_labels.iter().map(|l| l.map(usize::from)).collect();
    check_inputs(ctx, basis, &labels)?;
    if scorer.is_classifier() {
        return Err(Error::InvalidConfig(format!(
            "`{}` is not an outlier scorer",
            scorer.id()
        )));
    }
    let mut config = config.clone();
    config.loss = LossKind::Mse;
    let (fitted, table) = training_table(ctx, basis, scorer, &labels, 2, &config)?;
    let targets: Vec<Vec<f64>> = outlier_labels
        .iter()
        .flatten()
        .map(|&o| vec![if o { 1.0 } else { 0.0 }])
        .collect();
    let fit = fit_weights(&table, &targets, &config)?;
    let classes = vec!["inlier".to_string(), "outlier".to_string()];
    Ensemble::assemble(ctx, labels, classes, Task::Outlier, scorer, basis, fitted, fit, &config)
}

impl Ensemble {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        ctx: &FormalContext,
        labels: Vec<Option<usize>>,
        classes: Vec<String>,
        task: Task,
        learner: LearnerKind,
        basis: &[FeatureSet],
        learners: Vec<FittedLearner>,
        fit: FitResult,
        config: &TrainingConfig,
    ) -> Result<Self> {
        let weights = AgendaWeights::new(basis.to_vec(), fit.weights)?;
        Ok(Ensemble {
            context: ctx.clone(),
            labels,
            classes,
            task,
            learner,
            weights,
            learners,
            delta: config.delta,
            concept_cap: config.concept_cap,
            metadata: TrainingMetadata {
                seed: config.seed,
                epochs: config.epochs,
                learning_rate: config.learning_rate,
                loss: config.loss,
                delta: config.delta,
                outputs: config.outputs,
                loss_curve: fit.loss_curve,
                final_loss: fit.final_loss,
                skipped_steps: fit.skipped_steps,
            },
        })
    }

    /// Rebuilds an ensemble from stored weights, recomputing every basis
    /// lattice from the training context.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        context: FormalContext,
        labels: Vec<Option<usize>>,
        classes: Vec<String>,
        task: Task,
        learner: LearnerKind,
        weights: AgendaWeights,
        metadata: TrainingMetadata,
        concept_cap: usize,
    ) -> Result<Self> {
        check_inputs(&context, weights.basis(), &labels)?;
        guarded_sum(weights.weights(), metadata.delta)?;
        let learners = fit_basis(&context, weights.basis(), learner, &labels, classes.len(), concept_cap)?;
        Ok(Ensemble {
            context,
            labels,
            classes,
            task,
            learner,
            delta: metadata.delta,
            weights,
            learners,
            concept_cap,
            metadata,
        })
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn learner(&self) -> LearnerKind {
        self.learner
    }

    pub fn weights(&self) -> &AgendaWeights {
        &self.weights
    }

    pub fn learners(&self) -> &[FittedLearner] {
        &self.learners
    }

    pub fn concept_cap(&self) -> usize {
        self.concept_cap
    }

    /// Replaces the learned weights; the basis must be unchanged.
    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        let w = AgendaWeights::new(self.weights.basis().to_vec(), weights)?;
        guarded_sum(w.weights(), self.delta)?;
        self.weights = w;
        Ok(self)
    }

    /// Per-lattice outputs for an intent over the training feature universe.
    pub fn lattice_outputs(&self, intent: &FeatureSet) -> Vec<MembershipVector> {
        self.learners.iter().map(|l| l.evaluate(intent)).collect()
    }

    pub fn predict_intent(&self, intent: &FeatureSet) -> Result<Prediction> {
        if intent.universe() != self.context.num_features() {
            return Err(Error::InvalidConfig(format!(
                "intent over {} features, model has {}",
                intent.universe(),
                self.context.num_features()
            )));
        }
        ensemble_output(self.weights.weights(), &self.lattice_outputs(intent), self.delta)
    }

    /// Outlier degree of an intent; only meaningful for outlier ensembles.
    pub fn score_intent(&self, intent: &FeatureSet) -> Result<f64> {
        Ok(self.predict_intent(intent)?.memberships[0])
    }
}
