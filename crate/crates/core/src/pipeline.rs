//! End-to-end training from a many-valued table: scaling, basis selection and
//! weight learning.

use crate::agenda::{basis_adaptive, basis_bounded, basis_expert, AdaptiveRound, BasisStrategyConfig, Granularity};
use crate::context::FeatureSet;
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::model::TrainedModel;
use crate::scaling::{apply_scaling, build_scaling_spec, ManyValuedContext, ScalingStrategy, ScalingWarning};
use crate::trainer::{train, train_outlier, Ensemble, Prediction, Task, TrainingConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum BasisChoice {
    Bounded {
        alpha: usize,
        include_full: bool,
    },
    /// Agendas as lists of attribute (or feature) names.
    Expert(Vec<Vec<String>>),
    Adaptive(BasisStrategyConfig),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOptions {
    pub task: Task,
    pub learner: LearnerKind,
    pub basis: BasisChoice,
    pub granularity: Granularity,
    pub scaling: ScalingStrategy,
    pub config: TrainingConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            task: Task::Classify,
            learner: LearnerKind::JsmStrict,
            basis: BasisChoice::Bounded {
                alpha: 1,
                include_full: false,
            },
            granularity: Granularity::Attribute,
            scaling: ScalingStrategy::Terciles,
            config: TrainingConfig::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub model: TrainedModel,
    pub warnings: Vec<ScalingWarning>,
    pub adaptive_rounds: Vec<AdaptiveRound>,
}

/// Reads an outlier indicator.
pub fn parse_outlier_flag(value: &str) -> Result<Option<bool>> {
    match value.trim().to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "1" | "true" | "yes" | "outlier" => Ok(Some(true)),
        "0" | "false" | "no" | "inlier" => Ok(Some(false)),
        other => Err(Error::InvalidConfig(format!("`{other}` is not an outlier indicator"))),
    }
}

/// Class names (sorted) and per-object class indices; empty labels are
/// unlabeled.
pub fn encode_labels(raw: &[String]) -> (Vec<String>, Vec<Option<usize>>) {
    let mut classes: Vec<String> = raw.iter().filter(|l| !l.is_empty()).cloned().collect();
    classes.sort();
    classes.dedup();
    let labels = raw.iter().map(|l| classes.iter().position(|c| c == l)).collect();
    (classes, labels)
}

/// Scales the table, selects the basis and learns the weights.
pub fn fit_table(mv: &ManyValuedContext, options: &TrainOptions) -> Result<FitOutcome> {
    let raw_labels = mv.labels.as_ref().ok_or(Error::NoLabels)?;
    if options.task == Task::Classify && !options.learner.is_classifier() {
        return Err(Error::InvalidConfig(format!(
            "learner `{}` cannot classify",
            options.learner.id()
        )));
    }
    if options.task == Task::Outlier && options.learner.is_classifier() {
        return Err(Error::InvalidConfig(format!(
            "learner `{}` is not an outlier scorer",
            options.learner.id()
        )));
    }
    let (spec, warnings) = build_scaling_spec(mv, &options.scaling)?;
    let (ctx, groups) = apply_scaling(mv, &spec)?;
    let blocks = options.granularity.blocks(&groups, ctx.features());

    let (classes, labels) = encode_labels(raw_labels);
    let outlier_labels: Vec<Option<bool>> = if options.task == Task::Outlier {
        raw_labels
            .iter()
            .map(|l| parse_outlier_flag(l))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let fit = |basis: &[FeatureSet]| -> Result<Ensemble> {
        match options.task {
            Task::Classify => train(&ctx, &labels, classes.clone(), basis, options.learner, &options.config),
            Task::Outlier => train_outlier(&ctx, &outlier_labels, basis, options.learner, &options.config),
        }
    };

    let mut adaptive_rounds = Vec::new();
    let ensemble = match &options.basis {
        BasisChoice::Bounded { alpha, include_full } => fit(&basis_bounded(&blocks, *alpha, *include_full)?)?,
        BasisChoice::Expert(agendas) => fit(&basis_expert(agendas, &groups, ctx.features())?)?,
        BasisChoice::Adaptive(config) => {
            let outcome = basis_adaptive(&blocks, config, |basis| Ok(fit(basis)?.weights().weights().to_vec()))?;
            adaptive_rounds = outcome.rounds;
            fit(outcome.weights.basis())?
        }
    };
    Ok(FitOutcome {
        model: TrainedModel::new(spec, ensemble)?,
        warnings,
        adaptive_rounds,
    })
}

/// The training configuration recorded in a model.
pub fn recorded_config(model: &TrainedModel) -> TrainingConfig {
    let m = &model.ensemble.metadata;
    TrainingConfig {
        epochs: m.epochs,
        learning_rate: m.learning_rate,
        seed: m.seed,
        loss: m.loss,
        delta: m.delta,
        outputs: m.outputs,
        concept_cap: model.ensemble.concept_cap(),
        ..TrainingConfig::default()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeldOut {
    pub object: String,
    pub actual: usize,
    pub prediction: Prediction,
}

/// Retrains the model's basis without each labeled training object in turn
/// (same configuration and seed) and predicts the held-out object.
pub fn leave_one_out(model: &TrainedModel) -> Result<Vec<HeldOut>> {
    let e = &model.ensemble;
    if e.task() != Task::Classify {
        return Err(Error::InvalidConfig(
            "leave-one-out evaluation needs a classifier".into(),
        ));
    }
    let ctx = e.context();
    let config = recorded_config(model);
    let basis = e.weights().basis();
    (0..ctx.num_objects())
        .filter_map(|o| e.labels()[o].map(|c| (o, c)))
        .map(|(o, actual)| {
            let rest = ctx.without_object(o);
            let labels: Vec<Option<usize>> = e
                .labels()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != o)
                .map(|(_, l)| *l)
                .collect();
            let held = train(&rest, &labels, e.classes().to_vec(), basis, e.learner(), &config)?;
            Ok(HeldOut {
                object: ctx.objects()[o].clone(),
                actual,
                prediction: held.predict_intent(ctx.row(o))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_sorted_and_blank_is_unlabeled() {
        let raw: Vec<String> = ["b", "a", "", "b"].iter().map(|s| s.to_string()).collect();
        let (classes, labels) = encode_labels(&raw);
        assert_eq!(classes, vec!["a", "b"]);
        assert_eq!(labels, vec![Some(1), Some(0), None, Some(1)]);
    }

    #[test]
    fn outlier_flags() {
        assert_eq!(parse_outlier_flag("Yes").unwrap(), Some(true));
        assert_eq!(parse_outlier_flag("0").unwrap(), Some(false));
        assert_eq!(parse_outlier_flag(" ").unwrap(), None);
        assert!(parse_outlier_flag("maybe").is_err());
    }
}
