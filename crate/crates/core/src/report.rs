//! Explanation reports over learned agendas and evaluation metrics.

use serde::Serialize;

use crate::agenda::{normalize_to_mass, pignistic, plausibility_transform};
use crate::error::Result;
use crate::model::TrainedModel;

pub const NEGATIVE_WEIGHT_NOTE: &str =
    "opposite categorization: this lattice's output runs against the learned decision";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgendaEntry {
    pub agenda: Vec<String>,
    pub weight: f64,
    /// Clip-normalized mass; zero for negative weights.
    pub mass: f64,
    pub negative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub feature: String,
    pub pignistic: f64,
    pub plausibility: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplanationReport {
    pub agendas: Vec<AgendaEntry>,
    pub features: Vec<FeatureImportance>,
    /// True when negative weights were clipped before normalization.
    pub clipped: bool,
}

/// Learned weights read as an agenda: masses, feature importances and
/// negative-weight flags. Agendas are listed by descending weight, then
/// lexicographically.
pub fn explain(model: &TrainedModel) -> Result<ExplanationReport> {
    let weights = model.ensemble.weights();
    let mass = normalize_to_mass(weights, true)?;
    let bet = pignistic(&mass)?;
    let pl = plausibility_transform(&mass)?;
    let mut agendas: Vec<AgendaEntry> = weights
        .basis()
        .iter()
        .zip(weights.weights())
        .map(|(a, &w)| AgendaEntry {
            agenda: model.agenda_names(a),
            weight: w,
            mass: mass.mass(a),
            negative: w < 0.0,
            note: (w < 0.0).then(|| NEGATIVE_WEIGHT_NOTE.to_string()),
        })
        .collect();
    agendas.sort_by(|a, b| b.weight.total_cmp(&a.weight).then_with(|| a.agenda.cmp(&b.agenda)));
    let features = model
        .ensemble
        .context()
        .features()
        .iter()
        .enumerate()
        .map(|(i, f)| FeatureImportance {
            feature: f.clone(),
            pignistic: bet[i],
            plausibility: pl[i],
        })
        .collect();
    Ok(ExplanationReport {
        clipped: weights.weights().iter().any(|&w| w < 0.0),
        agendas,
        features,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub support: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationMetrics {
    pub objects: usize,
    /// Correct decisions over all objects; undecided objects count as wrong.
    pub accuracy: f64,
    pub abstention_rate: f64,
    pub per_class: Vec<ClassMetrics>,
    /// `confusion[actual][predicted]`, decided objects only.
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn classification_metrics(
    actual: &[usize],
    predicted: &[Option<usize>],
    classes: &[String],
) -> ClassificationMetrics {
    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    let mut undecided = 0;
    for (&a, p) in actual.iter().zip(predicted) {
        match p {
            Some(p) => confusion[a][*p] += 1,
            None => undecided += 1,
        }
    }
    let n = actual.len();
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class = (0..k)
        .map(|c| {
            let predicted_c: usize = (0..k).map(|a| confusion[a][c]).sum();
            let support = actual.iter().filter(|&&a| a == c).count();
            ClassMetrics {
                class: classes[c].clone(),
                precision: ratio(confusion[c][c], predicted_c),
                recall: ratio(confusion[c][c], support),
                support,
            }
        })
        .collect();
    ClassificationMetrics {
        objects: n,
        accuracy: ratio(correct, n),
        abstention_rate: ratio(undecided, n),
        per_class,
        confusion,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoredObject {
    pub object: String,
    pub score: f64,
    pub outlier: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutlierMetrics {
    pub scores: Vec<ScoredObject>,
    /// Probability that a random outlier outscores a random inlier (ties
    /// count half); `None` without both kinds of objects.
    pub rank_separation: Option<f64>,
}

pub fn outlier_metrics(scores: Vec<ScoredObject>) -> OutlierMetrics {
    let outliers: Vec<f64> = scores.iter().filter(|s| s.outlier).map(|s| s.score).collect();
    let inliers: Vec<f64> = scores.iter().filter(|s| !s.outlier).map(|s| s.score).collect();
    let rank_separation = if outliers.is_empty() || inliers.is_empty() {
        None
    } else {
        let mut wins = 0.0;
        for &o in &outliers {
            for &i in &inliers {
                wins += if o > i {
                    1.0
                } else if o == i {
                    0.5
                } else {
                    0.0
                };
            }
        }
        Some(wins / (outliers.len() * inliers.len()) as f64)
    };
    OutlierMetrics {
        scores,
        rank_separation,
    }
}
