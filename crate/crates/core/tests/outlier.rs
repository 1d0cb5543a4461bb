mod common;

use common::{outlier_table, parse_labeled};
use fca_agenda::pipeline::{fit_table, TrainOptions};
use fca_agenda::trainer::Task;
use fca_agenda::LearnerKind;

fn fit(learner: LearnerKind, seed: u64) -> fca_agenda::TrainedModel {
    let mv = parse_labeled(&outlier_table(seed, 30, 3), "outlier");
    let mut options = TrainOptions {
        task: Task::Outlier,
        learner,
        ..TrainOptions::default()
    };
    options.config.seed = seed;
    fit_table(&mv, &options).unwrap().model
}

#[test]
fn extreme_attribute_gets_the_largest_weight() {
    for seed in 1..=5 {
        let model = fit(LearnerKind::Closure, seed);
        let w = model.ensemble.weights();
        let best = (0..w.basis().len())
            .max_by(|&a, &b| w.weights()[a].total_cmp(&w.weights()[b]))
            .unwrap();
        let names = model.agenda_names(&w.basis()[best]);
        assert!(names[0].starts_with("P="), "seed {seed}: {names:?}");
    }
}

// A nominal attribute with k values has k + 2 concepts, and every object
// meets exactly three of them, so a single-attribute lattice gives every
// object the same Sugiyama degree.
#[test]
fn sugiyama_is_flat_on_one_nominal_attribute() {
    let mv = parse_labeled(&outlier_table(2, 30, 3), "outlier");
    let model = fit(LearnerKind::Sugiyama, 2);
    let e = &model.ensemble;
    for o in 0..mv.len() {
        let intent = fca_agenda::scaling::scale_object(&model.spec, &mv.row_map(o)).unwrap();
        for (learner, out) in e.learners().iter().zip(e.lattice_outputs(&intent)) {
            let concepts = learner.lattice().len() as f64;
            assert_eq!(out.0, vec![1.0 - 3.0 / concepts]);
        }
    }
}

#[test]
fn outliers_outscore_inliers() {
    let mv = parse_labeled(&outlier_table(11, 30, 3), "outlier");
    let model = fit(LearnerKind::Closure, 11);
    let scores: Vec<(f64, bool)> = (0..mv.len())
        .map(|o| {
            (
                model.score_outlier(&mv.row_map(o)).unwrap(),
                mv.labels.as_ref().unwrap()[o] == "1",
            )
        })
        .collect();
    let min_out = scores.iter().filter(|s| s.1).map(|s| s.0).fold(f64::INFINITY, f64::min);
    let max_in = scores
        .iter()
        .filter(|s| !s.1)
        .map(|s| s.0)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(min_out > max_in, "{min_out} <= {max_in}");
}

#[test]
fn classifier_learner_rejected_for_outliers() {
    let mv = parse_labeled(&outlier_table(1, 10, 1), "outlier");
    let options = TrainOptions {
        task: Task::Outlier,
        learner: LearnerKind::JsmStrict,
        ..TrainOptions::default()
    };
    assert!(fit_table(&mv, &options).is_err());
}
