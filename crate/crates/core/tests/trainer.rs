mod common;

use common::{apple_context, t0};
use fca_agenda::agenda::basis_bounded;
use fca_agenda::pipeline::{encode_labels, fit_table, TrainOptions};
use fca_agenda::trainer::{
    ensemble_output, fit_weights, grad_weights, loss_value, predictions, train, training_table, LossKind, OutputTable,
    TrainingOutputs,
};
use fca_agenda::{LearnerKind, MembershipVector, TrainingConfig};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 1e-3;

fn random_instance(rng: &mut ChaCha8Rng, min_sum: f64, positive: bool) -> (Vec<f64>, OutputTable, Vec<Vec<f64>>) {
    let objects = rng.gen_range(1..=8);
    let lattices = rng.gen_range(2..=6);
    let channels = rng.gen_range(1..=3);
    let values = (0..objects * lattices * channels)
        .map(|_| rng.gen_range(0.05..0.95))
        .collect();
    let table = OutputTable::new(objects, lattices, channels, values);
    let targets = (0..objects)
        .map(|_| (0..channels).map(|_| f64::from(rng.gen_range(0..2u8))).collect())
        .collect();
    loop {
        let w: Vec<f64> = (0..lattices)
            .map(|_| {
                if positive {
                    rng.gen_range(0.05..1.0)
                } else {
                    rng.gen_range(-1.0..1.0)
                }
            })
            .collect();
        if w.iter().sum::<f64>().abs() >= min_sum {
            return (w, table, targets);
        }
    }
}

fn loss_at(w: &[f64], table: &OutputTable, targets: &[Vec<f64>], kind: LossKind) -> f64 {
    loss_value(&predictions(w, table, DELTA).unwrap(), targets, kind)
}

/// Normwise relative error between the analytic gradient and central
/// differences with step `h`: the largest componentwise difference over the
/// largest gradient component.
fn max_relative_error(w: &[f64], table: &OutputTable, targets: &[Vec<f64>], kind: LossKind, h: f64) -> f64 {
    let analytic = grad_weights(w, table, targets, kind, DELTA).unwrap();
    let numeric: Vec<f64> = (0..w.len())
        .map(|i| {
            let mut up = w.to_vec();
            let mut down = w.to_vec();
            up[i] += h;
            down[i] -= h;
            (loss_at(&up, table, targets, kind) - loss_at(&down, table, targets, kind)) / (2.0 * h)
        })
        .collect();
    let diff = analytic
        .iter()
        .zip(&numeric)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0, f64::max);
    let scale = analytic.iter().chain(&numeric).map(|g| g.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn output_is_projectively_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, table, _) = random_instance(&mut rng, 0.1, false);
        let outputs = table.row(0);
        let base = ensemble_output(&w, &outputs, DELTA).unwrap();
        for c in [-3.0, -1.0, 0.01, 7.0] {
            let scaled: Vec<f64> = w.iter().map(|x| c * x).collect();
            let p = ensemble_output(&scaled, &outputs, DELTA).unwrap();
            for (a, b) in p.memberships.iter().zip(&base.memberships) {
                prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
            }
            prop_assert_eq!(p.decided, base.decided);
        }
    }

    #[test]
    fn mse_gradient_matches_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, table, targets) = random_instance(&mut rng, 0.1, false);
        let err = max_relative_error(&w, &table, &targets, LossKind::Mse, 1e-5);
        prop_assert!(err <= 1e-5, "relative error {err}");
    }

    #[test]
    fn cross_entropy_gradient_matches_finite_differences(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, table, targets) = random_instance(&mut rng, 0.1, true);
        let err = max_relative_error(&w, &table, &targets, LossKind::CrossEntropy, 1e-5);
        prop_assert!(err <= 1e-5, "relative error {err}");
    }
}

#[test]
fn single_lattice_gradient_vanishes() {
    let table = OutputTable::new(3, 1, 2, vec![0.2, 0.8, 1.0, 0.0, 0.5, 0.5]);
    let targets = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    for kind in [LossKind::Mse, LossKind::CrossEntropy] {
        let g = grad_weights(&[0.7], &table, &targets, kind, DELTA).unwrap();
        assert!(g[0].abs() < 1e-15, "{g:?}");
    }
}

#[test]
fn loss_spot_values() {
    let table = OutputTable::new(2, 2, 1, vec![1.0, 0.0, 0.5, 0.5]);
    let targets = vec![vec![1.0], vec![0.0]];
    let w = [3.0, 1.0];
    // object 0: (3*1 + 1*0)/4 = 0.75; object 1: 0.5
    let preds = predictions(&w, &table, DELTA).unwrap();
    assert_eq!(preds, vec![vec![0.75], vec![0.5]]);
    let mse = ((0.75f64 - 1.0).powi(2) + 0.5f64.powi(2)) / 2.0;
    assert_eq!(loss_value(&preds, &targets, LossKind::Mse), mse);
    let ce = -(0.75f64.ln() + 0.5f64.ln()) / 2.0;
    assert!((loss_value(&preds, &targets, LossKind::CrossEntropy) - ce).abs() < 1e-15);
}

fn apple_labels() -> (Vec<String>, Vec<Option<usize>>) {
    encode_labels(common::apples().labels.as_ref().unwrap())
}

#[test]
fn apple_gradient_with_six_lattices() {
    let (ctx, groups) = apple_context();
    let (classes, labels) = apple_labels();
    let basis = basis_bounded(&groups, 1, true).unwrap();
    assert_eq!(basis.len(), 6);
    let config = TrainingConfig::default();
    let (_, table) = training_table(&ctx, &basis, LearnerKind::JsmStrict, &labels, classes.len(), &config).unwrap();
    let targets: Vec<Vec<f64>> = labels
        .iter()
        .flatten()
        .map(|&c| (0..classes.len()).map(|k| f64::from(u8::from(k == c))).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let w: Vec<f64> = loop {
            let w: Vec<f64> = (0..6).map(|_| rng.gen_range(-0.5..0.5)).collect();
            if w.iter().sum::<f64>().abs() >= 0.1 {
                break w;
            }
        };
        assert!(max_relative_error(&w, &table, &targets, LossKind::Mse, 1e-5) <= 1e-5);
    }
}

#[test]
fn small_steps_never_increase_the_loss() {
    let (ctx, groups) = apple_context();
    let (classes, labels) = apple_labels();
    let basis = basis_bounded(&groups, 1, false).unwrap();
    let config = TrainingConfig {
        learning_rate: 0.01,
        ..TrainingConfig::default()
    };
    let (_, table) = training_table(&ctx, &basis, LearnerKind::JsmStrict, &labels, classes.len(), &config).unwrap();
    let targets: Vec<Vec<f64>> = labels
        .iter()
        .flatten()
        .map(|&c| (0..2).map(|k| f64::from(u8::from(k == c))).collect())
        .collect();
    let fit = fit_weights(&table, &targets, &config).unwrap();
    for pair in fit.loss_curve.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-12, "{} -> {}", pair[0], pair[1]);
    }
    assert!(fit.final_loss <= fit.loss_curve[0]);
}

#[test]
fn training_is_deterministic_per_seed() {
    let (ctx, groups) = apple_context();
    let (classes, labels) = apple_labels();
    let basis = basis_bounded(&groups, 1, false).unwrap();
    let config = TrainingConfig::default();
    let a = train(&ctx, &labels, classes.clone(), &basis, LearnerKind::JsmStrict, &config).unwrap();
    let b = train(&ctx, &labels, classes, &basis, LearnerKind::JsmStrict, &config).unwrap();
    assert_eq!(a.weights(), b.weights());
    assert_eq!(a.metadata.loss_curve, b.metadata.loss_curve);
    let norm: f64 = a.weights().weights().iter().map(|w| w.abs()).sum();
    assert!((norm - 1.0).abs() < 1e-12);
    assert!(a.weights().sum() > 0.0);
}

#[test]
fn t0_is_assigned_to_class_1() {
    let model = fit_table(&common::apples(), &TrainOptions::default()).unwrap().model;
    let p = model.predict(&t0()).unwrap();
    assert_eq!(model.ensemble.classes()[p.decided.unwrap()], "1");
}

// Among the single-attribute lattices only Price decides a copy of type 8
// (Price=High occurs in type 8 alone); the others abstain. Its class follows
// the sign of the Price weight.
#[test]
fn type_8_follows_the_price_weight() {
    for outputs in [TrainingOutputs::LeaveOneOut, TrainingOutputs::Resubstitution] {
        let mut options = TrainOptions::default();
        options.config.outputs = outputs;
        let model = fit_table(&common::apples(), &options).unwrap().model;
        let mv = common::apples();
        let row = mv.row_map(mv.objects.iter().position(|o| o == "8").unwrap());
        let p = model.predict(&row).unwrap();
        let e = &model.ensemble;
        let outs = e.lattice_outputs(&fca_agenda::scaling::scale_object(&model.spec, &row).unwrap());
        let deciding: Vec<usize> = (0..outs.len()).filter(|&i| !outs[i].is_abstention()).collect();
        assert_eq!(deciding.len(), 1);
        assert_eq!(model.agenda_names(&e.weights().basis()[deciding[0]])[0], "Price=High");
        assert_eq!(outs[deciding[0]], MembershipVector(vec![0.0, 1.0]));
        let w_price = e.weights().weights()[deciding[0]];
        let expected = if w_price > 0.0 { "2" } else { "1" };
        assert_eq!(e.classes()[p.decided.unwrap()], expected, "{outputs:?}");
    }
}
