mod common;

use common::{apples, outlier_table, parse_labeled, t0};
use fca_agenda::pipeline::{fit_table, TrainOptions};
use fca_agenda::trainer::Task;
use fca_agenda::{Error, LearnerKind, TrainedModel};

fn apple_model() -> TrainedModel {
    fit_table(&apples(), &TrainOptions::default()).unwrap().model
}

fn outlier_model() -> TrainedModel {
    let options = TrainOptions {
        task: Task::Outlier,
        learner: LearnerKind::Sugiyama,
        ..TrainOptions::default()
    };
    fit_table(&parse_labeled(&outlier_table(5, 12, 2), "outlier"), &options)
        .unwrap()
        .model
}

#[test]
fn save_load_save_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for model in [apple_model(), outlier_model()] {
        let first = dir.path().join("first.json");
        let second = dir.path().join("second.json");
        model.save(&first).unwrap();
        TrainedModel::load(&first).unwrap().save(&second).unwrap();
        assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    }
}

#[test]
fn loaded_model_predicts_bit_identically() {
    let model = apple_model();
    let loaded = TrainedModel::from_json(&model.to_json().unwrap()).unwrap();
    let mv = apples();
    let mut rows: Vec<_> = (0..mv.len()).map(|o| mv.row_map(o)).collect();
    rows.push(t0());
    for row in &rows {
        let a = model.predict(row).unwrap();
        let b = loaded.predict(row).unwrap();
        let bits = |p: &fca_agenda::Prediction| p.memberships.iter().map(|m| m.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.decided, b.decided);
    }
}

#[test]
fn keys_are_sorted_and_weights_are_strings() {
    let json = apple_model().to_json().unwrap();
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(value["weights"].as_array().unwrap().iter().all(|w| w.is_string()));
    assert_eq!(value["format_version"], 1);
}

#[test]
fn truncated_file_is_rejected() {
    let json = apple_model().to_json().unwrap();
    let cut = &json[..json.len() / 2];
    assert!(matches!(TrainedModel::from_json(cut), Err(Error::Json(_))));
}

#[test]
fn version_is_checked() {
    let json = apple_model()
        .to_json()
        .unwrap()
        .replace("\"format_version\": 1", "\"format_version\": 2");
    assert!(matches!(TrainedModel::from_json(&json), Err(Error::ModelFormat(_))));
}

#[test]
fn invariants_are_checked_on_load() {
    let json = apple_model().to_json().unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
    value["basis"][0] = serde_json::json!(["Color=purple"]);
    assert!(TrainedModel::from_json(&value.to_string()).is_err());

    let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
    value["surprise"] = serde_json::json!(true);
    assert!(TrainedModel::from_json(&value.to_string()).is_err());

    let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
    value["learner"] = serde_json::json!("closure");
    assert!(TrainedModel::from_json(&value.to_string()).is_err());
}

#[test]
fn edited_weights_drive_predictions() {
    let model = apple_model();
    let json = model.to_json().unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let n = value["weights"].as_array().unwrap().len();
    // all weight on the sweetness agenda
    let sweet = value["basis"]
        .as_array()
        .unwrap()
        .iter()
        .position(|a| a[0].as_str().unwrap().starts_with("Sweetness="))
        .unwrap();
    let edited: Vec<f64> = (0..n).map(|i| if i == sweet { 1.0 } else { 0.0 }).collect();
    value["weights"] = serde_json::json!(edited.iter().map(|w| format!("{w:?}")).collect::<Vec<_>>());
    let loaded = TrainedModel::from_json(&value.to_string()).unwrap();

    let reference = model.ensemble.clone().with_weights(edited).unwrap();
    let mv = apples();
    for o in 0..mv.len() {
        let row = mv.row_map(o);
        let intent = fca_agenda::scaling::scale_object(&model.spec, &row).unwrap();
        assert_eq!(
            loaded.predict(&row).unwrap(),
            reference.predict_intent(&intent).unwrap()
        );
    }
    // t0 is sweet, so the sweetness lattice alone puts it in class 1
    let p = loaded.predict(&t0()).unwrap();
    assert_eq!(p.memberships, vec![1.0, 0.0]);
}
