#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use fca_agenda::scaling::{parse_table, ParseOptions};
use fca_agenda::{BitSet, FeatureSet, FormalContext, ManyValuedContext, ObjectSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const APPLES_CSV: &str = include_str!("../../data/apples.csv");
pub const APPLE_T0_CSV: &str = include_str!("../../data/apple_t0.csv");

pub fn apples() -> ManyValuedContext {
    parse_table(
        APPLES_CSV.as_bytes(),
        &ParseOptions {
            label_column: Some("Class".into()),
            require_label: true,
            ..Default::default()
        },
    )
    .unwrap()
}

pub fn t0() -> HashMap<String, String> {
    [
        ("Color", "green"),
        ("Volume", "High"),
        ("Sweetness", "High"),
        ("Local", "Yes"),
        ("Price", "High"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

/// Random context with the given shape; each incidence is present with
/// probability `density`.
pub fn random_context(rng: &mut ChaCha8Rng, objects: usize, features: usize, density: f64) -> FormalContext {
    let mut pairs = Vec::new();
    for o in 0..objects {
        for f in 0..features {
            if rng.gen_bool(density) {
                pairs.push((o, f));
            }
        }
    }
    FormalContext::new(
        (0..objects).map(|o| format!("o{o}")).collect(),
        (0..features).map(|f| format!("f{f}")).collect(),
        pairs,
    )
    .unwrap()
}

pub fn seeded_context(seed: u64, max_objects: usize, max_features: usize) -> FormalContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_objects);
    let m = rng.gen_range(1..=max_features);
    let density = rng.gen_range(0.1..=0.9);
    random_context(&mut rng, n, m, density)
}

pub fn subset(universe: usize, mask: u64) -> BitSet {
    BitSet::from_indices(universe, (0..universe).filter(|i| mask >> i & 1 == 1))
}

// Oracles: direct loops over the incidence relation, no bitset algebra.

pub fn oracle_intent(ctx: &FormalContext, objects: &ObjectSet) -> FeatureSet {
    let m = ctx.num_features();
    BitSet::from_indices(m, (0..m).filter(|&f| objects.iter().all(|o| ctx.incident(o, f))))
}

pub fn oracle_extent(ctx: &FormalContext, features: &FeatureSet) -> ObjectSet {
    let n = ctx.num_objects();
    BitSet::from_indices(n, (0..n).filter(|&o| features.iter().all(|f| ctx.incident(o, f))))
}

/// Every concept, by closing every subset of objects.
pub fn oracle_concepts(ctx: &FormalContext) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    let n = ctx.num_objects();
    assert!(n <= 16, "powerset oracle is exponential");
    (0..1u64 << n)
        .map(|mask| {
            let intent = oracle_intent(ctx, &subset(n, mask));
            let extent = oracle_extent(ctx, &intent);
            (extent.to_vec(), intent.to_vec())
        })
        .collect()
}

pub fn apple_context() -> (FormalContext, fca_agenda::AttributeGroups) {
    use fca_agenda::scaling::{apply_scaling, build_scaling_spec, ScalingStrategy};
    let mv = apples();
    let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::Terciles).unwrap();
    apply_scaling(&mv, &spec).unwrap()
}

pub fn features(ctx: &FormalContext, names: &[&str]) -> FeatureSet {
    BitSet::from_indices(ctx.num_features(), names.iter().map(|n| ctx.feature_index(n).unwrap()))
}

/// Objects by their table ids ("1".."8" for the apples).
pub fn objects(ctx: &FormalContext, ids: &[&str]) -> ObjectSet {
    BitSet::from_indices(ctx.num_objects(), ids.iter().map(|n| ctx.object_index(n).unwrap()))
}

pub fn names(ctx: &FormalContext, set: &FeatureSet) -> Vec<String> {
    set.iter().map(|f| ctx.features()[f].clone()).collect()
}

/// CSV with `objects` rows and `attributes` three-valued categorical
/// attributes `A0..`; the label is `yes` exactly when attribute `informative`
/// takes value `v0`.
pub fn synthetic_table(seed: u64, objects: usize, attributes: usize, informative: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("id");
    for a in 0..attributes {
        csv.push_str(&format!(",A{a}"));
    }
    csv.push_str(",label\n");
    for o in 0..objects {
        let values: Vec<usize> = (0..attributes).map(|_| rng.gen_range(0..3)).collect();
        csv.push_str(&format!("o{o}"));
        for v in &values {
            csv.push_str(&format!(",v{v}"));
        }
        let label = if values[informative] == 0 { "yes" } else { "no" };
        csv.push_str(&format!(",{label}\n"));
    }
    csv
}

pub fn parse_labeled(csv: &str, label: &str) -> ManyValuedContext {
    parse_table(
        csv.as_bytes(),
        &ParseOptions {
            label_column: Some(label.into()),
            require_label: true,
            ..Default::default()
        },
    )
    .unwrap()
}

/// Outlier table: inliers share `P = p0` and draw the other attributes from
/// three common values; the `outliers` last rows take a value of `P` nobody
/// else has and are ordinary elsewhere. The label column `outlier` holds 0/1.
pub fn outlier_table(seed: u64, inliers: usize, outliers: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("id,P,Q,R,S,outlier\n");
    for o in 0..inliers + outliers {
        let is_outlier = o >= inliers;
        let p = if is_outlier {
            format!("rare{o}")
        } else {
            "p0".to_string()
        };
        let rest: Vec<String> = (0..3).map(|_| format!("v{}", rng.gen_range(0..3))).collect();
        csv.push_str(&format!("o{o},{p},{},{}\n", rest.join(","), u8::from(is_outlier)));
    }
    csv
}
