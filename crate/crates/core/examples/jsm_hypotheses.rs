//! JSM hypotheses on the apple table: the full lattice abstains on t0, the
//! sweetness sub-lattice does not.

use std::collections::HashMap;

use fca_agenda::lattice::{agenda_lattice, enumerate_concepts, DEFAULT_CONCEPT_CAP};
use fca_agenda::learners::{classify_jsm, positive_hypotheses};
use fca_agenda::scaling::{
    apply_scaling, build_scaling_spec, parse_table, scale_object, ParseOptions, ScalingStrategy,
};
use fca_agenda::{BitSet, JsmMode, LabeledSplit};

fn main() -> fca_agenda::Result<()> {
    let options = ParseOptions {
        label_column: Some("Class".into()),
        require_label: true,
        ..Default::default()
    };
    let mv = parse_table(include_str!("../data/apples.csv").as_bytes(), &options)?;
    let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::Terciles)?;
    let (ctx, groups) = apply_scaling(&mv, &spec)?;

    let class_of = |c: &str| {
        let objects = mv
            .labels
            .as_ref()
            .unwrap()
            .iter()
            .enumerate()
            .filter(|(_, l)| *l == c)
            .map(|(o, _)| o);
        BitSet::from_indices(ctx.num_objects(), objects)
    };
    let split = LabeledSplit::new(class_of("1"), class_of("2"))?;

    let t0: HashMap<String, String> = [
        ("Color", "green"),
        ("Volume", "High"),
        ("Sweetness", "High"),
        ("Local", "Yes"),
        ("Price", "High"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    let q = scale_object(&spec, &t0)?;

    let full = enumerate_concepts(&ctx)?;
    for h in positive_hypotheses(&full, &split, JsmMode::Strict) {
        println!(
            "positive hypothesis {:?}",
            h.iter().map(|f| &ctx.features()[f]).collect::<Vec<_>>()
        );
    }
    let (outcome, _) = classify_jsm(&full, &split, &q, JsmMode::Strict);
    println!("full lattice on t0: {:?}", outcome.verdict);

    for (name, _) in groups.blocks() {
        let agenda = groups.union_of(&[groups.position(name).unwrap()]);
        let lattice = agenda_lattice(&ctx, &agenda, DEFAULT_CONCEPT_CAP)?;
        let (outcome, membership) = classify_jsm(&lattice, &split, &q, JsmMode::Strict);
        println!(
            "{name:>9} lattice on t0: {:?} {:?}",
            outcome.verdict,
            membership.values()
        );
    }
    Ok(())
}
