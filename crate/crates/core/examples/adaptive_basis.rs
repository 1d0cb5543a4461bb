//! Adaptive basis selection on a table where one attribute decides the label.

use fca_agenda::agenda::{normalize_to_mass, BasisStrategy, BasisStrategyConfig};
use fca_agenda::pipeline::{fit_table, BasisChoice, TrainOptions};
use fca_agenda::scaling::{parse_table, ParseOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fca_agenda::Result<()> {
    // label is "yes" exactly when A3 = v0
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut csv = String::from("id,A0,A1,A2,A3,A4,A5,label\n");
    for o in 0..40 {
        let values: Vec<u32> = (0..6).map(|_| rng.gen_range(0..3)).collect();
        let cells: Vec<String> = values.iter().map(|v| format!("v{v}")).collect();
        let label = if values[3] == 0 { "yes" } else { "no" };
        csv.push_str(&format!("o{o},{},{label}\n", cells.join(",")));
    }
    let mv = parse_table(
        csv.as_bytes(),
        &ParseOptions {
            label_column: Some("label".into()),
            require_label: true,
            ..Default::default()
        },
    )?;

    let options = TrainOptions {
        basis: BasisChoice::Adaptive(BasisStrategyConfig {
            strategy: BasisStrategy::Adaptive,
            alpha: 1,
            tau: 0.05,
            ..BasisStrategyConfig::default()
        }),
        ..TrainOptions::default()
    };
    let outcome = fit_table(&mv, &options)?;
    for (i, round) in outcome.adaptive_rounds.iter().enumerate() {
        println!(
            "round {}: {} agendas, {} survive",
            i + 1,
            round.basis.len(),
            round.survivors.len()
        );
    }
    let model = outcome.model;
    let mass = normalize_to_mass(model.ensemble.weights(), true)?;
    for a in model.ensemble.weights().basis() {
        println!("{:.4}  {:?}", mass.mass(a), model.agenda_names(a));
    }
    Ok(())
}
