//! Train on the apples, save the model, load it back and predict t0.

use std::collections::HashMap;

use fca_agenda::pipeline::{fit_table, TrainOptions};
use fca_agenda::report::explain;
use fca_agenda::scaling::{parse_table, ParseOptions};
use fca_agenda::TrainedModel;

fn main() -> fca_agenda::Result<()> {
    let options = ParseOptions {
        label_column: Some("Class".into()),
        require_label: true,
        ..Default::default()
    };
    let mv = parse_table(include_str!("../data/apples.csv").as_bytes(), &options)?;
    let fit = fit_table(&mv, &TrainOptions::default())?;
    let model = fit.model.with_label_column("Class");
    println!("final loss {:.6}", model.ensemble.metadata.final_loss);

    let path = std::env::temp_dir().join("apple-model.json");
    model.save(&path)?;
    let loaded = TrainedModel::load(&path)?;
    println!("saved and reloaded {}", path.display());

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
    let p = loaded.predict(&t0)?;
    let class = p.decided.map_or("undecided", |c| loaded.ensemble.classes()[c].as_str());
    println!("t0 memberships {:?} -> class {class}", p.memberships);

    for a in explain(&loaded)?.agendas {
        println!("{:+.4} (mass {:.4}) {:?}", a.weight, a.mass, a.agenda);
    }
    Ok(())
}
