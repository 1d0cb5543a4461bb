//! Numeric columns binned at terciles, or at explicit cut points.

use std::collections::BTreeMap;

use fca_agenda::scaling::{apply_scaling, build_scaling_spec, parse_table, ParseOptions, ScalingStrategy};

const WINES: &str = "\
id,Acidity,Alcohol,Region
w1,3.1,12.5,north
w2,3.4,13.0,south
w3,2.9,11.0,north
w4,3.6,14.2,south
w5,3.3,12.0,east
w6,3.0,13.5,north
";

fn main() -> fca_agenda::Result<()> {
    let mv = parse_table(WINES.as_bytes(), &ParseOptions::default())?;
    for a in &mv.attributes {
        println!("{} is {:?}", a.name, a.kind);
    }

    let (spec, warnings) = build_scaling_spec(&mv, &ScalingStrategy::Terciles)?;
    for w in warnings {
        println!("warning: {}: {}", w.attribute, w.message);
    }
    let (ctx, groups) = apply_scaling(&mv, &spec)?;
    println!("features: {:?}", ctx.features());
    for (name, range) in groups.blocks() {
        println!("  block {name}: {range:?}");
    }
    for o in 0..ctx.num_objects() {
        let row: Vec<&String> = ctx.row(o).iter().map(|f| &ctx.features()[f]).collect();
        println!("  {} -> {row:?}", ctx.objects()[o]);
    }

    // every numeric column needs its cuts
    let cuts = BTreeMap::from([("Acidity".to_string(), vec![3.2]), ("Alcohol".to_string(), vec![12.75])]);
    let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::Explicit(cuts))?;
    println!("explicit cuts: {:?}", spec.feature_names());
    Ok(())
}
