//! Closure-size and concept-count outlier degrees, then a trained outlier
//! ensemble scoring unseen rows.

use fca_agenda::lattice::enumerate_concepts;
use fca_agenda::learners::{closure_outlier_degree, sugiyama_outlier_degree};
use fca_agenda::pipeline::{fit_table, TrainOptions};
use fca_agenda::scaling::{apply_scaling, build_scaling_spec, parse_table, ParseOptions, ScalingStrategy};
use fca_agenda::trainer::Task;
use fca_agenda::LearnerKind;

const SENSORS: &str = "\
id,Temp,Vibration,Noise,outlier
s1,normal,low,quiet,0
s2,normal,low,quiet,0
s3,normal,low,hum,0
s4,normal,medium,quiet,0
s5,normal,low,quiet,0
s6,normal,medium,hum,0
s7,hot,high,loud,1
s8,normal,low,hum,0
s9,cold,high,quiet,1
";

fn main() -> fca_agenda::Result<()> {
    let options = ParseOptions {
        label_column: Some("outlier".into()),
        ..Default::default()
    };
    let mv = parse_table(SENSORS.as_bytes(), &options)?;
    let (spec, _) = build_scaling_spec(&mv, &ScalingStrategy::NominalOnly)?;
    let (ctx, _) = apply_scaling(&mv, &spec)?;
    let lattice = enumerate_concepts(&ctx)?;
    println!("object  closure  sugiyama");
    for o in 0..ctx.num_objects() {
        println!(
            "{:6}  {:.3}    {:.3}",
            ctx.objects()[o],
            closure_outlier_degree(&ctx, o),
            sugiyama_outlier_degree(&lattice, o)
        );
    }

    let options = TrainOptions {
        task: Task::Outlier,
        learner: LearnerKind::Closure,
        ..TrainOptions::default()
    };
    let model = fit_table(&mv, &options)?.model;
    for (i, w) in model.ensemble.weights().weights().iter().enumerate() {
        println!(
            "weight {w:+.4} on {:?}",
            model.agenda_names(&model.ensemble.weights().basis()[i])
        );
    }
    for o in 0..mv.len() {
        println!("{} scores {:.4}", mv.objects[o], model.score_outlier(&mv.row_map(o))?);
    }
    Ok(())
}
