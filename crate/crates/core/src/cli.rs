//! Command-line surface: `train`, `predict`, `explain` and `eval`.
//!
//! Every command writes its results to the given `out` stream, diagnostics to
//! `err`, and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage or format error |
//! | 3 | some rows were skipped |
//! | 4 | concept cap exceeded |

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::agenda::{BasisStrategy, BasisStrategyConfig, Granularity};
use crate::error::{Error, Result};
use crate::learners::LearnerKind;
use crate::model::TrainedModel;
use crate::pipeline::{self, BasisChoice, TrainOptions};
use crate::report::{self, ScoredObject};
use crate::scaling::{parse_table, ParseOptions, ScalingStrategy};
use crate::trainer::{LossKind, Prediction, Task, TrainingConfig, TrainingOutputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fca-agenda",
    version,
    about = "FCA classifiers and outlier scorers with learned agendas"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model from a labeled CSV table.
    Train(TrainArgs),
    /// Score the rows of a CSV table with a trained model.
    Predict(PredictArgs),
    /// Report learned agenda weights, masses and feature importances.
    Explain(ExplainArgs),
    /// Evaluate a model against labeled data.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Classify,
    Outlier,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LearnerArg {
    JsmStrict,
    JsmClassic,
    Closure,
    Sugiyama,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Bounded,
    Expert,
    Adaptive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LossArg {
    Mse,
    CrossEntropy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    /// Numeric columns are cut at their terciles.
    Terciles,
    /// Every distinct value becomes a feature.
    Nominal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputsArg {
    LeaveOneOut,
    Resubstitution,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training table (CSV, first column holds object ids).
    #[arg(long)]
    pub data: PathBuf,
    /// Column holding class labels, or 0/1 outlier flags.
    #[arg(long)]
    pub label_col: String,
    #[arg(long, value_enum, default_value = "classify")]
    pub task: TaskArg,
    /// Defaults to jsm-strict for classification and closure for outliers.
    #[arg(long, value_enum)]
    pub learner: Option<LearnerArg>,
    #[arg(long, value_enum, default_value = "bounded")]
    pub basis: BasisArg,
    /// Largest agenda size in attributes (initial size for adaptive).
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Add the full feature set to the basis.
    #[arg(long)]
    pub include_full: bool,
    /// One agenda per line, attribute names separated by commas.
    #[arg(long)]
    pub expert_file: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lr: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Adaptive dropping threshold on clip-normalized mass.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Adaptive round limit.
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Defaults to mse.
    #[arg(long, value_enum)]
    pub loss: Option<LossArg>,
    #[arg(long, value_enum, default_value = "terciles")]
    pub scaling: ScalingArg,
    /// Lattice outputs the weights are fitted on.
    #[arg(long, value_enum, default_value = "leave-one-out")]
    pub training_outputs: OutputsArg,
    /// Build agendas from single features instead of whole attributes.
    #[arg(long)]
    pub feature_agendas: bool,
    /// Cap on concepts per lattice.
    #[arg(long, default_value_t = crate::lattice::DEFAULT_CONCEPT_CAP)]
    pub max_concepts: usize,
    /// Where to write the model file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Labeled data; required unless --leave-one-out is given.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Defaults to the label column recorded at training time.
    #[arg(long)]
    pub label_col: Option<String>,
    /// Evaluate on a seeded random fraction of the rows.
    #[arg(long)]
    pub split: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Retrain without each training object and predict it.
    #[arg(long)]
    pub leave_one_out: bool,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(a) => cmd_train(&a, out, err),
        Command::Predict(a) => cmd_predict(&a, out, err),
        Command::Explain(a) => cmd_explain(&a, out),
        Command::Eval(a) => cmd_eval(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ConceptCapExceeded { .. } | Error::AgendaCapExceeded { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Reads an expert agenda file: one agenda per line, comma-separated names.
/// Blank lines and `#` comments are ignored.
pub fn parse_expert_agendas<R: Read>(mut reader: R) -> Result<Vec<Vec<String>>> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let agendas: Vec<Vec<String>> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|n| n.trim().to_string())
                .filter(|n| !n.is_empty())
                .collect()
        })
        .collect();
    if agendas.is_empty() {
        return Err(Error::EmptyBasis);
    }
    Ok(agendas)
}

/// Turns train flags into options, rejecting conflicting combinations.
pub fn train_options(a: &TrainArgs) -> Result<TrainOptions> {
    if a.expert_file.is_some() && a.basis != BasisArg::Expert {
        return Err(usage("--expert-file requires --basis expert"));
    }
    if a.basis == BasisArg::Expert && a.expert_file.is_none() {
        return Err(usage("--basis expert requires --expert-file"));
    }
    if a.basis == BasisArg::Expert && (a.alpha.is_some() || a.include_full) {
        return Err(usage("--alpha and --include-full do not apply to --basis expert"));
    }
    if a.basis != BasisArg::Adaptive && (a.tau.is_some() || a.max_rounds.is_some()) {
        return Err(usage("--tau and --max-rounds require --basis adaptive"));
    }
    if a.basis == BasisArg::Expert && a.feature_agendas {
        return Err(usage("--feature-agendas does not apply to --basis expert"));
    }
    let task = match a.task {
        TaskArg::Classify => Task::Classify,
        TaskArg::Outlier => Task::Outlier,
    };
    let learner = match (a.learner, task) {
        (Some(LearnerArg::JsmStrict), _) | (None, Task::Classify) => LearnerKind::JsmStrict,
        (Some(LearnerArg::JsmClassic), _) => LearnerKind::JsmClassic,
        (Some(LearnerArg::Closure), _) | (None, Task::Outlier) => LearnerKind::Closure,
        (Some(LearnerArg::Sugiyama), _) => LearnerKind::Sugiyama,
    };
    if learner.is_classifier() != (task == Task::Classify) {
        return Err(usage(
            format!("--learner {} does not fit --task {:?}", learner.id(), a.task).to_lowercase(),
        ));
    }
    let loss = match a.loss {
        None | Some(LossArg::Mse) => LossKind::Mse,
        Some(LossArg::CrossEntropy) if task == Task::Outlier => {
            return Err(usage("outlier training uses mse"));
        }
        Some(LossArg::CrossEntropy) => LossKind::CrossEntropy,
    };
    let alpha = a.alpha.unwrap_or(1);
    let basis = match a.basis {
        BasisArg::Bounded => BasisChoice::Bounded {
            alpha,
            include_full: a.include_full,
        },
        BasisArg::Expert => {
            let path = a.expert_file.as_ref().expect("checked above");
            BasisChoice::Expert(parse_expert_agendas(open(path)?)?)
        }
        BasisArg::Adaptive => {
            let defaults = BasisStrategyConfig::default();
            BasisChoice::Adaptive(BasisStrategyConfig {
                strategy: BasisStrategy::Adaptive,
                alpha,
                include_full: a.include_full,
                tau: a.tau.unwrap_or(defaults.tau),
                max_rounds: a.max_rounds.unwrap_or(defaults.max_rounds),
                size_cap: None,
            })
        }
    };
    Ok(TrainOptions {
        task,
        learner,
        basis,
        granularity: if a.feature_agendas {
            Granularity::Feature
        } else {
            Granularity::Attribute
        },
        scaling: match a.scaling {
            ScalingArg::Terciles => ScalingStrategy::Terciles,
            ScalingArg::Nominal => ScalingStrategy::NominalOnly,
        },
        config: TrainingConfig {
            epochs: a.epochs,
            learning_rate: a.lr,
            seed: a.seed,
            loss,
            outputs: match a.training_outputs {
                OutputsArg::LeaveOneOut => TrainingOutputs::LeaveOneOut,
                OutputsArg::Resubstitution => TrainingOutputs::Resubstitution,
            },
            concept_cap: a.max_concepts,
            ..TrainingConfig::default()
        },
    })
}

pub fn cmd_train(a: &TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let options = train_options(a)?;
    let parse = ParseOptions {
        label_column: Some(a.label_col.clone()),
        require_label: true,
        ..ParseOptions::default()
    };
    let mv = parse_table(open(&a.data)?, &parse)?;
    let fitted = pipeline::fit_table(&mv, &options)?;
    for w in &fitted.warnings {
        writeln!(err, "warning: {}: {}", w.attribute, w.message)?;
    }
    for (i, round) in fitted.adaptive_rounds.iter().enumerate() {
        writeln!(
            err,
            "adaptive round {}: {} agendas, {} kept",
            i + 1,
            round.basis.len(),
            round.survivors.len()
        )?;
    }
    let model = fitted.model.with_label_column(a.label_col.clone());
    model.save(&a.out)?;

    let e = &model.ensemble;
    writeln!(out, "final loss\t{:?}", e.metadata.final_loss)?;
    for (agenda, w) in e.weights().basis().iter().zip(e.weights().weights()) {
        writeln!(out, "{:?}\t{}", w, model.agenda_names(agenda).join(","))?;
    }
    Ok(EXIT_OK)
}

/// An object id with its raw values, or why the row could not be read.
type RawRow = std::result::Result<(String, HashMap<String, String>), String>;

/// A CSV table read as raw rows, without type inference.
struct RawTable {
    header: Vec<String>,
    rows: Vec<RawRow>,
}

fn read_raw<R: Read>(reader: R) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            rows.push(Err(format!(
                "row {}: expected {} cells, found {}",
                i + 1,
                header.len(),
                record.len()
            )));
            continue;
        }
        let id = record[0].trim().to_string();
        let values = header
            .iter()
            .zip(record.iter())
            .skip(1)
            .map(|(h, v)| (h.clone(), v.trim().to_string()))
            .collect();
        rows.push(Ok((id, values)));
    }
    Ok(RawTable { header, rows })
}

fn check_schema(model: &TrainedModel, header: &[String]) -> Result<()> {
    if header.is_empty() {
        return Ok(());
    }
    match model.spec.attributes.iter().find(|a| !header[1..].contains(&a.name)) {
        Some(missing) => Err(usage(format!("schema mismatch: column `{}` is missing", missing.name))),
        None => Ok(()),
    }
}

fn format_prediction(id: &str, p: &Prediction, classes: &[String]) -> String {
    let mut line = id.to_string();
    for m in &p.memberships {
        line.push('\t');
        line.push_str(&format!("{m:?}"));
    }
    line.push('\t');
    line.push_str(p.decided.map_or("undecided", |c| classes[c].as_str()));
    line
}

pub fn cmd_predict(a: &PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let model = TrainedModel::load(&a.model)?;
    let mut text = String::new();
    open(&a.data)?.read_to_string(&mut text)?;
    if text.trim().is_empty() {
        return Ok(EXIT_OK);
    }
    let table = read_raw(text.as_bytes())?;
    check_schema(&model, &table.header)?;
    let mut skipped = 0;
    for row in table.rows {
        let scored = row.and_then(|(id, values)| {
            let line = match model.ensemble.task() {
                Task::Classify => model
                    .predict(&values)
                    .map(|p| format_prediction(&id, &p, model.ensemble.classes())),
                Task::Outlier => model.score_outlier(&values).map(|s| format!("{id}\t{s:?}")),
            };
            line.map_err(|e| format!("object `{id}`: {e}"))
        });
        match scored {
            Ok(line) => writeln!(out, "{line}")?,
            Err(msg) => {
                skipped += 1;
                writeln!(err, "skipped {msg}")?;
            }
        }
    }
    Ok(if skipped > 0 { EXIT_PARTIAL } else { EXIT_OK })
}

pub fn cmd_explain(a: &ExplainArgs, out: &mut dyn Write) -> Result<i32> {
    let model = TrainedModel::load(&a.model)?;
    let report = report::explain(&model)?;
    write_json(out, &report)?;
    Ok(EXIT_OK)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct EvalReport<M: Serialize> {
    task: Task,
    evaluated: usize,
    skipped: usize,
    metrics: M,
}

pub fn cmd_eval(a: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let model = TrainedModel::load(&a.model)?;
    let classes = model.ensemble.classes().to_vec();
    if a.leave_one_out {
        if a.data.is_some() || a.split.is_some() {
            return Err(usage(
                "--leave-one-out evaluates the training data; drop --data and --split",
            ));
        }
        let held = pipeline::leave_one_out(&model)?;
        let actual: Vec<usize> = held.iter().map(|h| h.actual).collect();
        let predicted: Vec<Option<usize>> = held.iter().map(|h| h.prediction.decided).collect();
        let metrics = report::classification_metrics(&actual, &predicted, &classes);
        write_json(
            out,
            &EvalReport {
                task: Task::Classify,
                evaluated: held.len(),
                skipped: 0,
                metrics,
            },
        )?;
        return Ok(EXIT_OK);
    }
    let data = a.data.as_ref().ok_or_else(|| usage("--data is required"))?;
    let label_col = a
        .label_col
        .clone()
        .or_else(|| model.label_column.clone())
        .ok_or_else(|| usage("--label-col is required: the model does not record one"))?;
    if let Some(f) = a.split {
        if !(f > 0.0 && f <= 1.0) {
            return Err(usage("--split must lie in (0, 1]"));
        }
    }

    let table = read_raw(open(data)?)?;
    if !table.header.iter().skip(1).any(|h| *h == label_col) {
        return Err(Error::UnknownColumn(label_col));
    }
    check_schema(&model, &table.header)?;
    let mut rows: Vec<_> = table.rows.into_iter().collect();
    if let Some(f) = a.split {
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(a.seed));
        let keep = ((f * rows.len() as f64).ceil() as usize).min(rows.len());
        let mut chosen: Vec<usize> = idx[..keep].to_vec();
        chosen.sort_unstable();
        let mut all: Vec<Option<_>> = rows.into_iter().map(Some).collect();
        rows = chosen
            .into_iter()
            .map(|i| all[i].take().expect("indices are distinct"))
            .collect();
    }

    let mut skipped = 0;
    let mut skip = |err: &mut dyn Write, msg: String| -> Result<()> {
        skipped += 1;
        writeln!(err, "skipped {msg}")?;
        Ok(())
    };
    match model.ensemble.task() {
        Task::Classify => {
            let mut actual = Vec::new();
            let mut predicted = Vec::new();
            for row in rows {
                let (id, values) = match row {
                    Ok(r) => r,
                    Err(m) => {
                        skip(err, m)?;
                        continue;
                    }
                };
                let label = values.get(&label_col).cloned().unwrap_or_default();
                let Some(class) = classes.iter().position(|c| *c == label) else {
                    skip(err, format!("object `{id}`: label `{label}` is not a trained class"))?;
                    continue;
                };
                match model.predict(&values) {
                    Ok(p) => {
                        actual.push(class);
                        predicted.push(p.decided);
                    }
                    Err(e) => skip(err, format!("object `{id}`: {e}"))?,
                }
            }
            if actual.is_empty() {
                return Err(Error::NoLabels);
            }
            let metrics = report::classification_metrics(&actual, &predicted, &classes);
            write_json(
                out,
                &EvalReport {
                    task: Task::Classify,
                    evaluated: actual.len(),
                    skipped,
                    metrics,
                },
            )?;
        }
        Task::Outlier => {
            let mut scores = Vec::new();
            for row in rows {
                let (id, values) = match row {
                    Ok(r) => r,
                    Err(m) => {
                        skip(err, m)?;
                        continue;
                    }
                };
                let flag = values.get(&label_col).map(String::as_str).unwrap_or("");
                let outlier = match pipeline::parse_outlier_flag(flag) {
                    Ok(Some(o)) => o,
                    Ok(None) => {
                        skip(err, format!("object `{id}`: no label"))?;
                        continue;
                    }
                    Err(e) => {
                        skip(err, format!("object `{id}`: {e}"))?;
                        continue;
                    }
                };
                match model.score_outlier(&values) {
                    Ok(score) => scores.push(ScoredObject {
                        object: id,
                        score,
                        outlier,
                    }),
                    Err(e) => skip(err, format!("object `{id}`: {e}"))?,
                }
            }
            if scores.is_empty() {
                return Err(Error::NoLabels);
            }
            let evaluated = scores.len();
            write_json(
                out,
                &EvalReport {
                    task: Task::Outlier,
                    evaluated,
                    skipped,
                    metrics: report::outlier_metrics(scores),
                },
            )?;
        }
    }
    Ok(if skipped > 0 { EXIT_PARTIAL } else { EXIT_OK })
}
