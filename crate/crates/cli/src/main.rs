use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use smnn::datagen::{self, LabeledDataset};
use smnn::model::InitMode;
use smnn::sampling::{epsilon_for_size, SamplerConfig};
use smnn::{
    evaluate, explain, load_model, render_explanation_svg, save_model, train, Error, Model, Provenance,
    TrainConfig,
};

#[derive(Parser)]
#[command(name = "smnn", version, about = "Simplicial map neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset as CSV.
    Gen(GenArgs),
    /// Select a support set and print its row indices as a JSON array.
    Subsample(SubsampleArgs),
    /// Train a model and write it as JSON.
    Train(TrainArgs),
    /// Score a model on a labelled CSV file.
    Eval(EvalArgs),
    /// Predict labels for points.
    Predict(PredictArgs),
    /// Explain the prediction for one point.
    Explain(ExplainArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Spiral,
    Clusters,
    Iris,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of points (ignored for iris).
    #[arg(long, default_value_t = 400)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = datagen::DEFAULT_NOISE_SD)]
    noise: f64,
    #[arg(long, default_value_t = datagen::DEFAULT_TURNS)]
    turns: f64,
    #[arg(long, default_value_t = 2)]
    features: usize,
    #[arg(long, default_value_t = datagen::DEFAULT_CLUSTERS_PER_CLASS)]
    clusters_per_class: usize,
    #[arg(long, default_value_t = datagen::DEFAULT_CLASS_SEP)]
    class_sep: f64,
    #[arg(long, default_value_t = datagen::DEFAULT_FLIP_FRACTION)]
    flip: f64,
    /// Split the data: `--out` gets this fraction, `--test-out` the rest.
    #[arg(long, requires = "test_out")]
    train_fraction: Option<f64>,
    #[arg(long)]
    test_out: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = false, multiple = false)]
struct SamplerArgs {
    /// Cover radius of the support set.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Cover radius as (max norm + 1/2) / kappa.
    #[arg(long)]
    kappa: Option<f64>,
    /// Pick the cover radius that yields exactly this many support points.
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Args)]
struct SubsampleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// JSON array of training rows to use as the support set.
    #[arg(long, conflicts_with_all = ["epsilon", "kappa", "size"])]
    support: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = smnn::training::DEFAULT_LEARNING_RATE)]
    lr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = InitMode::Uniform01)]
    init: InitMode,
    #[arg(long, default_value_t = smnn::embedding::DEFAULT_RADIUS_MARGIN)]
    radius_margin: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated coordinates; may be repeated.
    #[arg(long, required_unless_present = "data", allow_hyphen_values = true)]
    point: Vec<String>,
    /// CSV file whose feature columns are predicted; its labels are ignored.
    #[arg(long, conflicts_with = "point")]
    data: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long)]
    svg: Option<PathBuf>,
}

impl SamplerArgs {
    fn any(&self) -> bool {
        self.epsilon.is_some() || self.kappa.is_some() || self.size.is_some()
    }
}

enum Failure {
    Usage(String),
    Data { context: String, error: Error },
}

type CliResult<T> = std::result::Result<T, Failure>;

fn at<T>(context: impl Display, r: smnn::Result<T>) -> CliResult<T> {
    r.map_err(|error| Failure::Data {
        context: context.to_string(),
        error,
    })
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Subsample(a) => cmd_subsample(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Explain(a) => cmd_explain(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data { context, error }) => {
            eprintln!("error: {} in {context}: {error}", error.name());
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> CliResult<LabeledDataset> {
    at(path.display(), datagen::load_csv(path))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    at(path.display(), std::fs::write(path, text).map_err(Error::from))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serialises") + "\n"
}

fn parse_point(flag: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("{flag} {text:?}: {e}")))
}

fn check_dim(model: &Model, point: &[f64], context: &str) -> CliResult<()> {
    if point.len() != model.dim() {
        return Err(Failure::Data {
            context: context.to_owned(),
            error: Error::DimensionMismatch {
                expected: model.dim(),
                got: point.len(),
            },
        });
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> CliResult<()> {
    let data = match a.kind {
        Kind::Spiral => at("--kind spiral", datagen::gen_spiral(a.n, a.noise, a.turns, a.seed))?,
        Kind::Clusters => at(
            "--kind clusters",
            datagen::gen_clusters(a.n, a.features, a.clusters_per_class, a.class_sep, a.flip, a.seed),
        )?,
        Kind::Iris => datagen::iris(),
    };
    match &a.test_out {
        Some(test_out) => {
            let frac = a.train_fraction.unwrap_or(0.75);
            if !(frac > 0.0 && frac < 1.0) {
                return Err(usage(format!("--train-fraction must lie in (0, 1), got {frac}")));
            }
            let (tr, te) = at("--train-fraction", datagen::split(&data, frac, a.seed))?;
            at(a.out.display(), datagen::save_csv(&tr, &a.out))?;
            at(test_out.display(), datagen::save_csv(&te, test_out))?;
            info!("wrote {} training and {} test rows", tr.len(), te.len());
        }
        None => at(a.out.display(), datagen::save_csv(&data, &a.out))?,
    }
    Ok(())
}

/// Resolves the sampler flags to a cover radius, the support rows and the
/// configuration recorded in the model file.
fn select_support(
    data: &LabeledDataset,
    s: &SamplerArgs,
    seed: u64,
) -> CliResult<Option<(f64, Vec<usize>, SamplerConfig)>> {
    let cfg = match (s.epsilon, s.kappa, s.size) {
        (Some(e), _, _) => SamplerConfig::epsilon(e, seed),
        (_, Some(k), _) => SamplerConfig::kappa(k, seed),
        (_, _, Some(size)) => {
            let eps = epsilon_for_size(&data.points, size, seed)
                .ok_or_else(|| usage(format!("--size {size}: no cover radius gives exactly that many points")))?;
            SamplerConfig::epsilon(eps, seed)
        }
        _ => return Ok(None),
    };
    let (eps, rows) = at("sampler flags", cfg.select(&data.points))?;
    Ok(Some((eps, rows, cfg)))
}

fn cmd_subsample(a: SubsampleArgs) -> CliResult<()> {
    if !a.sampler.any() {
        return Err(usage("one of --epsilon, --kappa or --size is required"));
    }
    let data = load(&a.input)?;
    let (eps, rows, _) = select_support(&data, &a.sampler, a.seed)?
        .ok_or_else(|| usage("one of --epsilon, --kappa or --size is required"))?;
    info!("epsilon {eps} selects {} of {} rows", rows.len(), data.len());
    let text = serde_json::to_string(&rows).expect("index list serialises") + "\n";
    match &a.out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_train(a: TrainArgs) -> CliResult<()> {
    if a.support.is_none() && !a.sampler.any() {
        return Err(usage("one of --support, --epsilon, --kappa or --size is required"));
    }
    let data = load(&a.data)?;
    let (support, sampler, epsilon) = match &a.support {
        Some(path) => {
            let text = at(path.display(), std::fs::read_to_string(path).map_err(Error::from))?;
            let rows: Vec<usize> = at(path.display(), serde_json::from_str(&text).map_err(Error::from))?;
            (rows, None, None)
        }
        None => {
            let (eps, rows, cfg) = select_support(&data, &a.sampler, a.seed)?
                .ok_or_else(|| usage("one of --support, --epsilon, --kappa or --size is required"))?;
            (rows, Some(cfg), Some(eps))
        }
    };
    if let Some(&bad) = support.iter().find(|&&r| r >= data.len()) {
        return Err(usage(format!(
            "support row {bad} is out of range for {} data rows",
            data.len()
        )));
    }
    let config = TrainConfig {
        learning_rate: a.lr,
        epochs: a.epochs,
        seed: a.seed,
        init_mode: a.init,
        shuffle: true,
        radius_margin: a.radius_margin,
    };
    let (model, report) = at("train", train(&data.points, &data.labels, &support, &config))?;
    let prov = Provenance {
        train: config,
        sampler,
        epsilon,
    };
    at(a.out.display(), save_model(&model, &prov, &a.out))?;
    let last = report.epochs.last().copied();
    info!("trained on {} rows with {} support points", data.len(), model.space.support_len());
    print!(
        "{}",
        to_json(&json!({
            "support_size": model.space.support_len(),
            "epsilon": epsilon,
            "final_epoch": last,
        }))
    );
    Ok(())
}

fn cmd_eval(a: EvalArgs) -> CliResult<()> {
    let (model, _) = at(a.model.display(), load_model::<f64>(&a.model))?;
    let data = load(&a.data)?;
    let report = at(a.data.display(), evaluate(&model, &data.points, &data.labels))?;
    print!("{}", to_json(&report));
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> CliResult<()> {
    let (model, _) = at(a.model.display(), load_model::<f64>(&a.model))?;
    let points: Vec<(String, Vec<f64>)> = match &a.data {
        Some(path) => {
            let data = load(path)?;
            data.points
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("{} row {}", path.display(), i + 2), p.to_vec()))
                .collect()
        }
        None => a
            .point
            .iter()
            .map(|t| Ok((format!("--point {t:?}"), parse_point("--point", t)?)))
            .collect::<CliResult<_>>()?,
    };
    let mut out = Vec::with_capacity(points.len());
    for (context, p) in &points {
        check_dim(&model, p, context)?;
        let probs = at(context, model.forward(p))?;
        let label = model.encoding.label(smnn::model::argmax(&probs));
        out.push(json!({ "point": p, "label": label, "probabilities": probs }));
    }
    print!("{}", to_json(&out));
    Ok(())
}

fn cmd_explain(a: ExplainArgs) -> CliResult<()> {
    let (model, _) = at(a.model.display(), load_model::<f64>(&a.model))?;
    let context = format!("--point {:?}", a.point);
    let p = parse_point("--point", &a.point)?;
    check_dim(&model, &p, &context)?;
    let e = at(&context, explain(&model, &p))?;
    if let Some(path) = &a.svg {
        write(path, &render_explanation_svg(&e, model.encoding.labels()))?;
    }
    print!("{}", to_json(&e));
    Ok(())
}
