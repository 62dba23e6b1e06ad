//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain or I/O error, 2 usage error. Every output
//! file records the tool version, the seed and the relevant configuration.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::detector::{evaluate, explain_json, plot_data_csv, DecisionPolicy, EvaluationReport, Execution};
use crate::feature_model::{fit, read_model, write_model, CompositeMode};
use crate::radar_data::{
    generate, inject_spoof, parse_csv, radar_frame, to_csv_string, train_test_split, Dataset, Feature, GeneratorConfig,
    SpoofSelection, DEFAULT_TRAIN_FRACTION, MOVING, STATIONARY,
};

pub const TOOL_VERSION: &str = concat!("radar-evidence ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Parser)]
#[command(
    name = "radar-evidence",
    version,
    about = "Evidential radar obstacle classification and spoof detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled radar dataset.
    Generate(GenerateArgs),
    /// Fit per-class Gaussian feature models.
    Fit(FitArgs),
    /// Flip the claimed class of selected records (label-flip spoofing).
    Inject(InjectArgs),
    /// Write one JSON explanation line per record.
    Classify(ClassifyArgs),
    /// Score a dataset and write a JSON report and plot data.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator config file (key = value); defaults to the well-separated preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of stationary records.
    #[arg(long)]
    pub count_s: Option<usize>,
    /// Number of moving records.
    #[arg(long)]
    pub count_m: Option<usize>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitPart {
    All,
    Train,
    Test,
}

impl SplitPart {
    fn name(self) -> &'static str {
        match self {
            SplitPart::All => "all",
            SplitPart::Train => "train",
            SplitPart::Test => "test",
        }
    }
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Seed of the train/test partition.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TRAIN_FRACTION, value_parser = parse_fraction)]
    pub train_fraction: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_parser = parse_features, default_value = "density,reflection,velocity")]
    pub features: Features,
    #[arg(long, value_parser = parse_composite_mode, default_value = "sum-of-singletons")]
    pub composite_mode: CompositeMode,
    /// Part of the dataset to fit on.
    #[arg(long, value_enum, default_value_t = SplitPart::Train)]
    pub split: SplitPart,
    #[command(flatten)]
    pub partition: SplitArgs,
}

#[derive(Debug, Args)]
pub struct InjectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Number of records to spoof, drawn at random.
    #[arg(long, conflicts_with = "indices", required_unless_present = "indices")]
    pub count: Option<usize>,
    /// Explicit record positions to spoof (comma-separated, 0-based).
    #[arg(long, value_delimiter = ',')]
    pub indices: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_parser = parse_features, default_value = "velocity,reflection")]
    pub features: Features,
    /// Full-frame mass above which the decision is ambiguous.
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    pub tau: f64,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Report file (JSON).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-record mass values for plotting (CSV).
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    #[arg(long, value_parser = parse_features, default_value = "velocity,reflection")]
    pub features: Features,
    #[arg(long, default_value_t = 0.5, value_parser = parse_fraction)]
    pub tau: f64,
    /// Part of the dataset to evaluate.
    #[arg(long, value_enum, default_value_t = SplitPart::All)]
    pub split: SplitPart,
    #[command(flatten)]
    pub partition: SplitArgs,
    /// Classify records one at a time instead of in parallel.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Features(pub Vec<Feature>);

fn parse_features(text: &str) -> Result<Features, String> {
    let features = Feature::parse_list(text).map_err(|e| e.to_string())?;
    if features.is_empty() {
        return Err("at least one feature is required".into());
    }
    Ok(Features(features))
}

fn parse_composite_mode(text: &str) -> Result<CompositeMode, String> {
    text.parse()
}

fn parse_fraction(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|_| format!("{text:?} is not a number"))?;
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("{value} is outside [0, 1]"))
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Inject(args) => cmd_inject(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Evaluate(args) => cmd_evaluate(args),
    }
}

fn check_input(path: &Path) -> anyhow::Result<()> {
    if !path.is_file() {
        bail!("input file {} does not exist", path.display());
    }
    Ok(())
}

fn check_output(path: &Path) -> anyhow::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            bail!("output directory {} does not exist", dir.display())
        }
        _ => Ok(()),
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_dataset(path: &Path) -> anyhow::Result<(Dataset, String)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let dataset = parse_csv(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((dataset, sha256_hex(text.as_bytes())))
}

fn write_output(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn select(dataset: &Dataset, part: SplitPart, split: &SplitArgs) -> anyhow::Result<Dataset> {
    if part == SplitPart::All {
        return Ok(dataset.clone());
    }
    let partition = train_test_split(dataset.len(), split.train_fraction, split.seed)?;
    let indices = if part == SplitPart::Train {
        &partition.train
    } else {
        &partition.test
    };
    Ok(dataset.subset(indices)?)
}

fn split_notes(part: SplitPart, split: &SplitArgs) -> Vec<String> {
    vec![
        format!("seed: {}", split.seed),
        format!("split: {}", part.name()),
        format!("train_fraction: {}", split.train_fraction),
    ]
}

pub fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    if let Some(config) = &args.config {
        check_input(config)?;
    }
    check_output(&args.output)?;
    let mut config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            GeneratorConfig::parse(&text)?
        }
        None => GeneratorConfig::well_separated(0, 100, 100),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    for (label, count) in [(STATIONARY, args.count_s), (MOVING, args.count_m)] {
        if let Some(count) = count {
            match config.class_mut(label) {
                Some(class) => class.count = count,
                None => bail!("generator config has no class {label:?}"),
            }
        }
    }

    let mut dataset = generate(&config)?;
    let mut notes = vec![
        format!("tool: {TOOL_VERSION}"),
        "command: generate".to_owned(),
        format!("seed: {}", config.seed),
    ];
    notes.extend(config.to_text().lines().map(|l| format!("config: {l}")));
    dataset.provenance = notes.join("\n");

    let text = to_csv_string(&dataset)?;
    write_output(&args.output, &text)?;
    println!("{}  {}", sha256_hex(text.as_bytes()), args.output.display());
    Ok(())
}

pub fn cmd_fit(args: &FitArgs) -> anyhow::Result<()> {
    check_input(&args.input)?;
    check_output(&args.output)?;
    let (dataset, input_hash) = read_dataset(&args.input)?;
    let training = select(&dataset, args.split, &args.partition)?;

    let frame = radar_frame();
    for set in frame.non_empty_sets() {
        let label = frame.set_label(set);
        let n = training.records.iter().filter(|r| r.label == label).count();
        eprintln!("class {label}: {n} training records");
    }
    let model =
        fit(&training.records, &args.features.0, &frame, args.composite_mode).context("fitting feature model")?;

    let mut notes = vec![
        format!("tool: {TOOL_VERSION}"),
        "command: fit".to_owned(),
        format!("input_sha256: {input_hash}"),
        format!("records: {}", training.len()),
    ];
    notes.extend(split_notes(args.split, &args.partition));
    write_model(&model, &notes, &args.output).with_context(|| format!("writing {}", args.output.display()))?;
    Ok(())
}

pub fn cmd_inject(args: &InjectArgs) -> anyhow::Result<()> {
    check_input(&args.input)?;
    check_output(&args.output)?;
    let (dataset, _) = read_dataset(&args.input)?;
    let (selection, what) = match (&args.indices, args.count) {
        (Some(indices), _) => (SpoofSelection::Indices(indices.clone()), format!("indices {indices:?}")),
        (None, Some(count)) => (
            SpoofSelection::Random { count, seed: args.seed },
            format!("count {count}"),
        ),
        (None, None) => bail!("either --count or --indices is required"),
    };
    let mut spoofed = inject_spoof(&dataset, &selection)?;
    let notes = [
        format!("tool: {TOOL_VERSION}"),
        "command: inject".to_owned(),
        format!("seed: {}", args.seed),
        format!("spoof: {what}"),
    ];
    if !spoofed.provenance.is_empty() {
        spoofed.provenance.push('\n');
    }
    spoofed.provenance.push_str(&notes.join("\n"));
    write_output(&args.output, &to_csv_string(&spoofed)?)?;
    eprintln!(
        "{} of {} records spoofed",
        spoofed.records.iter().filter(|r| r.spoofed).count(),
        spoofed.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'a str,
    command: &'a str,
    seed: Option<u64>,
    model_sha256: String,
    input_sha256: String,
    features: String,
    tau: f64,
    split: Option<&'a str>,
    train_fraction: Option<f64>,
}

pub fn cmd_classify(args: &ClassifyArgs) -> anyhow::Result<()> {
    check_input(&args.model)?;
    check_input(&args.input)?;
    check_output(&args.output)?;
    let model_text = fs::read(&args.model).with_context(|| format!("reading {}", args.model.display()))?;
    let model = read_model(&args.model).with_context(|| format!("loading {}", args.model.display()))?;
    let (dataset, input_hash) = read_dataset(&args.input)?;
    let policy = DecisionPolicy::with_threshold(args.tau)?;

    // classify writes every record, so a dataset with no rows gives just the header line.
    let verdicts = if dataset.is_empty() {
        Vec::new()
    } else {
        evaluate(&model, &dataset, &args.features.0, &policy, Execution::Parallel)?.verdicts
    };
    let provenance = Provenance {
        tool: TOOL_VERSION,
        command: "classify",
        seed: None,
        model_sha256: sha256_hex(&model_text),
        input_sha256: input_hash,
        features: Feature::join(&args.features.0),
        tau: args.tau,
        split: None,
        train_fraction: None,
    };
    let mut out = serde_json::to_string(&serde_json::json!({ "provenance": provenance }))?;
    out.push('\n');
    for verdict in &verdicts {
        out.push_str(&explain_json(verdict));
        out.push('\n');
    }
    write_output(&args.output, &out)?;
    let flagged = verdicts.iter().filter(|v| v.spoof_flagged).count();
    eprintln!("{} records classified, {flagged} flagged as spoofed", verdicts.len());
    Ok(())
}

#[derive(Serialize)]
struct ReportFile<'a> {
    provenance: Provenance<'a>,
    report: &'a EvaluationReport,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> anyhow::Result<()> {
    check_input(&args.model)?;
    check_input(&args.input)?;
    check_output(&args.output)?;
    if let Some(plot) = &args.plot_data {
        check_output(plot)?;
    }
    let model_text = fs::read(&args.model).with_context(|| format!("reading {}", args.model.display()))?;
    let model = read_model(&args.model).with_context(|| format!("loading {}", args.model.display()))?;
    let (dataset, input_hash) = read_dataset(&args.input)?;
    let dataset = select(&dataset, args.split, &args.partition)?;
    let policy = DecisionPolicy::with_threshold(args.tau)?;
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let evaluation = evaluate(&model, &dataset, &args.features.0, &policy, execution)?;

    let provenance = Provenance {
        tool: TOOL_VERSION,
        command: "evaluate",
        seed: Some(args.partition.seed),
        model_sha256: sha256_hex(&model_text),
        input_sha256: input_hash,
        features: Feature::join(&args.features.0),
        tau: args.tau,
        split: Some(args.split.name()),
        train_fraction: Some(args.partition.train_fraction),
    };
    let notes = vec![
        format!("tool: {TOOL_VERSION}"),
        "command: evaluate".to_owned(),
        format!("model_sha256: {}", provenance.model_sha256),
        format!("input_sha256: {}", provenance.input_sha256),
        format!("features: {}", provenance.features),
        format!("tau: {}", args.tau),
    ]
    .into_iter()
    .chain(split_notes(args.split, &args.partition))
    .collect::<Vec<_>>();

    let report = &evaluation.report;
    let mut json = serde_json::to_string_pretty(&ReportFile { provenance, report })?;
    json.push('\n');
    write_output(&args.output, &json)?;
    if let Some(plot) = &args.plot_data {
        write_output(plot, &plot_data_csv(&dataset, &evaluation.verdicts, &notes))?;
    }

    let pct = |r: Option<f64>| r.map_or("n/a".to_owned(), |v| format!("{:.2}%", 100.0 * v));
    eprintln!(
        "accuracy {} ({}/{}), spoofs detected {}/{}, ambiguous {}, features {}",
        pct(report.accuracy),
        report.correct,
        report.scored_records,
        report.spoofs_detected,
        report.spoofed_records,
        report.ambiguous,
        Feature::join(&report.features),
    );
    Ok(())
}
