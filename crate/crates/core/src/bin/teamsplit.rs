use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use teamsplit::embed::{AlphaPolicy, KatzConfig};
use teamsplit::experiment::{
    divide, read_rows, run_experiment, summarize, write_rows, write_summary, DivideOptions, ExperimentConfig,
    ExperimentInput, GroupField, Method, OutputFormat,
};
use teamsplit::graph::{load_bundle, save_bundle, GraphBundle};
use teamsplit::scenarios::ScenarioSpec;

/// Divide multi-robot systems into teams with a multimodal Katz embedding.
#[derive(Parser)]
#[command(name = "teamsplit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Divide one system into teams and print the assignment.
    Divide(DivideArgs),
    /// Sweep methods, team counts, noise levels and trials.
    Experiment(ExperimentArgs),
    /// Generate a scenario and write its bundle.
    Generate(GenerateArgs),
    /// Aggregate a result table.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct KatzArgs {
    /// Explicit Katz decay; must satisfy alpha * rho < 1.
    #[arg(long, conflicts_with = "beta")]
    alpha: Option<f64>,
    /// Decay relative to the spectral radius, alpha = beta / rho.
    #[arg(long)]
    beta: Option<f64>,
}

impl KatzArgs {
    fn config(&self) -> KatzConfig {
        match (self.alpha, self.beta) {
            (Some(a), _) => KatzConfig { policy: AlphaPolicy::Explicit(a), ..KatzConfig::default() },
            (None, Some(b)) => KatzConfig { policy: AlphaPolicy::Relative(b), ..KatzConfig::default() },
            (None, None) => KatzConfig::default(),
        }
    }
}

#[derive(Args)]
struct DivideArgs {
    /// Bundle JSON file.
    #[arg(long, required_unless_present = "scenario")]
    input: Option<PathBuf>,
    /// Scenario spec file or shorthand, used instead of a bundle.
    #[arg(long, conflicts_with = "input")]
    scenario: Option<String>,
    /// Number of teams.
    #[arg(long)]
    teams: usize,
    /// Modality weights, comma separated, summing to 1.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[command(flatten)]
    katz: KatzArgs,
    /// Singular pairs per side; the embedding has twice this many columns.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Scale singular vectors by the square root of their singular values.
    #[arg(long)]
    scaled: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundle JSON file.
    #[arg(long, conflicts_with = "scenario")]
    input: Option<PathBuf>,
    /// Scenario spec file or shorthand such as `platoon_vee` or `random:50:3`.
    #[arg(long)]
    scenario: Option<String>,
    /// Methods, comma separated, or `all`.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Team counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    teams: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[command(flatten)]
    katz: KatzArgs,
    #[arg(long)]
    dim: Option<usize>,
    /// Distance noise levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    noise: Option<Vec<f64>>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    scaled: bool,
    /// Record per-row wall time (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Scenario spec file or shorthand.
    #[arg(long)]
    scenario: String,
    /// Overrides the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Bundle JSON destination.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Result table (.csv or .json).
    #[arg(long)]
    input: PathBuf,
    /// Grouping fields, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "scenario,method,c,eta")]
    group_by: Vec<String>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_input(input: Option<&Path>, scenario: Option<&str>) -> Result<GraphBundle> {
    match (input, scenario) {
        (Some(p), _) => Ok(load_bundle(p).with_context(|| format!("loading {}", p.display()))?),
        (None, Some(s)) => Ok(ScenarioSpec::load_or_parse(s)?.generate()?.bundle),
        (None, None) => bail!("either --input or --scenario is required"),
    }
}

fn cmd_divide(args: DivideArgs) -> Result<ExitCode> {
    let bundle = load_input(args.input.as_deref(), args.scenario.as_deref())?;
    let opts = DivideOptions {
        c: args.teams,
        weights: args.weights,
        katz: args.katz.config(),
        k: args.dim,
        seed: args.seed,
        restarts: args.restarts,
        scaled: args.scaled,
    };
    let report = divide(&bundle, &opts)?;
    for d in &report.diagnostics {
        warn!("{d}");
        eprintln!("note: {d}");
    }
    let mut out = sink(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    if names.iter().any(|n| n == "all") {
        return Ok(Method::baselines());
    }
    Ok(names.iter().map(|n| n.parse()).collect::<teamsplit::Result<_>>()?)
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let input = match (&args.input, &args.scenario) {
        (Some(p), _) => Some(ExperimentInput::Bundle(p.clone())),
        (None, Some(s)) => Some(ExperimentInput::Scenario(ScenarioSpec::load_or_parse(s)?)),
        (None, None) => None,
    };
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(input) = input {
                cfg.input = input;
            }
            cfg
        }
        None => {
            let Some(input) = input else { bail!("one of --config, --input or --scenario is required") };
            let Some(teams) = &args.teams else { bail!("--teams is required without --config") };
            ExperimentConfig::new(input, teams.clone())
        }
    };
    if let Some(m) = &args.methods {
        cfg.methods = parse_methods(m)?;
    }
    if let Some(t) = &args.teams {
        cfg.c_values = t.clone();
    }
    if args.weights.is_some() {
        cfg.weights = args.weights.clone();
    }
    if let Some(a) = args.katz.alpha {
        cfg.alpha = Some(a);
    }
    if let Some(b) = args.katz.beta {
        cfg.alpha = None;
        cfg.beta = b;
    }
    if args.dim.is_some() {
        cfg.k_dim = args.dim;
    }
    if let Some(n) = &args.noise {
        cfg.noise_levels = n.clone();
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    cfg.scaled |= args.scaled;
    cfg.timing |= args.timing;
    if args.output.is_some() {
        cfg.output = args.output.clone();
    }
    match &args.format {
        Some(f) => cfg.format = f.parse()?,
        None => {
            if let (Some(out), None) = (&args.output, &args.config) {
                cfg.format = OutputFormat::from_path(out);
            }
        }
    }
    Ok(cfg)
}

fn cmd_experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let cfg = experiment_config(&args)?;
    let rows = run_experiment(&cfg)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    info!("{} rows, {failed} failed", rows.len());
    let mut out = sink(cfg.output.as_deref())?;
    write_rows(&rows, cfg.format, &mut out)?;
    out.flush()?;
    if failed > 0 {
        eprintln!("{failed} of {} rows failed; see the error column", rows.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_generate(args: GenerateArgs) -> Result<ExitCode> {
    let mut spec = ScenarioSpec::load_or_parse(&args.scenario)?;
    if let Some(seed) = args.seed {
        spec = spec.with_seed(seed);
    }
    let scenario = spec.generate()?;
    save_bundle(&scenario.bundle, &args.output).with_context(|| format!("writing {}", args.output.display()))?;
    info!("wrote {} robots to {}", scenario.bundle.n(), args.output.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_summarize(args: SummarizeArgs) -> Result<ExitCode> {
    let fields = args.group_by.iter().map(|g| g.parse()).collect::<teamsplit::Result<Vec<GroupField>>>()?;
    let rows = read_rows(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let summary = summarize(&rows, &fields)?;
    let mut out = sink(args.output.as_deref())?;
    write_summary(&summary, &fields, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Divide(a) => cmd_divide(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Summarize(a) => cmd_summarize(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
