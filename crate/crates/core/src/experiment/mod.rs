//! Experiment runner: method sweeps over scenarios, team counts, noise
//! levels and trials, plus result tables and one-shot division.

mod io;
mod summary;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use io::{read_rows, read_rows_csv, read_rows_json, write_rows, write_rows_csv, write_rows_json, OutputFormat, SCHEMA_VERSION};
pub use summary::{summarize, write_summary, GroupField, Stats, SummaryRow};

use crate::cluster::{accuracy, kmeans, silhouette, InitMethod, KMeansConfig, TeamAssignment};
use crate::embed::{
    embed, embed_bundle, embed_concatenated, embed_single_modality, katz_similarity, AlphaPolicy, EmbeddingMatrix,
    KatzConfig,
};
use crate::error::{Error, Result};
use crate::graph::{load_bundle, GraphBundle, ModalityKind};
use crate::scenarios::{NoiseModel, NoiseSpec, Scenario, ScenarioSpec};
use crate::seed::{derive_seed, SeedPart};

/// An embedding method under comparison.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    /// Katz index of the weighted blend of all modalities.
    Multimodal,
    /// Katz embedding of one modality alone.
    Single(ModalityKind),
    /// Per-modality embeddings joined side by side.
    Concatenated,
}

impl Method {
    pub fn baselines() -> Vec<Method> {
        vec![
            Method::Multimodal,
            Method::Single(ModalityKind::Spatial),
            Method::Single(ModalityKind::Connectivity),
            Method::Single(ModalityKind::Hierarchy),
            Method::Concatenated,
        ]
    }

    /// Embeds `bundle` with `k` singular pairs per graph.
    pub fn embed(&self, bundle: &GraphBundle, katz: &KatzConfig, k: usize, scaled: bool) -> Result<EmbeddingMatrix> {
        match self {
            Method::Multimodal => embed_bundle(bundle, katz, k, scaled),
            Method::Single(kind) => {
                let m = bundle
                    .find_kind(kind)
                    .ok_or_else(|| Error::InvalidArgument(format!("bundle has no `{kind}` graph")))?;
                embed_single_modality(bundle, m, katz, k, scaled)
            }
            Method::Concatenated => embed_concatenated(bundle, katz, k, scaled),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Multimodal => f.write_str("multimodal"),
            Method::Single(kind) => write!(f, "single:{kind}"),
            Method::Concatenated => f.write_str("concatenated"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multimodal" => Ok(Method::Multimodal),
            "concatenated" => Ok(Method::Concatenated),
            _ => match s.strip_prefix("single:") {
                Some(kind) if !kind.is_empty() => Ok(Method::Single(ModalityKind::parse(kind))),
                _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
            },
        }
    }
}

impl TryFrom<String> for Method {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.to_string()
    }
}

/// Where the robots come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentInput {
    /// A bundle file; every trial reuses it.
    Bundle(PathBuf),
    /// A generator; every trial draws a fresh instance.
    Scenario(ScenarioSpec),
}

fn default_methods() -> Vec<Method> {
    vec![Method::Multimodal]
}

fn default_noise() -> Vec<f64> {
    vec![0.0]
}

fn default_trials() -> usize {
    1
}

fn default_restarts() -> usize {
    10
}

fn default_beta() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: ExperimentInput,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    pub c_values: Vec<usize>,
    /// Explicit decay; overrides `beta` when set.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Singular pairs per graph; defaults to the team count.
    #[serde(default)]
    pub k_dim: Option<usize>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default = "default_noise")]
    pub noise_levels: Vec<f64>,
    #[serde(default)]
    pub noise_model: NoiseModel,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub scaled: bool,
    #[serde(default = "default_init")]
    pub init: InitMethod,
    /// Record wall time per row; off by default so outputs are reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_init() -> InitMethod {
    InitMethod::PlusPlus
}

impl ExperimentConfig {
    pub fn new(input: ExperimentInput, c_values: Vec<usize>) -> Self {
        Self {
            input,
            methods: default_methods(),
            c_values,
            alpha: None,
            beta: default_beta(),
            k_dim: None,
            weights: None,
            noise_levels: default_noise(),
            noise_model: NoiseModel::Uniform,
            trials: 1,
            seed: 0,
            restarts: default_restarts(),
            scaled: false,
            init: InitMethod::PlusPlus,
            timing: false,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("experiment config: {e}")))
    }

    pub fn katz(&self) -> KatzConfig {
        let policy = match self.alpha {
            Some(a) => AlphaPolicy::Explicit(a),
            None => AlphaPolicy::Relative(self.beta),
        };
        KatzConfig { policy, ..KatzConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.c_values.is_empty() || self.c_values.contains(&0) {
            return bad("team counts must be a non-empty list of positive integers".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if self.noise_levels.is_empty() {
            return bad("at least one noise level is required".into());
        }
        for &eta in &self.noise_levels {
            NoiseSpec::new(eta, 0).validate()?;
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        if self.k_dim == Some(0) {
            return bad("dimension must be at least 1".into());
        }
        self.katz().validate()
    }

    fn scenario_id(&self) -> String {
        match &self.input {
            ExperimentInput::Bundle(p) => p.file_stem().map_or_else(|| "bundle".into(), |s| s.to_string_lossy().into_owned()),
            ExperimentInput::Scenario(spec) => spec.id(),
        }
    }
}

/// One (scenario, method, C, eta, trial) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub method: String,
    pub c: usize,
    pub eta: f64,
    pub trial: usize,
    pub silhouette: Option<f64>,
    pub accuracy: Option<f64>,
    pub n_iter: Option<usize>,
    pub wall_time_ms: Option<f64>,
    pub seed: u64,
    pub error: Option<String>,
}

/// Runs the full sweep. Configuration problems fail the call; failures inside
/// a single row are recorded in that row's `error` field.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let katz = cfg.katz();
    let scenario_id = cfg.scenario_id();
    let fixed = match &cfg.input {
        ExperimentInput::Bundle(path) => Some(Scenario::from_bundle(load_bundle(path)?)),
        ExperimentInput::Scenario(_) => None,
    };
    if let (Some(s), Some(w)) = (&fixed, &cfg.weights) {
        s.bundle.with_weights(w.clone())?;
    }
    if fixed.is_some() && cfg.noise_levels.iter().any(|&e| e > 0.0) {
        return Err(Error::InvalidArgument("distance noise needs a generated scenario, not a bundle file".into()));
    }

    let jobs: Vec<(usize, usize)> =
        (0..cfg.trials).flat_map(|t| (0..cfg.noise_levels.len()).map(move |e| (t, e))).collect();
    let mut rows: Vec<(usize, usize, usize, usize, ResultRow)> = jobs
        .par_iter()
        .flat_map_iter(|&(trial, ei)| {
            let eta = cfg.noise_levels[ei];
            let instance = instance_for(cfg, fixed.as_ref(), &scenario_id, trial, eta);
            let mut out = Vec::new();
            for (mi, method) in cfg.methods.iter().enumerate() {
                for (ci, &c) in cfg.c_values.iter().enumerate() {
                    let seed = derive_seed(
                        cfg.seed,
                        &[
                            SeedPart::Str("kmeans"),
                            SeedPart::Str(&scenario_id),
                            SeedPart::Str(&method.to_string()),
                            SeedPart::Int(c as u64),
                            SeedPart::Float(eta),
                            SeedPart::Int(trial as u64),
                        ],
                    );
                    let mut row = ResultRow {
                        scenario: scenario_id.clone(),
                        method: method.to_string(),
                        c,
                        eta,
                        trial,
                        silhouette: None,
                        accuracy: None,
                        n_iter: None,
                        wall_time_ms: None,
                        seed,
                        error: None,
                    };
                    let start = Instant::now();
                    match &instance {
                        Ok((bundle, scenario)) => {
                            if let Err(e) = score_row(cfg, &katz, method, bundle, scenario.truth(c), c, seed, &mut row) {
                                row.error = Some(e.to_string());
                            }
                        }
                        Err(e) => row.error = Some(e.clone()),
                    }
                    if cfg.timing {
                        row.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                    }
                    out.push((mi, ci, ei, trial, row));
                }
            }
            out
        })
        .collect();
    rows.sort_by_key(|&(mi, ci, ei, trial, _)| (mi, ci, ei, trial));
    Ok(rows.into_iter().map(|r| r.4).collect())
}

/// The (possibly noisy, re-weighted) bundle for one trial and noise level,
/// with the scenario it came from.
fn instance_for(
    cfg: &ExperimentConfig,
    fixed: Option<&Scenario>,
    scenario_id: &str,
    trial: usize,
    eta: f64,
) -> std::result::Result<(GraphBundle, Scenario), String> {
    let scenario = match (fixed, &cfg.input) {
        (Some(s), _) => s.clone(),
        (None, ExperimentInput::Scenario(spec)) => {
            let seed = derive_seed(
                cfg.seed,
                &[SeedPart::Str("scenario"), SeedPart::Str(scenario_id), SeedPart::Int(spec.seed()), SeedPart::Int(trial as u64)],
            );
            spec.with_seed(seed).generate().map_err(|e| e.to_string())?
        }
        (None, ExperimentInput::Bundle(_)) => unreachable!("bundle inputs are loaded up front"),
    };
    let noise_seed = derive_seed(
        cfg.seed,
        &[SeedPart::Str("noise"), SeedPart::Str(scenario_id), SeedPart::Float(eta), SeedPart::Int(trial as u64)],
    );
    let noise = NoiseSpec { level: eta, seed: noise_seed, model: cfg.noise_model };
    let mut bundle = scenario.with_noise(&noise).map_err(|e| e.to_string())?;
    if let Some(w) = &cfg.weights {
        bundle = bundle.with_weights(w.clone()).map_err(|e| e.to_string())?;
    }
    Ok((bundle, scenario))
}

#[allow(clippy::too_many_arguments)]
fn score_row(
    cfg: &ExperimentConfig,
    katz: &KatzConfig,
    method: &Method,
    bundle: &GraphBundle,
    truth: Option<&[usize]>,
    c: usize,
    seed: u64,
    row: &mut ResultRow,
) -> Result<()> {
    let k = cfg.k_dim.unwrap_or(c);
    if k > bundle.n() || c > bundle.n() {
        return Err(Error::InvalidArgument(format!("C = {c}, K = {k} exceed {} robots", bundle.n())));
    }
    let emb = method.embed(bundle, katz, k, cfg.scaled)?;
    let kcfg = KMeansConfig { c, seed, restarts: cfg.restarts, max_iter: 300, init: cfg.init };
    let teams = kmeans(emb.matrix(), &kcfg)?;
    row.n_iter = Some(teams.n_iter);
    if let Some(truth) = truth {
        row.accuracy = Some(accuracy(&teams.labels, truth)?);
    }
    row.silhouette = Some(silhouette(emb.matrix(), &teams.labels)?);
    Ok(())
}

/// Settings for a one-shot division.
#[derive(Debug, Clone, PartialEq)]
pub struct DivideOptions {
    pub c: usize,
    pub weights: Option<Vec<f64>>,
    pub katz: KatzConfig,
    /// Singular pairs; defaults to `c`.
    pub k: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub scaled: bool,
}

impl DivideOptions {
    pub fn new(c: usize) -> Self {
        Self { c, weights: None, katz: KatzConfig::default(), k: None, seed: 0, restarts: 10, scaled: false }
    }
}

/// Team assignment document produced by [`divide`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivideReport {
    pub n: usize,
    pub teams: usize,
    pub labels: Vec<usize>,
    pub team_sizes: Vec<usize>,
    pub silhouette: Option<f64>,
    pub accuracy: Option<f64>,
    pub inertia: f64,
    pub converged: bool,
    pub n_iter: usize,
    pub alpha: f64,
    pub spectral_radius: f64,
    pub diagnostics: Vec<String>,
}

/// Embeds a bundle and divides it into `opts.c` teams.
///
/// An undefined silhouette (e.g. one team) is reported as a diagnostic, not
/// an error; the labels are still returned.
pub fn divide(bundle: &GraphBundle, opts: &DivideOptions) -> Result<DivideReport> {
    let bundle = match &opts.weights {
        Some(w) => bundle.with_weights(w.clone())?,
        None => bundle.clone(),
    };
    let n = bundle.n();
    if opts.c == 0 || opts.c > n {
        return Err(Error::InvalidArgument(format!("team count {} must lie in [1, {n}]", opts.c)));
    }
    let k = opts.k.unwrap_or(opts.c).min(n);
    let s = katz_similarity(&bundle, &opts.katz)?;
    let emb = embed(&s, k, opts.scaled)?;
    let teams: TeamAssignment = kmeans(emb.matrix(), &KMeansConfig::new(opts.c, opts.seed).restarts(opts.restarts))?;
    let mut diagnostics = Vec::new();
    let silhouette = match silhouette(emb.matrix(), &teams.labels) {
        Ok(v) => Some(v),
        Err(e) => {
            diagnostics.push(e.to_string());
            None
        }
    };
    let accuracy = bundle.ground_truth().map(|t| accuracy(&teams.labels, t)).transpose()?;
    Ok(DivideReport {
        n,
        teams: opts.c,
        team_sizes: teams.team_sizes(),
        labels: teams.labels,
        silhouette,
        accuracy,
        inertia: teams.inertia,
        converged: teams.converged,
        n_iter: teams.n_iter,
        alpha: s.alpha(),
        spectral_radius: s.spectral_radius(),
        diagnostics,
    })
}
