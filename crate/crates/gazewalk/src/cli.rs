//! Command-line front end: configuration schema, the five pipelines
//! (`simulate`, `saliency`, `fit`, `envelope`, `ci`) and their artifacts.
//!
//! All numerics live in the library; commands only wire files to library
//! calls. Every command writes a `manifest.json` echoing its fully resolved
//! inputs, and re-running a command from its manifest produces byte-identical
//! CSV/JSON outputs. Randomized commands require an explicit `--seed`.
//!
//! Exit codes: 0 success, 2 configuration/validation error, 3 runtime or
//! numerical error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::infer::{bootstrap_ci, fit_profile, FitFamily, FitResult};
use crate::io::{
    read_raster_json, read_raster_text, read_sequences_csv, write_band_csv, write_curve_csv,
    write_curve_svg, write_raster_json, write_sequences_csv,
};
use crate::quad::QuadratureGrid;
use crate::rng::RngSpec;
use crate::saliency::{constant_map, default_bandwidth, estimate_saliency, SaliencyMap};
use crate::sim::{simulate_batch, FirstMode, SimulationConfig};
use crate::summary::{band_exceedance, compute_curve, envelope_from_curves, StatisticTag};
use crate::types::{CoverageType, FixationSequence, ModelSpec, Point, Window};
use crate::Result;

// ---------------------------------------------------------------------------
// Configuration schema
// ---------------------------------------------------------------------------

/// Where the saliency map alpha(x) comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SaliencySource {
    /// Homogeneous scene, alpha = 1.
    #[default]
    Constant,
    /// A raster file: JSON (window + values) or plain text grid.
    Raster { path: PathBuf },
    /// Kernel estimate from auxiliary fixation CSV data.
    Estimate {
        data: PathBuf,
        #[serde(default)]
        bandwidth: Option<f64>,
        #[serde(default)]
        nx: Option<usize>,
        #[serde(default)]
        ny: Option<usize>,
        #[serde(default)]
        exclude_subject: Option<String>,
    },
}

/// Quadrature grid dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDims {
    pub nx: usize,
    pub ny: usize,
}

/// The JSON run configuration shared by all commands. Unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub window: Window,
    /// Fully parameterized model (simulate / envelope).
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub saliency: SaliencySource,
    /// Sequence length for simulation.
    #[serde(default)]
    pub n: Option<usize>,
    /// Number of realizations / envelope replicates.
    #[serde(default)]
    pub m: Option<usize>,
    /// Conditioning points for the start of each realization.
    #[serde(default)]
    pub first: Option<Vec<Point>>,
    /// Interaction radius for recurrence models and ball summaries.
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub quadrature: Option<GridDims>,
    /// Scale grid: sigma in length units (or tau for the adapted family).
    #[serde(default)]
    pub scale_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub interaction_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// Use only the first `n_use` fixations of each data sequence.
    #[serde(default)]
    pub n_use: Option<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.window.validate()?;
        Ok(cfg)
    }

    /// Default interaction radius: 0.1 of the longer window side (the unit
    /// square's conventional r = 0.1 scaled to the window).
    pub fn radius(&self) -> f64 {
        self.radius
            .unwrap_or_else(|| 0.1 * self.window.longer_side())
    }

    pub fn quad_grid(&self, map: &SaliencyMap) -> Result<QuadratureGrid> {
        match self.quadrature {
            Some(GridDims { nx, ny }) => QuadratureGrid::new(&self.window, nx, ny, map),
            None => QuadratureGrid::with_default_dims(&self.window, map),
        }
    }

    pub fn saliency_map(&self) -> Result<SaliencyMap> {
        match &self.saliency {
            SaliencySource::Constant => Ok(constant_map(&self.window)),
            SaliencySource::Raster { path } => {
                if path.extension().is_some_and(|e| e == "json") {
                    read_raster_json(path)
                } else {
                    read_raster_text(path, &self.window)
                }
            }
            SaliencySource::Estimate {
                data,
                bandwidth,
                nx,
                ny,
                exclude_subject,
            } => {
                let mut aux = read_sequences_csv(data, &self.window)?;
                if let Some(excl) = exclude_subject {
                    aux.retain(|s| s.subject.as_deref() != Some(excl.as_str()));
                }
                if aux.is_empty() {
                    return Err(Error::NoAuxiliaryData);
                }
                let bw = bandwidth.unwrap_or_else(|| default_bandwidth(&self.window));
                let (dx, dy) = QuadratureGrid::default_dims(&self.window);
                estimate_saliency(&aux, bw, &self.window, nx.unwrap_or(dx), ny.unwrap_or(dy))
            }
        }
    }
}

impl Window {
    fn validate(&self) -> Result<()> {
        Window::new(self.a, self.b, self.c, self.d).map(|_| ())
    }
}

/// Default sigma grid: the pixel-window grid 60, 80, ..., 400 when the
/// window is pixel-scale, else 0.05, 0.10, ..., 1.00.
pub fn default_scale_grid(w: &Window) -> Vec<f64> {
    if w.longer_side() > 10.0 {
        (3..=20).map(|i| i as f64 * 20.0).collect()
    } else {
        (1..=20).map(|i| i as f64 * 0.05).collect()
    }
}

/// Default interaction grid for rho / theta: 0.05, 0.10, ..., 0.95.
pub fn default_interaction_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

/// Default kappa grid for the adapted family: 0.0, 0.5, ..., 10.0.
pub fn default_kappa_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.5).collect()
}

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Parser)]
#[command(
    name = "gazewalk",
    about = "Simulate, fit and validate self-interacting sequential point process models",
    version
)]
pub struct Cli {
    /// Cap the number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate realizations of a configured model as CSV sequences.
    Simulate(SimulateArgs),
    /// Estimate a saliency raster from auxiliary fixation data.
    Saliency(SaliencyArgs),
    /// Fit a model family to a data sequence by profile likelihood.
    Fit(FitArgs),
    /// Summary-statistic envelope test of a model against a data sequence.
    Envelope(EnvelopeArgs),
    /// Parametric-bootstrap confidence intervals for a fitted model.
    Ci(CiArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// RNG seed (required: no wall-clock default).
    #[arg(long)]
    pub seed: u64,
    /// Output directory (overrides the config's output_dir).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SaliencyArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Auxiliary fixation CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Kernel bandwidth in window length units.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Raster dimensions as NXxNY, e.g. 128x96.
    #[arg(long)]
    pub grid: Option<String>,
    /// Drop this subject's rows before estimating.
    #[arg(long)]
    pub exclude_subject: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Model family: hull | recurrence | adapted.
    #[arg(long)]
    pub family: Option<String>,
    /// Submodel shorthand 1..4 for the recurrence family.
    #[arg(long)]
    pub model: Option<u8>,
    /// Coverage for the adapted family: hull | ball.
    #[arg(long)]
    pub coverage: Option<String>,
    /// Use only the first N fixations.
    #[arg(long)]
    pub n_use: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Number of replicate simulations for the band.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n_use: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CiArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub b: usize,
    #[arg(long, default_value_t = 0.9)]
    pub level: f64,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub model: Option<u8>,
    #[arg(long)]
    pub coverage: Option<String>,
    #[arg(long)]
    pub n_use: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse argv, dispatch, and map errors to exit codes.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // Ignore failure: the global pool may already exist in-process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Saliency(args) => cmd_saliency(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Envelope(args) => cmd_envelope(args),
        Command::Ci(args) => cmd_ci(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn out_dir(flag: &Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf> {
    let mut dir = flag
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    if dir.as_os_str().is_empty() {
        dir = PathBuf::from(".");
    }
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_manifest<T: Serialize>(dir: &Path, command: &str, resolved: &T) -> Result<()> {
    let manifest = serde_json::json!({
        "command": command,
        "resolved": resolved,
    });
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Load the data CSV and keep the first sequence, truncated to `n_use`.
fn load_data_sequence(path: &Path, cfg: &RunConfig, n_use: Option<usize>) -> Result<FixationSequence> {
    let mut seqs = read_sequences_csv(path, &cfg.window)?;
    let mut seq = seqs.remove(0);
    if let Some(keep) = n_use.or(cfg.n_use) {
        if keep == 0 {
            return Err(Error::Config("n_use must be positive".into()));
        }
        seq.points.truncate(keep);
        if let Some(ts) = seq.times_ms.as_mut() {
            ts.truncate(keep);
        }
    }
    seq.validate()?;
    Ok(seq)
}

/// Resolve the family + grids for `fit`/`ci` from flags and config.
fn resolve_family(
    cfg: &RunConfig,
    family: &Option<String>,
    model: &Option<u8>,
    coverage: &Option<String>,
) -> Result<(FitFamily, Vec<f64>, Vec<f64>)> {
    let scale = cfg
        .scale_grid
        .clone()
        .unwrap_or_else(|| default_scale_grid(&cfg.window));
    let inter = cfg
        .interaction_grid
        .clone()
        .unwrap_or_else(default_interaction_grid);
    if let Some(m) = model {
        let radius = cfg.radius();
        let fam = |flat| FitFamily::RejectionRecurrence {
            radius,
            flat_kernel: flat,
        };
        return Ok(match m {
            1 => (fam(true), vec![], vec![0.5]),
            2 => (fam(false), scale, vec![0.5]),
            3 => (fam(true), vec![], inter),
            4 => (fam(false), scale, inter),
            other => {
                return Err(Error::Config(format!(
                    "--model must be 1..4, got {other}"
                )))
            }
        });
    }
    match family.as_deref() {
        Some("hull") => Ok((FitFamily::RejectionHull, scale, inter)),
        Some("recurrence") => Ok((
            FitFamily::RejectionRecurrence {
                radius: cfg.radius(),
                flat_kernel: false,
            },
            scale,
            inter,
        )),
        Some("adapted") => {
            let cov = match coverage.as_deref() {
                None | Some("hull") => CoverageType::Hull,
                Some("ball") => CoverageType::Ball {
                    radius: cfg.radius(),
                },
                Some(other) => {
                    return Err(Error::Config(format!(
                        "--coverage must be hull or ball, got {other}"
                    )))
                }
            };
            let kappa = cfg
                .interaction_grid
                .clone()
                .unwrap_or_else(default_kappa_grid);
            Ok((FitFamily::HistoryAdapted { coverage: cov }, scale, kappa))
        }
        Some(other) => Err(Error::Config(format!(
            "--family must be hull, recurrence or adapted, got {other}"
        ))),
        None => Err(Error::Config(
            "specify --family or --model for fitting".into(),
        )),
    }
}

fn run_fit(
    cfg: &RunConfig,
    data: &Path,
    family: &Option<String>,
    model: &Option<u8>,
    coverage: &Option<String>,
    n_use: Option<usize>,
) -> Result<(FixationSequence, SaliencyMap, QuadratureGrid, FitResult)> {
    let seq = load_data_sequence(data, cfg, n_use)?;
    let map = cfg.saliency_map()?;
    let quad = cfg.quad_grid(&map)?;
    let (fam, scale_grid, inter_grid) = resolve_family(cfg, family, model, coverage)?;
    let max_iter = cfg.max_iter.unwrap_or(10);
    let fit = fit_profile(&seq, fam, &scale_grid, &inter_grid, &map, &quad, max_iter)?;
    Ok((seq, map, quad, fit))
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let dir = out_dir(&args.out, &cfg)?;
    let model = cfg
        .model
        .ok_or_else(|| Error::Config("simulate requires a model in the config".into()))?;
    let n = cfg
        .n
        .ok_or_else(|| Error::Config("simulate requires n in the config".into()))?;
    let m = cfg.m.unwrap_or(1);
    let map = cfg.saliency_map()?;
    let first = match &cfg.first {
        Some(points) => FirstMode::ConditionOn(points.clone()),
        None => FirstMode::DrawFromSaliency,
    };
    let sim_cfg = SimulationConfig {
        n,
        first,
        rng: RngSpec::new(args.seed, 0),
        model,
    };
    let seqs = simulate_batch(&sim_cfg, &map, m)?;
    for (i, seq) in seqs.iter().enumerate() {
        let mut named = seq.clone();
        named.subject = Some(format!("seq{i}"));
        write_sequences_csv(&dir.join(format!("seq_{i:03}.csv")), &[named])?;
    }
    write_manifest(
        &dir,
        "simulate",
        &serde_json::json!({ "config": cfg, "seed": args.seed }),
    )
}

pub fn cmd_saliency(args: &SaliencyArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let dir = out_dir(&args.out.as_ref().and_then(|p| p.parent().map(PathBuf::from)), &cfg)?;
    let mut aux = read_sequences_csv(&args.data, &cfg.window)?;
    if let Some(excl) = &args.exclude_subject {
        aux.retain(|s| s.subject.as_deref() != Some(excl.as_str()));
    }
    if aux.is_empty() {
        return Err(Error::NoAuxiliaryData);
    }
    let bw = args
        .bandwidth
        .unwrap_or_else(|| default_bandwidth(&cfg.window));
    let (dx, dy) = QuadratureGrid::default_dims(&cfg.window);
    let (nx, ny) = match &args.grid {
        Some(spec) => parse_dims(spec)?,
        None => (dx, dy),
    };
    let map = estimate_saliency(&aux, bw, &cfg.window, nx, ny)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| dir.join("saliency.json"));
    write_raster_json(&out, &map)?;
    write_manifest(
        &dir,
        "saliency",
        &serde_json::json!({
            "config": cfg,
            "data": args.data,
            "bandwidth": bw,
            "nx": nx,
            "ny": ny,
            "exclude_subject": args.exclude_subject,
            "out": out,
        }),
    )
}

fn parse_dims(spec: &str) -> Result<(usize, usize)> {
    let mut it = spec.split('x');
    let parse = |tok: Option<&str>| -> Result<usize> {
        tok.and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Config(format!("bad grid spec {spec:?}; expected NXxNY")))
    };
    let nx = parse(it.next())?;
    let ny = parse(it.next())?;
    if it.next().is_some() {
        return Err(Error::Config(format!("bad grid spec {spec:?}")));
    }
    Ok((nx, ny))
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let dir = out_dir(&args.out, &cfg)?;
    let (_, _, _, fit) = run_fit(
        &cfg,
        &args.data,
        &args.family,
        &args.model,
        &args.coverage,
        args.n_use,
    )?;
    write_json(&dir.join("fit.json"), &fit)?;
    write_manifest(
        &dir,
        "fit",
        &serde_json::json!({
            "config": cfg,
            "data": args.data,
            "family": args.family,
            "model": args.model,
            "coverage": args.coverage,
            "n_use": args.n_use,
        }),
    )
}

pub fn cmd_envelope(args: &EnvelopeArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let dir = out_dir(&args.out, &cfg)?;
    let seq = load_data_sequence(&args.data, &cfg, args.n_use)?;
    if seq.len() < 3 {
        return Err(Error::HistoryTooShort {
            have: seq.len(),
            need: 3,
        });
    }
    let model = cfg
        .model
        .ok_or_else(|| Error::Config("envelope requires a model in the config".into()))?;
    let map = cfg.saliency_map()?;
    let m = args.m.or(cfg.m).unwrap_or(99);
    if m < 2 {
        return Err(Error::Config("envelope needs at least 2 replicates".into()));
    }
    let r = cfg.radius();
    // Replicates are conditioned on the data's first two fixations.
    let sim_cfg = SimulationConfig {
        n: seq.len(),
        first: FirstMode::ConditionOn(seq.points[..2].to_vec()),
        rng: RngSpec::new(args.seed, 0),
        model,
    };
    let replicas = simulate_batch(&sim_cfg, &map, m)?;

    let stats = [
        StatisticTag::BallCoverage { radius: r },
        StatisticTag::HullCoverage,
        StatisticTag::ScanpathLength,
        StatisticTag::CumulativeRecurrence { radius: r },
    ];
    let mut report = serde_json::Map::new();
    for tag in stats {
        let data_curve = compute_curve(&seq, tag, false)?;
        let curves = replicas
            .iter()
            .map(|s| compute_curve(s, tag, false))
            .collect::<Result<Vec<_>>>()?;
        let band = envelope_from_curves(&curves)?;
        let exc = band_exceedance(&data_curve, &band)?;
        let name = tag.name();
        write_curve_csv(&dir.join(format!("curve_{name}.csv")), &data_curve)?;
        write_band_csv(&dir.join(format!("band_{name}.csv")), &band)?;
        write_curve_svg(&dir.join(format!("plot_{name}.svg")), &data_curve, Some(&band))?;
        report.insert(name.to_string(), serde_json::to_value(&exc)?);
    }
    write_json(&dir.join("exceedance.json"), &report)?;
    write_manifest(
        &dir,
        "envelope",
        &serde_json::json!({
            "config": cfg,
            "data": args.data,
            "seed": args.seed,
            "m": m,
            "n_use": args.n_use,
        }),
    )
}

pub fn cmd_ci(args: &CiArgs) -> Result<()> {
    let cfg = RunConfig::load(&args.config)?;
    let dir = out_dir(&args.out, &cfg)?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(Error::ParamOutOfRange {
            name: "level",
            value: args.level,
        });
    }
    let (seq, map, quad, fit) = run_fit(
        &cfg,
        &args.data,
        &args.family,
        &args.model,
        &args.coverage,
        args.n_use,
    )?;
    let ci = bootstrap_ci(
        &seq,
        &fit,
        args.b,
        args.level,
        RngSpec::new(args.seed, 0),
        &map,
        &quad,
        cfg.max_iter.unwrap_or(10),
    )?;
    write_json(&dir.join("fit.json"), &fit)?;
    write_json(&dir.join("ci.json"), &ci)?;
    write_manifest(
        &dir,
        "ci",
        &serde_json::json!({
            "config": cfg,
            "data": args.data,
            "seed": args.seed,
            "b": args.b,
            "level": args.level,
            "family": args.family,
            "model": args.model,
            "coverage": args.coverage,
            "n_use": args.n_use,
        }),
    )
}
