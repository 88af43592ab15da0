//! Configuration resolution: JSON config file, overridden by CLI flags,
//! validated with every problem reported at once.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use nbmf_core::cost::{equal_time_reverse_count, EqualTimePolicy};
use nbmf_core::nnls::NnlsConfig;

use crate::error::{CliError, CliResult};
use crate::io::InputFormat;

/// Sampler scheduling across iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    ForwardOnly,
    Hybrid,
}

impl RunMode {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "forward-only" => Ok(RunMode::ForwardOnly),
            "hybrid" => Ok(RunMode::Hybrid),
            other => Err(format!(
                "unknown mode '{other}' (expected forward-only or hybrid)"
            )),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RunMode::ForwardOnly => "forward-only",
            RunMode::Hybrid => "hybrid",
        }
    }
}

/// Reverse-sample budget: explicit, or derived from the forward budget at
/// equal simulated QPU access time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReverseSamples {
    Count(usize),
    AutoEqualTime,
}

impl ReverseSamples {
    pub fn parse(s: &str) -> Result<Self, String> {
        if s == "auto-equal-time" {
            return Ok(ReverseSamples::AutoEqualTime);
        }
        s.parse::<usize>()
            .map(ReverseSamples::Count)
            .map_err(|_| format!("reverse-samples must be a count or 'auto-equal-time', got '{s}'"))
    }

    pub fn resolve(&self, forward_samples: usize, policy: EqualTimePolicy) -> usize {
        match self {
            ReverseSamples::Count(n) => *n,
            ReverseSamples::AutoEqualTime => {
                (equal_time_reverse_count(forward_samples as u64, policy) as usize).max(1)
            }
        }
    }
}

fn parse_equal_time_policy(s: &str) -> Result<EqualTimePolicy, String> {
    match s {
        "exact-ratio" => Ok(EqualTimePolicy::ExactRatio),
        "rounded-factor" => Ok(EqualTimePolicy::RoundedFactor),
        other => Err(format!(
            "unknown equal-time policy '{other}' (expected exact-ratio or rounded-factor)"
        )),
    }
}

/// Raw JSON config file; any subset of keys may be present.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<PathBuf>,
    pub format: Option<String>,
    pub transpose: Option<bool>,
    pub rank: Option<usize>,
    pub iterations: Option<usize>,
    pub warmup: Option<usize>,
    pub mode: Option<String>,
    pub r: Option<f64>,
    pub tr_us: Option<f64>,
    pub forward_samples: Option<usize>,
    pub reverse_samples: Option<ReverseSamplesSpec>,
    pub equal_time_policy: Option<String>,
    pub sweeps_per_us: Option<u32>,
    pub hot_temperature_scale: Option<f64>,
    pub init_density: Option<f64>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub r_grid: Option<Vec<f64>>,
    pub tr_grid: Option<Vec<f64>>,
    pub corpus_size: Option<usize>,
    pub tabu_max_time_us: Option<u64>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub noise_sigma: Option<f64>,
    pub density: Option<f64>,
    pub nnls_max_iterations: Option<usize>,
    pub nnls_tolerance: Option<f64>,
    pub nnls_ridge: Option<f64>,
    pub nnls_accelerated: Option<bool>,
}

/// `reverse_samples` in the file may be a number or "auto-equal-time".
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ReverseSamplesSpec {
    Count(usize),
    Keyword(String),
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }
}

/// Flags shared by the experiment subcommands, all optional so the config
/// file can fill the gaps.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// Input matrix path (file, or directory for pgm-dir)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input encoding: csv, binary, or pgm-dir
    #[arg(long)]
    pub format: Option<String>,
    /// Transpose the loaded matrix (pgm-dir: images as rows, not columns)
    #[arg(long)]
    pub transpose: bool,
    /// Factorization rank k
    #[arg(long)]
    pub rank: Option<usize>,
    /// Total alternating iterations
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Forward-anneal warmup iterations before switching to reverse
    #[arg(long)]
    pub warmup: Option<usize>,
    /// Sampler schedule: forward-only or hybrid
    #[arg(long)]
    pub mode: Option<String>,
    /// Reversal distance r in [0,1]
    #[arg(long)]
    pub r: Option<f64>,
    /// Reversal hold time t_r in microseconds
    #[arg(long)]
    pub tr: Option<f64>,
    /// Forward samples per QUBO
    #[arg(long)]
    pub forward_samples: Option<usize>,
    /// Reverse samples per QUBO: a count or 'auto-equal-time'
    #[arg(long)]
    pub reverse_samples: Option<String>,
    /// Equal-time conversion: exact-ratio or rounded-factor
    #[arg(long)]
    pub equal_time_policy: Option<String>,
    /// Metropolis sweeps per schedule microsecond
    #[arg(long)]
    pub sweeps_per_us: Option<u32>,
    /// Hot-temperature multiplier on the QUBO's max |coefficient|
    #[arg(long)]
    pub hot_temperature_scale: Option<f64>,
    /// Bernoulli density of the random initial binary factor
    #[arg(long)]
    pub init_density: Option<f64>,
    /// Master seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = auto)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Fully resolved settings for `factorize`.
#[derive(Debug, Clone)]
pub struct FactorizeSettings {
    pub input: PathBuf,
    pub format: InputFormat,
    pub transpose: bool,
    pub rank: usize,
    pub iterations: usize,
    pub warmup: usize,
    pub mode: RunMode,
    pub r: f64,
    pub tr_us: f64,
    pub forward_samples: usize,
    pub reverse_samples: usize,
    pub sweeps_per_us: u32,
    pub hot_temperature_scale: f64,
    pub init_density: f64,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub nnls: NnlsConfig,
}

/// Fully resolved settings for `calibrate`.
#[derive(Debug, Clone)]
pub struct CalibrateSettings {
    pub input: PathBuf,
    pub format: InputFormat,
    pub transpose: bool,
    pub rank: usize,
    pub warmup: usize,
    pub forward_samples: usize,
    pub reverse_samples: usize,
    pub r_grid: Vec<f64>,
    pub tr_grid: Vec<f64>,
    pub corpus_size: usize,
    pub sweeps_per_us: u32,
    pub hot_temperature_scale: f64,
    pub init_density: f64,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub nnls: NnlsConfig,
    pub dump_qubos: bool,
}

/// Fully resolved settings for `benchmark`.
#[derive(Debug, Clone)]
pub struct BenchmarkSettings {
    pub input: PathBuf,
    pub format: InputFormat,
    pub transpose: bool,
    pub rank: usize,
    pub warmup: usize,
    pub forward_samples: usize,
    pub reverse_samples: usize,
    pub r: f64,
    pub tr_us: f64,
    pub corpus_size: usize,
    pub tabu_max_time_us: u64,
    pub sweeps_per_us: u32,
    pub hot_temperature_scale: f64,
    pub init_density: f64,
    pub seed: u64,
    pub threads: usize,
    pub out: PathBuf,
    pub nnls: NnlsConfig,
    pub dump_qubos: bool,
}

/// Fully resolved settings for `generate`.
#[derive(Debug, Clone)]
pub struct GenerateSettings {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub noise_sigma: f64,
    pub density: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Binary,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "binary" => Ok(OutputFormat::Binary),
            other => Err(format!("unknown format '{other}' (expected csv or binary)")),
        }
    }
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

fn pick_opt<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

struct Issues(Vec<String>);

impl Issues {
    fn new() -> Self {
        Issues(Vec::new())
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.0.push(msg.into());
        }
    }

    fn finish(self) -> CliResult<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(self.0))
        }
    }
}

fn load_file_config(args: &CommonArgs) -> CliResult<FileConfig> {
    match &args.config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

fn resolve_nnls(file: &FileConfig) -> NnlsConfig {
    let defaults = NnlsConfig::default();
    NnlsConfig {
        max_iterations: file.nnls_max_iterations.unwrap_or(defaults.max_iterations),
        tolerance: file.nnls_tolerance.unwrap_or(defaults.tolerance),
        ridge: file.nnls_ridge.unwrap_or(defaults.ridge),
        accelerated: file.nnls_accelerated.unwrap_or(defaults.accelerated),
    }
}

struct SharedResolved {
    input: Option<PathBuf>,
    format: InputFormat,
    transpose: bool,
    rank: usize,
    forward_samples: usize,
    reverse_samples: usize,
    sweeps_per_us: u32,
    hot_temperature_scale: f64,
    init_density: f64,
    seed: u64,
    threads: usize,
    out: PathBuf,
    nnls: NnlsConfig,
    r: f64,
    tr_us: f64,
}

fn resolve_shared(args: &CommonArgs, file: &FileConfig, issues: &mut Issues) -> SharedResolved {
    let format_str = pick(&args.format, &file.format, "csv".to_string());
    let format = match InputFormat::parse(&format_str) {
        Ok(f) => f,
        Err(e) => {
            issues.0.push(e.to_string());
            InputFormat::Csv
        }
    };

    let forward_samples = pick(&args.forward_samples, &file.forward_samples, 100);
    issues.check(forward_samples >= 1, "forward-samples must be >= 1");

    let policy_str = pick(
        &args.equal_time_policy,
        &file.equal_time_policy,
        "exact-ratio".to_string(),
    );
    let policy = match parse_equal_time_policy(&policy_str) {
        Ok(p) => p,
        Err(e) => {
            issues.0.push(e);
            EqualTimePolicy::ExactRatio
        }
    };

    let reverse_spec = match (&args.reverse_samples, &file.reverse_samples) {
        (Some(s), _) => match ReverseSamples::parse(s) {
            Ok(v) => v,
            Err(e) => {
                issues.0.push(e);
                ReverseSamples::AutoEqualTime
            }
        },
        (None, Some(ReverseSamplesSpec::Count(n))) => ReverseSamples::Count(*n),
        (None, Some(ReverseSamplesSpec::Keyword(kw))) => match ReverseSamples::parse(kw) {
            Ok(v) => v,
            Err(e) => {
                issues.0.push(e);
                ReverseSamples::AutoEqualTime
            }
        },
        (None, None) => ReverseSamples::AutoEqualTime,
    };
    let reverse_samples = reverse_spec.resolve(forward_samples, policy);
    issues.check(reverse_samples >= 1, "reverse-samples must be >= 1");

    let rank = pick(&args.rank, &file.rank, 8);
    issues.check(rank >= 1, "rank must be >= 1");

    let r = pick(&args.r, &file.r, 0.45);
    issues.check((0.0..=1.0).contains(&r), format!("r must lie in [0,1], got {r}"));

    let tr_us = pick(&args.tr, &file.tr_us, 10.0);
    issues.check(tr_us > 0.0, format!("tr must be positive, got {tr_us}"));

    let sweeps_per_us = pick(&args.sweeps_per_us, &file.sweeps_per_us, 10);
    issues.check(sweeps_per_us >= 1, "sweeps-per-us must be >= 1");

    let hot = pick(&args.hot_temperature_scale, &file.hot_temperature_scale, 1.0);
    issues.check(
        hot > 0.0,
        format!("hot-temperature-scale must be positive, got {hot}"),
    );

    let init_density = pick(&args.init_density, &file.init_density, 0.5);
    issues.check(
        init_density > 0.0 && init_density <= 1.0,
        format!("init-density must lie in (0,1], got {init_density}"),
    );

    SharedResolved {
        input: pick_opt(&args.input, &file.input),
        format,
        transpose: args.transpose || file.transpose.unwrap_or(false),
        rank,
        forward_samples,
        reverse_samples,
        sweeps_per_us,
        hot_temperature_scale: hot,
        init_density,
        seed: pick(&args.seed, &file.seed, 0),
        threads: pick(&args.threads, &file.threads, 0),
        out: pick(&args.out, &file.out, PathBuf::from("out")),
        nnls: resolve_nnls(file),
        r,
        tr_us,
    }
}

pub fn resolve_factorize(args: &CommonArgs) -> CliResult<FactorizeSettings> {
    let file = load_file_config(args)?;
    let mut issues = Issues::new();
    let shared = resolve_shared(args, &file, &mut issues);

    let iterations = pick(&args.iterations, &file.iterations, 10);
    let mode_str = pick(&args.mode, &file.mode, "hybrid".to_string());
    let mode = match RunMode::parse(&mode_str) {
        Ok(m) => m,
        Err(e) => {
            issues.0.push(e);
            RunMode::Hybrid
        }
    };
    // forward-only is hybrid with the warmup covering every iteration.
    let warmup = match mode {
        RunMode::ForwardOnly => iterations,
        RunMode::Hybrid => pick(&args.warmup, &file.warmup, 1.min(iterations)),
    };
    issues.check(
        warmup <= iterations,
        format!("warmup {warmup} exceeds iterations {iterations}"),
    );
    issues.check(shared.input.is_some(), "input is required (flag or config)");

    issues.finish()?;
    Ok(FactorizeSettings {
        input: shared.input.expect("checked above"),
        format: shared.format,
        transpose: shared.transpose,
        rank: shared.rank,
        iterations,
        warmup,
        mode,
        r: shared.r,
        tr_us: shared.tr_us,
        forward_samples: shared.forward_samples,
        reverse_samples: shared.reverse_samples,
        sweeps_per_us: shared.sweeps_per_us,
        hot_temperature_scale: shared.hot_temperature_scale,
        init_density: shared.init_density,
        seed: shared.seed,
        threads: shared.threads,
        out: shared.out,
        nnls: shared.nnls,
    })
}

pub fn resolve_calibrate(args: &CommonArgs, dump_qubos: bool) -> CliResult<CalibrateSettings> {
    let file = load_file_config(args)?;
    let mut issues = Issues::new();
    let shared = resolve_shared(args, &file, &mut issues);

    let warmup = pick(&args.warmup, &file.warmup, 1);
    let default_r_grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let r_grid = file.r_grid.clone().unwrap_or(default_r_grid);
    let tr_grid = file.tr_grid.clone().unwrap_or_else(|| vec![10.0, 100.0]);
    for &r in &r_grid {
        issues.check(
            (0.0..=1.0).contains(&r),
            format!("r_grid value {r} outside [0,1]"),
        );
    }
    for &t in &tr_grid {
        issues.check(t > 0.0, format!("tr_grid value {t} must be positive"));
    }
    issues.check(!r_grid.is_empty(), "r_grid must be nonempty");
    issues.check(!tr_grid.is_empty(), "tr_grid must be nonempty");

    let corpus_size = pick(&None, &file.corpus_size, 100);
    issues.check(corpus_size >= 1, "corpus_size must be >= 1");
    issues.check(shared.input.is_some(), "input is required (flag or config)");

    issues.finish()?;
    Ok(CalibrateSettings {
        input: shared.input.expect("checked above"),
        format: shared.format,
        transpose: shared.transpose,
        rank: shared.rank,
        warmup,
        forward_samples: shared.forward_samples,
        reverse_samples: shared.reverse_samples,
        r_grid,
        tr_grid,
        corpus_size,
        sweeps_per_us: shared.sweeps_per_us,
        hot_temperature_scale: shared.hot_temperature_scale,
        init_density: shared.init_density,
        seed: shared.seed,
        threads: shared.threads,
        out: shared.out,
        nnls: shared.nnls,
        dump_qubos,
    })
}

pub fn resolve_benchmark(
    args: &CommonArgs,
    tabu_max_time_us: Option<u64>,
    corpus_size: Option<usize>,
    dump_qubos: bool,
) -> CliResult<BenchmarkSettings> {
    let file = load_file_config(args)?;
    let mut issues = Issues::new();
    let shared = resolve_shared(args, &file, &mut issues);

    let warmup = pick(&args.warmup, &file.warmup, 1);
    let corpus_size = corpus_size.or(file.corpus_size).unwrap_or(100);
    issues.check(corpus_size >= 1, "corpus-size must be >= 1");
    let tabu_max = tabu_max_time_us.or(file.tabu_max_time_us).unwrap_or(1_000_000);
    issues.check(tabu_max > 0, "tabu-max-time-us must be positive");
    issues.check(shared.input.is_some(), "input is required (flag or config)");

    issues.finish()?;
    Ok(BenchmarkSettings {
        input: shared.input.expect("checked above"),
        format: shared.format,
        transpose: shared.transpose,
        rank: shared.rank,
        warmup,
        forward_samples: shared.forward_samples,
        reverse_samples: shared.reverse_samples,
        r: shared.r,
        tr_us: shared.tr_us,
        corpus_size,
        tabu_max_time_us: tabu_max,
        sweeps_per_us: shared.sweeps_per_us,
        hot_temperature_scale: shared.hot_temperature_scale,
        init_density: shared.init_density,
        seed: shared.seed,
        threads: shared.threads,
        out: shared.out,
        nnls: shared.nnls,
        dump_qubos,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn resolve_generate(
    rows: Option<usize>,
    cols: Option<usize>,
    rank: Option<usize>,
    noise_sigma: Option<f64>,
    density: Option<f64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<String>,
    config: Option<&Path>,
) -> CliResult<GenerateSettings> {
    let file = match config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut issues = Issues::new();

    let rows = rows.or(file.rows).unwrap_or(60);
    let cols = cols.or(file.cols).unwrap_or(60);
    let rank = rank.or(file.rank).unwrap_or(8);
    let noise_sigma = noise_sigma.or(file.noise_sigma).unwrap_or(0.0);
    let density = density.or(file.density).unwrap_or(0.5);
    issues.check(rows >= 1, "rows must be >= 1");
    issues.check(cols >= 1, "cols must be >= 1");
    issues.check(rank >= 1, "rank must be >= 1");
    issues.check(
        rank <= rows.min(cols),
        format!("rank {rank} exceeds min(rows, cols) = {}", rows.min(cols)),
    );
    issues.check(
        density > 0.0 && density < 1.0,
        format!("density must lie in (0,1), got {density}"),
    );
    issues.check(
        noise_sigma >= 0.0,
        format!("noise-sigma must be nonnegative, got {noise_sigma}"),
    );
    let format_str = format.or(file.format.clone()).unwrap_or_else(|| "binary".to_string());
    let format = match OutputFormat::parse(&format_str) {
        Ok(f) => f,
        Err(e) => {
            issues.0.push(e);
            OutputFormat::Binary
        }
    };

    issues.finish()?;
    Ok(GenerateSettings {
        rows,
        cols,
        rank,
        noise_sigma,
        density,
        seed: seed.or(file.seed).unwrap_or(0),
        out: out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        format,
    })
}
