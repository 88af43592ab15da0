//! The factorize / calibrate / benchmark / generate entry points.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use nbmf_core::benchmark::{benchmark_csv, run_benchmark, BenchmarkParams};
use nbmf_core::cost::calibrate;
use nbmf_core::driver::{harvest_corpus, history_csv, run_with_options, DriverConfig, RunOptions};
use nbmf_core::matrix::{BinaryVector, DenseMatrix};
use nbmf_core::qubo::Qubo;
use nbmf_core::sampler::SamplerConfig;
use nbmf_core::synthetic::generate_synthetic;

use crate::config::{
    BenchmarkSettings, CalibrateSettings, FactorizeSettings, GenerateSettings, OutputFormat,
};
use crate::error::{CliError, CliResult};
use crate::io;
use crate::manifest::RunManifest;

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    if threads == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::runtime(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn ensure_out_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", path.display())))
}

fn driver_config_for_factorize(s: &FactorizeSettings) -> DriverConfig {
    DriverConfig {
        rank: s.rank,
        total_iterations: s.iterations,
        forward_warmup_iterations: s.warmup,
        reversal_distance: s.r,
        reversal_time_us: s.tr_us,
        forward_samples_per_qubo: s.forward_samples,
        reverse_samples_per_qubo: s.reverse_samples,
        sweeps_per_microsecond: s.sweeps_per_us,
        hot_temperature_scale: s.hot_temperature_scale,
        init_density: s.init_density,
        master_seed: s.seed,
        nnls: s.nnls.clone(),
    }
}

pub fn cmd_factorize(settings: &FactorizeSettings) -> CliResult<RunManifest> {
    let started = Instant::now();
    ensure_out_dir(&settings.out)?;
    let fingerprint = io::fingerprint_input(&settings.input)?;
    let a = io::ingest(&settings.input, settings.format, settings.transpose)?;

    let cfg = driver_config_for_factorize(settings);
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;

    let checkpoint_path = settings.out.join("checkpoint.json");
    let options = RunOptions {
        checkpoint_path: Some(checkpoint_path.clone()),
    };
    let state = with_pool(settings.threads, || run_with_options(&a, &cfg, &options))??;

    let history_path = settings.out.join("history.csv");
    fs::write(&history_path, history_csv(&state.history))
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", history_path.display())))?;
    let b_path = settings.out.join("b.nbm");
    io::write_binary(&b_path, &state.b)?;
    let c_path = settings.out.join("c.nbm");
    io::write_binary_matrix(&c_path, &state.c)?;

    let config_echo = json!({
        "input": settings.input.display().to_string(),
        "format": format_name(settings.format),
        "transpose": settings.transpose,
        "rank": settings.rank,
        "iterations": settings.iterations,
        "warmup": settings.warmup,
        "mode": settings.mode.as_str(),
        "r": settings.r,
        "tr_us": settings.tr_us,
        "forward_samples": settings.forward_samples,
        "reverse_samples": settings.reverse_samples,
        "sweeps_per_us": settings.sweeps_per_us,
        "hot_temperature_scale": settings.hot_temperature_scale,
        "init_density": settings.init_density,
        "seed": settings.seed,
        "threads": settings.threads,
        "nnls": settings.nnls,
    });
    let mut manifest = RunManifest::new("factorize", config_echo, fingerprint);
    manifest.add_artifact("history_csv", &history_path);
    manifest.add_artifact("checkpoint", &checkpoint_path);
    manifest.add_artifact("b_matrix", &b_path);
    manifest.add_artifact("c_matrix", &c_path);
    manifest.wall_clock_ms = started.elapsed().as_millis() as u64;
    let manifest_path = settings.out.join("manifest.json");
    manifest.write(&manifest_path)?;
    println!(
        "factorize: {} iterations, final relative residual {:.6}, artifacts in {}",
        state.iteration,
        state.relative_residual,
        settings.out.display()
    );
    Ok(manifest)
}

fn format_name(f: io::InputFormat) -> &'static str {
    match f {
        io::InputFormat::Csv => "csv",
        io::InputFormat::Binary => "binary",
        io::InputFormat::PgmDir => "pgm-dir",
    }
}

fn dump_qubos(out: &Path, corpus: &[(Qubo, BinaryVector)]) -> CliResult<()> {
    let dir = out.join("qubos");
    ensure_out_dir(&dir)?;
    for (i, (q, _)) in corpus.iter().enumerate() {
        let path = dir.join(format!("qubo_{i:04}.json"));
        let json = serde_json::to_string(q)
            .map_err(|e| CliError::runtime(format!("qubo serialization: {e}")))?;
        fs::write(&path, json)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_calibrate(settings: &CalibrateSettings) -> CliResult<RunManifest> {
    let started = Instant::now();
    ensure_out_dir(&settings.out)?;
    let fingerprint = io::fingerprint_input(&settings.input)?;
    let a = io::ingest(&settings.input, settings.format, settings.transpose)?;

    let driver_cfg = DriverConfig {
        rank: settings.rank,
        total_iterations: settings.warmup,
        forward_warmup_iterations: settings.warmup,
        forward_samples_per_qubo: settings.forward_samples,
        reverse_samples_per_qubo: settings.reverse_samples.max(1),
        sweeps_per_microsecond: settings.sweeps_per_us,
        hot_temperature_scale: settings.hot_temperature_scale,
        init_density: settings.init_density,
        master_seed: settings.seed,
        nnls: settings.nnls.clone(),
        ..DriverConfig::new(settings.rank)
    };
    driver_cfg
        .validate()
        .map_err(|e| CliError::config(e.to_string()))?;

    let sampler = SamplerConfig {
        num_samples: settings.reverse_samples,
        sweeps_per_microsecond: settings.sweeps_per_us,
        seed: settings.seed,
        hot_temperature_scale: settings.hot_temperature_scale,
    };
    let (report, corpus_len) = with_pool(settings.threads, || -> CliResult<_> {
        let corpus = harvest_corpus(&a, &driver_cfg, settings.corpus_size)?;
        if settings.dump_qubos {
            dump_qubos(&settings.out, &corpus)?;
        }
        let report = calibrate(&corpus, &settings.r_grid, &settings.tr_grid, &sampler)?;
        Ok((report, corpus.len()))
    })??;

    let csv_path = settings.out.join("calibration.csv");
    fs::write(&csv_path, report.to_csv())
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", csv_path.display())))?;
    let best_path = settings.out.join("calibration_best.json");
    let best_json = serde_json::to_string_pretty(&json!({
        "best_r_per_t_r": report.best_r_per_t_r,
    }))
    .map_err(|e| CliError::runtime(format!("serialization: {e}")))?;
    fs::write(&best_path, best_json)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", best_path.display())))?;

    let config_echo = json!({
        "input": settings.input.display().to_string(),
        "format": format_name(settings.format),
        "transpose": settings.transpose,
        "rank": settings.rank,
        "warmup": settings.warmup,
        "forward_samples": settings.forward_samples,
        "reverse_samples": settings.reverse_samples,
        "r_grid": settings.r_grid,
        "tr_grid": settings.tr_grid,
        "corpus_size": settings.corpus_size,
        "sweeps_per_us": settings.sweeps_per_us,
        "hot_temperature_scale": settings.hot_temperature_scale,
        "init_density": settings.init_density,
        "seed": settings.seed,
        "threads": settings.threads,
        "nnls": settings.nnls,
    });
    let mut manifest = RunManifest::new("calibrate", config_echo, fingerprint);
    manifest.add_artifact("calibration_csv", &csv_path);
    manifest.add_artifact("calibration_best", &best_path);
    manifest.wall_clock_ms = started.elapsed().as_millis() as u64;
    let manifest_path = settings.out.join("manifest.json");
    manifest.write(&manifest_path)?;
    println!(
        "calibrate: {} grid points over {} QUBOs, report in {}",
        report.points.len(),
        corpus_len,
        settings.out.display()
    );
    Ok(manifest)
}

pub fn cmd_benchmark(settings: &BenchmarkSettings) -> CliResult<RunManifest> {
    let started = Instant::now();
    ensure_out_dir(&settings.out)?;
    let fingerprint = io::fingerprint_input(&settings.input)?;
    let a = io::ingest(&settings.input, settings.format, settings.transpose)?;

    let driver_cfg = DriverConfig {
        rank: settings.rank,
        total_iterations: settings.warmup,
        forward_warmup_iterations: settings.warmup,
        forward_samples_per_qubo: settings.forward_samples,
        reverse_samples_per_qubo: settings.reverse_samples.max(1),
        sweeps_per_microsecond: settings.sweeps_per_us,
        hot_temperature_scale: settings.hot_temperature_scale,
        init_density: settings.init_density,
        master_seed: settings.seed,
        nnls: settings.nnls.clone(),
        ..DriverConfig::new(settings.rank)
    };
    driver_cfg
        .validate()
        .map_err(|e| CliError::config(e.to_string()))?;

    let params = BenchmarkParams {
        reversal_distance: settings.r,
        reversal_time_us: settings.tr_us,
        reverse_samples: settings.reverse_samples,
        sweeps_per_microsecond: settings.sweeps_per_us,
        hot_temperature_scale: settings.hot_temperature_scale,
        seed: settings.seed,
        tabu_max_time_us: settings.tabu_max_time_us,
        parallel: false,
    };
    // The corpus harvest parallelizes fine; the benchmark itself runs
    // sequentially so competitor timings are not contended.
    let corpus = with_pool(settings.threads, || {
        harvest_corpus(&a, &driver_cfg, settings.corpus_size)
    })??;
    if settings.dump_qubos {
        dump_qubos(&settings.out, &corpus)?;
    }
    let (records, summary) = run_benchmark(&corpus, &params)?;

    let csv_path = settings.out.join("benchmark.csv");
    fs::write(&csv_path, benchmark_csv(&records))
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", csv_path.display())))?;
    let summary_path = settings.out.join("benchmark_summary.json");
    let summary_json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::runtime(format!("serialization: {e}")))?;
    fs::write(&summary_path, summary_json)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", summary_path.display())))?;

    let config_echo = json!({
        "input": settings.input.display().to_string(),
        "format": format_name(settings.format),
        "transpose": settings.transpose,
        "rank": settings.rank,
        "warmup": settings.warmup,
        "forward_samples": settings.forward_samples,
        "reverse_samples": settings.reverse_samples,
        "r": settings.r,
        "tr_us": settings.tr_us,
        "corpus_size": settings.corpus_size,
        "tabu_max_time_us": settings.tabu_max_time_us,
        "sweeps_per_us": settings.sweeps_per_us,
        "hot_temperature_scale": settings.hot_temperature_scale,
        "init_density": settings.init_density,
        "seed": settings.seed,
        "threads": settings.threads,
        "nnls": settings.nnls,
    });
    let mut manifest = RunManifest::new("benchmark", config_echo, fingerprint);
    manifest.add_artifact("benchmark_csv", &csv_path);
    manifest.add_artifact("benchmark_summary", &summary_path);
    manifest.wall_clock_ms = started.elapsed().as_millis() as u64;
    let manifest_path = settings.out.join("manifest.json");
    manifest.write(&manifest_path)?;
    println!(
        "benchmark: {} QUBOs, {} improved, {} reached; artifacts in {}",
        summary.num_qubos,
        summary.num_improved,
        summary.num_reached,
        settings.out.display()
    );
    Ok(manifest)
}

pub fn cmd_generate(settings: &GenerateSettings) -> CliResult<RunManifest> {
    let started = Instant::now();
    ensure_out_dir(&settings.out)?;
    let instance = generate_synthetic(
        settings.rows,
        settings.cols,
        settings.rank,
        settings.noise_sigma,
        settings.density,
        settings.seed,
    )
    .map_err(|e| CliError::config(e.to_string()))?;

    let (a_path, b_path) = match settings.format {
        OutputFormat::Csv => {
            let a_path = settings.out.join("a.csv");
            io::write_csv(&a_path, &instance.matrix)?;
            let b_path = settings.out.join("planted_b.csv");
            io::write_csv(&b_path, &instance.planted_b)?;
            (a_path, b_path)
        }
        OutputFormat::Binary => {
            let a_path = settings.out.join("a.nbm");
            io::write_binary(&a_path, &instance.matrix)?;
            let b_path = settings.out.join("planted_b.nbm");
            io::write_binary(&b_path, &instance.planted_b)?;
            (a_path, b_path)
        }
    };
    let c_path = settings.out.join("planted_c.nbm");
    io::write_binary_matrix(&c_path, &instance.planted_c)?;

    // Fingerprint the generated matrix through its canonical binary encoding.
    let fingerprint = io::fingerprint_bytes(&canonical_bytes(&instance.matrix));
    let config_echo = json!({
        "rows": settings.rows,
        "cols": settings.cols,
        "rank": settings.rank,
        "noise_sigma": settings.noise_sigma,
        "density": settings.density,
        "seed": settings.seed,
        "format": match settings.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Binary => "binary",
        },
    });
    let mut manifest = RunManifest::new("generate", config_echo, fingerprint);
    manifest.add_artifact("a_matrix", &a_path);
    manifest.add_artifact("planted_b", &b_path);
    manifest.add_artifact("planted_c", &c_path);
    manifest.wall_clock_ms = started.elapsed().as_millis() as u64;
    let manifest_path = settings.out.join("manifest.json");
    manifest.write(&manifest_path)?;
    println!(
        "generate: {}x{} rank-{} instance in {}",
        settings.rows,
        settings.cols,
        settings.rank,
        settings.out.display()
    );
    Ok(manifest)
}

fn canonical_bytes(m: &DenseMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(14 + m.values().len() * 8);
    out.extend_from_slice(io::BINARY_MAGIC);
    out.extend_from_slice(&io::BINARY_VERSION.to_le_bytes());
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for v in m.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
