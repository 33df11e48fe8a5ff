//! The `wordburst` command line: `ingest`, `analyze` and `simulate`.
//!
//! Stages talk through files only. `ingest` and `simulate` write a
//! `matrix.tsv` that `analyze` reads. Every run writes its outputs
//! atomically and ends with a `manifest.json` that lists the files written,
//! the effective configuration and the exact argument vector to repeat it.
//! Nothing in the outputs depends on the clock, so rerunning a command
//! with the same configuration reproduces its directory byte for byte.
//!
//! Exit codes: 0 success, 1 usage, 2 bad input data, 3 numeric failure.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::dense::{self, RescaledCountDistribution};
use crate::ensembles::{build_ensembles, select_dense, select_dilute, Ensemble, EnsembleIndex};
use crate::ingest::{
    bin_daily, clean_missing_scans, parse_flat_corpus, parse_scan_log, replay_scan_directory, FeedCollector,
    IngestError, SnapshotStore,
};
use crate::io::{write_atomic, Csv};
use crate::matrix::{WordDayMatrix, WordSeries};
use crate::null_models::{generate, NullModelError, SyntheticCorpusSpec};
use crate::optimize::NelderMead;
use crate::rank::{self, RankError};
use crate::rng::{item_stream, PARAMETERS};
use crate::waiting::{self, WaitingError};

pub const MATRIX_FILE: &str = "matrix.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const DEFAULT_DENSE_RANGE: (u64, u64) = (1000, 2000);
const PLOT_BIN_FACTOR: f64 = 1.25;

#[derive(Debug, Parser)]
#[command(name = "wordburst", version, about = "Word burstiness statistics for dated text streams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a cleaned word-day matrix from a flat corpus file or a
    /// directory of daily feed scans.
    Ingest(IngestArgs),
    /// Rank, waiting-time or daily-count statistics of a matrix.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic matrix from a JSON process spec.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Flat corpus (`YYYY-MM-DD<TAB>feed<TAB>text` lines) or a directory
    /// of `YYYY-MM-DD/<feed>.xml` scans.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// `YYYY-MM-DD<TAB>1|0` lines overriding which scans were performed
    /// (flat corpus only).
    #[arg(long)]
    pub scan_log: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rank,
    Dilute,
    Dense,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// A `matrix.tsv` written by `ingest` or `simulate`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub k_min: Option<u64>,
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Required by the randomized modes (dilute, dense).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write gnuplot-ready files under `plots/`.
    #[arg(long)]
    pub emit_plots: bool,
    #[arg(long, default_value_t = 10_000)]
    pub fit_max_evaluations: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub fit_tolerance: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Replaces the spec's seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<NullModelError> for CliError {
    fn from(e: NullModelError) -> Self {
        match e {
            NullModelError::Sampling { .. } => CliError::Numeric(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

/// Effective configuration of one run, recorded in its manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub inputs: Vec<PathBuf>,
    pub output: PathBuf,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub emit_plots: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_max_evaluations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_tolerance: Option<f64>,
    /// Arguments that repeat this run.
    pub argv: Vec<String>,
}

/// Result of a successful command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Files written, relative to the output directory, manifest last.
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

/// Files staged in memory and written together at the end of a run.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
    /// Files some other writer already put in place.
    already_written: Vec<String>,
    warnings: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            already_written: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, body: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), body.into()));
    }

    fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    fn finish(mut self, config: &RunConfig, extra: serde_json::Value) -> Result<RunReport, CliError> {
        fs::create_dir_all(&self.dir)?;
        self.files.sort_by(|a, b| a.0.cmp(&b.0));
        for (name, body) in &self.files {
            let path = self.dir.join(name);
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            write_atomic(&path, body)?;
        }
        let mut names: Vec<String> = self.files.iter().map(|f| f.0.clone()).collect();
        names.extend(self.already_written);
        names.sort();
        let manifest = serde_json::json!({
            "tool": "wordburst",
            "version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "inputs": input_digests(&config.inputs)?,
            "files": names,
            "warnings": self.warnings,
            "summary": extra,
        });
        let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        write_atomic(&self.dir.join(MANIFEST_FILE), body.as_bytes())?;
        names.push(MANIFEST_FILE.to_string());
        Ok(RunReport {
            files: names,
            warnings: self.warnings,
        })
    }
}

/// SHA-256 of every input file; directories are listed by name only.
fn input_digests(inputs: &[PathBuf]) -> Result<Vec<serde_json::Value>, CliError> {
    inputs
        .iter()
        .map(|p| {
            let digest = if p.is_file() {
                Some(Sha256::digest(fs::read(p)?).iter().map(|b| format!("{b:02x}")).collect::<String>())
            } else {
                None
            };
            Ok(serde_json::json!({ "path": p, "sha256": digest }))
        })
        .collect()
}

fn path_arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes") + "\n"
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<RunReport, CliError> {
    let mut argv = vec!["ingest".into(), "--input".into(), path_arg(&args.input)];
    argv.extend(["--output".into(), path_arg(&args.output)]);
    let mut inputs = vec![args.input.clone()];
    if let Some(log) = &args.scan_log {
        argv.extend(["--scan-log".into(), path_arg(log)]);
        inputs.push(log.clone());
    }
    let config = RunConfig {
        command: "ingest",
        inputs,
        output: args.output.clone(),
        mode: None,
        k_min: None,
        k_max: None,
        seed: None,
        emit_plots: false,
        fit_max_evaluations: None,
        fit_tolerance: None,
        argv,
    };
    let mut out = Outputs::new(&args.output);

    let (raw, log) = if args.input.is_dir() {
        if args.scan_log.is_some() {
            return Err(CliError::Usage(
                "--scan-log applies to flat corpus files; a scan directory carries its own log".into(),
            ));
        }
        let replay = replay_scan_directory(&args.input, FeedCollector::new())?;
        for (date, feed, err) in &replay.failures {
            out.warn(format!("scan {date}, feed {feed}: {err}"));
        }
        // Snapshots go straight to disk so the next scan can diff against them.
        let store = SnapshotStore::new(args.output.join("snapshots"));
        replay.collector.persist(&store)?;
        let mut names: Vec<String> = fs::read_dir(store.dir())?
            .map(|e| e.map(|e| format!("snapshots/{}", e.file_name().to_string_lossy())))
            .collect::<Result<_, _>>()?;
        names.sort();
        out.already_written.extend(names);
        if replay.posts.is_empty() {
            return Err(CliError::Data(IngestError::EmptyCorpus.to_string()));
        }
        (bin_daily(&replay.posts, replay.horizon)?, replay.scan_log)
    } else {
        let file = fs::File::open(&args.input)?;
        let corpus = parse_flat_corpus(BufReader::new(file))?;
        let overrides = match &args.scan_log {
            Some(p) => parse_scan_log(BufReader::new(fs::File::open(p)?))?,
            None => Vec::new(),
        };
        let log = corpus.scan_log(&overrides)?;
        (bin_daily(&corpus.posts, corpus.horizon)?, log)
    };

    let (cleaned, report) = clean_missing_scans(&raw, &log)?;
    if !report.is_empty() {
        out.warn(format!(
            "removed {} day(s) around missed scans",
            report.removed_days.len()
        ));
    }
    out.add(MATRIX_FILE, cleaned.to_tsv());
    out.add("cleaning_report.json", report.to_json() + "\n");
    let summary = serde_json::json!({
        "raw_horizon": raw.horizon(),
        "horizon": cleaned.horizon(),
        "vocabulary": cleaned.vocabulary_size(),
        "removed_days": report.removed_days.len(),
    });
    out.finish(&config, summary)
}

fn read_matrix(path: &Path) -> Result<WordDayMatrix, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    WordDayMatrix::read_from(BufReader::new(file)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn check_analyze_args(args: &AnalyzeArgs) -> Result<(), CliError> {
    let has_k = args.k_min.is_some() || args.k_max.is_some();
    match args.mode {
        Mode::Rank if has_k => {
            return Err(CliError::Usage("--k-min/--k-max do not apply to --mode rank".into()));
        }
        Mode::Dilute | Mode::Dense if args.seed.is_none() => {
            return Err(CliError::Usage(format!(
                "--mode {} is randomized and needs --seed",
                if args.mode == Mode::Dilute { "dilute" } else { "dense" }
            )));
        }
        _ => {}
    }
    if let (Some(lo), Some(hi)) = (args.k_min, args.k_max) {
        if lo > hi {
            return Err(CliError::Usage(format!("--k-min {lo} exceeds --k-max {hi}")));
        }
    }
    if args.fit_max_evaluations == 0 || !(args.fit_tolerance >= 0.0) {
        return Err(CliError::Usage("fit budget must be positive and tolerance non-negative".into()));
    }
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<RunReport, CliError> {
    check_analyze_args(args)?;
    let mode_name = match args.mode {
        Mode::Rank => "rank",
        Mode::Dilute => "dilute",
        Mode::Dense => "dense",
    };
    let mut argv: Vec<String> = vec!["analyze".into(), "--input".into(), path_arg(&args.input)];
    argv.extend(["--output".into(), path_arg(&args.output), "--mode".into(), mode_name.into()]);
    for (flag, v) in [("--k-min", args.k_min), ("--k-max", args.k_max), ("--seed", args.seed)] {
        if let Some(v) = v {
            argv.extend([flag.to_string(), v.to_string()]);
        }
    }
    argv.extend([
        "--fit-max-evaluations".into(),
        args.fit_max_evaluations.to_string(),
        "--fit-tolerance".into(),
        args.fit_tolerance.to_string(),
    ]);
    if args.emit_plots {
        argv.push("--emit-plots".into());
    }
    let config = RunConfig {
        command: "analyze",
        inputs: vec![args.input.clone()],
        output: args.output.clone(),
        mode: Some(args.mode),
        k_min: args.k_min,
        k_max: args.k_max,
        seed: args.seed,
        emit_plots: args.emit_plots,
        fit_max_evaluations: Some(args.fit_max_evaluations),
        fit_tolerance: Some(args.fit_tolerance),
        argv,
    };
    let matrix = read_matrix(&args.input)?;
    if matrix.is_empty() {
        return Err(CliError::Data("empty matrix".into()));
    }
    let optimizer = NelderMead {
        max_evaluations: args.fit_max_evaluations,
        tolerance: args.fit_tolerance,
        ..NelderMead::default()
    };
    let mut out = Outputs::new(&args.output);
    let summary = match args.mode {
        Mode::Rank => analyze_rank(&matrix, &optimizer, args.emit_plots, &mut out)?,
        Mode::Dilute => analyze_dilute(&matrix, args, &optimizer, &mut out)?,
        Mode::Dense => analyze_dense(&matrix, args, &mut out)?,
    };
    out.finish(&config, summary)
}

fn analyze_rank(
    matrix: &WordDayMatrix,
    optimizer: &NelderMead,
    emit_plots: bool,
    out: &mut Outputs,
) -> Result<serde_json::Value, CliError> {
    let curve = rank::rank_curve(matrix).map_err(|e| CliError::Data(e.to_string()))?;
    let fit = match rank::fit_modified_power_law_with(&curve, optimizer) {
        Ok(fit) => Some(fit),
        Err(RankError::InsufficientData(n)) => {
            out.warn(format!("rank curve has {n} ranks; at least 100 are needed for a fit"));
            None
        }
        Err(e) => return Err(CliError::Numeric(e.to_string())),
    };
    let mut csv = Csv::new(&["rank", "count", "fitted"]);
    for (r, c) in curve.points() {
        let fitted = fit.as_ref().map_or(String::new(), |f| f.predict(r as f64).to_string());
        csv.row([r.to_string(), c.to_string(), fitted]);
    }
    out.add("rank.csv", csv.into_string());

    let mut summary = serde_json::json!({
        "vocabulary": curve.len(),
        "top_words": (1..=curve.len().min(10)).filter_map(|r| curve.word_at(r)).collect::<Vec<_>>(),
    });
    if let Some(fit) = &fit {
        out.add("rank_fit.json", json_pretty(fit));
        summary["fit"] = serde_json::to_value(fit).expect("fit serializes");
        if !fit.degenerate {
            let zipf = rank::fit_zipf(&curve).map_err(|e| CliError::Numeric(e.to_string()))?;
            let zm = rank::fit_zipf_mandelbrot(&curve).map_err(|e| CliError::Numeric(e.to_string()))?;
            let best = [
                ("modified_power_law", fit.residual),
                ("zipf", zipf.residual),
                ("zipf_mandelbrot", zm.residual),
            ]
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|m| m.0);
            out.add(
                "rank_baselines.json",
                json_pretty(&serde_json::json!({
                    "zipf": zipf,
                    "zipf_mandelbrot": zm,
                    "modified_power_law_residual": fit.residual,
                    "lowest_residual": best,
                })),
            );
        }
    }
    if emit_plots {
        let ranks = rank::subsample_ranks(curve.len(), rank::MAX_FIT_POINTS);
        let mut plot = String::from("# rank count fitted\n");
        for r in ranks {
            let c = curve.count_at(r).expect("rank in range");
            let fitted = fit.as_ref().map_or(f64::NAN, |f| f.predict(r as f64));
            plot.push_str(&format!("{r},{c},{fitted}\n"));
        }
        out.add("plots/rank_loglog.csv", plot);
    }
    Ok(summary)
}

/// Dilute ensembles within the optional k bounds.
fn dilute_selection<'a>(index: &'a EnsembleIndex, args: &AnalyzeArgs) -> Vec<&'a Ensemble> {
    select_dilute(index)
        .into_iter()
        .filter(|e| args.k_min.is_none_or(|lo| e.k >= lo) && args.k_max.is_none_or(|hi| e.k <= hi))
        .collect()
}

fn analyze_dilute(
    matrix: &WordDayMatrix,
    args: &AnalyzeArgs,
    optimizer: &NelderMead,
    out: &mut Outputs,
) -> Result<serde_json::Value, CliError> {
    let seed = args.seed.expect("checked");
    let horizon = matrix.horizon();
    let index = build_ensembles(matrix);
    out.add("legomena.csv", index.legomena_csv());
    let selected = dilute_selection(&index, args);

    let mut wt = Csv::new(&["k", "tau", "f", "R"]);
    let mut zeta_csv = Csv::new(&["k", "zeta", "zeta_err", "n_k"]);
    let mut rescaled = Csv::new(&["k", "t_R", "R"]);
    let mut fits = Csv::new(&["k", "a", "nu", "c", "residual", "converged"]);
    let mut means = Csv::new(&["k", "mean_tau", "expected", "deviation", "sample_count", "low_sample"]);
    let mut zeta_plot = String::from("# k zeta zeta_err\n");
    let mut classes_with_gaps = Vec::new();

    for e in &selected {
        let samples = waiting::ensemble_samples(e, matrix);
        let dist = match waiting::WaitingTimeDistribution::from_samples(Some(e.k), &samples, 0) {
            Ok(d) => d,
            Err(WaitingError::EmptySample) => continue,
            Err(err) => return Err(CliError::Numeric(err.to_string())),
        };
        classes_with_gaps.push(*e);
        let risk = waiting::risk_function(&dist);
        for tau in 1..=dist.support_len() {
            wt.row([e.k.to_string(), tau.to_string(), dist.f(tau).to_string(), risk.value(tau).to_string()]);
        }
        for (t_r, r) in waiting::rescale_time(&risk, e.k, horizon).points {
            rescaled.row([e.k.to_string(), t_r.to_string(), r.to_string()]);
        }
        let check = waiting::mean_waiting_check(&dist, e.k, horizon);
        means.row([
            e.k.to_string(),
            check.mean_tau.to_string(),
            check.expected.to_string(),
            check.deviation.to_string(),
            check.sample_count.to_string(),
            check.low_sample.to_string(),
        ]);
        if let Ok(z) = dist.zeta() {
            // Each class bootstraps from its own seed, derived from the master one.
            let class_seed = item_stream(seed, e.k, PARAMETERS).random::<u64>();
            let err = waiting::bootstrap_zeta(&samples, BOOTSTRAP_RESAMPLES, class_seed);
            let err_s = err.map_or(String::new(), |v| v.to_string());
            zeta_csv.row([e.k.to_string(), z.zeta.to_string(), err_s.clone(), e.n_k().to_string()]);
            zeta_plot.push_str(&format!("{},{},{}\n", e.k, z.zeta, err.unwrap_or(f64::NAN)));
        }
        match waiting::fit_stretched_exponential_with(&risk, optimizer) {
            Ok(f) => fits.row(fit_cells(&e.k.to_string(), &f, true)),
            Err(WaitingError::FitFailed { best, .. }) => fits.row(fit_cells(&e.k.to_string(), &best, false)),
            Err(WaitingError::InsufficientSupport(_)) => {}
            Err(err) => return Err(CliError::Numeric(err.to_string())),
        }
    }
    if classes_with_gaps.is_empty() {
        out.warn("no dilute ensemble has two event-days; nothing to pool".into());
    }
    out.add("waiting_times.csv", wt.into_string());
    out.add("zeta.csv", zeta_csv.into_string());
    out.add("rescaled.csv", rescaled.into_string());
    out.add("mean_check.csv", means.into_string());

    let mut summary = serde_json::json!({
        "horizon": horizon,
        "dilute_classes": selected.len(),
        "classes_with_waiting_times": classes_with_gaps.len(),
    });
    let mut agg_csv = Csv::new(&["tau", "f", "R"]);
    if !classes_with_gaps.is_empty() {
        let agg = waiting::aggregate_distribution(&classes_with_gaps, matrix)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let risk = waiting::risk_function(&agg);
        for tau in 1..=agg.support_len() {
            agg_csv.row([tau.to_string(), agg.f(tau).to_string(), risk.value(tau).to_string()]);
        }
        summary["pooled_waiting_times"] = agg.sample_count().into();
        if let Ok(z) = agg.zeta() {
            summary["aggregate"] = serde_json::to_value(z).expect("stat serializes");
        }
        match waiting::fit_stretched_exponential_with(&risk, optimizer) {
            Ok(f) => fits.row(fit_cells("all", &f, true)),
            Err(WaitingError::FitFailed { best, .. }) => fits.row(fit_cells("all", &best, false)),
            Err(WaitingError::InsufficientSupport(_)) => {}
            Err(err) => return Err(CliError::Numeric(err.to_string())),
        }
        if args.emit_plots {
            let mut plot = String::from("# tau_center density tau_lo tau_hi\n");
            for b in waiting::log_binned(&agg, PLOT_BIN_FACTOR) {
                plot.push_str(&format!("{},{},{},{}\n", b.center, b.density, b.lo, b.hi));
            }
            out.add("plots/aggregate_logbinned.csv", plot);
        }
    }
    out.add("aggregate.csv", agg_csv.into_string());
    out.add("fits.csv", fits.into_string());
    if args.emit_plots {
        out.add("plots/zeta_vs_k.csv", zeta_plot);
    }
    Ok(summary)
}

fn fit_cells(k: &str, f: &waiting::StretchedExpFit, converged: bool) -> [String; 6] {
    [
        k.to_string(),
        f.a.to_string(),
        f.nu.to_string(),
        f.c.to_string(),
        f.residual.to_string(),
        converged.to_string(),
    ]
}

fn analyze_dense(matrix: &WordDayMatrix, args: &AnalyzeArgs, out: &mut Outputs) -> Result<serde_json::Value, CliError> {
    let seed = args.seed.expect("checked");
    let horizon = matrix.horizon();
    let k_lo = args.k_min.unwrap_or(DEFAULT_DENSE_RANGE.0);
    let k_hi = args.k_max.unwrap_or(DEFAULT_DENSE_RANGE.1.max(k_lo));
    let index = build_ensembles(matrix);
    let selected = select_dense(&index, k_lo, k_hi);
    let words: Vec<(u64, &WordSeries)> = selected
        .iter()
        .flat_map(|e| e.words.iter().filter_map(move |w| matrix.get(w).map(|s| (e.k, s))))
        .collect();

    // One box-allocation null word per analysed word, with the same k;
    // null word i is seeded from stream i of the master seed.
    let null_words: Vec<(u64, WordSeries)> = words
        .iter()
        .enumerate()
        .map(|(i, &(k, _))| {
            let one = dense::poisson_null_ensemble(k, horizon, 1, item_stream(seed, i as u64, PARAMETERS).random());
            (k, one.into_iter().next().expect("one word"))
        })
        .collect();
    let sidecar = serde_json::json!({
        "seed": seed,
        "method": "box allocation: k events uniform over T days, one null word per analysed word with the same k",
        "horizon": horizon,
        "k_min": k_lo,
        "k_max": k_hi,
        "n_words": null_words.len(),
        "bin_width": dense::BIN_WIDTH,
        "range": [dense::RANGE_LO, dense::RANGE_HI],
    });
    out.add("dense_null.json", json_pretty(&sidecar));

    let mut summary = serde_json::json!({
        "horizon": horizon,
        "k_min": k_lo,
        "k_max": k_hi,
        "words": words.len(),
    });
    if words.is_empty() {
        out.warn(format!("no words with k in [{k_lo}, {k_hi}]"));
        out.add("dense.csv", Csv::new(&["xtilde", "density_empirical", "density_null"]).into_string());
        return Ok(summary);
    }
    let data_err = |e: dense::DenseError| CliError::Data(e.to_string());
    let empirical = dense::pool_rescaled(words.iter().copied(), horizon).map_err(data_err)?;
    let null = dense::pool_rescaled(null_words.iter().map(|(k, s)| (*k, s)), horizon).map_err(data_err)?;
    if empirical.skipped_words > 0 {
        out.warn(format!("{} word(s) with zero spread skipped", empirical.skipped_words));
    }
    let table = dense::comparison_csv(&empirical, &null);
    if args.emit_plots {
        out.add("plots/dense.csv", format!("# {}", table));
    }
    out.add("dense.csv", table);
    let chi = dense::binomial_chi_square(words.iter().copied(), horizon).ok();
    let describe = |d: &RescaledCountDistribution| {
        if d.contributing_words == 0 {
            return serde_json::Value::Null;
        }
        serde_json::json!({
            "contributing_words": d.contributing_words,
            "skipped_words": d.skipped_words,
            "mean": d.mean(),
            "variance": d.variance(),
            "fraction_above_3": d.fraction_above(3.0),
            "underflow": d.underflow,
            "overflow": d.overflow,
        })
    };
    summary["empirical"] = describe(&empirical);
    summary["null"] = describe(&null);
    summary["binomial_chi_square"] = serde_json::to_value(chi).expect("test serializes");

    let classes = index
        .iter()
        .filter(|e| e.k >= 2)
        .map(|e| (e.k, e.words.iter().filter_map(|w| matrix.get(w)).collect::<Vec<_>>()));
    match dense::sigma_scaling_check(classes, horizon) {
        Ok(s) => {
            summary["sigma_scaling"] = serde_json::json!({
                "relative_exponent": s.relative_exponent,
                "absolute_exponent": s.absolute_exponent,
            });
            out.add("sigma_scaling.csv", s.to_csv());
        }
        Err(e) => out.warn(format!("sigma scaling skipped: {e}")),
    }
    Ok(summary)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<RunReport, CliError> {
    let text = fs::read_to_string(&args.spec).map_err(|e| CliError::Data(format!("{}: {e}", args.spec.display())))?;
    let mut spec = SyntheticCorpusSpec::from_json(&text)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let mut argv = vec!["simulate".into(), "--spec".into(), path_arg(&args.spec)];
    argv.extend(["--output".into(), path_arg(&args.output)]);
    if let Some(seed) = args.seed {
        argv.extend(["--seed".into(), seed.to_string()]);
    }
    let config = RunConfig {
        command: "simulate",
        inputs: vec![args.spec.clone()],
        output: args.output.clone(),
        mode: None,
        k_min: None,
        k_max: None,
        seed: Some(spec.seed),
        emit_plots: false,
        fit_max_evaluations: None,
        fit_tolerance: None,
        argv,
    };
    let matrix = generate(&spec)?;
    let mut out = Outputs::new(&args.output);
    if matrix.is_empty() {
        out.warn("no word occurred; the matrix is empty".into());
    }
    out.add(MATRIX_FILE, matrix.to_tsv());
    out.add("spec.json", spec.to_json() + "\n");
    let summary = serde_json::json!({
        "vocabulary": matrix.vocabulary_size(),
        "grand_total": matrix.grand_total(),
    });
    out.finish(&config, summary)
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code; diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(report) => {
            for f in &report.files {
                println!("{f}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
