//! Command-line front end.
//!
//! Every flag may also come from a JSON `--config` file whose keys are the
//! flag names with underscores (`lags_source`, `retrain_per_window`, ...).
//! Flags given on the command line win over the file, the file wins over
//! built-in defaults.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use super::bench::{run_bench, BenchConfig, Section};
use super::cit::{CitExperiment, CmiExperiment};
use super::entropy::{estimate_sample, EntropyRow, EntropySweep};
use super::io::{read_sample_csv, read_series_csv, write_rows, write_series_csv};
use super::manifest::{write_manifest, RunContext};
use super::staircase::{Staircase, StaircaseStep};
use crate::discrete::{DiscreteSample, Method};
use crate::error::Error;
use crate::estimators::{cmi, mi};
use crate::nn::TrainConfig;
use crate::synth::{coupled_process, DistributionKind, DistributionSpec, TripletKind};
use crate::timeseries::{prices_from_symbols, rolling_te, BinnerSpec, RollingConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "njee", version, about = "Neural joint-entropy estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of a synthetic distribution or a CSV sample.
    Entropy(Options),
    /// MI staircase on quantized Gaussians, or MI between CSV column groups.
    Mi(Options),
    /// Conditional MI on a synthetic triplet or CSV column groups.
    Cmi(Options),
    /// Rolling transfer entropy between two price series.
    Te(Options),
    /// Conditional-independence ROC on a synthetic triplet corpus.
    Cit(Options),
    /// Full benchmark suite with pass/fail summary.
    Bench(Options),
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// uniform, zipf, geometric, mixture or laplace
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Alphabet size.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sample size; comma-separated for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// True MI levels in nats, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub cubic: Option<bool>,
    #[arg(long)]
    pub lags_source: Option<usize>,
    #[arg(long)]
    pub lags_target: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub retrain_per_window: Option<bool>,
    #[arg(long)]
    pub holdout: Option<f64>,
    /// Comma-separated: njee, plugin, miller_madow, chao_shen.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Comma-separated bench sections: entropy, mi, cmi, te, cit, gradcheck.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<String>>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    #[arg(long)]
    pub base: Option<u32>,
    /// Integer sample CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub column: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub x_cols: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub y_cols: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub z_cols: Option<Vec<usize>>,
    /// Source price series CSV (`timestamp,value`).
    #[arg(long)]
    pub x_series: Option<PathBuf>,
    /// Target price series CSV.
    #[arg(long)]
    pub y_series: Option<PathBuf>,
    /// Coupling of the synthetic TE process.
    #[arg(long)]
    pub coupling: Option<f64>,
    /// chain, fork, collider or direct
    #[arg(long)]
    pub kind: Option<String>,
    /// Triplets per class in the CIT corpus.
    #[arg(long)]
    pub triplets: Option<usize>,
    #[arg(long)]
    pub trace_window: Option<usize>,
}

macro_rules! merge_fields {
    ($a:ident, $b:ident; $($f:ident),*) => {
        Options { $($f: $a.$f.or($b.$f),)* }
    };
}

impl Options {
    /// Field-wise `self` over `fallback`.
    pub fn or(self, fallback: Options) -> Options {
        let (a, b) = (self, fallback);
        merge_fields!(a, b; dist, alpha, p, sigma, k, n, reps, rho, levels, dim, bins, cubic,
            lags_source, lags_target, window, stride, retrain_per_window, holdout, methods, seed,
            jobs, out, config, only, epochs, patience, hidden, base, input, column, x_cols, y_cols,
            z_cols, x_series, y_series, coupling, kind, triplets, trace_window)
    }

    /// Command-line options merged over the `--config` file, if any.
    pub fn resolve(self) -> Result<Options, CliError> {
        match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
                let file: Options = serde_json::from_str(&text)
                    .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
                Ok(self.or(file))
            }
            None => Ok(self),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn out_dir(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("results").join(default))
    }

    /// Library defaults with `--epochs`, `--patience`, `--hidden`, `--holdout` and `--seed` applied.
    pub fn train_config(&self) -> Result<TrainConfig, CliError> {
        let mut t = TrainConfig::default();
        if let Some(e) = self.epochs {
            t.max_epochs = e;
            t.patience = t.patience.min(e);
        }
        if let Some(p) = self.patience {
            t.patience = p;
        }
        if let Some(h) = &self.hidden {
            t.hidden_sizes = h.clone();
        }
        if let Some(h) = self.holdout {
            t.holdout = h;
        }
        t.seed = self.seed();
        t.validate(2).map_err(CliError::from)?;
        Ok(t)
    }

    pub fn distribution(&self) -> Result<DistributionSpec, CliError> {
        let kind = match self.dist.as_deref().unwrap_or("uniform") {
            "uniform" => DistributionKind::Uniform,
            "zipf" => DistributionKind::Zipf {
                alpha: self.alpha.unwrap_or(1.0),
            },
            "geometric" => DistributionKind::Geometric {
                p: self.p.unwrap_or(1e-3),
            },
            "mixture" => DistributionKind::ZipfGeometricMixture {
                alpha: self.alpha.unwrap_or(1.0),
                p: self.p.unwrap_or(1e-3),
            },
            "laplace" => DistributionKind::DiscreteLaplace {
                sigma: self.sigma.unwrap_or(100.0),
            },
            other => return Err(CliError::usage(format!("unknown distribution {other:?}"))),
        };
        DistributionSpec::new(kind, self.k.unwrap_or(1000)).map_err(CliError::from)
    }

    fn methods(&self) -> Result<Vec<Method>, CliError> {
        match &self.methods {
            Some(m) => m.iter().map(|s| Method::parse(s).map_err(CliError::from)).collect(),
            None => Ok(vec![Method::Njee, Method::Plugin, Method::MillerMadow, Method::ChaoShen]),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli.command, command_line) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(command: Command, command_line: Vec<String>) -> Result<i32, CliError> {
    let (name, opts) = match command {
        Command::Entropy(o) => ("entropy", o),
        Command::Mi(o) => ("mi", o),
        Command::Cmi(o) => ("cmi", o),
        Command::Te(o) => ("te", o),
        Command::Cit(o) => ("cit", o),
        Command::Bench(o) => ("bench", o),
    };
    let opts = opts.resolve()?;
    if let Some(jobs) = opts.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    }
    let ctx = RunContext::new(command_line, &opts, opts.seed())?;
    let out = opts.out_dir(name);
    std::fs::create_dir_all(&out).map_err(|e| CliError::data(format!("{}: {e}", out.display())))?;
    match name {
        "entropy" => cmd_entropy(&opts, &out, &ctx),
        "mi" => cmd_mi(&opts, &out, &ctx),
        "cmi" => cmd_cmi(&opts, &out, &ctx),
        "te" => cmd_te(&opts, &out, &ctx),
        "cit" => cmd_cit(&opts, &out, &ctx),
        _ => cmd_bench(&opts, &out, &ctx),
    }
}

fn emit<T: Serialize>(out: &Path, name: &str, rows: &[T], ctx: &RunContext) -> Result<(), CliError> {
    let path = out.join(name);
    write_rows(&path, rows)?;
    write_manifest(&path, ctx)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn single_n(opts: &Options, default: usize) -> Result<usize, CliError> {
    match opts.n.as_deref() {
        None => Ok(default),
        Some([n]) => Ok(*n),
        Some(_) => Err(CliError::usage("this command takes a single --n")),
    }
}

fn columns(sample: &DiscreteSample, cols: &Option<Vec<usize>>, flag: &str) -> Result<DiscreteSample, CliError> {
    let cols = cols
        .as_ref()
        .ok_or_else(|| CliError::usage(format!("--input needs {flag}")))?;
    Ok(sample.select_columns(cols)?)
}

fn cmd_entropy(opts: &Options, out: &Path, ctx: &RunContext) -> Result<i32, CliError> {
    let train = opts.train_config()?;
    let methods = opts.methods()?;
    let base = opts.base.unwrap_or(2);
    if let Some(input) = &opts.input {
        let mut sample = read_sample_csv(input)?;
        if let Some(c) = opts.column {
            sample = sample.select_columns(&[c])?;
        }
        let rows = methods
            .iter()
            .map(|&m| {
                Ok(EntropyRow {
                    method: m.name().to_string(),
                    n: sample.n_rows(),
                    rep: 0,
                    estimate: estimate_sample(&sample, m, base, &train)?,
                    truth: None,
                    error: None,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        for r in &rows {
            println!("{:>12}  {:.6}", r.method, r.estimate);
        }
        emit(out, "entropy.csv", &rows, ctx)?;
        return Ok(EXIT_OK);
    }
    let sweep = EntropySweep {
        dist: opts.distribution()?,
        sample_sizes: opts.n.clone().unwrap_or_else(|| vec![1000]),
        reps: opts.reps.unwrap_or(10),
        methods,
        base,
        train,
        seed: opts.seed(),
    };
    let (rows, rmse) = sweep.run()?;
    for r in &rmse {
        println!("{:>12}  n={:<8} mean={:.4}  truth={:.4}  rmse={:.4}", r.method, r.n, r.mean_estimate, r.truth, r.rmse);
    }
    emit(out, "entropy.csv", &rows, ctx)?;
    emit(out, "entropy_rmse.csv", &rmse, ctx)?;
    Ok(EXIT_OK)
}

fn cmd_mi(opts: &Options, out: &Path, ctx: &RunContext) -> Result<i32, CliError> {
    let train = opts.train_config()?;
    if let Some(input) = &opts.input {
        let sample = read_sample_csv(input)?;
        let x = columns(&sample, &opts.x_cols, "--x-cols")?;
        let y = columns(&sample, &opts.y_cols, "--y-cols")?;
        let est = mi(&x, &y, &train)?;
        println!("mi {:.6} nats", est.value_nats);
        #[derive(Serialize)]
        struct Row {
            n: usize,
            estimate: f64,
            h_x: f64,
            h_x_given_y: f64,
        }
        let row = Row {
            n: sample.n_rows(),
            estimate: est.value_nats,
            h_x: est.h_x.value_nats,
            h_x_given_y: est.h_x_given_y.value_nats,
        };
        emit(out, "mi.csv", &[row], ctx)?;
        return Ok(EXIT_OK);
    }
    let dim = opts.dim.unwrap_or(20);
    let cubic = opts.cubic.unwrap_or(false);
    let steps = match opts.rho {
        Some(rho) => {
            let mut s = vec![StaircaseStep { rho, cubic: false }];
            if cubic {
                s.push(StaircaseStep { rho, cubic: true });
            }
            s
        }
        None => {
            let levels = opts.levels.clone().unwrap_or_else(|| vec![2.0]);
            Staircase::levels(dim, &levels, if cubic { &levels } else { &[] })
        }
    };
    let staircase = Staircase {
        dim,
        bins: opts.bins.unwrap_or(8),
        n: single_n(opts, 4000 * 64)?,
        steps,
        train,
        seed: opts.seed(),
        trace_window: opts.trace_window.unwrap_or(200),
    };
    let (rows, trace) = staircase.run()?;
    for r in &rows {
        println!(
            "true {:.3}  estimate {:.4}  cubic {}",
            r.true_mi, r.estimate, r.cubic
        );
    }
    emit(out, "mi.csv", &rows, ctx)?;
    if !trace.is_empty() {
        emit(out, "mi_trace.csv", &trace, ctx)?;
    }
    Ok(EXIT_OK)
}

fn cmd_cmi(opts: &Options, out: &Path, ctx: &RunContext) -> Result<i32, CliError> {
    let train = opts.train_config()?;
    if let Some(input) = &opts.input {
        let sample = read_sample_csv(input)?;
        let x = columns(&sample, &opts.x_cols, "--x-cols")?;
        let y = columns(&sample, &opts.y_cols, "--y-cols")?;
        let z = columns(&sample, &opts.z_cols, "--z-cols")?;
        let est = cmi(&x, &y, &z, &train)?;
        println!("cmi {:.6} nats", est.value_nats);
        #[derive(Serialize)]
        struct Row {
            n: usize,
            estimate: f64,
            h_x_given_z: f64,
            h_x_given_yz: f64,
        }
        let row = Row {
            n: sample.n_rows(),
            estimate: est.value_nats,
            h_x_given_z: est.h_x_given_z.value_nats,
            h_x_given_yz: est.h_x_given_yz.value_nats,
        };
        emit(out, "cmi.csv", &[row], ctx)?;
        return Ok(EXIT_OK);
    }
    let exp = CmiExperiment {
        kind: TripletKind::parse(opts.kind.as_deref().unwrap_or("chain"))?,
        n: single_n(opts, 10_000)?,
        reps: opts.reps.unwrap_or(1),
        train,
        seed: opts.seed(),
    };
    let rows = exp.run()?;
    for r in &rows {
        println!("rep {}  estimate {:.4}  truth {:.4}", r.rep, r.estimate, r.truth);
    }
    emit(out, "cmi.csv", &rows, ctx)?;
    Ok(EXIT_OK)
}

fn cmd_te(opts: &Options, out: &Path, ctx: &RunContext) -> Result<i32, CliError> {
    let train = opts.train_config()?;
    let (x, y) = match (&opts.x_series, &opts.y_series) {
        (Some(a), Some(b)) => (read_series_csv(a)?, read_series_csv(b)?),
        (None, None) => {
            let n = single_n(opts, 2000)?;
            let series = coupled_process(n, opts.k.unwrap_or(2), opts.coupling.unwrap_or(1.0), opts.seed())?;
            println!("synthetic coupled process, true TE {:.4} nats", series.true_te);
            let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
            let x = prices_from_symbols("x", start, &series.x)?;
            let y = prices_from_symbols("y", start, &series.y)?;
            write_series_csv(&out.join("x.csv"), &x)?;
            write_series_csv(&out.join("y.csv"), &y)?;
            (x, y)
        }
        _ => return Err(CliError::usage("give both --x-series and --y-series, or neither")),
    };
    let rolling = RollingConfig {
        window: opts.window.unwrap_or(30),
        stride: opts.stride.unwrap_or(1),
        k: opts.lags_source.unwrap_or(5),
        l: opts.lags_target.unwrap_or(5),
        binner: BinnerSpec::default(),
        retrain_per_window: opts.retrain_per_window.unwrap_or(false),
    };
    let rows = rolling_te(&x, &y, &rolling, &train)?;
    let mean = |f: fn(&crate::timeseries::TeRow) -> f64| rows.iter().map(f).sum::<f64>() / rows.len() as f64;
    println!(
        "{} windows  mean te_xy {:.4}  mean te_yx {:.4}",
        rows.len(),
        mean(|r| r.te_xy_nats),
        mean(|r| r.te_yx_nats)
    );
    emit(out, "te.csv", &rows, ctx)?;
    Ok(EXIT_OK)
}

fn cmd_cit(opts: &Options, out: &Path, ctx: &RunContext) -> Result<i32, CliError> {
    let per_class = opts.triplets.unwrap_or(50);
    let exp = CitExperiment {
        n_dependent: per_class,
        n_independent: per_class,
        n_samples: single_n(opts, 2000)?,
        train: opts.train_config()?,
        seed: opts.seed(),
    };
    let r = exp.run()?;
    println!("auc {:.4}  shuffled-label auc {:.4}", r.roc.auc, r.null_roc.auc);
    emit(out, "cit_scores.csv", &r.scores, ctx)?;
    emit(out, "cit_roc.csv", &r.roc.points, ctx)?;
    Ok(EXIT_OK)
}

fn cmd_bench(opts: &Options, out: &Path, ctx: &RunContext) -> Result<i32, CliError> {
    let mut cfg = BenchConfig::new(opts.seed.unwrap_or(7));
    if let Some(only) = &opts.only {
        cfg.only = only.iter().map(|s| Section::parse(s)).collect::<Result<_, _>>()?;
    }
    let report = run_bench(&cfg, out, ctx)?;
    for c in &report.checks {
        println!(
            "[{}] criterion {:>2}  {:<34} {:.6}  ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.criterion,
            c.name,
            c.measured,
            c.bound
        );
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_ACCEPTANCE })
}
