//! Experiment CLI: generate networks, compare sensor strategies, and run
//! the lead-time analytics.
//!
//! Every subcommand takes an optional `--config <file>` of `key=value`
//! lines plus flag overrides, writes CSV outputs under `--out`, and is
//! fully determined by `--rng-seed`. Exit codes: 0 success, 2 usage
//! error, 1 runtime failure.

use clap::{Args, Parser, Subcommand};
use episense::experiments::{
    cmd_fano, cmd_generate, cmd_leadtime, cmd_predict, cmd_stability, cmd_surrogate,
    ExperimentConfig, ExperimentError, KSpec, ModelKind, NetworkSource, StrategyKind,
};
use episense::graph::FileFormat;
use episense::sensors::{DtThreshold, Scoring};
use episense::surrogate::SurrogateCriteria;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "episense",
    version,
    about = "Social-network sensors for epidemic lead-time forecasting",
    after_help = "Desk-scale defaults: networks up to ~50,000 nodes and ensembles up to ~200 runs \
                  keep every subcommand in the minutes range."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate (or canonicalize) a contact network file and print its degree stats
    Generate(CommonArgs),
    /// Two-phase lead-time comparison of the TT, DT, Top-K and WD strategies
    Leadtime(CommonArgs),
    /// Sensor-size sweep: mean lead, variance and inverse Fano factor per size
    Fano(CommonArgs),
    /// Lead-time stability against the observation window length
    Stability(CommonArgs),
    /// Cubic prediction of the population curve from the sensor curve
    Predict(CommonArgs),
    /// Demographics-only surrogate pipeline (criteria, per-rate refinement, lead)
    Surrogate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Key-value config file applied before flag overrides
    #[arg(long)]
    config: Option<PathBuf>,
    /// Load this network file instead of generating one
    #[arg(long)]
    network: Option<PathBuf>,
    /// Network file format
    #[arg(long, value_parser = ["edge-list", "attributed"])]
    format: Option<String>,
    /// Synthetic generator: starlike or citylike
    #[arg(long, value_parser = ["starlike", "citylike"])]
    generator: Option<String>,
    /// Node count for the generator
    #[arg(long)]
    n: Option<usize>,
    /// Hub fraction for the starlike generator, in (0, 0.1)
    #[arg(long)]
    hub_fraction: Option<f64>,
    /// Target average degree for the citylike generator, >= 4
    #[arg(long)]
    target_avg_degree: Option<f64>,
    /// Disease model: si or seir
    #[arg(long, value_parser = ["si", "seir"])]
    model: Option<String>,
    /// Per-second transmission rate applied to edge durations
    #[arg(long)]
    beta: Option<f64>,
    /// Daily exposed-to-infectious rate (SEIR)
    #[arg(long)]
    alpha: Option<f64>,
    /// Daily infectious-to-recovered rate (SEIR)
    #[arg(long)]
    gamma: Option<f64>,
    /// Sensor strategy: tt, dt, topk, wd, random or greedy-mait
    #[arg(long)]
    strategy: Option<String>,
    /// Sensor-set size (absolute node count)
    #[arg(long)]
    k: Option<usize>,
    /// Sensor-set size as a fraction of the population
    #[arg(long)]
    k_frac: Option<f64>,
    /// Coverage target f(S) for greedy-mait
    #[arg(long)]
    eps: Option<f64>,
    /// Hit-rate threshold for the TT/DT heuristics
    #[arg(long)]
    eps0: Option<f64>,
    /// Evaluation ensemble size
    #[arg(long)]
    runs: Option<usize>,
    /// Training ensemble size (defaults to --runs behavior in config)
    #[arg(long)]
    train_runs: Option<usize>,
    /// Initial infected counts, comma-separated (leadtime sweeps all, e.g. 1,5,10)
    #[arg(long)]
    seeds: Option<String>,
    /// Simulated days past day 0
    #[arg(long)]
    horizon: Option<u32>,
    /// Master RNG seed; fixes every stochastic stage
    #[arg(long)]
    rng_seed: Option<u64>,
    /// Output directory for CSV files
    #[arg(long)]
    out: Option<PathBuf>,
    /// Respondent sample size for nomination strategies
    #[arg(long)]
    sample_size: Option<usize>,
    /// Nominations per respondent (the K of Top-K)
    #[arg(long)]
    nominations: Option<usize>,
    /// Sensor-size fractions for the fano sweep, comma-separated
    #[arg(long)]
    sizes: Option<String>,
    /// Observation windows in days for stability, comma-separated ascending
    #[arg(long)]
    windows: Option<String>,
    /// Training window (days) for the cubic predictor
    #[arg(long)]
    train_days: Option<usize>,
    /// Transmission rates for surrogate refinement, comma-separated
    #[arg(long)]
    rates: Option<String>,
    /// Fraction of the population used as positive training labels
    #[arg(long)]
    train_frac: Option<f64>,
    /// Surrogate criteria file (key=value)
    #[arg(long)]
    criteria: Option<PathBuf>,
    /// Long-meeting duration threshold in seconds
    #[arg(long)]
    long_threshold: Option<u32>,
    /// t_inf scoring for TT: depth or day
    #[arg(long, value_parser = ["depth", "day"])]
    scoring: Option<String>,
    /// DT eps0 reading: hit-rate or min-depth
    #[arg(long, value_parser = ["hit-rate", "min-depth"])]
    dt_threshold: Option<String>,
    /// Also emit the information-tier comparison (surrogate subcommand)
    #[arg(long)]
    tiers: bool,
}

fn parse_list<T: std::str::FromStr>(what: &str, value: &str) -> Result<Vec<T>, ExperimentError> {
    value
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| ExperimentError::Config(format!("invalid {what} entry `{tok}`")))
        })
        .collect()
}

impl CommonArgs {
    fn build_config(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            cfg.apply_kv(&text)?;
        }

        if self.network.is_some() && self.generator.is_some() {
            return Err(ExperimentError::Config(
                "give either --network or --generator, not both".into(),
            ));
        }
        if let Some(path) = &self.network {
            let format = match self.format.as_deref() {
                Some("edge-list") => FileFormat::EdgeList,
                _ => FileFormat::Attributed,
            };
            cfg.network = NetworkSource::File {
                path: path.clone(),
                format,
            };
        }
        if let Some(gen) = &self.generator {
            let n = self
                .n
                .ok_or_else(|| ExperimentError::Config("--generator requires --n".into()))?;
            cfg.network = match gen.as_str() {
                "starlike" => NetworkSource::Starlike {
                    n,
                    hub_fraction: self.hub_fraction.unwrap_or(0.01),
                },
                _ => NetworkSource::Citylike {
                    n,
                    target_avg_degree: self.target_avg_degree.unwrap_or(50.0),
                },
            };
        }
        if let Some(model) = &self.model {
            cfg.model = if model == "si" { ModelKind::Si } else { ModelKind::Seir };
        }
        if let Some(v) = self.beta {
            cfg.beta = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(s) = &self.strategy {
            cfg.strategy = StrategyKind::parse(s)?;
        }
        if self.k.is_some() && self.k_frac.is_some() {
            return Err(ExperimentError::Config(
                "give either --k or --k-frac, not both".into(),
            ));
        }
        if let Some(k) = self.k {
            cfg.k = KSpec::Absolute(k);
        }
        if let Some(f) = self.k_frac {
            cfg.k = KSpec::Fraction(f);
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.eps0 {
            cfg.eps0 = v;
        }
        if let Some(v) = self.runs {
            cfg.runs = v;
        }
        if let Some(v) = self.train_runs {
            cfg.train_runs = v;
        }
        if let Some(s) = &self.seeds {
            cfg.seed_counts = parse_list("seeds", s)?;
            if cfg.seed_counts.is_empty() {
                return Err(ExperimentError::Config("--seeds must be non-empty".into()));
            }
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.rng_seed {
            cfg.master_seed = v;
        }
        if let Some(p) = &self.out {
            cfg.out_dir = p.clone();
        }
        if self.sample_size.is_some() {
            cfg.sample_size = self.sample_size;
        }
        if let Some(v) = self.nominations {
            cfg.nominations = v;
        }
        if let Some(s) = &self.sizes {
            cfg.sizes = parse_list("sizes", s)?;
        }
        if let Some(s) = &self.windows {
            cfg.windows = parse_list("windows", s)?;
        }
        if let Some(v) = self.train_days {
            cfg.train_days = v;
        }
        if let Some(s) = &self.rates {
            cfg.rates = parse_list("rates", s)?;
        }
        if let Some(v) = self.train_frac {
            cfg.train_frac = v;
        }
        if let Some(path) = &self.criteria {
            let text = std::fs::read_to_string(path)?;
            cfg.criteria = SurrogateCriteria::parse_kv(&text)?;
        }
        if let Some(v) = self.long_threshold {
            cfg.long_threshold = v;
        }
        if let Some(s) = &self.scoring {
            cfg.scoring = if s == "day" {
                Scoring::CalendarDay
            } else {
                Scoring::TreeDepth
            };
        }
        if let Some(s) = &self.dt_threshold {
            cfg.dt_threshold = if s == "min-depth" {
                DtThreshold::MinDepth
            } else {
                DtThreshold::HitRate
            };
        }
        if self.tiers {
            cfg.tiers = true;
        }
        Ok(cfg)
    }
}

fn run(command: &Command) -> Result<(), ExperimentError> {
    match command {
        Command::Generate(args) => {
            let cfg = args.build_config()?;
            let report = cmd_generate(&cfg)?;
            println!(
                "wrote {} (n={}, avg_degree={:.4}, max_degree={})",
                report.path.display(),
                report.stats.n,
                report.stats.avg_degree,
                report.stats.max_degree
            );
        }
        Command::Leadtime(args) => {
            let cfg = args.build_config()?;
            let report = cmd_leadtime(&cfg)?;
            println!("dataset,seeds,strategy,k,mean_lead,var_lead");
            for row in &report.rows {
                println!(
                    "{},{},{},{},{:.3},{}",
                    row.dataset,
                    row.seed_count,
                    row.strategy,
                    row.k,
                    row.mean_lead,
                    if row.var_lead.is_nan() {
                        "na".to_string()
                    } else {
                        format!("{:.3}", row.var_lead)
                    }
                );
            }
            println!("wrote {}", cfg.out_dir.join("leadtime.csv").display());
        }
        Command::Fano(args) => {
            let cfg = args.build_config()?;
            let rows = cmd_fano(&cfg)?;
            for row in &rows {
                println!(
                    "size={:.4} k={} mean_lead={:.3} var={:.3} inverse_fano={:.3}",
                    row.size_fraction, row.k, row.mean_lead, row.var_lead, row.inverse_fano
                );
            }
            println!("wrote {}", cfg.out_dir.join("fano.csv").display());
        }
        Command::Stability(args) => {
            let cfg = args.build_config()?;
            let report = cmd_stability(&cfg)?;
            match (report.full_lead, report.w_star) {
                (Some(full), Some(w)) => {
                    println!("full-data lead {full:.3} days; stabilizes from window {w} days")
                }
                (Some(full), None) => {
                    println!("full-data lead {full:.3} days; no stabilization window found")
                }
                _ => println!("full-window fit failed; see stability.csv"),
            }
            println!("wrote {}", cfg.out_dir.join("stability.csv").display());
        }
        Command::Predict(args) => {
            let cfg = args.build_config()?;
            let report = cmd_predict(&cfg)?;
            let c = report.predictor.coeffs;
            println!(
                "cubic coefficients: {:.6e} {:.6e} {:.6e} {:.6e}",
                c[0], c[1], c[2], c[3]
            );
            println!(
                "held-out rmse {:.3} ({:.2}% of final cumulative)",
                report.predictor.rmse,
                100.0 * report.relative_rmse
            );
            println!("wrote {}", cfg.out_dir.join("predict.csv").display());
        }
        Command::Surrogate(args) => {
            let cfg = args.build_config()?;
            let report = cmd_surrogate(&cfg)?;
            println!(
                "S' {} -> S'' {} (empty: {})",
                report.s_prime_size,
                report.s_double_prime.len(),
                report.s_double_prime.is_empty()
            );
            println!(
                "surrogate mean lead {:.3}, dt mean lead {:.3}",
                report.surrogate_mean_lead, report.dt_mean_lead
            );
            println!("wrote {}", cfg.out_dir.join("surrogate.csv").display());
            if report.tiers.is_some() {
                println!("wrote {}", cfg.out_dir.join("tiers.csv").display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
