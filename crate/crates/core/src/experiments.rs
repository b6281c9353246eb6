//! Experiment orchestration: configuration, the two-phase train/evaluate
//! protocol, and CSV emission for every subcommand.
//!
//! Sensor selection always happens on a training ensemble and lead times
//! are always measured on a fresh evaluation ensemble with a disjoint RNG
//! stream, so selection never sees the realizations it is judged on.
//! Every stochastic stage derives its stream from the master seed and a
//! stage label; a fixed config yields byte-identical CSVs.

use crate::epicurve::{
    evaluate_leads, fano_sweep, fit_poly_predictor, mean_restricted_epicurve,
    stability_curve, stabilization_window, AnalysisError, FanoRow, FitError, PolyPredictor,
    StabilityRow, SweepConfig,
};
use crate::epidemic::{
    run_ensemble, DiseaseModel, EpidemicError, SeedSpec, SimulationConfig,
};
use crate::graph::{
    degree_stats, generate_citylike, generate_starlike, load_network, save_network,
    ContactNetwork, DegreeStats, FileFormat, GraphError, NodeId,
};
use crate::rng::derive_seed;
use crate::sensors::{
    estimate_coverage, select_random, select_with, DtThreshold, Scoring, SelectionStrategy,
    SensorError, SensorSet,
};
use crate::surrogate::{
    apply_criteria, compare_information_tiers, extract_features, refine_surrogates,
    RefineConfig, RefineStrategy, SurrogateCriteria, SurrogateError, TierConfig, TierRow,
    TreeConfig,
};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Epidemic(#[from] EpidemicError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Surrogate(#[from] SurrogateError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSource {
    File { path: PathBuf, format: FileFormat },
    Starlike { n: usize, hub_fraction: f64 },
    Citylike { n: usize, target_avg_degree: f64 },
}

impl NetworkSource {
    pub fn label(&self) -> String {
        match self {
            NetworkSource::File { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "network".into()),
            NetworkSource::Starlike { .. } => "starlike".into(),
            NetworkSource::Citylike { .. } => "citylike".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KSpec {
    Absolute(usize),
    /// Fraction of the population, resolved against N at network load.
    Fraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Si,
    Seir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Tt,
    Dt,
    TopK,
    Wd,
    Random,
    GreedyMait,
}

impl StrategyKind {
    pub fn parse(s: &str) -> Result<StrategyKind, ExperimentError> {
        match s {
            "tt" => Ok(StrategyKind::Tt),
            "dt" => Ok(StrategyKind::Dt),
            "topk" => Ok(StrategyKind::TopK),
            "wd" => Ok(StrategyKind::Wd),
            "random" => Ok(StrategyKind::Random),
            "greedy-mait" | "greedy" => Ok(StrategyKind::GreedyMait),
            other => Err(ExperimentError::Config(format!(
                "unknown strategy `{other}` (expected tt|dt|topk|wd|random|greedy-mait)"
            ))),
        }
    }
}

/// Everything a subcommand needs; file values first, then flag overrides.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    pub model: ModelKind,
    pub beta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub strategy: StrategyKind,
    pub k: KSpec,
    pub eps: f64,
    pub eps0: f64,
    /// Evaluation ensemble size.
    pub runs: usize,
    /// Training ensemble size.
    pub train_runs: usize,
    /// Initial infected counts; lead-time reports iterate over all of
    /// them, other commands use the first.
    pub seed_counts: Vec<usize>,
    pub horizon: u32,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Respondent sample for nomination strategies; defaults to k.
    pub sample_size: Option<usize>,
    /// Nominations per respondent (the K of Top-K).
    pub nominations: usize,
    /// Sensor-set size fractions for the Fano sweep.
    pub sizes: Vec<f64>,
    /// Observation windows (days) for the stability analysis.
    pub windows: Vec<u32>,
    /// Training window for the cubic predictor.
    pub train_days: usize,
    /// Transmission rates for surrogate refinement.
    pub rates: Vec<f64>,
    /// Fraction of the population used as positive training labels.
    pub train_frac: f64,
    pub criteria: SurrogateCriteria,
    pub long_threshold: u32,
    pub scoring: Scoring,
    pub dt_threshold: DtThreshold,
    /// Also emit the information-tier comparison from `surrogate`.
    pub tiers: bool,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            network: NetworkSource::Citylike {
                n: 20_000,
                target_avg_degree: 50.0,
            },
            model: ModelKind::Seir,
            beta: 4.2e-5,
            alpha: 0.5,
            gamma: 0.25,
            strategy: StrategyKind::Dt,
            k: KSpec::Fraction(0.05),
            eps: 0.8,
            eps0: 0.1,
            runs: 200,
            train_runs: 200,
            seed_counts: vec![5],
            horizon: 150,
            master_seed: 42,
            out_dir: PathBuf::from("out"),
            sample_size: None,
            nominations: 3,
            sizes: vec![0.005, 0.01, 0.02, 0.05, 0.1, 0.2],
            windows: (1..=15).map(|i| i * 10).collect(),
            train_days: 75,
            rates: vec![3.0e-5, 4.2e-5, 5.5e-5],
            train_frac: 0.001,
            criteria: SurrogateCriteria::defaults(),
            long_threshold: 20_000,
            scoring: Scoring::TreeDepth,
            dt_threshold: DtThreshold::HitRate,
            tiers: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ExperimentError> {
    value
        .parse()
        .map_err(|_| ExperimentError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, ExperimentError> {
    value
        .split(',')
        .map(|tok| parse_num(key, tok.trim()))
        .collect()
}

impl ExperimentConfig {
    /// Apply `key=value` lines (with `#` comments) over the current config.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ExperimentError> {
        let mut generator: Option<String> = None;
        let mut n: Option<usize> = None;
        let mut hub_fraction: Option<f64> = None;
        let mut target_avg_degree: Option<f64> = None;
        let mut network_path: Option<PathBuf> = None;
        let mut format = FileFormat::Attributed;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ExperimentError::Config(format!("line {}: expected key=value", idx + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "network" => network_path = Some(PathBuf::from(value)),
                "format" => {
                    format = match value {
                        "edge-list" => FileFormat::EdgeList,
                        "attributed" => FileFormat::Attributed,
                        other => {
                            return Err(ExperimentError::Config(format!(
                                "unknown format `{other}`"
                            )))
                        }
                    }
                }
                "generator" => generator = Some(value.to_string()),
                "n" => n = Some(parse_num(key, value)?),
                "hub_fraction" => hub_fraction = Some(parse_num(key, value)?),
                "target_avg_degree" => target_avg_degree = Some(parse_num(key, value)?),
                "model" => {
                    self.model = match value {
                        "si" => ModelKind::Si,
                        "seir" => ModelKind::Seir,
                        other => {
                            return Err(ExperimentError::Config(format!(
                                "unknown model `{other}`"
                            )))
                        }
                    }
                }
                "beta" => self.beta = parse_num(key, value)?,
                "alpha" => self.alpha = parse_num(key, value)?,
                "gamma" => self.gamma = parse_num(key, value)?,
                "strategy" => self.strategy = StrategyKind::parse(value)?,
                "k" => self.k = KSpec::Absolute(parse_num(key, value)?),
                "k_frac" => self.k = KSpec::Fraction(parse_num(key, value)?),
                "eps" => self.eps = parse_num(key, value)?,
                "eps0" => self.eps0 = parse_num(key, value)?,
                "runs" => self.runs = parse_num(key, value)?,
                "train_runs" => self.train_runs = parse_num(key, value)?,
                "seeds" => self.seed_counts = parse_list(key, value)?,
                "horizon" => self.horizon = parse_num(key, value)?,
                "rng_seed" => self.master_seed = parse_num(key, value)?,
                "out" => self.out_dir = PathBuf::from(value),
                "sample_size" => self.sample_size = Some(parse_num(key, value)?),
                "nominations" => self.nominations = parse_num(key, value)?,
                "sizes" => self.sizes = parse_list(key, value)?,
                "windows" => self.windows = parse_list(key, value)?,
                "train_days" => self.train_days = parse_num(key, value)?,
                "rates" => self.rates = parse_list(key, value)?,
                "train_frac" => self.train_frac = parse_num(key, value)?,
                "long_threshold" => self.long_threshold = parse_num(key, value)?,
                "scoring" => {
                    self.scoring = match value {
                        "depth" => Scoring::TreeDepth,
                        "day" => Scoring::CalendarDay,
                        other => {
                            return Err(ExperimentError::Config(format!(
                                "unknown scoring `{other}` (expected depth|day)"
                            )))
                        }
                    }
                }
                "dt_threshold" => {
                    self.dt_threshold = match value {
                        "hit-rate" => DtThreshold::HitRate,
                        "min-depth" => DtThreshold::MinDepth,
                        other => {
                            return Err(ExperimentError::Config(format!(
                                "unknown dt_threshold `{other}`"
                            )))
                        }
                    }
                }
                "tiers" => self.tiers = parse_num(key, value)?,
                other => {
                    return Err(ExperimentError::Config(format!(
                        "line {}: unknown key `{other}`",
                        idx + 1
                    )))
                }
            }
        }
        match (network_path, generator) {
            (Some(path), None) => self.network = NetworkSource::File { path, format },
            (None, Some(gen)) => {
                let n = n.ok_or_else(|| {
                    ExperimentError::Config("generator requires `n`".into())
                })?;
                self.network = match gen.as_str() {
                    "starlike" => NetworkSource::Starlike {
                        n,
                        hub_fraction: hub_fraction.unwrap_or(0.01),
                    },
                    "citylike" => NetworkSource::Citylike {
                        n,
                        target_avg_degree: target_avg_degree.unwrap_or(50.0),
                    },
                    other => {
                        return Err(ExperimentError::Config(format!(
                            "unknown generator `{other}`"
                        )))
                    }
                };
            }
            (Some(_), Some(_)) => {
                return Err(ExperimentError::Config(
                    "give either `network` or `generator`, not both".into(),
                ))
            }
            (None, None) => {}
        }
        Ok(())
    }

    pub fn build_network(&self) -> Result<ContactNetwork, ExperimentError> {
        let gen_seed = derive_seed(self.master_seed, "generate");
        Ok(match &self.network {
            NetworkSource::File { path, format } => load_network(path, *format)?,
            NetworkSource::Starlike { n, hub_fraction } => {
                generate_starlike(*n, *hub_fraction, gen_seed)?
            }
            NetworkSource::Citylike {
                n,
                target_avg_degree,
            } => generate_citylike(*n, *target_avg_degree, gen_seed)?,
        })
    }

    pub fn build_model(&self) -> Result<DiseaseModel, ExperimentError> {
        Ok(match self.model {
            ModelKind::Si => DiseaseModel::si(self.beta)?,
            ModelKind::Seir => DiseaseModel::seir(self.beta, self.alpha, self.gamma)?,
        })
    }

    pub fn resolve_k(&self, n: usize) -> Result<usize, ExperimentError> {
        let k = match self.k {
            KSpec::Absolute(k) => k,
            KSpec::Fraction(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(ExperimentError::Config(format!(
                        "k fraction {f} outside (0,1]"
                    )));
                }
                ((f * n as f64).round() as usize).max(1)
            }
        };
        if k == 0 || k > n {
            return Err(ExperimentError::Config(format!(
                "resolved k={k} outside 1..={n}"
            )));
        }
        Ok(k)
    }

    pub fn selection_strategy(&self, k: usize) -> SelectionStrategy {
        let sample_size = self.sample_size.unwrap_or(k).max(1);
        match self.strategy {
            StrategyKind::Tt => SelectionStrategy::Tt {
                eps0: self.eps0,
                scoring: self.scoring,
            },
            StrategyKind::Dt => SelectionStrategy::Dt {
                eps0: self.eps0,
                threshold: self.dt_threshold,
            },
            StrategyKind::TopK => SelectionStrategy::TopKDegree {
                sample_size,
                nominations: self.nominations,
            },
            StrategyKind::Wd => SelectionStrategy::WeightedDegree {
                sample_size,
                nominations: self.nominations,
            },
            StrategyKind::Random => SelectionStrategy::Random,
            StrategyKind::GreedyMait => SelectionStrategy::GreedyMait { eps: self.eps },
        }
    }
}

fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "na".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.6}")
    }
}

fn write_out(dir: &Path, name: &str, content: &str) -> Result<PathBuf, ExperimentError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenerateReport {
    pub path: PathBuf,
    pub stats: DegreeStats,
}

/// Build (or load) the configured network and write its canonical file.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<GenerateReport, ExperimentError> {
    let net = cfg.build_network()?;
    let stats = degree_stats(&net);
    std::fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join(format!("{}.txt", cfg.network.label()));
    save_network(&net, &path)?;
    Ok(GenerateReport { path, stats })
}

// ---------------------------------------------------------------------------
// leadtime
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LeadtimeRow {
    pub dataset: String,
    pub seed_count: usize,
    pub strategy: &'static str,
    pub k: usize,
    pub coverage: f64,
    pub mean_lead: f64,
    pub var_lead: f64,
    pub fit_failures: usize,
    pub runs_used: usize,
}

#[derive(Debug, Clone)]
pub struct LeadtimeReport {
    pub rows: Vec<LeadtimeRow>,
    /// Mean final cumulative of each seed count's evaluation ensemble;
    /// depends only on the evaluation stream, never on training.
    pub eval_fingerprints: Vec<(usize, f64)>,
    pub sensor_sets: Vec<(usize, SensorSet)>,
}

pub fn leadtime_csv(rows: &[LeadtimeRow]) -> String {
    let mut out =
        String::from("dataset,seeds,strategy,k,coverage,mean_lead,var_lead,fit_failures,runs_used\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.seed_count,
            r.strategy,
            r.k,
            fmt_float(r.coverage),
            fmt_float(r.mean_lead),
            fmt_float(r.var_lead),
            r.fit_failures,
            r.runs_used
        );
    }
    out
}

/// Two-phase lead-time protocol on an already-built network.
///
/// Per seed count: a training ensemble selects the four sensor sets (TT,
/// DT, Top-K, WD), then a fresh evaluation ensemble on a disjoint stream
/// measures each set's per-run lead against a same-sized random set.
pub fn run_leadtime(
    cfg: &ExperimentConfig,
    net: &ContactNetwork,
    dataset: &str,
) -> Result<LeadtimeReport, ExperimentError> {
    let model = cfg.build_model()?;
    let n = net.node_count();
    let k = cfg.resolve_k(n)?;
    let sample_size = cfg.sample_size.unwrap_or(k).max(1);

    let mut rows = Vec::new();
    let mut eval_fingerprints = Vec::new();
    let mut sensor_sets = Vec::new();
    for &seed_count in &cfg.seed_counts {
        let train = run_ensemble(
            net,
            &model,
            &SimulationConfig {
                seeds: SeedSpec::Count(seed_count),
                horizon: cfg.horizon,
                rng_seed: derive_seed(cfg.master_seed, &format!("leadtime/train/s{seed_count}")),
            },
            cfg.train_runs,
        )?;

        let strategies: [(&'static str, SelectionStrategy); 4] = [
            (
                "topk",
                SelectionStrategy::TopKDegree {
                    sample_size,
                    nominations: cfg.nominations,
                },
            ),
            (
                "wd",
                SelectionStrategy::WeightedDegree {
                    sample_size,
                    nominations: cfg.nominations,
                },
            ),
            (
                "tt",
                SelectionStrategy::Tt {
                    eps0: cfg.eps0,
                    scoring: cfg.scoring,
                },
            ),
            (
                "dt",
                SelectionStrategy::Dt {
                    eps0: cfg.eps0,
                    threshold: cfg.dt_threshold,
                },
            ),
        ];

        let reference = select_random(
            net,
            k,
            derive_seed(cfg.master_seed, &format!("leadtime/reference/s{seed_count}")),
        )?;
        let eval = run_ensemble(
            net,
            &model,
            &SimulationConfig {
                seeds: SeedSpec::Count(seed_count),
                horizon: cfg.horizon,
                rng_seed: derive_seed(cfg.master_seed, &format!("leadtime/eval/s{seed_count}")),
            },
            cfg.runs,
        )?;
        eval_fingerprints.push((seed_count, eval.mean_epicurve.final_cumulative()));

        for (name, strategy) in strategies {
            let set = select_with(
                &strategy,
                net,
                &train.dendrograms,
                k,
                derive_seed(
                    cfg.master_seed,
                    &format!("leadtime/select/{name}/s{seed_count}"),
                ),
            )?;
            let coverage = set
                .coverage
                .unwrap_or_else(|| estimate_coverage(&set.members, &train.dendrograms));
            let stats = evaluate_leads(&eval.dendrograms, &set.members, &reference.members);
            rows.push(LeadtimeRow {
                dataset: dataset.to_string(),
                seed_count,
                strategy: name,
                k: set.members.len(),
                coverage,
                mean_lead: stats.mean,
                var_lead: stats.variance,
                fit_failures: stats.fit_failures,
                runs_used: stats.leads.len(),
            });
            sensor_sets.push((seed_count, set));
        }
    }
    Ok(LeadtimeReport {
        rows,
        eval_fingerprints,
        sensor_sets,
    })
}

/// Full leadtime subcommand: build the network, run the protocol, write
/// `leadtime.csv` and the sensor-set files.
pub fn cmd_leadtime(cfg: &ExperimentConfig) -> Result<LeadtimeReport, ExperimentError> {
    let net = cfg.build_network()?;
    let dataset = cfg.network.label();
    let report = run_leadtime(cfg, &net, &dataset)?;
    write_out(&cfg.out_dir, "leadtime.csv", &leadtime_csv(&report.rows))?;
    for (seed_count, set) in &report.sensor_sets {
        let name = format!(
            "sensors_{}_s{}.txt",
            set.strategy.split(',').next().unwrap_or("set"),
            seed_count
        );
        set.write_file(&cfg.out_dir.join(name))?;
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// fano
// ---------------------------------------------------------------------------

pub fn fano_csv(rows: &[FanoRow]) -> String {
    let mut out =
        String::from("size_fraction,k,mean_lead,var_lead,inverse_fano,fit_failures,runs_used\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_float(r.size_fraction),
            r.k,
            fmt_float(r.mean_lead),
            fmt_float(r.var_lead),
            fmt_float(r.inverse_fano),
            r.fit_failures,
            r.runs_used
        );
    }
    out
}

pub fn cmd_fano(cfg: &ExperimentConfig) -> Result<Vec<FanoRow>, ExperimentError> {
    let net = cfg.build_network()?;
    let model = cfg.build_model()?;
    let k = cfg.resolve_k(net.node_count())?;
    let strategy = cfg.selection_strategy(k);
    let rows = fano_sweep(
        &net,
        &model,
        &strategy,
        &cfg.sizes,
        &SweepConfig {
            train_runs: cfg.train_runs,
            eval_runs: cfg.runs,
            seeds: SeedSpec::Count(cfg.seed_counts[0]),
            horizon: cfg.horizon,
            master_seed: cfg.master_seed,
        },
    )?;
    write_out(&cfg.out_dir, "fano.csv", &fano_csv(&rows))?;
    Ok(rows)
}

// ---------------------------------------------------------------------------
// stability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub rows: Vec<StabilityRow>,
    pub full_lead: Option<f64>,
    /// Smallest window from which estimates stay within one day of the
    /// full-data lead.
    pub w_star: Option<u32>,
}

pub fn stability_csv(report: &StabilityReport) -> String {
    let mut out = String::from("window,lead\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{}",
            r.window,
            r.lead.map_or("na".into(), fmt_float)
        );
    }
    out
}

pub fn cmd_stability(cfg: &ExperimentConfig) -> Result<StabilityReport, ExperimentError> {
    let net = cfg.build_network()?;
    let model = cfg.build_model()?;
    let k = cfg.resolve_k(net.node_count())?;
    let seed_count = cfg.seed_counts[0];

    let train = run_ensemble(
        &net,
        &model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "stability/train"),
        },
        cfg.train_runs,
    )?;
    let sensors = select_with(
        &cfg.selection_strategy(k),
        &net,
        &train.dendrograms,
        k,
        derive_seed(cfg.master_seed, "stability/select"),
    )?;
    let reference = select_random(&net, k, derive_seed(cfg.master_seed, "stability/reference"))?;

    let (rows, full_lead) = stability_curve(
        &net,
        &model,
        &sensors.members,
        &reference.members,
        &cfg.windows,
        cfg.runs,
        SeedSpec::Count(seed_count),
        cfg.master_seed,
    )?;
    let w_star = full_lead.and_then(|full| stabilization_window(&rows, full, 1.0));
    let report = StabilityReport {
        rows,
        full_lead,
        w_star,
    };
    write_out(&cfg.out_dir, "stability.csv", &stability_csv(&report))?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PredictReport {
    pub predictor: PolyPredictor,
    /// Mean cumulative curves: sensor set and random reference.
    pub sensor_cum: Vec<f64>,
    pub random_cum: Vec<f64>,
    /// Held-out RMSE as a fraction of the reference final cumulative.
    pub relative_rmse: f64,
}

pub fn predict_csv(report: &PredictReport) -> String {
    let mut out = String::from("day,sensor_cum,random_cum,predicted_random,held_out\n");
    for day in 0..report.sensor_cum.len() {
        let predicted = report.predictor.predict(report.sensor_cum[day]);
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            day,
            fmt_float(report.sensor_cum[day]),
            fmt_float(report.random_cum[day]),
            fmt_float(predicted),
            usize::from(day >= report.predictor.train_days)
        );
    }
    out
}

pub fn cmd_predict(cfg: &ExperimentConfig) -> Result<PredictReport, ExperimentError> {
    let net = cfg.build_network()?;
    let model = cfg.build_model()?;
    let report = run_predict(cfg, &net, &model)?;
    write_out(&cfg.out_dir, "predict.csv", &predict_csv(&report))?;
    Ok(report)
}

/// Cubic sensor-to-population prediction on mean evaluation curves.
pub fn run_predict(
    cfg: &ExperimentConfig,
    net: &ContactNetwork,
    model: &DiseaseModel,
) -> Result<PredictReport, ExperimentError> {
    let k = cfg.resolve_k(net.node_count())?;
    let seed_count = cfg.seed_counts[0];
    let train = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "predict/train"),
        },
        cfg.train_runs,
    )?;
    let sensors = select_with(
        &cfg.selection_strategy(k),
        net,
        &train.dendrograms,
        k,
        derive_seed(cfg.master_seed, "predict/select"),
    )?;
    let reference = select_random(net, k, derive_seed(cfg.master_seed, "predict/reference"))?;
    let eval = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "predict/eval"),
        },
        cfg.runs,
    )?;
    let sensor_curve = mean_restricted_epicurve(&eval.dendrograms, &sensors.members);
    let random_curve = mean_restricted_epicurve(&eval.dendrograms, &reference.members);
    let predictor = fit_poly_predictor(
        sensor_curve.cumulative(),
        random_curve.cumulative(),
        cfg.train_days,
    )?;
    let final_cum = random_curve.final_cumulative().max(f64::MIN_POSITIVE);
    let relative_rmse = predictor.rmse / final_cum;
    Ok(PredictReport {
        sensor_cum: sensor_curve.cumulative().to_vec(),
        random_cum: random_curve.cumulative().to_vec(),
        predictor,
        relative_rmse,
    })
}

// ---------------------------------------------------------------------------
// surrogate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SurrogateReport {
    pub s_prime_size: usize,
    pub per_rate_positive: Vec<(f64, usize)>,
    pub s_double_prime: Vec<NodeId>,
    pub surrogate_mean_lead: f64,
    pub surrogate_var_lead: f64,
    pub surrogate_fit_failures: usize,
    /// DT heuristic at the same size, for comparison.
    pub dt_mean_lead: f64,
    pub dt_var_lead: f64,
    pub tiers: Option<Vec<TierRow>>,
}

pub fn surrogate_csv(report: &SurrogateReport) -> String {
    let mut out = String::from("record,param,value\n");
    let _ = writeln!(out, "s_prime_size,,{}", report.s_prime_size);
    for (rate, positive) in &report.per_rate_positive {
        let _ = writeln!(out, "rate_positive,{rate},{positive}");
    }
    let _ = writeln!(out, "s_double_prime_size,,{}", report.s_double_prime.len());
    let _ = writeln!(
        out,
        "lead_mean,surrogate,{}",
        fmt_float(report.surrogate_mean_lead)
    );
    let _ = writeln!(
        out,
        "lead_var,surrogate,{}",
        fmt_float(report.surrogate_var_lead)
    );
    let _ = writeln!(
        out,
        "fit_failures,surrogate,{}",
        report.surrogate_fit_failures
    );
    let _ = writeln!(out, "lead_mean,dt,{}", fmt_float(report.dt_mean_lead));
    let _ = writeln!(out, "lead_var,dt,{}", fmt_float(report.dt_var_lead));
    out
}

pub fn tiers_csv(rows: &[TierRow]) -> String {
    let mut out = String::from("tier,size,mean_lead,var_lead,fit_failures\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.tier.label(),
            r.size,
            fmt_float(r.mean_lead),
            fmt_float(r.var_lead),
            r.fit_failures
        );
    }
    out
}

pub fn cmd_surrogate(cfg: &ExperimentConfig) -> Result<SurrogateReport, ExperimentError> {
    let net = cfg.build_network()?;
    let model = cfg.build_model()?;
    let report = run_surrogate(cfg, &net, &model)?;
    write_out(&cfg.out_dir, "surrogate.csv", &surrogate_csv(&report))?;
    if let Some(tiers) = &report.tiers {
        write_out(&cfg.out_dir, "tiers.csv", &tiers_csv(tiers))?;
    }
    let s2 = SensorSet {
        members: report.s_double_prime.clone(),
        strategy: format!("surrogate,rates={}", report.per_rate_positive.len()),
        coverage: None,
        mean_score: None,
        target_k: report.s_double_prime.len(),
        shortfall: report.s_double_prime.is_empty(),
    };
    s2.write_file(&cfg.out_dir.join("sensors_surrogate.txt"))?;
    Ok(report)
}

/// The surrogate pipeline: criteria select S' from features alone, one
/// tree per transmission rate refines it to S'', and S'' is evaluated
/// against a same-sized random set (with a DT set of the same size as the
/// informed baseline).
pub fn run_surrogate(
    cfg: &ExperimentConfig,
    net: &ContactNetwork,
    model: &DiseaseModel,
) -> Result<SurrogateReport, ExperimentError> {
    let seed_count = cfg.seed_counts[0];
    let features = extract_features(net, cfg.long_threshold);
    let s_prime = apply_criteria(&features, &cfg.criteria);

    let refine_cfg = RefineConfig {
        rates: cfg.rates.clone(),
        strategy: match cfg.strategy {
            StrategyKind::Tt => RefineStrategy::Tt,
            _ => RefineStrategy::Dt,
        },
        train_frac: cfg.train_frac,
        train_runs: cfg.train_runs,
        seed_count,
        horizon: cfg.horizon,
        eps0: cfg.eps0,
        tree: TreeConfig::default(),
        long_threshold: cfg.long_threshold,
        master_seed: cfg.master_seed,
    };
    let outcome = refine_surrogates(net, &s_prime, model, &refine_cfg)?;

    let eval = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "surrogate/eval"),
        },
        cfg.runs,
    )?;
    let size = outcome.refined.len().max(1);
    let reference = select_random(net, size, derive_seed(cfg.master_seed, "surrogate/reference"))?;
    let surrogate_stats = if outcome.refined.is_empty() {
        crate::epicurve::LeadStats::from_leads(Vec::new(), 0)
    } else {
        evaluate_leads(&eval.dendrograms, &outcome.refined, &reference.members)
    };

    // Informed baseline: DT sensors of the same size, trained on a
    // separate ensemble at the base rate.
    let dt_train = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "surrogate/dt-train"),
        },
        cfg.train_runs,
    )?;
    let dt_set = select_with(
        &SelectionStrategy::Dt {
            eps0: cfg.eps0,
            threshold: cfg.dt_threshold,
        },
        net,
        &dt_train.dendrograms,
        size,
        derive_seed(cfg.master_seed, "surrogate/dt-select"),
    )?;
    let dt_stats = evaluate_leads(&eval.dendrograms, &dt_set.members, &reference.members);

    let tiers = if cfg.tiers {
        let k = cfg.resolve_k(net.node_count())?;
        Some(compare_information_tiers(
            net,
            model,
            k,
            &TierConfig {
                train_runs: cfg.train_runs,
                eval_runs: cfg.runs,
                seed_count,
                horizon: cfg.horizon,
                eps0: cfg.eps0,
                tree: TreeConfig::default(),
                long_threshold: cfg.long_threshold,
                master_seed: cfg.master_seed,
            },
        )?)
    } else {
        None
    };

    Ok(SurrogateReport {
        s_prime_size: s_prime.len(),
        per_rate_positive: cfg
            .rates
            .iter()
            .copied()
            .zip(outcome.per_rate_positive.iter().copied())
            .collect(),
        s_double_prime: outcome.refined,
        surrogate_mean_lead: surrogate_stats.mean,
        surrogate_var_lead: surrogate_stats.variance,
        surrogate_fit_failures: surrogate_stats.fit_failures,
        dt_mean_lead: dt_stats.mean,
        dt_var_lead: dt_stats.variance,
        tiers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_config_overrides_defaults() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_kv(
            "generator=starlike\nn=1000\nhub_fraction=0.02\nmodel=si\nbeta=1e-4\n\
             strategy=tt\nk=50\nruns=10\nseeds=1,5\nhorizon=60\nrng_seed=7\n\
             sizes=0.01,0.1\nscoring=day\n",
        )
        .unwrap();
        assert_eq!(
            cfg.network,
            NetworkSource::Starlike {
                n: 1000,
                hub_fraction: 0.02
            }
        );
        assert_eq!(cfg.model, ModelKind::Si);
        assert_eq!(cfg.k, KSpec::Absolute(50));
        assert_eq!(cfg.seed_counts, vec![1, 5]);
        assert_eq!(cfg.sizes, vec![0.01, 0.1]);
        assert_eq!(cfg.master_seed, 7);
        assert_eq!(cfg.scoring, Scoring::CalendarDay);
    }

    #[test]
    fn kv_config_rejects_unknown_keys_and_values() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_kv("bogus=1\n").is_err());
        assert!(cfg.apply_kv("model=sir\n").is_err());
        assert!(cfg.apply_kv("runs=ten\n").is_err());
        assert!(cfg
            .apply_kv("network=a.txt\ngenerator=starlike\nn=100\n")
            .is_err());
    }

    #[test]
    fn k_resolution() {
        let mut cfg = ExperimentConfig::default();
        cfg.k = KSpec::Fraction(0.05);
        assert_eq!(cfg.resolve_k(1000).unwrap(), 50);
        cfg.k = KSpec::Absolute(10);
        assert_eq!(cfg.resolve_k(1000).unwrap(), 10);
        cfg.k = KSpec::Absolute(0);
        assert!(cfg.resolve_k(1000).is_err());
        cfg.k = KSpec::Fraction(1.5);
        assert!(cfg.resolve_k(1000).is_err());
    }

    #[test]
    fn float_formatting_sentinels() {
        assert_eq!(fmt_float(f64::NAN), "na");
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(1.5), "1.500000");
    }
}
