//! Curve analytics: restricted epicurves, logistic peak lead times,
//! sensor-size Fano sweeps, observation-window stability, and cubic
//! population prediction.

mod fit;
mod poly;

pub use fit::{fit_logistic, lead_time, peak_time, FitError, LeadTimeResult, LogisticFit};
pub use poly::{fit_poly_predictor, PolyPredictor};

use crate::epidemic::{
    run_ensemble, Dendrogram, DiseaseModel, Epicurve, EpidemicError, SeedSpec, SimulationConfig,
};
use crate::graph::{ContactNetwork, NodeId};
use crate::par;
use crate::rng::derive_seed;
use crate::sensors::{select_random, select_with, SelectionStrategy, SensorError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Epidemic(#[from] EpidemicError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Cumulative infections among `members` by day, from one dendrogram.
pub fn restrict_epicurve(den: &Dendrogram, members: &[NodeId]) -> Epicurve {
    assert!(!members.is_empty(), "restriction set must be non-empty");
    let mut incident = vec![0.0f64; den.horizon() as usize + 1];
    for &v in members {
        if let Some(day) = den.infection_day(v) {
            incident[day as usize] += 1.0;
        }
    }
    let mut cumulative = incident;
    for t in 1..cumulative.len() {
        cumulative[t] += cumulative[t - 1];
    }
    Epicurve::from_cumulative(cumulative, members.len())
}

/// Mean of [`restrict_epicurve`] across dendrograms, aggregated in run
/// order.
pub fn mean_restricted_epicurve(dens: &[Dendrogram], members: &[NodeId]) -> Epicurve {
    assert!(!dens.is_empty());
    let curves = par::map_indexed(dens.len(), |i| restrict_epicurve(&dens[i], members));
    let mut mean = vec![0.0f64; dens[0].horizon() as usize + 1];
    for curve in &curves {
        for (m, c) in mean.iter_mut().zip(curve.cumulative()) {
            *m += c;
        }
    }
    for m in &mut mean {
        *m /= dens.len() as f64;
    }
    Epicurve::from_cumulative(mean, members.len())
}

/// Per-run lead times of a sensor set against a reference set, with
/// failed fits counted rather than aborting.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadStats {
    /// Leads from the runs where both fits succeeded, in run order.
    pub leads: Vec<f64>,
    pub mean: f64,
    /// Sample (n-1) variance; NaN with fewer than two usable runs.
    pub variance: f64,
    pub fit_failures: usize,
}

impl LeadStats {
    pub fn from_leads(leads: Vec<f64>, fit_failures: usize) -> LeadStats {
        let n = leads.len();
        let mean = if n == 0 {
            f64::NAN
        } else {
            leads.iter().sum::<f64>() / n as f64
        };
        let variance = if n < 2 {
            f64::NAN
        } else {
            leads.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (n - 1) as f64
        };
        LeadStats {
            leads,
            mean,
            variance,
            fit_failures,
        }
    }

    /// Mean over variance; infinite when the variance is zero.
    pub fn inverse_fano(&self) -> f64 {
        if self.variance == 0.0 {
            f64::INFINITY
        } else {
            self.mean / self.variance
        }
    }
}

/// Fit per-run restricted curves for both sets and collect lead times.
pub fn evaluate_leads(
    dens: &[Dendrogram],
    sensor_members: &[NodeId],
    reference_members: &[NodeId],
) -> LeadStats {
    let per_run: Vec<Option<f64>> = par::map_indexed(dens.len(), |i| {
        let sensor = restrict_epicurve(&dens[i], sensor_members);
        let reference = restrict_epicurve(&dens[i], reference_members);
        lead_time(sensor.cumulative(), reference.cumulative())
            .ok()
            .map(|r| r.lead)
    });
    let fit_failures = per_run.iter().filter(|l| l.is_none()).count();
    let leads: Vec<f64> = per_run.into_iter().flatten().collect();
    LeadStats::from_leads(leads, fit_failures)
}

/// One row of the sensor-size sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoRow {
    pub size_fraction: f64,
    pub k: usize,
    pub mean_lead: f64,
    pub var_lead: f64,
    /// Mean lead over variance; +inf sentinel when the variance is zero.
    pub inverse_fano: f64,
    pub fit_failures: usize,
    pub runs_used: usize,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub train_runs: usize,
    pub eval_runs: usize,
    pub seeds: SeedSpec,
    pub horizon: u32,
    pub master_seed: u64,
}

/// Sweep sensor-set sizes and measure the lead-time mean, variance and
/// inverse Fano factor at each size.
///
/// All sizes share one training ensemble (strategy rankings do not depend
/// on k) and one disjoint evaluation ensemble; the per-size random
/// reference set always matches the sensor-set size.
pub fn fano_sweep(
    net: &ContactNetwork,
    model: &DiseaseModel,
    strategy: &SelectionStrategy,
    sizes: &[f64],
    cfg: &SweepConfig,
) -> Result<Vec<FanoRow>, AnalysisError> {
    if sizes.is_empty() || sizes.iter().any(|s| !(*s > 0.0 && *s <= 1.0)) {
        return Err(AnalysisError::InvalidParameter(
            "sizes must be fractions in (0, 1]".into(),
        ));
    }
    if cfg.eval_runs < 2 {
        return Err(AnalysisError::InvalidParameter(
            "eval_runs must be >= 2 to estimate a variance".into(),
        ));
    }
    let train = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: cfg.seeds.clone(),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "fano/train"),
        },
        cfg.train_runs,
    )?;
    let eval = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: cfg.seeds.clone(),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "fano/eval"),
        },
        cfg.eval_runs,
    )?;

    let mut rows = Vec::with_capacity(sizes.len());
    for (idx, &size) in sizes.iter().enumerate() {
        let k = ((size * net.node_count() as f64).round() as usize).max(1);
        let sensors = select_with(
            strategy,
            net,
            &train.dendrograms,
            k,
            derive_seed(cfg.master_seed, &format!("fano/select/{idx}")),
        )?;
        let reference = select_random(
            net,
            sensors.len().max(1),
            derive_seed(cfg.master_seed, &format!("fano/random/{idx}")),
        )?;
        let stats = evaluate_leads(&eval.dendrograms, &sensors.members, &reference.members);
        rows.push(FanoRow {
            size_fraction: size,
            k,
            mean_lead: stats.mean,
            var_lead: stats.variance,
            inverse_fano: stats.inverse_fano(),
            fit_failures: stats.fit_failures,
            runs_used: stats.leads.len(),
        });
    }
    Ok(rows)
}

/// Lead estimate from data truncated to one observation window.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub window: u32,
    /// None when either truncated fit failed.
    pub lead: Option<f64>,
}

/// Lead-vs-window series from already-aggregated mean curves: for each
/// window `w`, both curves are truncated to days `0..=w` before fitting.
pub fn stability_from_curves(
    sensor: &Epicurve,
    reference: &Epicurve,
    windows: &[u32],
) -> Vec<StabilityRow> {
    windows
        .iter()
        .map(|&w| {
            let end = (w.min(sensor.horizon()) as usize) + 1;
            let lead = lead_time(
                &sensor.cumulative()[..end],
                &reference.cumulative()[..end.min(reference.cumulative().len())],
            )
            .ok()
            .map(|r| r.lead);
            StabilityRow { window: w, lead }
        })
        .collect()
}

/// Smallest window from which every later estimate stays within `tol`
/// days of the full-data lead.
pub fn stabilization_window(rows: &[StabilityRow], full_lead: f64, tol: f64) -> Option<u32> {
    let mut result = None;
    for row in rows.iter().rev() {
        match row.lead {
            Some(lead) if (lead - full_lead).abs() <= tol => result = Some(row.window),
            _ => break,
        }
    }
    result
}

/// Ensemble-level stability analysis: simulate once, compute mean curves
/// for the sensor and reference sets, then re-estimate the lead from each
/// truncated observation window.
#[allow(clippy::too_many_arguments)]
pub fn stability_curve(
    net: &ContactNetwork,
    model: &DiseaseModel,
    sensor_members: &[NodeId],
    reference_members: &[NodeId],
    windows: &[u32],
    runs: usize,
    seeds: SeedSpec,
    master_seed: u64,
) -> Result<(Vec<StabilityRow>, Option<f64>), AnalysisError> {
    if windows.is_empty() || windows.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::InvalidParameter(
            "windows must be strictly ascending".into(),
        ));
    }
    let horizon = *windows.last().unwrap();
    let ens = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds,
            horizon,
            rng_seed: derive_seed(master_seed, "stability/eval"),
        },
        runs,
    )?;
    let sensor = mean_restricted_epicurve(&ens.dendrograms, sensor_members);
    let reference = mean_restricted_epicurve(&ens.dendrograms, reference_members);
    let rows = stability_from_curves(&sensor, &reference, windows);
    let full_lead = rows.last().and_then(|r| r.lead);
    Ok((rows, full_lead))
}
