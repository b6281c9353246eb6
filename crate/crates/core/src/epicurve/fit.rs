//! Logistic fitting of cumulative epicurves.
//!
//! Least squares of `L / (1 + exp(-r (t - t0)))` against a cumulative
//! series, by damped Gauss-Newton from a quantile-based initialization; a
//! coarse grid search over `(r, t0)` with `L` pinned to the series maximum
//! backstops hard cases (short observation windows, step-like curves).
//! The fitted daily-incidence peak is the midpoint `t0`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("series too short: need at least {need} points, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("cumulative series must be non-decreasing (index {0})")]
    NotMonotone(usize),
    #[error("degenerate series: no infections")]
    DegenerateSeries,
    #[error("no plausible logistic fit (t0 far outside the observation window)")]
    ImplausibleFit,
    #[error("rank-deficient design matrix")]
    RankDeficient,
    #[error("series length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Fitted logistic `L / (1 + exp(-r (t - t0)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticFit {
    /// Asymptote, > 0.
    pub l: f64,
    /// Growth rate, > 0.
    pub r: f64,
    /// Midpoint day; equals the daily-incidence peak.
    pub t0: f64,
    /// Residual sum of squares at the optimum.
    pub rss: f64,
}

impl LogisticFit {
    pub fn value(&self, t: f64) -> f64 {
        self.l / (1.0 + (-self.r * (t - self.t0)).exp())
    }

    /// Derivative of the fitted cumulative curve (the fitted daily
    /// incidence).
    pub fn derivative(&self, t: f64) -> f64 {
        let s = 1.0 / (1.0 + (-self.r * (t - self.t0)).exp());
        self.l * self.r * s * (1.0 - s)
    }
}

/// Peak day of the fitted daily-incidence curve. The logistic derivative
/// peaks at the midpoint, so this is `t0`.
pub fn peak_time(fit: &LogisticFit) -> f64 {
    fit.t0
}

/// Lead of the sensor peak over the reference (random-set) peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadTimeResult {
    pub t_sensor: f64,
    pub t_random: f64,
    /// `t_random - t_sensor`; positive means the sensors peak earlier.
    pub lead: f64,
}

/// Fit both cumulative series and difference their peaks.
pub fn lead_time(sensor: &[f64], random: &[f64]) -> Result<LeadTimeResult, FitError> {
    let t_sensor = peak_time(&fit_logistic(sensor)?);
    let t_random = peak_time(&fit_logistic(random)?);
    Ok(LeadTimeResult {
        t_sensor,
        t_random,
        lead: t_random - t_sensor,
    })
}

const MIN_POINTS: usize = 5;
const MAX_ITERS: usize = 500;
const RSS_REL_TOL: f64 = 1e-10;

fn rss_of(series: &[f64], l: f64, r: f64, t0: f64) -> f64 {
    series
        .iter()
        .enumerate()
        .map(|(t, &y)| {
            let f = l / (1.0 + (-r * (t as f64 - t0)).exp());
            (f - y) * (f - y)
        })
        .sum()
}

/// First index where the series reaches `level`.
fn first_crossing(series: &[f64], level: f64) -> f64 {
    series
        .iter()
        .position(|&y| y >= level)
        .unwrap_or(series.len() - 1) as f64
}

fn validate(series: &[f64]) -> Result<f64, FitError> {
    if series.len() < MIN_POINTS {
        return Err(FitError::TooShort {
            need: MIN_POINTS,
            got: series.len(),
        });
    }
    for (i, w) in series.windows(2).enumerate() {
        if w[1] < w[0] {
            return Err(FitError::NotMonotone(i + 1));
        }
    }
    let max = *series.last().unwrap();
    if max <= 0.0 {
        return Err(FitError::DegenerateSeries);
    }
    Ok(max)
}

/// Plausibility band for the fitted midpoint: the observation window
/// extended by 50% on both sides.
fn t0_band(len: usize) -> (f64, f64) {
    let h = (len - 1) as f64;
    (-0.5 * h, 1.5 * h)
}

fn plausible(fit: &LogisticFit, len: usize) -> bool {
    let (lo, hi) = t0_band(len);
    fit.l > 0.0 && fit.r > 0.0 && fit.t0 >= lo && fit.t0 <= hi && fit.rss.is_finite()
}

/// Solve a symmetric 3x3 system by Gaussian elimination with partial
/// pivoting; `None` when effectively singular.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..3 {
            let factor = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut sum = b[row];
        for k in (row + 1)..3 {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

fn gauss_newton(series: &[f64], mut l: f64, mut r: f64, mut t0: f64) -> LogisticFit {
    let mut rss = rss_of(series, l, r, t0);
    for _ in 0..MAX_ITERS {
        // Normal equations J^T J d = -J^T res for the step d.
        let mut a = [[0.0f64; 3]; 3];
        let mut g = [0.0f64; 3];
        for (t, &y) in series.iter().enumerate() {
            let t = t as f64;
            let s = 1.0 / (1.0 + (-r * (t - t0)).exp());
            let res = l * s - y;
            let jl = s;
            let jr = l * s * (1.0 - s) * (t - t0);
            let jt = -l * r * s * (1.0 - s);
            let j = [jl, jr, jt];
            for p in 0..3 {
                g[p] += j[p] * res;
                for q in 0..3 {
                    a[p][q] += j[p] * j[q];
                }
            }
        }
        let Some(step) = solve3(a, g) else { break };

        // Dampen: halve until the step reduces RSS and keeps l, r positive.
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let (nl, nr, nt0) = (l - lambda * step[0], r - lambda * step[1], t0 - lambda * step[2]);
            if nl > 0.0 && nr > 0.0 {
                let new_rss = rss_of(series, nl, nr, nt0);
                if new_rss < rss {
                    let rel = (rss - new_rss) / rss.max(f64::MIN_POSITIVE);
                    l = nl;
                    r = nr;
                    t0 = nt0;
                    rss = new_rss;
                    improved = true;
                    if rel < RSS_REL_TOL {
                        return LogisticFit { l, r, t0, rss };
                    }
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    LogisticFit { l, r, t0, rss }
}

/// Coarse grid over (r, t0) with L fixed to the series maximum.
fn grid_search(series: &[f64], max: f64) -> LogisticFit {
    let (t_lo, t_hi) = t0_band(series.len());
    let mut best = LogisticFit {
        l: max,
        r: 1.0,
        t0: first_crossing(series, max / 2.0),
        rss: f64::INFINITY,
    };
    for ri in 0..60 {
        // r from 1e-3 to ~8, log-spaced.
        let r = 1e-3 * (8.0f64 / 1e-3).powf(ri as f64 / 59.0);
        for ti in 0..=160 {
            let t0 = t_lo + (t_hi - t_lo) * ti as f64 / 160.0;
            let rss = rss_of(series, max, r, t0);
            if rss < best.rss {
                best = LogisticFit { l: max, r, t0, rss };
            }
        }
    }
    best
}

/// Least-squares logistic fit of a cumulative series (day `t` is index
/// `t`). See the module docs for the procedure.
pub fn fit_logistic(series: &[f64]) -> Result<LogisticFit, FitError> {
    let max = validate(series)?;

    let l0 = max * 1.05;
    let t00 = first_crossing(series, max / 2.0);
    let t25 = first_crossing(series, 0.25 * max);
    let t75 = first_crossing(series, 0.75 * max);
    // logit(0.75) - logit(0.25) = 2 ln 3 across the quartile gap.
    let r0 = if t75 > t25 {
        2.0 * 3.0f64.ln() / (t75 - t25)
    } else {
        2.0 * 3.0f64.ln()
    };

    let fit = gauss_newton(series, l0, r0, t00);
    if plausible(&fit, series.len()) {
        return Ok(fit);
    }
    // Grid fallback, then one refinement pass from the grid point.
    let grid = grid_search(series, max);
    let refined = gauss_newton(series, grid.l, grid.r, grid.t0);
    let best = if plausible(&refined, series.len()) && refined.rss <= grid.rss {
        refined
    } else {
        grid
    };
    if plausible(&best, series.len()) {
        Ok(best)
    } else {
        Err(FitError::ImplausibleFit)
    }
}
