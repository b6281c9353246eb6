//! Cubic regression from the sensor curve to the population curve.
//!
//! Fits `random_cum = c0 + c1 x + c2 x^2 + c3 x^3` with `x` the sensor
//! cumulative incidence, on an initial training window, then predicts the
//! remaining days. The design is normalized to [0, 1] before solving the
//! normal equations so exact cubic relations are recovered to ~1e-9.

use super::fit::FitError;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyPredictor {
    /// `c0..c3` in original (unnormalized) units.
    pub coeffs: [f64; 4],
    /// Predicted random-group cumulative values for days
    /// `train_days..series_len`.
    pub predictions: Vec<f64>,
    /// Root-mean-square error of `predictions` against the held-out truth.
    pub rmse: f64,
    pub train_days: usize,
}

impl PolyPredictor {
    pub fn predict(&self, sensor_cum: f64) -> f64 {
        let x = sensor_cum;
        self.coeffs[0] + x * (self.coeffs[1] + x * (self.coeffs[2] + x * self.coeffs[3]))
    }
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Result<[f64; 4], FitError> {
    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        // The design is normalized, so a tiny pivot means collinear
        // columns (e.g. a constant predictor), not bad scaling.
        if a[pivot_row][col].abs() < 1e-10 {
            return Err(FitError::RankDeficient);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in (col + 1)..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut sum = b[row];
        for k in (row + 1)..4 {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    Ok(x)
}

/// Least-squares cubic mapping the sensor cumulative series to the random
/// (population stand-in) cumulative series.
///
/// Trains on days `0..train_days`, predicts days `train_days..`, and
/// reports held-out RMSE.
pub fn fit_poly_predictor(
    sensor_cum: &[f64],
    random_cum: &[f64],
    train_days: usize,
) -> Result<PolyPredictor, FitError> {
    if sensor_cum.len() != random_cum.len() {
        return Err(FitError::LengthMismatch(sensor_cum.len(), random_cum.len()));
    }
    if train_days < 4 || train_days >= sensor_cum.len() {
        return Err(FitError::TooShort {
            need: 4,
            got: train_days,
        });
    }
    let xs = sensor_cum[..train_days]
        .iter()
        .fold(0.0f64, |m, &x| m.max(x.abs()));
    if xs == 0.0 {
        return Err(FitError::RankDeficient);
    }
    let ys = random_cum[..train_days]
        .iter()
        .fold(0.0f64, |m, &y| m.max(y.abs()))
        .max(f64::MIN_POSITIVE);

    let mut a = [[0.0f64; 4]; 4];
    let mut b = [0.0f64; 4];
    for t in 0..train_days {
        let x = sensor_cum[t] / xs;
        let y = random_cum[t] / ys;
        let powers = [1.0, x, x * x, x * x * x];
        for p in 0..4 {
            b[p] += powers[p] * y;
            for q in 0..4 {
                a[p][q] += powers[p] * powers[q];
            }
        }
    }
    let normed = solve4(a, b)?;

    // Back to original units: c_j = ys * a_j / xs^j.
    let mut coeffs = [0.0f64; 4];
    let mut scale = ys;
    for j in 0..4 {
        coeffs[j] = normed[j] * scale;
        scale /= xs;
    }

    let mut predictions = Vec::with_capacity(sensor_cum.len() - train_days);
    let mut sq_sum = 0.0;
    for t in train_days..sensor_cum.len() {
        let x = sensor_cum[t] / xs;
        let pred = ys * (normed[0] + x * (normed[1] + x * (normed[2] + x * normed[3])));
        sq_sum += (pred - random_cum[t]) * (pred - random_cum[t]);
        predictions.push(pred);
    }
    let rmse = (sq_sum / predictions.len() as f64).sqrt();

    Ok(PolyPredictor {
        coeffs,
        predictions,
        rmse,
        train_days,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubled_series_recovers_pure_linear_coefficients() {
        let sensor: Vec<f64> = (0..60).map(|t| (t as f64).powf(1.3) + 1.0).collect();
        let random: Vec<f64> = sensor.iter().map(|&x| 2.0 * x).collect();
        let fit = fit_poly_predictor(&sensor, &random, 40).unwrap();
        let scale = random[39].abs();
        assert!((fit.coeffs[1] - 2.0).abs() < 1e-9, "c1 = {}", fit.coeffs[1]);
        assert!(fit.coeffs[0].abs() < 1e-9 * scale);
        assert!(fit.coeffs[2].abs() < 1e-9);
        assert!(fit.coeffs[3].abs() < 1e-9);
        assert!(fit.rmse < 1e-9 * scale);
    }

    #[test]
    fn exact_cubic_recovered() {
        let truth = [5.0, 0.8, -0.002, 3e-6];
        let sensor: Vec<f64> = (0..80).map(|t| 10.0 * t as f64).collect();
        let random: Vec<f64> = sensor
            .iter()
            .map(|&x| truth[0] + x * (truth[1] + x * (truth[2] + x * truth[3])))
            .collect();
        let fit = fit_poly_predictor(&sensor, &random, 50).unwrap();
        for j in 0..4 {
            let rel = (fit.coeffs[j] - truth[j]).abs() / truth[j].abs();
            assert!(rel < 1e-9, "c{j}: {} vs {}", fit.coeffs[j], truth[j]);
        }
        let final_y = random.last().unwrap().abs();
        assert!(fit.rmse <= 1e-9 * final_y, "rmse {}", fit.rmse);
    }

    #[test]
    fn constant_sensor_series_is_rank_deficient() {
        let sensor = vec![7.0; 30];
        let random: Vec<f64> = (0..30).map(|t| t as f64).collect();
        assert!(matches!(
            fit_poly_predictor(&sensor, &random, 20),
            Err(FitError::RankDeficient)
        ));
        let zeros = vec![0.0; 30];
        assert!(matches!(
            fit_poly_predictor(&zeros, &random, 20),
            Err(FitError::RankDeficient)
        ));
    }

    #[test]
    fn invalid_windows_rejected() {
        let s: Vec<f64> = (0..10).map(f64::from).collect();
        assert!(fit_poly_predictor(&s, &s, 10).is_err());
        assert!(fit_poly_predictor(&s, &s[..9], 5).is_err());
        assert!(fit_poly_predictor(&s, &s, 3).is_err());
    }
}
