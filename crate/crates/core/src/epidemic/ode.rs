//! Deterministic mean-field counterparts of the network models.
//!
//! Fixed-step forward Euler integrators; at `dt <= 1e-3` they are accurate
//! enough to serve as oracles for the stochastic simulator and the curve
//! analytics.

/// Sampled trajectory of a scalar ODE on a uniform time grid.
#[derive(Debug, Clone)]
pub struct OdeSeries {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl OdeSeries {
    /// Value at continuous time `t` (nearest grid point).
    pub fn at_time(&self, t: f64) -> f64 {
        let idx = (t / self.dt).round() as usize;
        self.values[idx.min(self.values.len() - 1)]
    }

    pub fn at_day(&self, day: u32) -> f64 {
        self.at_time(f64::from(day))
    }
}

/// Forward-Euler integration of `dI/dt = beta (N - I) I` on a clique of
/// `n` nodes, starting from `i0` infected.
pub fn ode_si(n: f64, beta: f64, i0: f64, horizon: f64, dt: f64) -> OdeSeries {
    assert!(i0 > 0.0 && i0 < n, "need 0 < i0 < n");
    assert!(dt > 0.0 && dt <= 0.01, "need 0 < dt <= 0.01");
    let steps = (horizon / dt).ceil() as usize;
    let mut values = Vec::with_capacity(steps + 1);
    let mut i = i0;
    values.push(i);
    for _ in 0..steps {
        i += dt * beta * (n - i) * i;
        values.push(i);
    }
    OdeSeries { dt, values }
}

/// Closed-form solution of the clique SI equation:
/// `I(t) = N / (1 + ((N - i0)/i0) exp(-beta N t))`.
pub fn logistic_si_closed_form(n: f64, beta: f64, i0: f64, t: f64) -> f64 {
    n / (1.0 + ((n - i0) / i0) * (-beta * n * t).exp())
}

/// Forward-Euler SEIR trajectory with exact per-step flow bookkeeping, so
/// the population total is conserved to rounding error.
#[derive(Debug, Clone)]
pub struct SeirSeries {
    pub dt: f64,
    pub s: Vec<f64>,
    pub e: Vec<f64>,
    pub i: Vec<f64>,
    pub r: Vec<f64>,
    /// Largest `|S+E+I+R - N|` observed at any step.
    pub max_conservation_error: f64,
}

impl SeirSeries {
    pub fn infected_at_time(&self, t: f64) -> f64 {
        let idx = ((t / self.dt).round() as usize).min(self.i.len() - 1);
        self.i[idx]
    }
}

/// Integrate `dS = -beta S I`, `dE = beta S I - alpha E`,
/// `dI = alpha E - gamma I`, `dR = gamma I`.
#[allow(clippy::too_many_arguments)]
pub fn ode_seir(
    n: f64,
    beta: f64,
    alpha: f64,
    gamma: f64,
    e0: f64,
    i0: f64,
    horizon: f64,
    dt: f64,
) -> SeirSeries {
    assert!(dt > 0.0 && dt <= 0.01, "need 0 < dt <= 0.01");
    assert!(e0 >= 0.0 && i0 >= 0.0 && e0 + i0 <= n);
    let steps = (horizon / dt).ceil() as usize;
    let (mut s, mut e, mut i, mut r) = (n - e0 - i0, e0, i0, 0.0);
    let mut series = SeirSeries {
        dt,
        s: Vec::with_capacity(steps + 1),
        e: Vec::with_capacity(steps + 1),
        i: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
        max_conservation_error: 0.0,
    };
    let record = |s: f64, e: f64, i: f64, r: f64, err: &mut f64, out: &mut SeirSeries| {
        out.s.push(s);
        out.e.push(e);
        out.i.push(i);
        out.r.push(r);
        let drift = (s + e + i + r - n).abs();
        if drift > *err {
            *err = drift;
        }
    };
    let mut max_err = 0.0;
    record(s, e, i, r, &mut max_err, &mut series);
    for _ in 0..steps {
        let flow_se = beta * s * i * dt;
        let flow_ei = alpha * e * dt;
        let flow_ir = gamma * i * dt;
        s -= flow_se;
        e += flow_se - flow_ei;
        i += flow_ei - flow_ir;
        r += flow_ir;
        record(s, e, i, r, &mut max_err, &mut series);
    }
    series.max_conservation_error = max_err;
    series
}
