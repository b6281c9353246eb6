//! Stochastic SI/SEIR simulation on contact networks.
//!
//! One simulation run produces a [`Dendrogram`] (the who-infected-whom
//! forest realized in that run) and an [`Epicurve`] (daily cumulative
//! infections over the whole population). Deterministic ODE counterparts
//! of both models live in [`ode`] and serve as validation oracles.

mod ode;
mod sim;

pub use ode::{logistic_si_closed_form, ode_seir, ode_si, OdeSeries, SeirSeries};
pub use sim::{run_ensemble, run_ensemble_sequential, simulate, EnsembleResult, SimOutput};

use crate::graph::NodeId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EpidemicError {
    #[error("invalid disease model: {0}")]
    InvalidModel(String),
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("invalid dendrogram: {0}")]
    InvalidDendrogram(String),
}

/// Disease parameterization.
///
/// `beta` is a per-second transmission rate applied against edge contact
/// durations: a contact of `d` seconds transmits with daily probability
/// `1 - exp(-beta * d)`, which stays in `[0, 1)` for any duration.
/// `alpha` and `gamma` are daily exposed-to-infectious and
/// infectious-to-recovered rates, applied as `1 - exp(-rate)` per day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiseaseModel {
    Si { beta: f64 },
    Seir { beta: f64, alpha: f64, gamma: f64 },
}

impl DiseaseModel {
    pub fn si(beta: f64) -> Result<DiseaseModel, EpidemicError> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(EpidemicError::InvalidModel(format!(
                "beta must be positive and finite, got {beta}"
            )));
        }
        Ok(DiseaseModel::Si { beta })
    }

    pub fn seir(beta: f64, alpha: f64, gamma: f64) -> Result<DiseaseModel, EpidemicError> {
        for (name, value) in [("beta", beta), ("alpha", alpha), ("gamma", gamma)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(EpidemicError::InvalidModel(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(DiseaseModel::Seir { beta, alpha, gamma })
    }

    pub fn beta(&self) -> f64 {
        match *self {
            DiseaseModel::Si { beta } => beta,
            DiseaseModel::Seir { beta, .. } => beta,
        }
    }

    /// Same model with a different transmission rate.
    pub fn with_beta(&self, beta: f64) -> Result<DiseaseModel, EpidemicError> {
        match *self {
            DiseaseModel::Si { .. } => DiseaseModel::si(beta),
            DiseaseModel::Seir { alpha, gamma, .. } => DiseaseModel::seir(beta, alpha, gamma),
        }
    }

    /// Daily transmission probability across one contact of `duration` seconds.
    #[inline]
    pub fn edge_probability(&self, duration: u32) -> f64 {
        1.0 - (-self.beta() * f64::from(duration)).exp()
    }
}

/// Initially infected nodes for one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSpec {
    /// Sample this many seed nodes uniformly, freshly per run.
    Count(usize),
    /// Use exactly these nodes in every run.
    Explicit(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationConfig {
    pub seeds: SeedSpec,
    /// Number of simulated days past day 0.
    pub horizon: u32,
    pub rng_seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self, n: usize) -> Result<(), EpidemicError> {
        if self.horizon < 1 {
            return Err(EpidemicError::InvalidConfig("horizon must be >= 1".into()));
        }
        match &self.seeds {
            SeedSpec::Count(c) => {
                if *c < 1 || *c > n {
                    return Err(EpidemicError::InvalidConfig(format!(
                        "seed count {c} outside 1..={n}"
                    )));
                }
            }
            SeedSpec::Explicit(nodes) => {
                if nodes.is_empty() || nodes.len() > n {
                    return Err(EpidemicError::InvalidConfig(format!(
                        "explicit seed list of size {} outside 1..={n}",
                        nodes.len()
                    )));
                }
                for v in nodes {
                    if v.index() >= n {
                        return Err(EpidemicError::InvalidConfig(format!(
                            "seed node {v} out of range"
                        )));
                    }
                }
                let mut sorted: Vec<NodeId> = nodes.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != nodes.len() {
                    return Err(EpidemicError::InvalidConfig(
                        "duplicate explicit seed nodes".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

pub(crate) const NO_DAY: u32 = u32::MAX;
pub(crate) const NO_NODE: u32 = u32::MAX;

/// Transmission forest of one simulation run.
///
/// Every infected node is either a seed (day 0, no infector) or was
/// infected by exactly one neighbor on a strictly later day than that
/// neighbor; the forest's edges all exist in the contact network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    infection_day: Vec<u32>,
    infector: Vec<u32>,
    seeds: Vec<NodeId>,
    horizon: u32,
}

impl Dendrogram {
    pub(crate) fn from_raw(
        infection_day: Vec<u32>,
        infector: Vec<u32>,
        seeds: Vec<NodeId>,
        horizon: u32,
    ) -> Dendrogram {
        Dendrogram {
            infection_day,
            infector,
            seeds,
            horizon,
        }
    }

    /// Build a dendrogram from explicit infection events, validating the
    /// forest structure. `events` lists non-seed infections as
    /// `(node, day, infector)`.
    pub fn from_parts(
        n: usize,
        seeds: &[NodeId],
        events: &[(NodeId, u32, NodeId)],
        horizon: u32,
    ) -> Result<Dendrogram, EpidemicError> {
        let mut infection_day = vec![NO_DAY; n];
        let mut infector = vec![NO_NODE; n];
        if seeds.is_empty() {
            return Err(EpidemicError::InvalidDendrogram("no seed nodes".into()));
        }
        for s in seeds {
            if s.index() >= n {
                return Err(EpidemicError::InvalidDendrogram(format!(
                    "seed {s} out of range"
                )));
            }
            if infection_day[s.index()] != NO_DAY {
                return Err(EpidemicError::InvalidDendrogram(format!(
                    "duplicate seed {s}"
                )));
            }
            infection_day[s.index()] = 0;
        }
        for &(v, day, parent) in events {
            if v.index() >= n || parent.index() >= n {
                return Err(EpidemicError::InvalidDendrogram(format!(
                    "event node {v} or infector {parent} out of range"
                )));
            }
            if infection_day[v.index()] != NO_DAY {
                return Err(EpidemicError::InvalidDendrogram(format!(
                    "node {v} infected twice"
                )));
            }
            if day == 0 || day > horizon {
                return Err(EpidemicError::InvalidDendrogram(format!(
                    "infection day {day} outside 1..={horizon}"
                )));
            }
            infection_day[v.index()] = day;
            infector[v.index()] = parent.0;
        }
        // Day monotonicity along forest edges.
        for v in 0..n {
            let p = infector[v];
            if p == NO_NODE {
                continue;
            }
            let pd = infection_day[p as usize];
            if pd == NO_DAY || pd >= infection_day[v] {
                return Err(EpidemicError::InvalidDendrogram(format!(
                    "node {v} infected on day {} by node {p} infected on day {}",
                    infection_day[v],
                    if pd == NO_DAY { -1 } else { pd as i64 }
                )));
            }
        }
        Ok(Dendrogram {
            infection_day,
            infector,
            seeds: seeds.to_vec(),
            horizon,
        })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.infection_day.len()
    }

    #[inline]
    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn seeds(&self) -> &[NodeId] {
        &self.seeds
    }

    #[inline]
    pub fn is_infected(&self, v: NodeId) -> bool {
        self.infection_day[v.index()] != NO_DAY
    }

    #[inline]
    pub fn infection_day(&self, v: NodeId) -> Option<u32> {
        match self.infection_day[v.index()] {
            NO_DAY => None,
            d => Some(d),
        }
    }

    pub fn infector(&self, v: NodeId) -> Option<NodeId> {
        match self.infector[v.index()] {
            NO_NODE => None,
            p => Some(NodeId(p)),
        }
    }

    pub fn infected_count(&self) -> usize {
        self.infection_day.iter().filter(|&&d| d != NO_DAY).count()
    }

    pub fn infected_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.infection_day
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != NO_DAY)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Depth of each node in its transmission tree (seeds at 0); `u32::MAX`
    /// for nodes that were never infected.
    pub fn depths(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.node_count() as u32)
            .filter(|&v| self.infection_day[v as usize] != NO_DAY)
            .collect();
        order.sort_unstable_by_key(|&v| (self.infection_day[v as usize], v));
        let mut depth = vec![NO_DAY; self.node_count()];
        for v in order {
            depth[v as usize] = match self.infector[v as usize] {
                NO_NODE => 0,
                p => depth[p as usize] + 1,
            };
        }
        depth
    }

    /// Dump format: one `node infection_day infector_or_-1` line per
    /// infected node, sorted by node id.
    pub fn dump_string(&self) -> String {
        let mut out = String::new();
        for v in self.infected_nodes() {
            let infector = match self.infector(v) {
                Some(p) => p.0 as i64,
                None => -1,
            };
            out.push_str(&format!(
                "{} {} {}\n",
                v,
                self.infection_day[v.index()],
                infector
            ));
        }
        out
    }
}

/// Day-indexed infection counts for some node population.
///
/// `cumulative[t]` counts members infected on or before day `t`; values are
/// reals so ensemble means share the type with single-run counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Epicurve {
    cumulative: Vec<f64>,
    population: usize,
}

impl Epicurve {
    pub fn from_cumulative(cumulative: Vec<f64>, population: usize) -> Epicurve {
        debug_assert!(!cumulative.is_empty());
        debug_assert!(
            cumulative.windows(2).all(|w| w[1] >= w[0]),
            "cumulative epicurve must be non-decreasing"
        );
        Epicurve {
            cumulative,
            population,
        }
    }

    #[inline]
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// New infections per day; day 0 carries the initial count.
    pub fn incident(&self) -> Vec<f64> {
        let mut inc = Vec::with_capacity(self.cumulative.len());
        let mut prev = 0.0;
        for &c in &self.cumulative {
            inc.push(c - prev);
            prev = c;
        }
        inc
    }

    pub fn horizon(&self) -> u32 {
        (self.cumulative.len() - 1) as u32
    }

    pub fn population(&self) -> usize {
        self.population
    }

    pub fn final_cumulative(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// `day,cumulative,incident` CSV with header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("day,cumulative,incident\n");
        let incident = self.incident();
        for (day, (c, i)) in self.cumulative.iter().zip(&incident).enumerate() {
            out.push_str(&format!("{day},{c},{i}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_validation() {
        assert!(DiseaseModel::si(0.0).is_err());
        assert!(DiseaseModel::si(-1.0).is_err());
        assert!(DiseaseModel::seir(1e-5, 0.5, 0.0).is_err());
        let m = DiseaseModel::seir(1e-5, 0.5, 0.25).unwrap();
        assert_eq!(m.beta(), 1e-5);
        let p = m.edge_probability(30_000);
        assert!(p > 0.0 && p < 1.0);
        assert_eq!(m.edge_probability(0), 0.0);
    }

    #[test]
    fn dendrogram_from_parts_validates_forest() {
        let seeds = [NodeId(0)];
        let ok = Dendrogram::from_parts(
            3,
            &seeds,
            &[(NodeId(1), 1, NodeId(0)), (NodeId(2), 3, NodeId(1))],
            5,
        )
        .unwrap();
        assert_eq!(ok.infection_day(NodeId(2)), Some(3));
        assert_eq!(ok.infector(NodeId(2)), Some(NodeId(1)));
        assert_eq!(ok.depths(), vec![0, 1, 2]);

        // Child infected no later than its infector is rejected.
        let bad = Dendrogram::from_parts(
            3,
            &seeds,
            &[(NodeId(1), 2, NodeId(0)), (NodeId(2), 2, NodeId(1))],
            5,
        );
        assert!(bad.is_err());
        // Infector never infected.
        let bad = Dendrogram::from_parts(3, &seeds, &[(NodeId(1), 1, NodeId(2))], 5);
        assert!(bad.is_err());
    }

    #[test]
    fn dendrogram_dump_is_sorted_by_node() {
        let den = Dendrogram::from_parts(
            4,
            &[NodeId(2)],
            &[(NodeId(0), 2, NodeId(2)), (NodeId(3), 1, NodeId(2))],
            4,
        )
        .unwrap();
        assert_eq!(den.dump_string(), "0 2 2\n2 0 -1\n3 1 2\n");
    }

    #[test]
    fn epicurve_incident_is_first_difference() {
        let curve = Epicurve::from_cumulative(vec![2.0, 5.0, 5.0, 9.0], 100);
        assert_eq!(curve.incident(), vec![2.0, 3.0, 0.0, 4.0]);
        assert_eq!(curve.horizon(), 3);
        assert_eq!(
            curve.to_csv(),
            "day,cumulative,incident\n0,2,2\n1,5,3\n2,5,0\n3,9,4\n"
        );
    }
}
