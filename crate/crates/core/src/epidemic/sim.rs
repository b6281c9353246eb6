//! Discrete-time synchronous network simulation.
//!
//! Days advance in lockstep: all day-`t` transmissions, exposed-to-
//! infectious and infectious-to-recovered transitions are drawn from the
//! day-`t-1` states. When several neighbors infect a node on the same day,
//! one of them becomes the dendrogram parent, chosen uniformly.

use super::{
    Dendrogram, DiseaseModel, Epicurve, EpidemicError, SeedSpec, SimulationConfig, NO_DAY, NO_NODE,
};
use crate::graph::{ContactNetwork, NodeId};
use crate::par;
use crate::rng::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const SUSCEPTIBLE: u8 = 0;
const EXPOSED: u8 = 1;
const INFECTIOUS: u8 = 2;
const RECOVERED: u8 = 3;

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub dendrogram: Dendrogram,
    pub epicurve: Epicurve,
}

/// One simulation run; RNG stream 0 of `cfg.rng_seed`. Identical to run 0
/// of [`run_ensemble`].
pub fn simulate(
    net: &ContactNetwork,
    model: &DiseaseModel,
    cfg: &SimulationConfig,
) -> Result<SimOutput, EpidemicError> {
    cfg.validate(net.node_count())?;
    let edge_p = edge_probabilities(net, model);
    let mut rng = stream_rng(cfg.rng_seed, 0);
    Ok(simulate_run(net, model, &edge_p, &cfg.seeds, cfg.horizon, &mut rng))
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Per-run transmission forests, in run order.
    pub dendrograms: Vec<Dendrogram>,
    /// Mean full-population cumulative curve across runs.
    pub mean_epicurve: Epicurve,
}

impl EnsembleResult {
    pub fn runs(&self) -> usize {
        self.dendrograms.len()
    }
}

/// `runs` independent simulations on decorrelated RNG streams (run `i`
/// uses stream `i` of `cfg.rng_seed`), aggregated in run order so the
/// result does not depend on scheduling.
pub fn run_ensemble(
    net: &ContactNetwork,
    model: &DiseaseModel,
    cfg: &SimulationConfig,
    runs: usize,
) -> Result<EnsembleResult, EpidemicError> {
    run_ensemble_impl(net, model, cfg, runs, true)
}

/// Sequential variant of [`run_ensemble`]; same outputs, kept available in
/// parallel builds for benchmarking the rayon path against it.
pub fn run_ensemble_sequential(
    net: &ContactNetwork,
    model: &DiseaseModel,
    cfg: &SimulationConfig,
    runs: usize,
) -> Result<EnsembleResult, EpidemicError> {
    run_ensemble_impl(net, model, cfg, runs, false)
}

fn run_ensemble_impl(
    net: &ContactNetwork,
    model: &DiseaseModel,
    cfg: &SimulationConfig,
    runs: usize,
    parallel: bool,
) -> Result<EnsembleResult, EpidemicError> {
    if runs < 1 {
        return Err(EpidemicError::InvalidConfig("runs must be >= 1".into()));
    }
    cfg.validate(net.node_count())?;
    let edge_p = edge_probabilities(net, model);
    let run_one = |run: usize| {
        let mut rng = stream_rng(cfg.rng_seed, run as u64);
        simulate_run(net, model, &edge_p, &cfg.seeds, cfg.horizon, &mut rng)
    };
    let sims = if parallel {
        par::map_indexed(runs, run_one)
    } else {
        par::map_indexed_seq(runs, run_one)
    };

    let mut mean = vec![0.0f64; cfg.horizon as usize + 1];
    let mut dendrograms = Vec::with_capacity(runs);
    for sim in sims {
        for (m, c) in mean.iter_mut().zip(sim.epicurve.cumulative()) {
            *m += c;
        }
        dendrograms.push(sim.dendrogram);
    }
    for m in &mut mean {
        *m /= runs as f64;
    }
    Ok(EnsembleResult {
        dendrograms,
        mean_epicurve: Epicurve::from_cumulative(mean, net.node_count()),
    })
}

fn edge_probabilities(net: &ContactNetwork, model: &DiseaseModel) -> Vec<f64> {
    net.edges()
        .iter()
        .map(|e| model.edge_probability(e.duration))
        .collect()
}

fn draw_seeds(n: usize, spec: &SeedSpec, rng: &mut ChaCha8Rng) -> Vec<NodeId> {
    match spec {
        SeedSpec::Explicit(nodes) => {
            let mut s = nodes.clone();
            s.sort_unstable();
            s.dedup();
            s
        }
        SeedSpec::Count(c) => {
            let mut picked = rand::seq::index::sample(rng, n, *c).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| NodeId(i as u32)).collect()
        }
    }
}

fn simulate_run(
    net: &ContactNetwork,
    model: &DiseaseModel,
    edge_p: &[f64],
    seeds: &SeedSpec,
    horizon: u32,
    rng: &mut ChaCha8Rng,
) -> SimOutput {
    let n = net.node_count();
    let seeds = draw_seeds(n, seeds, rng);
    let (p_ei, p_ir) = match *model {
        DiseaseModel::Si { .. } => (1.0, 0.0),
        DiseaseModel::Seir { alpha, gamma, .. } => {
            (1.0 - (-alpha).exp(), 1.0 - (-gamma).exp())
        }
    };
    let seir = matches!(model, DiseaseModel::Seir { .. });

    let mut state = vec![SUSCEPTIBLE; n];
    let mut infection_day = vec![NO_DAY; n];
    let mut infector = vec![NO_NODE; n];
    let mut infectious: Vec<u32> = Vec::new();
    let mut exposed: Vec<u32> = Vec::new();
    for &s in &seeds {
        state[s.index()] = INFECTIOUS;
        infection_day[s.index()] = 0;
        infectious.push(s.0);
    }

    let mut cumulative = Vec::with_capacity(horizon as usize + 1);
    let mut total = seeds.len() as f64;
    cumulative.push(total);

    // (target, source) pairs for the current day.
    let mut pending: Vec<(u32, u32)> = Vec::new();
    for day in 1..=horizon {
        if infectious.is_empty() && exposed.is_empty() {
            // Burnt out; the curve stays flat.
            for _ in day..=horizon {
                cumulative.push(total);
            }
            break;
        }

        pending.clear();
        for &u in &infectious {
            for &(v, e) in net.neighbors(NodeId(u)) {
                if state[v.index()] == SUSCEPTIBLE && rng.random::<f64>() < edge_p[e as usize] {
                    pending.push((v.0, u));
                }
            }
        }
        // A node hit through several contacts gets one parent, uniform over
        // the distinct transmitters of that day.
        pending.sort_unstable();
        pending.dedup();
        let mut newly_infected: Vec<u32> = Vec::new();
        let mut i = 0;
        while i < pending.len() {
            let v = pending[i].0;
            let mut j = i + 1;
            while j < pending.len() && pending[j].0 == v {
                j += 1;
            }
            let chosen = pending[i + rng.random_range(0..j - i)].1;
            infection_day[v as usize] = day;
            infector[v as usize] = chosen;
            state[v as usize] = if seir { EXPOSED } else { INFECTIOUS };
            newly_infected.push(v);
            total += 1.0;
            i = j;
        }

        if seir {
            let mut still_exposed = Vec::with_capacity(exposed.len());
            let mut new_infectious = Vec::new();
            for &v in &exposed {
                if rng.random::<f64>() < p_ei {
                    state[v as usize] = INFECTIOUS;
                    new_infectious.push(v);
                } else {
                    still_exposed.push(v);
                }
            }
            let mut still_infectious = Vec::with_capacity(infectious.len());
            for &u in &infectious {
                if rng.random::<f64>() < p_ir {
                    state[u as usize] = RECOVERED;
                } else {
                    still_infectious.push(u);
                }
            }
            still_infectious.extend(new_infectious);
            infectious = still_infectious;
            still_exposed.extend(newly_infected);
            exposed = still_exposed;
        } else {
            infectious.extend(newly_infected);
        }

        cumulative.push(total);
    }
    // Horizon reached without burnout leaves cumulative already full; the
    // burnout branch filled the remainder.
    debug_assert_eq!(cumulative.len(), horizon as usize + 1);

    SimOutput {
        dendrogram: Dendrogram::from_raw(infection_day, infector, seeds, horizon),
        epicurve: Epicurve::from_cumulative(cumulative, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{
        complete, generate_citylike, ContactEdge, ContactNetwork, Demographics, Gender,
        MeetingType,
    };

    fn two_node_net() -> ContactNetwork {
        let demo = vec![
            Demographics { age: 30, gender: Gender::Female, income: 0 };
            2
        ];
        let edges = vec![ContactEdge {
            u: NodeId(0),
            v: NodeId(1),
            duration: 1,
            meeting_type: MeetingType::Other,
        }];
        ContactNetwork::new(demo, edges)
    }

    #[test]
    fn forced_transmission_infects_neighbor_day_one() {
        let net = two_node_net();
        let model = DiseaseModel::si(50.0).unwrap(); // p = 1 - e^-50, effectively 1
        let cfg = SimulationConfig {
            seeds: SeedSpec::Explicit(vec![NodeId(0)]),
            horizon: 3,
            rng_seed: 1,
        };
        let out = simulate(&net, &model, &cfg).unwrap();
        assert_eq!(out.dendrogram.infection_day(NodeId(1)), Some(1));
        assert_eq!(out.dendrogram.infector(NodeId(1)), Some(NodeId(0)));
        assert_eq!(out.epicurve.cumulative(), &[1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn vanishing_beta_keeps_seed_count() {
        let net = complete(20, 1, MeetingType::Other);
        let model = DiseaseModel::si(1e-12).unwrap();
        let cfg = SimulationConfig {
            seeds: SeedSpec::Count(3),
            horizon: 50,
            rng_seed: 7,
        };
        let out = simulate(&net, &model, &cfg).unwrap();
        assert_eq!(out.epicurve.final_cumulative(), 3.0);
        assert_eq!(out.dendrogram.infected_count(), 3);
    }

    #[test]
    fn ensemble_of_one_matches_simulate() {
        let net = complete(30, 500, MeetingType::Other);
        let model = DiseaseModel::seir(1e-4, 0.5, 0.25).unwrap();
        let cfg = SimulationConfig {
            seeds: SeedSpec::Count(2),
            horizon: 40,
            rng_seed: 11,
        };
        let single = simulate(&net, &model, &cfg).unwrap();
        let ens = run_ensemble(&net, &model, &cfg, 1).unwrap();
        assert_eq!(ens.dendrograms[0], single.dendrogram);
        assert_eq!(ens.mean_epicurve, single.epicurve);
    }

    #[test]
    fn ensemble_is_deterministic_and_matches_sequential() {
        let net = generate_citylike(400, 10.0, 2).unwrap();
        let model = DiseaseModel::seir(4.2e-5, 0.5, 0.25).unwrap();
        let cfg = SimulationConfig {
            seeds: SeedSpec::Count(5),
            horizon: 60,
            rng_seed: 99,
        };
        let a = run_ensemble(&net, &model, &cfg, 24).unwrap();
        let b = run_ensemble(&net, &model, &cfg, 24).unwrap();
        let c = run_ensemble_sequential(&net, &model, &cfg, 24).unwrap();
        assert_eq!(a.dendrograms, b.dendrograms);
        assert_eq!(a.mean_epicurve, b.mean_epicurve);
        assert_eq!(a.dendrograms, c.dendrograms);
        assert_eq!(a.mean_epicurve, c.mean_epicurve);
    }

    #[test]
    fn dendrogram_edges_exist_in_network_and_days_increase() {
        let net = generate_citylike(300, 8.0, 5).unwrap();
        let model = DiseaseModel::si(5e-4).unwrap();
        let cfg = SimulationConfig {
            seeds: SeedSpec::Count(3),
            horizon: 30,
            rng_seed: 4,
        };
        let out = simulate(&net, &model, &cfg).unwrap();
        let den = &out.dendrogram;
        for v in den.infected_nodes() {
            if let Some(p) = den.infector(v) {
                assert!(den.infection_day(v).unwrap() > den.infection_day(p).unwrap());
                assert!(
                    net.neighbors(v).iter().any(|&(w, _)| w == p),
                    "dendrogram edge {p}->{v} not in contact network"
                );
            } else {
                assert_eq!(den.infection_day(v), Some(0));
                assert!(den.seeds().contains(&v));
            }
        }
    }

    #[test]
    fn raising_beta_does_not_reduce_mean_final_size() {
        let net = generate_citylike(200, 8.0, 3).unwrap();
        let lo = DiseaseModel::si(2e-4).unwrap();
        let hi = DiseaseModel::si(4e-4).unwrap();
        let cfg = SimulationConfig {
            seeds: SeedSpec::Count(2),
            horizon: 40,
            rng_seed: 21,
        };
        let mean_final = |model: &DiseaseModel| {
            run_ensemble(&net, model, &cfg, 500)
                .unwrap()
                .mean_epicurve
                .final_cumulative()
        };
        assert!(mean_final(&hi) >= mean_final(&lo));
    }

    #[test]
    fn horizon_prefix_is_consistent() {
        // The synchronous update never looks ahead, so extending the
        // horizon preserves the prefix exactly.
        let net = complete(40, 800, MeetingType::Other);
        let model = DiseaseModel::seir(2e-4, 0.7, 0.3).unwrap();
        let short = SimulationConfig {
            seeds: SeedSpec::Count(2),
            horizon: 15,
            rng_seed: 13,
        };
        let long = SimulationConfig {
            horizon: 30,
            ..short.clone()
        };
        let a = simulate(&net, &model, &short).unwrap();
        let b = simulate(&net, &model, &long).unwrap();
        assert_eq!(
            a.epicurve.cumulative(),
            &b.epicurve.cumulative()[..=15],
        );
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let net = two_node_net();
        let model = DiseaseModel::si(1.0).unwrap();
        let bad_seeds = SimulationConfig {
            seeds: SeedSpec::Count(3),
            horizon: 5,
            rng_seed: 0,
        };
        assert!(simulate(&net, &model, &bad_seeds).is_err());
        let bad_horizon = SimulationConfig {
            seeds: SeedSpec::Count(1),
            horizon: 0,
            rng_seed: 0,
        };
        assert!(simulate(&net, &model, &bad_horizon).is_err());
        let bad_explicit = SimulationConfig {
            seeds: SeedSpec::Explicit(vec![NodeId(9)]),
            horizon: 5,
            rng_seed: 0,
        };
        assert!(simulate(&net, &model, &bad_explicit).is_err());
    }
}
