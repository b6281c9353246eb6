// Scratch calibration harness (not part of the test suite).
use episense::epicurve::{evaluate_leads, fit_logistic, mean_restricted_epicurve};
use episense::epidemic::{
    ode_si, run_ensemble, DiseaseModel, SeedSpec, SimulationConfig,
};
use episense::graph::{complete, degree_stats, generate_citylike, generate_starlike, MeetingType, NodeId};
use episense::rng::derive_seed;
use episense::sensors::{
    select_random, select_with, DtThreshold, Scoring, SelectionStrategy,
};
use std::time::Instant;

fn clique_vs_ode(p: f64, seeds: usize, horizon: u32, runs: usize) {
    let n = 100usize;
    let beta = -(1.0 - p).ln();
    let net = complete(n, 1, MeetingType::Other);
    let model = DiseaseModel::si(beta).unwrap();
    let cfg = SimulationConfig {
        seeds: SeedSpec::Count(seeds),
        horizon,
        rng_seed: 123,
    };
    let t = Instant::now();
    let ens = run_ensemble(&net, &model, &cfg, runs).unwrap();
    let ode = ode_si(n as f64, p, seeds as f64, f64::from(horizon), 0.001);
    let mut max_gap: f64 = 0.0;
    for day in 0..=horizon {
        let sim = ens.mean_epicurve.cumulative()[day as usize];
        let ode_v = ode.at_day(day);
        max_gap = max_gap.max((sim - ode_v).abs());
    }
    println!(
        "clique p={p} seeds={seeds} horizon={horizon} runs={runs}: max gap {:.2} ({:.2}% of N)  [{:?}]",
        max_gap,
        100.0 * max_gap / n as f64,
        t.elapsed()
    );
}

fn leads(label: &str, net: &episense::graph::ContactNetwork, beta: f64, seeds: usize, horizon: u32, runs: usize, k: usize) {
    let model = DiseaseModel::seir(beta, 0.5, 0.25).unwrap();
    let master = 42u64;
    let t = Instant::now();
    let train = run_ensemble(
        net,
        &model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seeds),
            horizon,
            rng_seed: derive_seed(master, "cal/train"),
        },
        runs,
    )
    .unwrap();
    let eval = run_ensemble(
        net,
        &model,
        &SimulationConfig {
            seeds: SeedSpec::Count(seeds),
            horizon,
            rng_seed: derive_seed(master, "cal/eval"),
        },
        runs,
    )
    .unwrap();
    let sim_time = t.elapsed();

    let full = &eval.mean_epicurve;
    let final_frac = full.final_cumulative() / net.node_count() as f64;
    let full_fit = fit_logistic(full.cumulative());
    let peak = full_fit.as_ref().map(|f| f.t0).unwrap_or(f64::NAN);

    let reference = select_random(net, k, derive_seed(master, "cal/ref")).unwrap();
    print!(
        "{label}: final {:.0}% peak {:.1}d  sim {:?}  ",
        100.0 * final_frac,
        peak,
        sim_time
    );
    for (name, strategy) in [
        ("topk", SelectionStrategy::TopKDegree { sample_size: k, nominations: 3 }),
        ("wd", SelectionStrategy::WeightedDegree { sample_size: k, nominations: 3 }),
        ("tt", SelectionStrategy::Tt { eps0: 0.1, scoring: Scoring::TreeDepth }),
        ("dt", SelectionStrategy::Dt { eps0: 0.1, threshold: DtThreshold::HitRate }),
    ] {
        let set = select_with(&strategy, net, &train.dendrograms, k, derive_seed(master, name)).unwrap();
        let stats = evaluate_leads(&eval.dendrograms, &set.members, &reference.members);
        print!(
            "{name}: lead {:.2} (var {:.2}, fail {}) ",
            stats.mean, stats.variance, stats.fit_failures
        );
    }
    println!("  [total {:?}]", t.elapsed());

    // Child vs adult mean infection day on the last ensemble.
    let children: Vec<NodeId> = net
        .nodes()
        .filter(|&v| net.demographics(v).age <= 20)
        .collect();
    let adults: Vec<NodeId> = net
        .nodes()
        .filter(|&v| net.demographics(v).age > 20)
        .collect();
    if !children.is_empty() {
        let child_curve = mean_restricted_epicurve(&eval.dendrograms, &children);
        let adult_curve = mean_restricted_epicurve(&eval.dendrograms, &adults);
        let cf = fit_logistic(child_curve.cumulative()).map(|f| f.t0).unwrap_or(f64::NAN);
        let af = fit_logistic(adult_curve.cumulative()).map(|f| f.t0).unwrap_or(f64::NAN);
        println!("   children t0 {cf:.1}  adults t0 {af:.1}");
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("all");

    if mode == "clique" || mode == "all" {
        for p in [0.002, 0.001, 0.0005] {
            clique_vs_ode(p, 5, (2.5 / (p * 100.0)) as u32 * 10, 400);
        }
    }

    if mode == "city" || mode == "all" {
        let t = Instant::now();
        let net = generate_citylike(20_000, 50.0, 7).unwrap();
        println!("citylike gen: {:?}  stats {:?}", t.elapsed(), degree_stats(&net));
        leads("citylike20k", &net, 4.2e-5, 5, 150, 40, 1000);
    }

    if mode == "star" || mode == "all" {
        let t = Instant::now();
        let net = generate_starlike(10_000, 0.01, 7).unwrap();
        println!("starlike gen: {:?}  stats {:?}", t.elapsed(), degree_stats(&net));
        leads("starlike10k", &net, 4.2e-5, 5, 150, 40, 500);
    }
}
