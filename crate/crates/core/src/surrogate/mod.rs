//! Demographics-only ("surrogate") sensor selection.
//!
//! When the contact-network structure is unknown, sensors are picked from
//! per-person features alone: 16 demographic and interaction attributes
//! per node. Distribution criteria produce a first cut S', a decision
//! tree trained per transmission rate refines it to S'' (the intersection
//! of the per-rate positive predictions), and an information-tier
//! comparison quantifies what each level of knowledge buys in lead time.

mod tree;

pub use tree::{train_tree, DecisionTree, TreeConfig, TreeError};

use crate::epicurve::{evaluate_leads, LeadStats};
use crate::epidemic::{run_ensemble, DiseaseModel, EpidemicError, SeedSpec, SimulationConfig};
use crate::graph::{ContactNetwork, MeetingType, NodeId};
use crate::par;
use crate::rng::derive_seed;
use crate::sensors::{
    select_dt, select_random, select_tt, DtThreshold, Scoring, SensorError,
};
use thiserror::Error;

pub const FEATURE_COUNT: usize = 16;

/// Feature indices into a [`FeatureVector`].
pub mod feature {
    pub const AGE: usize = 0;
    pub const GENDER: usize = 1;
    pub const INCOME: usize = 2;
    pub const MEETING_COUNT: usize = 3;
    pub const TOTAL_DURATION: usize = 4;
    pub const LONG_MEETING_COUNT: usize = 5;
    /// Count of meetings of type `t` (1..=5) sits at `TYPE_COUNT_BASE + t - 1`.
    pub const TYPE_COUNT_BASE: usize = 6;
    /// Percent of meetings of type `t` (1..=5) sits at `TYPE_PCT_BASE + t - 1`.
    pub const TYPE_PCT_BASE: usize = 11;

    /// The demographic group: age, gender, income.
    pub const DEMOGRAPHIC: [usize; 3] = [AGE, GENDER, INCOME];

    /// The interaction group: everything derived from meetings.
    pub const INTERACTION: [usize; 13] = [3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
}

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "age",
    "gender",
    "income",
    "meeting_count",
    "total_meeting_duration",
    "long_meeting_count",
    "type1_count",
    "type2_count",
    "type3_count",
    "type4_count",
    "type5_count",
    "type1_pct",
    "type2_pct",
    "type3_pct",
    "type4_pct",
    "type5_pct",
];

/// 16 per-node attributes: age, gender, income, meeting count, total
/// meeting duration, count of long meetings, and counts plus percentages
/// of meeting types 1-5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("invalid criteria: {0}")]
    InvalidCriteria(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Epidemic(#[from] EpidemicError),
    #[error(transparent)]
    Sensor(#[from] SensorError),
}

/// Aggregate the 16 features for every node. Parallel edges count as
/// separate meetings; a meeting is "long" when its duration exceeds
/// `long_threshold` seconds.
pub fn extract_features(net: &ContactNetwork, long_threshold: u32) -> Vec<FeatureVector> {
    par::map_indexed(net.node_count(), |i| {
        let v = NodeId(i as u32);
        let demo = net.demographics(v);
        let mut f = [0.0f64; FEATURE_COUNT];
        f[feature::AGE] = f64::from(demo.age);
        f[feature::GENDER] = f64::from(demo.gender.code());
        f[feature::INCOME] = f64::from(demo.income);
        let mut type_counts = [0u32; 5];
        let mut total_duration = 0u64;
        let mut long = 0u32;
        let mut meetings = 0u32;
        for &(_, e) in net.neighbors(v) {
            let edge = &net.edges()[e as usize];
            meetings += 1;
            total_duration += u64::from(edge.duration);
            if edge.duration > long_threshold {
                long += 1;
            }
            let code = edge.meeting_type.code();
            if (1..=5).contains(&code) {
                type_counts[(code - 1) as usize] += 1;
            }
        }
        f[feature::MEETING_COUNT] = f64::from(meetings);
        f[feature::TOTAL_DURATION] = total_duration as f64;
        f[feature::LONG_MEETING_COUNT] = f64::from(long);
        for t in 0..5 {
            f[feature::TYPE_COUNT_BASE + t] = f64::from(type_counts[t]);
            f[feature::TYPE_PCT_BASE + t] = if meetings > 0 {
                100.0 * f64::from(type_counts[t]) / f64::from(meetings)
            } else {
                0.0
            };
        }
        FeatureVector(f)
    })
}

/// Conjunctive selection rules over the feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateCriteria {
    /// Inclusive age bounds in years.
    pub age_range: (u32, u32),
    /// Minimum fraction of meetings longer than the long threshold.
    pub long_meeting_fraction_min: f64,
    /// Meeting types that count toward the type criterion (subset of 1..=5).
    pub required_types: Vec<MeetingType>,
    /// Minimum fraction of meetings of a required type.
    pub required_type_fraction_min: f64,
}

impl SurrogateCriteria {
    /// The published criteria: age 5-20, at least 80% long meetings, at
    /// least 80% of meetings of type work or school.
    pub fn defaults() -> SurrogateCriteria {
        SurrogateCriteria {
            age_range: (5, 20),
            long_meeting_fraction_min: 0.8,
            required_types: vec![MeetingType::Work, MeetingType::School],
            required_type_fraction_min: 0.8,
        }
    }

    pub fn validate(&self) -> Result<(), SurrogateError> {
        if self.age_range.0 > self.age_range.1 {
            return Err(SurrogateError::InvalidCriteria(format!(
                "age range [{}, {}] inverted",
                self.age_range.0, self.age_range.1
            )));
        }
        for frac in [
            self.long_meeting_fraction_min,
            self.required_type_fraction_min,
        ] {
            if !(0.0..=1.0).contains(&frac) {
                return Err(SurrogateError::InvalidCriteria(format!(
                    "fraction {frac} outside [0,1]"
                )));
            }
        }
        if self
            .required_types
            .iter()
            .any(|t| !(1..=5).contains(&t.code()))
        {
            return Err(SurrogateError::InvalidCriteria(
                "required types must be in 1..=5".into(),
            ));
        }
        Ok(())
    }

    /// Parse a `key=value` criteria file: `age_min`, `age_max`,
    /// `long_fraction_min`, `types` (comma-separated codes),
    /// `type_fraction_min`. Missing keys keep their defaults.
    pub fn parse_kv(text: &str) -> Result<SurrogateCriteria, SurrogateError> {
        let mut criteria = SurrogateCriteria::defaults();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                SurrogateError::InvalidCriteria(format!("line {}: expected key=value", idx + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                SurrogateError::InvalidCriteria(format!(
                    "line {}: invalid {what} `{value}`",
                    idx + 1
                ))
            };
            match key {
                "age_min" => criteria.age_range.0 = value.parse().map_err(|_| bad("age"))?,
                "age_max" => criteria.age_range.1 = value.parse().map_err(|_| bad("age"))?,
                "long_fraction_min" => {
                    criteria.long_meeting_fraction_min =
                        value.parse().map_err(|_| bad("fraction"))?
                }
                "type_fraction_min" => {
                    criteria.required_type_fraction_min =
                        value.parse().map_err(|_| bad("fraction"))?
                }
                "types" => {
                    let mut types = Vec::new();
                    for tok in value.split(',') {
                        let code: u32 = tok.trim().parse().map_err(|_| bad("type code"))?;
                        types.push(
                            MeetingType::from_code(code).ok_or_else(|| bad("type code"))?,
                        );
                    }
                    criteria.required_types = types;
                }
                other => {
                    return Err(SurrogateError::InvalidCriteria(format!(
                        "line {}: unknown key `{other}`",
                        idx + 1
                    )))
                }
            }
        }
        criteria.validate()?;
        Ok(criteria)
    }
}

/// Nodes satisfying every criterion, in node-id order.
pub fn apply_criteria(features: &[FeatureVector], criteria: &SurrogateCriteria) -> Vec<NodeId> {
    let type_indices: Vec<usize> = criteria
        .required_types
        .iter()
        .map(|t| feature::TYPE_PCT_BASE + (t.code() as usize) - 1)
        .collect();
    features
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            let age = f.0[feature::AGE];
            if age < f64::from(criteria.age_range.0) || age > f64::from(criteria.age_range.1) {
                return false;
            }
            let meetings = f.0[feature::MEETING_COUNT];
            let long_fraction = if meetings > 0.0 {
                f.0[feature::LONG_MEETING_COUNT] / meetings
            } else {
                0.0
            };
            if long_fraction < criteria.long_meeting_fraction_min {
                return false;
            }
            let type_fraction: f64 =
                type_indices.iter().map(|&i| f.0[i]).sum::<f64>() / 100.0;
            type_fraction >= criteria.required_type_fraction_min
        })
        .map(|(i, _)| NodeId(i as u32))
        .collect()
}

/// Total-variation distance between the per-set histograms of one feature.
pub fn feature_tv_distance(
    features: &[FeatureVector],
    set_a: &[NodeId],
    set_b: &[NodeId],
    feature_idx: usize,
    bins: usize,
) -> f64 {
    let value = |v: &NodeId| features[v.index()].0[feature_idx];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in set_a.iter().chain(set_b) {
        lo = lo.min(value(v));
        hi = hi.max(value(v));
    }
    if !(hi > lo) {
        return 0.0;
    }
    let mut hist_a = vec![0usize; bins];
    let mut hist_b = vec![0usize; bins];
    let bin_of = |x: f64| (((x - lo) / (hi - lo) * bins as f64) as usize).min(bins - 1);
    for v in set_a {
        hist_a[bin_of(value(v))] += 1;
    }
    for v in set_b {
        hist_b[bin_of(value(v))] += 1;
    }
    0.5 * hist_a
        .iter()
        .zip(&hist_b)
        .map(|(&a, &b)| (a as f64 / set_a.len() as f64 - b as f64 / set_b.len() as f64).abs())
        .sum::<f64>()
}

/// Features ranked by how differently they distribute between the two
/// sets (descending TV distance, ties to the lower index).
pub fn top_tv_features(
    features: &[FeatureVector],
    set_a: &[NodeId],
    set_b: &[NodeId],
    candidates: &[usize],
    top: usize,
    bins: usize,
) -> Vec<usize> {
    let mut ranked: Vec<(usize, f64)> = candidates
        .iter()
        .map(|&idx| (idx, feature_tv_distance(features, set_a, set_b, idx, bins)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.into_iter().take(top).map(|(idx, _)| idx).collect()
}

/// Per-node log density-ratio score over the given features: positive
/// when the node's feature bins are more typical of `positives` than of
/// `reference`. Laplace-smoothed histograms, 16 bins.
pub fn distribution_scores(
    features: &[FeatureVector],
    positives: &[NodeId],
    reference: &[NodeId],
    scored_features: &[usize],
) -> Vec<f64> {
    const BINS: usize = 16;
    let mut scores = vec![0.0f64; features.len()];
    for &fi in scored_features {
        let value = |i: usize| features[i].0[fi];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in positives.iter().chain(reference) {
            lo = lo.min(value(v.index()));
            hi = hi.max(value(v.index()));
        }
        if !(hi > lo) {
            continue;
        }
        let bin_of = |x: f64| {
            ((((x - lo) / (hi - lo)) * BINS as f64) as usize).min(BINS - 1)
        };
        let mut hist_p = vec![0.5f64; BINS];
        let mut hist_r = vec![0.5f64; BINS];
        for v in positives {
            hist_p[bin_of(value(v.index()))] += 1.0;
        }
        for v in reference {
            hist_r[bin_of(value(v.index()))] += 1.0;
        }
        let (np, nr) = (
            positives.len() as f64 + 0.5 * BINS as f64,
            reference.len() as f64 + 0.5 * BINS as f64,
        );
        for (i, score) in scores.iter_mut().enumerate() {
            let x = value(i);
            // Values outside the observed range land in the edge bins.
            let b = bin_of(x.clamp(lo, hi));
            *score += (hist_p[b] / np).ln() - (hist_r[b] / nr).ln();
        }
    }
    scores
}

/// Top-k nodes by score, descending, ties to the lower node id.
pub fn top_k_by_score(scores: &[f64], k: usize) -> Vec<NodeId> {
    let mut order: Vec<u32> = (0..scores.len() as u32).collect();
    order.sort_by(|&a, &b| {
        scores[b as usize]
            .total_cmp(&scores[a as usize])
            .then(a.cmp(&b))
    });
    order.truncate(k);
    order.into_iter().map(NodeId).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineStrategy {
    Tt,
    Dt,
}

#[derive(Debug, Clone)]
pub struct RefineConfig {
    /// Transmission rates; one tree is trained per rate.
    pub rates: Vec<f64>,
    pub strategy: RefineStrategy,
    /// Fraction of the population used as positive training labels.
    pub train_frac: f64,
    pub train_runs: usize,
    pub seed_count: usize,
    pub horizon: u32,
    pub eps0: f64,
    pub tree: TreeConfig,
    pub long_threshold: u32,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    /// S'': members of S' predicted positive by every per-rate tree.
    pub refined: Vec<NodeId>,
    /// Per-rate count of S' members that rate's tree accepted.
    pub per_rate_positive: Vec<usize>,
    /// True when the intersection came out empty.
    pub empty: bool,
}

/// Refine a criteria-selected surrogate set S' with one decision tree per
/// transmission rate, keeping the nodes every tree accepts.
pub fn refine_surrogates(
    net: &ContactNetwork,
    s_prime: &[NodeId],
    base_model: &DiseaseModel,
    cfg: &RefineConfig,
) -> Result<RefineOutcome, SurrogateError> {
    if cfg.rates.is_empty() {
        return Err(SurrogateError::InvalidParameter("no rates given".into()));
    }
    if !(cfg.train_frac > 0.0 && cfg.train_frac <= 1.0) {
        return Err(SurrogateError::InvalidParameter(format!(
            "train_frac {} outside (0,1]",
            cfg.train_frac
        )));
    }
    let n = net.node_count();
    let k_train = ((cfg.train_frac * n as f64).round() as usize).clamp(1, n);
    let features = extract_features(net, cfg.long_threshold);

    let per_rate: Vec<Result<Vec<bool>, SurrogateError>> =
        par::map_indexed(cfg.rates.len(), |ri| {
            let model = base_model.with_beta(cfg.rates[ri])?;
            let ens = run_ensemble(
                net,
                &model,
                &SimulationConfig {
                    seeds: SeedSpec::Count(cfg.seed_count),
                    horizon: cfg.horizon,
                    rng_seed: derive_seed(cfg.master_seed, &format!("refine/{ri}/train")),
                },
                cfg.train_runs,
            )?;
            let positives = match cfg.strategy {
                RefineStrategy::Tt => {
                    select_tt(&ens.dendrograms, k_train, cfg.eps0, Scoring::TreeDepth)?
                }
                RefineStrategy::Dt => {
                    select_dt(&ens.dendrograms, k_train, cfg.eps0, DtThreshold::HitRate)?
                }
            };
            // Negatives: a fresh uniform sample of the same size with the
            // positives excluded, so labels stay well defined.
            let mut is_positive = vec![false; n];
            for v in &positives.members {
                is_positive[v.index()] = true;
            }
            let mut rng = crate::rng::stream_rng(
                derive_seed(cfg.master_seed, &format!("refine/{ri}/negatives")),
                0,
            );
            let mut negatives: Vec<NodeId> = Vec::with_capacity(positives.len());
            let mut tries = 0usize;
            while negatives.len() < positives.len() && tries < 100 * n {
                use rand::Rng;
                let v = NodeId(rng.random_range(0..n as u32));
                if !is_positive[v.index()] {
                    is_positive[v.index()] = true; // also bars re-drawing
                    negatives.push(v);
                }
                tries += 1;
            }
            let mut x = Vec::with_capacity(positives.len() + negatives.len());
            let mut y = Vec::with_capacity(x.capacity());
            for v in &positives.members {
                x.push(features[v.index()]);
                y.push(true);
            }
            for v in &negatives {
                x.push(features[v.index()]);
                y.push(false);
            }
            let tree = train_tree(&x, &y, &cfg.tree)?;
            Ok(s_prime
                .iter()
                .map(|v| tree.predict(&features[v.index()]))
                .collect())
        });

    let mut keep = vec![true; s_prime.len()];
    let mut per_rate_positive = Vec::with_capacity(cfg.rates.len());
    for result in per_rate {
        let accepted = result?;
        per_rate_positive.push(accepted.iter().filter(|&&a| a).count());
        for (k, a) in keep.iter_mut().zip(&accepted) {
            *k &= a;
        }
    }
    let refined: Vec<NodeId> = s_prime
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(&v, _)| v)
        .collect();
    let empty = refined.is_empty();
    Ok(RefineOutcome {
        refined,
        per_rate_positive,
        empty,
    })
}

/// The six information tiers compared in the lead-time table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierStrategy {
    /// Empirical distributions of demographic features.
    DistrDemo,
    /// Empirical distributions of interaction features.
    DistrInter,
    /// Decision tree on demographic features.
    TreeDemo,
    /// Decision tree on interaction features.
    TreeInter,
    /// Decision tree on all 16 features.
    TreeDemoInter,
    /// Dominator-tree heuristic on the known network (most informed).
    DomTree,
}

impl TierStrategy {
    pub const ALL: [TierStrategy; 6] = [
        TierStrategy::DistrDemo,
        TierStrategy::DistrInter,
        TierStrategy::TreeDemo,
        TierStrategy::TreeInter,
        TierStrategy::TreeDemoInter,
        TierStrategy::DomTree,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            TierStrategy::DistrDemo => "distr-demo",
            TierStrategy::DistrInter => "distr-inter",
            TierStrategy::TreeDemo => "tree-demo",
            TierStrategy::TreeInter => "tree-inter",
            TierStrategy::TreeDemoInter => "tree-demo+inter",
            TierStrategy::DomTree => "domtree",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TierRow {
    pub tier: TierStrategy,
    pub size: usize,
    pub mean_lead: f64,
    pub var_lead: f64,
    pub fit_failures: usize,
}

#[derive(Debug, Clone)]
pub struct TierConfig {
    pub train_runs: usize,
    pub eval_runs: usize,
    pub seed_count: usize,
    pub horizon: u32,
    pub eps0: f64,
    pub tree: TreeConfig,
    pub long_threshold: u32,
    pub master_seed: u64,
}

/// Lead-time comparison of the six information tiers at a common sensor
/// size `k`, all evaluated against the same random reference set on the
/// same evaluation ensemble.
pub fn compare_information_tiers(
    net: &ContactNetwork,
    model: &DiseaseModel,
    k: usize,
    cfg: &TierConfig,
) -> Result<Vec<TierRow>, SurrogateError> {
    let n = net.node_count();
    if k == 0 || k > n {
        return Err(SurrogateError::InvalidParameter(format!(
            "k {k} outside 1..={n}"
        )));
    }
    let features = extract_features(net, cfg.long_threshold);

    let train = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: SeedSpec::Count(cfg.seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "tiers/train"),
        },
        cfg.train_runs,
    )?;
    let dt_set = select_dt(&train.dendrograms, k, cfg.eps0, DtThreshold::HitRate)?;
    let negatives = select_random(net, k, derive_seed(cfg.master_seed, "tiers/negatives"))?;

    let tree_tier = |allowed: &[usize]| -> Result<Vec<NodeId>, SurrogateError> {
        let mut x = Vec::with_capacity(dt_set.len() + negatives.len());
        let mut y = Vec::with_capacity(x.capacity());
        for v in &dt_set.members {
            x.push(features[v.index()]);
            y.push(true);
        }
        for v in &negatives.members {
            if !dt_set.members.contains(v) {
                x.push(features[v.index()]);
                y.push(false);
            }
        }
        let tree = train_tree(
            &x,
            &y,
            &TreeConfig {
                features: Some(allowed.to_vec()),
                ..cfg.tree.clone()
            },
        )?;
        let scores: Vec<f64> = features.iter().map(|f| tree.predict_proba(f)).collect();
        Ok(top_k_by_score(&scores, k))
    };
    let distr_tier = |candidates: &[usize]| -> Vec<NodeId> {
        let top = top_tv_features(
            &features,
            &dt_set.members,
            &negatives.members,
            candidates,
            3,
            16,
        );
        let scores = distribution_scores(&features, &dt_set.members, &negatives.members, &top);
        top_k_by_score(&scores, k)
    };

    let all_features: Vec<usize> = (0..FEATURE_COUNT).collect();
    let sets: Vec<(TierStrategy, Vec<NodeId>)> = vec![
        (TierStrategy::DistrDemo, distr_tier(&feature::DEMOGRAPHIC)),
        (TierStrategy::DistrInter, distr_tier(&feature::INTERACTION)),
        (TierStrategy::TreeDemo, tree_tier(&feature::DEMOGRAPHIC)?),
        (TierStrategy::TreeInter, tree_tier(&feature::INTERACTION)?),
        (TierStrategy::TreeDemoInter, tree_tier(&all_features)?),
        (TierStrategy::DomTree, dt_set.members.clone()),
    ];

    let eval = run_ensemble(
        net,
        model,
        &SimulationConfig {
            seeds: SeedSpec::Count(cfg.seed_count),
            horizon: cfg.horizon,
            rng_seed: derive_seed(cfg.master_seed, "tiers/eval"),
        },
        cfg.eval_runs,
    )?;
    let reference = select_random(net, k, derive_seed(cfg.master_seed, "tiers/reference"))?;

    Ok(sets
        .into_iter()
        .map(|(tier, members)| {
            let stats: LeadStats = evaluate_leads(&eval.dendrograms, &members, &reference.members);
            TierRow {
                tier,
                size: members.len(),
                mean_lead: stats.mean,
                var_lead: stats.variance,
                fit_failures: stats.fit_failures,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ContactEdge, ContactNetwork, Demographics, Gender};

    fn net_with_edges(
        demos: Vec<Demographics>,
        edges: Vec<(u32, u32, u32, MeetingType)>,
    ) -> ContactNetwork {
        let edges = edges
            .into_iter()
            .map(|(u, v, duration, meeting_type)| ContactEdge {
                u: NodeId(u),
                v: NodeId(v),
                duration,
                meeting_type,
            })
            .collect();
        ContactNetwork::new(demos, edges)
    }

    fn demo(age: u32, income: u32) -> Demographics {
        Demographics {
            age,
            gender: Gender::Female,
            income,
        }
    }

    #[test]
    fn features_hand_computed() {
        // Node 0: meetings of 25000s (work) and 1000s (shop).
        let net = net_with_edges(
            vec![demo(30, 1000), demo(10, 0), demo(40, 500)],
            vec![
                (0, 1, 25_000, MeetingType::Work),
                (0, 2, 1_000, MeetingType::Shop),
            ],
        );
        let features = extract_features(&net, 20_000);
        let f = &features[0].0;
        assert_eq!(f[feature::AGE], 30.0);
        assert_eq!(f[feature::MEETING_COUNT], 2.0);
        assert_eq!(f[feature::TOTAL_DURATION], 26_000.0);
        assert_eq!(f[feature::LONG_MEETING_COUNT], 1.0);
        assert_eq!(f[feature::TYPE_COUNT_BASE + 1], 1.0); // one work meeting
        assert_eq!(f[feature::TYPE_PCT_BASE + 1], 50.0);
        assert_eq!(f[feature::TYPE_PCT_BASE + 2], 50.0); // shop
        assert_eq!(f[feature::TYPE_PCT_BASE], 0.0); // no home meetings
    }

    #[test]
    fn isolated_node_has_zero_interaction_features() {
        let net = net_with_edges(
            vec![demo(25, 100), demo(30, 200), demo(35, 300)],
            vec![(0, 1, 500, MeetingType::Other)],
        );
        let features = extract_features(&net, 20_000);
        let f = &features[2].0;
        for idx in feature::INTERACTION {
            assert_eq!(f[idx], 0.0, "feature {idx} of isolated node");
        }
    }

    #[test]
    fn zero_threshold_makes_every_meeting_long() {
        let net = net_with_edges(
            vec![demo(25, 100), demo(30, 200)],
            vec![
                (0, 1, 1, MeetingType::Other),
                (0, 1, 9999, MeetingType::Home),
            ],
        );
        let features = extract_features(&net, 0);
        assert_eq!(
            features[0].0[feature::LONG_MEETING_COUNT],
            features[0].0[feature::MEETING_COUNT]
        );
    }

    #[test]
    fn percentages_sum_to_at_most_hundred() {
        let net = crate::graph::generate_citylike(500, 12.0, 3).unwrap();
        for f in extract_features(&net, 20_000) {
            let sum: f64 = (0..5).map(|t| f.0[feature::TYPE_PCT_BASE + t]).sum();
            assert!((0.0..=100.0 + 1e-9).contains(&sum));
        }
    }

    #[test]
    fn features_are_invariant_to_edge_order() {
        let demos = vec![demo(25, 100), demo(30, 200), demo(35, 300)];
        let edges = vec![
            (0, 1, 500, MeetingType::Other),
            (0, 2, 25_000, MeetingType::Work),
            (1, 2, 100, MeetingType::Shop),
        ];
        let mut reversed = edges.clone();
        reversed.reverse();
        let a = extract_features(&net_with_edges(demos.clone(), edges), 20_000);
        let b = extract_features(&net_with_edges(demos, reversed), 20_000);
        assert_eq!(a, b);
    }

    #[test]
    fn criteria_conjunction_and_edge_cases() {
        let net = net_with_edges(
            vec![demo(10, 0), demo(50, 900), demo(15, 0)],
            vec![
                // Node 0: all meetings long school.
                (0, 1, 30_000, MeetingType::School),
                (0, 1, 25_000, MeetingType::School),
                // Node 2: short shop meeting only.
                (2, 1, 100, MeetingType::Shop),
            ],
        );
        let features = extract_features(&net, 20_000);
        let got = apply_criteria(&features, &SurrogateCriteria::defaults());
        assert_eq!(got, vec![NodeId(0)]);

        // Impossible criteria select nothing.
        let nothing = SurrogateCriteria {
            age_range: (121, 125),
            ..SurrogateCriteria::defaults()
        };
        assert!(apply_criteria(&features, &nothing).is_empty());

        // Single qualifying node in a single-node-net-like setting.
        let solo = apply_criteria(
            &features[..1],
            &SurrogateCriteria::defaults(),
        );
        assert_eq!(solo, vec![NodeId(0)]);
    }

    #[test]
    fn relaxing_criteria_never_shrinks_the_selection() {
        let net = crate::graph::generate_citylike(800, 12.0, 7).unwrap();
        let features = extract_features(&net, 20_000);
        let strict = SurrogateCriteria::defaults();
        let relaxed = SurrogateCriteria {
            age_range: (3, 25),
            long_meeting_fraction_min: 0.5,
            required_type_fraction_min: 0.5,
            ..strict.clone()
        };
        let s_strict = apply_criteria(&features, &strict);
        let s_relaxed = apply_criteria(&features, &relaxed);
        assert!(s_strict.len() <= s_relaxed.len());
        let relaxed_set: std::collections::HashSet<_> = s_relaxed.iter().collect();
        assert!(s_strict.iter().all(|v| relaxed_set.contains(v)));
    }

    #[test]
    fn criteria_kv_round_trip_and_validation() {
        let text = "age_min=5\nage_max=20\nlong_fraction_min=0.8\ntypes=2,5\ntype_fraction_min=0.8\n";
        let parsed = SurrogateCriteria::parse_kv(text).unwrap();
        assert_eq!(parsed, SurrogateCriteria::defaults());
        assert!(SurrogateCriteria::parse_kv("age_min=30\nage_max=10\n").is_err());
        assert!(SurrogateCriteria::parse_kv("types=6\n").is_err());
        assert!(SurrogateCriteria::parse_kv("bogus=1\n").is_err());
    }

    #[test]
    fn tv_distance_separates_disjoint_distributions() {
        let mut features = Vec::new();
        for i in 0..40 {
            let mut f = [0.0; FEATURE_COUNT];
            f[feature::AGE] = if i < 20 { 10.0 } else { 60.0 };
            features.push(FeatureVector(f));
        }
        let young: Vec<NodeId> = (0..20).map(NodeId).collect();
        let old: Vec<NodeId> = (20..40).map(NodeId).collect();
        let tv = feature_tv_distance(&features, &young, &old, feature::AGE, 8);
        assert!((tv - 1.0).abs() < 1e-12);
        let same = feature_tv_distance(&features, &young, &young, feature::AGE, 8);
        assert_eq!(same, 0.0);
    }
}
