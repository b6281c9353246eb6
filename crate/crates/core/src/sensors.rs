//! Sensor-set selection strategies and the coverage functional f(S).
//!
//! All strategies produce a [`SensorSet`]: an ordered node list with its
//! provenance and, when dendrograms are available, the estimated
//! probability that at least one member gets infected in an outbreak.
//! Selection shortfalls (fewer surviving candidates than requested, or an
//! unattainable coverage target) are reported in the result rather than as
//! errors; hard precondition violations are errors.

use crate::domtree;
use crate::epidemic::Dendrogram;
use crate::graph::{ContactNetwork, NodeId};
use crate::par;
use crate::rng::stream_rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SensorError {
    #[error("k must be >= 1")]
    ZeroK,
    #[error("k ({k}) exceeds population ({n})")]
    KTooLarge { k: usize, n: usize },
    #[error("need at least one dendrogram")]
    NoDendrograms,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sensor file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An ordered sensor node list with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSet {
    /// Selected nodes, in selection order, no duplicates.
    pub members: Vec<NodeId>,
    /// Strategy tag plus parameters, e.g. `tt,k=100 eps0=0.1`.
    pub strategy: String,
    /// Estimated f(S) over the training dendrograms, when available.
    pub coverage: Option<f64>,
    /// Mean t_inf of the members, for strategies that rank by it.
    pub mean_score: Option<f64>,
    /// Requested size.
    pub target_k: usize,
    /// True when fewer than `target_k` candidates survived, or a coverage
    /// target could not be met.
    pub shortfall: bool,
}

impl SensorSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Serialized form: `strategy,param-string` header then one node id
    /// per line.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.strategy);
        out.push('\n');
        for v in &self.members {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    pub fn write_file(&self, path: &Path) -> Result<(), SensorError> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<SensorSet, SensorError> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let strategy = lines
            .next()
            .ok_or_else(|| SensorError::Format("empty sensor file".into()))?
            .to_string();
        if !strategy.contains(',') {
            return Err(SensorError::Format(
                "header must be `strategy,param-string`".into(),
            ));
        }
        let mut members = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let id: u32 = line
                .parse()
                .map_err(|_| SensorError::Format(format!("bad node id `{line}`")))?;
            members.push(NodeId(id));
        }
        let k = members.len();
        Ok(SensorSet {
            members,
            strategy,
            coverage: None,
            mean_score: None,
            target_k: k,
            shortfall: false,
        })
    }
}

/// Per-node infection statistics across an ensemble of dendrograms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeScore {
    pub node: NodeId,
    /// Expected infection time: mean depth (or calendar day) over the
    /// dendrograms in which the node was infected.
    pub t_inf: f64,
    /// Number of dendrograms in which the node was infected.
    pub hit_count: u32,
}

/// What t_inf measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scoring {
    /// Depth in each transmission tree (the stated algorithm).
    TreeDepth,
    /// Calendar infection day (alternative reading of expected infection
    /// time).
    CalendarDay,
    /// Depth in each dendrogram's dominator tree.
    DominatorDepth,
}

/// Aggregate (sum of scores, hit count) per node over all dendrograms.
///
/// Parallelized by dendrogram with an exact integer merge, so parallel and
/// sequential runs agree bit for bit.
pub fn score_nodes(dens: &[Dendrogram], scoring: Scoring) -> Vec<NodeScore> {
    assert!(!dens.is_empty(), "need at least one dendrogram");
    let n = dens[0].node_count();
    let tallies = par::map_indexed(dens.len(), |i| {
        let den = &dens[i];
        let values: Vec<u32> = match scoring {
            Scoring::TreeDepth => den.depths(),
            Scoring::DominatorDepth => domtree::dominator_depths(den),
            Scoring::CalendarDay => (0..n as u32)
                .map(|v| den.infection_day(NodeId(v)).unwrap_or(u32::MAX))
                .collect(),
        };
        values
    });
    let mut sum = vec![0u64; n];
    let mut hits = vec![0u32; n];
    for values in &tallies {
        for (v, &val) in values.iter().enumerate() {
            if val != u32::MAX {
                sum[v] += u64::from(val);
                hits[v] += 1;
            }
        }
    }
    (0..n)
        .map(|v| NodeScore {
            node: NodeId(v as u32),
            t_inf: if hits[v] > 0 {
                sum[v] as f64 / f64::from(hits[v])
            } else {
                f64::INFINITY
            },
            hit_count: hits[v],
        })
        .collect()
}

/// Empirical f(S): the fraction of dendrograms in which at least one
/// member of `members` gets infected (seeds count as infected).
pub fn estimate_coverage(members: &[NodeId], dens: &[Dendrogram]) -> f64 {
    assert!(!dens.is_empty(), "need at least one dendrogram");
    if members.is_empty() {
        return 0.0;
    }
    let hit = dens
        .iter()
        .filter(|den| members.iter().any(|&v| den.is_infected(v)))
        .count();
    hit as f64 / dens.len() as f64
}

/// Ascending t_inf with deterministic tie-breaks: higher hit count first,
/// then lower node id.
fn rank_order(scores: &mut Vec<NodeScore>) {
    scores.sort_unstable_by(|a, b| {
        a.t_inf
            .total_cmp(&b.t_inf)
            .then(b.hit_count.cmp(&a.hit_count))
            .then(a.node.cmp(&b.node))
    });
}

fn ranked_set(
    mut candidates: Vec<NodeScore>,
    k: usize,
    dens: &[Dendrogram],
    strategy: String,
) -> SensorSet {
    rank_order(&mut candidates);
    candidates.truncate(k);
    let members: Vec<NodeId> = candidates.iter().map(|s| s.node).collect();
    let mean_score = if members.is_empty() {
        None
    } else {
        Some(candidates.iter().map(|s| s.t_inf).sum::<f64>() / members.len() as f64)
    };
    let coverage = Some(estimate_coverage(&members, dens));
    let shortfall = members.len() < k;
    SensorSet {
        members,
        strategy,
        coverage,
        mean_score,
        target_k: k,
        shortfall,
    }
}

/// Transmission-tree sensors: rank infected nodes by mean dendrogram depth
/// (or calendar day), discard those infected in fewer than `eps0` of the
/// runs, take the first `k`.
pub fn select_tt(
    dens: &[Dendrogram],
    k: usize,
    eps0: f64,
    scoring: Scoring,
) -> Result<SensorSet, SensorError> {
    if k == 0 {
        return Err(SensorError::ZeroK);
    }
    if dens.is_empty() {
        return Err(SensorError::NoDendrograms);
    }
    if !(0.0..=1.0).contains(&eps0) {
        return Err(SensorError::InvalidParameter(format!(
            "eps0 must be in [0,1], got {eps0}"
        )));
    }
    let runs = dens.len() as f64;
    let candidates: Vec<NodeScore> = score_nodes(dens, scoring)
        .into_iter()
        .filter(|s| s.hit_count > 0 && f64::from(s.hit_count) / runs >= eps0)
        .collect();
    let tag = match scoring {
        Scoring::CalendarDay => "tt-day",
        _ => "tt",
    };
    Ok(ranked_set(
        candidates,
        k,
        dens,
        format!("{tag},k={k} eps0={eps0}"),
    ))
}

/// How the DT heuristic applies its epsilon-0 threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtThreshold {
    /// Discard nodes infected in fewer than eps0 of the runs (consistent
    /// with the TT heuristic and the rationale for the f(S) constraint).
    HitRate,
    /// Literal reading: discard nodes whose average dominator-tree depth
    /// is smaller than eps0.
    MinDepth,
}

/// Dominator-tree sensors: as [`select_tt`], but t_inf is the node's mean
/// depth in the per-dendrogram dominator trees.
pub fn select_dt(
    dens: &[Dendrogram],
    k: usize,
    eps0: f64,
    threshold: DtThreshold,
) -> Result<SensorSet, SensorError> {
    if k == 0 {
        return Err(SensorError::ZeroK);
    }
    if dens.is_empty() {
        return Err(SensorError::NoDendrograms);
    }
    let runs = dens.len() as f64;
    let candidates: Vec<NodeScore> = score_nodes(dens, Scoring::DominatorDepth)
        .into_iter()
        .filter(|s| {
            s.hit_count > 0
                && match threshold {
                    DtThreshold::HitRate => f64::from(s.hit_count) / runs >= eps0,
                    DtThreshold::MinDepth => s.t_inf >= eps0,
                }
        })
        .collect();
    Ok(ranked_set(
        candidates,
        k,
        dens,
        format!("dt,k={k} eps0={eps0}"),
    ))
}

/// Greedy coverage-first selection: add nodes in ascending t_inf order
/// until f(S) reaches `eps`, then keep adding in the same order up to `k`.
/// If `eps` is unattainable even with every candidate, the result carries
/// the achieved coverage and the shortfall flag.
pub fn select_greedy_mait(
    dens: &[Dendrogram],
    k: usize,
    eps: f64,
) -> Result<SensorSet, SensorError> {
    if k == 0 {
        return Err(SensorError::ZeroK);
    }
    if dens.is_empty() {
        return Err(SensorError::NoDendrograms);
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(SensorError::InvalidParameter(format!(
            "eps must be in [0,1], got {eps}"
        )));
    }
    let mut candidates: Vec<NodeScore> = score_nodes(dens, Scoring::TreeDepth)
        .into_iter()
        .filter(|s| s.hit_count > 0)
        .collect();
    rank_order(&mut candidates);

    let mut covered = vec![false; dens.len()];
    let mut covered_count = 0usize;
    let mut members: Vec<NodeId> = Vec::new();
    let mut sum_score = 0.0;
    let mut reached = eps == 0.0;
    for s in &candidates {
        let coverage = covered_count as f64 / dens.len() as f64;
        if members.len() >= k && (reached || coverage >= eps) {
            break;
        }
        if members.len() >= k && !reached {
            // Past k but still short of eps: eps has priority over size
            // only when unreachable; stop here and report the shortfall.
            break;
        }
        members.push(s.node);
        sum_score += s.t_inf;
        for (i, den) in dens.iter().enumerate() {
            if !covered[i] && den.is_infected(s.node) {
                covered[i] = true;
                covered_count += 1;
            }
        }
        if covered_count as f64 / dens.len() as f64 >= eps {
            reached = true;
        }
    }
    let coverage = covered_count as f64 / dens.len() as f64;
    let shortfall = !reached || members.len() < k;
    let mean_score = if members.is_empty() {
        None
    } else {
        Some(sum_score / members.len() as f64)
    };
    Ok(SensorSet {
        members,
        strategy: format!("greedy-mait,k={k} eps={eps}"),
        coverage: Some(coverage),
        mean_score,
        target_k: k,
        shortfall,
    })
}

/// Strategy tag plus parameters, for dispatch from sweeps and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionStrategy {
    Tt { eps0: f64, scoring: Scoring },
    Dt { eps0: f64, threshold: DtThreshold },
    TopKDegree { sample_size: usize, nominations: usize },
    WeightedDegree { sample_size: usize, nominations: usize },
    Random,
    GreedyMait { eps: f64 },
}

impl SelectionStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            SelectionStrategy::Tt { .. } => "tt",
            SelectionStrategy::Dt { .. } => "dt",
            SelectionStrategy::TopKDegree { .. } => "topk",
            SelectionStrategy::WeightedDegree { .. } => "wd",
            SelectionStrategy::Random => "random",
            SelectionStrategy::GreedyMait { .. } => "greedy-mait",
        }
    }

    /// Whether selection consumes training dendrograms.
    pub fn needs_dendrograms(&self) -> bool {
        matches!(
            self,
            SelectionStrategy::Tt { .. }
                | SelectionStrategy::Dt { .. }
                | SelectionStrategy::GreedyMait { .. }
        )
    }
}

/// Run the given strategy. `dens` are the training dendrograms (may be
/// empty for strategies that do not use them); `rng_seed` feeds the
/// sampling-based strategies.
pub fn select_with(
    strategy: &SelectionStrategy,
    net: &ContactNetwork,
    dens: &[Dendrogram],
    k: usize,
    rng_seed: u64,
) -> Result<SensorSet, SensorError> {
    match *strategy {
        SelectionStrategy::Tt { eps0, scoring } => select_tt(dens, k, eps0, scoring),
        SelectionStrategy::Dt { eps0, threshold } => select_dt(dens, k, eps0, threshold),
        SelectionStrategy::TopKDegree {
            sample_size,
            nominations,
        } => select_topk_degree(net, k, sample_size, nominations, rng_seed),
        SelectionStrategy::WeightedDegree {
            sample_size,
            nominations,
        } => select_weighted_degree(net, k, sample_size, nominations, rng_seed),
        SelectionStrategy::Random => select_random(net, k, rng_seed),
        SelectionStrategy::GreedyMait { eps } => select_greedy_mait(dens, k, eps),
    }
}

/// Friend-of-friend nomination shared by the degree and weighted-degree
/// baselines: sample respondents uniformly, take each respondent's
/// `nominations` best-scoring neighbors, and keep drawing respondents
/// until `k` distinct sensors are collected or everyone has responded.
fn select_nominated(
    net: &ContactNetwork,
    k: usize,
    sample_size: usize,
    nominations: usize,
    rng: &mut ChaCha8Rng,
    score: impl Fn(NodeId) -> u64,
    strategy: String,
) -> Result<SensorSet, SensorError> {
    let n = net.node_count();
    if k == 0 {
        return Err(SensorError::ZeroK);
    }
    if k > n {
        return Err(SensorError::KTooLarge { k, n });
    }
    if sample_size == 0 || nominations == 0 {
        return Err(SensorError::InvalidParameter(
            "sample_size and nominations must be >= 1".into(),
        ));
    }

    // Respondents in shuffled order; the first `sample_size` form the
    // nominal sample and the rest are the top-up pool. Nominations are
    // kept in insertion order, so stopping at k distinct sensors equals
    // taking the full sample's union and truncating it.
    let mut respondents: Vec<u32> = (0..n as u32).collect();
    for i in (1..respondents.len()).rev() {
        respondents.swap(i, rng.random_range(0..=i));
    }

    let mut selected: Vec<NodeId> = Vec::with_capacity(k);
    let mut is_selected = vec![false; n];
    for &r in &respondents {
        if selected.len() >= k {
            break;
        }
        let mut neighbors: Vec<NodeId> = net
            .neighbors(NodeId(r))
            .iter()
            .map(|&(v, _)| v)
            .collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        neighbors.sort_by(|&a, &b| score(b).cmp(&score(a)).then(a.cmp(&b)));
        for &v in neighbors.iter().take(nominations) {
            if !is_selected[v.index()] {
                is_selected[v.index()] = true;
                selected.push(v);
                if selected.len() >= k {
                    break;
                }
            }
        }
    }
    let shortfall = selected.len() < k;
    Ok(SensorSet {
        members: selected,
        strategy,
        coverage: None,
        mean_score: None,
        target_k: k,
        shortfall,
    })
}

/// Top-K high-degree sensors: each sampled respondent nominates its
/// `nominations` highest-degree neighbors.
pub fn select_topk_degree(
    net: &ContactNetwork,
    k: usize,
    sample_size: usize,
    nominations: usize,
    rng_seed: u64,
) -> Result<SensorSet, SensorError> {
    let mut rng = stream_rng(rng_seed, 0);
    select_nominated(
        net,
        k,
        sample_size,
        nominations,
        &mut rng,
        |v| net.degree(v) as u64,
        format!("topk,k={k} sample={sample_size} K={nominations}"),
    )
}

/// Weighted-degree sensors: nominations go to the neighbors with the
/// largest total contact duration instead of the largest degree.
pub fn select_weighted_degree(
    net: &ContactNetwork,
    k: usize,
    sample_size: usize,
    nominations: usize,
    rng_seed: u64,
) -> Result<SensorSet, SensorError> {
    let mut rng = stream_rng(rng_seed, 0);
    select_nominated(
        net,
        k,
        sample_size,
        nominations,
        &mut rng,
        |v| net.weighted_degree(v),
        format!("wd,k={k} sample={sample_size} K={nominations}"),
    )
}

/// Uniform random sensor set without replacement.
pub fn select_random(
    net: &ContactNetwork,
    k: usize,
    rng_seed: u64,
) -> Result<SensorSet, SensorError> {
    let n = net.node_count();
    if k == 0 {
        return Err(SensorError::ZeroK);
    }
    if k > n {
        return Err(SensorError::KTooLarge { k, n });
    }
    let mut rng = stream_rng(rng_seed, 0);
    let mut members: Vec<NodeId> = rand::seq::index::sample(&mut rng, n, k)
        .into_iter()
        .map(|i| NodeId(i as u32))
        .collect();
    members.sort_unstable();
    Ok(SensorSet {
        members,
        strategy: format!("random,k={k}"),
        coverage: None,
        mean_score: None,
        target_k: k,
        shortfall: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, ContactEdge, ContactNetwork, Demographics, Gender, MeetingType};

    fn den(n: usize, seeds: &[u32], events: &[(u32, u32, u32)]) -> Dendrogram {
        let seeds: Vec<NodeId> = seeds.iter().map(|&s| NodeId(s)).collect();
        let events: Vec<(NodeId, u32, NodeId)> = events
            .iter()
            .map(|&(v, d, p)| (NodeId(v), d, NodeId(p)))
            .collect();
        Dendrogram::from_parts(n, &seeds, &events, 20).unwrap()
    }

    #[test]
    fn coverage_counts_dendrograms_with_any_hit() {
        // Node 1 infected in 3 of 4 dendrograms; node 2 in 1.
        let dens = vec![
            den(3, &[0], &[(1, 1, 0)]),
            den(3, &[0], &[(1, 1, 0), (2, 2, 1)]),
            den(3, &[0], &[(1, 2, 0)]),
            den(3, &[0], &[]),
        ];
        assert_eq!(estimate_coverage(&[], &dens), 0.0);
        assert_eq!(estimate_coverage(&[NodeId(1)], &dens), 0.75);
        assert_eq!(estimate_coverage(&[NodeId(2)], &dens), 0.25);
        assert_eq!(estimate_coverage(&[NodeId(1), NodeId(2)], &dens), 0.75);
        // All nodes: every dendrogram has its seed infected.
        assert_eq!(
            estimate_coverage(&[NodeId(0), NodeId(1), NodeId(2)], &dens),
            1.0
        );
    }

    #[test]
    fn coverage_fraction_matches_direct_count() {
        // 1000 dendrograms, node 1 infected in exactly 730.
        let mut dens = Vec::new();
        for i in 0..1000 {
            if i < 730 {
                dens.push(den(2, &[0], &[(1, 1, 0)]));
            } else {
                dens.push(den(2, &[0], &[]));
            }
        }
        assert!((estimate_coverage(&[NodeId(1)], &dens) - 0.73).abs() < 1e-12);
    }

    #[test]
    fn tt_ranks_by_mean_depth_with_hand_computed_fixture() {
        // Three dendrograms over 4 nodes, all seeded at 0.
        //   den A: 1 at depth 1, 2 at depth 2
        //   den B: 1 at depth 1, 3 at depth 1
        //   den C: 2 at depth 1
        // Mean depths: node 0 = 0 (3 hits), node 1 = 1 (2 hits),
        // node 2 = 1.5 (2 hits), node 3 = 1 (1 hit).
        let dens = vec![
            den(4, &[0], &[(1, 1, 0), (2, 3, 1)]),
            den(4, &[0], &[(1, 2, 0), (3, 4, 0)]),
            den(4, &[0], &[(2, 1, 0)]),
        ];
        let set = select_tt(&dens, 4, 0.0, Scoring::TreeDepth).unwrap();
        // Ties at t_inf=1 broken by hit count: node 1 (2 hits) before
        // node 3 (1 hit).
        assert_eq!(
            set.members,
            vec![NodeId(0), NodeId(1), NodeId(3), NodeId(2)]
        );
        assert_eq!(set.coverage, Some(1.0));
        assert!(!set.shortfall);
    }

    #[test]
    fn tt_threshold_excludes_rarely_infected_nodes() {
        // Node 1: infected once in 100 runs at depth 1. Node 2: infected in
        // every run at depth 2. With eps0 = 0.05 node 1 must be excluded
        // despite its smaller t_inf.
        let mut dens = Vec::new();
        for i in 0..100 {
            if i == 0 {
                dens.push(den(3, &[0], &[(1, 1, 0), (2, 2, 1)]));
            } else {
                dens.push(den(3, &[0], &[(2, 1, 0)]));
            }
        }
        let set = select_tt(&dens, 2, 0.05, Scoring::TreeDepth).unwrap();
        assert_eq!(set.members, vec![NodeId(0), NodeId(2)]);
        let unfiltered = select_tt(&dens, 3, 0.0, Scoring::TreeDepth).unwrap();
        assert!(unfiltered.members.contains(&NodeId(1)));
    }

    #[test]
    fn tt_reports_shortfall() {
        let dens = vec![den(5, &[0], &[(1, 1, 0)])];
        let set = select_tt(&dens, 4, 0.5, Scoring::TreeDepth).unwrap();
        assert_eq!(set.members, vec![NodeId(0), NodeId(1)]);
        assert!(set.shortfall);
        assert_eq!(set.target_k, 4);
    }

    #[test]
    fn dt_equals_tt_on_forest_dendrograms() {
        let dens = vec![
            den(6, &[0], &[(1, 1, 0), (2, 2, 1), (4, 3, 2)]),
            den(6, &[1], &[(0, 2, 1), (3, 3, 0), (5, 4, 3)]),
            den(6, &[2], &[(5, 1, 2)]),
        ];
        let tt = select_tt(&dens, 4, 0.1, Scoring::TreeDepth).unwrap();
        let dt = select_dt(&dens, 4, 0.1, DtThreshold::HitRate).unwrap();
        assert_eq!(tt.members, dt.members);
        assert_eq!(tt.coverage, dt.coverage);
    }

    #[test]
    fn dt_rejects_zero_k() {
        let dens = vec![den(2, &[0], &[])];
        assert!(matches!(
            select_dt(&dens, 0, 0.1, DtThreshold::HitRate),
            Err(SensorError::ZeroK)
        ));
    }

    #[test]
    fn dt_min_depth_threshold_drops_shallow_nodes() {
        let dens = vec![den(3, &[0], &[(1, 1, 0), (2, 2, 1)])];
        let set = select_dt(&dens, 3, 1.5, DtThreshold::MinDepth).unwrap();
        // Only node 2 has average dominator depth >= 1.5.
        assert_eq!(set.members, vec![NodeId(2)]);
        assert!(set.shortfall);
    }

    #[test]
    fn greedy_mait_reaches_eps_then_fills_to_k() {
        // Node 1 seeds every dendrogram: lowest t_inf, full coverage, so
        // eps = 0.8 is reached with that single node.
        let dens = vec![
            den(4, &[1], &[(0, 1, 1), (2, 2, 0)]),
            den(4, &[1], &[(2, 1, 1)]),
            den(4, &[1], &[(3, 1, 1)]),
        ];
        let set = select_greedy_mait(&dens, 1, 0.8).unwrap();
        assert_eq!(set.members, vec![NodeId(1)]);
        assert_eq!(set.coverage, Some(1.0));
        assert!(!set.shortfall);

        // eps=0 degenerates to the first k by t_inf.
        let tt = select_tt(&dens, 2, 0.0, Scoring::TreeDepth).unwrap();
        let greedy = select_greedy_mait(&dens, 2, 0.0).unwrap();
        assert_eq!(greedy.members, tt.members);
    }

    #[test]
    fn greedy_mait_unattainable_eps_reports_shortfall() {
        // Only nodes 0 and 1 are ever infected; dendrogram 2's population
        // is disjoint from every candidate... not possible with seeds, so
        // instead: the second dendrogram has only node 3 infected, and the
        // candidate pool covers everything; eps=1 IS attainable. Make it
        // unattainable by requesting eps=1 while restricting k... eps wins:
        // use dendrograms whose infected sets are disjoint and k=3 so all
        // candidates get added; coverage still reaches 1. For a truly
        // unattainable case, eps=1 with an empty-intersection candidate
        // filter cannot happen, so shortfall here comes from k < needed.
        let dens = vec![den(4, &[0], &[]), den(4, &[1], &[]), den(4, &[2], &[])];
        let set = select_greedy_mait(&dens, 2, 1.0).unwrap();
        assert_eq!(set.members.len(), 2);
        assert!(set.shortfall, "cannot reach f(S)=1 with k=2 disjoint hits");
        assert!((set.coverage.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    fn hand_net(n: usize, edges: &[(u32, u32, u32)]) -> ContactNetwork {
        let demo = vec![
            Demographics { age: 30, gender: Gender::Female, income: 0 };
            n
        ];
        let edges: Vec<ContactEdge> = edges
            .iter()
            .map(|&(u, v, d)| ContactEdge {
                u: NodeId(u),
                v: NodeId(v),
                duration: d,
                meeting_type: MeetingType::Other,
            })
            .collect();
        ContactNetwork::new(demo, edges)
    }

    #[test]
    fn star_leaves_nominate_the_hub() {
        // Star: node 0 is every leaf's only neighbor.
        let edges: Vec<(u32, u32, u32)> = (1..10).map(|i| (0u32, i, 100)).collect();
        let net = hand_net(10, &edges);
        for seed in 0..5 {
            let set = select_topk_degree(&net, 3, 4, 3, seed).unwrap();
            assert!(
                set.members.contains(&NodeId(0)),
                "hub missing with seed {seed}"
            );
        }
    }

    #[test]
    fn full_sample_with_large_k_selects_all_non_isolated() {
        let net = hand_net(6, &[(0, 1, 10), (1, 2, 10), (3, 4, 10)]);
        // Node 5 is isolated and can never be nominated.
        let set = select_topk_degree(&net, 5, 6, 6, 3).unwrap();
        assert_eq!(set.members.len(), 5);
        assert!(!set.members.contains(&NodeId(5)));
        assert!(!set.shortfall);
        let overfull = select_topk_degree(&net, 6, 6, 6, 3).unwrap();
        assert!(overfull.shortfall);
    }

    #[test]
    fn weighted_degree_prefers_duration_over_count() {
        // Node 1 has one million-second edge to 0; node 2 has three
        // hundred-second edges to 0. Respondent 0 must nominate node 1
        // under weighted degree (1e6 > 300) but node 2 under plain degree
        // (3 > 1). Respondents 1 and 2 can only nominate node 0.
        let net = hand_net(3, &[(0, 1, 1_000_000), (0, 2, 100), (0, 2, 100), (0, 2, 100)]);
        let mut wd_picked_1 = false;
        let mut topk_picked_2 = false;
        for seed in 0..10 {
            let wd = select_weighted_degree(&net, 1, 3, 1, seed).unwrap();
            let topk = select_topk_degree(&net, 1, 3, 1, seed).unwrap();
            assert_ne!(wd.members[0], NodeId(2), "wd must never nominate node 2");
            assert_ne!(topk.members[0], NodeId(1), "topk must never nominate node 1");
            wd_picked_1 |= wd.members[0] == NodeId(1);
            topk_picked_2 |= topk.members[0] == NodeId(2);
        }
        assert!(wd_picked_1 && topk_picked_2);
    }

    #[test]
    fn equal_durations_make_wd_equal_topk() {
        let net = complete(12, 777, MeetingType::Other);
        let a = select_topk_degree(&net, 6, 4, 3, 42).unwrap();
        let b = select_weighted_degree(&net, 6, 4, 3, 42).unwrap();
        assert_eq!(a.members, b.members);
    }

    #[test]
    fn random_selection_bounds_and_determinism() {
        let net = complete(20, 10, MeetingType::Other);
        assert!(matches!(
            select_random(&net, 0, 1),
            Err(SensorError::ZeroK)
        ));
        assert!(matches!(
            select_random(&net, 21, 1),
            Err(SensorError::KTooLarge { .. })
        ));
        let all = select_random(&net, 20, 1).unwrap();
        assert_eq!(all.members.len(), 20);
        let a = select_random(&net, 5, 9).unwrap();
        let b = select_random(&net, 5, 9).unwrap();
        assert_eq!(a.members, b.members);
    }

    #[test]
    fn coverage_is_monotone_and_submodular_on_fixtures() {
        let dens = vec![
            den(6, &[0], &[(1, 1, 0), (2, 2, 1)]),
            den(6, &[3], &[(4, 1, 3)]),
            den(6, &[1], &[(5, 1, 1), (2, 2, 5)]),
            den(6, &[2], &[]),
        ];
        let f = |s: &[NodeId]| estimate_coverage(s, &dens);
        let nodes: Vec<NodeId> = (0..6).map(NodeId).collect();
        // S subset of T, v not in T: monotone + diminishing returns.
        for &v in &nodes {
            let s = vec![nodes[1]];
            let t = vec![nodes[1], nodes[3], nodes[4]];
            if t.contains(&v) {
                continue;
            }
            let mut sv = s.clone();
            sv.push(v);
            let mut tv = t.clone();
            tv.push(v);
            assert!(f(&sv) >= f(&s) - 1e-12);
            assert!(f(&tv) >= f(&t) - 1e-12);
            assert!(f(&sv) - f(&s) >= f(&tv) - f(&t) - 1e-12);
        }
    }

    #[test]
    fn sensor_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sensors.txt");
        let set = SensorSet {
            members: vec![NodeId(4), NodeId(1), NodeId(9)],
            strategy: "tt,k=3 eps0=0.1".into(),
            coverage: Some(0.9),
            mean_score: Some(1.5),
            target_k: 3,
            shortfall: false,
        };
        set.write_file(&path).unwrap();
        let back = SensorSet::read_file(&path).unwrap();
        assert_eq!(back.members, set.members);
        assert_eq!(back.strategy, set.strategy);
    }
}
