//! Desk-scale synthetic contact networks.
//!
//! Two regimes matter for sensor selection: star-like topologies where a
//! handful of hubs carry most connectivity, and dense city-like topologies
//! where degrees are concentrated and high-degree nodes spread across the
//! whole graph. Both generators are pure functions of their parameters and
//! seed.

use super::{ContactEdge, ContactNetwork, Demographics, Gender, GraphError, MeetingType, NodeId};
use crate::rng::stream_rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Complete graph on `n` nodes with uniform edge attributes. Used as a
/// fixture topology for calibration runs and degree-stat identities.
pub fn complete(n: usize, duration: u32, meeting_type: MeetingType) -> ContactNetwork {
    assert!(n >= 2, "complete graph needs at least 2 nodes");
    let demographics = vec![
        Demographics {
            age: 30,
            gender: Gender::Female,
            income: 0,
        };
        n
    ];
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push(ContactEdge {
                u: NodeId(u),
                v: NodeId(v),
                duration,
                meeting_type,
            });
        }
    }
    ContactNetwork::new(demographics, edges)
}

fn sample_meeting_type(rng: &mut ChaCha8Rng, weights: &[(MeetingType, f64)]) -> MeetingType {
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    let mut x = rng.random::<f64>() * total;
    for &(ty, w) in weights {
        if x < w {
            return ty;
        }
        x -= w;
    }
    weights[weights.len() - 1].0
}

/// Preferential-attachment network with boosted hubs: small average degree,
/// very large maximum degree.
///
/// The first `max(1, hub_fraction * n)` nodes form a connected core; every
/// later node attaches two edges, each going to a uniformly chosen hub with
/// probability 0.3 and otherwise to an endpoint drawn proportionally to
/// current degree.
pub fn generate_starlike(
    n: usize,
    hub_fraction: f64,
    seed: u64,
) -> Result<ContactNetwork, GraphError> {
    if n < 10 {
        return Err(GraphError::InvalidParameters(format!(
            "starlike needs n >= 10, got {n}"
        )));
    }
    if !(hub_fraction > 0.0 && hub_fraction < 0.1) {
        return Err(GraphError::InvalidParameters(format!(
            "hub_fraction must be in (0, 0.1), got {hub_fraction}"
        )));
    }
    let mut rng = stream_rng(seed, 0);
    let hubs = ((hub_fraction * n as f64).round() as usize).max(1);

    let type_weights = [
        (MeetingType::Home, 0.25),
        (MeetingType::Work, 0.20),
        (MeetingType::Shop, 0.20),
        (MeetingType::Visit, 0.15),
        (MeetingType::School, 0.05),
        (MeetingType::Other, 0.15),
    ];
    let mut edges: Vec<ContactEdge> = Vec::with_capacity(2 * n);
    // Bag of edge endpoints; uniform draws from it are degree-proportional.
    let mut endpoint_bag: Vec<u32> = Vec::with_capacity(4 * n);
    let push_edge = |edges: &mut Vec<ContactEdge>,
                         bag: &mut Vec<u32>,
                         rng: &mut ChaCha8Rng,
                         u: u32,
                         v: u32| {
        edges.push(ContactEdge {
            u: NodeId(u),
            v: NodeId(v),
            duration: rng.random_range(500..=4000),
            meeting_type: sample_meeting_type(rng, &type_weights),
        });
        bag.push(u);
        bag.push(v);
    };

    // Core path over the hubs keeps the attachment phase connected.
    for h in 1..hubs {
        push_edge(&mut edges, &mut endpoint_bag, &mut rng, (h - 1) as u32, h as u32);
    }

    for j in hubs..n {
        let j = j as u32;
        let mut targets: Vec<u32> = Vec::with_capacity(2);
        for _ in 0..2 {
            let mut pick = u32::MAX;
            for _attempt in 0..8 {
                let candidate = if rng.random::<f64>() < 0.3 || endpoint_bag.is_empty() {
                    rng.random_range(0..hubs as u32)
                } else {
                    endpoint_bag[rng.random_range(0..endpoint_bag.len())]
                };
                if candidate != j && !targets.contains(&candidate) {
                    pick = candidate;
                    break;
                }
            }
            if pick != u32::MAX {
                targets.push(pick);
            }
        }
        if targets.is_empty() {
            // Can only happen for the very first attachment with one hub.
            targets.push(0);
        }
        for t in targets {
            push_edge(&mut edges, &mut endpoint_bag, &mut rng, t, j);
        }
    }

    let demographics = (0..n)
        .map(|_| Demographics {
            age: rng.random_range(1..=90),
            gender: if rng.random::<bool>() { Gender::Male } else { Gender::Female },
            income: rng.random_range(0..=1200) * 100,
        })
        .collect();
    Ok(ContactNetwork::new(demographics, edges))
}

/// City-like network: concentrated degree distribution with a school-age
/// cluster layer.
///
/// Every fifth node is a child (age 5-20). Children sit in school groups
/// wired with long school-type contacts and attach to two adult household
/// members; most of their meeting time is school time, which is the signal
/// the surrogate pipeline mines. A quarter of the children participate only
/// weakly in school life and pick up short errand contacts instead. Adults
/// carry the bulk of the edge budget as short mixed-type contacts paired
/// through a configuration model.
pub fn generate_citylike(
    n: usize,
    target_avg_degree: f64,
    seed: u64,
) -> Result<ContactNetwork, GraphError> {
    if n < 100 {
        return Err(GraphError::InvalidParameters(format!(
            "citylike needs n >= 100, got {n}"
        )));
    }
    if target_avg_degree < 4.0 {
        return Err(GraphError::InvalidParameters(format!(
            "target_avg_degree must be >= 4, got {target_avg_degree}"
        )));
    }
    let mut rng = stream_rng(seed, 0);

    let is_child = |i: usize| i % 5 == 0;
    let children: Vec<u32> = (0..n).filter(|&i| is_child(i)).map(|i| i as u32).collect();
    let adults: Vec<u32> = (0..n).filter(|&i| !is_child(i)).map(|i| i as u32).collect();

    let demographics: Vec<Demographics> = (0..n)
        .map(|i| {
            if is_child(i) {
                Demographics {
                    age: rng.random_range(5..=20),
                    gender: if rng.random::<bool>() { Gender::Male } else { Gender::Female },
                    income: 0,
                }
            } else {
                Demographics {
                    age: rng.random_range(21..=90),
                    gender: if rng.random::<bool>() { Gender::Male } else { Gender::Female },
                    income: rng.random_range(150..=1200) * 100,
                }
            }
        })
        .collect();

    // School participation: strong children spend nearly all contact time
    // in their groups, weak children only a little.
    let participation: Vec<f64> = (0..n)
        .map(|i| {
            if is_child(i) {
                if rng.random::<f64>() < 0.75 {
                    1.0
                } else {
                    0.45
                }
            } else {
                0.0
            }
        })
        .collect();

    let mut edges: Vec<ContactEdge> = Vec::new();

    // School groups of ~12 with overlapping secondary memberships so the
    // school layer forms one fast-burning component.
    const GROUP_SIZE: usize = 12;
    let mut shuffled = children.clone();
    shuffled.shuffle(&mut rng);
    let group_count = shuffled.len().div_ceil(GROUP_SIZE);
    let mut groups: Vec<Vec<u32>> = shuffled
        .chunks(GROUP_SIZE)
        .map(|chunk| chunk.to_vec())
        .collect();
    if group_count > 1 {
        for &c in &children {
            if rng.random::<f64>() < 0.35 {
                let g = rng.random_range(0..group_count);
                if !groups[g].contains(&c) {
                    groups[g].push(c);
                }
            }
        }
    }
    for group in &groups {
        for a in 0..group.len() {
            for b in (a + 1)..group.len() {
                let (u, v) = (group[a], group[b]);
                let p = 0.85 * participation[u as usize] * participation[v as usize];
                if rng.random::<f64>() < p {
                    edges.push(ContactEdge {
                        u: NodeId(u),
                        v: NodeId(v),
                        duration: rng.random_range(25_000..=35_000),
                        meeting_type: MeetingType::School,
                    });
                }
            }
        }
    }

    // Two household contacts per child couple the school layer to the
    // adult population.
    for &c in &children {
        for _ in 0..2 {
            let a = adults[rng.random_range(0..adults.len())];
            edges.push(ContactEdge {
                u: NodeId(c),
                v: NodeId(a),
                duration: rng.random_range(3_000..=8_000),
                meeting_type: MeetingType::Home,
            });
        }
    }

    // Remaining budget becomes short mixed contacts via stub pairing.
    let total_target = ((n as f64) * target_avg_degree / 2.0).round() as usize;
    let base_budget = total_target.saturating_sub(edges.len());
    let mut stubs: Vec<u32> = Vec::with_capacity(2 * base_budget);
    // Weakly schooled children run errands; strong children are saturated.
    for &c in &children {
        if participation[c as usize] < 1.0 {
            for _ in 0..3 {
                stubs.push(c);
            }
        }
    }
    let adult_stubs = (2 * base_budget).saturating_sub(stubs.len());
    for k in 0..adult_stubs {
        stubs.push(adults[k % adults.len()]);
    }
    stubs.shuffle(&mut rng);
    let base_type_weights = [
        (MeetingType::Home, 0.15),
        (MeetingType::Work, 0.25),
        (MeetingType::Shop, 0.25),
        (MeetingType::Visit, 0.15),
        (MeetingType::Other, 0.20),
    ];
    for pair in stubs.chunks_exact(2) {
        if pair[0] == pair[1] {
            continue; // rare self-pair, dropped
        }
        edges.push(ContactEdge {
            u: NodeId(pair[0]),
            v: NodeId(pair[1]),
            duration: rng.random_range(30..=240),
            meeting_type: sample_meeting_type(&mut rng, &base_type_weights),
        });
    }

    Ok(ContactNetwork::new(demographics, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_stats;

    #[test]
    fn starlike_rejects_bad_parameters() {
        assert!(generate_starlike(5, 0.01, 1).is_err());
        assert!(generate_starlike(1000, 0.0, 1).is_err());
        assert!(generate_starlike(1000, 0.2, 1).is_err());
    }

    #[test]
    fn starlike_is_deterministic_and_hubby() {
        let a = generate_starlike(1000, 0.01, 1).unwrap();
        let b = generate_starlike(1000, 0.01, 1).unwrap();
        assert_eq!(a.edges(), b.edges());
        let stats = degree_stats(&a);
        assert!(
            stats.max_degree as f64 > 10.0 * stats.avg_degree,
            "max {} vs avg {}",
            stats.max_degree,
            stats.avg_degree
        );
    }

    #[test]
    fn starlike_is_connected() {
        let net = generate_starlike(500, 0.02, 9).unwrap();
        let mut seen = vec![false; net.node_count()];
        let mut stack = vec![NodeId(0)];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in net.neighbors(u) {
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        assert_eq!(count, net.node_count());
    }

    #[test]
    fn citylike_rejects_bad_parameters() {
        assert!(generate_citylike(50, 50.0, 7).is_err());
        assert!(generate_citylike(10_000, 2.0, 7).is_err());
    }

    #[test]
    fn citylike_hits_degree_targets() {
        let net = generate_citylike(10_000, 50.0, 7).unwrap();
        let stats = degree_stats(&net);
        assert!(
            (stats.avg_degree - 50.0).abs() <= 5.0,
            "avg degree {} not within 10% of 50",
            stats.avg_degree
        );
        assert!(
            (stats.max_degree as f64) < 20.0 * stats.avg_degree,
            "max degree {} too large for avg {}",
            stats.max_degree,
            stats.avg_degree
        );
    }

    #[test]
    fn citylike_is_deterministic() {
        let a = generate_citylike(1_000, 20.0, 3).unwrap();
        let b = generate_citylike(1_000, 20.0, 3).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_ne!(
            a.edges(),
            generate_citylike(1_000, 20.0, 4).unwrap().edges()
        );
    }

    #[test]
    fn generated_edges_satisfy_network_invariants() {
        for net in [
            generate_starlike(300, 0.03, 5).unwrap(),
            generate_citylike(500, 12.0, 5).unwrap(),
        ] {
            for e in net.edges() {
                assert_ne!(e.u, e.v);
                assert!(MeetingType::from_code(e.meeting_type.code()).is_some());
            }
        }
    }

    #[test]
    fn citylike_children_have_school_heavy_contact_time() {
        let net = generate_citylike(2_000, 30.0, 11).unwrap();
        // Among school-age nodes there must be a sizable cohort whose
        // meetings are mostly long school contacts, otherwise the
        // surrogate criteria have nothing to find.
        let mut school_heavy = 0;
        let mut children = 0;
        for v in net.nodes() {
            let d = net.demographics(v);
            if d.age > 20 {
                continue;
            }
            children += 1;
            let total = net.degree(v) as f64;
            let school = net
                .neighbors(v)
                .iter()
                .filter(|&&(_, e)| net.edges()[e as usize].meeting_type == MeetingType::School)
                .count() as f64;
            if total > 0.0 && school / total >= 0.8 {
                school_heavy += 1;
            }
        }
        assert!(children > 300);
        assert!(
            school_heavy as f64 >= 0.4 * children as f64,
            "only {school_heavy}/{children} school-heavy children"
        );
    }
}
