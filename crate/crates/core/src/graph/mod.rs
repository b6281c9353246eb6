//! Contact-network data model.
//!
//! A [`ContactNetwork`] is an immutable undirected multigraph: parallel
//! edges represent repeated meetings between the same pair of people, each
//! with its own duration and meeting type. Per-node demographics carry the
//! attributes the surrogate pipeline consumes.

mod generate;
mod io;

pub use generate::{complete, generate_citylike, generate_starlike};
pub use io::{load_network, save_network, FileFormat};

use thiserror::Error;

/// Dense node index, stable for the lifetime of a loaded network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gender {
    Female,
    Male,
}

impl Gender {
    pub fn code(self) -> u32 {
        match self {
            Gender::Female => 0,
            Gender::Male => 1,
        }
    }

    pub fn from_code(code: u32) -> Option<Gender> {
        match code {
            0 => Some(Gender::Female),
            1 => Some(Gender::Male),
            _ => None,
        }
    }
}

pub const MAX_AGE: u32 = 130;

/// Per-person attributes available to the surrogate pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Demographics {
    /// Age in years, at most [`MAX_AGE`].
    pub age: u32,
    pub gender: Gender,
    /// Annual income in currency units.
    pub income: u32,
}

/// Activity type attached to a meeting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeetingType {
    Home = 1,
    Work = 2,
    Shop = 3,
    Visit = 4,
    School = 5,
    Other = 6,
}

impl MeetingType {
    pub const ALL: [MeetingType; 6] = [
        MeetingType::Home,
        MeetingType::Work,
        MeetingType::Shop,
        MeetingType::Visit,
        MeetingType::School,
        MeetingType::Other,
    ];

    pub fn code(self) -> u32 {
        self as u32
    }

    pub fn from_code(code: u32) -> Option<MeetingType> {
        match code {
            1 => Some(MeetingType::Home),
            2 => Some(MeetingType::Work),
            3 => Some(MeetingType::Shop),
            4 => Some(MeetingType::Visit),
            5 => Some(MeetingType::School),
            6 => Some(MeetingType::Other),
            _ => None,
        }
    }
}

/// One meeting between two people. Undirected; `u != v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContactEdge {
    pub u: NodeId,
    pub v: NodeId,
    /// Contact duration in seconds.
    pub duration: u32,
    pub meeting_type: MeetingType,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: edge references undeclared node {node}")]
    DanglingNode { line: usize, node: u32 },
    #[error("line {line}: self-loop {node} -- {node} rejected")]
    SelfLoop { line: usize, node: u32 },
    #[error("line {line}: negative duration")]
    NegativeDuration { line: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable weighted contact network with per-node adjacency.
#[derive(Debug, Clone)]
pub struct ContactNetwork {
    demographics: Vec<Demographics>,
    edges: Vec<ContactEdge>,
    /// CSR adjacency: for node `i`, entries `adj_offsets[i]..adj_offsets[i+1]`
    /// of `adj_entries` hold `(neighbor, edge index)`, each undirected edge
    /// appearing once per endpoint.
    adj_offsets: Vec<usize>,
    adj_entries: Vec<(NodeId, u32)>,
}

impl ContactNetwork {
    /// Build a network from node attributes and validated edges.
    ///
    /// Panics on self-loops or out-of-range endpoints; file loading and the
    /// generators check those before calling.
    pub fn new(demographics: Vec<Demographics>, edges: Vec<ContactEdge>) -> ContactNetwork {
        let n = demographics.len();
        for e in &edges {
            assert!(e.u != e.v, "self-loop {}", e.u);
            assert!(e.u.index() < n && e.v.index() < n, "edge endpoint out of range");
        }
        let mut counts = vec![0usize; n + 1];
        for e in &edges {
            counts[e.u.index() + 1] += 1;
            counts[e.v.index() + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let adj_offsets = counts.clone();
        let mut cursor = counts;
        let mut adj_entries = vec![(NodeId(0), 0u32); edges.len() * 2];
        for (idx, e) in edges.iter().enumerate() {
            adj_entries[cursor[e.u.index()]] = (e.v, idx as u32);
            cursor[e.u.index()] += 1;
            adj_entries[cursor[e.v.index()]] = (e.u, idx as u32);
            cursor[e.v.index()] += 1;
        }
        ContactNetwork {
            demographics,
            edges,
            adj_offsets,
            adj_entries,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.demographics.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[ContactEdge] {
        &self.edges
    }

    #[inline]
    pub fn demographics(&self, v: NodeId) -> &Demographics {
        &self.demographics[v.index()]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count() as u32).map(NodeId)
    }

    /// Neighbors of `v` with the index of the connecting edge; parallel
    /// edges appear once each.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[(NodeId, u32)] {
        &self.adj_entries[self.adj_offsets[v.index()]..self.adj_offsets[v.index() + 1]]
    }

    /// Number of incident edges, counting parallel edges individually.
    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adj_offsets[v.index() + 1] - self.adj_offsets[v.index()]
    }

    /// Sum of incident edge durations in seconds.
    pub fn weighted_degree(&self, v: NodeId) -> u64 {
        self.neighbors(v)
            .iter()
            .map(|&(_, e)| u64::from(self.edges[e as usize].duration))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    pub n: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
}

/// Node count, average degree `2|E|/N` and maximum degree.
pub fn degree_stats(net: &ContactNetwork) -> DegreeStats {
    let n = net.node_count();
    let avg_degree = if n == 0 {
        0.0
    } else {
        2.0 * net.edge_count() as f64 / n as f64
    };
    let max_degree = net.nodes().map(|v| net.degree(v)).max().unwrap_or(0);
    DegreeStats {
        n,
        avg_degree,
        max_degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> ContactNetwork {
        let demo = vec![
            Demographics { age: 30, gender: Gender::Female, income: 100 };
            3
        ];
        let edges = vec![
            ContactEdge { u: NodeId(0), v: NodeId(1), duration: 10, meeting_type: MeetingType::Other },
            ContactEdge { u: NodeId(1), v: NodeId(2), duration: 10, meeting_type: MeetingType::Other },
            ContactEdge { u: NodeId(0), v: NodeId(2), duration: 10, meeting_type: MeetingType::Other },
        ];
        ContactNetwork::new(demo, edges)
    }

    #[test]
    fn k3_degree_stats() {
        let stats = degree_stats(&triangle());
        assert_eq!(stats.n, 3);
        assert_eq!(stats.avg_degree, 2.0);
        assert_eq!(stats.max_degree, 2);
    }

    #[test]
    fn star_degree_stats() {
        let demo = vec![
            Demographics { age: 30, gender: Gender::Male, income: 100 };
            10
        ];
        let edges: Vec<ContactEdge> = (1..10)
            .map(|i| ContactEdge {
                u: NodeId(0),
                v: NodeId(i),
                duration: 5,
                meeting_type: MeetingType::Visit,
            })
            .collect();
        let net = ContactNetwork::new(demo, edges);
        let stats = degree_stats(&net);
        assert_eq!(stats.n, 10);
        assert!((stats.avg_degree - 1.8).abs() < 1e-12);
        assert_eq!(stats.max_degree, 9);
    }

    #[test]
    fn complete_graph_degree_stats() {
        for n in 2..=12 {
            let net = complete(n, 10, MeetingType::Other);
            let stats = degree_stats(&net);
            assert_eq!(stats.n, n);
            assert!((stats.avg_degree - (n - 1) as f64).abs() < 1e-12);
            assert_eq!(stats.max_degree, n - 1);
        }
    }

    #[test]
    fn weighted_degree_sums_parallel_edges() {
        let demo = vec![
            Demographics { age: 20, gender: Gender::Female, income: 10 };
            2
        ];
        let edges = vec![
            ContactEdge { u: NodeId(0), v: NodeId(1), duration: 100, meeting_type: MeetingType::Home },
            ContactEdge { u: NodeId(0), v: NodeId(1), duration: 250, meeting_type: MeetingType::Work },
        ];
        let net = ContactNetwork::new(demo, edges);
        assert_eq!(net.degree(NodeId(0)), 2);
        assert_eq!(net.weighted_degree(NodeId(0)), 350);
        assert_eq!(net.weighted_degree(NodeId(1)), 350);
    }

    #[test]
    #[should_panic(expected = "self-loop")]
    fn self_loop_panics() {
        let demo = vec![
            Demographics { age: 20, gender: Gender::Female, income: 10 };
            1
        ];
        let edges = vec![ContactEdge {
            u: NodeId(0),
            v: NodeId(0),
            duration: 1,
            meeting_type: MeetingType::Other,
        }];
        ContactNetwork::new(demo, edges);
    }
}
