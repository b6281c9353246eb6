//! Dominator trees over directed graphs.
//!
//! A node `x` dominates `y` when every path from the designated root to
//! `y` passes through `x`; the immediate dominator is the unique closest
//! such node, and the tree of immediate dominators is the dominator tree.
//! Built with the Lengauer-Tarjan algorithm using the simple (path
//! compression only) link-eval structure, O(m log n).
//!
//! Dendrograms plug in through a virtual super-source that points to every
//! seed node, bridging multi-seed epidemics to the single-root definition.

use crate::epidemic::Dendrogram;
use crate::par;
use thiserror::Error;

const UNSET: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum DomError {
    #[error("root {root} missing from digraph of {n} nodes")]
    MissingRoot { root: u32, n: usize },
}

/// Directed graph with a designated root.
#[derive(Debug, Clone)]
pub struct Digraph {
    succ: Vec<Vec<u32>>,
    root: u32,
}

impl Digraph {
    pub fn new(n: usize, root: u32) -> Digraph {
        Digraph {
            succ: vec![Vec::new(); n],
            root,
        }
    }

    pub fn from_edges(n: usize, root: u32, edges: &[(u32, u32)]) -> Digraph {
        let mut g = Digraph::new(n, root);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        self.succ[u as usize].push(v);
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn successors(&self, u: u32) -> &[u32] {
        &self.succ[u as usize]
    }
}

/// Immediate-dominator tree of the nodes reachable from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatorTree {
    idom: Vec<u32>,
    depth: Vec<u32>,
    root: u32,
}

impl DominatorTree {
    pub fn root(&self) -> u32 {
        self.root
    }

    /// Immediate dominator; `None` for the root and unreachable nodes.
    pub fn idom(&self, v: u32) -> Option<u32> {
        match self.idom[v as usize] {
            UNSET => None,
            d => Some(d),
        }
    }

    pub fn is_reachable(&self, v: u32) -> bool {
        v == self.root || self.idom[v as usize] != UNSET
    }

    /// Distance from the root along immediate dominators; `None` for
    /// unreachable nodes.
    pub fn depth(&self, v: u32) -> Option<u32> {
        if self.is_reachable(v) {
            Some(self.depth[v as usize])
        } else {
            None
        }
    }

    /// Whether `x` dominates `v` (reflexively).
    pub fn dominates(&self, x: u32, v: u32) -> bool {
        if !self.is_reachable(v) || !self.is_reachable(x) {
            return false;
        }
        let mut cur = v;
        loop {
            if cur == x {
                return true;
            }
            match self.idom(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Debug dump: `node idom depth` per reachable node, root first.
    pub fn dump_string(&self) -> String {
        let mut out = String::new();
        for v in 0..self.idom.len() as u32 {
            if !self.is_reachable(v) {
                continue;
            }
            let idom = self.idom(v).map_or(-1, |d| i64::from(d));
            out.push_str(&format!("{v} {idom} {}\n", self.depth[v as usize]));
        }
        out
    }
}

/// Lengauer-Tarjan link-eval forest with path compression.
struct LinkEval {
    ancestor: Vec<u32>,
    label: Vec<u32>,
}

impl LinkEval {
    fn new(n: usize) -> LinkEval {
        LinkEval {
            ancestor: vec![UNSET; n],
            label: (0..n as u32).collect(),
        }
    }

    fn link(&mut self, parent: u32, w: u32) {
        self.ancestor[w as usize] = parent;
    }

    /// Minimum-semi label on the path to the forest root, compressing as it
    /// goes. Iterative: dendrogram chains can be tens of thousands deep.
    fn eval(&mut self, v: u32, semi: &[u32]) -> u32 {
        if self.ancestor[v as usize] == UNSET {
            return self.label[v as usize];
        }
        let mut path = Vec::new();
        let mut cur = v;
        while self.ancestor[self.ancestor[cur as usize] as usize] != UNSET {
            path.push(cur);
            cur = self.ancestor[cur as usize];
        }
        for &u in path.iter().rev() {
            let a = self.ancestor[u as usize];
            if semi[self.label[a as usize] as usize] < semi[self.label[u as usize] as usize] {
                self.label[u as usize] = self.label[a as usize];
            }
            self.ancestor[u as usize] = self.ancestor[a as usize];
        }
        self.label[v as usize]
    }
}

/// Immediate dominators of all nodes reachable from the root.
pub fn build_dominator_tree(g: &Digraph) -> Result<DominatorTree, DomError> {
    let n = g.node_count();
    let root = g.root();
    if root as usize >= n {
        return Err(DomError::MissingRoot { root, n });
    }

    // Iterative DFS numbering.
    let mut dfnum = vec![UNSET; n];
    let mut vertex: Vec<u32> = Vec::with_capacity(n);
    let mut parent = vec![UNSET; n];
    let mut stack = vec![(root, 0usize)];
    dfnum[root as usize] = 0;
    vertex.push(root);
    while let Some(&mut (u, ref mut next)) = stack.last_mut() {
        if *next >= g.successors(u).len() {
            stack.pop();
            continue;
        }
        let v = g.successors(u)[*next];
        *next += 1;
        if dfnum[v as usize] == UNSET {
            dfnum[v as usize] = vertex.len() as u32;
            vertex.push(v);
            parent[v as usize] = u;
            stack.push((v, 0));
        }
    }

    // Predecessor lists restricted to reachable nodes.
    let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &u in &vertex {
        for &v in g.successors(u) {
            if dfnum[v as usize] != UNSET {
                pred[v as usize].push(u);
            }
        }
    }

    let mut semi: Vec<u32> = dfnum.clone();
    let mut idom = vec![UNSET; n];
    let mut bucket: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut forest = LinkEval::new(n);

    for &w in vertex[1..].iter().rev() {
        for &v in &pred[w as usize] {
            let u = forest.eval(v, &semi);
            if semi[u as usize] < semi[w as usize] {
                semi[w as usize] = semi[u as usize];
            }
        }
        let semi_vertex = vertex[semi[w as usize] as usize];
        bucket[semi_vertex as usize].push(w);
        let p = parent[w as usize];
        forest.link(p, w);
        for v in std::mem::take(&mut bucket[p as usize]) {
            let u = forest.eval(v, &semi);
            idom[v as usize] = if semi[u as usize] < semi[v as usize] {
                u
            } else {
                p
            };
        }
    }
    for &w in vertex[1..].iter() {
        if idom[w as usize] != vertex[semi[w as usize] as usize] {
            idom[w as usize] = idom[idom[w as usize] as usize];
        }
    }
    idom[root as usize] = UNSET;

    // Depths follow the DFS order: an idom is always a DFS-tree ancestor.
    let mut depth = vec![0u32; n];
    for &w in vertex[1..].iter() {
        depth[w as usize] = depth[idom[w as usize] as usize] + 1;
    }

    Ok(DominatorTree { idom, depth, root })
}

/// Dendrogram as a digraph: nodes `0..n` plus a virtual super-source at
/// index `n` with an edge to every seed, and the forest's infector edges.
pub fn dendrogram_digraph(den: &Dendrogram) -> Digraph {
    let n = den.node_count();
    let mut g = Digraph::new(n + 1, n as u32);
    for s in den.seeds() {
        g.add_edge(n as u32, s.0);
    }
    for v in den.infected_nodes() {
        if let Some(p) = den.infector(v) {
            g.add_edge(p.0, v.0);
        }
    }
    g
}

/// Dominator tree of each dendrogram under its virtual super-source.
///
/// Node `den.node_count()` is the super-source root of each returned tree;
/// seed nodes sit at depth 1.
pub fn build_from_dendrograms(dens: &[Dendrogram]) -> Vec<DominatorTree> {
    assert!(!dens.is_empty(), "need at least one dendrogram");
    par::map_indexed(dens.len(), |i| {
        build_dominator_tree(&dendrogram_digraph(&dens[i]))
            .expect("dendrogram digraph always has its super-source")
    })
}

/// Per-node depth in the dendrogram's dominator tree, measured from the
/// seeds (depth 0) with the virtual super-source excluded; `u32::MAX` for
/// nodes never infected.
pub fn dominator_depths(den: &Dendrogram) -> Vec<u32> {
    let tree = build_dominator_tree(&dendrogram_digraph(den))
        .expect("dendrogram digraph always has its super-source");
    (0..den.node_count() as u32)
        .map(|v| match tree.depth(v) {
            Some(d) => d - 1,
            None => u32::MAX,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    #[test]
    fn path_graph_is_its_own_dominator_tree() {
        let g = Digraph::from_edges(3, 0, &[(0, 1), (1, 2)]);
        let tree = build_dominator_tree(&g).unwrap();
        assert_eq!(tree.idom(0), None);
        assert_eq!(tree.idom(1), Some(0));
        assert_eq!(tree.idom(2), Some(1));
        assert_eq!(tree.depth(2), Some(2));
    }

    #[test]
    fn diamond_joins_at_the_fork() {
        // 0 -> {1,2} -> 3: neither branch dominates 3.
        let g = Digraph::from_edges(4, 0, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let tree = build_dominator_tree(&g).unwrap();
        assert_eq!(tree.idom(3), Some(0));
        assert!(tree.dominates(0, 3));
        assert!(!tree.dominates(1, 3));
    }

    #[test]
    fn schematic_contact_graph_relations() {
        // Branching schematic: root A forks to B and C; H is reachable only
        // through B (via D or G); J only through C and F; F only through C.
        let (a, b, c, d, e, f, g_, h, i, j) = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9);
        let edges = [
            (a, b),
            (a, c),
            (b, d),
            (b, g_),
            (d, h),
            (g_, h),
            (c, e),
            (c, f),
            (e, f),
            (f, i),
            (f, j),
        ];
        let g = Digraph::from_edges(10, a, &edges);
        let tree = build_dominator_tree(&g).unwrap();
        assert!(tree.dominates(b, h), "B must dominate H");
        assert!(tree.dominates(c, j), "C must dominate J");
        assert!(tree.dominates(f, j), "F must dominate J");
        assert!(tree.dominates(c, f), "C must dominate F");
        assert_eq!(tree.idom(h), Some(b));
        assert_eq!(tree.idom(j), Some(f));
        assert_eq!(tree.idom(f), Some(c));
    }

    #[test]
    fn unreachable_nodes_are_absent() {
        let g = Digraph::from_edges(4, 0, &[(0, 1), (2, 3)]);
        let tree = build_dominator_tree(&g).unwrap();
        assert!(tree.is_reachable(1));
        assert!(!tree.is_reachable(2));
        assert!(!tree.is_reachable(3));
        assert_eq!(tree.depth(3), None);
        assert!(!tree.dominates(2, 3));
    }

    #[test]
    fn missing_root_is_an_error() {
        let g = Digraph::from_edges(2, 5, &[(0, 1)]);
        assert!(matches!(
            build_dominator_tree(&g),
            Err(DomError::MissingRoot { root: 5, n: 2 })
        ));
    }

    #[test]
    fn depth_is_consistent_with_idom_chain() {
        let g = Digraph::from_edges(
            7,
            0,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (3, 5), (5, 6), (6, 3)],
        );
        let tree = build_dominator_tree(&g).unwrap();
        for v in 0..7 {
            if let Some(p) = tree.idom(v) {
                assert_eq!(tree.depth(v).unwrap(), tree.depth(p).unwrap() + 1);
            }
        }
    }

    #[test]
    fn single_seed_dendrogram_dominator_tree_is_the_dendrogram() {
        use crate::epidemic::Dendrogram;
        let den = Dendrogram::from_parts(
            5,
            &[NodeId(0)],
            &[
                (NodeId(1), 1, NodeId(0)),
                (NodeId(2), 1, NodeId(0)),
                (NodeId(3), 2, NodeId(1)),
            ],
            4,
        )
        .unwrap();
        let depths = dominator_depths(&den);
        assert_eq!(depths, vec![0, 1, 1, 2, u32::MAX]);
        assert_eq!(depths[..4].to_vec(), den.depths()[..4].to_vec());
    }

    #[test]
    fn multi_seed_roots_hang_off_super_source() {
        use crate::epidemic::Dendrogram;
        let den = Dendrogram::from_parts(
            4,
            &[NodeId(0), NodeId(2)],
            &[(NodeId(1), 1, NodeId(0)), (NodeId(3), 2, NodeId(2))],
            3,
        )
        .unwrap();
        let trees = build_from_dendrograms(std::slice::from_ref(&den));
        let tree = &trees[0];
        let source = den.node_count() as u32;
        assert_eq!(tree.idom(0), Some(source));
        assert_eq!(tree.idom(2), Some(source));
        assert_eq!(tree.idom(1), Some(0));
        assert_eq!(tree.idom(3), Some(2));
        assert_eq!(dominator_depths(&den), vec![0, 1, 0, 1]);
    }
}
