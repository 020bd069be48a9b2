//! Simple undirected graph storage and mutation primitives.
//!
//! Nodes are dense ids `0..n`. Adjacency is a sorted neighbor list per
//! node, giving `O(log k)` membership tests, which the swap legality
//! checks rely on. Invariants maintained by every mutation:
//!
//! - no self-loops, no multi-edges
//! - symmetry: `j ∈ adj(i) ⇔ i ∈ adj(j)`
//! - `m` equals half the sum of degrees

use crate::error::{domain, Error, Result};

pub type NodeId = u32;

/// Canonical form of an undirected edge: `(min, max)`.
#[inline]
pub fn canonical(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    m: usize,
}

impl Graph {
    pub fn with_nodes(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge iterator, dropping self-loops and
    /// duplicate edges. Returns `(graph, dropped_self_loops, dropped_duplicates)`.
    pub fn from_edges_lossy(
        n: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> (Self, usize, usize) {
        let mut g = Graph::with_nodes(n);
        let mut loops = 0usize;
        let mut dups = 0usize;
        for (u, v) in edges {
            if u == v {
                loops += 1;
            } else if !g.add_edge(u, v) {
                dups += 1;
            }
        }
        (g, loops, dups)
    }

    /// Strict constructor: errors on self-loops, duplicates, or out-of-range ids.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let mut g = Graph::with_nodes(n);
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(domain(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if u == v {
                return Err(domain(format!("self-loop at node {u}")));
            }
            if !g.add_edge(u, v) {
                return Err(domain(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn degree_of(&self, v: NodeId) -> u32 {
        self.adj[v as usize].len() as u32
    }

    /// Checked degree lookup.
    pub fn degree(&self, v: NodeId) -> Result<u32> {
        if (v as usize) < self.n() {
            Ok(self.degree_of(v))
        } else {
            Err(domain(format!("node {v} out of range (n={})", self.n())))
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.adj.iter().map(|a| a.len() as u32).collect()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let a = &self.adj[u as usize];
        let b = &self.adj[v as usize];
        if a.len() <= b.len() {
            a.binary_search(&v).is_ok()
        } else {
            b.binary_search(&u).is_ok()
        }
    }

    /// Adds an edge; returns false if it already exists. Panics on self-loops
    /// or out-of-range ids (callers validate those).
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        assert_ne!(u, v, "self-loop");
        match self.adj[u as usize].binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.adj[u as usize].insert(pos, v);
                let pos = self.adj[v as usize].binary_search(&u).unwrap_err();
                self.adj[v as usize].insert(pos, u);
                self.m += 1;
                true
            }
        }
    }

    /// Removes an edge; returns false if absent.
    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> bool {
        match self.adj[u as usize].binary_search(&v) {
            Err(_) => false,
            Ok(pos) => {
                self.adj[u as usize].remove(pos);
                let pos = self.adj[v as usize].binary_search(&u).unwrap();
                self.adj[v as usize].remove(pos);
                self.m -= 1;
                true
            }
        }
    }

    /// All edges in canonical `(min, max)` form, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.m);
        for (u, nbrs) in self.adj.iter().enumerate() {
            let u = u as NodeId;
            for &v in nbrs {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m as f64 / self.n() as f64
        }
    }

    /// Connected components as sorted node lists, ordered by smallest member id.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        let mut queue = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.clear();
            queue.push(start as NodeId);
            let mut comp = vec![start as NodeId];
            while let Some(v) = queue.pop() {
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        comp.push(w);
                        queue.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.connected_components().len() == 1
    }

    /// Induced subgraph on `nodes` (must be sorted, deduplicated). Ids are
    /// recompacted in ascending order; returns the new graph and the map
    /// new id -> old id.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<NodeId>) {
        let mut index = vec![u32::MAX; self.n()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old as usize] = new as u32;
        }
        let mut g = Graph::with_nodes(nodes.len());
        for &old in nodes {
            let nu = index[old as usize];
            for &w in self.neighbors(old) {
                let nw = index[w as usize];
                if nw != u32::MAX && nu < nw {
                    g.add_edge(nu, nw);
                }
            }
        }
        (g, nodes.to_vec())
    }
}

/// Result of extracting the giant connected component.
#[derive(Debug, Clone)]
pub struct GccResult {
    pub graph: Graph,
    /// new id -> id in the input graph
    pub node_map: Vec<NodeId>,
    /// sizes of all components, descending
    pub component_sizes: Vec<usize>,
}

/// Induced subgraph on the largest connected component. Ties are broken by
/// the smallest minimum original node id; ids are recompacted ascending.
pub fn giant_connected_component(g: &Graph) -> Result<GccResult> {
    if g.n() == 0 {
        return Err(domain("empty graph has no connected component"));
    }
    let comps = g.connected_components();
    // components() already orders by smallest member id, so the first
    // maximum is the tie-break winner
    let best = comps
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .unwrap();
    let mut sizes: Vec<usize> = comps.iter().map(|c| c.len()).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let (graph, node_map) = g.induced_subgraph(&comps[best]);
    Ok(GccResult {
        graph,
        node_map,
        component_sizes: sizes,
    })
}

/// Which way two edges are crossed in a double swap.
///
/// For edges `(a, b)` and `(c, d)` in canonical order, `A` produces
/// `(a, d), (c, b)` and `B` produces `(a, c), (b, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossMode {
    A,
    B,
}

/// Why a proposed swap was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapRejection {
    SelfLoop,
    MultiEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapResult {
    Applied,
    Rejected(SwapRejection),
}

/// New edge pair produced by crossing `e1`, `e2` with `mode`.
#[inline]
pub fn crossed_edges(
    e1: (NodeId, NodeId),
    e2: (NodeId, NodeId),
    mode: CrossMode,
) -> [(NodeId, NodeId); 2] {
    let (a, b) = e1;
    let (c, d) = e2;
    match mode {
        CrossMode::A => [(a, d), (c, b)],
        CrossMode::B => [(a, c), (b, d)],
    }
}

/// Legality of a crossing against the current graph: both new pairs must be
/// non-loops and absent from the graph (a new pair that coincides with one
/// of the swapped-out edges therefore also rejects as a multi-edge, which
/// makes identity crossings illegal).
pub fn check_cross(
    g: &Graph,
    e1: (NodeId, NodeId),
    e2: (NodeId, NodeId),
    mode: CrossMode,
) -> std::result::Result<[(NodeId, NodeId); 2], SwapRejection> {
    let new = crossed_edges(e1, e2, mode);
    for &(x, y) in &new {
        if x == y {
            return Err(SwapRejection::SelfLoop);
        }
    }
    for &(x, y) in &new {
        if g.has_edge(x, y) {
            return Err(SwapRejection::MultiEdge);
        }
    }
    Ok([canonical(new[0].0, new[0].1), canonical(new[1].0, new[1].1)])
}

/// Replaces `(a,b),(c,d)` by the crossed pair, or leaves the graph
/// untouched and reports why. Errors if either edge is absent.
pub fn swap_edges(
    g: &mut Graph,
    e1: (NodeId, NodeId),
    e2: (NodeId, NodeId),
    mode: CrossMode,
) -> Result<SwapResult> {
    for &(u, v) in &[e1, e2] {
        if u as usize >= g.n() || v as usize >= g.n() || !g.has_edge(u, v) {
            return Err(Error::Domain(format!("edge ({u}, {v}) not in graph")));
        }
    }
    if canonical(e1.0, e1.1) == canonical(e2.0, e2.1) {
        return Err(domain("swap requires two distinct edges"));
    }
    match check_cross(g, e1, e2, mode) {
        Err(reason) => Ok(SwapResult::Rejected(reason)),
        Ok([n1, n2]) => {
            g.remove_edge(e1.0, e1.1);
            g.remove_edge(e2.0, e2.1);
            g.add_edge(n1.0, n1.1);
            g.add_edge(n2.0, n2.1);
            Ok(SwapResult::Applied)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn paw() -> Graph {
        // triangle 0,1,2 with pendant 3 on 0
        Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn degree_basics() {
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(star.degree(0).unwrap(), 4);
        assert_eq!(star.degree(1).unwrap(), 1);
        assert!(star.degree(7).is_err());
        assert_eq!(paw().degree(0).unwrap(), 3);
    }

    #[test]
    fn gcc_tie_break_and_identity() {
        // two triangles + isolated node: tie broken by smallest min id
        let g = Graph::from_edges(7, [(0, 1), (0, 2), (1, 2), (4, 5), (4, 6), (5, 6)]).unwrap();
        let gcc = giant_connected_component(&g).unwrap();
        assert_eq!(gcc.graph.n(), 3);
        assert_eq!(gcc.graph.m(), 3);
        assert_eq!(gcc.node_map, vec![0, 1, 2]);
        assert_eq!(gcc.component_sizes, vec![3, 3, 1]);

        let p = paw();
        let gcc = giant_connected_component(&p).unwrap();
        assert_eq!((gcc.graph.n(), gcc.graph.m()), (p.n(), p.m()));
        assert_eq!(gcc.graph, p);
    }

    #[test]
    fn gcc_excludes_two_node_components() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        let gcc = giant_connected_component(&g).unwrap();
        assert_eq!(gcc.graph.n(), 3);
        assert!(gcc.graph.is_connected());
        assert_eq!(gcc.component_sizes, vec![3, 2, 1]);
    }

    #[test]
    fn swap_modes_and_rejections() {
        let mut g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            swap_edges(&mut g, (0, 1), (2, 3), CrossMode::A).unwrap(),
            SwapResult::Applied
        );
        assert_eq!(g.edges(), vec![(0, 3), (1, 2)]);

        // shared node: self-loop
        let mut g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            swap_edges(&mut g, (0, 1), (1, 2), CrossMode::A).unwrap(),
            SwapResult::Rejected(SwapRejection::SelfLoop)
        );
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);

        // existing edge: multi-edge
        let mut g = Graph::from_edges(4, [(0, 1), (2, 3), (0, 3)]).unwrap();
        assert_eq!(
            swap_edges(&mut g, (0, 1), (2, 3), CrossMode::A).unwrap(),
            SwapResult::Rejected(SwapRejection::MultiEdge)
        );

        let mut g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(swap_edges(&mut g, (0, 2), (1, 3), CrossMode::A).is_err());
    }

    #[test]
    fn swaps_preserve_invariants() {
        let mut g = paw();
        let (n, m) = (g.n(), g.m());
        let edges = g.edges();
        for &e1 in &edges {
            for &e2 in &edges {
                if e1 == e2 {
                    continue;
                }
                for mode in [CrossMode::A, CrossMode::B] {
                    let _ = swap_edges(&mut g, e1, e2, mode);
                }
            }
        }
        assert_eq!((g.n(), g.m()), (n, m));
        for v in 0..g.n() as u32 {
            for &w in g.neighbors(v) {
                assert_ne!(v, w);
                assert!(g.neighbors(w).binary_search(&v).is_ok());
            }
        }
    }
}
