//! Topology metrics: distance distribution, betweenness, clustering,
//! assortativity, likelihoods, and the Laplacian extremes.
//!
//! BFS-heavy metrics fan out over rayon in fixed-size source blocks that are
//! folded in source order, so results are bitwise independent of the worker
//! count. Conventions (used consistently for originals and generated graphs):
//!
//! - distance distribution `d(x)` is over all `n²` ordered pairs, self-pairs
//!   at distance 0; the scalar `d̄` and `σ_d` exclude self-pairs
//! - betweenness counts ordered source/target pairs, endpoints excluded,
//!   no normalization
//! - nodes of degree < 2 contribute clustering 0 to `C̄`

use crate::error::{domain, Result};
use crate::graph::{canonical, giant_connected_component, Graph, NodeId};
use crate::spectrum;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

const SOURCE_BLOCK: usize = 32;

/// Distance distribution plus its scalar summaries.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceStats {
    /// hop count -> fraction of the n² ordered pairs
    pub distribution: BTreeMap<u32, f64>,
    pub dbar: f64,
    pub sigma_d: f64,
}

fn bfs_distances(g: &Graph, source: NodeId, dist: &mut [i32], queue: &mut Vec<NodeId>) {
    dist.fill(-1);
    dist[source as usize] = 0;
    queue.clear();
    queue.push(source);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        let dv = dist[v as usize];
        for &w in g.neighbors(v) {
            if dist[w as usize] < 0 {
                dist[w as usize] = dv + 1;
                queue.push(w);
            }
        }
    }
}

/// BFS from every node. Errors on disconnected input.
pub fn distance_distribution(g: &Graph) -> Result<DistanceStats> {
    let n = g.n();
    if n == 0 {
        return Err(domain("empty graph"));
    }
    if !g.is_connected() {
        return Err(domain(
            "graph is disconnected; extract the giant connected component first",
        ));
    }
    let sources: Vec<NodeId> = (0..n as NodeId).collect();
    let mut counts: Vec<u64> = Vec::new(); // counts[x] = ordered pairs at distance x
    for chunk in sources.chunks(SOURCE_BLOCK) {
        let partials: Vec<Vec<u64>> = chunk
            .par_iter()
            .map(|&s| {
                let mut dist = vec![-1i32; n];
                let mut queue = Vec::with_capacity(n);
                bfs_distances(g, s, &mut dist, &mut queue);
                let mut local: Vec<u64> = Vec::new();
                for &d in &dist {
                    let d = d as usize;
                    if d >= local.len() {
                        local.resize(d + 1, 0);
                    }
                    local[d] += 1;
                }
                local
            })
            .collect();
        for local in partials {
            if local.len() > counts.len() {
                counts.resize(local.len(), 0);
            }
            for (x, c) in local.into_iter().enumerate() {
                counts[x] += c;
            }
        }
    }

    let total = (n as f64) * (n as f64);
    let distribution: BTreeMap<u32, f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(x, &c)| (x as u32, c as f64 / total))
        .collect();
    let nonself = (n as u64) * (n as u64 - 1);
    let (mut sum, mut sum_sq) = (0u128, 0u128);
    for (x, &c) in counts.iter().enumerate() {
        let x = x as u128;
        sum += x * c as u128;
        sum_sq += x * x * c as u128;
    }
    let (dbar, sigma_d) = if nonself == 0 {
        (0.0, 0.0)
    } else {
        let mean = sum as f64 / nonself as f64;
        let var = (sum_sq as f64 / nonself as f64 - mean * mean).max(0.0);
        (mean, var.sqrt())
    };
    Ok(DistanceStats {
        distribution,
        dbar,
        sigma_d,
    })
}

#[derive(Debug, Clone)]
pub struct BetweennessResult {
    /// per-node betweenness, indexed by node id
    pub node: Vec<f64>,
    /// per-edge betweenness on canonical edges
    pub edge: BTreeMap<(NodeId, NodeId), f64>,
}

/// Exact betweenness via Brandes-style accumulation over BFS DAGs.
pub fn betweenness(g: &Graph) -> Result<BetweennessResult> {
    let n = g.n();
    if n == 0 {
        return Err(domain("empty graph"));
    }
    if !g.is_connected() {
        return Err(domain(
            "graph is disconnected; extract the giant connected component first",
        ));
    }
    let edges = g.edges();
    let edge_index = |u: NodeId, v: NodeId| -> usize {
        edges.binary_search(&canonical(u, v)).expect("edge exists")
    };

    let mut node_acc = vec![0.0f64; n];
    let mut edge_acc = vec![0.0f64; edges.len()];
    let sources: Vec<NodeId> = (0..n as NodeId).collect();
    for chunk in sources.chunks(SOURCE_BLOCK) {
        let partials: Vec<(Vec<f64>, Vec<f64>)> = chunk
            .par_iter()
            .map(|&s| {
                let mut dist = vec![-1i32; n];
                let mut sigma = vec![0.0f64; n];
                let mut delta = vec![0.0f64; n];
                let mut order: Vec<NodeId> = Vec::with_capacity(n);
                let mut node_c = vec![0.0f64; n];
                let mut edge_c = vec![0.0f64; edges.len()];

                dist[s as usize] = 0;
                sigma[s as usize] = 1.0;
                order.push(s);
                let mut head = 0;
                while head < order.len() {
                    let v = order[head];
                    head += 1;
                    let dv = dist[v as usize];
                    for &w in g.neighbors(v) {
                        if dist[w as usize] < 0 {
                            dist[w as usize] = dv + 1;
                            order.push(w);
                        }
                        if dist[w as usize] == dv + 1 {
                            sigma[w as usize] += sigma[v as usize];
                        }
                    }
                }
                for &w in order.iter().rev() {
                    let dw = dist[w as usize];
                    let coeff = (1.0 + delta[w as usize]) / sigma[w as usize];
                    for &v in g.neighbors(w) {
                        if dist[v as usize] + 1 == dw {
                            let c = sigma[v as usize] * coeff;
                            delta[v as usize] += c;
                            edge_c[edge_index(v, w)] += c;
                        }
                    }
                    if w != s {
                        node_c[w as usize] = delta[w as usize];
                    }
                }
                (node_c, edge_c)
            })
            .collect();
        for (node_c, edge_c) in partials {
            for (a, b) in node_acc.iter_mut().zip(node_c) {
                *a += b;
            }
            for (a, b) in edge_acc.iter_mut().zip(edge_c) {
                *a += b;
            }
        }
    }
    let edge = edges.into_iter().zip(edge_acc).collect();
    Ok(BetweennessResult {
        node: node_acc,
        edge,
    })
}

#[derive(Debug, Clone)]
pub struct ClusteringResult {
    /// per-node local clustering coefficient
    pub per_node: Vec<f64>,
    /// degree -> mean coefficient over nodes of that degree
    pub by_degree: BTreeMap<u32, f64>,
    /// mean over all nodes (degree < 2 contributes 0)
    pub cbar: f64,
}

/// Per-node triangle membership counts (links among each node's neighbors).
pub fn triangles_per_node(g: &Graph) -> Vec<u64> {
    (0..g.n() as NodeId)
        .map(|v| {
            let nbrs = g.neighbors(v);
            let mut links = 0u64;
            for i in 0..nbrs.len() {
                for j in (i + 1)..nbrs.len() {
                    if g.has_edge(nbrs[i], nbrs[j]) {
                        links += 1;
                    }
                }
            }
            links
        })
        .collect()
}

pub fn clustering(g: &Graph) -> ClusteringResult {
    let tri = triangles_per_node(g);
    let per_node: Vec<f64> = (0..g.n() as NodeId)
        .map(|v| {
            let k = g.degree_of(v) as u64;
            if k < 2 {
                0.0
            } else {
                tri[v as usize] as f64 / ((k * (k - 1) / 2) as f64)
            }
        })
        .collect();
    let mut sums: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    for v in 0..g.n() as NodeId {
        let e = sums.entry(g.degree_of(v)).or_insert((0.0, 0));
        e.0 += per_node[v as usize];
        e.1 += 1;
    }
    let by_degree = sums
        .into_iter()
        .map(|(k, (s, c))| (k, s / c as f64))
        .collect();
    let cbar = if g.n() == 0 {
        0.0
    } else {
        per_node.iter().sum::<f64>() / g.n() as f64
    };
    ClusteringResult {
        per_node,
        by_degree,
        cbar,
    }
}

/// Pearson correlation of degrees across edge ends, symmetrized over both
/// orientations. `Ok(None)` when the end-degree variance is zero (regular
/// graphs); `Err` on an empty edge set.
pub fn assortativity(g: &Graph) -> Result<Option<f64>> {
    let m = g.m() as i128;
    if m == 0 {
        return Err(domain("assortativity requires at least one edge"));
    }
    let (mut sx, mut sxx, mut sxy) = (0i128, 0i128, 0i128);
    for (u, v) in g.edges() {
        let (ku, kv) = (g.degree_of(u) as i128, g.degree_of(v) as i128);
        sx += ku + kv;
        sxx += ku * ku + kv * kv;
        sxy += 2 * ku * kv;
    }
    // r = cov/var over the 2m orientation-symmetrized samples
    let num = 2 * m * sxy - sx * sx;
    let den = 2 * m * sxx - sx * sx;
    if den == 0 {
        return Ok(None);
    }
    Ok(Some(num as f64 / den as f64))
}

/// Likelihood `S = Σ_{(i,j)∈E} k_i k_j`, each undirected edge once.
pub fn likelihood_s(g: &Graph) -> u64 {
    g.edges()
        .iter()
        .map(|&(u, v)| g.degree_of(u) as u64 * g.degree_of(v) as u64)
        .sum()
}

/// Second-order likelihood `S₂`: the sum over induced wedges of the product
/// of the two end degrees. Any two graphs with equal wedge statistics have
/// equal `S₂`.
pub fn second_order_likelihood(g: &Graph) -> u64 {
    let mut s2 = 0u64;
    for c in 0..g.n() as NodeId {
        let nbrs = g.neighbors(c);
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                let (a, b) = (nbrs[i], nbrs[j]);
                if !g.has_edge(a, b) {
                    s2 += g.degree_of(a) as u64 * g.degree_of(b) as u64;
                }
            }
        }
    }
    s2
}

/// Sum over wedge keys of `count · end_low · end_high`; equals
/// [`second_order_likelihood`] of the extracted graph.
pub fn s2_from_wedges(wedges: &BTreeMap<(u32, u32, u32), u64>) -> u64 {
    wedges
        .iter()
        .map(|(&(a, _, b), &c)| c * a as u64 * b as u64)
        .sum()
}

/// Every scalar and distributional metric of a graph, computed on its giant
/// connected component.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub m: usize,
    pub gcc_n: usize,
    pub gcc_m: usize,
    pub kbar: f64,
    pub r: Option<f64>,
    pub cbar: f64,
    pub dbar: f64,
    pub sigma_d: f64,
    pub likelihood_s: u64,
    pub s2: u64,
    pub lambda1: f64,
    pub lambda_n1: f64,
    pub distance_distribution: BTreeMap<u32, f64>,
    pub clustering_by_degree: BTreeMap<u32, f64>,
    pub betweenness: Vec<f64>,
}

impl MetricsReport {
    /// The scalar part only (distributions go to CSV sidecars).
    pub fn scalars_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "m": self.m,
            "gcc_n": self.gcc_n,
            "gcc_m": self.gcc_m,
            "kbar": self.kbar,
            "r": self.r,
            "cbar": self.cbar,
            "dbar": self.dbar,
            "sigma_d": self.sigma_d,
            "likelihood_s": self.likelihood_s,
            "s2": self.s2,
            "lambda1": self.lambda1,
            "lambda_n1": self.lambda_n1,
        })
    }

    pub fn distance_distribution_csv(&self) -> String {
        let mut out = String::from("x,probability\n");
        for (x, p) in &self.distance_distribution {
            out.push_str(&format!("{x},{p}\n"));
        }
        out
    }

    pub fn clustering_csv(&self) -> String {
        let mut out = String::from("k,c_k\n");
        for (k, c) in &self.clustering_by_degree {
            out.push_str(&format!("{k},{c}\n"));
        }
        out
    }

    pub fn betweenness_csv(&self) -> String {
        let mut out = String::from("node,betweenness\n");
        for (v, b) in self.betweenness.iter().enumerate() {
            out.push_str(&format!("{v},{b}\n"));
        }
        out
    }
}

/// Computes every metric on the GCC of `g`. Node-indexed outputs refer to the
/// recompacted GCC ids.
pub fn full_report(g: &Graph) -> Result<MetricsReport> {
    if g.n() == 0 {
        return Err(domain("empty graph"));
    }
    let gcc = giant_connected_component(g)?;
    let gg = &gcc.graph;
    let clus = clustering(gg);
    let (dstats, bt, lambda) = if gg.n() >= 2 {
        let dstats = distance_distribution(gg)?;
        let bt = betweenness(gg)?;
        let lambda = spectrum::lambda_extremes_auto(gg)?;
        (dstats, bt, lambda)
    } else {
        (
            DistanceStats {
                distribution: [(0u32, 1.0)].into_iter().collect(),
                dbar: 0.0,
                sigma_d: 0.0,
            },
            BetweennessResult {
                node: vec![0.0; gg.n()],
                edge: BTreeMap::new(),
            },
            (0.0, 0.0),
        )
    };
    let r = if gg.m() == 0 {
        None
    } else {
        assortativity(gg)?
    };
    Ok(MetricsReport {
        n: g.n(),
        m: g.m(),
        gcc_n: gg.n(),
        gcc_m: gg.m(),
        kbar: gg.average_degree(),
        r,
        cbar: clus.cbar,
        dbar: dstats.dbar,
        sigma_d: dstats.sigma_d,
        likelihood_s: likelihood_s(gg),
        s2: second_order_likelihood(gg),
        lambda1: lambda.0,
        lambda_n1: lambda.1,
        distance_distribution: dstats.distribution,
        clustering_by_degree: clus.by_degree,
        betweenness: bt.node,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gnp, paw};
    use approx::assert_relative_eq;

    fn k4() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn triangle_distance_distribution() {
        let g = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let st = distance_distribution(&g).unwrap();
        assert_relative_eq!(st.distribution[&0], 1.0 / 3.0);
        assert_relative_eq!(st.distribution[&1], 2.0 / 3.0);
        assert_relative_eq!(st.dbar, 1.0);
        assert_relative_eq!(st.sigma_d, 0.0);
    }

    #[test]
    fn path_distance_distribution() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let st = distance_distribution(&g).unwrap();
        assert_relative_eq!(st.distribution[&0], 3.0 / 9.0);
        assert_relative_eq!(st.distribution[&1], 4.0 / 9.0);
        assert_relative_eq!(st.distribution[&2], 2.0 / 9.0);
        assert_relative_eq!(st.dbar, 8.0 / 6.0);
        let total: f64 = st.distribution.values().sum();
        assert_relative_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn disconnected_distance_errors() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(distance_distribution(&g).is_err());
        assert!(betweenness(&g).is_err());
    }

    #[test]
    fn star_betweenness() {
        let mut edges = Vec::new();
        for leaf in 1..=5 {
            edges.push((0, leaf));
        }
        let g = Graph::from_edges(6, edges).unwrap();
        let bt = betweenness(&g).unwrap();
        assert_relative_eq!(bt.node[0], 20.0);
        for leaf in 1..=5 {
            assert_relative_eq!(bt.node[leaf], 0.0);
        }
    }

    #[test]
    fn path_betweenness() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let bt = betweenness(&g).unwrap();
        assert_relative_eq!(bt.node[1], 2.0);
        assert_relative_eq!(bt.node[0], 0.0);
        // every shortest path uses each edge once per direction
        assert_relative_eq!(bt.edge[&(0, 1)], 4.0);
    }

    #[test]
    fn clustering_values() {
        let r = clustering(&k4());
        assert_relative_eq!(r.cbar, 1.0);
        assert_relative_eq!(r.by_degree[&3], 1.0);

        let r = clustering(&paw());
        assert_relative_eq!(r.per_node[0], 1.0 / 3.0);
        assert_relative_eq!(r.per_node[1], 1.0);
        assert_relative_eq!(r.per_node[2], 1.0);
        assert_relative_eq!(r.per_node[3], 0.0);
        assert_relative_eq!(r.cbar, (1.0 / 3.0 + 2.0) / 4.0);
    }

    #[test]
    fn assortativity_cases() {
        let star = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(assortativity(&star).unwrap(), Some(-1.0));
        assert_eq!(assortativity(&k4()).unwrap(), None);
        assert!(assortativity(&Graph::with_nodes(3)).is_err());
    }

    #[test]
    fn assortativity_is_isomorphism_invariant() {
        let g = gnp(24, 0.2, 11);
        // relabel nodes by reversal
        let n = g.n() as u32;
        let relabeled = Graph::from_edges(
            g.n(),
            g.edges().iter().map(|&(u, v)| (n - 1 - u, n - 1 - v)),
        )
        .unwrap();
        let a = assortativity(&g).unwrap();
        let b = assortativity(&relabeled).unwrap();
        match (a, b) {
            (Some(x), Some(y)) => assert_relative_eq!(x, y, epsilon = 1e-14),
            (x, y) => assert_eq!(x, y),
        }
    }

    #[test]
    fn likelihoods() {
        assert_eq!(likelihood_s(&Graph::from_edges(2, [(0, 1)]).unwrap()), 1);
        assert_eq!(likelihood_s(&paw()), 19);
        let k3 = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(likelihood_s(&k3), 12);

        assert_eq!(second_order_likelihood(&paw()), 4);
        assert_eq!(second_order_likelihood(&k4()), 0);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(second_order_likelihood(&path), 1);

        // wedge-census route agrees
        let three = crate::dk::extract(&paw(), 3).unwrap();
        assert_eq!(s2_from_wedges(&three.as_three().unwrap().wedge_counts), 4);
    }

    #[test]
    fn full_report_on_small_graphs() {
        let rep = full_report(&k4()).unwrap();
        assert_relative_eq!(rep.kbar, 3.0);
        assert_relative_eq!(rep.cbar, 1.0);
        assert_relative_eq!(rep.dbar, 1.0);
        assert_relative_eq!(rep.sigma_d, 0.0);
        assert_eq!(rep.r, None);

        let rep = full_report(&paw()).unwrap();
        assert_relative_eq!(rep.kbar, 2.0);
        assert_eq!(rep.likelihood_s, 19);
        assert_eq!(rep.s2, 4);
        assert_relative_eq!(rep.cbar, 7.0 / 12.0, epsilon = 1e-12);
    }

    #[test]
    fn full_report_uses_gcc() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap();
        let rep = full_report(&g).unwrap();
        assert_eq!(rep.gcc_n, 3);
        assert_eq!((rep.n, rep.m), (6, 4));
    }
}
