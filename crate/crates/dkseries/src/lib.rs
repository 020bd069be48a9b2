//! Degree-correlation topology analysis and generation.
//!
//! This crate extracts dK-distributions (d = 0..3) from simple undirected
//! graphs, generates random graphs constrained to match a target
//! distribution, and computes a suite of topology metrics so originals and
//! synthetic graphs can be compared quantitatively.
//!
//! - [`graph`]: graph storage, edge swaps, connected components
//! - [`edgelist`]: edge-list text I/O
//! - [`dk`]: dK-distribution extraction, projection, distance
//! - [`metrics`]: distance distribution, betweenness, clustering,
//!   assortativity, likelihoods, Laplacian spectrum
//! - [`generators`]: stochastic, pseudograph (configuration), and matching
//!   construction from a target distribution
//! - [`rewiring`]: dK-preserving edge-swap chains — randomizing, targeting
//!   with Metropolis temperature, and extremal-metric exploration
//! - [`cli`]: the `analyze` / `generate` / `rewire` / `compare` pipeline
//!
//! See the crate `examples/` directory for one runnable example per
//! capability, e.g. `cargo run --release -p dkseries --example targeting_rewiring`.

pub mod cli;
pub mod dk;
pub mod edgelist;
pub mod error;
pub mod generators;
pub mod graph;
pub mod metrics;
pub mod rewiring;
pub mod spectrum;

pub use dk::{count_subgraphs_bruteforce, distance, extract, project, DkDistribution};
pub use edgelist::{load_edge_list, write_edge_list, LoadedGraph};
pub use error::{Error, Result};
pub use generators::{GenOutcome, GenSpec};
pub use graph::{giant_connected_component, swap_edges, CrossMode, Graph};
pub use metrics::{full_report, MetricsReport};
pub use rewiring::{explore, randomize, target_rewire, RunTrace};

#[cfg(test)]
pub(crate) mod testutil {
    use crate::graph::Graph;
    use rand::Rng;
    use rand_chacha::ChaCha12Rng;
    use rand_chacha::rand_core::SeedableRng;

    /// Triangle 0,1,2 with pendant 3 attached to 0. Degrees {3, 2, 2, 1}.
    pub fn paw() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)]).unwrap()
    }

    /// Seeded Erdős–Rényi graph.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut g = Graph::with_nodes(n);
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.random::<f64>() < p {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}
