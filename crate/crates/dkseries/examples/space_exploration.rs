//! dK-space exploration: greedy hill-climbs that keep the dK-distribution
//! fixed while pushing a higher-order scalar to its extremes. The spread
//! between min and max shows how much freedom the constraint leaves; the
//! random graph sits strictly between.
//!
//! ```bash
//! cargo run --release -p dkseries --example space_exploration
//! ```

use dkseries::dk::DkDistribution;
use dkseries::generators::{gen_matching, power_law_one_k};
use dkseries::metrics::{clustering, likelihood_s, second_order_likelihood};
use dkseries::rewiring::{explore, randomize, Direction, ExploreOptions, Objective, RandomizeOptions};

fn main() -> dkseries::Result<()> {
    let degrees = power_law_one_k(600, 2.2, 30, 33);
    let graph = gen_matching(&DkDistribution::One(degrees), 2, 32)?.graph;
    let opts = ExploreOptions::default();
    let budget = 1_000_000;

    // S under 1K-preserving exploration
    let (s_min, _) = explore(&graph, 1, Objective::S, Direction::Min, 10, budget, &opts)?;
    let (s_max, _) = explore(&graph, 1, Objective::S, Direction::Max, 11, budget, &opts)?;
    let (rand1, _) = randomize(
        &graph,
        1,
        12,
        &RandomizeOptions {
            budget_override: Some(40 * graph.m() as u64),
            verification_factor: 0.0,
            ..RandomizeOptions::default()
        },
    )?;
    println!(
        "S  (1K fixed): min {:>8}  random {:>8}  max {:>8}",
        likelihood_s(&s_min),
        likelihood_s(&rand1),
        likelihood_s(&s_max)
    );

    // S2 and C̄ under 2K-preserving exploration
    let (s2_min, _) = explore(&graph, 2, Objective::S2, Direction::Min, 13, budget, &opts)?;
    let (s2_max, _) = explore(&graph, 2, Objective::S2, Direction::Max, 14, budget, &opts)?;
    println!(
        "S₂ (2K fixed): min {:>8}  original {:>8}  max {:>8}",
        second_order_likelihood(&s2_min),
        second_order_likelihood(&graph),
        second_order_likelihood(&s2_max)
    );

    let (c_min, _) = explore(&graph, 2, Objective::Cbar, Direction::Min, 15, budget, &opts)?;
    let (c_max, _) = explore(&graph, 2, Objective::Cbar, Direction::Max, 16, budget, &opts)?;
    println!(
        "C̄  (2K fixed): min {:>8.4}  original {:>8.4}  max {:>8.4}",
        clustering(&c_min).cbar,
        clustering(&graph).cbar,
        clustering(&c_max).cbar
    );
    Ok(())
}
