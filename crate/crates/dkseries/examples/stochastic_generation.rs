//! Stochastic construction for d = 0, 1, 2: every node pair is connected
//! independently with the level-appropriate probability, so targets are met
//! in ensemble mean rather than exactly.
//!
//! ```bash
//! cargo run --release -p dkseries --example stochastic_generation
//! ```

use dkseries::dk::{extract, DkDistribution, ZeroK};
use dkseries::generators::{gen_matching, gen_stochastic, power_law_one_k};

fn main() -> dkseries::Result<()> {
    // d = 0: classical random graphs with a target average degree
    let target = DkDistribution::Zero(ZeroK { n: 20_000, kbar: 6.0 });
    let mut mean_m = 0.0;
    let runs = 20;
    for seed in 0..runs {
        mean_m += gen_stochastic(&target, seed)?.graph.m() as f64 / runs as f64;
    }
    println!(
        "0K: target expected m = {}, ensemble mean m = {mean_m:.0} over {runs} runs",
        6.0 * 20_000.0 * (20_000.0 - 1.0) / (2.0 * 20_000.0),
    );

    // d = 1: expected-degree labels from a power-law distribution
    let one = power_law_one_k(5000, 2.1, 70, 3);
    let expected_m = one.stub_total() as f64 / 2.0;
    let out = gen_stochastic(&DkDistribution::One(one.clone()), 9)?;
    println!(
        "1K: expected m = {expected_m:.0}, one draw m = {} (clamped pairs: {})",
        out.graph.m(),
        out.clamped_pairs
    );

    // d = 2: joint-degree-distribution probabilities
    let base = gen_matching(&DkDistribution::One(one), 5, 32)?.graph;
    let two = extract(&base, 2)?;
    let out = gen_stochastic(&two, 11)?;
    println!(
        "2K: target m = {}, one draw m = {}",
        two.as_two()?.edge_total(),
        out.graph.m()
    );
    Ok(())
}
