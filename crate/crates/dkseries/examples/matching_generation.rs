//! The matching family: the pseudograph layout with loop avoidance, bounded
//! backtracking, and restarts. Success gives a simple graph whose 1K or 2K
//! distribution equals the target exactly.
//!
//! ```bash
//! cargo run --release -p dkseries --example matching_generation
//! ```

use dkseries::dk::{extract, DkDistribution};
use dkseries::generators::{gen_matching, power_law_one_k};

fn main() -> dkseries::Result<()> {
    // exact degree sequence
    let one = power_law_one_k(3000, 2.1, 80, 23);
    let out = gen_matching(&DkDistribution::One(one.clone()), 4, 32)?;
    assert_eq!(extract(&out.graph, 1)?.as_one()?, &one);
    println!(
        "1K matching: n = {}, m = {}, restarts = {}, degree sequence exact",
        out.graph.n(),
        out.graph.m(),
        out.restarts
    );

    // exact joint degree distribution
    let two = extract(&out.graph, 2)?;
    let regen = gen_matching(&two, 99, 32)?;
    assert_eq!(extract(&regen.graph, 2)?, two);
    println!(
        "2K matching: {} edge types reproduced exactly, restarts = {}",
        two.as_two()?.counts.len(),
        regen.restarts
    );
    Ok(())
}
