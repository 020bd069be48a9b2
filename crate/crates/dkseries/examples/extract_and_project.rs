//! Extracting dK-distributions (d = 0..3) and walking back down the series
//! via projection: 2K determines 1K, 1K determines the average degree.
//!
//! ```bash
//! cargo run --release -p dkseries --example extract_and_project
//! ```

use dkseries::dk::{extract, project, DkDistribution};
use dkseries::graph::Graph;

fn main() -> dkseries::Result<()> {
    // the 4-node worked example: a triangle with one pendant edge
    let graph = Graph::from_edges(4, [(0, 1), (0, 2), (1, 2), (0, 3)])?;

    for d in 0..=3 {
        let dist = extract(&graph, d)?;
        println!("--- d = {d} ---");
        println!("{}", dist.to_json_string());
    }

    let two = extract(&graph, 2)?;
    let one = project(&two)?;
    println!("\n2K projected down to 1K: {}", one.to_json_string());
    assert_eq!(one, extract(&graph, 1)?);

    let zero = project(&one)?;
    if let DkDistribution::Zero(z) = &zero {
        println!("1K projected down to 0K: k̄ = {}", z.kbar);
    }
    assert_eq!(zero, extract(&graph, 0)?);

    // 3K holds enough information to rebuild the joint degree distribution
    // by edge counting (isolated-edge components aside)
    let three = extract(&graph, 3)?;
    let jdd = three.as_three()?.to_jdd()?;
    assert_eq!(DkDistribution::Two(jdd), two);
    println!("3K edge-count inversion reproduces the 2K exactly");
    Ok(())
}
