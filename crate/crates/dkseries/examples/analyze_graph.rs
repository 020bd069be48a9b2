//! Full metric report for a graph: average degree, assortativity, clustering,
//! distance statistics, likelihoods, and the Laplacian extremes.
//!
//! ```bash
//! cargo run --release -p dkseries --example analyze_graph
//! ```

use dkseries::dk::DkDistribution;
use dkseries::generators::{gen_matching, power_law_one_k};
use dkseries::metrics::full_report;

fn main() -> dkseries::Result<()> {
    // a synthetic AS-like topology: power-law degrees, built by matching
    let degrees = power_law_one_k(2000, 2.2, 60, 7);
    let graph = gen_matching(&DkDistribution::One(degrees), 42, 32)?.graph;

    let report = full_report(&graph)?;
    println!("n = {}, m = {} (GCC: {} / {})", report.n, report.m, report.gcc_n, report.gcc_m);
    println!("k̄        = {:.3}", report.kbar);
    println!("r         = {}", report.r.map_or("undef".into(), |r| format!("{r:.3}")));
    println!("C̄        = {:.4}", report.cbar);
    println!("d̄        = {:.3}", report.dbar);
    println!("σ_d       = {:.3}", report.sigma_d);
    println!("S         = {}", report.likelihood_s);
    println!("S₂        = {}", report.s2);
    println!("λ₁        = {:.4}", report.lambda1);
    println!("λ_{{n−1}}   = {:.4}", report.lambda_n1);

    let max_b = report
        .betweenness
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    println!("max node betweenness = {max_b:.1}");
    println!(
        "distance distribution mass at x ≤ 4: {:.3}",
        report
            .distance_distribution
            .iter()
            .filter(|(&x, _)| x <= 4)
            .map(|(_, p)| p)
            .sum::<f64>()
    );
    Ok(())
}
