//! Edge-list parsing: comments, blank lines, CRLF, arbitrary node labels
//! (compacted to dense ids with the original labels kept), and dropped
//! self-loops / duplicates, plus canonical output.
//!
//! ```bash
//! cargo run --release -p dkseries --example edge_list_io
//! ```

use dkseries::edgelist::{load_edge_list, write_edge_list_labeled};
use dkseries::graph::giant_connected_component;

fn main() -> dkseries::Result<()> {
    let text = "\
# an AS adjacency snippet with warts
7018 701
701 3356\r
3356 7018
7018 7018
701 7018

9121 12956
";
    let loaded = load_edge_list(text)?;
    println!(
        "parsed n = {}, m = {} (dropped {} self-loops, {} duplicates)",
        loaded.graph.n(),
        loaded.graph.m(),
        loaded.dropped_self_loops,
        loaded.dropped_duplicates
    );
    println!("label map: {:?}", loaded.original_ids);

    let gcc = giant_connected_component(&loaded.graph)?;
    println!(
        "component sizes {:?}; GCC keeps original labels {:?}",
        gcc.component_sizes,
        gcc.node_map
            .iter()
            .map(|&v| loaded.original_ids[v as usize])
            .collect::<Vec<_>>()
    );

    print!(
        "canonical output:\n{}",
        write_edge_list_labeled(&loaded.graph, &loaded.original_ids)?
    );
    Ok(())
}
