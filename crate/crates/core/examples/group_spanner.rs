// Builds a group spanner on the 16-cycle with one pair group per edge.

use covnet::graph::Graph;
use covnet::spanner;
use covnet::Result;

pub fn run_example() -> Result<()> {
    let n = 16;
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let graph = Graph::unit(n, &edges)?;
    let groups: Vec<Vec<usize>> = edges.iter().map(|&(u, v)| vec![u, v]).collect();

    let result = spanner::build_group_spanner(&graph, &groups)?;
    println!("L = {}", result.levels);
    println!("|T| = {}, |A1| = {}, |A2| = {}", result.t.len(), result.a1.len(), result.a2.len());
    println!("arcs {:?}", result.arcs);

    let report = spanner::certify_spanner(&result, &graph, &groups, 6)?;
    print!("{}", report.report);
    assert!(report.report.passed());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
