// Routes a sunflower instance on a weighted graph by subdividing it first.

use std::collections::BTreeMap;

use covnet::graph::{self, Graph};
use covnet::oracle::OracleLimits;
use covnet::rational::int;
use covnet::sunflower::{self, BoundMode};
use covnet::{Instance, Result};

pub fn run_example() -> Result<()> {
    let weighted = Graph::new(
        5,
        vec![(0, 1, int(2)), (1, 2, int(1)), (2, 3, int(1)), (3, 4, int(2)), (0, 4, int(3))],
    )?;
    // Every edge of cost c becomes c unit edges; original vertex ids are kept.
    let graph = graph::subdivide_edges(&weighted)?;
    println!("{} vertices, {} unit edges", graph.vertex_count(), graph.edge_count());

    // Core packet "k" is shared; each group adds its own petal packet.
    let mut groups = vec![
        (vec![0, 1, 2], vec!["k".to_string(), "p0".to_string()]),
        (vec![2, 3, 4], vec!["k".to_string(), "p1".to_string()]),
    ];
    let covered: Vec<usize> = (5..graph.vertex_count()).collect();
    if !covered.is_empty() {
        groups.push((covered, vec!["k".to_string(), "p2".to_string()]));
    }
    let instance = Instance::new(graph, BTreeMap::new(), groups)?;

    let solution = sunflower::solve_sunflower(&instance)?;
    let lower = sunflower::sunflower_lower_bound(&instance, BoundMode::Relaxed, &OracleLimits::default())?;
    println!("core edges {:?}", solution.core_edges);
    println!("cost {}, lower bound {}, ratio bound {}", solution.cost, lower.value, solution.ratio_bound());
    assert!(solution.cost >= lower.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
