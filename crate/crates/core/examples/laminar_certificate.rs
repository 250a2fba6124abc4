// Solves a nested-demand instance and prints the dual certificate.

use std::collections::BTreeMap;

use covnet::graph::Graph;
use covnet::laminar;
use covnet::rational::int;
use covnet::{Instance, Result};

pub fn run_example() -> Result<()> {
    // A 4-cycle with one chord. The inner group wants {a}; the outer wants {a, b}.
    let graph = Graph::new(
        4,
        vec![(0, 1, int(1)), (1, 2, int(1)), (2, 3, int(1)), (3, 0, int(3)), (0, 2, int(2))],
    )?;
    let packets = BTreeMap::from([("a".to_string(), int(2)), ("b".to_string(), int(1))]);
    let instance = Instance::new(
        graph,
        packets,
        vec![
            (vec![0, 1], vec!["a".into()]),
            (vec![0, 3], vec!["a".into(), "b".into()]),
        ],
    )?;

    let (routing, cert) = laminar::solve_laminar(&instance)?;
    for (j, tree) in routing.trees.iter().enumerate() {
        println!("group {j}: edges {tree:?}");
    }
    for y in &cert.duals {
        println!("y[demand {}, cut {:?}] = {}", y.demand, y.cut, y.value);
    }
    println!("primal {} <= 2 * dual {}", cert.primal, cert.dual);
    assert!(laminar::check_dual_feasibility(&instance, &cert.duals).is_empty());
    assert!(cert.primal <= int(2) * &cert.dual);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
