// Exact Steiner trees and coverage optima on a seeded small instance.

use covnet::generate::{generate_instance, GeneratorSpec, Kind};
use covnet::laminar;
use covnet::oracle::{self, OracleLimits};
use covnet::Result;

pub fn run_example() -> Result<()> {
    let instance = generate_instance(&GeneratorSpec::new(Kind::Laminar, 6, 9, 3, 7))?;
    let limits = OracleLimits::default();

    for (j, group) in instance.groups().iter().enumerate() {
        let (tree, cost) = oracle::exact_steiner_tree(instance.graph(), &group.terminals, &limits)?;
        println!("group {j} {:?}: St = {cost} via {tree:?}", group.terminals);
    }
    let (_, optimum) = oracle::exact_coverage_optimum(&instance, &limits)?;
    let (_, cert) = laminar::solve_laminar(&instance)?;
    println!("optimum {optimum}, primal-dual {}", cert.primal);
    assert!(cert.primal <= covnet::rational::int(2) * &optimum && cert.dual <= optimum);

    // Inputs above the limits are refused rather than attempted.
    let tight = limits.with_overrides("e=3")?;
    assert!(oracle::exact_coverage_optimum(&instance, &tight).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
