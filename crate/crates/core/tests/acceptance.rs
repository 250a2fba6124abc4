//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary so the summary lines always reach the terminal.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use covnet::generate::{generate_instance, GeneratorSpec, Kind, Topology};
use covnet::graph::{self, VertexId};
use covnet::instance::{classify_demands, Instance};
use covnet::laminar::{self, LaminarCertificate};
use covnet::oracle::{self, OracleLimits};
use covnet::rational::{self, Rational};
use covnet::spanner::{self, TerminalRef};
use covnet::sunflower::{self, BoundMode};

type Outcome = Result<String, String>;

fn ensure(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn laminar_spec(seed: u64) -> GeneratorSpec {
    let n = 4 + (seed % 7) as usize;
    let lo = n - 1;
    let hi = 14.min(n * (n - 1) / 2);
    GeneratorSpec {
        kind: Kind::Laminar,
        n,
        m: lo + ((seed / 7) as usize) % (hi - lo + 1),
        g: 1 + (seed % 3) as usize,
        depth: 1 + ((seed / 3) % 3) as usize,
        seed: 1000 + seed,
        topology: Topology::Random,
    }
}

fn laminar_instances() -> Vec<Instance> {
    (0..200)
        .map(|s| generate_instance(&laminar_spec(s)).expect("generator"))
        .collect()
}

/// Criterion 1: laminar 2-approximation.
fn laminar_two_approximation(instances: &[Instance]) -> Outcome {
    let limits = OracleLimits::default();
    let mut worst = Rational::from_integer(0.into());
    let mut cross_checked = 0;
    for (i, inst) in instances.iter().enumerate() {
        let fail = |what: String| format!("instance {i}: {what}");
        ensure(inst.graph().vertex_count() <= 10 && inst.graph().edge_count() <= 14, || fail("size".into()))?;
        ensure(inst.demands().len() <= 4 && inst.group_count() <= 3, || fail("shape".into()))?;
        let (routing, cert) = laminar::solve_laminar(inst).map_err(|e| fail(e.to_string()))?;
        let two = LaminarCertificate::ratio_bound();
        ensure(cert.primal <= &two * &cert.dual, || {
            fail(format!("primal {} > 2 * dual {}", cert.primal, cert.dual))
        })?;
        ensure(common::dual_feasible(inst, &cert.duals), || fail("dual infeasible".into()))?;
        ensure(common::dual_cuts_separate(inst, &cert.duals), || fail("dual cut separates nothing".into()))?;
        ensure(laminar::check_dual_feasibility(inst, &cert.duals).is_empty(), || {
            fail("library dual checker disagrees".into())
        })?;
        for (j, g) in inst.groups().iter().enumerate() {
            ensure(common::connected_by(inst.graph(), &routing.trees[j], &g.terminals), || {
                fail(format!("group {j} not connected"))
            })?;
        }
        ensure(laminar::check_primal_feasibility(inst, &cert.forests), || fail("primal infeasible".into()))?;
        let load = common::load_cost(inst, &routing.trees);
        ensure(load <= cert.primal, || fail(format!("routing load {load} > primal {}", cert.primal)))?;

        let (_, opt) = oracle::exact_coverage_optimum(inst, &limits).map_err(|e| fail(e.to_string()))?;
        if inst.graph().edge_count() <= 10 {
            let naive = common::coverage_optimum(inst);
            ensure(naive == opt, || fail(format!("oracle {opt} vs brute force {naive}")))?;
            cross_checked += 1;
        }
        ensure(cert.primal <= &two * &opt, || fail(format!("primal {} > 2 * optimum {opt}", cert.primal)))?;
        ensure(opt >= cert.dual, || fail(format!("dual {} above optimum {opt}", cert.dual)))?;
        let ratio = &cert.primal / &opt;
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(format!(
        "{} instances, worst primal/optimum {worst}, {cross_checked} optima matched by brute force",
        instances.len()
    ))
}

/// Criterion 2: the forest invariant for every demand set.
fn forest_invariant(instances: &[Instance]) -> Outcome {
    let mut sets = 0;
    for (i, inst) in instances.iter().enumerate() {
        let (_, cert) = laminar::solve_laminar(inst).map_err(|e| e.to_string())?;
        for (d, packets) in inst.demands().iter().enumerate() {
            let union: Vec<usize> = inst
                .demands()
                .iter()
                .enumerate()
                .filter(|(_, other)| packets.is_subset(other))
                .flat_map(|(o, _)| cert.forests[o].iter().copied())
                .collect();
            ensure(common::acyclic(inst.graph(), &union), || {
                format!("instance {i}: union above demand set {d} has a cycle")
            })?;
            sets += 1;
        }
        ensure(laminar::forest_violations(inst, &cert.forests).is_empty(), || {
            format!("instance {i}: library forest check disagrees")
        })?;
    }
    Ok(format!("{sets} demand sets over {} instances, zero cycles", instances.len()))
}

struct SpannerCase {
    label: String,
    graph: graph::Graph,
    groups: Vec<Vec<VertexId>>,
}

/// Path `0..p` plus hubs joined to every path vertex, one pair group per spoke.
/// The spanning tree keeps only the spokes at vertex 0, so phase 1 flips paths.
fn fan(p: usize, hubs: usize) -> SpannerCase {
    let mut edges: Vec<(usize, usize)> = (0..p - 1).map(|i| (i, i + 1)).collect();
    let mut groups = Vec::new();
    for h in p..p + hubs {
        for i in 0..p {
            edges.push((i, h));
            groups.push(vec![i, h]);
        }
    }
    SpannerCase {
        label: format!("fan p = {p}, hubs = {hubs}"),
        graph: graph::Graph::unit(p + hubs, &edges).unwrap(),
        groups,
    }
}

fn spanner_cases() -> Result<Vec<SpannerCase>, String> {
    (0..100u64)
        .map(|s| {
            let spec = match s % 10 {
                4 => return Ok(fan(20 + (s as usize * 3) % 39, 1 + (s as usize / 10) % 2)),
                9 => {
                    let n = 8 + (s as usize * 5) % 53;
                    GeneratorSpec {
                        topology: Topology::Cycle,
                        ..GeneratorSpec::new(Kind::UniformPairs, n.min(60), 0, 0, s)
                    }
                }
                _ => {
                    let n = 8 + (s as usize * 7) % 53;
                    let m = (n - 1 + (s as usize * 11) % (2 * n)).min(n * (n - 1) / 2);
                    let g = 2 + (s as usize * 3) % (n / 2 - 1);
                    GeneratorSpec::new(Kind::Sunflower, n, m, g, 5000 + s)
                }
            };
            let inst = generate_instance(&spec).map_err(|e| e.to_string())?;
            if !inst.covers_all_vertices() {
                return Err(format!("seed {}: groups do not cover V", spec.seed));
            }
            Ok(SpannerCase {
                label: format!("seed {}", spec.seed),
                groups: terminal_sets(&inst),
                graph: inst.graph().clone(),
            })
        })
        .collect()
}

fn terminal_sets(inst: &Instance) -> Vec<Vec<VertexId>> {
    inst.groups().iter().map(|g| g.terminals.clone()).collect()
}

/// Criterion 3: spanner size and orientation certificates.
fn spanner_sizes() -> Outcome {
    let mut max_a = (0usize, 0usize);
    let mut flips = 0;
    for case in spanner_cases()? {
        let fail = |what: String| format!("{}: {what}", case.label);
        let (graph, groups) = (&case.graph, &case.groups);
        ensure(graph.vertex_count() <= 60, || fail("more than 60 vertices".into()))?;
        let mut builder = spanner::SpannerBuilder::new(graph, groups).map_err(|e| fail(e.to_string()))?;
        let terminals: Vec<TerminalRef> = builder.uniform().terminals().collect();
        let mut steps = 0;
        loop {
            let before = steps;
            for &t in &terminals {
                if builder.phase1_step(t).is_some() {
                    steps += 1;
                    let max = (0..graph.vertex_count()).map(|v| builder.arcs.out_degree(v)).max().unwrap();
                    ensure(max <= 2, || fail(format!("out-degree {max} after step {steps}")))?;
                }
            }
            if steps == before {
                break;
            }
        }
        builder.run_phase2();
        let r = builder.finish(steps);
        let (n, t) = (graph.vertex_count(), r.t.len());
        ensure(r.a1.len() <= 2 * n, || fail(format!("|A1| = {}", r.a1.len())))?;
        ensure(r.a2.len() <= n, || fail(format!("|A2| = {}", r.a2.len())))?;
        ensure(r.a1.len() + r.a2.len() <= 6 * t, || fail("|A1| + |A2| > 6|T|".into()))?;
        let girth = common::girth(n, &r.arcs);
        ensure(girth.map_or(true, |g| g >= r.levels), || {
            fail(format!("girth {girth:?} < L = {}", r.levels))
        })?;
        ensure(r.max_out_degree <= 2, || fail("recorded out-degree above 2".into()))?;
        max_a.0 = max_a.0.max(r.a1.len());
        max_a.1 = max_a.1.max(r.a2.len());
        flips += r.flips;
    }
    Ok(format!(
        "100 instances, zero violations (largest |A1| = {}, |A2| = {}, {flips} path flips)",
        max_a.0, max_a.1
    ))
}

/// Criterion 4: exact stretch on small groups and 2L predecessor distances.
fn spanner_stretch() -> Outcome {
    let limits = OracleLimits::default();
    let mut exact_groups = 0;
    let mut terminals_checked = 0;
    for case in spanner_cases()? {
        let fail = |what: String| format!("{}: {what}", case.label);
        let (graph, groups) = (&case.graph, &case.groups);
        let r = spanner::build_group_spanner(graph, groups).map_err(|e| fail(e.to_string()))?;
        let h_graph = graph.subgraph(&r.h);
        let four_l = rational::int(4 * r.levels as i64);
        for (j, x) in groups.iter().enumerate() {
            if x.len() > 6 {
                continue;
            }
            let (_, in_h) = oracle::exact_steiner_tree(&h_graph, x, &limits).map_err(|e| fail(e.to_string()))?;
            let (_, in_g) = oracle::exact_steiner_tree(graph, x, &limits).map_err(|e| fail(e.to_string()))?;
            ensure(in_h <= &four_l * &in_g, || {
                fail(format!("group {j}: St_H = {in_h} > 4L St_G = {four_l} * {in_g}"))
            })?;
            exact_groups += 1;
        }
        for (j, order) in r.uniform.order.iter().enumerate() {
            for i in 1..order.len() {
                let dist = common::hops(graph, &r.h, order[i]);
                let nearest = order[..i].iter().filter_map(|&v| dist[v]).min();
                ensure(nearest.is_some_and(|d| d <= 2 * r.levels), || {
                    fail(format!("group {j} terminal {} at distance {nearest:?}", order[i]))
                })?;
                terminals_checked += 1;
            }
        }
    }
    ensure(exact_groups > 0, || "no group small enough for the exact check".into())?;
    Ok(format!(
        "{exact_groups} groups with exact St_H <= 4L St_G, {terminals_checked} terminals within 2L"
    ))
}

fn sunflower_spec(seed: u64) -> GeneratorSpec {
    let n = 5 + (seed % 5) as usize;
    let lo = n - 1;
    let hi = 14.min(n * (n - 1) / 2);
    let g = if n >= 6 { 2 + (seed % 2) as usize } else { 2 };
    GeneratorSpec::new(Kind::Sunflower, n, lo + ((seed / 5) as usize) % (hi - lo + 1), g, 9000 + seed)
}

/// Criterion 5: sunflower cost within 14 + 8L of the optimum, above the lower bound.
fn sunflower_end_to_end() -> Outcome {
    let limits = OracleLimits::default();
    let mut worst = Rational::from_integer(0.into());
    for seed in 0..50 {
        let inst = generate_instance(&sunflower_spec(seed)).map_err(|e| e.to_string())?;
        let fail = |what: String| format!("seed {seed}: {what}");
        let sol = sunflower::solve_sunflower(&inst).map_err(|e| fail(e.to_string()))?;
        ensure(sol.bound_applies(), || fail("groups do not cover V".into()))?;
        ensure(common::load_cost(&inst, &sol.routing.trees) == sol.cost, || fail("cost formula".into()))?;
        let lower = sunflower::sunflower_lower_bound(&inst, BoundMode::Oracle, &limits)
            .map_err(|e| fail(e.to_string()))?;
        let relaxed = sunflower::sunflower_lower_bound(&inst, BoundMode::Relaxed, &limits)
            .map_err(|e| fail(e.to_string()))?;
        let (_, opt) = oracle::exact_coverage_optimum(&inst, &limits).map_err(|e| fail(e.to_string()))?;
        ensure(sol.cost >= lower.value, || fail(format!("cost {} < lower bound {}", sol.cost, lower.value)))?;
        ensure(opt >= lower.value && lower.value >= relaxed.value, || {
            fail(format!("bounds out of order: relaxed {} oracle {} optimum {opt}", relaxed.value, lower.value))
        })?;
        ensure(sol.cost <= sol.ratio_bound() * &opt, || {
            fail(format!("cost {} > {} * optimum {opt}", sol.cost, sol.ratio_bound()))
        })?;
        let ratio = &sol.cost / &opt;
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(format!("50 instances, worst cost/optimum {worst} (bound 14 + 8L >= 22)"))
}

/// Criterion 6: single-group sunflowers and pairwise-disjoint laminar families.
fn degenerate_reductions() -> Outcome {
    let limits = OracleLimits::default();
    for seed in 0..30u64 {
        let n = 3 + (seed % 6) as usize;
        let m = (n - 1 + (seed as usize) % n).min(n * (n - 1) / 2);
        let inst = generate_instance(&GeneratorSpec::new(Kind::Sunflower, n, m, 1, 300 + seed))
            .map_err(|e| e.to_string())?;
        let fail = |what: String| format!("single group, seed {seed}: {what}");
        let sol = sunflower::solve_sunflower(&inst).map_err(|e| fail(e.to_string()))?;
        let shape = classify_demands(&inst).sunflower.expect("sunflower");
        let h_graph = inst.graph().subgraph(&sol.spanner.h);
        let x = &inst.groups()[0].terminals;
        let heuristic = h_graph.cost_of(&graph::steiner_mst_heuristic(&h_graph, x).map_err(|e| fail(e.to_string()))?);
        let weight = inst.weight(&shape.core) + inst.weight(&shape.petals[0]);
        ensure(sol.cost == &weight * &heuristic, || {
            fail(format!("cost {} != {weight} * {heuristic}", sol.cost))
        })?;
        let exact = common::steiner_cost(inst.graph(), x);
        ensure(heuristic <= rational::int(2) * &exact, || {
            fail(format!("heuristic {heuristic} > 2 * exact {exact}"))
        })?;
        let (_, dw) = oracle::exact_steiner_tree(inst.graph(), x, &limits).map_err(|e| fail(e.to_string()))?;
        ensure(dw == exact, || fail(format!("Dreyfus-Wagner {dw} vs brute force {exact}")))?;
    }

    let mut disjoint = 0;
    for seed in 0..60u64 {
        let mut spec = laminar_spec(seed);
        spec.depth = 1;
        spec.g = 3;
        spec.seed = 7000 + seed;
        let inst = generate_instance(&spec).map_err(|e| e.to_string())?;
        let ds = inst.demands();
        let pairwise_disjoint = ds.iter().enumerate().all(|(i, a)| ds[i + 1..].iter().all(|b| a.is_disjoint(b)));
        ensure(pairwise_disjoint, || format!("seed {seed}: generator produced nested demands"))?;
        let (_, whole) = laminar::solve_laminar(&inst).map_err(|e| e.to_string())?;
        let mut parts = Rational::from_integer(0.into());
        for d in 0..ds.len() {
            let keep: Vec<usize> = (0..inst.group_count()).filter(|&j| inst.demand_of_group(j) == d).collect();
            let sub = inst.restrict_groups(&keep).map_err(|e| e.to_string())?;
            parts += laminar::solve_laminar(&sub).map_err(|e| e.to_string())?.1.primal;
        }
        ensure(parts == whole.primal, || {
            format!("seed {seed}: whole {} vs per-demand sum {parts}", whole.primal)
        })?;
        disjoint += 1;
    }
    Ok(format!("30 single-group sunflowers, {disjoint} disjoint laminar families decomposed exactly"))
}

fn covnet(args: &[&str], dir: &Path) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_covnet"))
        .args(args)
        .current_dir(dir)
        .env_remove(OracleLimits::ENV_VAR)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("covnet-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

/// Criterion 7: byte-identical reruns and packet-oblivious spanners.
fn determinism() -> Outcome {
    let dir = scratch_dir();
    std::fs::write(
        dir.join("run.json"),
        r#"{"families": [
            {"spec": {"kind": "laminar", "n": 7, "m": 10, "g": 3, "seed": 3}, "count": 4},
            {"spec": {"kind": "sunflower", "n": 8, "m": 11, "g": 3, "seed": 4}, "count": 4}
        ]}"#,
    )
    .map_err(|e| e.to_string())?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "--kind", "laminar", "--n", "8", "--m", "12", "--g", "3", "--seed", "11", "--output", "lam.json"],
        vec!["gen", "--kind", "sunflower", "--n", "9", "--m", "13", "--g", "3", "--seed", "12", "--output", "sun.json"],
        vec!["solve", "--input", "lam.json", "--certificate", "cert.json", "--output", "lam-sol.json"],
        vec!["solve", "--algo", "sunflower", "--input", "sun.json", "--bound", "oracle", "--output", "sun-sol.json"],
        vec!["spanner", "--input", "sun.json", "--certify", "--output", "span.json"],
        vec!["oracle", "--input", "lam.json", "--output", "opt.json"],
        vec!["verify", "--instance", "lam.json", "--artifact", "cert.json"],
        vec!["verify", "--instance", "sun.json", "--artifact", "span.json"],
        vec!["batch", "run.json", "--output", "batch.csv"],
    ];
    let mut compared = 0;
    for args in &commands {
        let output_file = args
            .iter()
            .position(|a| *a == "--output")
            .map(|i| args[i + 1]);
        let mut runs = Vec::new();
        for _ in 0..2 {
            let (code, stdout) = covnet(args, &dir)?;
            ensure(code == 0, || format!("`covnet {}` exited {code}", args.join(" ")))?;
            let mut bytes = stdout;
            for extra in output_file.iter().chain(args.iter().any(|a| *a == "--certificate").then_some(&"cert.json")) {
                bytes.extend(std::fs::read(dir.join(extra)).map_err(|e| e.to_string())?);
            }
            runs.push(bytes);
        }
        ensure(runs[0] == runs[1], || format!("`covnet {}` output differs between runs", args.join(" ")))?;
        compared += 1;
    }

    let mut permuted = 0;
    for seed in 0..25u64 {
        let inst = generate_instance(&GeneratorSpec::new(Kind::Sunflower, 12, 18, 3, 400 + seed))
            .map_err(|e| e.to_string())?;
        let base = sunflower::solve_sunflower(&inst).map_err(|e| e.to_string())?;
        let g = inst.group_count();
        let variants: Vec<Vec<Vec<String>>> = vec![
            (0..g).map(|j| vec!["core".into(), format!("petal{}", (j + 1) % g)]).collect(),
            (0..g).map(|j| vec!["x".into(), "y".into(), format!("z{j}")]).collect(),
            (0..g).map(|j| vec![format!("only{j}")]).collect(),
        ];
        for demands in variants {
            let other = inst.with_demands(Default::default(), demands).map_err(|e| e.to_string())?;
            let sol = sunflower::solve_sunflower(&other).map_err(|e| e.to_string())?;
            ensure(sol.spanner.h == base.spanner.h, || format!("seed {seed}: H changed with packet contents"))?;
            permuted += 1;
        }
        let path_a = dir.join("obl-a.json");
        let path_b = dir.join("obl-b.json");
        let other = inst
            .with_demands(Default::default(), (0..g).map(|j| vec![format!("q{}", g - j)]).collect())
            .map_err(|e| e.to_string())?;
        std::fs::write(&path_a, covnet::io::instance_to_json(&inst)).map_err(|e| e.to_string())?;
        std::fs::write(&path_b, covnet::io::instance_to_json(&other)).map_err(|e| e.to_string())?;
        let (_, a) = covnet(&["spanner", "--input", "obl-a.json"], &dir)?;
        let (_, b) = covnet(&["spanner", "--input", "obl-b.json"], &dir)?;
        ensure(a == b && !a.is_empty(), || format!("seed {seed}: CLI spanner output depends on packets"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{compared} commands byte-identical on rerun, {permuted} packet permutations leave H unchanged"))
}

fn main() {
    let started = Instant::now();
    let laminar = laminar_instances();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("laminar 2-approximation", Box::new(|| laminar_two_approximation(&laminar))),
        ("forest invariant", Box::new(|| forest_invariant(&laminar))),
        ("spanner size certificates", Box::new(spanner_sizes)),
        ("spanner stretch certificate", Box::new(spanner_stretch)),
        ("sunflower end-to-end", Box::new(sunflower_end_to_end)),
        ("degenerate reductions", Box::new(degenerate_reductions)),
        ("determinism and obliviousness", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(summary) => println!("criterion {} PASS {name}: {summary} [{secs:.1}s]", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {reason} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
