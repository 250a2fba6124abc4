//! Independent re-checking of written artifacts against an instance.

use num_traits::Zero;

use crate::error::Result;
use crate::graph;
use crate::instance::{self, classify_demands, Instance, RoutingSolution};
use crate::io::{Artifact, CertificateFile, SolutionFile, SpannerFile};
use crate::laminar::{self, LaminarCertificate};
use crate::oracle::OracleLimits;
use crate::rational::Rational;
use crate::report::{Check, Report};
use crate::spanner;
use crate::sunflower::{self, BoundMode};

pub fn verify(instance: &Instance, artifact: &Artifact, limits: &OracleLimits) -> Result<Report> {
    let mut report = Report::default();
    match artifact {
        Artifact::Solution(file) => {
            verify_solution(instance, file, limits, &mut report)?;
        }
        Artifact::Certificate(file) => verify_certificate(instance, file, &mut report)?,
        Artifact::Spanner(file) => verify_spanner(instance, file, limits, &mut report)?,
        Artifact::Oracle(file) => {
            let cost = verify_solution(instance, &file.solution, limits, &mut report)?;
            if let Some(cost) = cost {
                report.push(Check::new(
                    "optimum equals solution cost",
                    cost == file.optimum,
                    format!("optimum {}, solution {cost}", file.optimum),
                ));
            }
        }
    }
    Ok(report)
}

/// Per-group tree checks; returns the recomputed cost when every tree is valid.
fn check_trees(instance: &Instance, routing: &RoutingSolution, report: &mut Report) -> Option<Rational> {
    let graph = instance.graph();
    let count_ok = routing.trees.len() == instance.group_count();
    report.push(Check::new(
        "one tree per group",
        count_ok,
        format!("{} trees, {} groups", routing.trees.len(), instance.group_count()),
    ));
    if !count_ok {
        return None;
    }
    let mut all_ok = true;
    for (j, tree) in routing.trees.iter().enumerate() {
        let acyclic = graph::is_forest(graph, tree);
        let spans = graph::connects(graph, tree, &instance.groups()[j].terminals);
        all_ok &= acyclic && spans;
        report.push(Check::new(
            format!("primal: tree {j} spans group {j}"),
            acyclic && spans,
            match (acyclic, spans) {
                (true, true) => format!("{} edges", tree.len()),
                (false, _) => "tree has a cycle".to_string(),
                (true, false) => format!(
                    "group {j} terminals {:?} not connected",
                    instance.groups()[j].terminals
                ),
            },
        ));
    }
    if !all_ok {
        return None;
    }
    instance::load_cost(instance, routing).ok()
}

fn verify_solution(
    instance: &Instance,
    file: &SolutionFile,
    limits: &OracleLimits,
    report: &mut Report,
) -> Result<Option<Rational>> {
    let routing = match file.routing(instance) {
        Ok(r) => r,
        Err(e) => {
            report.push(Check::new("edges exist", false, e.to_string()));
            return Ok(None);
        }
    };
    let Some(cost) = check_trees(instance, &routing, report) else {
        return Ok(None);
    };
    report.push(Check::new(
        "cost equals load cost",
        cost == file.cost,
        format!("claimed {}, recomputed {cost}", file.cost),
    ));

    let lower = file.lower_bound()?;
    if let (Some(lower), Some(mode)) = (&lower, &file.bound_mode) {
        let mode: BoundMode = mode.parse()?;
        if classify_demands(instance).sunflower.is_some() {
            match sunflower::sunflower_lower_bound(instance, mode, limits) {
                Ok(recomputed) => report.push(Check::new(
                    "lower bound recomputes",
                    recomputed.value == *lower,
                    format!("claimed {lower}, recomputed {}", recomputed.value),
                )),
                Err(e) => report.push(Check::new("lower bound recomputes", false, e.to_string())),
            }
        }
    }
    if let Some(lower) = &lower {
        if let Some(ratio) = file.ratio()? {
            let expected = (!lower.is_zero()).then(|| &cost / lower);
            report.push(Check::new(
                "ratio equals cost / lower bound",
                expected.as_ref() == Some(&ratio),
                match &expected {
                    Some(e) => format!("claimed {ratio}, recomputed {e}"),
                    None => format!("claimed {ratio}, lower bound is zero"),
                },
            ));
        }
        if let Some(bound) = file.ratio_bound()? {
            report.push(Check::new(
                "cost <= ratio bound * lower bound",
                cost <= &bound * lower,
                format!("cost {cost}, lower bound {lower}, ratio bound {bound}"),
            ));
        }
    }
    Ok(Some(cost))
}

fn verify_certificate(instance: &Instance, file: &CertificateFile, report: &mut Report) -> Result<()> {
    let cert = match file.to_certificate(instance) {
        Ok(c) => c,
        Err(e) => {
            report.push(Check::new("certificate resolves", false, e.to_string()));
            return Ok(());
        }
    };
    report.push(Check::new(
        "demands are laminar",
        classify_demands(instance).laminar,
        "pairwise nested or disjoint",
    ));

    let violations = laminar::check_dual_feasibility(instance, &cert.duals);
    report.push(Check::new(
        "dual feasibility",
        violations.is_empty(),
        if violations.is_empty() {
            format!("{} dual variables", cert.duals.len())
        } else {
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
        },
    ));

    let disconnected = laminar::disconnected_groups(instance, &cert.forests);
    report.push(Check::new(
        "primal feasibility",
        disconnected.is_empty(),
        if disconnected.is_empty() {
            "every group connected".to_string()
        } else {
            format!("disconnected groups {disconnected:?}")
        },
    ));

    let cycles = laminar::forest_violations(instance, &cert.forests);
    report.push(Check::new(
        "forest invariant",
        cycles.is_empty(),
        format!("cyclic demand sets {cycles:?}"),
    ));

    if disconnected.is_empty() {
        let primal = instance::laminar_cost(instance, &cert.forests)?;
        report.push(Check::new(
            "primal equals sum of w(D) c(H_D)",
            primal == cert.primal,
            format!("claimed {}, recomputed {primal}", cert.primal),
        ));
        let routing = instance::induced_routing(instance, &cert.forests)?;
        let load = instance::load_cost(instance, &routing)?;
        report.push(Check::new(
            "induced routing cost <= primal",
            load <= primal,
            format!("load cost {load}, primal {primal}"),
        ));
    }

    let dual = LaminarCertificate::dual_total(&cert.duals);
    report.push(Check::new(
        "dual equals sum of duals",
        dual == cert.dual,
        format!("claimed {}, recomputed {dual}", cert.dual),
    ));
    let bound = LaminarCertificate::ratio_bound();
    report.push(Check::new(
        "ratio bound is 2",
        file.ratio_bound == bound,
        format!("claimed {}", file.ratio_bound),
    ));
    report.push(Check::new(
        "primal <= 2 * dual",
        cert.primal <= &bound * &dual,
        format!("primal {}, dual {dual}", cert.primal),
    ));

    if disconnected.is_empty() && cycles.is_empty() {
        let degree = laminar::check_phase_degrees(instance, &cert.forests)?;
        report.push(Check::new(
            "phase degree replay",
            degree.is_empty(),
            format!("{} violations {degree:?}", degree.len()),
        ));
    }
    Ok(())
}

fn verify_spanner(
    instance: &Instance,
    file: &SpannerFile,
    limits: &OracleLimits,
    report: &mut Report,
) -> Result<()> {
    let graph = instance.graph();
    let groups: Vec<Vec<usize>> = instance.groups().iter().map(|g| g.terminals.clone()).collect();
    let result = match file.to_result(graph, &groups) {
        Ok(r) => r,
        Err(e) => {
            report.push(Check::new("spanner resolves", false, e.to_string()));
            return Ok(());
        }
    };
    let levels = spanner::levels_for(groups.len());
    report.push(Check::new(
        "L = max(1, ceil(log2 g))",
        result.levels == levels,
        format!("claimed {}, expected {levels}", result.levels),
    ));
    let mut tree = graph::mst(graph)?;
    tree.sort_unstable();
    let mut claimed = result.t.clone();
    claimed.sort_unstable();
    report.push(Check::new(
        "T is the minimum spanning tree",
        tree == claimed,
        format!("{} edges", claimed.len()),
    ));
    let mut a1: Vec<(usize, usize)> = result.a1.iter().map(|&e| graph.edge(e).endpoints()).collect();
    let mut arcs: Vec<(usize, usize)> = result.arcs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    a1.sort_unstable();
    arcs.sort_unstable();
    report.push(Check::new(
        "arcs orient A1",
        a1 == arcs,
        format!("{} arcs", arcs.len()),
    ));
    let certified = spanner::certify_spanner(&result, graph, &groups, limits.max_terminals)?;
    report.checks.extend(certified.report.checks);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_artifact, parse_instance, to_json};
    use crate::rational;

    fn path_instance() -> Instance {
        parse_instance(
            r#"{"graph": {"n": 3, "edges": [[0,1,"1"],[1,2,"1"]]},
                "groups": [{"terminals": [0,1], "demand": ["0","1"]},
                           {"terminals": [1,2], "demand": ["0","2"]}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn own_outputs_pass() {
        let inst = path_instance();
        let limits = OracleLimits::default();
        let (routing, cert) = laminar::solve_laminar(&inst.restrict_groups(&[0]).unwrap()).unwrap();
        let single = inst.restrict_groups(&[0]).unwrap();
        let file = CertificateFile::from_certificate(&single, &cert);
        let report = verify(&single, &Artifact::Certificate(file), &limits).unwrap();
        assert!(report.passed(), "{report}");
        let sol = SolutionFile::new(&single, &routing, &cert.primal);
        assert!(verify(&single, &Artifact::Solution(sol), &limits).unwrap().passed());

        let spanner = spanner::build_group_spanner(
            inst.graph(),
            &[vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        let file = SpannerFile::new(inst.graph(), &spanner, Vec::new());
        let report = verify(&inst, &Artifact::Spanner(file), &limits).unwrap();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn tampered_dual_names_the_edge() {
        let inst = path_instance().restrict_groups(&[0]).unwrap();
        let (_, cert) = laminar::solve_laminar(&inst).unwrap();
        let mut file = CertificateFile::from_certificate(&inst, &cert);
        file.duals[0].value = rational::int(5);
        let text = to_json(&file);
        let report = verify(&inst, &parse_artifact(&text).unwrap(), &OracleLimits::default()).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"dual feasibility"), "{report}");
        let detail = &report.checks.iter().find(|c| c.name == "dual feasibility").unwrap().detail;
        assert!(detail.contains("edge 0") && detail.contains("demand set 0"), "{detail}");
    }

    #[test]
    fn tampered_tree_names_the_group() {
        let inst = path_instance();
        let sol = sunflower::solve_sunflower(&inst).unwrap();
        let mut file = SolutionFile::new(&inst, &sol.routing, &sol.cost);
        file.trees[1].clear();
        let report = verify(&inst, &Artifact::Solution(file), &OracleLimits::default()).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name.clone()).collect();
        assert_eq!(failed, vec!["primal: tree 1 spans group 1".to_string()]);
    }
}
