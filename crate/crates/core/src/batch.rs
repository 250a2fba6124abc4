//! Seeded batch runs: generate, solve, compare with the oracle, verify.
//!
//! A run spec is a JSON document listing instance families:
//!
//! ```json
//! { "families": [
//!     { "spec": { "kind": "laminar", "n": 8, "m": 12, "g": 3, "seed": 1 },
//!       "count": 200 } ] }
//! ```
//!
//! Row `i` of a family uses seed `spec.seed + i`. An empty file is an empty run.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate_instance, GeneratorSpec, Kind};
use crate::instance::Instance;
use crate::io::CertificateFile;
use crate::laminar::{self, LaminarCertificate};
use crate::oracle::{self, OracleLimits};
use crate::rational::{self, Rational};
use crate::report::Report;
use crate::spanner;
use crate::sunflower::{self, BoundMode};
use crate::verify::verify;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Laminar,
    Sunflower,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Family {
    pub spec: GeneratorSpec,
    pub count: u64,
    /// Defaults to `laminar` for laminar instances and `sunflower` otherwise.
    #[serde(default)]
    pub algo: Option<Algorithm>,
    /// Lower-bound mode for sunflower rows; `oracle` falls back to `relaxed` above the limits.
    #[serde(default)]
    pub bound: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub families: Vec<Family>,
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Ok(RunSpec::default());
        }
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub id: String,
    pub kind: String,
    pub seed: u64,
    pub n: usize,
    pub edges: usize,
    pub groups: usize,
    pub cost: String,
    pub bound: String,
    pub optimum: String,
    pub ratio: String,
    pub ratio_bound: String,
    pub status: String,
    pub detail: String,
}

impl Row {
    pub fn failed(&self) -> bool {
        self.status != "ok"
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub rows: Vec<Row>,
}

impl Summary {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        writer
            .write_record([
                "id", "kind", "seed", "n", "edges", "groups", "cost", "bound", "optimum", "ratio",
                "ratio_bound", "status", "detail",
            ])
            .map_err(csv_error)?;
        for row in &self.rows {
            writer.serialize(row).map_err(csv_error)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

struct Outcome {
    cost: Rational,
    bound: Option<Rational>,
    optimum: Option<Rational>,
    ratio_bound: Rational,
    /// Whether `cost <= ratio_bound * optimum` is a claim for this row.
    bound_claimed: bool,
    report: Report,
}

fn optimum(instance: &Instance, limits: &OracleLimits) -> Result<Option<Rational>> {
    match oracle::exact_coverage_optimum(instance, limits) {
        Ok((_, opt)) => Ok(Some(opt)),
        Err(Error::OracleLimit { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_laminar(instance: &Instance, limits: &OracleLimits) -> Result<Outcome> {
    let (_, cert) = laminar::solve_laminar(instance)?;
    let file = CertificateFile::from_certificate(instance, &cert);
    let report = verify(instance, &crate::io::Artifact::Certificate(file), limits)?;
    Ok(Outcome {
        optimum: optimum(instance, limits)?,
        cost: cert.primal,
        bound: Some(cert.dual),
        ratio_bound: LaminarCertificate::ratio_bound(),
        bound_claimed: true,
        report,
    })
}

fn run_sunflower(instance: &Instance, mode: BoundMode, limits: &OracleLimits) -> Result<Outcome> {
    let solution = sunflower::solve_sunflower(instance)?;
    let lower = match sunflower::sunflower_lower_bound(instance, mode, limits) {
        Err(Error::OracleLimit { .. }) => {
            sunflower::sunflower_lower_bound(instance, BoundMode::Relaxed, limits)?
        }
        other => other?,
    };
    let groups: Vec<Vec<usize>> = instance.groups().iter().map(|g| g.terminals.clone()).collect();
    let certified = spanner::certify_spanner(
        &solution.spanner,
        instance.graph(),
        &groups,
        limits.max_terminals.min(6),
    )?;
    let mut report = certified.report;
    report.push(crate::report::Check::new(
        "cost >= lower bound",
        solution.cost >= lower.value,
        format!("cost {}, lower bound {}", solution.cost, lower.value),
    ));
    Ok(Outcome {
        optimum: optimum(instance, limits)?,
        bound: Some(lower.value),
        ratio_bound: solution.ratio_bound(),
        bound_claimed: solution.bound_applies(),
        cost: solution.cost,
        report,
    })
}

fn run_row(family: &Family, spec: &GeneratorSpec, limits: &OracleLimits) -> Result<(Instance, Outcome)> {
    let instance = generate_instance(spec)?;
    let algo = family.algo.unwrap_or(match spec.kind {
        Kind::Laminar => Algorithm::Laminar,
        _ => Algorithm::Sunflower,
    });
    let outcome = match algo {
        Algorithm::Laminar => run_laminar(&instance, limits)?,
        Algorithm::Sunflower => {
            let mode = family.bound.as_deref().unwrap_or("oracle").parse()?;
            run_sunflower(&instance, mode, limits)?
        }
    };
    Ok((instance, outcome))
}

fn format_opt(value: &Option<Rational>) -> String {
    value.as_ref().map(rational::format).unwrap_or_default()
}

/// Runs every row; a failing row is marked and the run continues.
pub fn run(spec: &RunSpec, limits: &OracleLimits) -> Summary {
    let mut rows = Vec::new();
    for (f, family) in spec.families.iter().enumerate() {
        for i in 0..family.count {
            let mut gen = family.spec.clone();
            gen.seed = family.spec.seed.wrapping_add(i);
            let mut row = Row {
                id: format!("{f}-{i}"),
                kind: serde_json::to_value(gen.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                seed: gen.seed,
                n: gen.n,
                edges: 0,
                groups: 0,
                cost: String::new(),
                bound: String::new(),
                optimum: String::new(),
                ratio: String::new(),
                ratio_bound: String::new(),
                status: "ok".into(),
                detail: String::new(),
            };
            match run_row(family, &gen, limits) {
                Err(e) => {
                    row.status = "FAILED".into();
                    row.detail = e.to_string();
                }
                Ok((instance, outcome)) => {
                    row.edges = instance.graph().edge_count();
                    row.groups = instance.group_count();
                    row.cost = rational::format(&outcome.cost);
                    row.bound = format_opt(&outcome.bound);
                    row.optimum = format_opt(&outcome.optimum);
                    row.ratio_bound = rational::format(&outcome.ratio_bound);
                    let reference = outcome.optimum.as_ref().or(outcome.bound.as_ref());
                    if let Some(r) = reference.filter(|r| !r.is_zero()) {
                        row.ratio = rational::format(&(&outcome.cost / r));
                    }
                    let mut problems: Vec<String> =
                        outcome.report.failures().map(|c| c.to_string()).collect();
                    if let Some(opt) = &outcome.optimum {
                        if outcome.bound_claimed && outcome.cost > &outcome.ratio_bound * opt {
                            problems.push(format!("cost {} exceeds ratio bound times optimum {opt}", outcome.cost));
                        }
                        if let Some(b) = &outcome.bound {
                            if b > opt {
                                problems.push(format!("bound {b} exceeds optimum {opt}"));
                            }
                        }
                    }
                    if !problems.is_empty() {
                        row.status = "FAILED".into();
                        row.detail = problems.join("; ");
                    }
                }
            }
            rows.push(row);
        }
    }
    Summary { rows }
}
