use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use covnet::batch::{self, RunSpec};
use covnet::generate::{generate_instance, GeneratorSpec, Kind, Topology};
use covnet::io::{self, CertificateFile, OracleFile, SolutionFile, SpannerFile};
use covnet::laminar::{self, LaminarCertificate};
use covnet::oracle::{self, OracleLimits};
use covnet::spanner;
use covnet::sunflower::{self, BoundMode};
use covnet::{classify_demands, Error, Instance, Result};

#[derive(Parser)]
#[command(name = "covnet", version, about = "Network design with coverage costs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Laminar,
    Sunflower,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bound {
    Oracle,
    Relaxed,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        g: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "random")]
        topology: TopologyArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve an instance with the laminar or sunflower algorithm.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Defaults to laminar when the demands are laminar, else sunflower.
        #[arg(long, value_enum)]
        algo: Option<Algo>,
        /// Where to write the laminar dual certificate.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Lower bound for sunflower solutions.
        #[arg(long, value_enum, default_value = "relaxed")]
        bound: Bound,
        /// Oracle limits, e.g. `e=14,g=3,k=10`.
        #[arg(long)]
        limits: Option<String>,
    },
    /// Build a group spanner for the instance's terminal groups.
    Spanner {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        certify: bool,
        /// Largest group checked with exact Steiner costs.
        #[arg(long, default_value_t = 6)]
        oracle_limit: usize,
    },
    /// Exact coverage optimum by exhaustive search.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        limits: Option<String>,
    },
    /// Re-check a solution, certificate, spanner, or oracle file.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        artifact: PathBuf,
        #[arg(long)]
        limits: Option<String>,
    },
    /// Run a batch described by a JSON run spec and print a CSV summary.
    Batch {
        spec: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        limits: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Laminar,
    Sunflower,
    UniformPairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Random,
    Cycle,
    Path,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(Error::Io),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    io::parse_instance(&read(path)?)
}

fn limits(overrides: Option<&str>) -> Result<OracleLimits> {
    let base = OracleLimits::from_env()?;
    match overrides {
        Some(text) => base.with_overrides(text),
        None => Ok(base),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen {
            kind,
            n,
            m,
            g,
            depth,
            seed,
            topology,
            output,
        } => {
            let spec = GeneratorSpec {
                kind: match kind {
                    KindArg::Laminar => Kind::Laminar,
                    KindArg::Sunflower => Kind::Sunflower,
                    KindArg::UniformPairs => Kind::UniformPairs,
                },
                n,
                m,
                g,
                depth,
                seed,
                topology: match topology {
                    TopologyArg::Random => Topology::Random,
                    TopologyArg::Cycle => Topology::Cycle,
                    TopologyArg::Path => Topology::Path,
                },
            };
            write(output.as_deref(), &io::instance_to_json(&generate_instance(&spec)?))?;
        }
        Command::Solve {
            input,
            output,
            algo,
            certificate,
            bound,
            limits: overrides,
        } => {
            let instance = load_instance(&input)?;
            let algo = algo.unwrap_or(if classify_demands(&instance).laminar {
                Algo::Laminar
            } else {
                Algo::Sunflower
            });
            let file = match algo {
                Algo::Laminar => {
                    let (routing, cert) = laminar::solve_laminar(&instance)?;
                    if let Some(path) = certificate {
                        let cfile = CertificateFile::from_certificate(&instance, &cert);
                        write(Some(&path), &io::to_json(&cfile))?;
                    }
                    let mut file = SolutionFile::new(&instance, &routing, &cert.primal)
                        .with_bound(&cert.dual, &LaminarCertificate::ratio_bound());
                    file.algorithm = Some("laminar".into());
                    file
                }
                Algo::Sunflower => {
                    let solution = sunflower::solve_sunflower(&instance)?;
                    if !solution.bound_applies() {
                        eprintln!("warning: groups do not cover every vertex; the size guarantee of the spanner does not apply");
                    }
                    let mode = match bound {
                        Bound::Oracle => BoundMode::Oracle,
                        Bound::Relaxed => BoundMode::Relaxed,
                    };
                    let lower = sunflower::sunflower_lower_bound(&instance, mode, &limits(overrides.as_deref())?)?;
                    let mut file = SolutionFile::new(&instance, &solution.routing, &solution.cost)
                        .with_bound(&lower.value, &solution.ratio_bound());
                    file.algorithm = Some("sunflower".into());
                    file.bound_mode = Some(match mode {
                        BoundMode::Oracle => "oracle".into(),
                        BoundMode::Relaxed => "relaxed".into(),
                    });
                    file
                }
            };
            write(output.as_deref(), &io::to_json(&file))?;
        }
        Command::Spanner {
            input,
            output,
            certify,
            oracle_limit,
        } => {
            let instance = load_instance(&input)?;
            let groups: Vec<Vec<usize>> =
                instance.groups().iter().map(|g| g.terminals.clone()).collect();
            let result = spanner::build_group_spanner(instance.graph(), &groups)?;
            let mut passed = true;
            let checks = if certify {
                let report = spanner::certify_spanner(&result, instance.graph(), &groups, oracle_limit)?;
                passed = report.passed();
                report.report.checks
            } else {
                Vec::new()
            };
            let file = SpannerFile::new(instance.graph(), &result, checks);
            write(output.as_deref(), &io::to_json(&file))?;
            return Ok(passed);
        }
        Command::Oracle {
            input,
            output,
            limits: overrides,
        } => {
            let instance = load_instance(&input)?;
            let (routing, optimum) =
                oracle::exact_coverage_optimum(&instance, &limits(overrides.as_deref())?)?;
            let file = OracleFile {
                solution: SolutionFile::new(&instance, &routing, &optimum),
                optimum,
            };
            write(output.as_deref(), &io::to_json(&file))?;
        }
        Command::Verify {
            instance,
            artifact,
            limits: overrides,
        } => {
            let inst = load_instance(&instance)?;
            let artifact = io::parse_artifact(&read(&artifact)?)?;
            let report = covnet::verify::verify(&inst, &artifact, &limits(overrides.as_deref())?)?;
            print!("{report}");
            return Ok(report.passed());
        }
        Command::Batch {
            spec,
            output,
            limits: overrides,
        } => {
            let spec = RunSpec::parse(&read(&spec)?)?;
            let summary = batch::run(&spec, &limits(overrides.as_deref())?);
            write(output.as_deref(), &summary.to_csv()?)?;
            return Ok(summary.failures() == 0);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
