use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use rshwc_core::format::{parse_instance, write_instance_string, FormatError};
use rshwc_core::oracle::{brute_force_solve, plant_x3c, x3c_gadget, OracleError};
use rshwc_core::{
    solve, validate, ProblemInstance, PropagationConfig, SolveError, SolveResult, SolverConfig,
};
use rshwc_harness::augment::{default_budget, AugmentParams, InstanceParams};
use rshwc_harness::snap::{load_edge_list, LoadError, RawGraph};
use rshwc_harness::sweep::{run_sweep, write_csv, SolverKind, SweepSpec, SweepVariable};

#[derive(Parser)]
#[command(
    name = "rshwc",
    about = "Risk-aware skill-coverage hybrid workforce configuration",
    long_about = "Selects onsite teams on two-layer social networks: maximize average \
                  collaboration subject to skill coverage and a contact-risk budget. \
                  RSHWC_THREADS caps sweep parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the three-phase solver on an instance file.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Master seed for the coupled risk evaluation.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Monte Carlo samples per risk estimate (large networks only).
        #[arg(long, default_value_t = 200)]
        mc_samples: usize,
        /// Override the instance's exchange-trial cap.
        #[arg(long)]
        t_e: Option<u32>,
        /// Result JSON path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum for a tiny instance file.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an exact-cover gadget instance with a planted cover.
    Gadget {
        /// Number of planted triples; the ground set has 3q elements.
        #[arg(long)]
        q: usize,
        /// Extra random triples beyond the planted cover.
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Instance file path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a variable across values and solvers, emitting CSV.
    Sweep {
        /// SNAP-style edge list to load.
        #[arg(long, conflicts_with = "synthetic")]
        graph: Option<PathBuf>,
        /// Generate a synthetic graph instead: "VERTICES,EDGES".
        #[arg(long)]
        synthetic: Option<String>,
        #[arg(long, default_value_t = 42)]
        augment_seed: u64,
        /// Swept variable: R (required skills) or rho (remote ratio).
        #[arg(long)]
        var: String,
        /// Comma-separated values for the swept variable.
        #[arg(long)]
        values: String,
        /// Comma-separated solvers (gria, skill-greedy, random-feasible,
        /// collab-greedy); all four when omitted.
        #[arg(long)]
        solvers: Option<String>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        mc_samples: usize,
        /// Skill universe size for augmentation.
        #[arg(long, default_value_t = 50)]
        universe: usize,
        /// Required-skill count (fixed value; ignored when sweeping R).
        #[arg(long, default_value_t = 10)]
        r_size: usize,
        /// Remote/onsite ratio (fixed value; ignored when sweeping rho).
        #[arg(long, default_value_t = 0.7)]
        rho: f64,
        /// Fraction of vertices initially infected. The default matches the
        /// hardness construction: everyone starts infected, so the budget
        /// caps the onsite headcount.
        #[arg(long, default_value_t = 1.0)]
        seed_fraction: f64,
        /// Risk budget; defaults to 0.8 * required skills + 1.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 50)]
        t_e: u32,
    },
}

enum CliError {
    /// Exit 3: instance/graph parsing or validation failures.
    Parse(String),
    /// Exit 2: the instance has no feasible solution.
    Infeasible(String),
    /// Exit 1: everything else.
    Other(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 3,
            CliError::Infeasible(_) => 2,
            CliError::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Infeasible(m) | CliError::Other(m) => m,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

fn main() {
    rshwc_harness::init_thread_pool();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Keep exit 2 reserved for infeasible instances.
            let _ = e.print();
            std::process::exit(64);
        }
    };
    if let Err(e) = run(cli.command) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
}

fn load_validated(path: &Path) -> Result<ProblemInstance, CliError> {
    let instance = parse_instance(path)?;
    let report = validate(&instance);
    if !report.is_valid() {
        return Err(CliError::Parse(format!("invalid instance:\n{report}")));
    }
    Ok(instance)
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn emit_result(out: Option<&Path>, result: &SolveResult) -> Result<(), CliError> {
    let mut json =
        serde_json::to_string_pretty(result).map_err(|e| CliError::Other(e.to_string()))?;
    json.push('\n');
    emit(out, &json)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve {
            instance,
            seed,
            mc_samples,
            t_e,
            out,
        } => {
            let problem = load_validated(&instance)?;
            let config = SolverConfig {
                propagation: PropagationConfig {
                    mc_samples,
                    rng_seed: seed,
                    ..PropagationConfig::default()
                },
                exchange_cap: t_e,
                rng_seed: seed,
                ..SolverConfig::default()
            };
            let result = match solve(&problem, &config) {
                Ok(result) => result,
                Err(SolveError::InvalidInstance(report)) => {
                    return Err(CliError::Parse(report.to_string()))
                }
                Err(SolveError::Infeasible(why)) => {
                    return Err(CliError::Infeasible(why.to_string()))
                }
            };
            emit_result(out.as_deref(), &result)?;
            eprintln!(
                "solve: |team| = {}, alpha = {:.6}, risk = {:.6}, feasible = {}",
                result.onsite.len(),
                result.alpha,
                result.risk,
                result.feasible
            );
            if !result.feasible {
                return Err(CliError::Infeasible(
                    "result failed feasibility re-verification".to_string(),
                ));
            }
            Ok(())
        }
        Command::Oracle { instance, out } => {
            let problem = load_validated(&instance)?;
            let result = match brute_force_solve(&problem, &SolverConfig::default()) {
                Ok(result) => result,
                Err(OracleError::Infeasible) => {
                    return Err(CliError::Infeasible(OracleError::Infeasible.to_string()))
                }
                Err(e @ OracleError::TooLarge(_)) => return Err(CliError::Other(e.to_string())),
            };
            emit_result(out.as_deref(), &result)?;
            eprintln!(
                "oracle: |team| = {}, alpha = {:.6}, risk = {:.6}",
                result.onsite.len(),
                result.alpha,
                result.risk
            );
            Ok(())
        }
        Command::Gadget {
            q,
            extra,
            seed,
            out,
        } => {
            if q == 0 {
                return Err(CliError::Other("q must be at least 1".to_string()));
            }
            let planted = plant_x3c(q, extra, seed);
            let instance = x3c_gadget(&planted.instance);
            emit(out.as_deref(), &write_instance_string(&instance))?;
            eprintln!(
                "gadget: {} triples over {} elements, cover = {:?}",
                planted.instance.triples.len(),
                planted.instance.ground_set_size,
                planted.cover
            );
            Ok(())
        }
        Command::Sweep {
            graph,
            synthetic,
            augment_seed,
            var,
            values,
            solvers,
            reps,
            out,
            mc_samples,
            universe,
            r_size,
            rho,
            seed_fraction,
            budget,
            t_e,
        } => {
            let raw = load_graph_source(graph.as_deref(), synthetic.as_deref(), augment_seed)?;
            let variable = SweepVariable::parse(&var)
                .ok_or_else(|| CliError::Other(format!("unknown variable `{var}` (R or rho)")))?;
            let values = parse_values(&values, variable)?;
            let solvers = parse_solvers(solvers.as_deref())?;
            if reps == 0 {
                return Err(CliError::Other("reps must be at least 1".to_string()));
            }

            let spec = SweepSpec {
                variable,
                values,
                repetitions: reps,
                solvers,
            };
            let augment = AugmentParams {
                skill_universe_size: universe,
                remote_ratio: rho,
                rng_seed: augment_seed,
                ..AugmentParams::default()
            };
            let instance = InstanceParams {
                required_skills: r_size,
                seed_fraction,
                budget: budget.unwrap_or_else(|| default_budget(r_size)),
                exchange_cap: t_e,
                rng_seed: augment_seed,
            };
            let config = SolverConfig {
                propagation: PropagationConfig {
                    mc_samples,
                    rng_seed: augment_seed,
                    ..PropagationConfig::default()
                },
                rng_seed: augment_seed,
                ..SolverConfig::default()
            };

            let rows = run_sweep(&spec, &raw, &augment, &instance, &config);
            let file = fs::File::create(&out)?;
            write_csv(file, &rows).map_err(|e| CliError::Other(e.to_string()))?;
            eprintln!("sweep: {} rows -> {}", rows.len(), out.display());
            Ok(())
        }
    }
}

fn load_graph_source(
    graph: Option<&Path>,
    synthetic: Option<&str>,
    seed: u64,
) -> Result<RawGraph, CliError> {
    match (graph, synthetic) {
        (Some(path), None) => Ok(load_edge_list(path)?),
        (None, Some(spec)) => {
            let (n, m) = spec
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                .ok_or_else(|| {
                    CliError::Other(format!("--synthetic expects VERTICES,EDGES, got `{spec}`"))
                })?;
            let edges = rshwc_core::gen::synthetic_graph(n, m, seed);
            Ok(RawGraph {
                vertex_count: n,
                edges,
            })
        }
        _ => Err(CliError::Other(
            "exactly one of --graph or --synthetic is required".to_string(),
        )),
    }
}

fn parse_values(text: &str, variable: SweepVariable) -> Result<Vec<f64>, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Other(format!("bad --values: {e}")))?;
    if values.is_empty() {
        return Err(CliError::Other("--values must be non-empty".to_string()));
    }
    for &v in &values {
        match variable {
            SweepVariable::RequiredSkills if v < 0.0 || v.fract() != 0.0 => {
                return Err(CliError::Other(format!(
                    "R values must be non-negative integers, got {v}"
                )));
            }
            SweepVariable::RemoteRatio if !(0.0 < v && v <= 1.0) => {
                return Err(CliError::Other(format!(
                    "rho values must be in (0, 1], got {v}"
                )));
            }
            _ => {}
        }
    }
    Ok(values)
}

fn parse_solvers(text: Option<&str>) -> Result<Vec<SolverKind>, CliError> {
    match text {
        None => Ok(SolverKind::ALL.to_vec()),
        Some(list) => list
            .split(',')
            .map(|t| {
                SolverKind::parse(t.trim())
                    .ok_or_else(|| CliError::Other(format!("unknown solver `{t}`")))
            })
            .collect(),
    }
}
