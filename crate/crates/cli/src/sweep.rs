//! Experiment sweeps: run a set of solvers across a swept variable with
//! repetitions, re-verify every solution, and emit stable CSV.
//!
//! Output ordering is by (solver, value, repetition) with mean/std aggregate
//! rows after each (solver, value) group, never by completion time. Data
//! rows are byte-identical across reruns with the same seeds; only the
//! wall-time column varies.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rshwc_core::baselines::{collab_greedy, random_feasible, skill_greedy};
use rshwc_core::{solve, ProblemInstance, SolveError, SolveResult, SolverConfig};

use crate::augment::{assemble_instance, augment, AugmentParams, InstanceParams};
use crate::snap::RawGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Number of required skills.
    RequiredSkills,
    /// Remote/onsite effectiveness ratio.
    RemoteRatio,
}

impl SweepVariable {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "R" | "r" | "required" => Some(SweepVariable::RequiredSkills),
            "rho" | "ratio" => Some(SweepVariable::RemoteRatio),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SweepVariable::RequiredSkills => "R",
            SweepVariable::RemoteRatio => "rho",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    Gria,
    SkillGreedy,
    RandomFeasible,
    CollabGreedy,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::Gria,
        SolverKind::SkillGreedy,
        SolverKind::RandomFeasible,
        SolverKind::CollabGreedy,
    ];

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gria" => Some(SolverKind::Gria),
            "skill-greedy" => Some(SolverKind::SkillGreedy),
            "random" | "random-feasible" => Some(SolverKind::RandomFeasible),
            "collab-greedy" => Some(SolverKind::CollabGreedy),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Gria => "gria",
            SolverKind::SkillGreedy => "skill-greedy",
            SolverKind::RandomFeasible => "random-feasible",
            SolverKind::CollabGreedy => "collab-greedy",
        }
    }

    pub fn run(
        &self,
        instance: &ProblemInstance,
        config: &SolverConfig,
    ) -> Result<SolveResult, SolveError> {
        match self {
            SolverKind::Gria => solve(instance, config),
            SolverKind::SkillGreedy => skill_greedy(instance, config),
            SolverKind::RandomFeasible => random_feasible(instance, config),
            SolverKind::CollabGreedy => collab_greedy(instance, config),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub repetitions: usize,
    pub solvers: Vec<SolverKind>,
}

pub const CSV_HEADER: [&str; 10] = [
    "solver",
    "variable",
    "value",
    "rep",
    "alpha",
    "risk",
    "team_size",
    "wall_ms",
    "seed",
    "feasible",
];

/// One emitted CSV row; aggregates use `rep` = "mean" / "std".
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub solver: String,
    pub variable: String,
    pub value: f64,
    pub rep: String,
    pub alpha: Option<f64>,
    pub risk: Option<f64>,
    pub team_size: Option<f64>,
    pub wall_ms: f64,
    pub seed: Option<u64>,
    pub feasible: String,
}

impl SweepRow {
    pub fn record(&self) -> Vec<String> {
        fn opt(x: Option<f64>) -> String {
            x.map(|v| format!("{v}")).unwrap_or_default()
        }
        vec![
            self.solver.clone(),
            self.variable.clone(),
            format!("{}", self.value),
            self.rep.clone(),
            opt(self.alpha),
            opt(self.risk),
            opt(self.team_size),
            format!("{:.3}", self.wall_ms),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.feasible.clone(),
        ]
    }
}

fn mix(seed: u64, value_idx: usize, rep: usize) -> u64 {
    let mut x = seed ^ (value_idx as u64).wrapping_mul(0x9E3779B97F4A7C15);
    x = x.wrapping_add((rep as u64).wrapping_mul(0xD1B54A32D192ED03));
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

struct JobOutcome {
    per_solver: Vec<(Option<SolveResult>, f64)>,
    seed: u64,
}

/// Runs the sweep and returns every row in output order. Jobs (one per value
/// and repetition) run in parallel; all solvers within a job share one
/// instance, so comparisons are paired.
pub fn run_sweep(
    spec: &SweepSpec,
    graph: &RawGraph,
    base_augment: &AugmentParams,
    base_instance: &InstanceParams,
    base_config: &SolverConfig,
) -> Vec<SweepRow> {
    let jobs: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|vi| (0..spec.repetitions).map(move |rep| (vi, rep)))
        .collect();

    let outcomes: Vec<JobOutcome> = jobs
        .par_iter()
        .map(|&(value_idx, rep)| {
            let value = spec.values[value_idx];
            let job_seed = mix(base_augment.rng_seed, value_idx, rep);

            let mut aug = base_augment.clone();
            let mut inst_params = InstanceParams {
                rng_seed: job_seed,
                ..base_instance.clone()
            };
            match spec.variable {
                SweepVariable::RemoteRatio => aug.remote_ratio = value,
                SweepVariable::RequiredSkills => inst_params.required_skills = value as usize,
            }
            let network = augment(graph, &aug);
            let instance = assemble_instance(network, &inst_params);
            let config = SolverConfig {
                rng_seed: job_seed,
                ..*base_config
            };

            let per_solver = spec
                .solvers
                .iter()
                .map(|kind| {
                    let start = Instant::now();
                    let outcome = kind.run(&instance, &config).ok();
                    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    (outcome, wall_ms)
                })
                .collect();
            JobOutcome {
                per_solver,
                seed: job_seed,
            }
        })
        .collect();

    let job_index = |value_idx: usize, rep: usize| value_idx * spec.repetitions + rep;
    let mut rows = Vec::new();
    for (s_idx, kind) in spec.solvers.iter().enumerate() {
        for (value_idx, &value) in spec.values.iter().enumerate() {
            let mut feasible_alphas = Vec::new();
            let mut feasible_risks = Vec::new();
            let mut feasible_teams = Vec::new();
            let mut walls = Vec::new();
            for rep in 0..spec.repetitions {
                let outcome = &outcomes[job_index(value_idx, rep)];
                let (result, wall_ms) = &outcome.per_solver[s_idx];
                walls.push(*wall_ms);
                let feasible = result.as_ref().is_some_and(|r| r.feasible);
                if let (true, Some(r)) = (feasible, result) {
                    feasible_alphas.push(r.alpha);
                    feasible_risks.push(r.risk);
                    feasible_teams.push(r.onsite.len() as f64);
                }
                rows.push(SweepRow {
                    solver: kind.name().to_string(),
                    variable: spec.variable.label().to_string(),
                    value,
                    rep: rep.to_string(),
                    alpha: result.as_ref().filter(|_| feasible).map(|r| r.alpha),
                    risk: result.as_ref().filter(|_| feasible).map(|r| r.risk),
                    team_size: result
                        .as_ref()
                        .filter(|_| feasible)
                        .map(|r| r.onsite.len() as f64),
                    wall_ms: *wall_ms,
                    seed: Some(outcome.seed),
                    feasible: feasible.to_string(),
                });
            }
            for (label, reduce) in [("mean", false), ("std", true)] {
                rows.push(SweepRow {
                    solver: kind.name().to_string(),
                    variable: spec.variable.label().to_string(),
                    value,
                    rep: label.to_string(),
                    alpha: aggregate(&feasible_alphas, reduce),
                    risk: aggregate(&feasible_risks, reduce),
                    team_size: aggregate(&feasible_teams, reduce),
                    wall_ms: aggregate(&walls, reduce).unwrap_or(0.0),
                    seed: None,
                    feasible: feasible_alphas.len().to_string(),
                });
            }
        }
    }
    rows
}

fn aggregate(values: &[f64], std: bool) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if !std {
        return Some(mean);
    }
    if values.len() < 2 {
        return Some(0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    Some(var.sqrt())
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(row.record())?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snap::load_edge_list_str;
    use rshwc_core::PropagationConfig;

    fn small_graph() -> RawGraph {
        let mut text = String::new();
        for (u, v) in rshwc_core::gen::synthetic_graph(40, 80, 7) {
            text.push_str(&format!("{u} {v}\n"));
        }
        load_edge_list_str(&text).unwrap()
    }

    fn small_config() -> SolverConfig {
        SolverConfig {
            propagation: PropagationConfig {
                mc_samples: 60,
                ..PropagationConfig::default()
            },
            ..SolverConfig::default()
        }
    }

    fn small_params() -> (AugmentParams, InstanceParams) {
        (
            AugmentParams {
                skill_universe_size: 8,
                rng_seed: 3,
                ..AugmentParams::default()
            },
            InstanceParams {
                required_skills: 3,
                seed_fraction: 0.1,
                budget: 2.0,
                ..InstanceParams::default()
            },
        )
    }

    #[test]
    fn row_counts_match_the_grid() {
        let spec = SweepSpec {
            variable: SweepVariable::RemoteRatio,
            values: vec![0.5, 0.7, 0.9],
            repetitions: 2,
            solvers: vec![SolverKind::Gria, SolverKind::SkillGreedy],
        };
        let (aug, inst) = small_params();
        let rows = run_sweep(&spec, &small_graph(), &aug, &inst, &small_config());
        // 2 solvers x 3 values x (2 data + 2 aggregate) rows.
        assert_eq!(rows.len(), 2 * 3 * 4);
        let data = rows
            .iter()
            .filter(|r| r.rep.parse::<usize>().is_ok())
            .count();
        assert_eq!(data, 12);
    }

    #[test]
    fn rows_round_trip_through_csv() {
        let spec = SweepSpec {
            variable: SweepVariable::RequiredSkills,
            values: vec![2.0, 4.0],
            repetitions: 2,
            solvers: vec![SolverKind::CollabGreedy],
        };
        let (aug, inst) = small_params();
        let rows = run_sweep(&spec, &small_graph(), &aug, &inst, &small_config());
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();

        let mut reader = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(
            reader.headers().unwrap().iter().collect::<Vec<_>>(),
            CSV_HEADER.to_vec()
        );
        let parsed: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(parsed.len(), rows.len());
        for (rec, row) in parsed.iter().zip(&rows) {
            assert_eq!(rec.iter().collect::<Vec<_>>(), row.record());
            // Numeric fields parse back.
            let alpha: Option<f64> = rec[4].parse().ok();
            assert_eq!(alpha, row.alpha);
        }
    }

    #[test]
    fn reruns_are_identical_except_wall_time() {
        let spec = SweepSpec {
            variable: SweepVariable::RemoteRatio,
            values: vec![0.6, 0.8],
            repetitions: 2,
            solvers: vec![SolverKind::Gria, SolverKind::RandomFeasible],
        };
        let (aug, inst) = small_params();
        let a = run_sweep(&spec, &small_graph(), &aug, &inst, &small_config());
        let b = run_sweep(&spec, &small_graph(), &aug, &inst, &small_config());
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            let mut xr = x.record();
            let mut yr = y.record();
            xr[7].clear();
            yr[7].clear();
            assert_eq!(xr, yr);
        }
    }

    #[test]
    fn infeasible_runs_carry_an_explicit_marker() {
        // Everyone starts infected against a zero budget: no team fits.
        let graph = load_edge_list_str("0 1\n").unwrap();
        let spec = SweepSpec {
            variable: SweepVariable::RequiredSkills,
            values: vec![1.0],
            repetitions: 2,
            solvers: vec![SolverKind::Gria],
        };
        let (aug, mut inst) = small_params();
        inst.seed_fraction = 1.0;
        inst.budget = 0.0;
        let rows = run_sweep(&spec, &graph, &aug, &inst, &small_config());
        let data: Vec<&SweepRow> = rows
            .iter()
            .filter(|r| r.rep.parse::<usize>().is_ok())
            .collect();
        assert_eq!(data.len(), 2);
        for row in data {
            assert_eq!(row.feasible, "false");
            assert_eq!(row.alpha, None);
            assert_eq!(row.risk, None);
            assert_eq!(row.team_size, None);
        }
        // Aggregates over zero feasible runs stay empty with a zero count.
        let mean = rows.iter().find(|r| r.rep == "mean").unwrap();
        assert_eq!(mean.alpha, None);
        assert_eq!(mean.feasible, "0");
    }

    #[test]
    fn solver_names_round_trip() {
        for kind in SolverKind::ALL {
            assert_eq!(SolverKind::parse(kind.name()), Some(kind));
        }
        assert_eq!(SolverKind::parse("nope"), None);
        assert_eq!(
            SweepVariable::parse("R"),
            Some(SweepVariable::RequiredSkills)
        );
        assert_eq!(
            SweepVariable::parse("rho"),
            Some(SweepVariable::RemoteRatio)
        );
    }
}
