//! Trace-level invariants of the three-phase solver on random instances.

use rshwc_core::gen::{random_instance, RandomInstanceSpec};
use rshwc_core::{solve, MoveKind, Phase, SolverConfig};

/// The average never drops across refinement removals or accepted swaps, and
/// refinement removals never raise the risk.
#[test]
fn phases_are_monotone_in_objective_and_risk() {
    let spec = RandomInstanceSpec {
        budget_range: (1.0, 6.0),
        ..RandomInstanceSpec::default()
    };
    let config = SolverConfig::default();
    let mut traced_moves = 0;
    for seed in 0..200u64 {
        let instance = random_instance(&spec, seed);
        let Ok(result) = solve(&instance, &config) else {
            continue;
        };
        let mut last_alpha: Option<f64> = None;
        let mut last_risk: Option<f64> = None;
        for step in &result.trace {
            match (step.phase, step.action) {
                (Phase::Refinement, MoveKind::Remove) => {
                    if let Some(a) = last_alpha {
                        assert!(
                            step.alpha >= a - 1e-9,
                            "refinement lowered alpha (seed {seed})"
                        );
                    }
                    if let Some(r) = last_risk {
                        assert!(
                            step.risk <= r + 1e-9,
                            "refinement raised risk (seed {seed})"
                        );
                    }
                    traced_moves += 1;
                }
                (Phase::Replacement, MoveKind::Swap) => {
                    if let Some(a) = last_alpha {
                        assert!(step.alpha >= a - 1e-9, "swap lowered alpha (seed {seed})");
                    }
                    traced_moves += 1;
                }
                _ => {}
            }
            last_alpha = Some(step.alpha);
            last_risk = Some(step.risk);
        }
    }
    assert!(
        traced_moves >= 50,
        "only {traced_moves} refinement/replacement moves seen"
    );
}

/// Every construction step keeps the running risk within the budget.
#[test]
fn construction_respects_the_budget_throughout() {
    let spec = RandomInstanceSpec::default();
    let config = SolverConfig::default();
    for seed in 200..320u64 {
        let instance = random_instance(&spec, seed);
        let Ok(result) = solve(&instance, &config) else {
            continue;
        };
        for step in &result.trace {
            if step.phase == Phase::Construction {
                assert!(
                    step.risk <= instance.budget + 1e-9,
                    "construction exceeded the budget (seed {seed})"
                );
            }
        }
    }
}
