//! Executable checks for the refinement phase's pruning rule.
//!
//! With per-edge onsite scores at least as large as remote scores, a member
//! whose collaboration gain sits strictly below the current average can be
//! dropped for good: re-adding it (alone or with other below-average members)
//! to any subset reachable later never pushes the average back up. These
//! randomized trial runners exercise exactly that, and the refinement phase
//! is sound precisely because they hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gen::{random_instance, RandomInstanceSpec};
use crate::network::{ProblemInstance, VertexId, VertexSet};
use crate::objective::{average_collaboration, collaboration_gain};
use crate::solver::{MoveKind, Phase, Solver, SolverConfig};

/// Outcome of a randomized trial suite: how many configured trials ran and
/// the largest amount by which the checked strict inequality was broken
/// (negative when every trial held with margin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialReport {
    pub trials: usize,
    pub violations: usize,
    pub worst_excess: f64,
}

impl TrialReport {
    fn record(&mut self, excess: f64, slack: f64) {
        self.trials += 1;
        if excess >= slack {
            self.violations += 1;
        }
        if excess > self.worst_excess {
            self.worst_excess = excess;
        }
    }
}

fn pruning_trial_spec() -> RandomInstanceSpec {
    RandomInstanceSpec {
        vertices: (5, 12),
        partnership_density: 0.6,
        // Onsite never worse than remote, as the pruning argument needs.
        remote_fraction: Some((0.2, 1.0)),
        ..RandomInstanceSpec::default()
    }
}

fn random_subset(rng: &mut ChaCha8Rng, of: &VertexSet, n: usize) -> VertexSet {
    let mut out = VertexSet::new(n);
    for v in of.iter() {
        if rng.random::<f64>() < 0.5 {
            out.insert(v);
        }
    }
    out
}

struct TrialSetup {
    instance: ProblemInstance,
    team: VertexSet,
    threshold: f64,
    below: Vec<VertexId>,
}

fn sample_setup(rng: &mut ChaCha8Rng) -> TrialSetup {
    loop {
        let instance = random_instance(&pruning_trial_spec(), rng.random());
        let n = instance.network.vertex_count();
        let everyone = VertexSet::from_iter(n, instance.network.vertices());
        let team = random_subset(rng, &everyone, n);
        if team.len() < 3 {
            continue;
        }
        let threshold = average_collaboration(&instance.network, &team).expect("non-empty");
        let below: Vec<VertexId> = team
            .iter()
            .filter(|&v| collaboration_gain(&instance.network, &team, v) < threshold)
            .collect();
        if below.is_empty() {
            continue;
        }
        return TrialSetup {
            instance,
            team,
            threshold,
            below,
        };
    }
}

/// Picks a non-empty batch of below-average members outside `base`.
fn pick_batch(rng: &mut ChaCha8Rng, setup: &TrialSetup, base: &VertexSet) -> Option<Vec<VertexId>> {
    let available: Vec<VertexId> = setup
        .below
        .iter()
        .copied()
        .filter(|&v| !base.contains(v))
        .collect();
    if available.is_empty() {
        return None;
    }
    let take = rng.random_range(1..=available.len());
    let mut pool = available;
    let mut batch = Vec::with_capacity(take);
    for _ in 0..take {
        let i = rng.random_range(0..pool.len());
        batch.push(pool.swap_remove(i));
    }
    Some(batch)
}

/// Adding below-average-gain members to a subset whose average is at least
/// the team's average strictly lowers that subset's average.
pub fn check_additions_lower_high_average(trials: usize, seed: u64, slack: f64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport {
        trials: 0,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    while report.trials < trials {
        let setup = sample_setup(&mut rng);
        let net = &setup.instance.network;
        // Carving below-average members out of the team biases the remainder
        // toward a high average; verify and resample when it missed.
        let mut base = setup.team.clone();
        for &v in &setup.below {
            if rng.random::<f64>() < 0.7 {
                base.remove(v);
            }
        }
        if base.is_empty() || base.len() == setup.team.len() {
            continue;
        }
        let base_avg = average_collaboration(net, &base).expect("non-empty");
        if base_avg < setup.threshold {
            continue;
        }
        let Some(batch) = pick_batch(&mut rng, &setup, &base) else {
            continue;
        };
        let mut extended = base.clone();
        for v in batch {
            extended.insert(v);
        }
        let extended_avg = average_collaboration(net, &extended).expect("non-empty");
        report.record(extended_avg - base_avg, slack);
    }
    report
}

/// Adding below-average-gain members to a subset whose average is below the
/// team's average keeps it strictly below that average.
pub fn check_additions_stay_below_threshold(trials: usize, seed: u64, slack: f64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport {
        trials: 0,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    while report.trials < trials {
        let setup = sample_setup(&mut rng);
        let net = &setup.instance.network;
        let n = net.vertex_count();
        let base = random_subset(&mut rng, &setup.team, n);
        if base.is_empty() || base.len() == setup.team.len() {
            continue;
        }
        let base_avg = average_collaboration(net, &base).expect("non-empty");
        if base_avg >= setup.threshold {
            continue;
        }
        let Some(batch) = pick_batch(&mut rng, &setup, &base) else {
            continue;
        };
        let mut extended = base.clone();
        for v in batch {
            extended.insert(v);
        }
        let extended_avg = average_collaboration(net, &extended).expect("non-empty");
        report.record(extended_avg - setup.threshold, slack);
    }
    report
}

/// Replays refinement-phase removals from real solver runs: re-adding a
/// pruned vertex to any high-average subset of what remained never raises
/// that subset's average.
pub fn check_pruned_vertices_never_help(trials: usize, seed: u64, slack: f64) -> TrialReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TrialReport {
        trials: 0,
        violations: 0,
        worst_excess: f64::NEG_INFINITY,
    };
    let spec = RandomInstanceSpec {
        // Roomy budgets so construction overshoots and refinement has work.
        budget_range: (2.0, 6.0),
        ..pruning_trial_spec()
    };
    while report.trials < trials {
        let instance = random_instance(&spec, rng.random());
        let config = SolverConfig::default();
        let Ok(mut solver) = Solver::new(&instance, config) else {
            continue;
        };
        if solver.construction_phase().is_err() {
            continue;
        }
        let before = solver.onsite().clone();
        solver.refinement_phase();
        let net = &instance.network;

        // Removal events with the set and threshold in force at that moment.
        let mut current = before;
        for step in solver.trace() {
            if step.phase != Phase::Refinement || step.action != MoveKind::Remove {
                continue;
            }
            let pruned = step.vertices[0];
            let threshold = average_collaboration(net, &current).expect("non-empty");
            debug_assert!(collaboration_gain(net, &current, pruned) < threshold);
            current.remove(pruned);

            // Sampled subsets of the survivors with a high enough average.
            for _ in 0..8 {
                let subset = random_subset(&mut rng, &current, net.vertex_count());
                if subset.is_empty() {
                    continue;
                }
                let avg = average_collaboration(net, &subset).expect("non-empty");
                if avg < threshold {
                    continue;
                }
                let mut with_pruned = subset.clone();
                with_pruned.insert(pruned);
                let readded = average_collaboration(net, &with_pruned).expect("non-empty");
                report.record(readded - avg, slack);
                if report.trials >= trials {
                    break;
                }
            }
            if report.trials >= trials {
                break;
            }
        }
    }
    report
}
