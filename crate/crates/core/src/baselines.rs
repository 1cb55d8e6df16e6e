//! Transparent comparator solvers for the benchmark harness. Each one shares
//! the coupled risk evaluation and the final independent verification with
//! the main solver, so results are directly comparable.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::network::{validate, ProblemInstance, VertexId, VertexSet};
use crate::objective::{average_collaboration, CollabState};
use crate::solver::{
    package_result, Coverage, Infeasibility, SolveError, SolveResult, SolverConfig,
};
use crate::tracker::{splitmix64, RiskTracker};

fn new_tracker<'a>(
    instance: &'a ProblemInstance,
    config: &SolverConfig,
) -> Result<RiskTracker<'a>, SolveError> {
    let report = validate(instance);
    if !report.is_valid() {
        return Err(SolveError::InvalidInstance(report));
    }
    Ok(RiskTracker::new(
        &instance.network,
        instance.seed_vertex_set(),
        config.propagation.mc_samples,
        config.propagation.exact_threshold,
        config.rng_seed,
    ))
}

/// Safest singleton that fits the budget: lowest add-risk, then smallest id.
fn best_singleton(
    instance: &ProblemInstance,
    tracker: &mut RiskTracker,
) -> Result<VertexId, SolveError> {
    let mut best: Option<(f64, VertexId)> = None;
    for v in instance.network.vertices() {
        let risk = tracker.risk_with_add(v);
        if risk > instance.budget {
            continue;
        }
        if best.is_none_or(|(r, id)| risk < r || (risk == r && v < id)) {
            best = Some((risk, v));
        }
    }
    best.map(|(_, v)| v)
        .ok_or(SolveError::Infeasible(Infeasibility::BudgetExhausted))
}

/// Classic greedy set cover over skills: repeatedly take the vertex covering
/// the most still-missing skills, ignoring collaboration and risk.
pub fn skill_greedy(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    let net = &instance.network;
    let mut tracker = new_tracker(instance, config)?;
    let mut coverage = Coverage::new(instance);
    let mut onsite = VertexSet::new(net.vertex_count());

    while !coverage.complete() {
        let mut best: Option<(usize, VertexId)> = None;
        for v in net.vertices() {
            if onsite.contains(v) {
                continue;
            }
            let fresh = net
                .skills(v)
                .iter()
                .filter(|s| coverage.covers_missing_skill(**s))
                .count();
            if fresh == 0 {
                continue;
            }
            if best.is_none_or(|(n, id)| fresh > n || (fresh == n && v < id)) {
                best = Some((fresh, v));
            }
        }
        match best {
            Some((_, v)) => {
                onsite.insert(v);
                tracker.add(v);
                coverage.add(net, v);
            }
            None => {
                return Err(SolveError::Infeasible(Infeasibility::SkillGap {
                    missing: coverage.missing_skills(),
                }))
            }
        }
    }
    if onsite.is_empty() {
        let v = best_singleton(instance, &mut tracker)?;
        onsite.insert(v);
        tracker.add(v);
        coverage.add(net, v);
    }
    Ok(package_result(
        instance,
        &onsite,
        coverage.complete(),
        &tracker,
        Vec::new(),
    ))
}

const RANDOM_ATTEMPTS: u64 = 32;

/// Best of 32 random feasible teams: walk a random permutation collecting
/// skill-useful vertices until coverage holds, keep attempts within budget,
/// return the best average collaboration among them.
pub fn random_feasible(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    let net = &instance.network;
    let mut tracker = new_tracker(instance, config)?;
    let mut covered_ever = false;
    let mut best: Option<(f64, VertexSet)> = None;

    for attempt in 0..RANDOM_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(config.rng_seed.wrapping_add(attempt)));
        let mut order: Vec<VertexId> = net.vertices().collect();
        order.shuffle(&mut rng);

        let mut coverage = Coverage::new(instance);
        let mut members = VertexSet::new(net.vertex_count());
        if coverage.complete() {
            // No requirements: a random singleton.
            if let Some(&v) = order.first() {
                members.insert(v);
            }
        } else {
            for &v in &order {
                if coverage.covers_missing(net, v) {
                    members.insert(v);
                    coverage.add(net, v);
                    if coverage.complete() {
                        break;
                    }
                }
            }
            if !coverage.complete() {
                continue;
            }
        }
        if members.is_empty() {
            continue;
        }
        covered_ever = true;
        if tracker.risk_of(&members) > instance.budget {
            continue;
        }
        let alpha = average_collaboration(net, &members).expect("non-empty");
        if best.as_ref().is_none_or(|(a, _)| alpha > *a) {
            best = Some((alpha, members));
        }
    }

    match best {
        Some((_, members)) => {
            let mut coverage = Coverage::new(instance);
            for v in members.iter() {
                tracker.add(v);
                coverage.add(net, v);
            }
            Ok(package_result(
                instance,
                &members,
                coverage.complete(),
                &tracker,
                Vec::new(),
            ))
        }
        None if covered_ever => Err(SolveError::Infeasible(Infeasibility::BudgetExhausted)),
        None => {
            let coverage = Coverage::new(instance);
            if coverage.complete() {
                // Coverage was trivially satisfiable but no vertex exists.
                Err(SolveError::Infeasible(Infeasibility::BudgetExhausted))
            } else {
                Err(SolveError::Infeasible(Infeasibility::SkillGap {
                    missing: coverage.missing_skills(),
                }))
            }
        }
    }
}

/// Greedy by collaboration gain alone: cover the requirements by the highest
/// gain within budget, then keep adding positive gains while the budget
/// holds. Risk never enters the ranking, only the feasibility check.
pub fn collab_greedy(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<SolveResult, SolveError> {
    let net = &instance.network;
    let mut tracker = new_tracker(instance, config)?;
    let mut coverage = Coverage::new(instance);
    let mut state = CollabState::empty(net);

    while !coverage.complete() {
        let mut best: Option<(f64, VertexId)> = None;
        for v in net.vertices() {
            if state.onsite().contains(v) || !coverage.covers_missing(net, v) {
                continue;
            }
            if tracker.may_raise_risk(v) && tracker.risk_with_add(v) > instance.budget {
                continue;
            }
            let gain = state.gain(v);
            if best.is_none_or(|(g, id)| gain > g || (gain == g && v < id)) {
                best = Some((gain, v));
            }
        }
        match best {
            Some((_, v)) => {
                state.add(v).expect("candidate is offsite");
                tracker.add(v);
                coverage.add(net, v);
            }
            None => {
                return Err(SolveError::Infeasible(Infeasibility::SkillGap {
                    missing: coverage.missing_skills(),
                }))
            }
        }
    }

    loop {
        let mut best: Option<(f64, VertexId)> = None;
        for v in net.vertices() {
            if state.onsite().contains(v) {
                continue;
            }
            let gain = state.gain(v);
            if gain <= 0.0 {
                continue;
            }
            if tracker.may_raise_risk(v) && tracker.risk_with_add(v) > instance.budget {
                continue;
            }
            if best.is_none_or(|(g, id)| gain > g || (gain == g && v < id)) {
                best = Some((gain, v));
            }
        }
        match best {
            Some((_, v)) => {
                state.add(v).expect("candidate is offsite");
                tracker.add(v);
                coverage.add(net, v);
            }
            None if state.onsite().is_empty() => {
                let v = best_singleton(instance, &mut tracker)?;
                state.add(v).expect("candidate is offsite");
                tracker.add(v);
                coverage.add(net, v);
            }
            None => break,
        }
    }

    Ok(package_result(
        instance,
        state.onsite(),
        coverage.complete(),
        &tracker,
        Vec::new(),
    ))
}
