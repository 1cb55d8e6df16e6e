//! Three-phase onsite-team solver.
//!
//! Construction greedily assembles a team that covers the required skills and
//! then keeps hiring while the risk budget allows, ranking candidates by
//! collaboration gain per unit of marginal risk. Refinement prunes members
//! whose gain falls below the current average collaboration whenever skill
//! coverage survives. Replacement trades the riskiest onsite member for the
//! safest offsite one as long as coverage, objective, and budget all hold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{
    validate, ProblemInstance, SkillId, TwoLayerNetwork, ValidationReport, VertexId, VertexSet,
};
use crate::objective::{average_collaboration, CollabState};
use crate::propagation::PropagationConfig;
use crate::tracker::RiskTracker;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub propagation: PropagationConfig,
    /// Guard for ratio denominators: zero-risk candidates rank highest but
    /// stay finitely ordered.
    pub epsilon: f64,
    /// Overrides the instance's exchange-trial cap when set.
    pub exchange_cap: Option<u32>,
    /// Master seed for the solve: the coupled sample pool draws from it and
    /// the final verification re-draws from a value derived from it.
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            propagation: PropagationConfig::default(),
            epsilon: 1e-9,
            exchange_cap: None,
            rng_seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Construction,
    Refinement,
    Replacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Add,
    Remove,
    Swap,
}

/// One applied move with the objective and risk right after it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub phase: Phase,
    pub action: MoveKind,
    pub vertices: Vec<VertexId>,
    pub alpha: f64,
    pub risk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    /// Selected onsite set, ascending ids.
    pub onsite: Vec<VertexId>,
    /// Average collaboration of the selected set.
    pub alpha: f64,
    /// Independently re-evaluated risk of the selected set.
    pub risk: f64,
    /// Standard error of the re-evaluated risk (zero when exact).
    pub risk_stderr: f64,
    pub feasible: bool,
    pub trace: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Infeasibility {
    #[error("no candidate can cover the missing skills within the risk budget: {missing:?}")]
    SkillGap { missing: Vec<SkillId> },
    #[error("no vertex fits within the risk budget")]
    BudgetExhausted,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid instance:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("infeasible: {0}")]
    Infeasible(Infeasibility),
}

/// Onsite coverage counters for the required skills.
pub(crate) struct Coverage {
    /// skill id -> index into the required list, or NONE.
    req_index: Vec<u32>,
    counts: Vec<u32>,
    missing: usize,
    required: Vec<SkillId>,
}

const NO_REQ: u32 = u32::MAX;

impl Coverage {
    pub(crate) fn new(instance: &ProblemInstance) -> Self {
        let mut req_index = vec![NO_REQ; instance.network.skill_universe()];
        for (i, skill) in instance.required_skills.iter().enumerate() {
            req_index[skill.index()] = i as u32;
        }
        Coverage {
            req_index,
            counts: vec![0; instance.required_skills.len()],
            missing: instance.required_skills.len(),
            required: instance.required_skills.clone(),
        }
    }

    pub(crate) fn complete(&self) -> bool {
        self.missing == 0
    }

    pub(crate) fn covers_missing(&self, net: &TwoLayerNetwork, v: VertexId) -> bool {
        net.skills(v).iter().any(|&s| self.covers_missing_skill(s))
    }

    /// How many still-missing skills `v` would cover.
    pub(crate) fn missing_covered_by(&self, net: &TwoLayerNetwork, v: VertexId) -> usize {
        net.skills(v)
            .iter()
            .filter(|&&s| self.covers_missing_skill(s))
            .count()
    }

    /// True when `skill` is required and currently uncovered.
    pub(crate) fn covers_missing_skill(&self, skill: SkillId) -> bool {
        let idx = self.req_index[skill.index()];
        idx != NO_REQ && self.counts[idx as usize] == 0
    }

    pub(crate) fn add(&mut self, net: &TwoLayerNetwork, v: VertexId) {
        for s in net.skills(v) {
            let idx = self.req_index[s.index()];
            if idx != NO_REQ {
                let c = &mut self.counts[idx as usize];
                if *c == 0 {
                    self.missing -= 1;
                }
                *c += 1;
            }
        }
    }

    pub(crate) fn remove(&mut self, net: &TwoLayerNetwork, v: VertexId) {
        for s in net.skills(v) {
            let idx = self.req_index[s.index()];
            if idx != NO_REQ {
                let c = &mut self.counts[idx as usize];
                *c -= 1;
                if *c == 0 {
                    self.missing += 1;
                }
            }
        }
    }

    pub(crate) fn removal_preserves(&self, net: &TwoLayerNetwork, v: VertexId) -> bool {
        net.skills(v).iter().all(|s| {
            let idx = self.req_index[s.index()];
            idx == NO_REQ || self.counts[idx as usize] >= 2
        })
    }

    pub(crate) fn swap_preserves(
        &self,
        net: &TwoLayerNetwork,
        out: VertexId,
        inn: VertexId,
    ) -> bool {
        net.skills(out).iter().all(|s| {
            let idx = self.req_index[s.index()];
            idx == NO_REQ
                || self.counts[idx as usize] >= 2
                || net.skills(inn).binary_search(s).is_ok()
        })
    }

    pub(crate) fn missing_skills(&self) -> Vec<SkillId> {
        self.required
            .iter()
            .enumerate()
            .filter(|&(i, _)| self.counts[i] == 0)
            .map(|(_, &s)| s)
            .collect()
    }
}

/// Greater-than on (primary, gain, smaller-id) with the stated tie order.
fn beats(a: (f64, f64, VertexId), b: (f64, f64, VertexId)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => match a.1.total_cmp(&b.1) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => a.2 < b.2,
        },
    }
}

pub struct Solver<'a> {
    instance: &'a ProblemInstance,
    config: SolverConfig,
    state: CollabState<'a>,
    tracker: RiskTracker<'a>,
    coverage: Coverage,
    trace: Vec<TraceStep>,
}

impl<'a> Solver<'a> {
    pub fn new(instance: &'a ProblemInstance, config: SolverConfig) -> Result<Self, SolveError> {
        let report = validate(instance);
        if !report.is_valid() {
            return Err(SolveError::InvalidInstance(report));
        }
        let tracker = RiskTracker::new(
            &instance.network,
            instance.seed_vertex_set(),
            config.propagation.mc_samples,
            config.propagation.exact_threshold,
            config.rng_seed,
        );
        Ok(Solver {
            instance,
            config,
            state: CollabState::empty(&instance.network),
            tracker,
            coverage: Coverage::new(instance),
            trace: Vec::new(),
        })
    }

    /// Resets the solver onto a given onsite set, so individual phases can be
    /// driven from arbitrary starting teams.
    pub fn reset_onsite(&mut self, onsite: &VertexSet) {
        self.state = CollabState::new(&self.instance.network, onsite);
        self.tracker = RiskTracker::new(
            &self.instance.network,
            self.instance.seed_vertex_set(),
            self.config.propagation.mc_samples,
            self.config.propagation.exact_threshold,
            self.config.rng_seed,
        );
        self.coverage = Coverage::new(self.instance);
        for v in onsite.iter() {
            self.tracker.add(v);
            self.coverage.add(&self.instance.network, v);
        }
        self.trace.clear();
    }

    pub fn onsite(&self) -> &VertexSet {
        self.state.onsite()
    }

    pub fn state(&self) -> &CollabState<'a> {
        &self.state
    }

    pub fn trace(&self) -> &[TraceStep] {
        &self.trace
    }

    pub fn current_risk(&self) -> f64 {
        self.tracker.risk()
    }

    /// True when every risk query in this solve is evaluated exactly rather
    /// than against a sample pool.
    pub fn uses_exact_risk(&self) -> bool {
        self.tracker.is_exact()
    }

    fn apply_add(&mut self, phase: Phase, v: VertexId) {
        self.state.add(v).expect("candidate is offsite");
        self.tracker.add(v);
        self.coverage.add(&self.instance.network, v);
        self.trace.push(TraceStep {
            phase,
            action: MoveKind::Add,
            vertices: vec![v],
            alpha: self.state.average().expect("set is non-empty after an add"),
            risk: self.tracker.risk(),
        });
    }

    /// Construction: cover every required skill, then keep adding positive
    /// gains, always ranked by gain per unit of marginal risk within budget.
    /// While skills are missing, only the candidates covering the most of
    /// them compete, which keeps the cover tight.
    pub fn construction_phase(&mut self) -> Result<(), SolveError> {
        let net = &self.instance.network;
        let budget = self.instance.budget;

        while !self.coverage.complete() {
            let current_risk = self.tracker.risk();
            let mut best: Option<(usize, f64, f64, VertexId)> = None;
            for v in net.vertices() {
                if self.state.onsite().contains(v) {
                    continue;
                }
                let fresh_skills = self.coverage.missing_covered_by(net, v);
                if fresh_skills == 0 || best.is_some_and(|(n, ..)| fresh_skills < n) {
                    continue;
                }
                let risk_after = if self.tracker.may_raise_risk(v) {
                    self.tracker.risk_with_add(v)
                } else {
                    current_risk
                };
                if risk_after > budget {
                    continue;
                }
                let gain = self.state.gain(v);
                let delta = (risk_after - current_risk).max(0.0);
                let ratio = gain / delta.max(self.config.epsilon);
                let key = (ratio, gain, v);
                let replace = match best {
                    None => true,
                    Some((n, ..)) if fresh_skills > n => true,
                    Some((_, r, g, id)) => beats(key, (r, g, id)),
                };
                if replace {
                    best = Some((fresh_skills, ratio, gain, v));
                }
            }
            match best {
                Some((.., v)) => self.apply_add(Phase::Construction, v),
                None => {
                    return Err(SolveError::Infeasible(Infeasibility::SkillGap {
                        missing: self.coverage.missing_skills(),
                    }))
                }
            }
        }

        loop {
            let current_risk = self.tracker.risk();
            let mut best: Option<(f64, f64, VertexId)> = None;
            for v in net.vertices() {
                if self.state.onsite().contains(v) {
                    continue;
                }
                let gain = self.state.gain(v);
                if gain <= 0.0 {
                    continue;
                }
                let risk_after = if self.tracker.may_raise_risk(v) {
                    self.tracker.risk_with_add(v)
                } else {
                    current_risk
                };
                if risk_after > budget {
                    continue;
                }
                let delta = (risk_after - current_risk).max(0.0);
                let ratio = gain / delta.max(self.config.epsilon);
                let key = (ratio, gain, v);
                if best.is_none_or(|k| beats(key, k)) {
                    best = Some(key);
                }
            }
            match best {
                Some((_, _, v)) => self.apply_add(Phase::Construction, v),
                None if self.state.onsite().is_empty() => {
                    // Empty-team rule: nobody offers a positive gain from an
                    // empty set, so admit the safest singleton that fits.
                    let mut fallback: Option<(f64, f64, VertexId)> = None;
                    for v in net.vertices() {
                        let risk_after = if self.tracker.may_raise_risk(v) {
                            self.tracker.risk_with_add(v)
                        } else {
                            current_risk
                        };
                        if risk_after > budget {
                            continue;
                        }
                        let key = (self.state.gain(v), -risk_after, v);
                        if fallback.is_none_or(|k| beats(key, k)) {
                            fallback = Some(key);
                        }
                    }
                    match fallback {
                        Some((_, _, v)) => self.apply_add(Phase::Construction, v),
                        None => return Err(SolveError::Infeasible(Infeasibility::BudgetExhausted)),
                    }
                }
                None => break,
            }
        }
        Ok(())
    }

    /// Refinement: repeatedly drop the lowest-gain member whose gain is
    /// strictly below the current average, as long as coverage survives and
    /// at least one member remains. Removals never increase risk.
    pub fn refinement_phase(&mut self) {
        let net = &self.instance.network;
        while self.state.size() > 1 {
            let alpha = self.state.average().expect("non-empty");
            let mut best: Option<(f64, f64, VertexId)> = None;
            for v in self.state.onsite().iter() {
                let gain = self.state.gain(v);
                if gain >= alpha || !self.coverage.removal_preserves(net, v) {
                    continue;
                }
                // Ascending gain: maximize the negated gain.
                let key = (-gain, gain, v);
                if best.is_none_or(|k| beats(key, k)) {
                    best = Some(key);
                }
            }
            let Some((_, _, v)) = best else { break };
            self.state.remove(v).expect("member is onsite");
            self.tracker.remove(v);
            self.coverage.remove(net, v);
            self.trace.push(TraceStep {
                phase: Phase::Refinement,
                action: MoveKind::Remove,
                vertices: vec![v],
                alpha: self.state.average().expect("size stays >= 1"),
                risk: self.tracker.risk(),
            });
        }
    }

    /// Replacement: up to the exchange cap, propose swapping the onsite
    /// member whose removal drops the most risk for the offsite vertex whose
    /// addition raises the least, accepting only coverage-, objective-, and
    /// budget-preserving swaps. The first rejected proposal ends the phase.
    pub fn replacement_phase(&mut self) {
        let net = &self.instance.network;
        let budget = self.instance.budget;
        let cap = self
            .config
            .exchange_cap
            .unwrap_or(self.instance.exchange_cap);

        for _ in 0..cap {
            if self.state.size() == 0 {
                break;
            }
            let current_risk = self.tracker.risk();

            let mut out_best: Option<(f64, f64, VertexId)> = None;
            for v in self.state.onsite().iter() {
                let drop = (current_risk - self.tracker.risk_with_remove(v)).max(0.0);
                let key = (drop, self.state.gain(v), v);
                if out_best.is_none_or(|k| beats(key, k)) {
                    out_best = Some(key);
                }
            }
            let mut in_best: Option<(f64, f64, VertexId)> = None;
            for v in net.vertices() {
                if self.state.onsite().contains(v) {
                    continue;
                }
                let rise = if self.tracker.may_raise_risk(v) {
                    (self.tracker.risk_with_add(v) - current_risk).max(0.0)
                } else {
                    0.0
                };
                let key = (-rise, self.state.gain(v), v);
                if in_best.is_none_or(|k| beats(key, k)) {
                    in_best = Some(key);
                }
            }
            let (Some((_, _, out)), Some((_, _, inn))) = (out_best, in_best) else {
                break;
            };

            let alpha = self.state.average().expect("non-empty");
            let alpha_after = self.state.average_after_swap(out, inn);
            let accepted = self.coverage.swap_preserves(net, out, inn)
                && alpha_after >= alpha
                && self.tracker.risk_with_swap(out, inn) <= budget;
            if !accepted {
                break;
            }
            self.state.swap(out, inn).expect("swap endpoints are valid");
            self.tracker.swap(out, inn);
            self.coverage.remove(net, out);
            self.coverage.add(net, inn);
            self.trace.push(TraceStep {
                phase: Phase::Replacement,
                action: MoveKind::Swap,
                vertices: vec![out, inn],
                alpha: self.state.average().expect("non-empty"),
                risk: self.tracker.risk(),
            });
        }
    }

    /// Re-verifies the final set with an independent risk evaluation and
    /// packages the result.
    pub fn finish(self) -> SolveResult {
        package_result(
            self.instance,
            self.state.onsite(),
            self.coverage.complete(),
            &self.tracker,
            self.trace,
        )
    }
}

/// Independent verification shared by the solver and the baselines: the flag
/// is set only when the set is non-empty, covers the requirements, and the
/// re-evaluated risk fits the budget (within three standard errors when the
/// evaluation is Monte Carlo).
pub(crate) fn package_result(
    instance: &ProblemInstance,
    onsite: &VertexSet,
    covered: bool,
    tracker: &RiskTracker,
    trace: Vec<TraceStep>,
) -> SolveResult {
    let fresh = tracker.fresh_verify();
    let feasible =
        !onsite.is_empty() && covered && fresh.mean <= instance.budget + 3.0 * fresh.stderr;
    let alpha = average_collaboration(&instance.network, onsite).unwrap_or(0.0);
    SolveResult {
        onsite: onsite.to_vec(),
        alpha,
        risk: fresh.mean,
        risk_stderr: fresh.stderr,
        feasible,
        trace,
    }
}

/// Full pipeline: construction, refinement, replacement, re-verification.
pub fn solve(instance: &ProblemInstance, config: &SolverConfig) -> Result<SolveResult, SolveError> {
    let mut solver = Solver::new(instance, *config)?;
    solver.construction_phase()?;
    solver.refinement_phase();
    solver.replacement_phase();
    Ok(solver.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use crate::oracle::{brute_force_solve, plant_x3c, x3c_gadget};

    fn config() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn construction_covers_a_planted_gadget_within_budget() {
        let planted = plant_x3c(3, 4, 5);
        let instance = x3c_gadget(&planted.instance);
        let mut solver = Solver::new(&instance, config()).unwrap();
        solver.construction_phase().unwrap();
        assert_eq!(solver.onsite().len(), 3);
        assert_eq!(solver.current_risk(), 3.0);
        // The selection is a disjoint-skill exact cover.
        let mut seen = std::collections::BTreeSet::new();
        for v in solver.onsite().iter() {
            for s in instance.network.skills(v) {
                assert!(seen.insert(*s), "skills overlap at {s}");
            }
        }
        assert_eq!(seen.len(), 9);
    }

    #[test]
    fn empty_requirements_admit_the_safest_singleton() {
        // All gains are non-positive; vertex 0 is a seed, so the safest
        // singleton is vertex 1.
        let mut b = NetworkBuilder::new(3, 1);
        b.partnership_edge(0, 1, 1.0, 2.0).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![0], 0.0, 10);
        let mut solver = Solver::new(&instance, config()).unwrap();
        solver.construction_phase().unwrap();
        assert_eq!(solver.onsite().to_vec(), vec![VertexId(1)]);

        let result = solve(&instance, &config()).unwrap();
        let oracle = brute_force_solve(&instance, &config()).unwrap();
        assert!(result.feasible);
        assert_eq!(result.alpha, oracle.alpha);
    }

    #[test]
    fn budget_below_every_singleton_is_infeasible() {
        let b = NetworkBuilder::new(2, 1);
        let instance = ProblemInstance::new(b.build(), vec![], vec![0, 1], 0.0, 10);
        match solve(&instance, &config()).unwrap_err() {
            SolveError::Infeasible(Infeasibility::BudgetExhausted) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unaffordable_skill_holder_is_a_skill_gap() {
        // Only vertex 0 holds the required skill, but bringing it onsite
        // costs a full unit of risk against a 0.5 budget.
        let mut b = NetworkBuilder::new(2, 1);
        b.skills(0, &[0]).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![0], vec![0], 0.5, 10);
        match solve(&instance, &config()).unwrap_err() {
            SolveError::Infeasible(Infeasibility::SkillGap { missing }) => {
                assert_eq!(missing, vec![SkillId(0)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn refinement_keeps_above_average_teams_intact() {
        let mut b = NetworkBuilder::new(2, 1);
        b.partnership_edge(0, 1, 3.0, 1.0).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![], 10.0, 10);
        let mut solver = Solver::new(&instance, config()).unwrap();
        let both = VertexSet::from_iter(2, [VertexId(0), VertexId(1)]);
        solver.reset_onsite(&both);
        solver.refinement_phase();
        assert_eq!(solver.onsite(), &both);
        assert!(solver.trace().is_empty());
    }

    #[test]
    fn refinement_drops_an_idle_member_and_raises_the_average() {
        let mut b = NetworkBuilder::new(3, 1);
        b.partnership_edge(0, 1, 3.0, 1.0).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![], 10.0, 10);
        let mut solver = Solver::new(&instance, config()).unwrap();
        solver.reset_onsite(&VertexSet::from_iter(
            3,
            [VertexId(0), VertexId(1), VertexId(2)],
        ));
        let before = solver.state().average().unwrap();
        solver.refinement_phase();
        assert_eq!(solver.onsite().to_vec(), vec![VertexId(0), VertexId(1)]);
        let after = solver.state().average().unwrap();
        assert!(after > before);
        assert_eq!(before, 1.0);
        assert_eq!(after, 1.5);
    }

    #[test]
    fn refinement_shrinks_gadget_teams_to_an_irredundant_cover() {
        let planted = plant_x3c(3, 6, 21);
        let instance = x3c_gadget(&planted.instance);
        let n = instance.network.vertex_count();
        let mut solver = Solver::new(&instance, config()).unwrap();
        solver.reset_onsite(&VertexSet::from_iter(n, instance.network.vertices()));
        solver.refinement_phase();

        let remaining = solver.onsite().clone();
        assert!(remaining.len() < n);
        // Still a cover, and no member is removable without breaking it.
        let covered = crate::network::covered_skills(&instance.network, &remaining);
        assert_eq!(covered.len(), 9);
        for v in remaining.iter() {
            let mut without = remaining.clone();
            without.remove(v);
            let c = crate::network::covered_skills(&instance.network, &without);
            assert!(c.len() < 9, "member {v} is redundant");
        }
        // Never below the optimum size found by enumeration.
        let oracle = brute_force_solve(&instance, &config()).unwrap();
        assert!(remaining.len() >= oracle.onsite.len());
    }

    #[test]
    fn replacement_with_zero_cap_changes_nothing() {
        let mut b = NetworkBuilder::new(3, 1);
        b.partnership_edge(0, 1, 3.0, 1.0).unwrap();
        b.contact_edge(0, 1, 1.0).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![0], 5.0, 0);
        let mut solver = Solver::new(&instance, config()).unwrap();
        let both = VertexSet::from_iter(3, [VertexId(0), VertexId(1)]);
        solver.reset_onsite(&both);
        solver.replacement_phase();
        assert_eq!(solver.onsite(), &both);
    }

    #[test]
    fn replacement_swaps_the_risky_hub_for_a_safe_twin() {
        // Vertex 1 is an infected hub; vertex 2 offers the same skill and the
        // same collaboration gain without any contact exposure.
        let mut b = NetworkBuilder::new(3, 1);
        b.contact_edge(0, 1, 1.0).unwrap();
        b.partnership_edge(0, 1, 2.0, 1.0).unwrap();
        b.partnership_edge(0, 2, 2.0, 1.0).unwrap();
        b.skills(1, &[0]).unwrap();
        b.skills(2, &[0]).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![0], vec![1], 2.0, 10);
        let mut solver = Solver::new(&instance, config()).unwrap();
        solver.reset_onsite(&VertexSet::from_iter(3, [VertexId(0), VertexId(1)]));
        let risk_before = solver.current_risk();
        let alpha_before = solver.state().average().unwrap();
        solver.replacement_phase();
        assert_eq!(solver.onsite().to_vec(), vec![VertexId(0), VertexId(2)]);
        assert!(solver.current_risk() < risk_before);
        assert_eq!(solver.state().average().unwrap(), alpha_before);
        // The accepted swap is in the trace; the follow-up proposal was
        // rejected and ended the phase.
        let swaps: Vec<_> = solver
            .trace()
            .iter()
            .filter(|s| s.action == MoveKind::Swap)
            .collect();
        assert_eq!(swaps.len(), 1);
        assert_eq!(swaps[0].vertices, vec![VertexId(1), VertexId(2)]);
    }

    #[test]
    fn replacement_rejects_objective_losses() {
        // Swapping in the isolated vertex 2 would lower the average; the
        // proposal is rejected and the phase stops immediately.
        let mut b = NetworkBuilder::new(3, 1);
        b.contact_edge(0, 1, 0.4).unwrap();
        b.partnership_edge(0, 1, 4.0, 1.0).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![0], 5.0, 10);
        let mut solver = Solver::new(&instance, config()).unwrap();
        let both = VertexSet::from_iter(3, [VertexId(0), VertexId(1)]);
        solver.reset_onsite(&both);
        solver.replacement_phase();
        assert_eq!(solver.onsite(), &both);
        assert!(solver.trace().is_empty());
    }

    #[test]
    fn solve_returns_the_positive_pair() {
        let mut b = NetworkBuilder::new(2, 1);
        b.contact_edge(0, 1, 0.0).unwrap();
        b.partnership_edge(0, 1, 3.0, 1.0).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![], 0.0, 10);
        let result = solve(&instance, &config()).unwrap();
        assert!(result.feasible);
        assert_eq!(result.onsite, vec![VertexId(0), VertexId(1)]);
        assert_eq!(result.alpha, 1.5);
        let oracle = brute_force_solve(&instance, &config()).unwrap();
        assert_eq!(result.alpha, oracle.alpha);
    }

    #[test]
    fn solve_finds_planted_covers_at_size_q() {
        for seed in [1, 2, 3] {
            let planted = plant_x3c(4, 6, seed);
            let instance = x3c_gadget(&planted.instance);
            let result = solve(&instance, &config()).unwrap();
            assert!(result.feasible);
            assert_eq!(result.onsite.len(), 4);
            assert!(result.risk <= instance.budget);
        }
    }

    #[test]
    fn feasible_results_survive_reverification() {
        use crate::gen::{random_instance, RandomInstanceSpec};
        use crate::network::{covered_skills, is_feasible};
        use crate::propagation::risk_exact;

        let spec = RandomInstanceSpec::default();
        let mut feasible_seen = 0;
        for seed in 0..60 {
            let instance = random_instance(&spec, seed);
            let Ok(result) = solve(&instance, &config()) else {
                continue;
            };
            if !result.feasible {
                continue;
            }
            feasible_seen += 1;
            let members = VertexSet::from_iter(
                instance.network.vertex_count(),
                result.onsite.iter().copied(),
            );
            let exact = risk_exact(
                &instance.network,
                &members,
                &instance.seed_vertex_set(),
                config().propagation.exact_threshold,
            )
            .unwrap();
            assert!(exact.mean <= instance.budget + 1e-12);
            assert!(is_feasible(&instance, &members, exact.mean));
            let covered = covered_skills(&instance.network, &members);
            assert!(instance.required_skills.iter().all(|s| covered.contains(s)));
        }
        assert!(feasible_seen > 20, "only {feasible_seen} feasible runs");
    }

    #[test]
    fn solve_is_deterministic() {
        use crate::gen::{random_instance, RandomInstanceSpec};
        let spec = RandomInstanceSpec::default();
        for seed in 0..10 {
            let instance = random_instance(&spec, seed);
            let a = solve(&instance, &config());
            let b = solve(&instance, &config());
            match (a, b) {
                (Ok(x), Ok(y)) => assert_eq!(x, y),
                (Err(_), Err(_)) => {}
                other => panic!("divergent outcomes: {other:?}"),
            }
        }
    }

    #[test]
    fn invalid_instances_are_rejected_up_front() {
        let mut b = NetworkBuilder::new(2, 1);
        b.contact_edge(0, 1, 1.5).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![], vec![], 1.0, 10);
        assert!(matches!(
            solve(&instance, &config()),
            Err(SolveError::InvalidInstance(_))
        ));
    }
}
