//! Two-layer network model: a contact layer carrying influence probabilities
//! and a partnership layer carrying onsite/remote collaboration scores, over a
//! shared employee vertex set with per-vertex skills.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;

/// Dense vertex index in `0..vertex_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense skill index in `0..skill_universe`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SkillId(pub u32);

impl SkillId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for SkillId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Undirected contact edge with an influence probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub sigma: f64,
}

/// Undirected partnership edge with onsite and remote collaboration scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnershipEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub onsite: f64,
    pub remote: f64,
}

/// Membership set over the vertices of one network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    bits: BitSet,
}

impl VertexSet {
    pub fn new(vertex_count: usize) -> Self {
        VertexSet {
            bits: BitSet::new(vertex_count),
        }
    }

    pub fn from_iter<I: IntoIterator<Item = VertexId>>(vertex_count: usize, iter: I) -> Self {
        let mut set = VertexSet::new(vertex_count);
        for v in iter {
            set.insert(v);
        }
        set
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.bits.contains(v.index())
    }

    #[inline]
    pub fn insert(&mut self, v: VertexId) -> bool {
        self.bits.insert(v.index())
    }

    #[inline]
    pub fn remove(&mut self, v: VertexId) -> bool {
        self.bits.remove(v.index())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn clear(&mut self) {
        self.bits.clear()
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.bits.is_subset_of(&other.bits)
    }

    /// Members in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bits.iter().map(|i| VertexId(i as u32))
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("vertex id {0} out of range (vertex count {1})")]
    VertexOutOfRange(u32, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(u32, u32),
}

/// Shared-vertex two-layer network. Immutable once built; adjacency is
/// symmetric by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerNetwork {
    vertex_count: usize,
    skill_universe: usize,
    contact_edges: Vec<ContactEdge>,
    partnership_edges: Vec<PartnershipEdge>,
    /// Per vertex: (neighbor, index into `contact_edges`).
    contact_adj: Vec<Vec<(VertexId, u32)>>,
    /// Per vertex: (neighbor, onsite, remote).
    partnership_adj: Vec<Vec<(VertexId, f64, f64)>>,
    /// Per vertex: sorted, deduplicated skill ids.
    skills: Vec<Vec<SkillId>>,
}

impl TwoLayerNetwork {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn skill_universe(&self) -> usize {
        self.skill_universe
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count as u32).map(VertexId)
    }

    pub fn contact_edges(&self) -> &[ContactEdge] {
        &self.contact_edges
    }

    pub fn partnership_edges(&self) -> &[PartnershipEdge] {
        &self.partnership_edges
    }

    /// Contact neighbors of `v` with the edge index carrying sigma.
    pub fn contact_neighbors(&self, v: VertexId) -> &[(VertexId, u32)] {
        &self.contact_adj[v.index()]
    }

    /// Partnership neighbors of `v` with (onsite, remote) scores.
    pub fn partnership_neighbors(&self, v: VertexId) -> &[(VertexId, f64, f64)] {
        &self.partnership_adj[v.index()]
    }

    pub fn skills(&self, v: VertexId) -> &[SkillId] {
        &self.skills[v.index()]
    }

    /// Number of contact edges with probability strictly between 0 and 1
    /// inside the subgraph induced by `members`. These are the edges an exact
    /// risk evaluation has to enumerate over.
    pub fn uncertain_contact_edges_within(&self, members: &VertexSet) -> usize {
        self.contact_edges
            .iter()
            .filter(|e| {
                e.sigma > 0.0 && e.sigma < 1.0 && members.contains(e.u) && members.contains(e.v)
            })
            .count()
    }
}

/// Stepwise constructor for [`TwoLayerNetwork`]. Ids must be in range and each
/// layer rejects self-loops and parallel edges; attribute values are accepted
/// as-is and checked by [`validate`].
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    vertex_count: usize,
    skill_universe: usize,
    contact_edges: Vec<ContactEdge>,
    partnership_edges: Vec<PartnershipEdge>,
    contact_seen: BTreeSet<(u32, u32)>,
    partnership_seen: BTreeSet<(u32, u32)>,
    skills: Vec<Vec<SkillId>>,
}

impl NetworkBuilder {
    pub fn new(vertex_count: usize, skill_universe: usize) -> Self {
        NetworkBuilder {
            vertex_count,
            skill_universe,
            contact_edges: Vec::new(),
            partnership_edges: Vec::new(),
            contact_seen: BTreeSet::new(),
            partnership_seen: BTreeSet::new(),
            skills: vec![Vec::new(); vertex_count],
        }
    }

    fn check_pair(&self, u: u32, v: u32) -> Result<(u32, u32), BuildError> {
        if u as usize >= self.vertex_count {
            return Err(BuildError::VertexOutOfRange(u, self.vertex_count));
        }
        if v as usize >= self.vertex_count {
            return Err(BuildError::VertexOutOfRange(v, self.vertex_count));
        }
        if u == v {
            return Err(BuildError::SelfLoop(u));
        }
        Ok((u.min(v), u.max(v)))
    }

    pub fn contact_edge(&mut self, u: u32, v: u32, sigma: f64) -> Result<&mut Self, BuildError> {
        let key = self.check_pair(u, v)?;
        if !self.contact_seen.insert(key) {
            return Err(BuildError::DuplicateEdge(key.0, key.1));
        }
        self.contact_edges.push(ContactEdge {
            u: VertexId(key.0),
            v: VertexId(key.1),
            sigma,
        });
        Ok(self)
    }

    pub fn partnership_edge(
        &mut self,
        u: u32,
        v: u32,
        onsite: f64,
        remote: f64,
    ) -> Result<&mut Self, BuildError> {
        let key = self.check_pair(u, v)?;
        if !self.partnership_seen.insert(key) {
            return Err(BuildError::DuplicateEdge(key.0, key.1));
        }
        self.partnership_edges.push(PartnershipEdge {
            u: VertexId(key.0),
            v: VertexId(key.1),
            onsite,
            remote,
        });
        Ok(self)
    }

    /// Sets the skill set of a vertex (sorted and deduplicated). Out-of-range
    /// skill ids are kept so that validation can report them.
    pub fn skills(&mut self, v: u32, skills: &[u32]) -> Result<&mut Self, BuildError> {
        if v as usize >= self.vertex_count {
            return Err(BuildError::VertexOutOfRange(v, self.vertex_count));
        }
        let mut list: Vec<SkillId> = skills.iter().map(|&s| SkillId(s)).collect();
        list.sort_unstable();
        list.dedup();
        self.skills[v as usize] = list;
        Ok(self)
    }

    pub fn build(self) -> TwoLayerNetwork {
        let mut contact_edges = self.contact_edges;
        contact_edges.sort_unstable_by_key(|e| (e.u, e.v));
        let mut partnership_edges = self.partnership_edges;
        partnership_edges.sort_unstable_by_key(|e| (e.u, e.v));

        let mut contact_adj = vec![Vec::new(); self.vertex_count];
        for (i, e) in contact_edges.iter().enumerate() {
            contact_adj[e.u.index()].push((e.v, i as u32));
            contact_adj[e.v.index()].push((e.u, i as u32));
        }
        let mut partnership_adj = vec![Vec::new(); self.vertex_count];
        for e in &partnership_edges {
            partnership_adj[e.u.index()].push((e.v, e.onsite, e.remote));
            partnership_adj[e.v.index()].push((e.u, e.onsite, e.remote));
        }
        for adj in &mut contact_adj {
            adj.sort_unstable_by_key(|&(v, _)| v);
        }
        for adj in &mut partnership_adj {
            adj.sort_unstable_by_key(|&(v, _, _)| v);
        }

        TwoLayerNetwork {
            vertex_count: self.vertex_count,
            skill_universe: self.skill_universe,
            contact_edges,
            partnership_edges,
            contact_adj,
            partnership_adj,
            skills: self.skills,
        }
    }
}

/// A full problem instance: network, required skills, initially infected
/// seeds, risk budget, and the exchange-trial cap for the replacement phase.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub network: TwoLayerNetwork,
    /// Required skill set, sorted.
    pub required_skills: Vec<SkillId>,
    /// Initially infected vertices, sorted.
    pub seed_set: Vec<VertexId>,
    /// Risk budget: upper bound on the expected onsite infection count.
    pub budget: f64,
    /// Cap on replacement-phase exchange trials.
    pub exchange_cap: u32,
}

impl ProblemInstance {
    pub fn new(
        network: TwoLayerNetwork,
        required_skills: Vec<u32>,
        seed_set: Vec<u32>,
        budget: f64,
        exchange_cap: u32,
    ) -> Self {
        let mut required_skills: Vec<SkillId> = required_skills.into_iter().map(SkillId).collect();
        required_skills.sort_unstable();
        required_skills.dedup();
        let mut seed_set: Vec<VertexId> = seed_set.into_iter().map(VertexId).collect();
        seed_set.sort_unstable();
        seed_set.dedup();
        ProblemInstance {
            network,
            required_skills,
            seed_set,
            budget,
            exchange_cap,
        }
    }

    pub fn seed_vertex_set(&self) -> VertexSet {
        VertexSet::from_iter(self.network.vertex_count(), self.seed_set.iter().copied())
    }
}

/// A single invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    SigmaOutOfRange {
        u: VertexId,
        v: VertexId,
        sigma: f64,
    },
    NegativeScore {
        u: VertexId,
        v: VertexId,
        onsite: f64,
        remote: f64,
    },
    NonFiniteScore {
        u: VertexId,
        v: VertexId,
    },
    SkillOutOfRange {
        vertex: VertexId,
        skill: SkillId,
    },
    RequiredSkillOutOfRange {
        skill: SkillId,
    },
    SeedOutOfRange {
        vertex: VertexId,
    },
    NegativeBudget {
        budget: f64,
    },
    NonFiniteBudget {
        budget: f64,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::SigmaOutOfRange { u, v, sigma } => {
                write!(f, "contact edge [{u},{v}]: sigma {sigma} outside [0,1]")
            }
            ValidationIssue::NegativeScore {
                u,
                v,
                onsite,
                remote,
            } => write!(
                f,
                "partnership edge [{u},{v}]: negative score (o={onsite}, r={remote})"
            ),
            ValidationIssue::NonFiniteScore { u, v } => {
                write!(f, "partnership edge [{u},{v}]: non-finite score")
            }
            ValidationIssue::SkillOutOfRange { vertex, skill } => {
                write!(f, "vertex {vertex}: skill id {skill} outside the universe")
            }
            ValidationIssue::RequiredSkillOutOfRange { skill } => {
                write!(f, "required skill id {skill} outside the universe")
            }
            ValidationIssue::SeedOutOfRange { vertex } => {
                write!(f, "seed vertex {vertex} out of range")
            }
            ValidationIssue::NegativeBudget { budget } => {
                write!(f, "risk budget {budget} is negative")
            }
            ValidationIssue::NonFiniteBudget { budget } => {
                write!(f, "risk budget {budget} is not finite")
            }
        }
    }
}

/// Every invariant violation in the instance; empty for a valid one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            write!(f, "instance is valid")
        } else {
            for issue in &self.issues {
                writeln!(f, "{issue}")?;
            }
            Ok(())
        }
    }
}

/// Checks every instance invariant and reports all violations.
pub fn validate(instance: &ProblemInstance) -> ValidationReport {
    let net = &instance.network;
    let mut issues = Vec::new();

    for e in net.contact_edges() {
        if !(0.0..=1.0).contains(&e.sigma) || e.sigma.is_nan() {
            issues.push(ValidationIssue::SigmaOutOfRange {
                u: e.u,
                v: e.v,
                sigma: e.sigma,
            });
        }
    }
    for e in net.partnership_edges() {
        if !e.onsite.is_finite() || !e.remote.is_finite() {
            issues.push(ValidationIssue::NonFiniteScore { u: e.u, v: e.v });
        } else if e.onsite < 0.0 || e.remote < 0.0 {
            issues.push(ValidationIssue::NegativeScore {
                u: e.u,
                v: e.v,
                onsite: e.onsite,
                remote: e.remote,
            });
        }
    }
    for v in net.vertices() {
        for &skill in net.skills(v) {
            if skill.index() >= net.skill_universe() {
                issues.push(ValidationIssue::SkillOutOfRange { vertex: v, skill });
            }
        }
    }
    for &skill in &instance.required_skills {
        if skill.index() >= net.skill_universe() {
            issues.push(ValidationIssue::RequiredSkillOutOfRange { skill });
        }
    }
    for &seed in &instance.seed_set {
        if seed.index() >= net.vertex_count() {
            issues.push(ValidationIssue::SeedOutOfRange { vertex: seed });
        }
    }
    if instance.budget.is_nan() || instance.budget.is_infinite() {
        issues.push(ValidationIssue::NonFiniteBudget {
            budget: instance.budget,
        });
    } else if instance.budget < 0.0 {
        issues.push(ValidationIssue::NegativeBudget {
            budget: instance.budget,
        });
    }

    ValidationReport { issues }
}

/// Union of the skill sets of `subset`.
pub fn covered_skills(network: &TwoLayerNetwork, subset: &VertexSet) -> BTreeSet<SkillId> {
    let mut covered = BTreeSet::new();
    for v in subset.iter() {
        covered.extend(network.skills(v).iter().copied());
    }
    covered
}

/// Definition-level feasibility: non-empty, covers the required skills, and
/// the caller-supplied risk value stays within budget.
pub fn is_feasible(instance: &ProblemInstance, subset: &VertexSet, risk_value: f64) -> bool {
    if subset.is_empty() {
        return false;
    }
    if risk_value > instance.budget {
        return false;
    }
    let covered = covered_skills(&instance.network, subset);
    instance
        .required_skills
        .iter()
        .all(|skill| covered.contains(skill))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_instance(sigma: f64, skills_b: &[u32]) -> ProblemInstance {
        let mut b = NetworkBuilder::new(3, 4);
        b.contact_edge(0, 1, sigma).unwrap();
        b.partnership_edge(0, 1, 1.0, 0.5).unwrap();
        b.skills(0, &[0, 1]).unwrap();
        b.skills(1, skills_b).unwrap();
        ProblemInstance::new(b.build(), vec![0], vec![0], 1.0, 10)
    }

    #[test]
    fn validate_flags_sigma_out_of_range() {
        let report = validate(&tiny_instance(1.2, &[2]));
        assert_eq!(report.issues.len(), 1);
        assert!(matches!(
            report.issues[0],
            ValidationIssue::SigmaOutOfRange { sigma, .. } if sigma == 1.2
        ));
    }

    #[test]
    fn validate_accepts_well_formed_instance() {
        let report = validate(&tiny_instance(0.5, &[2, 3]));
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn validate_flags_skill_out_of_range() {
        let report = validate(&tiny_instance(0.5, &[4]));
        assert_eq!(report.issues.len(), 1);
        assert!(matches!(
            report.issues[0],
            ValidationIssue::SkillOutOfRange {
                skill: SkillId(4),
                ..
            }
        ));
    }

    #[test]
    fn validate_reports_every_violation_at_once() {
        let mut b = NetworkBuilder::new(2, 2);
        b.contact_edge(0, 1, -0.5).unwrap();
        b.partnership_edge(0, 1, 1.0, -2.0).unwrap();
        b.skills(0, &[7]).unwrap();
        let instance = ProblemInstance::new(b.build(), vec![9], vec![5], -1.0, 10);
        let report = validate(&instance);
        assert_eq!(report.issues.len(), 6);
        let has = |pred: fn(&ValidationIssue) -> bool| report.issues.iter().any(pred);
        assert!(has(|i| matches!(i, ValidationIssue::SigmaOutOfRange { .. })));
        assert!(has(|i| matches!(i, ValidationIssue::NegativeScore { .. })));
        assert!(has(|i| matches!(i, ValidationIssue::SkillOutOfRange { .. })));
        assert!(has(|i| matches!(i, ValidationIssue::RequiredSkillOutOfRange { .. })));
        assert!(has(|i| matches!(i, ValidationIssue::SeedOutOfRange { .. })));
        assert!(has(|i| matches!(i, ValidationIssue::NegativeBudget { .. })));
    }

    #[test]
    fn builder_rejects_duplicates_and_self_loops() {
        let mut b = NetworkBuilder::new(3, 1);
        b.contact_edge(0, 1, 0.5).unwrap();
        assert_eq!(
            b.contact_edge(1, 0, 0.2).unwrap_err(),
            BuildError::DuplicateEdge(0, 1)
        );
        assert_eq!(
            b.contact_edge(2, 2, 0.1).unwrap_err(),
            BuildError::SelfLoop(2)
        );
        assert!(matches!(
            b.partnership_edge(0, 3, 1.0, 1.0).unwrap_err(),
            BuildError::VertexOutOfRange(3, 3)
        ));
    }

    #[test]
    fn covered_skills_unions_member_skills() {
        let instance = tiny_instance(0.5, &[1, 2]);
        let net = &instance.network;
        let empty = VertexSet::new(3);
        assert!(covered_skills(net, &empty).is_empty());

        let both = VertexSet::from_iter(3, [VertexId(0), VertexId(1)]);
        let covered: Vec<u32> = covered_skills(net, &both).iter().map(|s| s.0).collect();
        assert_eq!(covered, vec![0, 1, 2]);
    }

    #[test]
    fn feasibility_checks_coverage_budget_and_nonempty() {
        let instance = tiny_instance(0.0, &[2]);
        let v0 = VertexSet::from_iter(3, [VertexId(0)]);
        // Coverage and risk both fine.
        assert!(is_feasible(&instance, &v0, 0.0));
        // Budget boundary is inclusive; just above fails.
        assert!(is_feasible(&instance, &v0, instance.budget));
        assert!(!is_feasible(&instance, &v0, instance.budget + 0.001));
        // Missing skill 0.
        let v1 = VertexSet::from_iter(3, [VertexId(1)]);
        assert!(!is_feasible(&instance, &v1, 0.0));
        // Empty set is never feasible, even with no requirements.
        let mut no_req = instance.clone();
        no_req.required_skills.clear();
        assert!(!is_feasible(&no_req, &VertexSet::new(3), 0.0));
        assert!(is_feasible(&no_req, &v1, 0.0));
    }
}
