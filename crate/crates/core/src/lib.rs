//! Solver library for risk-aware skill-coverage hybrid workforce
//! configuration on two-layer social networks.
//!
//! An instance pairs a contact layer (edges carry influence probabilities)
//! with a partnership layer (edges carry onsite and remote collaboration
//! scores) over one employee vertex set. The task: pick an onsite subset
//! maximizing average collaboration, subject to covering a required skill set
//! and keeping the expected infection count of the onsite group within a
//! budget, where infections spread by independent cascade over the contact
//! subgraph induced by the onsite set.
//!
//! The main solver assembles a team greedily by collaboration gain per unit
//! of marginal risk, prunes below-average members while coverage survives,
//! and then swaps high-risk members for safer outsiders. Exhaustive oracles,
//! exact-cover gadgets, and baseline comparators support verification.

pub mod baselines;
mod bitset;
pub mod format;
pub mod gen;
pub mod network;
pub mod objective;
pub mod oracle;
pub mod propagation;
pub mod pruning;
pub mod solver;
mod tracker;

pub use network::{
    covered_skills, is_feasible, validate, BuildError, ContactEdge, NetworkBuilder,
    PartnershipEdge, ProblemInstance, SkillId, TwoLayerNetwork, ValidationIssue, ValidationReport,
    VertexId, VertexSet,
};
pub use objective::{average_collaboration, collaboration_gain, CollabState, ObjectiveError};
pub use propagation::{
    marginal_risk, risk_auto, risk_exact, risk_mc, PropagationConfig, PropagationModel, RiskError,
    RiskEstimate, SamplePool,
};
pub use solver::{
    solve, Infeasibility, MoveKind, Phase, SolveError, SolveResult, Solver, SolverConfig, TraceStep,
};
