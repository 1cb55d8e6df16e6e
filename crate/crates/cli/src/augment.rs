//! Seeded attribute augmentation: dresses a bare topology up as a two-layer
//! network (influence probabilities, collaboration scores, skills) and
//! assembles full problem instances around it. Real datasets ship without
//! these attributes, so every run declares its distributions and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rshwc_core::{NetworkBuilder, ProblemInstance, TwoLayerNetwork};

use crate::snap::RawGraph;

/// Distributions for the augmented attributes. Remote scores are a fixed
/// fraction of the onsite score: `remote = remote_ratio * onsite`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentParams {
    pub skill_universe_size: usize,
    /// Inclusive uniform range of skills per vertex.
    pub skills_per_vertex: (usize, usize),
    /// Uniform range of contact influence probabilities.
    pub sigma_range: (f64, f64),
    /// Uniform range of onsite collaboration scores.
    pub onsite_range: (f64, f64),
    /// Remote effectiveness relative to onsite, in (0, 1].
    pub remote_ratio: f64,
    pub rng_seed: u64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            skill_universe_size: 50,
            skills_per_vertex: (1, 3),
            sigma_range: (0.01, 0.1),
            onsite_range: (0.5, 1.5),
            remote_ratio: 0.7,
            rng_seed: 42,
        }
    }
}

/// Both layers reuse the loaded topology; sigma, onsite scores, and skills
/// are drawn in a fixed order from the seed, and the remote ratio enters only
/// after the draws, so sweeps over it reuse identical score draws.
pub fn augment(graph: &RawGraph, params: &AugmentParams) -> TwoLayerNetwork {
    assert!(
        params.remote_ratio > 0.0 && params.remote_ratio <= 1.0,
        "remote ratio must be in (0, 1]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut b = NetworkBuilder::new(graph.vertex_count, params.skill_universe_size);

    for &(u, v) in &graph.edges {
        let sigma = rng.random_range(params.sigma_range.0..=params.sigma_range.1);
        b.contact_edge(u, v, sigma)
            .expect("loader yields simple graphs");
    }
    for &(u, v) in &graph.edges {
        let onsite = rng.random_range(params.onsite_range.0..=params.onsite_range.1);
        let remote = params.remote_ratio * onsite;
        b.partnership_edge(u, v, onsite, remote)
            .expect("loader yields simple graphs");
    }
    let (lo, hi) = params.skills_per_vertex;
    for v in 0..graph.vertex_count as u32 {
        let count = rng.random_range(lo..=hi).min(params.skill_universe_size);
        let mut skills = Vec::with_capacity(count);
        while skills.len() < count {
            let s = rng.random_range(0..params.skill_universe_size as u32);
            if !skills.contains(&s) {
                skills.push(s);
            }
        }
        b.skills(v, &skills).expect("vertex ids are dense");
    }
    b.build()
}

/// Requirements wrapped around an augmented network.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParams {
    /// Number of required skills, drawn from the skills actually present.
    pub required_skills: usize,
    /// Fraction of vertices initially infected (at least one when positive).
    pub seed_fraction: f64,
    /// Risk budget.
    pub budget: f64,
    /// Replacement-phase exchange cap.
    pub exchange_cap: u32,
    pub rng_seed: u64,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams {
            required_skills: 10,
            seed_fraction: 1.0,
            budget: default_budget(10),
            exchange_cap: 50,
            rng_seed: 42,
        }
    }
}

/// Default risk budget for experiment instances, scaled to the number of
/// required skills. With the default everyone-initially-infected seeding the
/// budget caps the onsite headcount, so it must leave room for a cover.
pub fn default_budget(required_skills: usize) -> f64 {
    0.8 * required_skills as f64 + 1.0
}

pub fn assemble_instance(network: TwoLayerNetwork, params: &InstanceParams) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let n = network.vertex_count();

    let mut present: Vec<u32> = {
        let mut set = std::collections::BTreeSet::new();
        for v in network.vertices() {
            set.extend(network.skills(v).iter().map(|s| s.0));
        }
        set.into_iter().collect()
    };
    let mut required = Vec::new();
    while required.len() < params.required_skills.min(present.len()) {
        let i = rng.random_range(0..present.len());
        required.push(present.swap_remove(i));
    }

    let want_seeds = if params.seed_fraction > 0.0 && n > 0 {
        ((params.seed_fraction * n as f64).round() as usize).clamp(1, n)
    } else {
        0
    };
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut seeds = Vec::with_capacity(want_seeds);
    for _ in 0..want_seeds {
        let i = rng.random_range(0..pool.len());
        seeds.push(pool.swap_remove(i));
    }

    ProblemInstance::new(network, required, seeds, params.budget, params.exchange_cap)
}
