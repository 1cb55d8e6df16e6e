//! Seeded generators for synthetic graphs and small random instances. The
//! random instances target oracle-scale verification; experiment-scale
//! networks come from augmenting a real or synthetic topology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{NetworkBuilder, ProblemInstance};

/// Uniform simple undirected graph with `n` vertices and (up to) `m` edges,
/// returned as `u < v` pairs in draw order.
pub fn synthetic_graph(n: usize, m: usize, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    let target = m.min(max_edges);
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(target);
    while edges.len() < target {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push(key);
        }
    }
    edges
}

/// Knobs for [`random_instance`].
#[derive(Debug, Clone)]
pub struct RandomInstanceSpec {
    /// Inclusive vertex-count range.
    pub vertices: (usize, usize),
    pub max_contact_edges: usize,
    /// Probability of each potential partnership edge.
    pub partnership_density: f64,
    /// Fraction of contact edges forced to sigma = 0.
    pub sigma_zero_fraction: f64,
    pub onsite_range: (f64, f64),
    /// When set, draw remote = fraction * onsite with the fraction uniform in
    /// this range (keeps onsite >= remote). Otherwise remote is drawn
    /// independently from `onsite_range`.
    pub remote_fraction: Option<(f64, f64)>,
    pub skill_universe: usize,
    /// Inclusive skills-per-vertex range.
    pub skills_per_vertex: (usize, usize),
    /// Inclusive required-skill-count range (capped by the coverable skills).
    pub required_count: (usize, usize),
    pub seed_fraction: f64,
    pub budget_range: (f64, f64),
    pub exchange_cap: u32,
}

impl Default for RandomInstanceSpec {
    fn default() -> Self {
        RandomInstanceSpec {
            vertices: (4, 12),
            max_contact_edges: 18,
            partnership_density: 0.45,
            sigma_zero_fraction: 0.2,
            onsite_range: (0.2, 2.0),
            remote_fraction: None,
            skill_universe: 6,
            skills_per_vertex: (0, 3),
            required_count: (0, 3),
            seed_fraction: 0.25,
            budget_range: (0.5, 4.0),
            exchange_cap: 20,
        }
    }
}

/// Seeded random instance for oracle-scale testing. Required skills are drawn
/// from the skills actually present, so coverage is possible unless the
/// budget forbids it.
pub fn random_instance(spec: &RandomInstanceSpec, seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(spec.vertices.0..=spec.vertices.1);
    let mut b = NetworkBuilder::new(n, spec.skill_universe);

    let max_pairs = n * n.saturating_sub(1) / 2;
    let contact_target = spec.max_contact_edges.min(max_pairs);
    let contact_count = if contact_target == 0 {
        0
    } else {
        rng.random_range(0..=contact_target)
    };
    let mut placed = 0;
    while placed < contact_count {
        let u = rng.random_range(0..n as u32);
        let v = rng.random_range(0..n as u32);
        if u == v {
            continue;
        }
        let sigma = if rng.random::<f64>() < spec.sigma_zero_fraction {
            0.0
        } else {
            rng.random::<f64>()
        };
        if b.contact_edge(u, v, sigma).is_ok() {
            placed += 1;
        }
    }

    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random::<f64>() >= spec.partnership_density {
                continue;
            }
            let onsite = rng.random_range(spec.onsite_range.0..=spec.onsite_range.1);
            let remote = match spec.remote_fraction {
                Some((lo, hi)) => onsite * rng.random_range(lo..=hi),
                None => rng.random_range(spec.onsite_range.0..=spec.onsite_range.1),
            };
            b.partnership_edge(u, v, onsite, remote)
                .expect("pair visited once");
        }
    }

    let mut present = std::collections::BTreeSet::new();
    for v in 0..n as u32 {
        let count = rng.random_range(spec.skills_per_vertex.0..=spec.skills_per_vertex.1);
        let mut skills = Vec::new();
        while skills.len() < count.min(spec.skill_universe) {
            let s = rng.random_range(0..spec.skill_universe as u32);
            if !skills.contains(&s) {
                skills.push(s);
            }
        }
        present.extend(skills.iter().copied());
        b.skills(v, &skills).expect("vertex in range");
    }

    let coverable: Vec<u32> = present.into_iter().collect();
    let want = rng.random_range(spec.required_count.0..=spec.required_count.1);
    let mut required: Vec<u32> = Vec::new();
    let mut candidates = coverable.clone();
    while required.len() < want.min(coverable.len()) {
        let pick = rng.random_range(0..candidates.len());
        required.push(candidates.swap_remove(pick));
    }

    let seeds: Vec<u32> = (0..n as u32)
        .filter(|_| rng.random::<f64>() < spec.seed_fraction)
        .collect();
    let budget = rng.random_range(spec.budget_range.0..=spec.budget_range.1);

    ProblemInstance::new(b.build(), required, seeds, budget, spec.exchange_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate;

    #[test]
    fn synthetic_graph_is_simple_and_seeded() {
        let edges = synthetic_graph(50, 120, 9);
        assert_eq!(edges.len(), 120);
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            assert!(u < v && (v as usize) < 50);
            assert!(seen.insert((u, v)));
        }
        assert_eq!(edges, synthetic_graph(50, 120, 9));
        // Requests beyond the simple-graph maximum are capped.
        assert_eq!(synthetic_graph(3, 10, 1).len(), 3);
    }

    #[test]
    fn random_instances_validate_and_reproduce() {
        let spec = RandomInstanceSpec::default();
        for seed in 0..50 {
            let instance = random_instance(&spec, seed);
            assert!(validate(&instance).is_valid());
            assert!(instance.network.vertex_count() <= 12);
            assert_eq!(instance, random_instance(&spec, seed));
        }
    }
}
