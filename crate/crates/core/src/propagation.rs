//! Contact-risk estimators under the Independent Cascade model.
//!
//! `risk(U, S)` is the expected number of infected vertices in `U` when the
//! cascade runs on the contact subgraph induced by `U`, seeded by `S ∩ U`.
//! Equivalently: each contact edge is independently live with probability
//! sigma, and a vertex is infected iff it is reachable from a seed through
//! live edges inside `U`.
//!
//! Two estimators are provided. The exact one enumerates live-edge patterns
//! over the uncertain edges (0 < sigma < 1); edges with sigma = 0 never
//! transmit and edges with sigma = 1 always do, so neither contributes to the
//! enumeration. The Monte Carlo one draws a pool of live-edge samples from a
//! seeded stream; reusing one pool across subset queries gives common random
//! numbers, which keeps comparisons between overlapping subsets consistent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::network::{TwoLayerNetwork, VertexId, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropagationModel {
    IndependentCascade,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub model: PropagationModel,
    pub mc_samples: usize,
    pub rng_seed: u64,
    /// Maximum number of uncertain live edges the exact estimator will
    /// enumerate over.
    pub exact_threshold: usize,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            model: PropagationModel::IndependentCascade,
            mc_samples: 10_000,
            rng_seed: 42,
            exact_threshold: 20,
        }
    }
}

/// Estimated expected infection count, with `stderr = 0` for exact values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub exact: bool,
}

impl RiskEstimate {
    fn exact(mean: f64) -> Self {
        RiskEstimate {
            mean,
            stderr: 0.0,
            samples: 0,
            exact: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RiskError {
    #[error("{edges} uncertain contact edges in the induced subgraph exceed the exact enumeration threshold {threshold}")]
    TooLargeForExact { edges: usize, threshold: usize },
}

/// Exact expectation by enumerating live-edge patterns, component by
/// component. Errors when the induced subgraph has more than
/// `exact_threshold` uncertain edges.
pub fn risk_exact(
    network: &TwoLayerNetwork,
    members: &VertexSet,
    seeds: &VertexSet,
    exact_threshold: usize,
) -> Result<RiskEstimate, RiskError> {
    let uncertain_total = network.uncertain_contact_edges_within(members);
    if uncertain_total > exact_threshold {
        return Err(RiskError::TooLargeForExact {
            edges: uncertain_total,
            threshold: exact_threshold,
        });
    }

    // Seeds inside the population are infected by definition.
    let mut mean = members.iter().filter(|&v| seeds.contains(v)).count() as f64;

    // Group the members by connectivity over transmitting edges (sigma > 0);
    // only components that mix seeds and non-seeds need enumeration.
    let member_list: Vec<VertexId> = members.iter().collect();
    let mut local = vec![usize::MAX; network.vertex_count()];
    for (i, &v) in member_list.iter().enumerate() {
        local[v.index()] = i;
    }
    let mut dsu = Dsu::new(member_list.len());
    let mut live_edges = Vec::new();
    for e in network.contact_edges() {
        if e.sigma > 0.0 && members.contains(e.u) && members.contains(e.v) {
            let (lu, lv) = (local[e.u.index()], local[e.v.index()]);
            dsu.union(lu, lv);
            live_edges.push((lu, lv, e.sigma));
        }
    }

    let mut component_of = vec![usize::MAX; member_list.len()];
    let mut components: Vec<ComponentGraph> = Vec::new();
    for i in 0..member_list.len() {
        let root = dsu.find(i);
        if component_of[root] == usize::MAX {
            component_of[root] = components.len();
            components.push(ComponentGraph::default());
        }
        let comp = &mut components[component_of[root]];
        component_of[i] = component_of[root];
        comp.local_of.push(i);
    }
    for comp in &mut components {
        comp.index_members(&member_list, seeds);
    }
    for &(lu, lv, sigma) in &live_edges {
        let comp = &mut components[component_of[dsu.find(lu)]];
        comp.add_edge(lu, lv, sigma);
    }

    for comp in &components {
        mean += comp.expected_nonseed_infections();
    }
    Ok(RiskEstimate::exact(mean))
}

#[derive(Default)]
struct ComponentGraph {
    /// Member-list indices of this component's vertices.
    local_of: Vec<usize>,
    /// Position within the component, indexed by member-list index.
    position: Vec<(usize, usize)>,
    seeds: Vec<usize>,
    nonseed_count: usize,
    /// (neighbor, uncertain edge bit or None for sigma = 1) per vertex.
    adj: Vec<Vec<(usize, Option<u32>)>>,
    sigmas: Vec<f64>,
}

impl ComponentGraph {
    fn index_members(&mut self, member_list: &[VertexId], seeds: &VertexSet) {
        self.adj = vec![Vec::new(); self.local_of.len()];
        self.position = self.local_of.iter().map(|&m| (m, 0)).collect();
        for (pos, entry) in self.position.iter_mut().enumerate() {
            entry.1 = pos;
        }
        for (pos, &m) in self.local_of.iter().enumerate() {
            if seeds.contains(member_list[m]) {
                self.seeds.push(pos);
            } else {
                self.nonseed_count += 1;
            }
        }
    }

    fn pos_of(&self, member_index: usize) -> usize {
        self.position
            .iter()
            .find(|&&(m, _)| m == member_index)
            .map(|&(_, p)| p)
            .expect("endpoint belongs to this component")
    }

    fn add_edge(&mut self, lu: usize, lv: usize, sigma: f64) {
        let (pu, pv) = (self.pos_of(lu), self.pos_of(lv));
        let bit = if sigma < 1.0 {
            self.sigmas.push(sigma);
            Some(self.sigmas.len() as u32 - 1)
        } else {
            None
        };
        self.adj[pu].push((pv, bit));
        self.adj[pv].push((pu, bit));
    }

    /// Sum over live-edge patterns of pattern probability times the number of
    /// non-seed vertices reachable from the seeds.
    fn expected_nonseed_infections(&self) -> f64 {
        if self.seeds.is_empty() || self.nonseed_count == 0 {
            return 0.0;
        }
        let m = self.sigmas.len();
        let n = self.adj.len();
        let mut total = 0.0;
        let mut visited = vec![false; n];
        let mut queue = Vec::with_capacity(n);
        for mask in 0u64..(1u64 << m) {
            let mut prob = 1.0;
            for (bit, &sigma) in self.sigmas.iter().enumerate() {
                prob *= if mask & (1 << bit) != 0 {
                    sigma
                } else {
                    1.0 - sigma
                };
            }
            if prob == 0.0 {
                continue;
            }
            visited.fill(false);
            queue.clear();
            for &s in &self.seeds {
                visited[s] = true;
                queue.push(s);
            }
            let mut infected_nonseed = 0usize;
            while let Some(x) = queue.pop() {
                for &(y, bit) in &self.adj[x] {
                    let alive = match bit {
                        None => true,
                        Some(b) => mask & (1 << b) != 0,
                    };
                    if alive && !visited[y] {
                        visited[y] = true;
                        infected_nonseed += 1;
                        queue.push(y);
                    }
                }
            }
            total += prob * infected_nonseed as f64;
        }
        total
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// A fixed pool of live-edge samples. Sample `k` draws one aliveness bit per
/// contact edge from a stream derived from `(rng_seed, k)` alone, so pools
/// are reproducible and per-sample results are schedule-independent.
#[derive(Debug, Clone)]
pub struct SamplePool {
    alive: Vec<BitSet>,
}

impl SamplePool {
    pub fn generate(network: &TwoLayerNetwork, num_samples: usize, rng_seed: u64) -> Self {
        let edge_count = network.contact_edges().len();
        let mut alive = Vec::with_capacity(num_samples);
        for k in 0..num_samples {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(k as u64);
            let mut bits = BitSet::new(edge_count);
            for (i, e) in network.contact_edges().iter().enumerate() {
                if rng.random::<f64>() < e.sigma {
                    bits.insert(i);
                }
            }
            alive.push(bits);
        }
        SamplePool { alive }
    }

    pub fn num_samples(&self) -> usize {
        self.alive.len()
    }

    #[inline]
    pub fn is_alive(&self, sample: usize, edge_index: u32) -> bool {
        self.alive[sample].contains(edge_index as usize)
    }

    /// Infected count for one sample: vertices of `members` reachable from
    /// `seeds ∩ members` through live edges inside the induced subgraph.
    pub fn cascade_count(
        &self,
        network: &TwoLayerNetwork,
        members: &VertexSet,
        seeds: &VertexSet,
        sample: usize,
    ) -> usize {
        let mut infected = VertexSet::new(network.vertex_count());
        let mut queue = Vec::new();
        for v in members.iter() {
            if seeds.contains(v) {
                infected.insert(v);
                queue.push(v);
            }
        }
        while let Some(x) = queue.pop() {
            for &(y, edge) in network.contact_neighbors(x) {
                if members.contains(y) && !infected.contains(y) && self.is_alive(sample, edge) {
                    infected.insert(y);
                    queue.push(y);
                }
            }
        }
        infected.len()
    }

    /// Mean and standard error over the pool's samples.
    pub fn estimate(
        &self,
        network: &TwoLayerNetwork,
        members: &VertexSet,
        seeds: &VertexSet,
    ) -> RiskEstimate {
        let n = self.alive.len();
        let counts: Vec<f64> = (0..n)
            .map(|k| self.cascade_count(network, members, seeds, k) as f64)
            .collect();
        summarize(&counts)
    }
}

fn summarize(counts: &[f64]) -> RiskEstimate {
    let n = counts.len();
    let mean = counts.iter().sum::<f64>() / n.max(1) as f64;
    let stderr = if n >= 2 {
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    RiskEstimate {
        mean,
        stderr,
        samples: n,
        exact: false,
    }
}

/// Monte Carlo estimate from a fresh pool seeded by `config.rng_seed`.
pub fn risk_mc(
    network: &TwoLayerNetwork,
    members: &VertexSet,
    seeds: &VertexSet,
    config: &PropagationConfig,
) -> RiskEstimate {
    let pool = SamplePool::generate(network, config.mc_samples.max(1), config.rng_seed);
    pool.estimate(network, members, seeds)
}

/// Exact when the induced subgraph is small enough to enumerate, Monte Carlo
/// otherwise.
pub fn risk_auto(
    network: &TwoLayerNetwork,
    members: &VertexSet,
    seeds: &VertexSet,
    config: &PropagationConfig,
) -> RiskEstimate {
    match risk_exact(network, members, seeds, config.exact_threshold) {
        Ok(estimate) => estimate,
        Err(RiskError::TooLargeForExact { .. }) => risk_mc(network, members, seeds, config),
    }
}

/// Increase of the group risk when `candidate` joins `onsite`:
/// `risk(onsite ∪ {candidate}) − risk(onsite)`, clamped at zero. Both terms
/// share randomness (the exact estimator, or one common pool), so the
/// difference is never noise-negative.
pub fn marginal_risk(
    network: &TwoLayerNetwork,
    onsite: &VertexSet,
    seeds: &VertexSet,
    candidate: VertexId,
    config: &PropagationConfig,
) -> f64 {
    debug_assert!(!onsite.contains(candidate));
    let mut extended = onsite.clone();
    extended.insert(candidate);
    let delta = match risk_exact(network, &extended, seeds, config.exact_threshold) {
        Ok(with) => {
            let without = risk_exact(network, onsite, seeds, config.exact_threshold)
                .expect("subset of an exactly-evaluable set");
            with.mean - without.mean
        }
        Err(RiskError::TooLargeForExact { .. }) => {
            let pool = SamplePool::generate(network, config.mc_samples.max(1), config.rng_seed);
            pool.estimate(network, &extended, seeds).mean
                - pool.estimate(network, onsite, seeds).mean
        }
    };
    delta.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;

    fn path_network(sigmas: &[f64]) -> TwoLayerNetwork {
        let mut b = NetworkBuilder::new(sigmas.len() + 1, 1);
        for (i, &s) in sigmas.iter().enumerate() {
            b.contact_edge(i as u32, i as u32 + 1, s).unwrap();
        }
        b.build()
    }

    fn all(n: usize) -> VertexSet {
        VertexSet::from_iter(n, (0..n as u32).map(VertexId))
    }

    #[test]
    fn zero_sigma_counts_only_seeds() {
        let net = path_network(&[0.0, 0.0]);
        let members = all(3);
        let seeds = VertexSet::from_iter(3, [VertexId(0), VertexId(2)]);
        let est = risk_exact(&net, &members, &seeds, 20).unwrap();
        assert_eq!(est.mean, 2.0);
        assert!(est.exact);
    }

    #[test]
    fn deterministic_path_infects_everyone() {
        let net = path_network(&[1.0, 1.0]);
        let members = all(3);
        let seeds = VertexSet::from_iter(3, [VertexId(0)]);
        let est = risk_exact(&net, &members, &seeds, 20).unwrap();
        assert_eq!(est.mean, 3.0);
    }

    #[test]
    fn half_edge_splits_the_outcomes() {
        // Two live-edge patterns: {alive} -> 2 infected, {dead} -> 1.
        let net = path_network(&[0.5]);
        let members = all(2);
        let seeds = VertexSet::from_iter(2, [VertexId(0)]);
        let est = risk_exact(&net, &members, &seeds, 20).unwrap();
        assert!((est.mean - 1.5).abs() < 1e-12);
    }

    #[test]
    fn exact_rejects_oversized_subgraphs() {
        let net = path_network(&[0.5; 25]);
        let members = all(26);
        let seeds = VertexSet::from_iter(26, [VertexId(0)]);
        assert_eq!(
            risk_exact(&net, &members, &seeds, 20).unwrap_err(),
            RiskError::TooLargeForExact {
                edges: 25,
                threshold: 20
            }
        );
    }

    #[test]
    fn mc_matches_exact_on_single_edge() {
        let net = path_network(&[0.5]);
        let members = all(2);
        let seeds = VertexSet::from_iter(2, [VertexId(0)]);
        let config = PropagationConfig {
            mc_samples: 10_000,
            rng_seed: 7,
            ..PropagationConfig::default()
        };
        let est = risk_mc(&net, &members, &seeds, &config);
        assert!(est.stderr > 0.0);
        assert!((est.mean - 1.5).abs() <= 3.0 * est.stderr);
    }

    #[test]
    fn mc_with_zero_sigma_has_no_spread() {
        let net = path_network(&[0.0, 0.0, 0.0]);
        let members = all(4);
        let seeds = VertexSet::from_iter(4, [VertexId(1)]);
        let est = risk_mc(&net, &members, &seeds, &PropagationConfig::default());
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn empty_population_has_zero_risk() {
        let net = path_network(&[0.5]);
        let members = VertexSet::new(2);
        let seeds = VertexSet::from_iter(2, [VertexId(0)]);
        let exact = risk_exact(&net, &members, &seeds, 20).unwrap();
        assert_eq!(exact.mean, 0.0);
        let auto = risk_auto(&net, &members, &seeds, &PropagationConfig::default());
        assert_eq!(auto.mean, 0.0);
        assert!(auto.exact);
        let config = PropagationConfig {
            mc_samples: 50,
            ..PropagationConfig::default()
        };
        assert_eq!(risk_mc(&net, &members, &seeds, &config).mean, 0.0);
    }

    #[test]
    fn auto_dispatches_on_uncertain_edge_count() {
        let small = path_network(&[0.5, 0.5, 0.5]);
        let members = all(4);
        let seeds = VertexSet::from_iter(4, [VertexId(0)]);
        assert!(risk_auto(&small, &members, &seeds, &PropagationConfig::default()).exact);

        let big = path_network(&[0.5; 1000]);
        let members = all(1001);
        let seeds = VertexSet::from_iter(1001, [VertexId(0)]);
        let config = PropagationConfig {
            mc_samples: 50,
            ..PropagationConfig::default()
        };
        assert!(!risk_auto(&big, &members, &seeds, &config).exact);
    }

    #[test]
    fn marginal_risk_examples() {
        let net = path_network(&[0.0, 0.0]);
        let seeds = VertexSet::from_iter(3, [VertexId(2)]);
        let onsite = VertexSet::from_iter(3, [VertexId(0)]);
        let config = PropagationConfig::default();
        // Joining seed infects only itself.
        assert_eq!(
            marginal_risk(&net, &onsite, &seeds, VertexId(2), &config),
            1.0
        );
        // A non-seed with no transmitting edges stays healthy.
        assert_eq!(
            marginal_risk(&net, &onsite, &seeds, VertexId(1), &config),
            0.0
        );

        // Star center with certain edges to two already-onsite seeds: the
        // center gets infected, the seeds were already counted.
        let mut b = NetworkBuilder::new(3, 1);
        b.contact_edge(2, 0, 1.0).unwrap();
        b.contact_edge(2, 1, 1.0).unwrap();
        let star = b.build();
        let onsite = VertexSet::from_iter(3, [VertexId(0), VertexId(1)]);
        let seeds = VertexSet::from_iter(3, [VertexId(0), VertexId(1)]);
        assert_eq!(
            marginal_risk(&star, &onsite, &seeds, VertexId(2), &config),
            1.0
        );
    }

    #[test]
    fn seeds_outside_the_population_never_infect() {
        // Only S ∩ U seeds the cascade: an infected outsider cannot reach in,
        // even over a certain edge.
        let net = path_network(&[1.0]);
        let members = VertexSet::from_iter(2, [VertexId(1)]);
        let seeds = VertexSet::from_iter(2, [VertexId(0)]);
        assert_eq!(risk_exact(&net, &members, &seeds, 20).unwrap().mean, 0.0);
        let est = risk_mc(&net, &members, &seeds, &PropagationConfig::default());
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn pool_is_deterministic_for_a_seed() {
        let net = path_network(&[0.3, 0.7, 0.5]);
        let a = SamplePool::generate(&net, 64, 99);
        let b = SamplePool::generate(&net, 64, 99);
        let members = all(4);
        let seeds = VertexSet::from_iter(4, [VertexId(0)]);
        for k in 0..64 {
            assert_eq!(
                a.cascade_count(&net, &members, &seeds, k),
                b.cascade_count(&net, &members, &seeds, k)
            );
        }
    }
}
