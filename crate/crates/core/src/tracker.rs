//! Coupled risk evaluation for one solve.
//!
//! Construction-time budget checks must be consistent with each other, so all
//! queries during a solve share randomness: either everything is exact (the
//! whole network is small enough to enumerate) or everything is evaluated
//! against one fixed live-edge sample pool. Candidate queries are answered
//! incrementally from the per-sample infected sets of the current onsite set.

use crate::network::{TwoLayerNetwork, VertexId, VertexSet};
use crate::propagation::{risk_exact, RiskEstimate, SamplePool};

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

pub(crate) struct RiskTracker<'a> {
    net: &'a TwoLayerNetwork,
    seeds: VertexSet,
    members: VertexSet,
    exact_threshold: usize,
    mc_samples: usize,
    fresh_seed: u64,
    mode: Mode,
}

enum Mode {
    Exact,
    Pooled(PooledRisk),
}

struct PooledRisk {
    pool: SamplePool,
    infected: Vec<VertexSet>,
    infected_total: usize,
    /// Superset of the union of all per-sample infected sets; only grows, so
    /// it stays a superset across removals.
    ever_infected: VertexSet,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<VertexId>,
}

impl<'a> RiskTracker<'a> {
    /// Starts tracking an empty onsite set. The tracker runs exact when every
    /// induced subgraph can be enumerated (the uncertain-edge count of the
    /// whole contact layer is within the threshold), Monte Carlo otherwise.
    pub fn new(
        net: &'a TwoLayerNetwork,
        seeds: VertexSet,
        mc_samples: usize,
        exact_threshold: usize,
        rng_seed: u64,
    ) -> Self {
        let uncertain = net
            .contact_edges()
            .iter()
            .filter(|e| e.sigma > 0.0 && e.sigma < 1.0)
            .count();
        let mode = if uncertain <= exact_threshold {
            Mode::Exact
        } else {
            let pool = SamplePool::generate(net, mc_samples.max(1), rng_seed);
            let samples = pool.num_samples();
            Mode::Pooled(PooledRisk {
                pool,
                infected: vec![VertexSet::new(net.vertex_count()); samples],
                infected_total: 0,
                ever_infected: VertexSet::new(net.vertex_count()),
                stamp: vec![0; net.vertex_count()],
                epoch: 0,
                stack: Vec::new(),
            })
        };
        RiskTracker {
            net,
            seeds,
            members: VertexSet::new(net.vertex_count()),
            exact_threshold,
            mc_samples,
            fresh_seed: splitmix64(rng_seed),
            mode,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, Mode::Exact)
    }

    /// Cheap pre-screen: false guarantees that adding `v` leaves every sample
    /// untouched, i.e. its marginal risk is exactly zero under the pool.
    /// Candidate scans use this to skip the per-sample walk for the many
    /// vertices with no live path to any infection.
    pub fn may_raise_risk(&self, v: VertexId) -> bool {
        match &self.mode {
            Mode::Exact => true,
            Mode::Pooled(p) => {
                self.seeds.contains(v)
                    || self
                        .net
                        .contact_neighbors(v)
                        .iter()
                        .any(|&(u, _)| p.ever_infected.contains(u))
            }
        }
    }

    fn exact_risk_of(&self, members: &VertexSet) -> f64 {
        risk_exact(self.net, members, &self.seeds, self.exact_threshold)
            .expect("tracker runs exact only when the whole layer fits the threshold")
            .mean
    }

    /// Risk of the current onsite set under the coupled evaluation.
    pub fn risk(&self) -> f64 {
        match &self.mode {
            Mode::Exact => self.exact_risk_of(&self.members),
            Mode::Pooled(p) => p.infected_total as f64 / p.pool.num_samples() as f64,
        }
    }

    /// Risk if `v` joined the onsite set.
    pub fn risk_with_add(&mut self, v: VertexId) -> f64 {
        debug_assert!(!self.members.contains(v));
        match &mut self.mode {
            Mode::Exact => {
                let mut extended = self.members.clone();
                extended.insert(v);
                self.exact_risk_of(&extended)
            }
            Mode::Pooled(p) => {
                let mut total = p.infected_total;
                for k in 0..p.pool.num_samples() {
                    total += p.addition_delta(self.net, &self.seeds, &self.members, k, v);
                }
                total as f64 / p.pool.num_samples() as f64
            }
        }
    }

    /// Risk if `v` left the onsite set.
    pub fn risk_with_remove(&mut self, v: VertexId) -> f64 {
        debug_assert!(self.members.contains(v));
        match &mut self.mode {
            Mode::Exact => {
                let mut reduced = self.members.clone();
                reduced.remove(v);
                self.exact_risk_of(&reduced)
            }
            Mode::Pooled(p) => {
                let mut total = 0usize;
                for k in 0..p.pool.num_samples() {
                    if p.infected[k].contains(v) {
                        total += p.count_without(self.net, &self.seeds, &self.members, k, v);
                    } else {
                        total += p.infected[k].len();
                    }
                }
                total as f64 / p.pool.num_samples() as f64
            }
        }
    }

    /// Risk of the set with `out` replaced by `inn`.
    pub fn risk_with_swap(&mut self, out: VertexId, inn: VertexId) -> f64 {
        debug_assert!(self.members.contains(out) && !self.members.contains(inn));
        match &mut self.mode {
            Mode::Exact => {
                let mut swapped = self.members.clone();
                swapped.remove(out);
                swapped.insert(inn);
                self.exact_risk_of(&swapped)
            }
            Mode::Pooled(p) => {
                let mut total = 0usize;
                for k in 0..p.pool.num_samples() {
                    total += p.count_swapped(self.net, &self.seeds, &self.members, k, out, inn);
                }
                total as f64 / p.pool.num_samples() as f64
            }
        }
    }

    pub fn add(&mut self, v: VertexId) {
        debug_assert!(!self.members.contains(v));
        if let Mode::Pooled(p) = &mut self.mode {
            for k in 0..p.pool.num_samples() {
                p.apply_addition(self.net, &self.seeds, &self.members, k, v);
            }
        }
        self.members.insert(v);
    }

    pub fn remove(&mut self, v: VertexId) {
        debug_assert!(self.members.contains(v));
        self.members.remove(v);
        if let Mode::Pooled(p) = &mut self.mode {
            for k in 0..p.pool.num_samples() {
                if p.infected[k].contains(v) {
                    p.infected_total -= p.infected[k].len();
                    p.rebuild_sample(self.net, &self.seeds, &self.members, k);
                    p.infected_total += p.infected[k].len();
                }
            }
        }
    }

    pub fn swap(&mut self, out: VertexId, inn: VertexId) {
        self.remove(out);
        self.add(inn);
    }

    /// Risk of an arbitrary set under the coupled evaluation, without
    /// touching the tracked state.
    pub fn risk_of(&self, members: &VertexSet) -> f64 {
        match &self.mode {
            Mode::Exact => self.exact_risk_of(members),
            Mode::Pooled(p) => {
                let total: usize = (0..p.pool.num_samples())
                    .map(|k| p.pool.cascade_count(self.net, members, &self.seeds, k))
                    .sum();
                total as f64 / p.pool.num_samples() as f64
            }
        }
    }

    /// Independent re-evaluation of the current set: exact where possible,
    /// otherwise a fresh pool seeded differently from the construction pool.
    pub fn fresh_verify(&self) -> RiskEstimate {
        match &self.mode {
            Mode::Exact => risk_exact(self.net, &self.members, &self.seeds, self.exact_threshold)
                .expect("tracker runs exact only when the whole layer fits the threshold"),
            Mode::Pooled(_) => {
                let pool = SamplePool::generate(self.net, self.mc_samples.max(1), self.fresh_seed);
                pool.estimate(self.net, &self.members, &self.seeds)
            }
        }
    }
}

impl PooledRisk {
    fn next_epoch(&mut self) -> u32 {
        // Headroom so a query that draws two epochs never straddles a reset.
        if self.epoch >= u32::MAX - 8 {
            self.stamp.fill(0);
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }

    fn activated(&self, net: &TwoLayerNetwork, seeds: &VertexSet, k: usize, v: VertexId) -> bool {
        if seeds.contains(v) {
            return true;
        }
        net.contact_neighbors(v)
            .iter()
            .any(|&(u, e)| self.pool.is_alive(k, e) && self.infected[k].contains(u))
    }

    /// Number of additional infections in sample `k` if `v` joins `members`:
    /// zero unless `v` becomes infected, else `v` plus everything newly
    /// reachable through it.
    fn addition_delta(
        &mut self,
        net: &TwoLayerNetwork,
        seeds: &VertexSet,
        members: &VertexSet,
        k: usize,
        v: VertexId,
    ) -> usize {
        if !self.activated(net, seeds, k, v) {
            return 0;
        }
        let epoch = self.next_epoch();
        self.stamp[v.index()] = epoch;
        self.stack.clear();
        self.stack.push(v);
        let mut delta = 1usize;
        while let Some(x) = self.stack.pop() {
            for &(y, e) in net.contact_neighbors(x) {
                if self.pool.is_alive(k, e)
                    && members.contains(y)
                    && !self.infected[k].contains(y)
                    && self.stamp[y.index()] != epoch
                {
                    self.stamp[y.index()] = epoch;
                    delta += 1;
                    self.stack.push(y);
                }
            }
        }
        delta
    }

    fn apply_addition(
        &mut self,
        net: &TwoLayerNetwork,
        seeds: &VertexSet,
        members: &VertexSet,
        k: usize,
        v: VertexId,
    ) {
        if !self.activated(net, seeds, k, v) {
            return;
        }
        self.infected[k].insert(v);
        self.ever_infected.insert(v);
        self.infected_total += 1;
        self.stack.clear();
        self.stack.push(v);
        while let Some(x) = self.stack.pop() {
            for &(y, e) in net.contact_neighbors(x) {
                if self.pool.is_alive(k, e) && members.contains(y) && self.infected[k].insert(y) {
                    self.ever_infected.insert(y);
                    self.infected_total += 1;
                    self.stack.push(y);
                }
            }
        }
    }

    /// Infected count of sample `k` for `members \ {out}`, without mutating.
    fn count_without(
        &mut self,
        net: &TwoLayerNetwork,
        seeds: &VertexSet,
        members: &VertexSet,
        k: usize,
        out: VertexId,
    ) -> usize {
        let epoch = self.next_epoch();
        self.stack.clear();
        let mut count = 0usize;
        for s in members.iter() {
            if s != out && seeds.contains(s) {
                self.stamp[s.index()] = epoch;
                self.stack.push(s);
                count += 1;
            }
        }
        while let Some(x) = self.stack.pop() {
            for &(y, e) in net.contact_neighbors(x) {
                if y != out
                    && self.pool.is_alive(k, e)
                    && members.contains(y)
                    && self.stamp[y.index()] != epoch
                {
                    self.stamp[y.index()] = epoch;
                    count += 1;
                    self.stack.push(y);
                }
            }
        }
        count
    }

    /// Infected count of sample `k` for `members \ {out} ∪ {inn}`.
    fn count_swapped(
        &mut self,
        net: &TwoLayerNetwork,
        seeds: &VertexSet,
        members: &VertexSet,
        k: usize,
        out: VertexId,
        inn: VertexId,
    ) -> usize {
        // Base set: infections of members \ {out}. When `out` was never
        // infected the stored sample is already right; otherwise rebuild it
        // into the stamp scratch.
        let (mut count, epoch, use_stored) = if self.infected[k].contains(out) {
            let c = self.count_without(net, seeds, members, k, out);
            (c, self.epoch, false)
        } else {
            (self.infected[k].len(), self.next_epoch(), true)
        };

        let base_infected = |p: &Self, u: VertexId| -> bool {
            if use_stored {
                p.infected[k].contains(u)
            } else {
                p.stamp[u.index()] == epoch
            }
        };

        // Does `inn` get activated against the base set?
        let mut active = seeds.contains(inn);
        if !active {
            active = net
                .contact_neighbors(inn)
                .iter()
                .any(|&(u, e)| u != out && self.pool.is_alive(k, e) && base_infected(self, u));
        }
        if !active {
            return count;
        }

        // Spread from `inn` through the swapped membership.
        let new_epoch = if use_stored { epoch } else { self.next_epoch() };
        let in_base = |p: &Self, u: VertexId| -> bool {
            if use_stored {
                p.infected[k].contains(u)
            } else {
                // count_without stamped with `epoch`; fresh marks use new_epoch.
                p.stamp[u.index()] == epoch
            }
        };
        self.stamp[inn.index()] = new_epoch;
        count += 1;
        self.stack.clear();
        self.stack.push(inn);
        while let Some(x) = self.stack.pop() {
            for &(y, e) in net.contact_neighbors(x) {
                if y != out
                    && self.pool.is_alive(k, e)
                    && (members.contains(y) || y == inn)
                    && !in_base(self, y)
                    && self.stamp[y.index()] != new_epoch
                {
                    self.stamp[y.index()] = new_epoch;
                    count += 1;
                    self.stack.push(y);
                }
            }
        }
        count
    }

    fn rebuild_sample(
        &mut self,
        net: &TwoLayerNetwork,
        seeds: &VertexSet,
        members: &VertexSet,
        k: usize,
    ) {
        self.infected[k].clear();
        self.stack.clear();
        for s in members.iter() {
            if seeds.contains(s) {
                self.infected[k].insert(s);
                self.stack.push(s);
            }
        }
        while let Some(x) = self.stack.pop() {
            for &(y, e) in net.contact_neighbors(x) {
                if self.pool.is_alive(k, e) && members.contains(y) && self.infected[k].insert(y) {
                    self.stack.push(y);
                }
            }
        }
    }
}
