//! Average collaboration objective and the per-vertex collaboration gain,
//! with incremental bookkeeping for add/remove/swap moves.
//!
//! For an onsite set `V*`, every partnership edge contributes its onsite
//! score when both endpoints are onsite and its remote score otherwise; the
//! average collaboration divides that total by `|V*|`. The total decomposes
//! as (sum of all remote scores) + (sum of `o − r` over edges inside `V*`),
//! which is what makes O(degree) incremental updates possible.

use thiserror::Error;

use crate::network::{TwoLayerNetwork, VertexId, VertexSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObjectiveError {
    #[error("average collaboration is undefined for an empty onsite set")]
    EmptySet,
    #[error("vertex {0} is already onsite")]
    AlreadyOnsite(VertexId),
    #[error("vertex {0} is not onsite")]
    NotOnsite(VertexId),
}

/// Average collaboration of `onsite`, evaluated directly from the
/// definition (one pass over the partnership edges).
pub fn average_collaboration(
    network: &TwoLayerNetwork,
    onsite: &VertexSet,
) -> Result<f64, ObjectiveError> {
    if onsite.is_empty() {
        return Err(ObjectiveError::EmptySet);
    }
    let mut total = 0.0;
    for e in network.partnership_edges() {
        if onsite.contains(e.u) && onsite.contains(e.v) {
            total += e.onsite;
        } else {
            total += e.remote;
        }
    }
    Ok(total / onsite.len() as f64)
}

/// Collaboration gain of `v` with respect to `group`: the sum of `o − r`
/// over partnership edges from `v` into the group. `v` itself may or may not
/// belong to the group; self-edges do not exist.
pub fn collaboration_gain(network: &TwoLayerNetwork, group: &VertexSet, v: VertexId) -> f64 {
    network
        .partnership_neighbors(v)
        .iter()
        .filter(|(u, _, _)| group.contains(*u))
        .map(|(_, onsite, remote)| onsite - remote)
        .sum()
}

/// Incremental objective state for a changing onsite set: the collaboration
/// total and, for every vertex, its current gain with respect to the set.
#[derive(Debug, Clone)]
pub struct CollabState<'a> {
    network: &'a TwoLayerNetwork,
    onsite: VertexSet,
    total: f64,
    base_remote: f64,
    gains: Vec<f64>,
}

impl<'a> CollabState<'a> {
    pub fn new(network: &'a TwoLayerNetwork, onsite: &VertexSet) -> Self {
        let base_remote: f64 = network.partnership_edges().iter().map(|e| e.remote).sum();
        let mut total = base_remote;
        for e in network.partnership_edges() {
            if onsite.contains(e.u) && onsite.contains(e.v) {
                total += e.onsite - e.remote;
            }
        }
        let gains = network
            .vertices()
            .map(|v| collaboration_gain(network, onsite, v))
            .collect();
        CollabState {
            network,
            onsite: onsite.clone(),
            total,
            base_remote,
            gains,
        }
    }

    pub fn empty(network: &'a TwoLayerNetwork) -> Self {
        CollabState::new(network, &VertexSet::new(network.vertex_count()))
    }

    pub fn network(&self) -> &'a TwoLayerNetwork {
        self.network
    }

    pub fn onsite(&self) -> &VertexSet {
        &self.onsite
    }

    pub fn size(&self) -> usize {
        self.onsite.len()
    }

    /// Collaboration total, i.e. average collaboration times the set size.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn base_remote(&self) -> f64 {
        self.base_remote
    }

    pub fn average(&self) -> Result<f64, ObjectiveError> {
        if self.onsite.is_empty() {
            Err(ObjectiveError::EmptySet)
        } else {
            Ok(self.total / self.onsite.len() as f64)
        }
    }

    /// Current collaboration gain of `v` with respect to the onsite set.
    pub fn gain(&self, v: VertexId) -> f64 {
        self.gains[v.index()]
    }

    pub fn add(&mut self, v: VertexId) -> Result<(), ObjectiveError> {
        if self.onsite.contains(v) {
            return Err(ObjectiveError::AlreadyOnsite(v));
        }
        self.total += self.gains[v.index()];
        self.onsite.insert(v);
        for &(u, onsite, remote) in self.network.partnership_neighbors(v) {
            self.gains[u.index()] += onsite - remote;
        }
        Ok(())
    }

    pub fn remove(&mut self, v: VertexId) -> Result<(), ObjectiveError> {
        if !self.onsite.contains(v) {
            return Err(ObjectiveError::NotOnsite(v));
        }
        self.onsite.remove(v);
        // v never neighbors itself, so its stored gain already equals the
        // gain with respect to the set without it.
        self.total -= self.gains[v.index()];
        for &(u, onsite, remote) in self.network.partnership_neighbors(v) {
            self.gains[u.index()] -= onsite - remote;
        }
        Ok(())
    }

    pub fn swap(&mut self, out: VertexId, inn: VertexId) -> Result<(), ObjectiveError> {
        if !self.onsite.contains(out) {
            return Err(ObjectiveError::NotOnsite(out));
        }
        if self.onsite.contains(inn) {
            return Err(ObjectiveError::AlreadyOnsite(inn));
        }
        self.remove(out)?;
        self.add(inn)
    }

    /// Objective value of the set after swapping `out` for `inn`, without
    /// mutating the state.
    pub fn average_after_swap(&self, out: VertexId, inn: VertexId) -> f64 {
        let total_without = self.total - self.gains[out.index()];
        let mut gain_in = self.gains[inn.index()];
        for &(u, onsite, remote) in self.network.partnership_neighbors(inn) {
            if u == out {
                gain_in -= onsite - remote;
            }
        }
        (total_without + gain_in) / self.onsite.len() as f64
    }
}
