//! Ground-truth machinery: exhaustive optimal search over tiny instances and
//! the exact-cover gadget family used to stress the solver.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{NetworkBuilder, ProblemInstance, VertexId, VertexSet};
use crate::objective::average_collaboration;
use crate::propagation::risk_exact;
use crate::solver::{SolveResult, SolverConfig};

const MAX_BRUTE_FORCE_VERTICES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error("no non-empty subset is feasible")]
    Infeasible,
}

/// Exhaustive optimum: enumerates every non-empty subset, keeps the feasible
/// ones under exact risk, and returns the best average collaboration.
/// Ties break toward the lexicographically smallest vertex list. Risk is
/// always the exact enumerator; instances it cannot handle are rejected.
pub fn brute_force_solve(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<SolveResult, OracleError> {
    let net = &instance.network;
    let n = net.vertex_count();
    if n > MAX_BRUTE_FORCE_VERTICES {
        return Err(OracleError::TooLarge(format!(
            "{n} vertices exceed the {MAX_BRUTE_FORCE_VERTICES}-vertex enumeration bound"
        )));
    }
    let threshold = config.propagation.exact_threshold;
    let uncertain = net
        .contact_edges()
        .iter()
        .filter(|e| e.sigma > 0.0 && e.sigma < 1.0)
        .count();
    if uncertain > threshold {
        return Err(OracleError::TooLarge(format!(
            "{uncertain} uncertain contact edges exceed the exact threshold {threshold}"
        )));
    }
    if instance.required_skills.len() > 64 {
        return Err(OracleError::TooLarge(
            "more than 64 required skills".to_string(),
        ));
    }

    // Per-vertex bitmask over the indices of the required skills.
    let mut req_mask_of = vec![0u64; n];
    for v in net.vertices() {
        let mut mask = 0u64;
        for (i, skill) in instance.required_skills.iter().enumerate() {
            if net.skills(v).binary_search(skill).is_ok() {
                mask |= 1 << i;
            }
        }
        req_mask_of[v.index()] = mask;
    }
    let full_mask = if instance.required_skills.is_empty() {
        0
    } else {
        u64::MAX >> (64 - instance.required_skills.len())
    };

    let seeds = instance.seed_vertex_set();
    let mut best: Option<(f64, f64, Vec<VertexId>)> = None;
    for subset_bits in 1u32..(1u32 << n) {
        let mut covered = 0u64;
        let mut members = VertexSet::new(n);
        for v in 0..n as u32 {
            if subset_bits & (1 << v) != 0 {
                covered |= req_mask_of[v as usize];
                members.insert(VertexId(v));
            }
        }
        if covered & full_mask != full_mask {
            continue;
        }
        let risk = risk_exact(net, &members, &seeds, threshold)
            .expect("whole-network uncertain edges fit the threshold")
            .mean;
        if risk > instance.budget {
            continue;
        }
        let alpha = average_collaboration(net, &members).expect("subset is non-empty");
        let listed = members.to_vec();
        let replace = match &best {
            None => true,
            Some((best_alpha, _, best_list)) => {
                alpha > *best_alpha || (alpha == *best_alpha && listed < *best_list)
            }
        };
        if replace {
            best = Some((alpha, risk, listed));
        }
    }

    match best {
        Some((alpha, risk, onsite)) => Ok(SolveResult {
            onsite,
            alpha,
            risk,
            risk_stderr: 0.0,
            feasible: true,
            trace: Vec::new(),
        }),
        None => Err(OracleError::Infeasible),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum X3cError {
    #[error("ground set size {0} is not a positive multiple of 3")]
    BadGroundSet(usize),
    #[error("triple {0:?} is not three distinct in-range elements")]
    BadTriple([u32; 3]),
}

/// An Exact Cover by 3-Sets instance: a ground set `{0..3q-1}` and a
/// collection of 3-element subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3cInstance {
    pub ground_set_size: usize,
    pub triples: Vec<[u32; 3]>,
}

impl X3cInstance {
    pub fn new(ground_set_size: usize, triples: Vec<[u32; 3]>) -> Result<Self, X3cError> {
        if ground_set_size == 0 || !ground_set_size.is_multiple_of(3) {
            return Err(X3cError::BadGroundSet(ground_set_size));
        }
        for t in &triples {
            let distinct = t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
            let in_range = t.iter().all(|&x| (x as usize) < ground_set_size);
            if !distinct || !in_range {
                return Err(X3cError::BadTriple(*t));
            }
        }
        Ok(X3cInstance {
            ground_set_size,
            triples,
        })
    }

    pub fn cover_target(&self) -> usize {
        self.ground_set_size / 3
    }
}

/// The reduction instance: one vertex per triple carrying its elements as
/// skills, every element required, complete partnership layer with equal
/// onsite and remote scores, complete zero-probability contact layer,
/// everyone initially infected, and a risk budget of exactly `q`. A feasible
/// team is then precisely an exact cover.
pub fn x3c_gadget(x3c: &X3cInstance) -> ProblemInstance {
    let n = x3c.triples.len();
    let mut b = NetworkBuilder::new(n, x3c.ground_set_size);
    for (i, t) in x3c.triples.iter().enumerate() {
        b.skills(i as u32, t).expect("triple elements are in range");
    }
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            b.contact_edge(u, v, 0.0).expect("pairs are unique");
            b.partnership_edge(u, v, 1.0, 1.0)
                .expect("pairs are unique");
        }
    }
    ProblemInstance::new(
        b.build(),
        (0..x3c.ground_set_size as u32).collect(),
        (0..n as u32).collect(),
        x3c.cover_target() as f64,
        50,
    )
}

/// A generated instance with a known exact cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedX3c {
    pub instance: X3cInstance,
    /// Indices of the planted cover's triples (always the first `q`).
    pub cover: Vec<usize>,
}

/// Builds `q` disjoint triples partitioning a shuffled `{0..3q-1}`, followed
/// by distinct random extra triples. Extras are capped by the number of
/// distinct triples the ground set admits.
pub fn plant_x3c(q: usize, extra_triples: usize, rng_seed: u64) -> PlantedX3c {
    assert!(q >= 1, "need at least one triple");
    let ground = 3 * q;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);

    let mut elements: Vec<u32> = (0..ground as u32).collect();
    elements.shuffle(&mut rng);
    let mut triples: Vec<[u32; 3]> = elements
        .chunks_exact(3)
        .map(|c| {
            let mut t = [c[0], c[1], c[2]];
            t.sort_unstable();
            t
        })
        .collect();

    let max_distinct = ground * (ground - 1) * (ground - 2) / 6;
    let wanted = extra_triples.min(max_distinct.saturating_sub(q));
    let mut seen: Vec<[u32; 3]> = triples.clone();
    seen.sort_unstable();
    let mut added = 0;
    while added < wanted {
        let mut t = [0u32; 3];
        t[0] = rng.random_range(0..ground as u32);
        loop {
            t[1] = rng.random_range(0..ground as u32);
            if t[1] != t[0] {
                break;
            }
        }
        loop {
            t[2] = rng.random_range(0..ground as u32);
            if t[2] != t[0] && t[2] != t[1] {
                break;
            }
        }
        t.sort_unstable();
        if let Err(pos) = seen.binary_search(&t) {
            seen.insert(pos, t);
            triples.push(t);
            added += 1;
        }
    }

    PlantedX3c {
        instance: X3cInstance::new(ground, triples).expect("construction is valid"),
        cover: (0..q).collect(),
    }
}
