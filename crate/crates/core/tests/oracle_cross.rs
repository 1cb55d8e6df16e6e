//! Cross-checks between the heuristic solvers and the exhaustive oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rshwc_core::baselines::{collab_greedy, random_feasible, skill_greedy};
use rshwc_core::gen::{random_instance, RandomInstanceSpec};
use rshwc_core::oracle::{brute_force_solve, plant_x3c, x3c_gadget, OracleError, X3cInstance};
use rshwc_core::{solve, SolverConfig};

/// Exact-cover decision by direct search over the triples, independent of the
/// solver stack: always cover the smallest uncovered element next.
fn has_exact_cover(x3c: &X3cInstance) -> bool {
    let ground = x3c.ground_set_size;
    let masks: Vec<u64> = x3c
        .triples
        .iter()
        .map(|t| t.iter().fold(0u64, |m, &x| m | (1 << x)))
        .collect();
    let full = (1u64 << ground) - 1;

    fn search(covered: u64, full: u64, masks: &[u64]) -> bool {
        if covered == full {
            return true;
        }
        let next = (covered | !full).trailing_ones() as u64;
        masks
            .iter()
            .any(|&m| m & (1 << next) != 0 && m & covered == 0 && search(covered | m, full, masks))
    }
    search(0, full, &masks)
}

fn random_x3c(q: usize, triples: usize, seed: u64) -> X3cInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = 3 * q;
    let mut list = Vec::with_capacity(triples);
    while list.len() < triples {
        let mut t = [0u32; 3];
        t[0] = rng.random_range(0..ground as u32);
        t[1] = rng.random_range(0..ground as u32);
        t[2] = rng.random_range(0..ground as u32);
        t.sort_unstable();
        if t[0] != t[1] && t[1] != t[2] && !list.contains(&t) {
            list.push(t);
        }
    }
    X3cInstance::new(ground, list).unwrap()
}

#[test]
fn gadget_feasibility_matches_independent_cover_search() {
    let config = SolverConfig::default();
    let mut feasible = 0;
    let mut infeasible = 0;
    for seed in 0..40u64 {
        let x3c = if seed % 2 == 0 {
            plant_x3c(2 + (seed as usize / 2) % 3, (seed as usize) % 7, seed).instance
        } else {
            let q = 2 + (seed as usize) % 2;
            random_x3c(q, q + 2 + (seed as usize) % 4, seed)
        };
        let instance = x3c_gadget(&x3c);
        let expected = has_exact_cover(&x3c);
        match brute_force_solve(&instance, &config) {
            Ok(result) => {
                assert!(
                    expected,
                    "oracle found a cover the search missed (seed {seed})"
                );
                assert_eq!(result.onsite.len(), x3c.cover_target());
                feasible += 1;
            }
            Err(OracleError::Infeasible) => {
                assert!(
                    !expected,
                    "search found a cover the oracle missed (seed {seed})"
                );
                infeasible += 1;
            }
            Err(other) => panic!("unexpected oracle error: {other}"),
        }
    }
    assert!(
        feasible >= 10 && infeasible >= 5,
        "{feasible} / {infeasible}"
    );
}

#[test]
fn heuristic_never_beats_the_oracle() {
    let config = SolverConfig::default();
    let spec = RandomInstanceSpec::default();
    let mut compared = 0;
    for seed in 0..150u64 {
        let instance = random_instance(&spec, seed);
        let Ok(result) = solve(&instance, &config) else {
            continue;
        };
        if !result.feasible {
            continue;
        }
        let oracle = brute_force_solve(&instance, &config)
            .expect("a feasible heuristic result implies a feasible instance");
        assert!(
            result.alpha <= oracle.alpha + 1e-9,
            "seed {seed}: heuristic {} beat oracle {}",
            result.alpha,
            oracle.alpha
        );
        compared += 1;
    }
    assert!(compared >= 60, "only {compared} comparisons ran");
}

#[test]
fn baselines_never_beat_the_oracle() {
    let config = SolverConfig::default();
    let spec = RandomInstanceSpec::default();
    let mut compared = 0;
    for seed in 0..60u64 {
        let instance = random_instance(&spec, seed);
        for baseline in [skill_greedy, random_feasible, collab_greedy] {
            let Ok(result) = baseline(&instance, &config) else {
                continue;
            };
            if !result.feasible {
                continue;
            }
            let oracle = brute_force_solve(&instance, &config)
                .expect("a feasible baseline result implies a feasible instance");
            assert!(result.alpha <= oracle.alpha + 1e-9);
            compared += 1;
        }
    }
    assert!(compared >= 60, "only {compared} comparisons ran");
}
