#![allow(dead_code)]

use conflict_sched::problem::{Instance, Time};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Instance with weights and profits in `0..=5`, processing times in
/// `1..=t`, deadline `t` and `edges` conflict pairs chosen at random.
pub fn instance_with(rng: &mut StdRng, n: usize, m: usize, t: Time, edges: usize) -> Instance {
    let p: Vec<Time> = (0..n).map(|_| rng.random_range(1..=t)).collect();
    let w: Vec<Time> = (0..n).map(|_| rng.random_range(0..=5)).collect();
    let r: Vec<Time> = (0..n).map(|_| rng.random_range(0..=5)).collect();
    let mut pairs = all_pairs(n);
    pairs.shuffle(rng);
    pairs.truncate(edges);
    Instance::new(m, p, pairs)
        .unwrap()
        .with_weights(w)
        .unwrap()
        .with_profits(r)
        .unwrap()
        .with_deadline(t)
        .unwrap()
}

/// Random size and a conflict count uniform between none and all pairs.
pub fn random_instance(rng: &mut StdRng, max_jobs: usize, max_machines: usize, max_t: Time) -> Instance {
    let n = rng.random_range(1..=max_jobs);
    let m = rng.random_range(1..=max_machines);
    let t = rng.random_range(1..=max_t);
    let edges = rng.random_range(0..=n * (n - 1) / 2);
    instance_with(rng, n, m, t, edges)
}
