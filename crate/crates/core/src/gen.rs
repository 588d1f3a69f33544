//! Deterministic instance generator for the experimental grid.
//!
//! Everything is reproducible from a 64-bit seed:
//!
//! * `mix(h, c) = splitmix64(h ^ c)` where `splitmix64` is the SplitMix64
//!   output function (add `0x9E3779B97F4A7C15`, then the two
//!   xor-shift-multiply rounds with `0xBF58476D1CE4E5B9` and
//!   `0x94D049BB133111EB`, final `z ^ (z >> 31)`).
//! * A suite cell gets the seed `mix(mix(mix(mix(splitmix64(master), n), m), T), setting)`.
//!   The conflict rate is deliberately not mixed in, so the four rates of a
//!   cell share processing times, weights, profits and the conflict sequence.
//! * Each quantity draws from its own stream, a `Xoshiro256PlusPlus` seeded
//!   (through its SplitMix64 `seed_from_u64`) with `mix(seed, tag)`; tags are
//!   1 = processing times, 2 = weights, 3 = profits, 4 = conflicts.
//! * `uniform(lo, hi)` draws `x = next_u64()` until `x < 2^64 - 1 - (2^64 - 1) mod span`
//!   and returns `lo + x mod span`, with `span = hi - lo + 1`.
//! * Conflicts: all pairs `(i, j)`, `i < j`, in lexicographic order, then a
//!   forward Fisher-Yates shuffle truncated after `min(alpha * n, n(n-1)/2)`
//!   steps. The shuffled prefix is the conflict set, so a larger rate always
//!   extends the edge set of a smaller one.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use thiserror::Error;

use crate::problem::{Instance, InstanceError, InstanceMeta, Time};

pub const FULL_JOBS: [usize; 3] = [16, 24, 32];
pub const FULL_MACHINES: [usize; 3] = [2, 4, 6];
pub const FULL_CAPACITIES: [Time; 4] = [10, 20, 40, 80];
pub const FULL_ALPHAS: [u32; 4] = [1, 2, 4, 8];
pub const FULL_SETTINGS: [u8; 3] = [1, 2, 3];

const TAG_PROC: u64 = 1;
const TAG_WEIGHT: u64 = 2;
const TAG_PROFIT: u64 = 3;
const TAG_CONFLICT: u64 = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("processing-time setting must be 1, 2 or 3, got {0}")]
    Setting(u8),
    #[error("capacity must be positive, got {0}")]
    Capacity(Time),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GenParams {
    pub n_jobs: usize,
    pub n_machines: usize,
    /// Machine capacity `T`; the deadline for MaxSum and the processing-time
    /// scale for every objective.
    pub capacity: Time,
    pub alpha: u32,
    pub setting: u8,
    pub seed: u64,
}

impl GenParams {
    /// Canonical name `n{J}_m{M}_T{T}_a{alpha}_s{setting}`.
    pub fn name(&self) -> String {
        format!(
            "n{}_m{}_T{}_a{}_s{}",
            self.n_jobs, self.n_machines, self.capacity, self.alpha, self.setting
        )
    }

    /// Inclusive processing-time range for this setting and capacity.
    pub fn proc_time_range(&self) -> Result<(Time, Time), GenError> {
        if self.capacity < 1 {
            return Err(GenError::Capacity(self.capacity));
        }
        let t = self.capacity;
        let (lo, hi) = match self.setting {
            1 => ((t + 3) / 4, t / 2),
            2 => (1, t / 2),
            3 => (1, t / 8),
            s => return Err(GenError::Setting(s)),
        };
        let lo = lo.max(1);
        Ok((lo, hi.max(lo)))
    }

    pub fn conflict_count(&self) -> usize {
        let pairs = self.n_jobs * self.n_jobs.saturating_sub(1) / 2;
        (self.alpha as usize * self.n_jobs).min(pairs)
    }
}

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mix(h: u64, c: u64) -> u64 {
    splitmix64(h ^ c)
}

fn stream(seed: u64, tag: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(mix(seed, tag))
}

fn uniform(rng: &mut impl Rng, lo: u64, hi: u64) -> u64 {
    debug_assert!(lo <= hi);
    let span = hi - lo + 1;
    if span == 0 {
        // full 64-bit range
        return rng.next_u64();
    }
    let limit = u64::MAX - u64::MAX % span;
    loop {
        let x = rng.next_u64();
        if x < limit {
            return lo + x % span;
        }
    }
}

/// The first `count` pairs of the seed's shuffled pair sequence.
pub fn conflict_prefix(n_jobs: usize, seed: u64, count: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n_jobs)
        .flat_map(|i| (i + 1..n_jobs).map(move |j| (i, j)))
        .collect();
    let count = count.min(pairs.len());
    let mut rng = stream(seed, TAG_CONFLICT);
    let last = pairs.len() as u64 - 1;
    for k in 0..count {
        let r = uniform(&mut rng, k as u64, last) as usize;
        pairs.swap(k, r);
    }
    pairs.truncate(count);
    pairs
}

/// Generates one instance. Weights and profits are uniform in `[1, 5]`;
/// the deadline is the capacity.
pub fn generate_instance(params: &GenParams) -> Result<Instance, GenError> {
    let (lo, hi) = params.proc_time_range()?;
    let n = params.n_jobs;
    let draw = |tag: u64, lo: Time, hi: Time| {
        let mut rng = stream(params.seed, tag);
        (0..n)
            .map(|_| uniform(&mut rng, lo as u64, hi as u64) as Time)
            .collect::<Vec<_>>()
    };
    let p = draw(TAG_PROC, lo, hi);
    let w = draw(TAG_WEIGHT, 1, 5);
    let r = draw(TAG_PROFIT, 1, 5);
    let conflicts = conflict_prefix(n, params.seed, params.conflict_count());
    let meta = InstanceMeta {
        seed: params.seed,
        alpha: params.alpha,
        setting: params.setting,
        conflicts_capped: (params.alpha as usize) * n > params.conflict_count(),
    };
    Ok(Instance::new(params.n_machines, p, conflicts)?
        .with_deadline(params.capacity)?
        .with_weights(w)?
        .with_profits(r)?
        .with_meta(meta))
}

/// A grid of generator parameters and a master seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteGrid {
    pub master_seed: u64,
    pub jobs: Vec<usize>,
    pub machines: Vec<usize>,
    pub capacities: Vec<Time>,
    pub alphas: Vec<u32>,
    pub settings: Vec<u8>,
}

impl Default for SuiteGrid {
    /// The 432-instance grid with master seed 0.
    fn default() -> Self {
        Self::full(0)
    }
}

impl SuiteGrid {
    pub fn full(master_seed: u64) -> Self {
        Self {
            master_seed,
            jobs: FULL_JOBS.to_vec(),
            machines: FULL_MACHINES.to_vec(),
            capacities: FULL_CAPACITIES.to_vec(),
            alphas: FULL_ALPHAS.to_vec(),
            settings: FULL_SETTINGS.to_vec(),
        }
    }

    /// Same grid shape with 4 to 6 jobs, small enough for the brute-force
    /// oracle.
    pub fn mini(master_seed: u64) -> Self {
        Self {
            jobs: vec![4, 5, 6],
            ..Self::full(master_seed)
        }
    }

    pub fn len(&self) -> usize {
        self.jobs.len()
            * self.machines.len()
            * self.capacities.len()
            * self.alphas.len()
            * self.settings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Seed of the cell `(n, m, T, setting)`; independent of the rate.
    pub fn cell_seed(&self, n: usize, m: usize, capacity: Time, setting: u8) -> u64 {
        [n as u64, m as u64, capacity as u64, u64::from(setting)]
            .into_iter()
            .fold(splitmix64(self.master_seed), mix)
    }

    /// All grid points in lexicographic order of (n, m, T, alpha, setting).
    pub fn cells(&self) -> Vec<GenParams> {
        let mut out = Vec::with_capacity(self.len());
        for &n_jobs in &self.jobs {
            for &n_machines in &self.machines {
                for &capacity in &self.capacities {
                    for &alpha in &self.alphas {
                        for &setting in &self.settings {
                            out.push(GenParams {
                                n_jobs,
                                n_machines,
                                capacity,
                                alpha,
                                setting,
                                seed: self.cell_seed(n_jobs, n_machines, capacity, setting),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// One generated suite member.
#[derive(Debug, Clone)]
pub struct SuiteInstance {
    pub params: GenParams,
    pub instance: Instance,
}

impl SuiteInstance {
    pub fn name(&self) -> String {
        self.params.name()
    }
}

pub fn generate_suite(grid: &SuiteGrid) -> Result<Vec<SuiteInstance>, GenError> {
    grid.cells()
        .into_iter()
        .map(|params| {
            Ok(SuiteInstance {
                params,
                instance: generate_instance(&params)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, alpha: u32, setting: u8, capacity: Time) -> GenParams {
        GenParams {
            n_jobs: n,
            n_machines: 2,
            capacity,
            alpha,
            setting,
            seed: 42,
        }
    }

    #[test]
    fn splitmix_reference_values() {
        // First outputs of the reference SplitMix64 generator seeded with 0.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn conflict_counts() {
        let inst = generate_instance(&params(16, 1, 1, 20)).unwrap();
        assert_eq!(inst.conflicts().len(), 16);
        let inst = generate_instance(&params(16, 8, 1, 20)).unwrap();
        assert_eq!(inst.conflicts().len(), 120);
        assert!(inst.meta().unwrap().conflicts_capped);
    }

    #[test]
    fn nested_conflicts() {
        let small = generate_instance(&params(24, 2, 2, 40)).unwrap();
        let large = generate_instance(&params(24, 4, 2, 40)).unwrap();
        assert!(small.conflicts().iter().all(|e| large.conflicts().contains(e)));
    }

    #[test]
    fn processing_time_ranges() {
        assert_eq!(params(4, 1, 1, 10).proc_time_range().unwrap(), (3, 5));
        assert_eq!(params(4, 1, 2, 10).proc_time_range().unwrap(), (1, 5));
        assert_eq!(params(4, 1, 3, 10).proc_time_range().unwrap(), (1, 1));
        assert_eq!(params(4, 1, 3, 80).proc_time_range().unwrap(), (1, 10));
        assert_eq!(params(4, 1, 1, 1).proc_time_range().unwrap(), (1, 1));
        assert_eq!(params(4, 1, 4, 10).proc_time_range(), Err(GenError::Setting(4)));

        let inst = generate_instance(&params(32, 1, 3, 10)).unwrap();
        assert!(inst.proc_times().iter().all(|&p| p == 1));
        let inst = generate_instance(&params(32, 1, 1, 80)).unwrap();
        assert!(inst.proc_times().iter().all(|&p| (20..=40).contains(&p)));
        assert!(inst.weights().unwrap().iter().all(|&w| (1..=5).contains(&w)));
        assert!(inst.profits().unwrap().iter().all(|&r| (1..=5).contains(&r)));
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut rng = stream(7, 9);
        for _ in 0..1000 {
            let x = uniform(&mut rng, 3, 9);
            assert!((3..=9).contains(&x));
        }
    }

    #[test]
    fn suite_sizes() {
        assert_eq!(SuiteGrid::default().len(), 432);
        let only16 = SuiteGrid {
            jobs: vec![16],
            ..SuiteGrid::default()
        };
        assert_eq!(generate_suite(&only16).unwrap().len(), 144);
    }
}
