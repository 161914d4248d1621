//! Deterministic per-task random streams.
//!
//! Every randomized task (an optimizer restart, a verification trial, a sweep
//! point) draws from a generator keyed by `(seed, index)`, so results do not
//! depend on how tasks are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

/// Mixes a base seed with a task index (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for task `index` under `seed`.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}

/// Fills `out` with a Dirichlet(1, ..., 1) sample.
pub fn dirichlet_ones<R: rand::Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    let mut total = 0.0;
    for x in out.iter_mut() {
        let e: f64 = Exp1.sample(rng);
        *x = e;
        total += e;
    }
    if total > 0.0 {
        for x in out.iter_mut() {
            *x /= total;
        }
    } else {
        let n = out.len() as f64;
        out.iter_mut().for_each(|x| *x = 1.0 / n);
    }
}
