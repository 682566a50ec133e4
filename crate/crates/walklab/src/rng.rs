//! Deterministic randomness plumbing.
//!
//! Every estimator derives one ChaCha8 stream per trial from
//! `(master_seed, trial_index)`, so serial and parallel runs of the same
//! configuration consume identical random sequences regardless of worker
//! count or scheduling.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; used to mix seeds and tags into fresh 64-bit seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a sub-seed for a named operation from a master seed.
///
/// Different tags yield decorrelated seeds, so several estimators can share
/// one master seed without sharing streams.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    let mut h = splitmix64(master);
    for &b in tag.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h
}

/// RNG for one trial: stream `trial` of the ChaCha8 generator keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Exp(rate) sample by inverse transform, -ln(U)/rate with U drawn from the
/// open interval (0,1) so the result is always finite and positive.
pub fn exp_sample<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    debug_assert!(rate > 0.0);
    let u: f64 = rng.sample(Open01);
    -u.ln() / rate
}
