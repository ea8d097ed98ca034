//! Quasi-random sample points (Halton sequence with a seeded random shift).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base as u64) as f64 * inv;
        i /= base as u64;
        inv /= b;
    }
    out
}

/// `n` points in the box `region` (one `(lo, hi)` per dimension). Points come
/// from a Halton sequence with a Cranley-Patterson rotation drawn from `seed`,
/// so a fixed seed always gives the same points.
pub fn halton_points(region: &[(f64, f64)], n: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(region.len() <= PRIMES.len(), "at most {} dimensions", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = region.iter().map(|_| rng.gen::<f64>()).collect();
    (1..=n as u64)
        .map(|i| {
            region
                .iter()
                .enumerate()
                .map(|(d, &(lo, hi))| {
                    let u = (radical_inverse(i, PRIMES[d]) + shift[d]).fract();
                    lo + (hi - lo) * u
                })
                .collect()
        })
        .collect()
}
