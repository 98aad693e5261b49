//! Deterministic randomness: every consumer derives its generator from a
//! seed, a purpose tag and a stream index, so splitting work across threads
//! never changes the drawn values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose tags separating independent random streams.
pub mod purpose {
    pub const CERTIFY_PAIRS: u64 = 1;
    pub const WORD_SEARCH: u64 = 2;
    pub const SAMPLE_WORDS: u64 = 3;
    pub const CLASSIFY: u64 = 4;
    pub const TREE_SAMPLES: u64 = 5;
    pub const CALIBRATION: u64 = 6;
    pub const LINEAL: u64 = 7;
    pub const TEST_CORPUS: u64 = 8;
}

/// Seed used by certifiers when the caller does not supply one.
pub const CERTIFY_SEED: u64 = 0x5EED_CE27;

/// Generator for `(seed, purpose, index)`.
pub fn stream_rng(seed: u64, purpose: u64, index: u64) -> ChaCha8Rng {
    let mixed = seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(index);
    rng
}

/// Radical inverse of `index` in the given prime base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut factor = inv;
    let mut value = 0.0;
    while index > 0 {
        value += (index % base) as f64 * factor;
        index /= base;
        factor *= inv;
    }
    value
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Halton point `index` in `[0,1)^dim` (dim <= 16).
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|k| radical_inverse(index + 1, PRIMES[k]))
        .collect()
}

/// Deterministic low-discrepancy directions covering the unit sphere of
/// `R^dim`; antipodal points are not merged.
pub fn sphere_grid(count: usize, dim: usize) -> Vec<Vec<f64>> {
    if dim == 2 {
        return (0..count)
            .map(|k| {
                let t = std::f64::consts::PI * (k as f64 + 0.5) / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    let mut index = 0u64;
    while out.len() < count {
        let u = halton(index, dim);
        index += 1;
        let v: Vec<f64> = u.iter().map(|x| 2.0 * x - 1.0).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    out
}

/// Uniformly distributed unit vector.
pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Matrix with entries uniform in `[-bound, bound]`, row-major.
pub fn random_entries<R: Rng>(rng: &mut R, dim: usize, bound: f64) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|_| (0..dim).map(|_| rng.random_range(-bound..=bound)).collect())
        .collect()
}
