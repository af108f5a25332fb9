//! Seeded random streams.
//!
//! Every consumer draws from its own ChaCha12 stream keyed by
//! `SHA-256(seed as little-endian u64 ‖ purpose tag)`, so location sampling,
//! splitting, field noise and nugget noise never share a stream and the same
//! `(seed, tag)` pair gives the same numbers on every platform and thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};
use statrs::distribution::{ContinuousCDF, Normal};

pub const LOCATIONS: &str = "locations";
pub const SPLIT: &str = "split";
pub const FIELD: &str = "field";
pub const NUGGET: &str = "nugget";
pub const ORDERING: &str = "ordering";

pub type Stream = ChaCha12Rng;

pub fn stream(seed: u64, purpose: &str) -> Stream {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(purpose.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    ChaCha12Rng::from_seed(key)
}

/// Uniform on the open interval (0, 1) with 53 random bits.
pub fn uniform_open(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal deviates by inversion of the normal CDF.
pub fn standard_normals(rng: &mut impl RngCore, n: usize) -> Vec<f64> {
    let normal = Normal::standard();
    (0..n).map(|_| normal.inverse_cdf(uniform_open(rng))).collect()
}
