//! Hashing toolkit: invertible quotienting maps, minimal perfect hashing and
//! a shared store of per-set hash parameters.

pub mod mphf;
pub mod quotient;
pub mod store;

pub use mphf::{Mphf, MphfView};
pub use quotient::{make_quotient_pair, QuotientPair};
pub use store::{SharedFunctionStore, StoreBuilder};

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn mix3(a: u64, b: u64, c: u64) -> u64 {
    mix64(a ^ mix64(b ^ mix64(c)))
}

/// `x mod n` for a uniformly mixed `x` without a division.
#[inline]
pub fn reduce(x: u64, n: u64) -> u64 {
    ((x as u128 * n as u128) >> 64) as u64
}
