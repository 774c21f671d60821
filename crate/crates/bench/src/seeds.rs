//! Per-run seed derivation.
//!
//! Every random stream of an experiment is derived from the master seed as
//! `splitmix64(master ^ splitmix64(stream << 48 | index))`, so the same
//! master seed reproduces every run regardless of execution order.

pub const TOPOLOGY: u64 = 1;
pub const FLOWS: u64 = 2;
pub const GA: u64 = 3;
pub const DSPA: u64 = 4;
pub const ACO: u64 = 5;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64((stream << 48) | (index & 0xFFFF_FFFF_FFFF)))
}
