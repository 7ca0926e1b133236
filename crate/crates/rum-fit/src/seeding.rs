//! Deterministic derivation of sub-seeds from a single run seed.
//!
//! Every random stream in the crate is seeded through [`derive_seed`] so a
//! run is reproducible from one `--seed` regardless of thread scheduling.
//! The mixer is a fixed splitmix64 chain over (seed, label bytes, index);
//! `std`'s hashers are deliberately avoided since they are not stable across
//! releases.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed for the random stream identified by `(label, index)`.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut acc = splitmix64(seed);
    for chunk in label.as_bytes().chunks(8) {
        let mut word = [0u8; 8];
        word[..chunk.len()].copy_from_slice(chunk);
        acc = splitmix64(acc ^ u64::from_le_bytes(word));
    }
    splitmix64(acc ^ index)
}
