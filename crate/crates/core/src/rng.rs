//! Counter-based random substreams.
//!
//! Every random draw in the pipeline comes from a ChaCha8 generator addressed
//! by `(master seed, pair key, purpose, replicate)`:
//!
//! * the 256-bit ChaCha key is four SplitMix64 outputs chained from
//!   `seed` and the pair key (`z0 = mix(seed)`, `z1 = mix(z0 ^ pair)`,
//!   `z2 = mix(z1)`, `z3 = mix(z2)`);
//! * the ChaCha stream id is `purpose << 56 | replicate`.
//!
//! A replicate's draws therefore depend only on its address, never on which
//! thread ran it or in what order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one directed computation, e.g. a `(source, destination)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairKey(pub u64);

impl PairKey {
    /// FNV-1a over `source`, a zero byte, then `destination`.
    pub fn for_pair(source: &str, destination: &str) -> Self {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let bytes = source.bytes().chain(std::iter::once(0)).chain(destination.bytes());
        Self(bytes.fold(OFFSET, |h, b| (h ^ b as u64).wrapping_mul(PRIME)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Shuffle = 1,
    Bootstrap = 2,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one replicate. Replicate ids must stay below `2^56`.
pub fn substream(seed: u64, pair: PairKey, purpose: Purpose, replicate: u64) -> ChaCha8Rng {
    debug_assert!(replicate < 1 << 56);
    let z0 = splitmix64(seed);
    let z1 = splitmix64(z0 ^ pair.0);
    let z2 = splitmix64(z1);
    let z3 = splitmix64(z2);
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([z0, z1, z2, z3]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream((purpose as u64) << 56 | replicate);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_address_same_draws() {
        let key = PairKey::for_pair("FLMB", "HGGB");
        let a: Vec<u64> = substream(7, key, Purpose::Shuffle, 3).random_iter().take(4).collect();
        let b: Vec<u64> = substream(7, key, Purpose::Shuffle, 3).random_iter().take(4).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn addresses_are_distinct() {
        let key = PairKey::for_pair("FLMB", "HGGB");
        let first = |seed, pair, purpose, rep| substream(seed, pair, purpose, rep).random::<u64>();
        let base = first(7, key, Purpose::Shuffle, 0);
        assert_ne!(base, first(8, key, Purpose::Shuffle, 0));
        assert_ne!(base, first(7, PairKey::for_pair("HGGB", "FLMB"), Purpose::Shuffle, 0));
        assert_ne!(base, first(7, key, Purpose::Bootstrap, 0));
        assert_ne!(base, first(7, key, Purpose::Shuffle, 1));
    }

    #[test]
    fn pair_key_is_directional() {
        assert_ne!(PairKey::for_pair("A", "B"), PairKey::for_pair("B", "A"));
        assert_ne!(PairKey::for_pair("AB", "C"), PairKey::for_pair("A", "BC"));
    }
}
