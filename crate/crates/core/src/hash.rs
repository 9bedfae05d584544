//! Seeded FNV-1a hashing.
//!
//! Used for feature hashing and for config fingerprints. The std `Hasher`
//! makes no stability promise across releases, so reproducible artifacts
//! hash through this instead.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over `bytes`, with the seed folded into the offset basis.
pub fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Hashes a token n-gram. Tokens are separated by an unambiguous control
/// byte and prefixed with the n-gram order so that e.g. the unigram "a\x1fb"
/// cannot collide with the bigram ("a", "b") by construction.
pub fn hash_ngram(seed: u64, ngram: &[&str]) -> u64 {
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    h ^= ngram.len() as u64;
    h = h.wrapping_mul(FNV_PRIME);
    for token in ngram {
        for &b in token.as_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        h ^= 0x1f;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_seed_sensitive() {
        assert_eq!(fnv1a64(7, b"abc"), fnv1a64(7, b"abc"));
        assert_ne!(fnv1a64(7, b"abc"), fnv1a64(8, b"abc"));
        assert_ne!(fnv1a64(7, b"abc"), fnv1a64(7, b"abd"));
    }

    #[test]
    fn ngram_order_disambiguates() {
        // joined bytes are identical, orders differ
        let a = hash_ngram(0, &["ab"]);
        let b = hash_ngram(0, &["a", "b"]);
        assert_ne!(a, b);
    }
}
