//! Deterministic seed expansion.
//!
//! Counter-mode hashing: output block `i` is `SHA-256("prg-block" || seed ||
//! be64(i))`, blocks concatenated and truncated to the requested bit count.
//! Expansion is prefix-consistent by construction: `expand(s, n)` is a
//! prefix of `expand(s, m)` for `n <= m`. Byte-exact test vectors are pinned
//! below; determinism, not cryptographic strength, is the contract here.

use sha2::{Digest, Sha256};

/// Expand `seed` into `out_bits` bits.
pub fn prg_expand(seed: &[u8], out_bits: usize) -> Vec<bool> {
    let mut bits = Vec::with_capacity(out_bits);
    let mut counter = 0u64;
    while bits.len() < out_bits {
        let mut h = Sha256::new();
        h.update(b"prg-block");
        h.update(seed);
        h.update(counter.to_be_bytes());
        let block = h.finalize();
        for byte in block {
            for i in (0..8).rev() {
                if bits.len() == out_bits {
                    break;
                }
                bits.push((byte >> i) & 1 == 1);
            }
        }
        counter += 1;
    }
    bits
}

/// Expand to whole bytes (big-endian bit packing), for test vectors.
pub fn prg_expand_bytes(seed: &[u8], out_bytes: usize) -> Vec<u8> {
    let bits = prg_expand(seed, out_bytes * 8);
    bits.chunks(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
        .collect()
}

pub fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
