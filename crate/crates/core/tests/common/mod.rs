//! Brute-force conjugacy classes in a free group of rank two.

use std::collections::BTreeSet;

/// Letters `a, A, b, B` as `0, 1, 2, 3`; `x ^ 1` is the inverse of `x`.
pub const ALPHABET: [u8; 4] = *b"aAbB";

fn least_rotation(s: &[u8]) -> Vec<u8> {
    (0..s.len()).map(|i| [&s[i..], &s[..i]].concat()).min().unwrap()
}

/// Least rotations of all cyclically reduced primitive words of length
/// `1..=max_len`, as letter codes.
pub fn free_group_classes(max_len: usize) -> BTreeSet<Vec<u8>> {
    let mut out = BTreeSet::new();
    for len in 1..=max_len {
        for mut code in 0..4usize.pow(len as u32) {
            let mut w = Vec::with_capacity(len);
            for _ in 0..len {
                w.push((code % 4) as u8);
                code /= 4;
            }
            let reduced = (0..len).all(|i| w[(i + 1) % len] != w[i] ^ 1);
            let power = (1..len).any(|p| len % p == 0 && (0..len).all(|i| w[i] == w[(i + p) % len]));
            if reduced && !power {
                out.insert(least_rotation(&w));
            }
        }
    }
    out
}

/// Letter codes of a rendered word, rotated to least form.
pub fn codes(word: &str) -> Vec<u8> {
    let w: Vec<u8> = word.bytes().map(|c| ALPHABET.iter().position(|&x| x == c).unwrap() as u8).collect();
    least_rotation(&w)
}
