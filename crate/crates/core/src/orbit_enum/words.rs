//! Letters, words and cyclic words over a finite symmetric generating set.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A generator or its inverse. Generator `i` is `2i`, its inverse `2i + 1`,
/// so the natural order lists each generator right before its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

/// Inverse of a linear word.
pub fn invert(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| l.inverse()).collect()
}

/// Free reduction of a linear word.
pub fn free_reduce(word: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free and cyclic reduction: strips cancelling letters at the two ends.
pub fn cyclic_reduce(word: &[Letter]) -> Vec<Letter> {
    let w = free_reduce(word);
    let mut lo = 0;
    let mut hi = w.len();
    while hi - lo >= 2 && w[lo] == w[hi - 1].inverse() {
        lo += 1;
        hi -= 1;
    }
    w[lo..hi].to_vec()
}

pub fn is_cyclically_reduced(word: &[Letter]) -> bool {
    let n = word.len();
    (0..n).all(|i| word[(i + 1) % n] != word[i].inverse())
}

/// Compares the rotation of `w` starting at `i` with the one starting at `j`.
fn cmp_rotations(w: &[Letter], i: usize, j: usize) -> Ordering {
    let n = w.len();
    for k in 0..n {
        match w[(i + k) % n].cmp(&w[(j + k) % n]) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Index of the lexicographically least rotation.
pub fn least_rotation(w: &[Letter]) -> usize {
    (1..w.len()).fold(0, |best, i| if cmp_rotations(w, i, best) == Ordering::Less { i } else { best })
}

pub fn rotate(w: &[Letter], start: usize) -> Vec<Letter> {
    let mut out = Vec::with_capacity(w.len());
    out.extend_from_slice(&w[start..]);
    out.extend_from_slice(&w[..start]);
    out
}

/// True when `w` is the least of its rotations.
pub fn is_least_rotation(w: &[Letter]) -> bool {
    (1..w.len()).all(|i| cmp_rotations(w, i, 0) != Ordering::Less)
}

/// Smallest `p` dividing `|w|` with `w` invariant under rotation by `p`.
pub fn cyclic_period(w: &[Letter]) -> usize {
    let n = w.len();
    (1..=n).find(|&p| n % p == 0 && (0..n).all(|i| w[i] == w[(i + p) % n])).unwrap_or(n)
}

/// A cyclically reduced word up to rotation, stored in its least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    /// Cyclically reduces `letters` and rotates to the canonical position.
    pub fn new(letters: &[Letter]) -> Self {
        let w = cyclic_reduce(letters);
        let s = least_rotation(&w);
        CyclicWord(rotate(&w, s))
    }

    /// Wraps letters already known to be a cyclically reduced least rotation.
    pub(crate) fn from_canonical(letters: Vec<Letter>) -> Self {
        debug_assert!(is_least_rotation(&letters));
        CyclicWord(letters)
    }

    pub fn empty() -> Self {
        CyclicWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord::new(&invert(&self.0))
    }

    /// Not a proper power of a shorter cyclic word.
    pub fn is_primitive(&self) -> bool {
        !self.0.is_empty() && cyclic_period(&self.0) == self.0.len()
    }

    /// Exponent sum of each generator.
    pub fn abelianization(&self, rank: usize) -> Vec<i32> {
        let mut v = vec![0; rank];
        for l in &self.0 {
            v[l.generator()] += if l.is_inverse() { -1 } else { 1 };
        }
        v
    }

    /// Renders with the generator names; inverses are upper case.
    pub fn render(&self, names: &[char]) -> String {
        render(&self.0, names)
    }
}

pub fn render(w: &[Letter], names: &[char]) -> String {
    w.iter()
        .map(|l| {
            let c = names[l.generator()];
            if l.is_inverse() {
                c.to_ascii_uppercase()
            } else {
                c
            }
        })
        .collect()
}

/// Parses a word written with lower case generators and upper case inverses.
pub fn parse_word(s: &str, names: &[char]) -> Result<Vec<Letter>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '*' && *c != '.')
        .map(|c| {
            let lower = c.to_ascii_lowercase();
            let g = names
                .iter()
                .position(|&n| n == lower)
                .ok_or_else(|| Error::Parse(format!("unknown generator `{c}` in word `{s}`")))?;
            Ok(Letter::new(g, c.is_ascii_uppercase()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const AB: [char; 2] = ['a', 'b'];

    fn w(s: &str) -> Vec<Letter> {
        parse_word(s, &AB).unwrap()
    }

    #[test]
    fn letters_and_inverses() {
        let a = Letter::new(0, false);
        assert_eq!(a.inverse(), Letter::new(0, true));
        assert_eq!(a.inverse().inverse(), a);
        assert_eq!(Letter::new(1, true).generator(), 1);
        assert!(Letter::new(0, false) < Letter::new(0, true));
        assert!(Letter::new(0, true) < Letter::new(1, false));
    }

    #[test]
    fn reductions() {
        assert_eq!(free_reduce(&w("abBA")), vec![]);
        assert_eq!(free_reduce(&w("aabBb")), w("aab"));
        assert_eq!(cyclic_reduce(&w("babAB")), w("b"));
        assert_eq!(cyclic_reduce(&w("aBAb")), w("aBAb"));
        assert_eq!(cyclic_reduce(&w("bA")), w("bA"));
    }

    #[test]
    fn canonical_rotation() {
        let c = CyclicWord::new(&w("bab"));
        assert_eq!(c.letters(), &w("abb")[..]);
        assert_eq!(c.render(&AB), "abb");
        assert_eq!(CyclicWord::new(&w("Baa")).render(&AB), "aaB");
        assert_eq!(CyclicWord::new(&w("aBAb")).inverse().render(&AB), "abAB");
    }

    #[test]
    fn primitivity() {
        assert!(CyclicWord::new(&w("ab")).is_primitive());
        assert!(!CyclicWord::new(&w("abab")).is_primitive());
        assert!(!CyclicWord::new(&w("aa")).is_primitive());
        assert!(CyclicWord::new(&w("aab")).is_primitive());
        assert!(!CyclicWord::empty().is_primitive());
    }

    #[test]
    fn abelianization_counts() {
        assert_eq!(CyclicWord::new(&w("aBaa")).abelianization(2), vec![3, -1]);
    }

    #[test]
    fn parse_rejects_unknown() {
        assert!(parse_word("abc", &AB).is_err());
    }
}
