//! Dehn's algorithm for one-relator surface groups.
//!
//! A cyclic word is Dehn-reduced when no cyclic subword of length more than
//! half the relator agrees with a cyclic permutation of the relator or its
//! inverse. Replacing such a subword by the inverse of the complementary
//! piece shortens the word without changing its conjugacy class.

use std::collections::BTreeSet;

use super::words::{cyclic_reduce, invert, is_cyclically_reduced, least_rotation, rotate, CyclicWord, Letter};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    word: Vec<Letter>,
    /// All cyclic permutations of the relator and of its inverse.
    cyclic: Vec<Vec<Letter>>,
}

/// Outcome of exploring the words reachable by exchanging half-relators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwapClosure {
    /// Some reachable word admits a length-decreasing Dehn move or a free
    /// cancellation, so the class has a shorter representative.
    Shortens,
    /// The reachable least rotations, sorted. All have the same length and
    /// represent the same conjugacy class.
    Class(Vec<Vec<Letter>>),
}

impl Relator {
    pub fn new(word: Vec<Letter>) -> Result<Self> {
        if word.is_empty() || !is_cyclically_reduced(&word) {
            return Err(Error::InvalidModel("relator must be a nonempty cyclically reduced word".into()));
        }
        let inv = invert(&word);
        let n = word.len();
        let cyclic = (0..n).map(|i| rotate(&word, i)).chain((0..n).map(|i| rotate(&inv, i))).collect();
        Ok(Relator { word, cyclic })
    }

    pub fn word(&self) -> &[Letter] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    fn half(&self) -> usize {
        self.word.len() / 2
    }

    /// Length of the agreement between the cyclic word read from `start` and
    /// the relator rotation `r`, capped at `|w|`.
    fn match_len(w: &[Letter], start: usize, r: &[Letter]) -> usize {
        let n = w.len();
        let cap = n.min(r.len());
        (0..cap).take_while(|&k| w[(start + k) % n] == r[k]).count()
    }

    /// Longest relator piece starting at any position of the cyclic word.
    pub fn longest_piece(&self, w: &[Letter]) -> usize {
        (0..w.len())
            .flat_map(|i| self.cyclic.iter().map(move |r| (i, r)))
            .map(|(i, r)| Self::match_len(w, i, r))
            .max()
            .unwrap_or(0)
    }

    pub fn is_dehn_reduced(&self, w: &[Letter]) -> bool {
        self.longest_piece(w) <= self.half()
    }

    /// True when the linear word `w` ends in a relator piece longer than
    /// half the relator. Used for prefix pruning during enumeration.
    pub(crate) fn has_long_suffix_piece(&self, w: &[Letter]) -> bool {
        let need = self.half() + 1;
        if w.len() < need {
            return false;
        }
        let tail = &w[w.len() - need..];
        self.cyclic.iter().any(|r| r[..need] == *tail)
    }

    /// One length-decreasing Dehn move, if any applies.
    pub fn reduce_once(&self, w: &[Letter]) -> Option<Vec<Letter>> {
        let half = self.half();
        for i in 0..w.len() {
            for r in &self.cyclic {
                let len = Self::match_len(w, i, r);
                if len > half {
                    let rotated = rotate(w, i);
                    let mut next = invert(&r[len..]);
                    next.extend_from_slice(&rotated[len..]);
                    return Some(cyclic_reduce(&next));
                }
            }
        }
        None
    }

    /// Exchanges of exact half-relators from the least rotation `w`, closed
    /// under repetition.
    pub fn half_swap_closure(&self, w: &[Letter]) -> SwapClosure {
        if self.word.len() % 2 != 0 {
            return if self.is_dehn_reduced(w) { SwapClosure::Class(vec![w.to_vec()]) } else { SwapClosure::Shortens };
        }
        let half = self.half();
        let mut seen: BTreeSet<Vec<Letter>> = BTreeSet::new();
        let mut stack = vec![w.to_vec()];
        seen.insert(w.to_vec());
        while let Some(cur) = stack.pop() {
            for i in 0..cur.len() {
                for r in &self.cyclic {
                    let len = Self::match_len(&cur, i, r);
                    if len > half {
                        return SwapClosure::Shortens;
                    }
                    if len < half {
                        continue;
                    }
                    let rotated = rotate(&cur, i);
                    let mut next = invert(&r[half..]);
                    next.extend_from_slice(&rotated[half..]);
                    if !is_cyclically_reduced(&next) {
                        return SwapClosure::Shortens;
                    }
                    let canon = rotate(&next, least_rotation(&next));
                    if seen.insert(canon.clone()) {
                        stack.push(canon);
                    }
                }
            }
        }
        SwapClosure::Class(seen.into_iter().collect())
    }
}

/// Applies Dehn moves until none is left; the result is a conjugate of the
/// input in its canonical rotation.
pub fn dehn_reduce(w: &CyclicWord, relator: &Relator) -> CyclicWord {
    let mut cur = w.letters().to_vec();
    while let Some(next) = relator.reduce_once(&cur) {
        cur = next;
    }
    CyclicWord::new(&cur)
}
