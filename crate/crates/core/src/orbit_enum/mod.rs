//! Closed orbits of the geodesic flow as conjugacy classes of group words.
//!
//! A closed geodesic on the quotient corresponds to a conjugacy class of
//! hyperbolic (or glide) elements. Classes are represented by cyclic words:
//! cyclically reduced, Dehn-reduced when the group has a relator, and
//! rotated to their least rotation. A word and its inverse are different
//! orbits, one for each direction of travel along the geodesic, so every
//! geodesic contributes two orbits.

pub mod dehn;
pub mod domain;
pub mod models;
pub mod words;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hyp_geom::{IsometryKind, IsometryMatrix};
use dehn::SwapClosure;
use domain::{ChordKey, DirichletDomain};
pub use models::{GroupModel, ModelDef, BUILTIN_MODELS};
use words::{cyclic_period, CyclicWord, Letter};

/// Tolerance for flagging two orbits with equal length and trace.
pub const COLLISION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedOrbit {
    word: CyclicWord,
    t_sharp: f64,
    m: u32,
    t: f64,
    epsilon: i8,
    trace: f64,
    primitive_holonomy: IsometryMatrix,
}

impl ClosedOrbit {
    /// The primitive orbit of a word with hyperbolic or glide holonomy.
    pub fn primitive(word: CyclicWord, holonomy: IsometryMatrix) -> Result<Self> {
        let t_sharp = holonomy.translation_length()?;
        Ok(ClosedOrbit {
            word,
            t_sharp,
            m: 1,
            t: t_sharp,
            epsilon: holonomy.orientation_sign(),
            trace: holonomy.trace(),
            primitive_holonomy: holonomy,
        })
    }

    /// The `m`-th traversal of a primitive orbit.
    pub fn iterate_of(primitive: &ClosedOrbit, m: u32) -> Self {
        let p = primitive.primitive_holonomy;
        let sign = if m % 2 == 0 { 1 } else { primitive.epsilon_primitive() };
        ClosedOrbit {
            word: primitive.word.clone(),
            t_sharp: primitive.t_sharp,
            m,
            t: m as f64 * primitive.t_sharp,
            epsilon: sign,
            trace: p.pow(m).trace(),
            primitive_holonomy: p,
        }
    }

    /// Primitive cyclic word.
    pub fn word(&self) -> &CyclicWord {
        &self.word
    }

    pub fn t_sharp(&self) -> f64 {
        self.t_sharp
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn epsilon(&self) -> i8 {
        self.epsilon
    }

    pub fn epsilon_primitive(&self) -> i8 {
        self.primitive_holonomy.orientation_sign()
    }

    /// Trace of the holonomy of the full orbit.
    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn primitive_holonomy(&self) -> IsometryMatrix {
        self.primitive_holonomy
    }

    pub fn holonomy(&self) -> IsometryMatrix {
        self.primitive_holonomy.pow(self.m)
    }

    fn sort_key(&self) -> (f64, &[Letter], u32) {
        (self.t, self.word.letters(), self.m)
    }
}

pub(crate) fn cmp_orbits(a: &ClosedOrbit, b: &ClosedOrbit) -> std::cmp::Ordering {
    let (ta, wa, ma) = a.sort_key();
    let (tb, wb, mb) = b.sort_key();
    ta.total_cmp(&tb).then_with(|| wa.cmp(wb)).then_with(|| ma.cmp(&mb))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// A reduced nonempty word whose image has no axis; impossible in a
    /// discrete torsion-free group, so the model is suspect.
    NonAxial { word: CyclicWord, kind: IsometryKind },
    /// Two distinct cyclic words that could not be told apart or proven
    /// equal as conjugacy classes.
    Collision { first: CyclicWord, second: CyclicWord, length: f64, trace: f64 },
    /// The walk through the fundamental domain failed for this word.
    Unresolved { word: CyclicWord },
}

impl Warning {
    pub fn describe(&self, model: &GroupModel) -> String {
        let names = model.generator_names();
        match self {
            Warning::NonAxial { word, kind } => {
                format!("non-axial: word {} maps to a {} isometry", word.render(names), kind)
            }
            Warning::Collision { first, second, length, trace } => format!(
                "collision: {} and {} share length {:.15e} and |trace| {:.15e}",
                first.render(names),
                second.render(names),
                length,
                trace
            ),
            Warning::Unresolved { word } => {
                format!("unresolved: no closed cutting sequence for word {}", word.render(names))
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Enumeration {
    pub orbits: Vec<ClosedOrbit>,
    pub warnings: Vec<Warning>,
}

struct Walker<'a> {
    model: &'a GroupModel,
    max_len: usize,
    t_max: f64,
    orbits: Vec<ClosedOrbit>,
    warnings: Vec<Warning>,
}

impl Walker<'_> {
    /// Depth-first search over prenecklaces; `period` is the length of the
    /// longest Lyndon prefix of `prefix`.
    fn visit(&mut self, prefix: &mut Vec<Letter>, mat: IsometryMatrix, period: usize) {
        if period == prefix.len() {
            self.consider(prefix, mat);
        }
        if prefix.len() == self.max_len {
            return;
        }
        let n = prefix.len();
        let last = prefix[n - 1];
        let floor = prefix[n - period];
        for code in floor.0..self.model.alphabet_size() as u8 {
            let l = Letter(code);
            if l == last.inverse() {
                continue;
            }
            prefix.push(l);
            let pruned = self.model.relator().is_some_and(|r| r.has_long_suffix_piece(prefix));
            if !pruned {
                let next = if l == floor { period } else { n + 1 };
                self.visit(prefix, mat * self.model.letter_matrix(l), next);
            }
            prefix.pop();
        }
    }

    /// `w` is a Lyndon word, so it is a primitive least rotation.
    fn consider(&mut self, w: &[Letter], mat: IsometryMatrix) {
        let n = w.len();
        if n > 1 && w[n - 1] == w[0].inverse() {
            return;
        }
        if let Some(rel) = self.model.relator() {
            if !rel.is_dehn_reduced(w) {
                return;
            }
            match rel.half_swap_closure(w) {
                SwapClosure::Shortens => return,
                SwapClosure::Class(class) => {
                    if class[0] != w || class.iter().any(|c| cyclic_period(c) != c.len()) {
                        return;
                    }
                }
            }
        }
        match mat.classify() {
            k if k.has_axis() => {
                let orbit = ClosedOrbit::primitive(CyclicWord::from_canonical(w.to_vec()), mat).expect("axial holonomy");
                if orbit.t_sharp <= self.t_max {
                    self.orbits.push(orbit);
                }
            }
            kind => self.warnings.push(Warning::NonAxial { word: CyclicWord::from_canonical(w.to_vec()), kind }),
        }
    }
}

/// One orbit per conjugacy class of primitive words of length at most
/// `max_word_len`, sorted by `(T♯, word)`.
pub fn enumerate_primitives(model: &GroupModel, max_word_len: usize) -> Result<Enumeration> {
    enumerate_bounded(model, max_word_len, f64::INFINITY)
}

fn enumerate_bounded(model: &GroupModel, max_word_len: usize, t_max: f64) -> Result<Enumeration> {
    if max_word_len == 0 {
        return Err(Error::InvalidModel("max_word_len must be at least 1".into()));
    }
    let alphabet = model.alphabet_size() as u8;
    let seeds: Vec<Letter> = (0..alphabet).map(Letter).collect();
    let parts: Vec<Enumeration> = seeds
        .par_iter()
        .map(|&first| {
            let mut walker = Walker { model, max_len: max_word_len, t_max, orbits: Vec::new(), warnings: Vec::new() };
            walker.visit(&mut vec![first], model.letter_matrix(first), 1);
            Enumeration { orbits: walker.orbits, warnings: walker.warnings }
        })
        .collect();

    let mut candidates = Vec::new();
    let mut warnings = Vec::new();
    for p in parts {
        candidates.extend(p.orbits);
        warnings.extend(p.warnings);
    }
    let mut orbits = match (model.domain(), model.relator()) {
        (Some(domain), _) => merge_by_geometry(domain, candidates, &mut warnings),
        (None, Some(_)) => {
            candidates.sort_by(cmp_orbits);
            warnings.extend(find_collisions(model, &candidates));
            candidates
        }
        // reduced cyclic words are unique class representatives in a free group
        (None, None) => candidates,
    };
    orbits.sort_by(cmp_orbits);
    Ok(Enumeration { orbits, warnings })
}

fn same_length(a: f64, b: f64) -> bool {
    (a - b).abs() <= COLLISION_TOL * a.max(1.0)
}

/// Keeps one word per closed geodesic, identified through its chords in the
/// fundamental domain. Words that are proper powers in the group are
/// dropped.
fn merge_by_geometry(domain: &DirichletDomain, candidates: Vec<ClosedOrbit>, warnings: &mut Vec<Warning>) -> Vec<ClosedOrbit> {
    let keyed: Vec<(ClosedOrbit, Option<ChordKey>)> = candidates
        .into_par_iter()
        .map(|o| {
            let cs = domain.cutting_sequence(&o.primitive_holonomy);
            (o, cs)
        })
        // proper powers in the group are counted through their roots
        .filter(|(_, cs)| cs.is_none_or(|c| c.primitive))
        .map(|(o, cs)| (o, cs.map(|c| c.key)))
        .collect();

    let mut keyed = keyed;
    keyed.sort_by(|a, b| a.0.t_sharp.total_cmp(&b.0.t_sharp).then_with(|| cmp_words(&a.0, &b.0)));

    let mut out = Vec::new();
    let mut start = 0;
    while start < keyed.len() {
        let mut end = start + 1;
        while end < keyed.len() && same_length(keyed[end - 1].0.t_sharp, keyed[end].0.t_sharp) {
            end += 1;
        }
        // representatives chosen so far in this run, with their keys
        let mut reps: Vec<(ClosedOrbit, ChordKey)> = Vec::new();
        for (orbit, key) in keyed[start..end].iter().cloned() {
            let Some(key) = key else {
                warnings.push(Warning::Unresolved { word: orbit.word.clone() });
                out.push(orbit);
                continue;
            };
            let mut merged = false;
            for (rep, rk) in reps.iter_mut() {
                let gap = key.distance(rk);
                if gap < MERGE_TOL {
                    if cmp_words(&orbit, rep).is_lt() {
                        *rep = orbit.clone();
                    }
                    merged = true;
                    break;
                }
                if gap < AMBIGUOUS_TOL {
                    warnings.push(Warning::Collision {
                        first: rep.word.clone(),
                        second: orbit.word.clone(),
                        length: orbit.t_sharp,
                        trace: orbit.trace.abs(),
                    });
                }
            }
            if !merged {
                reps.push((orbit, key));
            }
        }
        out.extend(reps.into_iter().map(|(o, _)| o));
        start = end;
    }
    out
}

/// Chords closer than this are the same chord.
const MERGE_TOL: f64 = 1e-7;
/// Chords closer than this but farther than `MERGE_TOL` are reported.
const AMBIGUOUS_TOL: f64 = 1e-5;

/// Shorter words first, then lexicographic.
fn cmp_words(a: &ClosedOrbit, b: &ClosedOrbit) -> std::cmp::Ordering {
    a.word.len().cmp(&b.word.len()).then_with(|| a.word.letters().cmp(b.word.letters()))
}

/// Flags pairs of words with equal word length, abelianization, period and
/// `|trace|` in groups without a fundamental domain.
fn find_collisions(model: &GroupModel, orbits: &[ClosedOrbit]) -> Vec<Warning> {
    let mut out = Vec::new();
    for (i, a) in orbits.iter().enumerate() {
        let ab_a = a.word.abelianization(model.rank());
        let inv_a = a.word.inverse();
        for b in orbits[i + 1..].iter().take_while(|b| b.t - a.t <= COLLISION_TOL * a.t.max(1.0)) {
            if b.word.len() != a.word.len() || b.word == inv_a {
                continue;
            }
            if (b.trace.abs() - a.trace.abs()).abs() > COLLISION_TOL * a.trace.abs().max(1.0) {
                continue;
            }
            if b.word.abelianization(model.rank()) != ab_a {
                continue;
            }
            out.push(Warning::Collision { first: a.word.clone(), second: b.word.clone(), length: a.t, trace: a.trace.abs() });
        }
    }
    out
}

/// Traversals `m = 1, 2, …` of a primitive orbit with `m·T♯ ≤ t_max`.
pub fn iterate(primitive: &ClosedOrbit, t_max: f64) -> Vec<ClosedOrbit> {
    debug_assert_eq!(primitive.m, 1);
    (1u32..)
        .take_while(|&m| m as f64 * primitive.t_sharp <= t_max)
        .map(|m| ClosedOrbit::iterate_of(primitive, m))
        .collect()
}

/// All orbits, primitive and iterated, with period at most `t_max`.
#[derive(Debug, Clone)]
pub struct Census {
    pub t_max: f64,
    pub max_word_len: usize,
    /// True when `max_word_len` reaches `⌈t_max / λ_min⌉`.
    pub complete: bool,
    pub orbits: Vec<ClosedOrbit>,
    pub warnings: Vec<Warning>,
}

impl Census {
    pub fn empty(t_max: f64) -> Self {
        Census { t_max, max_word_len: 0, complete: true, orbits: Vec::new(), warnings: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    /// `N(t)`, the number of orbits with period at most `t`, at each
    /// distinct enumerated period.
    pub fn counting_function(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for (i, o) in self.orbits.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == o.t => last.1 = i + 1,
                _ => out.push((o.t, i + 1)),
            }
        }
        out
    }

    /// Orbits restricted to a smaller period bound.
    pub fn truncated(&self, t_max: f64) -> Census {
        Census {
            t_max,
            max_word_len: self.max_word_len,
            complete: self.complete && t_max <= self.t_max,
            orbits: self.orbits.iter().filter(|o| o.t <= t_max).cloned().collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Word length needed for a complete census up to `t_max`.
pub fn required_word_len(model: &GroupModel, t_max: f64) -> Result<usize> {
    let lambda = model.lambda_min().ok_or_else(|| Error::IncompleteCensus { model: model.name().to_string() })?;
    Ok(((t_max / lambda).ceil() as usize).max(1))
}

/// Complete census; needs the model's word-length lower bound.
pub fn census(model: &GroupModel, t_max: f64) -> Result<Census> {
    let len = required_word_len(model, t_max)?;
    census_with_word_len(model, t_max, len)
}

/// Census from words of length at most `max_word_len`, complete or not.
pub fn census_with_word_len(model: &GroupModel, t_max: f64, max_word_len: usize) -> Result<Census> {
    let complete = required_word_len(model, t_max).map(|n| n <= max_word_len).unwrap_or(false);
    if !(t_max > 0.0) {
        return Ok(Census { complete, ..Census::empty(t_max) });
    }
    let prims = enumerate_bounded(model, max_word_len, t_max)?;
    let mut orbits: Vec<ClosedOrbit> =
        prims.orbits.iter().filter(|o| o.t_sharp <= t_max).flat_map(|o| iterate(o, t_max)).collect();
    orbits.sort_by(cmp_orbits);
    Ok(Census { t_max, max_word_len, complete, orbits, warnings: prims.warnings })
}
