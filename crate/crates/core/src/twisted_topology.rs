//! Cohomology of closed surfaces with coefficients in a sign character,
//! and the rank bookkeeping that turns it into a vanishing order at `λ = 0`.
//!
//! A surface is the one-vertex CW complex of its standard presentation. The
//! twisted cochain complex is `ℚ → ℚ^n → ℚ` with `d⁰_i = ω(a_i) - 1` and
//! `d¹_i` the Fox derivative of the relator pushed through `ω`.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    Orientable { genus: u32 },
    Nonorientable { genus: u32 },
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Orientable { genus } => write!(f, "g{genus}"),
            SurfaceKind::Nonorientable { genus } => write!(f, "N{genus}"),
        }
    }
}

impl SurfaceKind {
    /// Parses `g2`, `N3` and the like.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, digits) = s.split_at(s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len()));
        let genus: u32 = digits.parse().map_err(|_| Error::Parse(format!("surface `{s}`: expected g<n> or N<n>")))?;
        match head {
            "g" | "G" => Ok(SurfaceKind::Orientable { genus }),
            "N" | "n" if genus >= 1 => Ok(SurfaceKind::Nonorientable { genus }),
            _ => Err(Error::Parse(format!("surface `{s}`: expected g<n> or N<n> with n >= 1 for N"))),
        }
    }

    pub fn is_orientable(self) -> bool {
        matches!(self, SurfaceKind::Orientable { .. })
    }

    /// `2 - 2g` or `2 - k`.
    pub fn euler_characteristic(self) -> i64 {
        match self {
            SurfaceKind::Orientable { genus } => 2 - 2 * i64::from(genus),
            SurfaceKind::Nonorientable { genus } => 2 - i64::from(genus),
        }
    }
}

/// Generator index and inverse flag.
pub type Letter = (usize, bool);

/// One-relator presentation of a closed surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePresentation {
    kind: SurfaceKind,
    generators: usize,
    relator: Vec<Letter>,
}

impl SurfacePresentation {
    /// `Π [a_i, b_i]` on generators `a_1, b_1, …`.
    pub fn orientable(genus: u32) -> Self {
        let relator = (0..genus as usize)
            .flat_map(|i| [(2 * i, false), (2 * i + 1, false), (2 * i, true), (2 * i + 1, true)])
            .collect();
        SurfacePresentation { kind: SurfaceKind::Orientable { genus }, generators: 2 * genus as usize, relator }
    }

    /// `a_1² a_2² … a_k²`.
    pub fn nonorientable(genus: u32) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidModel("nonorientable genus must be at least 1".into()));
        }
        let relator = (0..genus as usize).flat_map(|i| [(i, false), (i, false)]).collect();
        Ok(SurfacePresentation { kind: SurfaceKind::Nonorientable { genus }, generators: genus as usize, relator })
    }

    pub fn standard(kind: SurfaceKind) -> Result<Self> {
        match kind {
            SurfaceKind::Orientable { genus } => Ok(Self::orientable(genus)),
            SurfaceKind::Nonorientable { genus } => Self::nonorientable(genus),
        }
    }

    /// Any other one-relator presentation; the Euler characteristic of the
    /// CW data must match the kind.
    pub fn custom(kind: SurfaceKind, generators: usize, relator: Vec<Letter>) -> Result<Self> {
        if relator.iter().any(|l| l.0 >= generators) {
            return Err(Error::InvalidModel("relator uses an unknown generator".into()));
        }
        let s = SurfacePresentation { kind, generators, relator };
        if s.cw_euler_characteristic() != kind.euler_characteristic() {
            return Err(Error::InvalidModel(format!(
                "{generators} generators give Euler characteristic {}, expected {}",
                s.cw_euler_characteristic(),
                kind.euler_characteristic()
            )));
        }
        Ok(s)
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relator(&self) -> &[Letter] {
        &self.relator
    }

    /// One vertex, one edge per generator, one two-cell.
    pub fn cw_euler_characteristic(&self) -> i64 {
        2 - self.generators as i64
    }

    /// The orientation character: on the standard presentations every
    /// generator of a nonorientable surface reverses orientation.
    pub fn orientation_character(&self) -> LocalSystem {
        match self.kind {
            SurfaceKind::Orientable { .. } => LocalSystem::trivial(self.generators),
            SurfaceKind::Nonorientable { .. } => LocalSystem { signs: vec![-1; self.generators] },
        }
    }
}

/// A character `π₁ → {±1}`, given on generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalSystem {
    signs: Vec<i8>,
}

impl LocalSystem {
    pub fn trivial(generators: usize) -> Self {
        LocalSystem { signs: vec![1; generators] }
    }

    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::InvalidModel("character values must be +1 or -1".into()));
        }
        Ok(LocalSystem { signs })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|s| *s == 1)
    }

    /// Pointwise product of two characters.
    pub fn twist(&self, other: &LocalSystem) -> LocalSystem {
        LocalSystem { signs: self.signs.iter().zip(&other.signs).map(|(a, b)| a * b).collect() }
    }

    pub fn evaluate(&self, word: &[Letter]) -> i8 {
        word.iter().map(|l| self.signs[l.0]).product()
    }
}

fn check_system(s: &SurfacePresentation, l: &LocalSystem) -> Result<()> {
    if l.signs.len() != s.generators || l.evaluate(&s.relator) != 1 {
        return Err(Error::InconsistentLocalSystem);
    }
    Ok(())
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Fox derivative `∂r/∂x` pushed through `ω`.
pub fn fox_entry(relator: &[Letter], generator: usize, omega: &LocalSystem) -> Result<BigRational> {
    if omega.evaluate(relator) != 1 {
        return Err(Error::InconsistentLocalSystem);
    }
    let mut prefix = 1i64;
    let mut total = 0i64;
    for &(g, inverse) in relator {
        let w = i64::from(omega.signs[g]);
        if g == generator {
            // ∂(x⁻¹)/∂x = -x⁻¹
            total += if inverse { -prefix * w } else { prefix };
        }
        prefix *= w;
    }
    Ok(rational(total))
}

/// The cochain complex `ℚ --d⁰--> ℚ^n --d¹--> ℚ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedComplex {
    pub d0: Vec<BigRational>,
    pub d1: Vec<BigRational>,
}

impl TwistedComplex {
    pub fn new(s: &SurfacePresentation, l: &LocalSystem) -> Result<Self> {
        check_system(s, l)?;
        let d0 = l.signs.iter().map(|w| rational(i64::from(*w) - 1)).collect();
        let d1 = (0..s.generators).map(|g| fox_entry(&s.relator, g, l)).collect::<Result<_>>()?;
        let c = TwistedComplex { d0, d1 };
        debug_assert!(c.composite().is_zero());
        Ok(c)
    }

    /// `d¹ ∘ d⁰`, zero by the fundamental formula of Fox calculus.
    pub fn composite(&self) -> BigRational {
        self.d0.iter().zip(&self.d1).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    }
}

/// Rank by Gaussian elimination over `ℚ`.
pub fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &pivot;
            for j in c..cols {
                let delta = &f * &rows[r][j];
                rows[i][j] -= delta;
            }
        }
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Betti {
    pub b0: i64,
    pub b1: i64,
    pub b2: i64,
}

impl Betti {
    pub fn as_tuple(self) -> (i64, i64, i64) {
        (self.b0, self.b1, self.b2)
    }

    pub fn euler_characteristic(self) -> i64 {
        self.b0 - self.b1 + self.b2
    }
}

pub fn twisted_betti(s: &SurfacePresentation, l: &LocalSystem) -> Result<Betti> {
    let c = TwistedComplex::new(s, l)?;
    if !c.composite().is_zero() {
        return Err(Error::RouteDisagreement("d¹ ∘ d⁰ is not zero".into()));
    }
    let n = s.generators as i64;
    let r0 = rank(vec![c.d0.clone()]) as i64;
    let r1 = rank(vec![c.d1.clone()]) as i64;
    let b = Betti { b0: 1 - r0, b1: n - r1 - r0, b2: 1 - r1 };
    if b.euler_characteristic() != s.kind.euler_characteristic() {
        return Err(Error::RouteDisagreement(format!(
            "Betti numbers {:?} against Euler characteristic {}",
            b.as_tuple(),
            s.kind.euler_characteristic()
        )));
    }
    Ok(b)
}

/// `χ' = Σ (-1)^i i b_i` from untwisted Betti numbers, checked against
/// `-b₁ + 2` (orientable) and `-b₁` (nonorientable).
pub fn derived_euler(s: &SurfacePresentation) -> Result<i64> {
    let b = twisted_betti(s, &LocalSystem::trivial(s.generators))?;
    let chi = -b.b1 + 2 * b.b2;
    let closed = if s.kind.is_orientable() { -b.b1 + 2 } else { -b.b1 };
    if chi != closed {
        return Err(Error::RouteDisagreement(format!("derived Euler characteristic {chi} against {closed}")));
    }
    Ok(chi)
}

/// `b₁(S*Σ; π*L)` from the Gysin sequence
/// `0 → H¹(Σ;L) → H¹(M;π*L) → H⁰(Σ;L⊗o) --e∧--> H²(Σ;L)`,
/// where `o` is the orientation character and the Euler class map is
/// nonzero exactly when `χ ≠ 0`.
pub fn gysin_b1(s: &SurfacePresentation, l: &LocalSystem) -> Result<i64> {
    check_system(s, l)?;
    let w1 = s.orientation_character();
    if !l.is_trivial() && *l != w1 {
        return Err(Error::UnsupportedLocalSystem(format!("{:?} is neither trivial nor w1", l.signs)));
    }
    let base = twisted_betti(s, l)?;
    let source = twisted_betti(s, &l.twist(&w1))?.b0;
    let euler_rank = i64::from(s.kind.euler_characteristic() != 0 && source > 0 && base.b2 > 0);
    Ok(base.b1 + source - euler_rank)
}

/// The vanishing order computed three ways: the kind-specific formula, the
/// assembly `m₁ - m₀ - m₂` over `o(E_s) = π*w₁`, and `-χ'`.
pub fn vanishing_order_routes(s: &SurfacePresentation) -> Result<[i64; 3]> {
    let chi = s.kind.euler_characteristic();
    if chi >= 0 {
        return Err(Error::HypothesisViolation { chi });
    }
    let w1 = s.orientation_character();
    let formula = if s.kind.is_orientable() {
        gysin_b1(s, &LocalSystem::trivial(s.generators))? - 2
    } else {
        twisted_betti(s, &w1)?.b1
    };
    // H⁰ and, by duality, H² of M with coefficients in o(E_s) pull back from Σ
    let m0 = twisted_betti(s, &w1)?.b0;
    let assembly = gysin_b1(s, &w1)? - 2 * m0;
    Ok([formula, assembly, -derived_euler(s)?])
}

pub fn predicted_vanishing_order(s: &SurfacePresentation) -> Result<i64> {
    let routes = vanishing_order_routes(s)?;
    if routes.iter().any(|r| *r != routes[0]) {
        return Err(Error::RouteDisagreement(format!("vanishing order routes {routes:?}")));
    }
    Ok(routes[0])
}

/// One row of the topology table.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRow {
    pub kind: SurfaceKind,
    pub betti_trivial: Betti,
    pub betti_w1: Betti,
    pub euler: i64,
    pub derived_euler: i64,
    pub gysin_b1: i64,
    pub predicted_order: Result<i64>,
}

pub fn surface_row(kind: SurfaceKind) -> Result<SurfaceRow> {
    let s = SurfacePresentation::standard(kind)?;
    let w1 = s.orientation_character();
    Ok(SurfaceRow {
        kind,
        betti_trivial: twisted_betti(&s, &LocalSystem::trivial(s.generators))?,
        betti_w1: twisted_betti(&s, &w1)?,
        euler: kind.euler_characteristic(),
        derived_euler: derived_euler(&s)?,
        gysin_b1: gysin_b1(&s, &w1)?,
        predicted_order: predicted_vanishing_order(&s),
    })
}
