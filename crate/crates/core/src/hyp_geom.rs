//! Real 2x2 matrix models of isometries of the hyperbolic plane.
//!
//! Orientation-preserving isometries are matrices of determinant `+1`,
//! orientation-reversing ones have determinant `-1` and act by
//! `z -> (a z̄ + b) / (c z̄ + d)`. Because the entries are real, composition
//! is ordinary matrix multiplication in both cases, and the determinant sign
//! is the orientation character.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Allowed drift of `|det|` away from one after normalization.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Tolerance for comparing traces against the classification thresholds.
pub const CLASSIFICATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
    Reflection,
    Glide,
}

impl IsometryKind {
    pub fn name(self) -> &'static str {
        match self {
            IsometryKind::Identity => "identity",
            IsometryKind::Elliptic => "elliptic",
            IsometryKind::Parabolic => "parabolic",
            IsometryKind::Hyperbolic => "hyperbolic",
            IsometryKind::Reflection => "reflection",
            IsometryKind::Glide => "glide",
        }
    }

    /// Hyperbolic translations and glide reflections are the kinds with an
    /// invariant geodesic they translate along.
    pub fn has_axis(self) -> bool {
        matches!(self, IsometryKind::Hyperbolic | IsometryKind::Glide)
    }
}

impl fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A normalized real 2x2 matrix `[[a, b], [c, d]]` with `|ad - bc| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryMatrix {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl IsometryMatrix {
    pub const IDENTITY: IsometryMatrix = IsometryMatrix { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    /// Builds a matrix and rescales it to unit `|det|`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        if !det.is_finite() || scale == 0.0 || det.abs() <= 1e-14 * scale * scale {
            return Err(Error::DegenerateMatrix { det });
        }
        let s = det.abs().sqrt().recip();
        let m = IsometryMatrix { a: a * s, b: b * s, c: c * s, d: d * s };
        debug_assert!((m.det().abs() - 1.0).abs() <= 1e3 * NORMALIZATION_TOL);
        Ok(m)
    }

    pub fn diag(x: f64, y: f64) -> Result<Self> {
        Self::new(x, 0.0, 0.0, y)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        // adj(M) / det(M), and det = ±1.
        let s = self.det().signum();
        IsometryMatrix { a: s * self.d, b: -s * self.b, c: -s * self.c, d: s * self.a }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = IsometryMatrix::IDENTITY;
        let mut base = *self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    fn renormalized(self) -> Self {
        let det = self.det().abs();
        let s = det.sqrt().recip();
        IsometryMatrix { a: self.a * s, b: self.b * s, c: self.c * s, d: self.d * s }
    }

    /// Kind of the isometry, with trace comparisons at `CLASSIFICATION_TOL`.
    pub fn classify(&self) -> IsometryKind {
        self.classify_with(CLASSIFICATION_TOL)
    }

    pub fn classify_with(&self, tol: f64) -> IsometryKind {
        let tr = self.trace().abs();
        if self.det() > 0.0 {
            if tr > 2.0 + tol {
                IsometryKind::Hyperbolic
            } else if tr < 2.0 - tol {
                IsometryKind::Elliptic
            } else if self.b.abs() <= tol && self.c.abs() <= tol && (self.a - self.d).abs() <= tol {
                IsometryKind::Identity
            } else {
                IsometryKind::Parabolic
            }
        } else if tr <= tol {
            IsometryKind::Reflection
        } else {
            IsometryKind::Glide
        }
    }

    /// Length of the closed geodesic represented by the matrix.
    pub fn translation_length(&self) -> Result<f64> {
        let kind = self.classify();
        let half = self.trace().abs() / 2.0;
        match kind {
            IsometryKind::Hyperbolic => Ok(2.0 * half.acosh()),
            IsometryKind::Glide => Ok(2.0 * half.asinh()),
            other => Err(Error::NotClosedGeodesic { kind: other.name() }),
        }
    }

    /// Sign of the determinant: `-1` exactly for orientation-reversing isometries.
    pub fn orientation_sign(&self) -> i8 {
        if self.det() < 0.0 {
            -1
        } else {
            1
        }
    }
}

impl Mul for IsometryMatrix {
    type Output = IsometryMatrix;

    fn mul(self, rhs: IsometryMatrix) -> IsometryMatrix {
        IsometryMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
        .renormalized()
    }
}
