//! Exterior-power traces and determinant identities for linearized Poincaré
//! maps with a hyperbolic splitting `E_s ⊕ E_u`.
//!
//! The map runs backwards in time, so eigenvalues over `E_u` have modulus
//! below one and eigenvalues over `E_s` have modulus above one.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Relative tolerance for the determinant and sign identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Eigenvalues closer than this to the unit circle break the splitting.
pub const UNIT_CIRCLE_TOL: f64 = 1e-12;
/// Largest imaginary part treated as zero in eigenvalue input.
pub const IMAG_TOL: f64 = 1e-10;
/// Orbit lengths beyond this are out of reach in double precision.
pub const MAX_SURFACE_LENGTH: f64 = 20.0;
/// Condition number bound for sampled conjugating bases.
pub const MAX_CONDITION: f64 = 100.0;

pub const STABLE_MODULI: (f64, f64) = (1.1, 10.0);
pub const UNSTABLE_MODULI: (f64, f64) = (0.1, 0.9);

/// Linearized Poincaré map as a block-diagonal matrix `diag(S, U)` over
/// `E_s ⊕ E_u`, optionally written in another basis `B` as `B diag(S, U) B⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareData {
    stable: DMatrix<f64>,
    unstable: DMatrix<f64>,
    basis: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

impl PoincareData {
    pub fn from_blocks(stable: DMatrix<f64>, unstable: DMatrix<f64>) -> Result<Self> {
        if !stable.is_square() || !unstable.is_square() {
            return Err(Error::InvalidSplitting("blocks must be square".into()));
        }
        if stable.nrows() == 0 || unstable.nrows() == 0 {
            return Err(Error::InvalidSplitting("both blocks need dimension at least one".into()));
        }
        if stable.iter().chain(unstable.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSplitting("non-finite entry".into()));
        }
        check_moduli(&stable, true)?;
        check_moduli(&unstable, false)?;
        Ok(PoincareData { stable, unstable, basis: None })
    }

    /// Real block-diagonal map with the given spectra. Nonreal eigenvalues
    /// must come in conjugate pairs; each pair becomes a rotation-scaling
    /// block.
    pub fn from_eigenvalues(stable: &[Complex64], unstable: &[Complex64]) -> Result<Self> {
        Self::from_blocks(real_block(stable)?, real_block(unstable)?)
    }

    /// Surface case: eigenvalues `ε e^{ℓ}` on `E_s` and `ε e^{-ℓ}` on `E_u`.
    pub fn surface(epsilon: i8, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= MAX_SURFACE_LENGTH) {
            return Err(Error::InvalidSplitting(format!(
                "surface length {length} outside (0, {MAX_SURFACE_LENGTH}]"
            )));
        }
        let e = f64::from(epsilon.signum());
        Self::from_blocks(
            DMatrix::from_element(1, 1, e * length.exp()),
            DMatrix::from_element(1, 1, e * (-length).exp()),
        )
    }

    /// Same map written in the basis given by the columns of `basis`.
    pub fn conjugated(mut self, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != self.dim() || basis.ncols() != self.dim() {
            return Err(Error::InvalidSplitting("basis has the wrong size".into()));
        }
        let full = match &self.basis {
            Some((b, _)) => b * basis,
            None => basis,
        };
        let inverse = full
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidSplitting("basis is singular".into()))?;
        self.basis = Some((full, inverse));
        Ok(self)
    }

    pub fn dim_s(&self) -> usize {
        self.stable.nrows()
    }

    pub fn dim_u(&self) -> usize {
        self.unstable.nrows()
    }

    pub fn dim(&self) -> usize {
        self.dim_s() + self.dim_u()
    }

    pub fn stable_block(&self) -> &DMatrix<f64> {
        &self.stable
    }

    pub fn unstable_block(&self) -> &DMatrix<f64> {
        &self.unstable
    }

    pub fn is_block_adapted(&self) -> bool {
        self.basis.is_none()
    }

    /// The full matrix in the working basis.
    pub fn matrix(&self) -> DMatrix<f64> {
        let (s, u) = (self.dim_s(), self.dim());
        let mut m = DMatrix::zeros(u, u);
        m.view_mut((0, 0), (s, s)).copy_from(&self.stable);
        m.view_mut((s, s), (u - s, u - s)).copy_from(&self.unstable);
        match &self.basis {
            Some((b, b_inv)) => b * m * b_inv,
            None => m,
        }
    }

    /// `det 𝒫|_{E_s}`.
    pub fn stable_det(&self) -> f64 {
        self.stable.determinant()
    }

    /// `sgn det 𝒫|_{E_s}`, the orientation sign of `E_s` along the orbit.
    pub fn stable_sign(&self) -> i8 {
        if self.stable_det() < 0.0 {
            -1
        } else {
            1
        }
    }

    /// Condition number of the working basis, one for block-adapted data.
    pub fn condition(&self) -> f64 {
        match &self.basis {
            Some((b, _)) => {
                let sv = b.singular_values();
                sv.max() / sv.min()
            }
            None => 1.0,
        }
    }
}

fn check_moduli(block: &DMatrix<f64>, stable: bool) -> Result<()> {
    for z in block.complex_eigenvalues().iter() {
        let r = z.norm();
        let ok = if stable { r > 1.0 + UNIT_CIRCLE_TOL } else { r < 1.0 - UNIT_CIRCLE_TOL };
        if !ok {
            let side = if stable { "stable" } else { "unstable" };
            return Err(Error::InvalidSplitting(format!("{side} eigenvalue {z} of modulus {r}")));
        }
    }
    Ok(())
}

fn real_block(eigenvalues: &[Complex64]) -> Result<DMatrix<f64>> {
    let n = eigenvalues.len();
    let mut m = DMatrix::zeros(n, n);
    let mut used = vec![false; n];
    let mut i = 0;
    for k in 0..n {
        if used[k] {
            continue;
        }
        let z = eigenvalues[k];
        used[k] = true;
        if z.im.abs() <= IMAG_TOL {
            m[(i, i)] = z.re;
            i += 1;
            continue;
        }
        let partner = (k + 1..n)
            .find(|&j| !used[j] && (eigenvalues[j] - z.conj()).norm() <= IMAG_TOL * z.norm().max(1.0))
            .ok_or_else(|| Error::InvalidSplitting(format!("eigenvalue {z} has no conjugate partner")))?;
        used[partner] = true;
        m[(i, i)] = z.re;
        m[(i, i + 1)] = -z.im;
        m[(i + 1, i)] = z.im;
        m[(i + 1, i + 1)] = z.re;
        i += 2;
    }
    Ok(m)
}

/// Elementary symmetric polynomials `e_0, …, e_n` of the eigenvalues of a
/// square matrix, read off the characteristic polynomial by the
/// Faddeev–LeVerrier recursion.
pub fn elementary_symmetric(m: &DMatrix<f64>) -> Vec<f64> {
    assert!(m.is_square(), "elementary_symmetric needs a square matrix");
    let n = m.nrows();
    let mut e = Vec::with_capacity(n + 1);
    e.push(1.0);
    let mut acc = DMatrix::<f64>::identity(n, n);
    let mut sign = 1.0;
    for k in 1..=n {
        let a = m * &acc;
        // c_k of det(xI - M) = Σ c_k x^{n-k}; e_k = (-1)^k c_k
        let c = -a.trace() / k as f64;
        sign = -sign;
        e.push(sign * c);
        acc = a;
        for i in 0..n {
            acc[(i, i)] += c;
        }
    }
    e
}

/// Elementary symmetric polynomials for a dense, possibly badly scaled
/// matrix: orthogonal reduction to upper Hessenberg form, then the
/// characteristic polynomial by the Hessenberg recurrence.
pub fn elementary_symmetric_dense(m: &DMatrix<f64>) -> Vec<f64> {
    assert!(m.is_square(), "elementary_symmetric_dense needs a square matrix");
    let n = m.nrows();
    let h = m.clone().hessenberg().h();
    // p[k] holds the coefficients of det(xI - H[..k, ..k]), lowest degree first
    let mut p: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 0..n {
        let mut next = vec![0.0; k + 2];
        for (i, c) in p[k].iter().enumerate() {
            next[i + 1] += c;
            next[i] -= h[(k, k)] * c;
        }
        let mut sub = 1.0;
        for i in (0..k).rev() {
            sub *= h[(i + 1, i)];
            let w = h[(i, k)] * sub;
            for (j, c) in p[i].iter().enumerate() {
                next[j] -= w * c;
            }
        }
        p.push(next);
    }
    let c = &p[n];
    (0..=n).map(|k| if k % 2 == 0 { c[n - k] } else { -c[n - k] }).collect()
}

/// `tr ⋀^k 𝒫` for every `k = 0..=dim`.
///
/// Computed block by block and combined by `e_k(S ⊕ U) = Σ e_i(S) e_{k-i}(U)`;
/// this keeps the large stable and small unstable eigenvalues from meeting
/// in one recursion.
pub fn exterior_traces(p: &PoincareData) -> Vec<f64> {
    let s = elementary_symmetric(&p.stable);
    let u = elementary_symmetric(&p.unstable);
    let mut out = vec![0.0; s.len() + u.len() - 1];
    for (i, a) in s.iter().enumerate() {
        for (j, b) in u.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn exterior_trace(p: &PoincareData, k: usize) -> Result<f64> {
    if k > p.dim() {
        return Err(Error::IndexOutOfRange { k, dim: p.dim() });
    }
    Ok(exterior_traces(p)[k])
}

/// `det(I - 𝒫)`, checked against `Σ_k (-1)^k tr ⋀^k 𝒫`.
pub fn det_one_minus(p: &PoincareData) -> Result<f64> {
    let direct = direct_det_one_minus(p);
    let alternating: f64 = exterior_traces(p)
        .iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { *e } else { -e })
        .sum();
    let residual = (direct - alternating).abs() / direct.abs();
    if !(residual <= IDENTITY_TOL) {
        return Err(Error::IdentityViolation { what: "det(I - P) = alternating sum of exterior traces", residual });
    }
    Ok(direct)
}

fn direct_det_one_minus(p: &PoincareData) -> f64 {
    let n = p.dim();
    (DMatrix::<f64>::identity(n, n) - p.matrix()).determinant()
}

/// Relative gap between `|det(I-𝒫)|` and `(-1)^{dim E_s} sgn(det 𝒫|_{E_s}) det(I-𝒫)`.
/// The modulus comes from the blocks, the signed determinant from the
/// full matrix in its working basis.
pub fn sign_identity_residual(p: &PoincareData) -> Result<f64> {
    check_moduli(&p.stable, true)?;
    check_moduli(&p.unstable, false)?;
    let one = |m: &DMatrix<f64>| (DMatrix::<f64>::identity(m.nrows(), m.nrows()) - m).determinant().abs();
    let modulus = one(&p.stable) * one(&p.unstable);
    let parity = if p.dim_s() % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = parity * f64::from(p.stable_sign()) * direct_det_one_minus(p);
    Ok((modulus - rhs).abs() / modulus)
}

/// `(tr ⋀^0, tr ⋀^1, tr ⋀^2)` in the surface case, from closed forms.
pub fn surface_exterior_traces(epsilon: i8, length: f64) -> [f64; 3] {
    [1.0, f64::from(epsilon.signum()) * 2.0 * length.cosh(), 1.0]
}

/// `|det(I - 𝒫)|` in the surface case: `4 sinh²(ℓ/2)` for `ε = +1` and
/// `4 cosh²(ℓ/2)` for `ε = -1`.
pub fn surface_abs_det_one_minus(epsilon: i8, length: f64) -> f64 {
    let h = if epsilon < 0 { (length / 2.0).cosh() } else { (length / 2.0).sinh() };
    4.0 * h * h
}

/// Reproducible random splitting with stable moduli in `[1.1, 10]`, unstable
/// moduli in `[0.1, 0.9]`, a random mix of real eigenvalues and conjugate
/// pairs, and half the time a change of basis with condition at most 100.
pub fn sample_splitting(dim_s: usize, dim_u: usize, seed: u64) -> PoincareData {
    assert!(dim_s >= 1 && dim_u >= 1, "sample_splitting needs positive dimensions");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stable = sample_spectrum(&mut rng, dim_s, STABLE_MODULI);
    let unstable = sample_spectrum(&mut rng, dim_u, UNSTABLE_MODULI);
    let p = PoincareData::from_eigenvalues(&stable, &unstable).expect("sampled spectrum respects the splitting");
    if rng.random_bool(0.5) {
        let basis = sample_basis(&mut rng, dim_s + dim_u);
        p.conjugated(basis).expect("sampled basis is invertible")
    } else {
        p
    }
}

fn sample_spectrum(rng: &mut ChaCha8Rng, n: usize, (lo, hi): (f64, f64)) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = rng.random_range(lo..=hi);
        if n - out.len() >= 2 && rng.random_bool(0.5) {
            let theta = rng.random_range(0.05..std::f64::consts::PI - 0.05);
            let z = Complex64::from_polar(r, theta);
            out.push(z);
            out.push(z.conj());
        } else {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            out.push(Complex64::new(sign * r, 0.0));
        }
    }
    out
}

/// `Q₁ diag(σ) Q₂` with orthogonal `Q_i` and `σ_i ∈ [1, 100]`.
fn sample_basis(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let mut orthogonal = || {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        m.qr().q()
    };
    let q1 = orthogonal();
    let q2 = orthogonal();
    let sigma = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        MAX_CONDITION.powf(rng.random_range(0.0..1.0))
    }));
    q1 * sigma * q2
}
