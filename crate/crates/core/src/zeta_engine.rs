//! Per-orbit trace-formula weights and truncated log-zeta sums.
//!
//! For a census of closed orbits and `λ` in the half-plane `Im λ > h`,
//!
//! ```text
//! log ζ_R(λ)   = -Σ_γ (T♯/T) e^{iλT}
//! log ζ_k(λ)   = -Σ_γ a_k(γ) e^{iλT}
//! a_k(γ)       = (T♯/T) tr ⋀^k 𝒫_γ · sgn det 𝒫_γ|E_s / |det(I - 𝒫_γ)|
//! ```
//!
//! and `Σ_k (-1)^{k + dim E_s} a_k(γ) = T♯/T` holds orbit by orbit, so the
//! alternating combination of the `log ζ_k` reproduces `log ζ_R` at every
//! truncation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg_core::{
    det_one_minus, exterior_traces, surface_abs_det_one_minus, surface_exterior_traces, PoincareData,
};
use crate::orbit_enum::{cmp_orbits, Census, ClosedOrbit, GroupModel};

/// Default lower bound on `Im λ` for evaluation grids.
pub const DEFAULT_SIGMA_MIN: f64 = 2.0;
/// Per-orbit alternating-sum tolerance, absolute.
pub const PER_ORBIT_TOL: f64 = 1e-12;
/// Relative mismatch allowed between `𝒫_γ` and the orbit's period.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Factorization tolerance for a census of `n` orbits.
pub fn factorization_tolerance(n: usize) -> f64 {
    1e-11 + n as f64 * 1e-15
}

/// Whether the orientation sign `sgn det 𝒫|E_s` enters the weights.
/// `Untwisted` drops it and exists to show the sign matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignMode {
    #[default]
    Twisted,
    Untwisted,
}

/// Weights `a_0, …, a_{dim}` of one orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.0.get(k).copied()
    }

    /// `Σ_k (-1)^{k + dim_s} a_k`.
    pub fn alternating_sum(&self, dim_s: usize) -> f64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, a)| if (k + dim_s) % 2 == 0 { *a } else { -a })
            .sum()
    }
}

/// Linearized Poincaré map of a surface orbit: eigenvalues `ε e^{±T}`.
pub fn surface_data(o: &ClosedOrbit) -> Result<PoincareData> {
    PoincareData::surface(o.epsilon(), o.t())
}

pub fn orbit_weights(o: &ClosedOrbit, p: &PoincareData) -> Result<WeightVector> {
    orbit_weights_with(o, p, SignMode::Twisted)
}

pub fn orbit_weights_with(o: &ClosedOrbit, p: &PoincareData, mode: SignMode) -> Result<WeightVector> {
    check_consistent(o, p)?;
    let det = det_one_minus(p)?;
    let sign = match mode {
        SignMode::Twisted => f64::from(p.stable_sign()),
        SignMode::Untwisted => 1.0,
    };
    let scale = sign * ratio(o) / det.abs();
    Ok(WeightVector(exterior_traces(p).into_iter().map(|e| e * scale).collect()))
}

fn check_consistent(o: &ClosedOrbit, p: &PoincareData) -> Result<()> {
    if p.stable_sign() != o.epsilon() {
        return Err(Error::InconsistentOrbit(format!(
            "orbit sign {} but det P|E_s has sign {}",
            o.epsilon(),
            p.stable_sign()
        )));
    }
    if p.dim_s() == 1 && p.dim_u() == 1 {
        let expanding = p.stable_block()[(0, 0)].abs().ln();
        let contracting = -p.unstable_block()[(0, 0)].abs().ln();
        for l in [expanding, contracting] {
            if (l - o.t()).abs() > CONSISTENCY_TOL * o.t() {
                return Err(Error::InconsistentOrbit(format!("log eigenvalue {l} against period {}", o.t())));
            }
        }
    }
    Ok(())
}

fn ratio(o: &ClosedOrbit) -> f64 {
    1.0 / f64::from(o.m())
}

/// `|Σ_k (-1)^{k+dim_s} a_k - T♯/T|`.
pub fn alternating_weight_residual(o: &ClosedOrbit, p: &PoincareData) -> Result<f64> {
    let w = orbit_weights(o, p)?;
    Ok((w.alternating_sum(p.dim_s()) - ratio(o)).abs())
}

/// Surface weights `(a_0, a_1, a_2)` from the closed forms.
pub fn surface_weights(o: &ClosedOrbit, mode: SignMode) -> [f64; 3] {
    let eps = o.epsilon();
    let sign = match mode {
        SignMode::Twisted => f64::from(eps),
        SignMode::Untwisted => 1.0,
    };
    let scale = sign * ratio(o) / surface_abs_det_one_minus(eps, o.t());
    surface_exterior_traces(eps, o.t()).map(|e| e * scale)
}

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

fn compensated_complex(terms: impl Iterator<Item = Complex64>) -> Complex64 {
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for z in terms {
        re.add(z.re);
        im.add(z.im);
    }
    Complex64::new(re.value(), im.value())
}

/// A truncated log-zeta sum with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedValue {
    pub value: Complex64,
    pub t_max: f64,
    pub tail_estimate: f64,
}

/// Least-squares fit `log N(t) ≈ slope · t + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Points of `N(t)` in the upper half of the census range, where the
/// exponential regime has set in; all points if that half is empty.
fn upper_counts(census: &Census) -> Vec<(f64, usize)> {
    let n = census.counting_function();
    let upper: Vec<(f64, usize)> = n.iter().copied().filter(|p| p.0 >= census.t_max / 2.0).collect();
    if upper.is_empty() {
        n
    } else {
        upper
    }
}

pub fn fit_growth(census: &Census) -> Option<GrowthFit> {
    let pts = upper_counts(census);
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mut st, mut sy, mut stt, mut sty) = (0.0, 0.0, 0.0, 0.0);
    for &(t, n) in &pts {
        let y = (n as f64).ln();
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    let slope = (k * sty - st * sy) / (k * stt - st * st);
    Some(GrowthFit { slope, intercept: (sy - slope * st) / k, points: pts.len() })
}

/// Density constant `C` of the tail model `dN ≈ C e^{h t} dt`, taken as
/// the envelope `h · max N(t) e^{-h t}` over the upper half of the census.
/// Zero for an empty census.
pub fn fit_tail_constant(census: &Census, entropy: f64) -> f64 {
    upper_counts(census)
        .iter()
        .map(|&(t, n)| entropy * n as f64 * (-entropy * t).exp())
        .fold(0.0, f64::max)
}

/// Evaluates truncated log-zeta sums for one entropy parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaEngine {
    entropy: f64,
    mode: SignMode,
}

impl ZetaEngine {
    pub fn new(entropy: f64) -> Self {
        ZetaEngine { entropy, mode: SignMode::Twisted }
    }

    pub fn for_model(model: &GroupModel) -> Self {
        Self::new(model.entropy())
    }

    pub fn with_mode(self, mode: SignMode) -> Self {
        ZetaEngine { mode, ..self }
    }

    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn mode(&self) -> SignMode {
        self.mode
    }

    fn check(&self, lambda: Complex64) -> Result<()> {
        if lambda.im > self.entropy && lambda.re.is_finite() {
            Ok(())
        } else {
            Err(Error::Divergent { im: lambda.im, entropy: self.entropy })
        }
    }

    fn tail(&self, census: &Census, lambda: Complex64, weight_bound: f64) -> f64 {
        let gap = lambda.im - self.entropy;
        weight_bound * fit_tail_constant(census, self.entropy) * (-gap * census.t_max).exp() / gap
    }

    /// `-Σ w(γ) e^{iλT}` over the census, smallest terms first.
    fn sum(&self, census: &Census, lambda: Complex64, weight: impl Fn(&ClosedOrbit) -> f64 + Sync) -> Complex64 {
        let mut order: Vec<&ClosedOrbit> = census.orbits.iter().collect();
        order.sort_by(|a, b| cmp_orbits(b, a));
        let terms: Vec<Complex64> =
            order.par_iter().map(|o| -weight(o) * (Complex64::i() * lambda * o.t()).exp()).collect();
        compensated_complex(terms.into_iter())
    }

    pub fn log_zeta_r(&self, census: &Census, lambda: Complex64) -> Result<TruncatedValue> {
        self.check(lambda)?;
        Ok(TruncatedValue {
            value: self.sum(census, lambda, ratio),
            t_max: census.t_max,
            tail_estimate: self.tail(census, lambda, 1.0),
        })
    }

    /// Surface census, `k ∈ {0, 1, 2}`.
    pub fn log_zeta_k(&self, census: &Census, k: usize, lambda: Complex64) -> Result<TruncatedValue> {
        if k > 2 {
            return Err(Error::IndexOutOfRange { k, dim: 2 });
        }
        self.check(lambda)?;
        let mode = self.mode;
        Ok(TruncatedValue {
            value: self.sum(census, lambda, |o| surface_weights(o, mode)[k]),
            t_max: census.t_max,
            tail_estimate: self.tail(census, lambda, surface_weight_bound(k, census.t_max)),
        })
    }

    /// `|log ζ_R - Σ_k (-1)^{k+1} log ζ_k|` at the census truncation.
    pub fn factorization_residual(&self, census: &Census, lambda: Complex64) -> Result<f64> {
        let r = self.log_zeta_r(census, lambda)?.value;
        let mut combined = Complex64::new(0.0, 0.0);
        for k in 0..=2 {
            let z = self.log_zeta_k(census, k, lambda)?.value;
            combined += if k % 2 == 1 { z } else { -z };
        }
        Ok((r - combined).norm())
    }

    /// Largest per-orbit alternating-sum residual over the census, through
    /// the generic exterior-power path.
    pub fn max_per_orbit_residual(&self, census: &Census) -> Result<f64> {
        let mode = self.mode;
        let residuals: Result<Vec<f64>> = census
            .orbits
            .par_iter()
            .map(|o| {
                let p = surface_data(o)?;
                let w = orbit_weights_with(o, &p, mode)?;
                Ok((w.alternating_sum(p.dim_s()) - ratio(o)).abs())
            })
            .collect();
        Ok(residuals?.into_iter().fold(0.0, f64::max))
    }
}

/// `sup_{T ≥ t} |a_k| / (T♯/T)` over surface orbits of either sign.
fn surface_weight_bound(k: usize, t: f64) -> f64 {
    let c = t.max(f64::MIN_POSITIVE).cosh();
    let denom = 2.0 * (c - 1.0);
    match k {
        1 => 2.0 * c / denom,
        _ => 1.0 / denom,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_geom::IsometryMatrix;
    use crate::orbit_enum::words::{CyclicWord, Letter};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn orbit(epsilon: i8, t: f64) -> ClosedOrbit {
        let x = (t / 2.0).exp();
        let h = IsometryMatrix::diag(x, f64::from(epsilon) / x).unwrap();
        ClosedOrbit::primitive(CyclicWord::new(&[Letter(0)]), h).unwrap()
    }

    fn census_of(orbits: Vec<ClosedOrbit>, t_max: f64) -> Census {
        let mut orbits = orbits;
        orbits.sort_by(cmp_orbits);
        Census { t_max, max_word_len: 1, complete: true, orbits, warnings: vec![] }
    }

    #[test]
    fn unit_orbit_weights() {
        let o = orbit(1, 1.0);
        let w = orbit_weights(&o, &surface_data(&o).unwrap()).unwrap();
        assert_relative_eq!(w.as_slice()[0], 0.9206735942077923, max_relative = 1e-14);
        assert_relative_eq!(w.as_slice()[1], 2.8413471884155846, max_relative = 1e-14);
        assert_relative_eq!(w.as_slice()[2], 0.9206735942077923, max_relative = 1e-14);
        assert!(alternating_weight_residual(&o, &surface_data(&o).unwrap()).unwrap() <= 1e-12);

        let o = orbit(-1, 1.0);
        let w = orbit_weights(&o, &surface_data(&o).unwrap()).unwrap();
        assert_relative_eq!(w.as_slice()[0], -0.19661193324148185, max_relative = 1e-14);
        assert_relative_eq!(w.as_slice()[1], 0.6067761335170363, max_relative = 1e-14);
        assert_relative_eq!(w.alternating_sum(1), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn second_iterate_weights() {
        let o = orbit(-1, 1.0);
        let o2 = ClosedOrbit::iterate_of(&o, 2);
        assert_eq!(o2.epsilon(), 1);
        let w2 = orbit_weights(&o2, &surface_data(&o2).unwrap()).unwrap();
        let plain = orbit_weights(&orbit(1, 2.0), &PoincareData::surface(1, 2.0).unwrap()).unwrap();
        for k in 0..3 {
            assert_relative_eq!(w2.as_slice()[k], plain.as_slice()[k] / 2.0, max_relative = 1e-14);
        }
        assert_relative_eq!(w2.alternating_sum(1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn closed_forms_match_generic_weights() {
        for eps in [1i8, -1] {
            for i in 1..=40 {
                let o = orbit(eps, i as f64 * 0.5);
                let generic = orbit_weights(&o, &surface_data(&o).unwrap()).unwrap();
                let closed = surface_weights(&o, SignMode::Twisted);
                for k in 0..3 {
                    assert_relative_eq!(generic.as_slice()[k], closed[k], max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn inconsistent_data_is_rejected() {
        let o = orbit(1, 1.0);
        assert!(matches!(orbit_weights(&o, &PoincareData::surface(-1, 1.0).unwrap()), Err(Error::InconsistentOrbit(_))));
        assert!(matches!(orbit_weights(&o, &PoincareData::surface(1, 1.5).unwrap()), Err(Error::InconsistentOrbit(_))));
    }

    #[test]
    fn untwisted_weights_break_the_identity() {
        let o = orbit(-1, 1.0);
        let w = orbit_weights_with(&o, &surface_data(&o).unwrap(), SignMode::Untwisted).unwrap();
        assert_relative_eq!(w.alternating_sum(1), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_census() {
        let e = ZetaEngine::new(1.0);
        let c = Census::empty(5.0);
        let l = Complex64::new(0.0, 10.0);
        assert_eq!(e.log_zeta_r(&c, l).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(e.log_zeta_k(&c, 1, l).unwrap().value, Complex64::new(0.0, 0.0));
        assert_eq!(e.factorization_residual(&c, l).unwrap(), 0.0);
    }

    #[test]
    fn single_orbit_sums() {
        let e = ZetaEngine::new(1.0);
        let c = census_of(vec![orbit(1, 1.0)], 1.0);
        let l = Complex64::new(0.0, 10.0);
        let r = e.log_zeta_r(&c, l).unwrap();
        assert_relative_eq!(r.value.re, -4.539992976248485e-5, max_relative = 1e-14);
        assert_eq!(r.value.im, 0.0);
        let k1 = e.log_zeta_k(&c, 1, l).unwrap();
        assert_relative_eq!(k1.value.re, -1.289969627849014e-4, max_relative = 1e-14);
        assert!(e.factorization_residual(&c, l).unwrap() <= 1e-14);
        assert!(matches!(e.log_zeta_k(&c, 3, l), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn divergent_half_plane_is_rejected() {
        let e = ZetaEngine::new(1.0);
        let c = Census::empty(5.0);
        assert!(matches!(e.log_zeta_r(&c, Complex64::new(0.0, 1.0)), Err(Error::Divergent { .. })));
        assert!(matches!(e.log_zeta_k(&c, 0, Complex64::new(3.0, 0.5)), Err(Error::Divergent { .. })));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn tail_constant_envelope() {
        let c = census_of((1..=10).map(|i| orbit(1, 1.0 + i as f64 * 0.1)).collect(), 2.0);
        let fit = fit_tail_constant(&c, 1.0);
        let n = c.counting_function();
        for (t, k) in n.into_iter().filter(|p| p.0 >= 1.0) {
            assert!(k as f64 * (-t).exp() <= fit + 1e-15);
        }
        assert_eq!(fit_tail_constant(&Census::empty(2.0), 1.0), 0.0);
    }

    proptest! {
        #[test]
        fn per_orbit_identity(t in 0.05f64..20.0, odd in any::<bool>(), m in 1u32..4) {
            let o = ClosedOrbit::iterate_of(&orbit(if odd { -1 } else { 1 }, t / m as f64), m);
            let r = alternating_weight_residual(&o, &surface_data(&o).unwrap()).unwrap();
            prop_assert!(r <= PER_ORBIT_TOL);
        }

        #[test]
        fn summation_order_does_not_matter(
            ts in proptest::collection::vec(0.5f64..12.0, 1..60),
            signs in proptest::collection::vec(any::<bool>(), 60),
            x in -5.0f64..5.0,
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let terms: Vec<Complex64> = ts
                .iter()
                .zip(&signs)
                .map(|(t, s)| {
                    let w = surface_weights(&orbit(if *s { -1 } else { 1 }, *t), SignMode::Twisted)[1];
                    -w * (Complex64::i() * Complex64::new(x, 3.0) * t).exp()
                })
                .collect();
            let mut shuffled = terms.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = compensated_complex(terms.into_iter());
            let b = compensated_complex(shuffled.into_iter());
            prop_assert!((a - b).norm() <= 1e-13 * a.norm().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn conjugate_symmetry(x in 0.1f64..6.0) {
            let orbits: Vec<ClosedOrbit> = [1.3, 2.1, 2.1, 3.7].iter().map(|t| orbit(1, *t)).collect();
            let c = census_of(orbits, 4.0);
            let e = ZetaEngine::new(1.0);
            let a = e.log_zeta_r(&c, Complex64::new(x, 10.0)).unwrap().value;
            let b = e.log_zeta_r(&c, Complex64::new(-x, 10.0)).unwrap().value;
            prop_assert!((a - b.conj()).norm() <= 1e-15 * a.norm());
        }
    }
}
