//! First-order Rayleigh-Schrödinger corrections from `lambda rho^{2n}` terms.
//!
//! The `rho^2` term never enters here: it is absorbed into the width through
//! [`crate::params::derive_scales`]. Anharmonic terms `n >= 2` admix only the
//! states `1..=n` into the ground state, since `<j|rho^{2n}|0>` vanishes for
//! `j > n`.

use serde::{Deserialize, Serialize};

use crate::basis::{eigenfunction, energy, normalization};
use crate::error::{Error, Result};
use crate::matelem::melem_closed;
use crate::params::{derive_scales, HarmonicScales, PhysicalParams};
use crate::specfn::{rational_to_f64, LaguerrePoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TermOrigin {
    YukawaExpansion,
    Custom,
}

/// `lambda * rho^{2 power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTerm {
    pub power: usize,
    pub lambda: f64,
    pub origin: TermOrigin,
}

impl PerturbationTerm {
    pub fn custom(power: usize, lambda: f64) -> Self {
        Self {
            power,
            lambda,
            origin: TermOrigin::Custom,
        }
    }

    /// Order-`n` term of the screened interaction, `lambda_n = 4 g^2 (alpha m)^n / n!`.
    /// For `n = 2` this is `2 g^2 alpha^2 m^2`.
    pub fn yukawa(power: usize, p: &PhysicalParams) -> Self {
        let fact: f64 = (1..=power).map(|k| k as f64).product();
        Self {
            power,
            lambda: 4.0 * p.g * p.g * (p.alpha * p.m).powi(power as i32) / fact,
            origin: TermOrigin::YukawaExpansion,
        }
    }

    pub fn quartic(p: &PhysicalParams) -> Self {
        Self::yukawa(2, p)
    }

    pub fn is_harmonic(&self) -> bool {
        self.power == 1
    }
}

/// Ground state as `Σ_j a_j phi_j` and in polynomial-Gaussian form
/// `exp(-beta rho^2 / 2) Σ_i c_{2i} rho^{2i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedState {
    pub base_beta: f64,
    /// `a_0 = 1` before normalization.
    pub amplitudes: Vec<f64>,
    /// `poly_coeffs[i]` multiplies `rho^{2i}`.
    pub poly_coeffs: Vec<f64>,
    pub normalized: bool,
    /// `1 + Σ_{j>0} a_j^2` before normalization, once [`normalize`] ran.
    pub norm_before: Option<f64>,
    /// First-order energy shift `lambda <0|rho^{2n}|0>`.
    pub energy_shift: f64,
}

impl PerturbedState {
    /// Unperturbed ground state.
    pub fn ground(beta: f64) -> Self {
        Self::from_amplitudes(beta, vec![1.0])
    }

    pub fn from_amplitudes(beta: f64, amplitudes: Vec<f64>) -> Self {
        let poly_coeffs = to_poly_form(&amplitudes, beta);
        Self {
            base_beta: beta,
            amplitudes,
            poly_coeffs,
            normalized: false,
            norm_before: None,
            energy_shift: 0.0,
        }
    }

    /// `Σ_j a_j phi_j(rho)`.
    pub fn eval(&self, rho: f64) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(j, a)| a * eigenfunction(j, self.base_beta, rho))
            .sum()
    }

    /// Polynomial-form evaluation.
    pub fn eval_poly(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        let poly = self.poly_coeffs.iter().rev().fold(0.0, |acc, c| acc * r2 + c);
        (-0.5 * self.base_beta * r2).exp() * poly
    }

    /// Highest `j` with nonzero amplitude.
    pub fn max_excitation(&self) -> usize {
        self.amplitudes
            .iter()
            .rposition(|a| *a != 0.0)
            .unwrap_or(0)
    }

    /// `Σ_j a_j^2`, the norm under the `rho^3 drho` measure.
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }
}

/// Collapses `Σ_j a_j phi_j` into coefficients of `rho^{2i}` multiplying
/// `exp(-beta rho^2 / 2)`.
pub fn to_poly_form(amplitudes: &[f64], beta: f64) -> Vec<f64> {
    let top = amplitudes.iter().rposition(|a| *a != 0.0).unwrap_or(0);
    let mut coeffs = vec![0.0; top + 1];
    for (j, &a) in amplitudes.iter().enumerate().take(top + 1) {
        if a == 0.0 {
            continue;
        }
        let lag = LaguerrePoly::new(j as u32, 1);
        let nj = normalization(j, beta);
        for (i, c) in lag.coefficients.iter().enumerate() {
            coeffs[i] += a * nj * rational_to_f64(c) * beta.powi(i as i32);
        }
    }
    coeffs
}

/// First-order amplitudes `a_j = <j|V|0> / (E_0 - E_j)` for `1 <= j <= n_max`.
pub fn rs_first_order(
    term: &PerturbationTerm,
    scales: &HarmonicScales,
    n_max: usize,
) -> Result<PerturbedState> {
    if term.is_harmonic() {
        return Err(Error::HarmonicTerm);
    }
    if term.power < 1 {
        return Err(Error::InvalidParameter {
            name: "power",
            reason: "perturbation power must be >= 2".into(),
        });
    }
    if n_max < term.power {
        return Err(Error::Truncation {
            n_max,
            power: 2 * term.power,
            required: term.power,
        });
    }
    let beta = scales.beta;
    let e0 = energy(0, scales);
    let mut amplitudes = vec![0.0; n_max + 1];
    amplitudes[0] = 1.0;
    for (j, a) in amplitudes.iter_mut().enumerate().skip(1) {
        let v = term.lambda * melem_closed(j, 0, term.power, beta);
        *a = if v == 0.0 { 0.0 } else { v / (e0 - energy(j, scales)) };
    }
    let mut state = PerturbedState::from_amplitudes(beta, amplitudes);
    state.energy_shift = term.lambda * melem_closed(0, 0, term.power, beta);
    Ok(state)
}

/// Rescales to unit norm; `norm_before` records `1 + Σ a_j^2`.
pub fn normalize(state: &PerturbedState) -> PerturbedState {
    let norm2 = state.norm_squared();
    let mut out = state.clone();
    if norm2 == 1.0 {
        out.normalized = true;
        out.norm_before = Some(1.0);
        return out;
    }
    let s = norm2.sqrt().recip();
    out.amplitudes.iter_mut().for_each(|a| *a *= s);
    out.poly_coeffs.iter_mut().for_each(|c| *c *= s);
    out.normalized = true;
    out.norm_before = Some(norm2);
    out
}

/// First-order admixture amplitudes for `lambda rho^{2n}`, `2 <= n <= 6`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmixtureTable {
    pub power: usize,
    pub lambda: f64,
    /// `amplitudes[j]` for `j = 0..=n_max`.
    pub amplitudes: Vec<f64>,
}

impl AdmixtureTable {
    pub fn nonzero_count(&self, tol: f64) -> usize {
        self.amplitudes
            .iter()
            .skip(1)
            .filter(|a| a.abs() > tol)
            .count()
    }
}

pub fn general_admixture(
    power: usize,
    lambda: f64,
    scales: &HarmonicScales,
    n_max: usize,
) -> Result<AdmixtureTable> {
    if !(2..=6).contains(&power) {
        if power == 1 {
            return Err(Error::HarmonicTerm);
        }
        return Err(Error::InvalidParameter {
            name: "power",
            reason: format!("admixture tables cover 2 <= n <= 6, got {power}"),
        });
    }
    let state = rs_first_order(&PerturbationTerm::custom(power, lambda), scales, n_max)?;
    Ok(AdmixtureTable {
        power,
        lambda,
        amplitudes: state.amplitudes,
    })
}

/// Printed closed forms for the quartic case, kept for comparison reports only.
///
/// They carry an extra factor `-2 pi^2` relative to amplitudes computed with
/// unit-normalized states and `lambda = 2 g^2 alpha^2 m^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaperQuartic {
    pub a1: f64,
    pub a2: f64,
    pub c0: f64,
    pub c2: f64,
    pub c4: f64,
}

impl PaperQuartic {
    pub fn new(p: &PhysicalParams, scales: &HarmonicScales) -> Self {
        let pi2 = std::f64::consts::PI.powi(2);
        let beta = scales.beta;
        let hw = scales.hbar_omega();
        let gfac = p.g * p.g * pi2 * p.alpha * p.alpha * p.m * p.m / hw;
        let s2 = 2f64.sqrt();
        Self {
            a1: -12.0 * s2 * gfac / (beta * beta),
            a2: 2.0 * 3f64.sqrt() * gfac / (beta * beta),
            c0: s2 * beta - 18.0 * s2 * gfac / beta,
            c2: 6.0 * s2 * gfac,
            c4: s2 * beta * gfac,
        }
    }

    /// Printed amplitudes injected into the basis expansion.
    pub fn as_state(&self, beta: f64) -> PerturbedState {
        PerturbedState::from_amplitudes(beta, vec![1.0, self.a1, self.a2])
    }
}

/// Ground-state overlap `<0_bare|psi>` when the `rho^2` shift is (a) absorbed
/// exactly into the width, (b) treated by second-order perturbation theory.
/// The two agree up to `O(alpha^3)`.
pub fn harmonic_equivalence(p: &PhysicalParams) -> Result<(f64, f64)> {
    let bare = derive_scales(p, false)?;
    let dressed = derive_scales(p, true)?;
    let (b0, b) = (bare.beta, dressed.beta);
    let exact = 4.0 * b0 * b / ((b0 + b) * (b0 + b));
    // V = 4 g^2 alpha m rho^2 on top of the bare oscillator.
    let v = 4.0 * p.harmonic_shift();
    let e0 = energy(0, &bare);
    // rho^2 only reaches the first excited state.
    let a1 = v * melem_closed(1, 0, 1, b0) / (e0 - energy(1, &bare));
    Ok((exact, 1.0 - 0.5 * a1 * a1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gaussian_radial_integral;
    use crate::specfn::QuadratureRule;
    use approx::assert_relative_eq;

    fn unit() -> HarmonicScales {
        HarmonicScales::unit(1.0)
    }

    #[test]
    fn quartic_amplitudes() {
        let alpha: f64 = 0.03;
        let term = PerturbationTerm::custom(2, 2.0 * alpha * alpha);
        let st = rs_first_order(&term, &unit(), 10).unwrap();
        assert_relative_eq!(st.amplitudes[1], 6.0 * 2f64.sqrt() * alpha * alpha, max_relative = 1e-14);
        assert_relative_eq!(st.amplitudes[2], -(3f64.sqrt()) * alpha * alpha, max_relative = 1e-14);
        assert!(st.amplitudes[3..].iter().all(|a| *a == 0.0));
        assert_relative_eq!(st.energy_shift, 2.0 * alpha * alpha * 6.0, max_relative = 1e-14);
    }

    #[test]
    fn yukawa_quartic_prefactor() {
        let p = PhysicalParams::default().with_alpha(0.1);
        let t = PerturbationTerm::quartic(&p);
        assert_relative_eq!(t.lambda, 2.0 * 0.01, max_relative = 1e-14);
        assert_eq!(t.origin, TermOrigin::YukawaExpansion);
    }

    #[test]
    fn zero_lambda_is_trivial() {
        let st = rs_first_order(&PerturbationTerm::custom(2, 0.0), &unit(), 5).unwrap();
        assert!(st.amplitudes[1..].iter().all(|a| *a == 0.0));
        assert_eq!(st.poly_coeffs, vec![2f64.sqrt()]);
    }

    #[test]
    fn harmonic_and_truncation_errors() {
        assert_eq!(
            rs_first_order(&PerturbationTerm::custom(1, 0.1), &unit(), 5),
            Err(Error::HarmonicTerm)
        );
        assert!(matches!(
            rs_first_order(&PerturbationTerm::custom(3, 0.1), &unit(), 2),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn unperturbed_poly_form() {
        for &b in &[0.7, 1.0, 2.0] {
            let c = to_poly_form(&[1.0], b);
            assert_eq!(c.len(), 1);
            assert_relative_eq!(c[0], 2f64.sqrt() * b, max_relative = 1e-15);
        }
    }

    #[test]
    fn paper_coefficients_from_paper_amplitudes() {
        let p = PhysicalParams::default().with_alpha(0.05);
        let scales = derive_scales(&p, true).unwrap();
        let paper = PaperQuartic::new(&p, &scales);
        let st = paper.as_state(scales.beta);
        assert_relative_eq!(st.poly_coeffs[0], paper.c0, max_relative = 1e-13);
        assert_relative_eq!(st.poly_coeffs[1], paper.c2, max_relative = 1e-13);
        assert_relative_eq!(st.poly_coeffs[2], paper.c4, max_relative = 1e-13);
    }

    #[test]
    fn poly_form_matches_basis_sum() {
        let st = PerturbedState::from_amplitudes(1.4, vec![1.0, 0.3, -0.2, 0.05, 0.01]);
        for i in 0..200 {
            let r = i as f64 * 0.03;
            assert!((st.eval(r) - st.eval_poly(r)).abs() < 1e-10);
        }
    }

    #[test]
    fn normalization_deficit() {
        let term = PerturbationTerm::custom(2, 0.02);
        let st = rs_first_order(&term, &unit(), 6).unwrap();
        let n = normalize(&st);
        let deficit = st.amplitudes[1].powi(2) + st.amplitudes[2].powi(2);
        assert_relative_eq!(n.norm_before.unwrap(), 1.0 + deficit, max_relative = 1e-15);
        let rule = QuadratureRule::gauss_laguerre(100, 1.0).unwrap();
        // Envelope-free square of the normalized state.
        let norm = gaussian_radial_integral(1.0, &rule, |r| {
            (n.eval(r) * (0.5 * r * r).exp()).powi(2)
        });
        assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
        let untouched = normalize(&PerturbedState::ground(1.0));
        assert_eq!(untouched.amplitudes, vec![1.0]);
    }

    #[test]
    fn admixture_counts() {
        let s = unit();
        let two = general_admixture(2, 1e-3, &s, 10).unwrap();
        let direct = rs_first_order(&PerturbationTerm::custom(2, 1e-3), &s, 10).unwrap();
        assert_eq!(two.amplitudes, direct.amplitudes);
        for n in 3..=6 {
            let t = general_admixture(n, 1e-3, &s, 12).unwrap();
            assert_eq!(t.nonzero_count(0.0), n, "n={n}");
            assert!(t.amplitudes[n + 1..].iter().all(|a| *a == 0.0));
        }
        assert!(general_admixture(7, 1.0, &s, 12).is_err());
        assert_eq!(general_admixture(1, 1.0, &s, 12), Err(Error::HarmonicTerm));
    }

    #[test]
    fn linear_in_lambda() {
        let s = HarmonicScales::unit(1.7);
        let a = rs_first_order(&PerturbationTerm::custom(3, 0.01), &s, 8).unwrap();
        let b = rs_first_order(&PerturbationTerm::custom(3, 0.03), &s, 8).unwrap();
        for (x, y) in a.amplitudes.iter().zip(&b.amplitudes).skip(1) {
            assert_relative_eq!(3.0 * x, *y, max_relative = 1e-14, epsilon = 1e-300);
        }
    }

    #[test]
    fn harmonic_route_equivalence_is_third_order() {
        let base = PhysicalParams::default();
        let mut ratios = Vec::new();
        for &alpha in &[1e-2, 5e-3, 2.5e-3, 1.25e-3] {
            let (exact, pert) = harmonic_equivalence(&base.with_alpha(alpha)).unwrap();
            ratios.push((exact - pert).abs() / alpha.powi(3));
        }
        // Bounded and settling as alpha -> 0.
        assert!(ratios.iter().all(|r| *r < 100.0), "{ratios:?}");
        let spread = (ratios[3] - ratios[2]).abs() / ratios[2];
        assert!(spread < 0.05, "{ratios:?}");
    }
}
