//! Von Neumann entropy `-∫ rho(k) ln rho(k) dk` of the momentum spectrum and
//! its expansion in the screening parameter.
//!
//! With `rho = rho0 + alpha rho1 + alpha^2 rho2`, the coefficients are
//! `S1 = -∫ rho1 (1 + ln rho0)` and
//! `S2 = -∫ rho2 (1 + ln rho0) - (1/2) ∫ rho1^2 / rho0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams};
use crate::rdm::{
    eigenvalue_unexpanded, expand_in_alpha, expand_in_alpha_with, position_kernel, GaussPolyKernel, KernelOrder,
    NgSource, RdmExpansion,
};
use crate::perturbation::{rs_first_order, PerturbationTerm};
use crate::specfn::QuadratureRule;

/// Values in `[-CLIP_TOLERANCE, 0)` are treated as zero.
pub const CLIP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Paper,
    Derived,
}

/// `S0 = (1/2) ln(pi beta0) + 1/2`.
pub fn entropy_zeroth(beta0: f64) -> Result<f64> {
    if !(beta0 > 0.0) {
        return Err(Error::InvalidParameter {
            name: "beta0",
            reason: format!("{beta0} must be positive"),
        });
    }
    Ok(0.5 * (PI * beta0).ln() + 0.5)
}

/// `S1 = beta1 / (2 beta0)`.
pub fn entropy_first(beta0: f64, beta1: f64) -> f64 {
    beta1 / (2.0 * beta0)
}

/// `-∫ K (1 + ln rho0)` for `rho0 = exp(-k^2/beta0) / sqrt(pi beta0)`, by moments.
fn against_log_rho0(k: &GaussPolyKernel, beta0: f64) -> f64 {
    let c = 1.0 - 0.5 * (PI * beta0).ln();
    -(c * k.integral() - k.moment(1) / beta0)
}

/// `-(1/2) ∫ rho1^2 / rho0`, where `rho1 = rho0 * poly`.
fn cross_term(rho0: &GaussPolyKernel, rho1_poly: &[f64]) -> f64 {
    let mut sq = vec![0.0; 2 * rho1_poly.len() - 1];
    for (i, a) in rho1_poly.iter().enumerate() {
        for (j, b) in rho1_poly.iter().enumerate() {
            sq[i + j] += a * b;
        }
    }
    -0.5 * rho0.mul_poly(&sq).integral()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSecond {
    /// `beta2 / (2 beta0) - (beta1 / beta0)^2 / 4`.
    pub derived: f64,
    /// The second-order formula evaluated by Gaussian moments.
    pub moments: f64,
    /// Printed `beta2 / beta0 - (3/4)(beta1 / beta0)^2`.
    pub paper: f64,
}

pub fn entropy_second_gaussian(beta0: f64, beta1: f64, beta2: f64) -> Result<GaussianSecond> {
    let r = beta1 / beta0;
    let derived = beta2 / (2.0 * beta0) - 0.25 * r * r;
    let paper = beta2 / beta0 - 0.75 * r * r;
    let rho0 = GaussPolyKernel::new(1.0 / beta0, vec![1.0 / (PI * beta0).sqrt()], crate::rdm::Variable::Momentum)?;
    let rho1_poly = [-0.5 * beta1 / beta0, beta1 / (beta0 * beta0)];
    let a0 = 3.0 / 8.0 * r * r - 0.5 * beta2 / beta0;
    let a2 = beta2 / (beta0 * beta0) - 1.5 * beta1 * beta1 / beta0.powi(3);
    let a4 = 0.5 * beta1 * beta1 / beta0.powi(4);
    let rho2 = rho0.mul_poly(&[a0, a2, a4]);
    let moments = against_log_rho0(&rho2, beta0) + cross_term(&rho0, &rho1_poly);
    Ok(GaussianSecond {
        derived,
        moments,
        paper,
    })
}

/// Second-order non-Gaussian entropy.
///
/// `Derived` evaluates `-∫ rho2_NG (1 + ln rho0)` for the printed kernel,
/// `-12 pi^2 g^2 m^2 / (beta0^2 hbar omega0)`; `Paper` returns the printed
/// `-(48 g^2 m^2 pi^2 + beta1 hbar omega0) / (4 beta0 hbar omega0)`.
pub fn entropy_second_nongaussian(p: &PhysicalParams, mode: Mode) -> Result<f64> {
    let base = derive_scales(&p.with_alpha(0.0), false)?;
    let hw = base.hbar_omega();
    let gm2 = p.g * p.g * p.m * p.m;
    match mode {
        Mode::Derived => {
            let e = expand_in_alpha(p)?;
            Ok(against_log_rho0(&e.rho2_ng, e.beta0))
        }
        Mode::Paper => Ok(-(48.0 * gm2 * PI * PI + base.beta1 * hw) / (4.0 * base.beta0 * hw)),
    }
}

/// `-12 pi^2 g^2 m^2 / (beta0^2 hbar omega0)`.
pub fn nongaussian_closed_form(p: &PhysicalParams) -> Result<f64> {
    let base = derive_scales(&p.with_alpha(0.0), false)?;
    Ok(-12.0 * PI * PI * p.g * p.g * p.m * p.m / (base.beta0 * base.beta0 * base.hbar_omega()))
}

/// `-∫ rho2_NG (1 + ln rho0)` for the spectrum of the first-order state itself.
pub fn entropy_second_nongaussian_state(p: &PhysicalParams) -> Result<f64> {
    let e = expand_in_alpha_with(p, NgSource::StateDerived)?;
    Ok(against_log_rho0(&e.rho2_ng, e.beta0))
}

/// Outcome of [`entropy_numeric`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericEntropy {
    pub value: f64,
    pub clipped: usize,
}

/// `-Σ w_i rho(k_i) ln rho(k_i)`, with `0 ln 0 = 0`.
pub fn entropy_numeric<F: Fn(f64) -> f64>(rho: F, grid: &QuadratureRule) -> Result<NumericEntropy> {
    let mut total = 0.0;
    let mut clipped = 0;
    for (&k, &w) in grid.nodes.iter().zip(&grid.weights) {
        let v = rho(k);
        if !v.is_finite() {
            return Err(Error::Domain(format!("non-finite spectrum value at k={k}")));
        }
        if v < 0.0 {
            if v < -CLIP_TOLERANCE {
                return Err(Error::Negativity { k, value: v });
            }
            clipped += 1;
            continue;
        }
        if v > 0.0 {
            total -= w * v * v.ln();
        }
    }
    if clipped > 0 {
        log::warn!("clipped {clipped} slightly negative spectrum values to zero");
    }
    Ok(NumericEntropy { value: total, clipped })
}

/// Uniform k-grid settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    /// Half-width in units of `sqrt(beta0)`.
    pub half_width: f64,
    pub points: usize,
    /// Allowed change under grid doubling.
    pub tolerance: f64,
}

impl Default for KGrid {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            points: 4096,
            tolerance: 1e-9,
        }
    }
}

impl KGrid {
    pub fn rule(&self, beta0: f64, points: usize) -> Result<QuadratureRule> {
        let l = self.half_width * beta0.sqrt();
        QuadratureRule::trapezoid(points, -l, l)
    }

    pub fn nodes(&self, beta0: f64) -> Result<Vec<f64>> {
        Ok(self.rule(beta0, self.points)?.nodes)
    }
}

/// [`entropy_numeric`] on `grid` and on the doubled grid; fails if they differ
/// by more than the grid tolerance.
pub fn entropy_numeric_converged<F: Fn(f64) -> f64>(rho: F, beta0: f64, grid: &KGrid) -> Result<NumericEntropy> {
    let coarse = entropy_numeric(&rho, &grid.rule(beta0, grid.points)?)?;
    let fine = entropy_numeric(&rho, &grid.rule(beta0, 2 * grid.points - 1)?)?;
    let diff = (fine.value - coarse.value).abs();
    if diff > grid.tolerance {
        return Err(Error::Convergence {
            context: format!("entropy quadrature ({} vs {} points)", grid.points, 2 * grid.points - 1),
            difference: diff,
            tolerance: grid.tolerance,
        });
    }
    Ok(fine)
}

/// Printed-versus-derived record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub paper: f64,
    pub derived: f64,
}

impl Discrepancy {
    pub fn differs(&self) -> bool {
        (self.paper - self.derived).abs() > 1e-12 * self.paper.abs().max(self.derived.abs()).max(1e-300)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyBreakdown {
    pub alpha: f64,
    pub s0: f64,
    pub s1_g: f64,
    pub s2_g: f64,
    pub s2_ng: f64,
    pub s2_g_paper: f64,
    pub s2_ng_paper: f64,
    /// Non-Gaussian piece from the first-order state's own spectrum.
    pub s2_ng_state: f64,
    pub s_total_series: f64,
    pub s_numeric: f64,
    /// Sup-norm of the truncated spectrum series against the closed form
    /// with `beta(alpha)` kept unexpanded.
    pub max_residual: f64,
    pub discrepancies: Vec<Discrepancy>,
}

/// Derived-mode series through `alpha^2`, checked against the numeric entropy
/// of the assembled spectrum.
pub fn entropy_series(p: &PhysicalParams, alpha: f64, grid: &KGrid) -> Result<EntropyBreakdown> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("{alpha} must be finite and non-negative"),
        });
    }
    let e = expand_in_alpha(p)?;
    let s0 = entropy_zeroth(e.beta0)?;
    let s1_g = entropy_first(e.beta0, e.beta1);
    let g2 = entropy_second_gaussian(e.beta0, e.beta1, e.beta2)?;
    let s2_ng = entropy_second_nongaussian(p, Mode::Derived)?;
    let s2_ng_paper = entropy_second_nongaussian(p, Mode::Paper)?;
    let s2_ng_state = entropy_second_nongaussian_state(p)?;
    let total = e.total(alpha);
    let s_numeric = entropy_numeric_converged(|k| total.eval(k), e.beta0, grid)?.value;
    let nodes = grid.nodes(e.beta0)?;
    let mut max_residual: f64 = 0.0;
    for &k in &nodes {
        let d = (total.eval(k) - eigenvalue_unexpanded(p, alpha, k)?).abs();
        max_residual = max_residual.max(d);
    }
    let discrepancies = vec![
        Discrepancy {
            quantity: "S2_G".into(),
            paper: g2.paper,
            derived: g2.derived,
        },
        Discrepancy {
            quantity: "S2_NG".into(),
            paper: s2_ng_paper,
            derived: s2_ng,
        },
    ];
    Ok(EntropyBreakdown {
        alpha,
        s0,
        s1_g,
        s2_g: g2.derived,
        s2_ng,
        s2_g_paper: g2.paper,
        s2_ng_paper,
        s2_ng_state,
        s_total_series: s0 + alpha * s1_g + alpha * alpha * (g2.derived + s2_ng),
        s_numeric,
        max_residual,
        discrepancies,
    })
}

/// First-order non-Gaussian spectrum piece: the `alpha`-derivative at zero of
/// the quartic-state spectrum minus its Gaussian part, at fixed `beta0`.
///
/// Forward differences at `h`, `h/2`, `h/4`; the spectrum is even in `alpha`,
/// so two Richardson steps remove the `h` and `h^3` errors.
pub fn first_order_nongaussian(p: &PhysicalParams, h: f64) -> Result<GaussPolyKernel> {
    let scales = derive_scales(&p.with_alpha(0.0), false)?;
    let e: RdmExpansion = expand_in_alpha(p)?;
    let ng = |alpha: f64| -> Result<GaussPolyKernel> {
        let term = PerturbationTerm::quartic(&p.with_alpha(alpha));
        let st = rs_first_order(&term, &scales, 2)?;
        let spec = position_kernel(&st, KernelOrder::Linear)?.fourier().normalized()?;
        spec.add(&e.rho0.scaled(-1.0))
    };
    let n0 = ng(0.0)?;
    let d = |step: f64| -> Result<GaussPolyKernel> { Ok(ng(step)?.add(&n0.scaled(-1.0))?.scaled(1.0 / step)) };
    let (d1, d2, d4) = (d(h)?, d(0.5 * h)?, d(0.25 * h)?);
    let r1 = d2.scaled(2.0).add(&d1.scaled(-1.0))?;
    let r2 = d4.scaled(2.0).add(&d2.scaled(-1.0))?;
    r2.scaled(8.0 / 7.0).add(&r1.scaled(-1.0 / 7.0))
}

/// `(∫ rho1_NG, ∫ k^2 rho1_NG)`; both vanish, hence `S1_NG = 0`.
pub fn first_order_nongaussian_moments(p: &PhysicalParams, h: f64) -> Result<(f64, f64)> {
    let k = first_order_nongaussian(p, h)?;
    Ok((k.integral(), k.moment(1)))
}

/// Value at zero of the interpolating polynomial through `(xs, ys)` (Neville).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Domain("extrapolation needs matching, non-empty samples".into()));
    }
    let mut p = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            if xi == xj {
                return Err(Error::Domain("repeated abscissa in extrapolation".into()));
            }
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    Ok(p[0])
}

/// `[S_numeric(alpha) - S0 - alpha S1] / alpha^2` for each breakdown, and its
/// extrapolation to `alpha = 0`.
pub fn second_order_slope(rows: &[EntropyBreakdown]) -> Result<(Vec<f64>, f64)> {
    let usable: Vec<&EntropyBreakdown> = rows.iter().filter(|r| r.alpha > 0.0).collect();
    if usable.len() < 2 {
        return Err(Error::Domain("slope extrapolation needs at least two positive alpha values".into()));
    }
    let xs: Vec<f64> = usable.iter().map(|r| r.alpha).collect();
    let ys: Vec<f64> = usable
        .iter()
        .map(|r| (r.s_numeric - r.s0 - r.alpha * r.s1_g) / (r.alpha * r.alpha))
        .collect();
    let limit = extrapolate_to_zero(&xs, &ys)?;
    Ok((ys, limit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::beta_continued;
    use approx::assert_relative_eq;

    fn canonical() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn gaussian(beta0: f64) -> impl Fn(f64) -> f64 {
        move |k: f64| (-k * k / beta0).exp() / (PI * beta0).sqrt()
    }

    #[test]
    fn zeroth_order_values() {
        assert_relative_eq!(entropy_zeroth(1.0).unwrap(), 0.5 * PI.ln() + 0.5);
        assert_relative_eq!(entropy_zeroth(1.0 / PI).unwrap(), 0.5, epsilon = 1e-15);
        assert!(entropy_zeroth(2.0).unwrap() > entropy_zeroth(1.0).unwrap());
        assert!(entropy_zeroth(0.0).is_err());
    }

    #[test]
    fn numeric_zeroth_order() {
        let grid = KGrid::default();
        for &b in &[0.3, 1.0, 4.0] {
            let s = entropy_numeric_converged(gaussian(b), b, &grid).unwrap();
            assert_relative_eq!(s.value, entropy_zeroth(b).unwrap(), epsilon = 1e-10);
        }
        let s1 = entropy_numeric_converged(gaussian(1.0), 1.0, &grid).unwrap().value;
        let s4 = entropy_numeric_converged(gaussian(4.0), 4.0, &grid).unwrap().value;
        assert_relative_eq!(s4 - s1, 2f64.ln(), epsilon = 1e-10);
    }

    #[test]
    fn first_order_values() {
        assert_eq!(entropy_first(1.0, 4.0), 2.0);
        assert_eq!(entropy_first(1.0, 0.0), 0.0);
        let p = canonical();
        let h = 1e-5;
        let s = |a: f64| entropy_zeroth(beta_continued(&p, a).unwrap()).unwrap();
        assert_relative_eq!((s(h) - s(-h)) / (2.0 * h), 2.0, max_relative = 1e-8);
    }

    #[test]
    fn second_gaussian_values() {
        let g = entropy_second_gaussian(1.0, 4.0, -8.0).unwrap();
        assert_relative_eq!(g.derived, -8.0, epsilon = 1e-14);
        assert_relative_eq!(g.moments, -8.0, epsilon = 1e-12);
        assert_relative_eq!(g.paper, -20.0, epsilon = 1e-14);
        let zero = entropy_second_gaussian(1.3, 0.0, 0.0).unwrap();
        assert_eq!(zero.derived, 0.0);
        for &(b0, b1, b2) in &[(0.7, 1.1, -0.3), (2.0, -0.5, 0.9)] {
            let g = entropy_second_gaussian(b0, b1, b2).unwrap();
            assert_relative_eq!(g.moments, g.derived, max_relative = 1e-12);
        }
    }

    #[test]
    fn second_gaussian_is_taylor_coefficient() {
        let p = canonical();
        let h = 1e-3;
        let s = |a: f64| entropy_zeroth(beta_continued(&p, a).unwrap()).unwrap();
        let d2 = (s(h) - 2.0 * s(0.0) + s(-h)) / (h * h);
        assert_relative_eq!(0.5 * d2, -8.0, max_relative = 1e-4);
    }

    #[test]
    fn nongaussian_values() {
        let p = canonical();
        let d = entropy_second_nongaussian(&p, Mode::Derived).unwrap();
        assert_relative_eq!(d, -12.0 * PI * PI, max_relative = 1e-13);
        assert_relative_eq!(nongaussian_closed_form(&p).unwrap(), d, max_relative = 1e-13);
        let paper = entropy_second_nongaussian(&p, Mode::Paper).unwrap();
        assert_relative_eq!(paper, -(48.0 * PI * PI + 4.0) / 4.0, max_relative = 1e-14);
        let state = entropy_second_nongaussian_state(&p).unwrap();
        assert_relative_eq!(state, 6.0, max_relative = 1e-12);
        let free = PhysicalParams { g: 0.0, ..p };
        assert_eq!(entropy_second_nongaussian(&free, Mode::Derived).unwrap(), 0.0);
        assert_eq!(entropy_second_nongaussian(&free, Mode::Paper).unwrap(), 0.0);
    }

    #[test]
    fn nongaussian_by_quadrature() {
        let p = canonical();
        let e = expand_in_alpha(&p).unwrap();
        let rule = KGrid::default().rule(1.0, 4096).unwrap();
        let v = -rule.integrate(|k| e.rho2_ng.eval(k) * (1.0 + e.rho0.eval(k).ln()));
        assert_relative_eq!(v, -12.0 * PI * PI, max_relative = 1e-10);
    }

    #[test]
    fn clipping_rules() {
        let rule = QuadratureRule::trapezoid(5, -1.0, 1.0).unwrap();
        let r = entropy_numeric(|k| if k > 0.9 { -1e-15 } else { 0.5 }, &rule).unwrap();
        assert_eq!(r.clipped, 1);
        assert!(matches!(
            entropy_numeric(|k| if k > 0.9 { -1e-6 } else { 0.5 }, &rule),
            Err(Error::Negativity { .. })
        ));
    }

    #[test]
    fn coarse_grid_fails_convergence() {
        let grid = KGrid {
            points: 6,
            ..KGrid::default()
        };
        assert!(matches!(
            entropy_numeric_converged(gaussian(1.0), 1.0, &grid),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn first_order_nongaussian_vanishes() {
        let (i0, i2) = first_order_nongaussian_moments(&canonical(), 4e-3).unwrap();
        assert!(i0.abs() < 1e-10 && i2.abs() < 1e-10, "{i0} {i2}");
    }

    #[test]
    fn series_at_zero_collapses() {
        let b = entropy_series(&canonical(), 0.0, &KGrid::default()).unwrap();
        assert_eq!(b.s_total_series, b.s0);
        assert_relative_eq!(b.s_numeric, b.s0, epsilon = 1e-8);
        assert!(b.max_residual < 1e-15);
        assert!(b.discrepancies.iter().all(|d| d.differs()));
    }

    #[test]
    fn neville() {
        let xs = [1.0, 0.5, 0.25];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x + 0.5 * x * x).collect();
        assert_relative_eq!(extrapolate_to_zero(&xs, &ys).unwrap(), 3.0, epsilon = 1e-14);
        assert!(extrapolate_to_zero(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn richardson_slope() {
        let p = canonical();
        let grid = KGrid::default();
        let rows: Vec<EntropyBreakdown> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&a| entropy_series(&p, a, &grid).unwrap())
            .collect();
        let (_, limit) = second_order_slope(&rows).unwrap();
        let target = rows[0].s2_g + rows[0].s2_ng;
        assert!((limit - target).abs() / target.abs() < 1e-3, "{limit} vs {target}");
        assert!(second_order_slope(&rows[..1]).is_err());
    }

    #[test]
    fn zero_coupling_series() {
        let p = PhysicalParams { g: 0.0, ..canonical() };
        let b = entropy_series(&p, 0.01, &KGrid::default()).unwrap();
        assert_eq!(b.s2_ng, 0.0);
        assert_eq!(b.s1_g, 0.0);
    }
}
