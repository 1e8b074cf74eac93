//! Order-by-order pieces of the momentum spectrum in the screening parameter.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernel::{GaussPolyKernel, Variable};
use super::position::{momentum_eigenvalue, position_kernel, KernelOrder};
use crate::error::{Error, Result};
use crate::params::{derive_scales, PhysicalParams};
use crate::perturbation::{rs_first_order, PerturbationTerm};

/// Origin of the non-Gaussian second-order piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NgSource {
    /// `g^2 m^2 pi^{3/2} / (2 hbar omega0) beta0^{-9/2} exp(-k^2/beta0) P(beta0, k)`.
    Printed,
    /// Linear response of the normalized spectrum of the first-order state.
    StateDerived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdmExpansion {
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub rho0: GaussPolyKernel,
    pub rho1: GaussPolyKernel,
    pub rho2_g: GaussPolyKernel,
    pub rho2_ng: GaussPolyKernel,
    pub a0: f64,
    pub a2: f64,
    pub a4: f64,
    /// `(27 beta0^2, -60 beta0, 4)`.
    pub p_poly: [f64; 3],
    pub ng_source: NgSource,
}

impl RdmExpansion {
    /// `rho0 + alpha rho1 + alpha^2 (rho2_G + rho2_NG)` as a single kernel.
    pub fn total(&self, alpha: f64) -> GaussPolyKernel {
        let second = self.rho2_g.add(&self.rho2_ng).expect("shared width");
        self.rho0
            .add(&self.rho1.scaled(alpha))
            .and_then(|k| k.add(&second.scaled(alpha * alpha)))
            .expect("shared width")
    }

    /// `(rho0, rho1, rho2_G, rho2_NG)` at `k`.
    pub fn pieces(&self, k: f64) -> [f64; 4] {
        [
            self.rho0.eval(k),
            self.rho1.eval(k),
            self.rho2_g.eval(k),
            self.rho2_ng.eval(k),
        ]
    }
}

pub fn p_polynomial(beta0: f64) -> [f64; 3] {
    [27.0 * beta0 * beta0, -60.0 * beta0, 4.0]
}

/// Expansion with the printed non-Gaussian piece.
pub fn expand_in_alpha(p: &PhysicalParams) -> Result<RdmExpansion> {
    expand_in_alpha_with(p, NgSource::Printed)
}

pub fn expand_in_alpha_with(p: &PhysicalParams, source: NgSource) -> Result<RdmExpansion> {
    let base = derive_scales(&p.with_alpha(0.0), false)?;
    let (b0, b1, b2) = (base.beta0, base.beta1, base.beta2);
    let q = 1.0 / b0;
    let rho0 = GaussPolyKernel::new(q, vec![1.0 / (PI * b0).sqrt()], Variable::Momentum)?;
    let rho1 = rho0.mul_poly(&[-0.5 * b1 / b0, b1 / (b0 * b0)]);
    let a0 = 3.0 / 8.0 * b1 * b1 / (b0 * b0) - 0.5 * b2 / b0;
    let a2 = b2 / (b0 * b0) - 1.5 * b1 * b1 / b0.powi(3);
    let a4 = 0.5 * b1 * b1 / b0.powi(4);
    let rho2_g = rho0.mul_poly(&[a0, a2, a4]);
    let p_poly = p_polynomial(b0);
    let rho2_ng = match source {
        NgSource::Printed => {
            let pref = p.g * p.g * p.m * p.m * PI.powf(1.5) / (2.0 * base.hbar_omega()) * b0.powf(-4.5);
            GaussPolyKernel::new(q, p_poly.iter().map(|c| pref * c).collect(), Variable::Momentum)?
        }
        NgSource::StateDerived => rho2_ng_from_state(p)?,
    };
    Ok(RdmExpansion {
        beta0: b0,
        beta1: b1,
        beta2: b2,
        rho0,
        rho1,
        rho2_g,
        rho2_ng,
        a0,
        a2,
        a4,
        p_poly,
        ng_source: source,
    })
}

/// `alpha^2` coefficient of the normalized spectrum of the first-order
/// quartic state at the baseline width.
///
/// The linear kernel is exactly quadratic in the coupling `lambda`, so its
/// odd part at `lambda = ±1` is the linear coefficient without truncation error.
pub fn rho2_ng_from_state(p: &PhysicalParams) -> Result<GaussPolyKernel> {
    let scales = derive_scales(&p.with_alpha(0.0), false)?;
    let spectrum = |lambda: f64| -> Result<GaussPolyKernel> {
        let st = rs_first_order(&PerturbationTerm::custom(2, lambda), &scales, 2)?;
        Ok(position_kernel(&st, KernelOrder::Linear)?.fourier())
    };
    let plus = spectrum(1.0)?;
    let minus = spectrum(-1.0)?;
    let k0 = spectrum(0.0)?;
    let k1 = plus.add(&minus.scaled(-1.0))?.scaled(0.5);
    let (i0, i1) = (k0.integral(), k1.integral());
    let d = k1.scaled(1.0 / i0).add(&k0.scaled(-i1 / (i0 * i0)))?;
    // lambda = 2 g^2 m^2 alpha^2
    Ok(d.scaled(2.0 * p.g * p.g * p.m * p.m))
}

/// Truncated series at `(alpha, k)`.
pub fn eigenvalue_at(expansion: &RdmExpansion, alpha: f64, k: f64) -> f64 {
    let [r0, r1, r2g, r2ng] = expansion.pieces(k);
    r0 + alpha * r1 + alpha * alpha * (r2g + r2ng)
}

/// Closed form before expanding the width: `exp(-k^2/beta) / (2 beta^{9/2} sqrt(pi) hbar omega0)
/// [2 beta^4 hbar omega0 + g^2 m^2 pi^2 alpha^2 P(beta, k)]` with `beta = beta(alpha)`.
pub fn eigenvalue_unexpanded(p: &PhysicalParams, alpha: f64, k: f64) -> Result<f64> {
    let s = derive_scales(&p.with_alpha(alpha), true)?;
    let b = s.beta;
    let hw = s.hbar_omega();
    let pp = p_polynomial(b);
    let poly = pp[0] + pp[1] * k * k + pp[2] * k.powi(4);
    let bracket = 2.0 * b.powi(4) * hw + p.g * p.g * p.m * p.m * PI * PI * alpha * alpha * poly;
    Ok((-k * k / b).exp() / (2.0 * b.powf(4.5) * PI.sqrt() * hw) * bracket)
}

/// Lowest value of the truncated series on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub min_value: f64,
    pub at_k: f64,
}

impl PositivityCheck {
    pub fn is_negative(&self) -> bool {
        self.min_value < 0.0
    }
}

/// Scans the series on `grid`; a negative minimum is reported with a warning,
/// not as an error.
pub fn check_positivity(expansion: &RdmExpansion, alpha: f64, grid: &[f64]) -> Result<PositivityCheck> {
    let (at_k, min_value) = grid
        .iter()
        .map(|&k| (k, eigenvalue_at(expansion, alpha, k)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Domain("empty k grid".into()))?;
    let check = PositivityCheck { min_value, at_k };
    if check.is_negative() {
        log::warn!("truncated series negative at k={at_k}: {min_value:e} (alpha={alpha})");
    }
    Ok(check)
}

/// Direct normalized spectrum of the first-order quartic state at `alpha`,
/// using the width `beta(alpha)`.
pub fn state_spectrum(p: &PhysicalParams, alpha: f64, order: KernelOrder) -> Result<GaussPolyKernel> {
    let scales = derive_scales(&p.with_alpha(alpha), true)?;
    let st = rs_first_order(&PerturbationTerm::quartic(&p.with_alpha(alpha)), &scales, 2)?;
    momentum_eigenvalue(&position_kernel(&st, order)?)
}
