//! Physical inputs and the harmonic scales derived from them.
//!
//! Working units default to `hbar = mu = 1`. The screening enters the
//! harmonic coefficient as `B_r' = B_r + g^2 alpha m`, from which the
//! oscillator frequency `omega0 = sqrt(8 B_r' / mu)` and the Gaussian width
//! `beta = mu omega0 / hbar` follow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Couplings, masses and the relative-motion binding energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub g: f64,
    pub alpha: f64,
    /// Mediator mass. `alpha * m` acts as an inverse length in working units.
    pub m: f64,
    /// Reduced mass.
    pub mu: f64,
    pub hbar: f64,
    /// Binding energy of the relative motion, strictly positive.
    pub b_r: f64,
}

impl Default for PhysicalParams {
    /// The canonical set `hbar = mu = m = g = 1`, `B_r = 1/8`, `alpha = 0`,
    /// for which `omega0 = beta0 = 1`.
    fn default() -> Self {
        Self {
            g: 1.0,
            alpha: 0.0,
            m: 1.0,
            mu: 1.0,
            hbar: 1.0,
            b_r: 0.125,
        }
    }
}

impl PhysicalParams {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn check(name: &'static str, v: f64, ok: bool, what: &str) -> Result<()> {
            if !v.is_finite() || !ok {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be finite and {what}"),
                });
            }
            Ok(())
        }
        check("B_r", self.b_r, self.b_r > 0.0, "> 0")?;
        check("mu", self.mu, self.mu > 0.0, "> 0")?;
        check("hbar", self.hbar, self.hbar > 0.0, "> 0")?;
        check("m", self.m, self.m >= 0.0, ">= 0")?;
        check("alpha", self.alpha, self.alpha >= 0.0, ">= 0")?;
        check("g", self.g, true, "")?;
        Ok(())
    }

    /// Shift of the harmonic coefficient produced by the O(alpha) term.
    pub fn harmonic_shift(&self) -> f64 {
        self.g * self.g * self.alpha * self.m
    }
}

/// Harmonic-oscillator scales at a given screening.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicScales {
    pub b_r_prime: f64,
    pub omega0: f64,
    pub beta: f64,
    pub hbar: f64,
    pub mu: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl HarmonicScales {
    /// Unperturbed level spacing scale `hbar * omega0`.
    pub fn hbar_omega(&self) -> f64 {
        self.hbar * self.omega0
    }

    /// Scales for a bare oscillator of width `beta` in `hbar = mu = 1` units.
    /// Handy for tests that only care about the basis.
    pub fn unit(beta: f64) -> Self {
        Self {
            b_r_prime: beta * beta / 8.0,
            omega0: beta,
            beta,
            hbar: 1.0,
            mu: 1.0,
            beta0: beta,
            beta1: 0.0,
            beta2: 0.0,
        }
    }
}

/// Width parameter for a harmonic coefficient `b`.
fn width_for(p: &PhysicalParams, b: f64) -> (f64, f64) {
    let omega0 = (8.0 * b / p.mu).sqrt();
    (omega0, p.mu * omega0 / p.hbar)
}

/// Derives the oscillator scales. With `use_renormalized == false` the
/// harmonic shift is dropped and the alpha -> 0 baseline is returned.
pub fn derive_scales(p: &PhysicalParams, use_renormalized: bool) -> Result<HarmonicScales> {
    p.validate()?;
    let b_r_prime = if use_renormalized {
        p.b_r + p.harmonic_shift()
    } else {
        p.b_r
    };
    if !(b_r_prime > 0.0) {
        return Err(Error::Domain(format!(
            "renormalized harmonic coefficient B_r' = {b_r_prime} must be positive"
        )));
    }
    let (omega0, beta) = width_for(p, b_r_prime);
    let (beta0, beta1, beta2) = beta_series(p)?;
    Ok(HarmonicScales {
        b_r_prime,
        omega0,
        beta,
        hbar: p.hbar,
        mu: p.mu,
        beta0,
        beta1,
        beta2,
    })
}

/// Coefficients of `beta(alpha) = beta0 + alpha beta1 + alpha^2 beta2 + O(alpha^3)`.
pub fn beta_series(p: &PhysicalParams) -> Result<(f64, f64, f64)> {
    p.validate()?;
    let (_, beta0) = width_for(p, p.b_r);
    let r = p.g * p.g * p.m / p.b_r;
    Ok((beta0, 0.5 * r * beta0, -0.125 * r * r * beta0))
}

/// Exact width `beta(alpha)` with the harmonic shift included.
pub fn beta_exact(p: &PhysicalParams, alpha: f64) -> Result<f64> {
    Ok(derive_scales(&p.with_alpha(alpha), true)?.beta)
}

/// `beta(alpha)` for signed `alpha`, as needed by central differences about
/// `alpha = 0`. Only requires `B_r + g^2 alpha m > 0`.
pub fn beta_continued(p: &PhysicalParams, alpha: f64) -> Result<f64> {
    p.with_alpha(0.0).validate()?;
    let b = p.b_r + p.g * p.g * alpha * p.m;
    if !(b > 0.0) {
        return Err(Error::Domain(format!(
            "B_r + g^2 alpha m = {b} must be positive at alpha = {alpha}"
        )));
    }
    Ok(width_for(p, b).1)
}
