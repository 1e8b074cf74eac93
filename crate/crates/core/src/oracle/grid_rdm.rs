//! Reduced density kernel by direct quadrature over the traced coordinate.
//!
//! The wavefunction is evaluated from its basis amplitudes, not from the
//! polynomial form, with the Gaussian envelopes stripped and restored
//! analytically.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{envelope_free, gaussian_radial_integral, ANGULAR_VOLUME_4D};
use crate::error::{Error, Result};
use crate::perturbation::PerturbedState;
use crate::rdm::KernelOrder;
use crate::specfn::QuadratureRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdmGrids {
    /// Gauss-Laguerre order for the radial coordinate.
    pub radial_order: usize,
    /// Gauss-Legendre order for the polar angle.
    pub angular_order: usize,
}

impl Default for RdmGrids {
    fn default() -> Self {
        Self {
            radial_order: 200,
            angular_order: 100,
        }
    }
}

/// Samples of `rho(s)` on `s >= 0`; the kernel is even.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridKernel {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Uniform spacing, or 0 for an irregular grid.
    pub spacing: f64,
}

impl GridKernel {
    /// `rho(0)`; the momentum spectrum integrates to `2 pi rho(0)`.
    pub fn trace(&self) -> Result<f64> {
        match self.s_grid.first() {
            Some(&0.0) => Ok(self.values[0]),
            _ => Err(Error::Domain("grid kernel does not include s = 0".into())),
        }
    }

    /// Values scaled so the momentum spectrum has unit integral.
    pub fn normalized_values(&self) -> Result<Vec<f64>> {
        let t = self.trace()?;
        if !(t > 0.0) {
            return Err(Error::Domain(format!("kernel trace {t} is not positive")));
        }
        Ok(self.values.iter().map(|v| v / (2.0 * PI * t)).collect())
    }

    /// Normalized spectrum at `k` by the trapezoid rule over the mirrored grid.
    pub fn spectrum(&self, k: f64) -> Result<f64> {
        if self.spacing <= 0.0 {
            return Err(Error::Domain("grid transform needs a uniform grid".into()));
        }
        let vals = self.normalized_values()?;
        let last = vals.len() - 1;
        let mut sum = vals[0];
        for (i, (&s, &v)) in self.s_grid.iter().zip(&vals).enumerate().skip(1) {
            let w = if i == last { 1.0 } else { 2.0 };
            sum += w * v * (k * s).cos();
        }
        Ok(sum * self.spacing)
    }
}

/// `rho(s)` at each `s` by Gauss-Laguerre in `beta y^2` and Gauss-Legendre in
/// the polar angle, measure `2 pi^2 y^3 sin^2(theta)`.
pub fn rdm_numeric(
    state: &PerturbedState,
    grids: &RdmGrids,
    order: KernelOrder,
    s_values: &[f64],
) -> Result<GridKernel> {
    let beta = state.base_beta;
    let radial = QuadratureRule::gauss_laguerre(grids.radial_order, 1.0)?;
    let theta = QuadratureRule::gauss_legendre_on(grids.angular_order, 0.0, PI)?;
    let amps: Vec<(usize, f64)> = state
        .amplitudes
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| *a != 0.0)
        .collect();
    let f = |r2: f64| -> f64 {
        let r = r2.max(0.0).sqrt();
        amps.iter().map(|&(j, a)| a * envelope_free(j, beta, r)).sum()
    };
    let f0 = f(0.0);
    let product = |p: f64, m: f64| -> f64 {
        match order {
            KernelOrder::Full => f(p) * f(m),
            KernelOrder::Linear => f0 * (f(p) + f(m)) - f0 * f0,
        }
    };
    let values: Vec<f64> = s_values
        .par_iter()
        .map(|&s| {
            let inner = |y: f64| {
                theta.integrate(|t| {
                    let a = y * y + 0.25 * s * s;
                    let b = y * s * t.cos();
                    t.sin().powi(2) * product(a + b, a - b)
                })
            };
            ANGULAR_VOLUME_4D * (-0.25 * beta * s * s).exp() * gaussian_radial_integral(beta, &radial, inner)
        })
        .collect();
    let spacing = uniform_spacing(s_values);
    Ok(GridKernel {
        s_grid: s_values.to_vec(),
        values,
        spacing,
    })
}

fn uniform_spacing(s: &[f64]) -> f64 {
    if s.len() < 2 {
        return 0.0;
    }
    let h = s[1] - s[0];
    let uniform = s.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.abs().max(1.0));
    if uniform && h > 0.0 {
        h
    } else {
        0.0
    }
}

/// `n` equally spaced points on `[0, s_max]`.
pub fn s_grid(s_max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| s_max * i as f64 / (n - 1) as f64).collect()
}

/// Reruns [`rdm_numeric`] with both quadrature orders doubled and fails if
/// the normalized kernels differ by more than `tol`.
pub fn rdm_numeric_converged(
    state: &PerturbedState,
    grids: &RdmGrids,
    order: KernelOrder,
    s_values: &[f64],
    tol: f64,
) -> Result<GridKernel> {
    let coarse = rdm_numeric(state, grids, order, s_values)?;
    let finer = RdmGrids {
        radial_order: 2 * grids.radial_order,
        angular_order: 2 * grids.angular_order,
    };
    let fine = rdm_numeric(state, &finer, order, s_values)?;
    let scale = fine.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = coarse
        .values
        .iter()
        .zip(&fine.values)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if !(diff <= tol * scale) {
        return Err(Error::Convergence {
            context: format!(
                "grid RDM (orders {}x{} vs {}x{})",
                grids.radial_order, grids.angular_order, finer.radial_order, finer.angular_order
            ),
            difference: diff,
            tolerance: tol * scale,
        });
    }
    Ok(fine)
}
