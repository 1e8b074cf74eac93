//! Closed-form partial trace of a polynomial-Gaussian ground state.
//!
//! With `psi(r) = exp(-beta r^2 / 2) P(r^2)`, the kernel at separation `s` is
//! `2 pi^2 exp(-beta s^2 / 4) ∫ y^3 exp(-beta y^2) ∫ sin^2(theta) P(r+^2) P(r-^2) dtheta dy`
//! where `r±^2 = y^2 + s^2/4 ± y s cos(theta)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kernel::{GaussPolyKernel, Variable};
use crate::basis::ANGULAR_VOLUME_4D;
use crate::error::{Error, Result};
use crate::perturbation::PerturbedState;
use crate::specfn::double_factorial;

/// Which products of the polynomial coefficients enter the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelOrder {
    /// `c0 * c_i` cross terms only (first order in the perturbation).
    Linear,
    /// Every product `c_i c_j`.
    Full,
}

fn binomials(n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 0..n {
        let next = row[k] * (n - k) as f64 / (k + 1) as f64;
        row.push(next);
    }
    row
}

/// Coefficients `d[a][b]` of `A^a B^b` in `(A + B)^i (A - B)^j`.
fn ab_expansion(i: usize, j: usize) -> Vec<Vec<f64>> {
    let n = i + j;
    let mut d = vec![vec![0.0; n + 1]; n + 1];
    let bi = binomials(i);
    let bj = binomials(j);
    for (u, cu) in bi.iter().enumerate() {
        for (v, cv) in bj.iter().enumerate() {
            // (A + B)^i term: A^{i-u} B^u; (A - B)^j term: A^{j-v} (-B)^v.
            let sign = if v % 2 == 0 { 1.0 } else { -1.0 };
            d[n - u - v][u + v] += sign * cu * cv;
        }
    }
    d
}

/// `∫_0^pi sin^2(theta) cos^b(theta) dtheta` for even `b`.
fn angular(b: usize) -> f64 {
    PI * double_factorial(b as i64 - 1) / double_factorial(b as i64 + 2)
}

/// `∫_0^∞ y^{3 + 2L} exp(-beta y^2) dy = (L+1)! / (2 beta^{L+2})`.
fn radial(l: usize, beta: f64) -> f64 {
    let fact: f64 = (1..=l + 1).map(|k| k as f64).product();
    fact / (2.0 * beta.powi(l as i32 + 2))
}

/// Kernel contribution of `r+^{2i} r-^{2j}`, as coefficients of `s^{2t}`.
fn monomial_kernel(i: usize, j: usize, beta: f64) -> Vec<f64> {
    let d = ab_expansion(i, j);
    let n = i + j;
    let mut out = vec![0.0; n + 1];
    for (a, row) in d.iter().enumerate() {
        for (b, &coef) in row.iter().enumerate() {
            if coef == 0.0 || b % 2 == 1 {
                continue;
            }
            let ang = angular(b);
            let ba = binomials(a);
            // A^a = Σ_l C(a,l) y^{2l} (s^2/4)^{a-l};  B^b = y^b s^b cos^b.
            for (l, cl) in ba.iter().enumerate() {
                let big_l = l + b / 2;
                let t = (a - l) + b / 2;
                out[t] += coef * cl * 0.25f64.powi((a - l) as i32) * ang * radial(big_l, beta);
            }
        }
    }
    out
}

/// Position-space kernel `rho(s)` for a state in polynomial form.
pub fn position_kernel(state: &PerturbedState, order: KernelOrder) -> Result<GaussPolyKernel> {
    let beta = state.base_beta;
    let c = &state.poly_coeffs;
    let top = c.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    if order == KernelOrder::Linear && top > 2 {
        return Err(Error::Order(format!(
            "linear kernel covers polynomials up to rho^4, state has rho^{}",
            2 * top
        )));
    }
    let mut poly = vec![0.0; 2 * top + 1];
    for i in 0..=top {
        for j in 0..=top {
            if order == KernelOrder::Linear && i != 0 && j != 0 {
                continue;
            }
            let w = c[i] * c[j];
            if w == 0.0 {
                continue;
            }
            for (t, v) in monomial_kernel(i, j, beta).iter().enumerate() {
                poly[t] += ANGULAR_VOLUME_4D * w * v;
            }
        }
    }
    while poly.len() > 1 && *poly.last().unwrap() == 0.0 {
        poly.pop();
    }
    GaussPolyKernel::new(beta / 4.0, poly, Variable::Position)
}

/// Normalized momentum-space spectrum of a position kernel.
pub fn momentum_eigenvalue(kernel: &GaussPolyKernel) -> Result<GaussPolyKernel> {
    if kernel.variable != Variable::Position {
        return Err(Error::Domain("momentum_eigenvalue expects a position kernel".into()));
    }
    kernel.fourier().normalized()
}

/// The printed linear-order combination
/// `c0 pi^3 (96 c4 + beta (8 beta c0 + 32 c2 + 4 (beta c2 + 6 c4) s^2 + beta c4 s^4)) / (16 beta^4)`.
pub fn printed_linear_kernel(beta: f64, c0: f64, c2: f64, c4: f64) -> [f64; 3] {
    let pref = c0 * PI.powi(3) / (16.0 * beta.powi(4));
    [
        pref * (96.0 * c4 + beta * (8.0 * beta * c0 + 32.0 * c2)),
        pref * beta * 4.0 * (beta * c2 + 6.0 * c4),
        pref * beta * beta * c4,
    ]
}
