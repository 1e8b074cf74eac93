//! Matrix elements `<m| rho^{2p} |n>` in the radial basis.
//!
//! Closed form: with `x = beta rho^2`,
//! `<m|rho^{2p}|n> = N_m N_n / (2 beta^{p+2}) ∫ e^{-x} x^{p+1} L_m^{(1)} L_n^{(1)} dx`,
//! the integral evaluated exactly. The quadrature route integrates the
//! basis functions directly and serves as its check.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{envelope_free, gaussian_radial_integral, normalization, ANGULAR_VOLUME_4D};
use crate::error::{Error, Result};
use crate::specfn::{laguerre_product_moment, rational_to_f64, QuadratureRule};

/// Whether the 4D angular volume `2 pi^2` multiplies the radial integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    Bare,
    WithAngular,
}

impl Convention {
    pub fn factor(self) -> f64 {
        match self {
            Convention::Bare => 1.0,
            Convention::WithAngular => ANGULAR_VOLUME_4D,
        }
    }
}

/// Exact `∫ e^{-x} x^{p+1} L_m^{(1)} L_n^{(1)} dx` as an `f64`.
pub fn reduced_moment(m: usize, n: usize, p: usize) -> f64 {
    let v = laguerre_product_moment(m as u32, n as u32, p as u32);
    rational_to_f64(&BigRational::from_integer(v))
}

/// `<m|rho^{2p}|n>` in the bare convention.
pub fn melem_closed(m: usize, n: usize, p: usize, beta: f64) -> f64 {
    if m.abs_diff(n) > p {
        return 0.0;
    }
    let pref = normalization(m, beta) * normalization(n, beta) / (2.0 * beta.powi(p as i32 + 2));
    pref * reduced_moment(m, n, p)
}

/// `<m|rho^{2p}|n>` by direct quadrature of the basis functions.
pub fn melem_quad(m: usize, n: usize, p: usize, beta: f64, rule: &QuadratureRule) -> f64 {
    gaussian_radial_integral(beta, rule, |r| {
        envelope_free(m, beta, r) * envelope_free(n, beta, r) * r.powi(2 * p as i32)
    })
}

/// Quadrature at `order` and `2 * order`; fails if the two disagree by more
/// than `tol` relative to the larger magnitude (or absolutely below 1).
pub fn melem_quad_converged(
    m: usize,
    n: usize,
    p: usize,
    beta: f64,
    order: usize,
    tol: f64,
) -> Result<f64> {
    let coarse = melem_quad(m, n, p, beta, &QuadratureRule::gauss_laguerre(order, 1.0)?);
    let fine = melem_quad(m, n, p, beta, &QuadratureRule::gauss_laguerre(2 * order, 1.0)?);
    let scale = coarse.abs().max(fine.abs()).max(1.0);
    let diff = (fine - coarse).abs();
    if diff > tol * scale {
        return Err(Error::Convergence {
            context: format!("<{m}|rho^{}|{n}> quadrature (order {order} vs {})", 2 * p, 2 * order),
            difference: diff,
            tolerance: tol * scale,
        });
    }
    Ok(fine)
}

/// Table of `<m|rho^{2p}|n>` for `m, n < size`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixElementTable {
    pub p: usize,
    pub beta: f64,
    pub size: usize,
    pub convention: Convention,
    /// Upper triangle `m <= n`, nonzero band only.
    pub entries: BTreeMap<(usize, usize), f64>,
}

impl MatrixElementTable {
    pub fn build(p: usize, beta: f64, size: usize, convention: Convention) -> Self {
        let pairs: Vec<(usize, usize)> = (0..size)
            .flat_map(|m| (m..size.min(m + p + 1)).map(move |n| (m, n)))
            .collect();
        let f = convention.factor();
        let entries = pairs
            .par_iter()
            .map(|&(m, n)| ((m, n), f * melem_closed(m, n, p, beta)))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        Self {
            p,
            beta,
            size,
            convention,
            entries,
        }
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        let key = if m <= n { (m, n) } else { (n, m) };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rule() -> QuadratureRule {
        QuadratureRule::gauss_laguerre(200, 1.0).unwrap()
    }

    #[test]
    fn second_moment_of_ground_state() {
        for &b in &[0.5, 1.0, 3.0] {
            assert_relative_eq!(melem_closed(0, 0, 1, b), 2.0 / b, max_relative = 1e-15);
            assert_relative_eq!(melem_closed(0, 0, 2, b), 6.0 / (b * b), max_relative = 1e-15);
        }
    }

    #[test]
    fn quartic_column() {
        let s2 = 2f64.sqrt();
        assert_relative_eq!(melem_closed(1, 0, 2, 1.0), -6.0 * s2, max_relative = 1e-15);
        assert_relative_eq!(melem_closed(2, 0, 2, 1.0), 2.0 * 3f64.sqrt(), max_relative = 1e-15);
        assert_eq!(melem_closed(3, 0, 2, 1.7), 0.0);
        let r = rule();
        assert_relative_eq!(melem_quad(1, 0, 2, 1.0, &r), -6.0 * s2, max_relative = 1e-10);
        assert_relative_eq!(melem_quad(2, 0, 2, 1.0, &r), 2.0 * 3f64.sqrt(), max_relative = 1e-10);
        assert!(melem_quad(4, 0, 2, 1.0, &r).abs() < 1e-12);
    }

    #[test]
    fn closed_matches_quadrature() {
        let r = rule();
        for p in 1..=4 {
            for m in 0..8 {
                for n in 0..8 {
                    let c = melem_closed(m, n, p, 1.3);
                    let q = melem_quad(m, n, p, 1.3, &r);
                    assert!(
                        (c - q).abs() <= 1e-10 * c.abs().max(1.0),
                        "p={p} ({m},{n}) {c} vs {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn selection_rule_by_quadrature() {
        let r = rule();
        for p in 1..=4 {
            for n in (p + 1)..(p + 6) {
                let v = melem_quad(n, 0, p, 1.0, &r);
                assert!(v.abs() <= 1e-12, "p={p} n={n} v={v}");
            }
        }
    }

    #[test]
    fn beta_scaling() {
        for p in 1..=4 {
            for (m, n) in [(0, 0), (1, 0), (2, 1), (3, 5)] {
                let b = 2.5f64;
                assert_relative_eq!(
                    melem_closed(m, n, p, b),
                    b.powi(-(p as i32)) * melem_closed(m, n, p, 1.0),
                    max_relative = 1e-14,
                    epsilon = 1e-300
                );
            }
        }
    }

    /// Independent route: `rho^{2p}` as the p-th power of the tridiagonal
    /// `rho^2` matrix, whose entries follow from
    /// `x L_n = (2n+2) L_n - (n+1) L_{n-1} - (n+1) L_{n+1}`.
    #[test]
    fn matches_powers_of_rho_squared() {
        let beta = 0.8;
        let size = 20;
        let x2 = |m: usize, n: usize| -> f64 {
            if m == n {
                2.0 * (n as f64 + 1.0) / beta
            } else if m.abs_diff(n) == 1 {
                let k = m.min(n) as f64;
                -((k + 1.0) * (k + 2.0)).sqrt() / beta
            } else {
                0.0
            }
        };
        let mut power: Vec<Vec<f64>> = (0..size)
            .map(|m| (0..size).map(|n| if m == n { 1.0 } else { 0.0 }).collect())
            .collect();
        for p in 1..=4 {
            power = (0..size)
                .map(|m| {
                    (0..size)
                        .map(|n| (0..size).map(|k| power[m][k] * x2(k, n)).sum())
                        .collect()
                })
                .collect();
            for m in 0..(size - p) {
                for n in 0..(size - p) {
                    let c = melem_closed(m, n, p, beta);
                    assert!(
                        (c - power[m][n]).abs() <= 1e-11 * c.abs().max(1.0),
                        "p={p} ({m},{n}) {c} vs {}",
                        power[m][n]
                    );
                }
            }
        }
    }

    #[test]
    fn table_symmetry_and_convention() {
        let bare = MatrixElementTable::build(2, 1.0, 10, Convention::Bare);
        let ang = MatrixElementTable::build(2, 1.0, 10, Convention::WithAngular);
        for m in 0..10 {
            for n in 0..10 {
                assert_eq!(bare.get(m, n), bare.get(n, m));
                assert_relative_eq!(ang.get(m, n), ANGULAR_VOLUME_4D * bare.get(m, n));
            }
        }
        assert_eq!(bare.get(5, 0), 0.0);
    }

    #[test]
    fn convergence_guard() {
        assert!(melem_quad_converged(1, 0, 2, 1.0, 100, 1e-10).is_ok());
        assert!(matches!(
            melem_quad_converged(3, 2, 4, 1.0, 1, 1e-10),
            Err(Error::Convergence { .. })
        ));
    }
}
