//! The four-dimensional radial oscillator basis in the `l = 0` sector.
//!
//! Eigenfunctions are the full radial functions
//! `phi_n(rho) = N_n exp(-beta rho^2 / 2) L_n^{(1)}(beta rho^2)` with
//! `N_n = sqrt(2 beta^2 n! / (n+1)!)`, orthonormal under `∫ f g rho^3 drho`.
//! The 4D angular volume `2 pi^2` is kept out of the inner product and carried
//! separately as [`ANGULAR_VOLUME_4D`].
//!
//! The reduced form `u_n = rho^{3/2} phi_n` is what the operator
//! `-(hbar^2 / 2 mu)(d^2/drho^2 - 3 / (4 rho^2)) + (mu omega0^2 / 2) rho^2`
//! acts on; on `phi_n` itself the same operator reads
//! `-(hbar^2 / 2 mu)(d^2/drho^2 + (3/rho) d/drho) + (mu omega0^2 / 2) rho^2`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::HarmonicScales;
use crate::specfn::{laguerre_eval, QuadratureRule};

/// Surface volume of the unit 3-sphere, `2 pi^2`.
pub const ANGULAR_VOLUME_4D: f64 = 2.0 * PI * PI;

/// Normalization `N_n = sqrt(2 beta^2 n! / (n+1)!) = beta sqrt(2 / (n+1))`.
pub fn normalization(n: usize, beta: f64) -> f64 {
    beta * (2.0 / (n as f64 + 1.0)).sqrt()
}

/// `phi_n(rho)`; even in `rho`.
pub fn eigenfunction(n: usize, beta: f64, rho: f64) -> f64 {
    let x = beta * rho * rho;
    normalization(n, beta) * (-0.5 * x).exp() * laguerre_eval(n as u32, 1, x)
}

/// `phi_n` with the Gaussian envelope removed: `N_n L_n^{(1)}(beta rho^2)`.
pub fn envelope_free(n: usize, beta: f64, rho: f64) -> f64 {
    normalization(n, beta) * laguerre_eval(n as u32, 1, beta * rho * rho)
}

/// Reduced radial function `u_n = rho^{3/2} phi_n`, orthonormal under `drho`.
pub fn reduced_eigenfunction(n: usize, beta: f64, rho: f64) -> f64 {
    rho.abs().powf(1.5) * eigenfunction(n, beta, rho)
}

/// `E_n = hbar omega0 (2n + 2)`.
pub fn energy(n: usize, scales: &HarmonicScales) -> f64 {
    scales.hbar_omega() * (2.0 * n as f64 + 2.0)
}

/// `∫_0^∞ exp(-beta rho^2) F(rho) rho^3 drho` by Gauss-Laguerre (`alpha = 1`)
/// in `x = beta rho^2`. `F` must not contain the Gaussian envelope.
pub fn gaussian_radial_integral<F: Fn(f64) -> f64>(beta: f64, rule: &QuadratureRule, f: F) -> f64 {
    let pref = 1.0 / (2.0 * beta * beta);
    pref * rule.integrate(|x| f((x / beta).sqrt()))
}

/// A truncated radial basis at fixed width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBasis {
    pub scales: HarmonicScales,
    pub n_max: usize,
}

impl RadialBasis {
    pub fn new(scales: HarmonicScales, n_max: usize) -> Self {
        Self { scales, n_max }
    }

    pub fn beta(&self) -> f64 {
        self.scales.beta
    }

    pub fn eval(&self, n: usize, rho: f64) -> f64 {
        eigenfunction(n, self.scales.beta, rho)
    }

    pub fn energy(&self, n: usize) -> f64 {
        energy(n, &self.scales)
    }

    /// Gram matrix of the first `n_max` functions, by quadrature.
    pub fn gram_matrix(&self, rule: &QuadratureRule) -> Vec<Vec<f64>> {
        let beta = self.scales.beta;
        (0..self.n_max)
            .map(|m| {
                (0..self.n_max)
                    .map(|n| {
                        gaussian_radial_integral(beta, rule, |r| {
                            envelope_free(m, beta, r) * envelope_free(n, beta, r)
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// `<phi_m|H0|phi_n>` with `H0` applied by 5-point finite differences on a
    /// midpoint grid of `points` cells over `[0, 12/sqrt(beta)]`; the integral
    /// is the midpoint rule against `rho^3`.
    pub fn h0_matrix_fd(&self, points: usize) -> Vec<Vec<f64>> {
        let beta = self.scales.beta;
        let length = 12.0 / beta.sqrt();
        let h = length / points as f64;
        let grid: Vec<f64> = (0..points).map(|i| (i as f64 + 0.5) * h).collect();
        let applied: Vec<Vec<f64>> = (0..self.n_max)
            .map(|n| {
                let f = |r: f64| eigenfunction(n, beta, r);
                grid.iter()
                    .map(|&r| apply_h0_fd(&f, r, h, &self.scales))
                    .collect()
            })
            .collect();
        (0..self.n_max)
            .map(|m| {
                (0..self.n_max)
                    .map(|n| {
                        grid.iter()
                            .zip(&applied[n])
                            .map(|(&r, &hv)| eigenfunction(m, beta, r) * hv * r.powi(3))
                            .sum::<f64>()
                            * h
                    })
                    .collect()
            })
            .collect()
    }
}

/// First and second derivatives by centered 5-point stencils.
pub fn fd_derivatives<F: Fn(f64) -> f64 + ?Sized>(f: &F, x: f64, h: f64) -> (f64, f64) {
    let fm2 = f(x - 2.0 * h);
    let fm1 = f(x - h);
    let f0 = f(x);
    let fp1 = f(x + h);
    let fp2 = f(x + 2.0 * h);
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    (d1, d2)
}

/// `H0 phi` at `rho` for an even radial function `phi`, using
/// `-(hbar^2/2mu)(phi'' + 3 phi'/rho) + (mu omega0^2/2) rho^2 phi`.
pub fn apply_h0_fd<F: Fn(f64) -> f64 + ?Sized>(
    phi: &F,
    rho: f64,
    h: f64,
    scales: &HarmonicScales,
) -> f64 {
    let (d1, d2) = fd_derivatives(phi, rho, h);
    let kinetic = -scales.hbar * scales.hbar / (2.0 * scales.mu) * (d2 + 3.0 * d1 / rho);
    let potential = 0.5 * scales.mu * scales.omega0 * scales.omega0 * rho * rho * phi(rho);
    kinetic + potential
}

/// Bookkeeping between the relative coordinate `x`, the radial variable
/// `rho` (`x = rho^2`) and the wavefunction factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingRecord {
    /// Overall normalization `A` in `f = A sqrt(rho) phi`.
    pub amplitude: f64,
    /// `alpha * m`, the screening inverse length.
    pub screening: f64,
}

impl MappingRecord {
    pub fn x_of_rho(rho: f64) -> f64 {
        rho * rho
    }

    pub fn rho_of_x(x: f64) -> Result<f64> {
        if x < 0.0 {
            return Err(Error::Domain(format!("x = {x} must be non-negative")));
        }
        Ok(x.sqrt())
    }

    /// `f(rho) = A sqrt(rho) phi(rho)`.
    pub fn f_of_phi(&self, rho: f64, phi_value: f64) -> f64 {
        self.amplitude * rho.sqrt() * phi_value
    }

    /// `h(rho) = A sqrt(rho) exp(-alpha m rho^2)`.
    pub fn h_of_rho(&self, rho: f64) -> f64 {
        self.amplitude * rho.sqrt() * (-self.screening * rho * rho).exp()
    }
}

/// `f(x) = A x^{1/4} phi(sqrt(x))`, the relative-coordinate wavefunction.
pub fn map_back_to_x<F>(phi: F, amplitude: f64) -> impl Fn(f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    move |x: f64| {
        let rho = MappingRecord::rho_of_x(x)?;
        Ok(amplitude * x.powf(0.25) * phi(rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rule() -> QuadratureRule {
        QuadratureRule::gauss_laguerre(80, 1.0).unwrap()
    }

    #[test]
    fn ground_state_at_origin() {
        assert_relative_eq!(eigenfunction(0, 1.0, 0.0), 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(eigenfunction(0, 3.0, 0.0), 3.0 * 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn energies() {
        let s = HarmonicScales::unit(1.0);
        assert_eq!(energy(0, &s), 2.0);
        assert_eq!(energy(1, &s) - energy(0, &s), 2.0);
        assert_eq!(energy(2, &s) - energy(0, &s), 4.0);
        let s2 = HarmonicScales::unit(2.0);
        assert_eq!(energy(5, &s2), 24.0);
    }

    #[test]
    fn low_overlaps() {
        for &beta in &[0.5, 1.0, 2.7] {
            let r = rule();
            let n00 = gaussian_radial_integral(beta, &r, |x| envelope_free(0, beta, x).powi(2));
            let n01 = gaussian_radial_integral(beta, &r, |x| {
                envelope_free(0, beta, x) * envelope_free(1, beta, x)
            });
            assert_relative_eq!(n00, 1.0, epsilon = 1e-13);
            assert!(n01.abs() < 1e-13);
        }
    }

    #[test]
    fn gram_is_identity() {
        let basis = RadialBasis::new(HarmonicScales::unit(1.3), 10);
        let g = basis.gram_matrix(&rule());
        for (m, row) in g.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let e = if m == n { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-10, "({m},{n}) = {v}");
            }
        }
    }

    #[test]
    fn reduced_form_has_flat_measure() {
        // ∫ u_0^2 drho = 1 by a plain trapezoid.
        let beta = 1.0;
        let q = QuadratureRule::trapezoid(4001, 0.0, 12.0).unwrap();
        let v = q.integrate(|r| reduced_eigenfunction(0, beta, r).powi(2));
        assert_relative_eq!(v, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn h0_diagonal_by_finite_differences() {
        let scales = HarmonicScales::unit(1.0);
        let basis = RadialBasis::new(scales, 6);
        let h = basis.h0_matrix_fd(12000);
        for (m, row) in h.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                let e = if m == n { energy(n, &scales) } else { 0.0 };
                assert!((v - e).abs() < 1e-8, "({m},{n}) = {v}");
            }
        }
    }

    #[test]
    fn map_back_behaviour() {
        let f = map_back_to_x(|r| eigenfunction(0, 1.0, r), 2.0);
        assert_relative_eq!(f(1.0).unwrap(), 2.0 * eigenfunction(0, 1.0, 1.0), epsilon = 1e-15);
        assert!(f(-0.1).is_err());
        // f(x) / x^{1/4} stays finite near the origin.
        let small = f(1e-12).unwrap() / 1e-3;
        assert_relative_eq!(small, 2.0 * 2f64.sqrt(), max_relative = 1e-9);
        let rec = MappingRecord {
            amplitude: 1.5,
            screening: 0.0,
        };
        assert_relative_eq!(rec.h_of_rho(4.0), 3.0, epsilon = 1e-15);
        assert_relative_eq!(MappingRecord::rho_of_x(MappingRecord::x_of_rho(1.7)).unwrap(), 1.7);
    }
}
