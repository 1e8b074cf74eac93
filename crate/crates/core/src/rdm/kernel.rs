//! Even Gaussian-polynomial functions `exp(-q u^2) Σ_i p_i u^{2i}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfn::gaussian_moment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variable {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussPolyKernel {
    /// `q` in `exp(-q u^2)`.
    pub width_coeff: f64,
    /// `poly[i]` multiplies `u^{2i}`.
    pub poly: Vec<f64>,
    pub variable: Variable,
}

impl GaussPolyKernel {
    pub fn new(width_coeff: f64, poly: Vec<f64>, variable: Variable) -> Result<Self> {
        if !(width_coeff > 0.0) || !width_coeff.is_finite() {
            return Err(Error::InvalidParameter {
                name: "width_coeff",
                reason: format!("Gaussian coefficient {width_coeff} must be positive"),
            });
        }
        Ok(Self {
            width_coeff,
            poly,
            variable,
        })
    }

    pub fn zero(width_coeff: f64, variable: Variable) -> Self {
        Self {
            width_coeff,
            poly: vec![0.0],
            variable,
        }
    }

    pub fn degree(&self) -> usize {
        2 * self.poly.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let u2 = u * u;
        let p = self.poly.iter().rev().fold(0.0, |acc, c| acc * u2 + c);
        (-self.width_coeff * u2).exp() * p
    }

    /// `∫ u^{2j} K(u) du` over the real line.
    pub fn moment(&self, j: usize) -> f64 {
        let q = 1.0 / self.width_coeff;
        self.poly
            .iter()
            .enumerate()
            .map(|(i, c)| c * gaussian_moment(q, 2 * (i + j) as u32).expect("even power"))
            .sum()
    }

    pub fn integral(&self) -> f64 {
        self.moment(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            poly: self.poly.iter().map(|c| c * s).collect(),
            ..self.clone()
        }
    }

    /// Sum with a kernel of identical width and variable.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.variable != other.variable
            || (self.width_coeff - other.width_coeff).abs() > 1e-15 * self.width_coeff
        {
            return Err(Error::Domain(format!(
                "cannot add kernels with widths {} and {}",
                self.width_coeff, other.width_coeff
            )));
        }
        let n = self.poly.len().max(other.poly.len());
        let poly = (0..n)
            .map(|i| self.poly.get(i).unwrap_or(&0.0) + other.poly.get(i).unwrap_or(&0.0))
            .collect();
        Ok(Self {
            poly,
            ..self.clone()
        })
    }

    /// Multiplies the polynomial part by `Σ_i m_i u^{2i}`.
    pub fn mul_poly(&self, m: &[f64]) -> Self {
        let mut poly = vec![0.0; self.poly.len() + m.len().max(1) - 1];
        for (i, a) in self.poly.iter().enumerate() {
            for (j, b) in m.iter().enumerate() {
                poly[i + j] += a * b;
            }
        }
        Self {
            poly,
            ..self.clone()
        }
    }

    /// Rescales to unit integral.
    pub fn normalized(&self) -> Result<Self> {
        let z = self.integral();
        if !(z.abs() > 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("kernel integral {z} cannot be normalized")));
        }
        Ok(self.scaled(1.0 / z))
    }

    /// `∫ K(s) e^{-iks} ds`, as a momentum kernel.
    pub fn fourier(&self) -> Self {
        let mut out = transform(self.width_coeff, &self.poly);
        out.variable = match self.variable {
            Variable::Position => Variable::Momentum,
            Variable::Momentum => Variable::Position,
        };
        out
    }

    /// `(1 / 2 pi) ∫ K(k) e^{iks} dk`.
    pub fn inverse_fourier(&self) -> Self {
        self.fourier().scaled(0.5 / PI)
    }
}

/// `∫ exp(-q s^2) s^{2i} e^{-iks} ds = sqrt(pi/q) (-1)^i d^{2i}/dk^{2i} exp(-k^2/(4q))`.
fn transform(q: f64, poly: &[f64]) -> GaussPolyKernel {
    let b = 0.25 / q;
    let pref = (PI / q).sqrt();
    let top = poly.len().saturating_sub(1);
    let mut out = vec![0.0; top + 1];
    // d^n/dk^n of exp(-b k^2) is D^n(1) exp(-b k^2) with D(P) = P' - 2 b k P.
    let mut deriv: Vec<f64> = vec![1.0];
    for (i, &c) in poly.iter().enumerate() {
        if i > 0 {
            deriv = step(&step(&deriv, b), b);
        }
        if c == 0.0 {
            continue;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        for (power, d) in deriv.iter().enumerate().step_by(2) {
            out[power / 2] += sign * pref * c * d;
        }
    }
    GaussPolyKernel {
        width_coeff: b,
        poly: out,
        variable: Variable::Momentum,
    }
}

/// `P' - 2 b k P` on dense coefficients in `k`.
fn step(p: &[f64], b: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (n, &c) in p.iter().enumerate() {
        if n > 0 {
            out[n - 1] += n as f64 * c;
        }
        out[n + 1] -= 2.0 * b * c;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfn::QuadratureRule;
    use approx::assert_relative_eq;

    fn pos(q: f64, poly: Vec<f64>) -> GaussPolyKernel {
        GaussPolyKernel::new(q, poly, Variable::Position).unwrap()
    }

    #[test]
    fn gaussian_maps_to_normalized_gaussian() {
        for &beta in &[0.5, 1.0, 3.0] {
            let k = pos(beta / 4.0, vec![1.0]).fourier().normalized().unwrap();
            assert_relative_eq!(k.width_coeff, 1.0 / beta, max_relative = 1e-15);
            assert_relative_eq!(k.poly[0], 1.0 / (PI * beta).sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn low_powers() {
        let beta = 1.7;
        let t2 = pos(beta / 4.0, vec![0.0, 1.0]).fourier();
        let t4 = pos(beta / 4.0, vec![0.0, 0.0, 1.0]).fourier();
        let g = (4.0 * PI / beta).sqrt();
        assert_relative_eq!(t2.poly[0], g * 2.0 / beta, max_relative = 1e-14);
        assert_relative_eq!(t2.poly[1], -g * 4.0 / beta.powi(2), max_relative = 1e-14);
        assert_relative_eq!(t4.poly[0], g * 12.0 / beta.powi(2), max_relative = 1e-14);
        assert_relative_eq!(t4.poly[1], -g * 48.0 / beta.powi(3), max_relative = 1e-14);
        assert_relative_eq!(t4.poly[2], g * 16.0 / beta.powi(4), max_relative = 1e-14);
    }

    #[test]
    fn round_trip() {
        let k = pos(0.3, vec![1.2, -0.4, 0.07, 0.01]);
        let back = k.fourier().inverse_fourier();
        assert_eq!(back.variable, Variable::Position);
        assert_relative_eq!(back.width_coeff, 0.3, max_relative = 1e-15);
        for (a, b) in k.poly.iter().zip(&back.poly) {
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn transform_matches_direct_quadrature() {
        let k = pos(0.25, vec![2.0, 0.5, -0.1]);
        let ft = k.fourier();
        let rule = QuadratureRule::trapezoid(4001, -40.0, 40.0).unwrap();
        for &kk in &[0.0, 0.4, 1.3, 2.9] {
            let direct = rule.integrate(|s| k.eval(s) * (kk * s).cos());
            assert!((direct - ft.eval(kk)).abs() < 1e-10, "k={kk}");
        }
    }

    #[test]
    fn integral_equals_two_pi_at_origin() {
        let k = pos(0.4, vec![1.0, 0.3, 0.02]);
        assert_relative_eq!(k.fourier().integral(), 2.0 * PI * k.eval(0.0), max_relative = 1e-13);
    }

    #[test]
    fn moments_by_quadrature() {
        let k = GaussPolyKernel::new(1.0, vec![1.0, -2.0, 0.5], Variable::Momentum).unwrap();
        let rule = QuadratureRule::gauss_hermite(60).unwrap();
        for j in 0..3 {
            let q = rule.integrate(|u| {
                let u2 = u * u;
                u2.powi(j as i32) * (1.0 - 2.0 * u2 + 0.5 * u2 * u2)
            });
            assert_relative_eq!(k.moment(j), q, max_relative = 1e-13);
        }
    }

    #[test]
    fn algebra() {
        let a = pos(1.0, vec![1.0, 2.0]);
        let b = pos(1.0, vec![0.5]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.poly, vec![1.5, 2.0]);
        assert!(a.add(&pos(2.0, vec![1.0])).is_err());
        let m = a.mul_poly(&[1.0, -1.0]);
        assert_eq!(m.poly, vec![1.0, 1.0, -2.0]);
        assert_eq!(m.degree(), 4);
        assert!(GaussPolyKernel::new(0.0, vec![1.0], Variable::Position).is_err());
    }
}
