//! Gauss rules from the Golub-Welsch eigenproblem, polished by Newton steps
//! on the orthonormal three-term recurrence.
//!
//! Weights come from the Christoffel sum `w_i = 1 / Σ_k p_k(x_i)^2`, evaluated
//! with a running log-scale so high orders near the largest Laguerre nodes
//! neither overflow nor lose the bulk weights.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadratureKind {
    /// Weight `x^alpha e^{-x}` on `[0, ∞)`.
    GaussLaguerre { alpha: f64 },
    /// Weight `e^{-x^2}` on the real line.
    GaussHermite,
    /// Unit weight on `[-1, 1]`.
    GaussLegendre,
    /// Composite trapezoid on a uniform grid.
    Trapezoid,
}

/// Nodes and weights; `integrate(f)` is `Σ w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

struct Recurrence {
    /// Diagonal `a_k`.
    diag: Box<dyn Fn(usize) -> f64>,
    /// Off-diagonal `b_k` coupling `p_{k-1}` and `p_k`, `k >= 1`.
    off: Box<dyn Fn(usize) -> f64>,
    /// Total mass of the weight function.
    mu0: f64,
}

impl Recurrence {
    /// `(p_n, p_n', Σ_{k<n} p_k^2)` scaled by `exp(-log_scale)` (squares by
    /// `exp(-2 log_scale)`), plus `log_scale`.
    fn eval(&self, n: usize, x: f64) -> (f64, f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut d_prev = 0.0;
        let mut p = 1.0 / self.mu0.sqrt();
        let mut d = 0.0;
        let mut sumsq = 0.0;
        let mut log_scale = 0.0;
        for k in 0..n {
            sumsq += p * p;
            let b_next = (self.off)(k + 1);
            let b_k = if k == 0 { 0.0 } else { (self.off)(k) };
            let a = (self.diag)(k);
            let p_next = ((x - a) * p - b_k * p_prev) / b_next;
            let d_next = ((x - a) * d + p - b_k * d_prev) / b_next;
            p_prev = p;
            d_prev = d;
            p = p_next;
            d = d_next;
            let mag = p.abs().max(d.abs());
            if mag > 1e120 {
                let s = mag;
                p /= s;
                d /= s;
                p_prev /= s;
                d_prev /= s;
                sumsq /= s * s;
                log_scale += s.ln();
            }
        }
        (p, d, sumsq, log_scale)
    }
}

fn gauss_from_recurrence(kind: QuadratureKind, order: usize, rec: Recurrence) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: "quadrature order must be at least 1".into(),
        });
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 0..order {
        jacobi[(k, k)] = (rec.diag)(k);
        if k + 1 < order {
            let b = (rec.off)(k + 1);
            jacobi[(k, k + 1)] = b;
            jacobi[(k + 1, k)] = b;
        }
    }
    let eig = SymmetricEigen::try_new(jacobi, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("Jacobi matrix eigensolve did not converge".into()))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        for _ in 0..20 {
            let (p, d, _, _) = rec.eval(order, *x);
            if d == 0.0 || !p.is_finite() || !d.is_finite() {
                break;
            }
            let step = p / d;
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                break;
            }
        }
        let (_, _, sumsq, log_scale) = rec.eval(order, *x);
        weights.push((-2.0 * log_scale - sumsq.ln()).exp());
    }
    Ok(QuadratureRule {
        kind,
        order,
        nodes,
        weights,
    })
}

impl QuadratureRule {
    /// Generalized Gauss-Laguerre, weight `x^alpha e^{-x}`.
    pub fn gauss_laguerre(order: usize, alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("Laguerre weight exponent {alpha} must exceed -1"),
            });
        }
        let rec = Recurrence {
            diag: Box::new(move |k| 2.0 * k as f64 + alpha + 1.0),
            off: Box::new(move |k| (k as f64 * (k as f64 + alpha)).sqrt()),
            mu0: statrs::function::gamma::gamma(alpha + 1.0),
        };
        gauss_from_recurrence(QuadratureKind::GaussLaguerre { alpha }, order, rec)
    }

    /// Gauss-Hermite, weight `e^{-x^2}`.
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        let rec = Recurrence {
            diag: Box::new(|_| 0.0),
            off: Box::new(|k| (k as f64 / 2.0).sqrt()),
            mu0: std::f64::consts::PI.sqrt(),
        };
        let mut rule = gauss_from_recurrence(QuadratureKind::GaussHermite, order, rec)?;
        symmetrize(&mut rule);
        Ok(rule)
    }

    /// Gauss-Legendre on `[-1, 1]`.
    pub fn gauss_legendre(order: usize) -> Result<Self> {
        let rec = Recurrence {
            diag: Box::new(|_| 0.0),
            off: Box::new(|k| {
                let k = k as f64;
                k / (4.0 * k * k - 1.0).sqrt()
            }),
            mu0: 2.0,
        };
        let mut rule = gauss_from_recurrence(QuadratureKind::GaussLegendre, order, rec)?;
        symmetrize(&mut rule);
        Ok(rule)
    }

    /// Gauss-Legendre mapped affinely onto `[a, b]`.
    pub fn gauss_legendre_on(order: usize, a: f64, b: f64) -> Result<Self> {
        let mut rule = Self::gauss_legendre(order)?;
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        for (x, w) in rule.nodes.iter_mut().zip(rule.weights.iter_mut()) {
            *x = mid + half * *x;
            *w *= half;
        }
        Ok(rule)
    }

    /// Composite trapezoid with `points` equally spaced nodes on `[a, b]`.
    pub fn trapezoid(points: usize, a: f64, b: f64) -> Result<Self> {
        if points < 2 || !(b > a) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("trapezoid grid needs >= 2 points on a non-empty interval, got {points} on [{a}, {b}]"),
            });
        }
        let h = (b - a) / (points - 1) as f64;
        let nodes: Vec<f64> = (0..points).map(|i| a + h * i as f64).collect();
        let weights = (0..points)
            .map(|i| if i == 0 || i + 1 == points { 0.5 * h } else { h })
            .collect();
        Ok(Self {
            kind: QuadratureKind::Trapezoid,
            order: points,
            nodes,
            weights,
        })
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn symmetrize(rule: &mut QuadratureRule) {
    let n = rule.nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        let w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        rule.weights[i] = w;
        rule.weights[j] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
}
