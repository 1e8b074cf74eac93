use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `(j-1)!!` style double factorial; `double_factorial(-1) == 1`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

/// `∫ exp(-k^2/q) k^j dk` over the real line, for even `j`.
///
/// Odd powers are rejected; use [`gaussian_moment_any`] when the caller wants
/// the symmetric zero.
pub fn gaussian_moment(q: f64, j: u32) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("{q} must be positive"),
        });
    }
    if j % 2 == 1 {
        return Err(Error::Domain(format!(
            "odd Gaussian moment j={j} vanishes by symmetry"
        )));
    }
    let half = (j / 2) as i32;
    Ok((PI * q).sqrt() * q.powi(half) * double_factorial(j as i64 - 1) / 2f64.powi(half))
}

/// Like [`gaussian_moment`] but returns `0` for odd powers.
pub fn gaussian_moment_any(q: f64, j: u32) -> Result<f64> {
    if j % 2 == 1 {
        if !(q > 0.0) {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("{q} must be positive"),
            });
        }
        return Ok(0.0);
    }
    gaussian_moment(q, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfn::QuadratureRule;
    use approx::assert_relative_eq;

    #[test]
    fn low_moments() {
        assert_relative_eq!(gaussian_moment(1.0, 0).unwrap(), PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(gaussian_moment(1.0, 2).unwrap(), PI.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(
            gaussian_moment(2.0, 4).unwrap(),
            (2.0 * PI).sqrt() * 3.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn odd_power_paths() {
        assert!(gaussian_moment(1.0, 3).is_err());
        assert_eq!(gaussian_moment_any(1.0, 3).unwrap(), 0.0);
        assert!(gaussian_moment(0.0, 2).is_err());
    }

    #[test]
    fn matches_hermite_quadrature() {
        // ∫ e^{-k^2/q} k^j dk = q^{(j+1)/2} ∫ e^{-t^2} t^j dt
        let rule = QuadratureRule::gauss_hermite(40).unwrap();
        for &q in &[0.3f64, 1.0, 2.0, 7.5] {
            for j in (0..=12).step_by(2) {
                let num = q.powf((j as f64 + 1.0) / 2.0) * rule.integrate(|t| t.powi(j as i32));
                assert_relative_eq!(gaussian_moment(q, j).unwrap(), num, max_relative = 1e-13);
            }
        }
    }
}
