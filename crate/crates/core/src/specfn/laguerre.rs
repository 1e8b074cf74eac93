//! Associated Laguerre polynomials with exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Very large numerator/denominator: scale down by bit length first.
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `L_n^{(k)}(x)` stored as exact coefficients of `x^i`, lowest power first.
#[derive(Debug, Clone, PartialEq)]
pub struct LaguerrePoly {
    pub n: u32,
    pub k: u32,
    pub coefficients: Vec<BigRational>,
}

impl LaguerrePoly {
    /// Explicit sum `L_n^{(k)}(x) = Σ_i (-1)^i C(n+k, n-i) x^i / i!`.
    pub fn new(n: u32, k: u32) -> Self {
        let coefficients = (0..=n as u64)
            .map(|i| {
                let num = binomial(n as u64 + k as u64, n as u64 - i);
                let num = if i % 2 == 1 { -num } else { num };
                BigRational::new(num, factorial(i))
            })
            .collect();
        Self { n, k, coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading_coefficient(&self) -> &BigRational {
        self.coefficients.last().expect("non-empty")
    }

    /// Horner evaluation in floating point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }
}

/// `L_n^{(k)}(x)` by the three-term recurrence
/// `(j+1) L_{j+1} = (2j+1+k-x) L_j - (j+k) L_{j-1}`.
pub fn laguerre_eval(n: u32, k: u32, x: f64) -> f64 {
    let kf = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + kf - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + kf - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `∫_0^∞ e^{-x} x^{p+1} L_n^{(1)}(x) dx`, exactly.
///
/// Vanishes for `n > p` because `x^p` has degree below `n` and the weight
/// `x e^{-x}` makes `L_n^{(1)}` orthogonal to it.
pub fn laguerre_moment(n: u32, p: u32) -> BigRational {
    let poly = LaguerrePoly::new(n, 1);
    poly.coefficients
        .iter()
        .enumerate()
        .fold(BigRational::zero(), |acc, (i, c)| {
            acc + c * BigRational::from_integer(factorial(p as u64 + 1 + i as u64))
        })
}

/// `∫_0^∞ e^{-x} x^{p+1} L_m^{(1)}(x) L_n^{(1)}(x) dx`, exactly.
///
/// Every term `(p+1+i+j)! / (i! j!)` is an integer, so the sum is carried out
/// in big integers.
pub fn laguerre_product_moment(m: u32, n: u32, p: u32) -> BigInt {
    // Zero outside the band |m - n| <= p.
    if m.abs_diff(n) > p {
        return BigInt::zero();
    }
    let (m, n) = (m as u64, n as u64);
    let p = p as u64;
    let fact: Vec<BigInt> = {
        let top = p + 1 + m + n;
        let mut v = Vec::with_capacity(top as usize + 1);
        v.push(BigInt::one());
        for k in 1..=top {
            let next = v.last().unwrap() * BigInt::from(k);
            v.push(next);
        }
        v
    };
    let cm: Vec<BigInt> = (0..=m).map(|i| binomial(m + 1, m - i)).collect();
    let cn: Vec<BigInt> = (0..=n).map(|j| binomial(n + 1, n - j)).collect();
    let mut total = BigInt::zero();
    for i in 0..=m {
        for j in 0..=n {
            let t = &fact[(p + 1 + i + j) as usize] / (&fact[i as usize] * &fact[j as usize]);
            let t = &cm[i as usize] * &cn[j as usize] * t;
            if (i + j) % 2 == 1 {
                total -= t;
            } else {
                total += t;
            }
        }
    }
    total
}
