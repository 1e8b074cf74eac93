//! Exact diagonalization of the anharmonic radial Hamiltonian in a truncated
//! oscillator basis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::energy;
use crate::error::{Error, Result};
use crate::matelem::{Convention, MatrixElementTable};
use crate::params::HarmonicScales;
use crate::perturbation::PerturbationTerm;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedHamiltonian {
    pub n_max: usize,
    pub matrix: DMatrix<f64>,
    pub terms: Vec<PerturbationTerm>,
    pub scales: HarmonicScales,
}

impl TruncatedHamiltonian {
    /// Largest `|H_mn - H_nm|`.
    pub fn asymmetry(&self) -> f64 {
        let m = &self.matrix;
        (&m.transpose() - m).amax()
    }
}

/// `H_mn = E_m delta_mn + Σ_terms lambda <m|rho^{2p}|n>` on states `0..n_max`.
pub fn build_hamiltonian(
    terms: &[PerturbationTerm],
    scales: &HarmonicScales,
    n_max: usize,
) -> Result<TruncatedHamiltonian> {
    if terms.iter().any(|t| t.is_harmonic()) {
        return Err(Error::HarmonicTerm);
    }
    let top = terms.iter().map(|t| t.power).max().unwrap_or(0);
    if n_max < 2 + top {
        return Err(Error::Truncation {
            n_max,
            power: 2 * top,
            required: 2 + top,
        });
    }
    if 2 * top >= n_max {
        log::warn!("basis of {n_max} states is small for rho^{}", 2 * top);
    }
    let mut matrix = DMatrix::<f64>::zeros(n_max, n_max);
    for n in 0..n_max {
        matrix[(n, n)] = energy(n, scales);
    }
    for term in terms {
        let table = MatrixElementTable::build(term.power, scales.beta, n_max, Convention::Bare);
        for (&(m, n), &v) in &table.entries {
            matrix[(m, n)] += term.lambda * v;
            if m != n {
                matrix[(n, m)] += term.lambda * v;
            }
        }
    }
    Ok(TruncatedHamiltonian {
        n_max,
        matrix,
        terms: terms.to_vec(),
        scales: *scales,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub energy: f64,
    /// Basis amplitudes, `amplitudes[0] > 0`.
    pub amplitudes: Vec<f64>,
    /// `||H v - E v||`.
    pub residual: f64,
}

impl GroundState {
    /// `v_j / v_0`.
    pub fn overlap_ratio(&self, j: usize) -> f64 {
        self.amplitudes[j] / self.amplitudes[0]
    }
}

fn eigen(h: &TruncatedHamiltonian) -> Result<(Vec<usize>, SymmetricEigen<f64, nalgebra::Dyn>)> {
    let eig = SymmetricEigen::try_new(h.matrix.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen("dense symmetric eigensolve did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    Ok((order, eig))
}

/// Lowest eigenpair, sign-fixed so the `phi_0` component is positive.
pub fn ground_state(h: &TruncatedHamiltonian) -> Result<GroundState> {
    let (order, eig) = eigen(h)?;
    let idx = order[0];
    let energy = eig.eigenvalues[idx];
    let mut v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    if v[0] < 0.0 {
        v.neg_mut();
    }
    let residual = (&h.matrix * &v - &v * energy).norm();
    Ok(GroundState {
        energy,
        amplitudes: v.iter().copied().collect(),
        residual,
    })
}

/// The `count` lowest eigenvalues in ascending order.
pub fn lowest_energies(h: &TruncatedHamiltonian, count: usize) -> Result<Vec<f64>> {
    let (order, eig) = eigen(h)?;
    Ok(order.iter().take(count).map(|&i| eig.eigenvalues[i]).collect())
}

/// First-order amplitudes and energy slope extracted from exact ground states.
///
/// The odd part in `lambda` of the overlap ratio `v_j / v_0` is
/// `lambda A + lambda^3 C + ...`, and `(E(lambda) - E(-lambda)) / (2 lambda)` is
/// `E1 + lambda^2 E3 + ...`. Repeating at `lambda / 2` and combining removes
/// the `lambda^2` relative term; the plain ratio is kept for reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricExtraction {
    pub lambda: f64,
    pub n_max: usize,
    /// `v_j / v_0` at `+lambda`.
    pub raw_ratios: Vec<f64>,
    /// `[r_j(lambda) - r_j(-lambda)] / 2`.
    pub odd_ratios: Vec<f64>,
    /// `(8 o_j(lambda/2) - o_j(lambda)) / 3`, the first-order amplitude at `lambda`.
    pub first_order_ratios: Vec<f64>,
    /// `(E(lambda) - E(-lambda)) / (2 lambda)`.
    pub energy_slope_plain: f64,
    /// Slope with the `lambda^2` term removed.
    pub energy_slope: f64,
    pub residual: f64,
}

pub fn symmetric_extraction(
    power: usize,
    lambda: f64,
    scales: &HarmonicScales,
    n_max: usize,
    keep: usize,
) -> Result<SymmetricExtraction> {
    let solve = |l: f64| -> Result<GroundState> {
        ground_state(&build_hamiltonian(&[PerturbationTerm::custom(power, l)], scales, n_max)?)
    };
    let keep = keep.min(n_max);
    let odd = |l: f64| -> Result<(Vec<f64>, f64, Vec<f64>, f64)> {
        let plus = solve(l)?;
        let minus = solve(-l)?;
        let o = (0..keep)
            .map(|j| 0.5 * (plus.overlap_ratio(j) - minus.overlap_ratio(j)))
            .collect();
        let raw = (0..keep).map(|j| plus.overlap_ratio(j)).collect();
        let slope = (plus.energy - minus.energy) / (2.0 * l);
        Ok((o, slope, raw, plus.residual.max(minus.residual)))
    };
    let (o1, s1, raw_ratios, r1) = odd(lambda)?;
    let (o2, s2, _, r2) = odd(0.5 * lambda)?;
    let first_order_ratios = o1.iter().zip(&o2).map(|(a, b)| (8.0 * b - a) / 3.0).collect();
    Ok(SymmetricExtraction {
        lambda,
        n_max,
        raw_ratios,
        odd_ratios: o1,
        first_order_ratios,
        energy_slope_plain: s1,
        energy_slope: (4.0 * s2 - s1) / 3.0,
        residual: r1.max(r2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matelem::melem_closed;
    use crate::perturbation::rs_first_order;
    use approx::assert_relative_eq;

    fn unit() -> HarmonicScales {
        HarmonicScales::unit(1.0)
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let h = build_hamiltonian(&[], &unit(), 8).unwrap();
        for m in 0..8 {
            for n in 0..8 {
                let e = if m == n { 2.0 * m as f64 + 2.0 } else { 0.0 };
                assert_eq!(h.matrix[(m, n)], e);
            }
        }
        let g = ground_state(&h).unwrap();
        assert_eq!(g.energy, 2.0);
        assert_eq!(g.amplitudes[0], 1.0);
        assert!(g.amplitudes[1..].iter().all(|a| *a == 0.0));
    }

    #[test]
    fn quartic_entries_and_symmetry() {
        let lam = 0.01;
        let h = build_hamiltonian(&[PerturbationTerm::custom(2, lam)], &unit(), 30).unwrap();
        assert_relative_eq!(h.matrix[(1, 0)], lam * melem_closed(1, 0, 2, 1.0));
        assert_relative_eq!(h.matrix[(2, 0)], lam * melem_closed(2, 0, 2, 1.0));
        assert_eq!(h.matrix[(3, 0)], 0.0);
        assert!(h.asymmetry() <= 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            build_hamiltonian(&[PerturbationTerm::custom(1, 0.1)], &unit(), 10),
            Err(Error::HarmonicTerm)
        );
        assert!(matches!(
            build_hamiltonian(&[PerturbationTerm::custom(3, 0.1)], &unit(), 4),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn amplitudes_match_first_order() {
        let lam = 1e-4;
        let rs = rs_first_order(&PerturbationTerm::custom(2, lam), &unit(), 2).unwrap();
        let ex = symmetric_extraction(2, lam, &unit(), 60, 4).unwrap();
        for j in 1..=2 {
            let rel = (ex.first_order_ratios[j] - rs.amplitudes[j]).abs() / rs.amplitudes[j].abs();
            assert!(rel < 1e-6, "j={j} rel={rel}");
            let raw = (ex.raw_ratios[j] - rs.amplitudes[j]).abs() / rs.amplitudes[j].abs();
            assert!(raw > 1e-5, "plain ratio carries the O(lambda) term: {raw}");
        }
        assert_relative_eq!(ex.energy_slope, 6.0, max_relative = 1e-6);
        assert!(ex.residual < 1e-12);
    }

    #[test]
    fn converged_in_basis_size() {
        let t = [PerturbationTerm::custom(2, 1e-3)];
        let e40 = ground_state(&build_hamiltonian(&t, &unit(), 40).unwrap()).unwrap().energy;
        let e80 = ground_state(&build_hamiltonian(&t, &unit(), 80).unwrap()).unwrap().energy;
        assert!((e40 - e80).abs() < 1e-10);
    }

    #[test]
    fn variational_in_basis_size() {
        let t = [PerturbationTerm::custom(2, 0.05)];
        let mut last = f64::INFINITY;
        for n in [4, 6, 10, 20, 40] {
            let e = ground_state(&build_hamiltonian(&t, &unit(), n).unwrap()).unwrap().energy;
            // Eigenvalues are accurate to a few ulps of ||H||.
            assert!(e <= last + 1e-12, "n={n}: {e} > {last}");
            last = e;
        }
    }

    #[test]
    fn spectrum_ordering() {
        let h = build_hamiltonian(&[PerturbationTerm::custom(2, 1e-3)], &unit(), 20).unwrap();
        let e = lowest_energies(&h, 4).unwrap();
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(e[0], ground_state(&h).unwrap().energy);
    }
}
