//! Brute-force checks that share no closed forms with the analytic modules:
//! truncated-basis diagonalization, direct quadrature of the partial trace,
//! and finite-difference residuals of the mapped equation.

mod grid_rdm;
mod hamiltonian;
mod residual;

pub use grid_rdm::{rdm_numeric, rdm_numeric_converged, s_grid, GridKernel, RdmGrids};
pub use hamiltonian::{
    build_hamiltonian, ground_state, lowest_energies, symmetric_extraction, GroundState,
    SymmetricExtraction, TruncatedHamiltonian,
};
pub use residual::{mapping_residual, ResidualGrid, ResidualReport};

use serde::{Deserialize, Serialize};

use crate::basis::{eigenfunction, energy};
use crate::error::Result;
use crate::params::{derive_scales, PhysicalParams};
use crate::perturbation::{rs_first_order, PerturbationTerm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeOverlap {
    pub j: usize,
    pub first_order: f64,
    pub raw_ratio: f64,
    pub odd_ratio: f64,
    pub extrapolated_ratio: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub label: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_max: usize,
    pub ground_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub n_max: usize,
    pub lambda: f64,
    pub energies: Vec<f64>,
    pub energy_slope: f64,
    pub energy_slope_expected: f64,
    pub amplitude_overlaps: Vec<AmplitudeOverlap>,
    pub residual_norms: Vec<ResidualEntry>,
    pub convergence_table: Vec<ConvergenceRow>,
}

/// Quartic oracle at coupling `lambda` on the baseline oscillator of `p`.
pub fn oracle_report(p: &PhysicalParams, lambda: f64, n_max: usize) -> Result<OracleReport> {
    let scales = derive_scales(&p.with_alpha(0.0), false)?;
    let term = PerturbationTerm::custom(2, lambda);
    let h = build_hamiltonian(&[term], &scales, n_max)?;
    let energies = lowest_energies(&h, 4)?;
    let gs = ground_state(&h)?;
    let ex = symmetric_extraction(2, lambda, &scales, n_max, 3)?;
    let rs = rs_first_order(&term, &scales, 2)?;
    let amplitude_overlaps = (1..=2)
        .map(|j| {
            let a = rs.amplitudes[j];
            AmplitudeOverlap {
                j,
                first_order: a,
                raw_ratio: ex.raw_ratios[j],
                odd_ratio: ex.odd_ratios[j],
                extrapolated_ratio: ex.first_order_ratios[j],
                relative_error: (ex.first_order_ratios[j] - a).abs() / a.abs(),
            }
        })
        .collect();
    let grid = ResidualGrid::default();
    let beta = scales.beta;
    let mut residual_norms = vec![ResidualEntry {
        label: "eigensolver ||Hv - Ev||".into(),
        value: gs.residual,
    }];
    for n in 0..2 {
        let r = mapping_residual(
            &p.with_alpha(0.0),
            |x| eigenfunction(n, beta, x),
            energy(n, &scales),
            1.0,
            beta,
            &grid,
        )?;
        residual_norms.push(ResidualEntry {
            label: format!("mapping residual phi_{n}"),
            value: r.max_residual,
        });
    }
    let mut convergence_table = Vec::new();
    for n in [n_max / 4, n_max / 2, n_max, 2 * n_max] {
        if n < 4 {
            continue;
        }
        let e = ground_state(&build_hamiltonian(&[term], &scales, n)?)?.energy;
        convergence_table.push(ConvergenceRow {
            n_max: n,
            ground_energy: e,
        });
    }
    Ok(OracleReport {
        n_max,
        lambda,
        energies,
        energy_slope: ex.energy_slope,
        energy_slope_expected: 6.0 / (beta * beta),
        amplitude_overlaps,
        residual_norms,
        convergence_table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_contents() {
        let r = oracle_report(&PhysicalParams::default(), 1e-4, 60).unwrap();
        assert_eq!(r.energies.len(), 4);
        assert!((r.energies[0] - 2.0).abs() < 1e-3);
        assert!(r.amplitude_overlaps.iter().all(|a| a.relative_error < 1e-6));
        assert!(r.residual_norms.iter().all(|e| e.value < 1e-8));
        assert_eq!(r.convergence_table.len(), 4);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("amplitude_overlaps"));
    }
}
