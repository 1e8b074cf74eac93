//! Entropy reports at a list of screening values, and the α² slope sweep.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{OutputMode, RunConfig};
use super::report::{write_json, Table, ENTROPY_COLUMNS, KERNEL_COLUMNS};
use crate::entropy::{entropy_series, second_order_slope, EntropyBreakdown};
use crate::error::{Error, Result};
use crate::matelem::{melem_closed, melem_quad_converged};
use crate::oracle::oracle_report;
use crate::params::derive_scales;
use crate::rdm::{check_positivity, expand_in_alpha};

/// Coupling of the quartic oracle written alongside every compute run.
pub const ORACLE_LAMBDA: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComputeOutput {
    pub rows: Vec<EntropyBreakdown>,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<EntropyBreakdown>,
    /// `[S_numeric - S0 - alpha S1] / alpha^2` per row, NaN at `alpha = 0`.
    pub slopes: Vec<f64>,
    pub extrapolated_slope: f64,
    /// `S2_G + S2_NG` in derived mode.
    pub derived_slope: f64,
    pub file: PathBuf,
}

pub(crate) fn prepare_out_dir(cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::Config(format!("output directory {}: {e}", cfg.out_dir.display())))?;
    let probe = cfg.out_dir.join(".yukent-write-probe");
    std::fs::write(&probe, b"")
        .and_then(|_| std::fs::remove_file(&probe))
        .map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", cfg.out_dir.display())))
}

/// Quadrature `<j|rho^4|0>` against the exact rational values.
pub(crate) fn quadrature_cross_check(cfg: &RunConfig) -> Result<f64> {
    let beta = derive_scales(&cfg.params.with_alpha(0.0), false)?.beta;
    let mut worst: f64 = 0.0;
    for j in 0..=3 {
        let quad = melem_quad_converged(j, 0, 2, beta, cfg.quad_order, 1e-10)?;
        let exact = melem_closed(j, 0, 2, beta);
        let diff = (quad - exact).abs();
        if diff > 1e-10 * exact.abs().max(1.0) {
            return Err(Error::Convergence {
                context: format!("<{j}|rho^4|0> quadrature against exact value"),
                difference: diff,
                tolerance: 1e-10 * exact.abs().max(1.0),
            });
        }
        worst = worst.max(diff);
    }
    Ok(worst)
}

fn breakdowns(cfg: &RunConfig) -> Result<Vec<EntropyBreakdown>> {
    let rows: Vec<EntropyBreakdown> = cfg
        .alpha_values
        .par_iter()
        .map(|&a| entropy_series(&cfg.params, a, &cfg.k_grid))
        .collect::<Result<_>>()?;
    Ok(rows)
}

/// One entropy row; columns outside `mode` are NaN.
pub fn entropy_row(b: &EntropyBreakdown, mode: OutputMode) -> Vec<f64> {
    let keep = |on: bool, v: f64| if on { v } else { f64::NAN };
    let a2 = b.alpha * b.alpha;
    let series = if mode.derived() {
        b.s_total_series
    } else {
        b.s0 + b.alpha * b.s1_g + a2 * (b.s2_g_paper + b.s2_ng_paper)
    };
    vec![
        b.alpha,
        b.s0,
        b.s1_g,
        keep(mode.derived(), b.s2_g),
        keep(mode.paper(), b.s2_g_paper),
        keep(mode.derived(), b.s2_ng),
        keep(mode.paper(), b.s2_ng_paper),
        series,
        b.s_numeric,
        b.max_residual,
    ]
}

/// Spectrum pieces on `kernel_points` nodes over `|k| <= half_width sqrt(beta0)`.
pub fn kernel_table(cfg: &RunConfig) -> Result<Table> {
    let e = expand_in_alpha(&cfg.params)?;
    let l = cfg.k_grid.half_width * e.beta0.sqrt();
    let n = cfg.kernel_points;
    let ks: Vec<f64> = (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect();
    let mut t = Table::new(&KERNEL_COLUMNS);
    for &alpha in &cfg.alpha_values {
        check_positivity(&e, alpha, &ks)?;
        let total = e.total(alpha);
        for &k in &ks {
            let [r0, r1, r2g, r2ng] = e.pieces(k);
            t.push(vec![alpha, k, r0, r1, r2g, r2ng, total.eval(k)]);
        }
    }
    Ok(t)
}

/// Writes `entropy.csv`, `kernel.csv` and `oracle.json` into the output directory.
pub fn cmd_compute(cfg: &RunConfig) -> Result<ComputeOutput> {
    cfg.validate()?;
    prepare_out_dir(cfg)?;
    quadrature_cross_check(cfg)?;
    let rows = breakdowns(cfg)?;
    let mut entropy = Table::new(&ENTROPY_COLUMNS);
    for b in &rows {
        entropy.push(entropy_row(b, cfg.mode));
    }
    let entropy_path = cfg.out_dir.join("entropy.csv");
    entropy.write(&entropy_path)?;
    let kernel_path = cfg.out_dir.join("kernel.csv");
    kernel_table(cfg)?.write(&kernel_path)?;
    let oracle = oracle_report(&cfg.params, ORACLE_LAMBDA, cfg.n_max)?;
    let oracle_path = cfg.out_dir.join("oracle.json");
    write_json(&oracle_path, &oracle)?;
    Ok(ComputeOutput {
        rows,
        files: vec![entropy_path, kernel_path, oracle_path],
    })
}

/// Writes `sweep.csv`: the entropy columns, the per-row α² slope and its
/// Richardson limit.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let positive = cfg.alpha_values.iter().filter(|a| **a > 0.0).count();
    if positive < 2 {
        return Err(Error::Config(format!(
            "sweep needs at least two positive alpha values, got {positive}"
        )));
    }
    prepare_out_dir(cfg)?;
    let rows = breakdowns(cfg)?;
    let (_, limit) = second_order_slope(&rows)?;
    let slopes: Vec<f64> = rows
        .iter()
        .map(|r| {
            if r.alpha > 0.0 {
                (r.s_numeric - r.s0 - r.alpha * r.s1_g) / (r.alpha * r.alpha)
            } else {
                f64::NAN
            }
        })
        .collect();
    let mut header: Vec<&str> = ENTROPY_COLUMNS.to_vec();
    header.extend(["slope", "slope_richardson"]);
    let mut t = Table::new(&header);
    for (b, s) in rows.iter().zip(&slopes) {
        let mut row = entropy_row(b, cfg.mode);
        row.extend([*s, limit]);
        t.push(row);
    }
    let file = cfg.out_dir.join("sweep.csv");
    t.write(&file)?;
    Ok(SweepOutput {
        derived_slope: rows[0].s2_g + rows[0].s2_ng,
        rows,
        slopes,
        extrapolated_slope: limit,
        file,
    })
}
