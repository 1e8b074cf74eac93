//! Configuration, report files and the three run commands.

mod compute;
mod config;
mod report;
mod verify;

pub use compute::{cmd_compute, cmd_sweep, entropy_row, kernel_table, ComputeOutput, SweepOutput, ORACLE_LAMBDA};
pub use config::{parse_alpha_list, OutputMode, RunConfig};
pub use report::{fmt_float, write_json, Table, ENTROPY_COLUMNS, KERNEL_COLUMNS};
pub use verify::{cmd_verify, discrepancy_ledger, Check, LedgerEntry, VerifyReport, LEDGER_ALPHA, SLOPE_ALPHAS};

use crate::error::Error;

impl Error {
    /// Process exit code: 1 for configuration and I/O problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::InvalidParameter { .. } => 1,
            _ => 2,
        }
    }
}
