use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use yukent_core::run::{cmd_compute, cmd_sweep, cmd_verify, parse_alpha_list, OutputMode, RunConfig};
use yukent_core::Error;

/// Entanglement entropy of a screened two-body system, order by order in the
/// screening parameter.
///
/// Without `--verify` or `--sweep`, writes entropy.csv, kernel.csv and
/// oracle.json for each alpha.
#[derive(Debug, Parser)]
#[command(name = "yukent", version, group(ArgGroup::new("command").args(["verify", "sweep"])))]
struct Cli {
    /// key = value file; B_r, g and m are required when given.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Comma-separated screening values, e.g. 0,0.01,0.02.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    alpha: Option<String>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Which entropy columns to populate.
    #[arg(long, value_name = "MODE", value_parser = ["paper", "derived", "both"])]
    mode: Option<String>,

    /// Basis size for the truncated-Hamiltonian oracle.
    #[arg(long, value_name = "N")]
    nmax: Option<usize>,

    /// Run the invariant suite and the printed-vs-derived ledger.
    #[arg(long)]
    verify: bool,

    /// Per-alpha rows plus the Richardson alpha^2 slope.
    #[arg(long)]
    sweep: bool,
}

fn config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(list) = &cli.alpha {
        cfg.alpha_values = parse_alpha_list(list)?;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(mode) = &cli.mode {
        cfg.mode = OutputMode::parse(mode)?;
    }
    if let Some(n) = cli.nmax {
        cfg.n_max = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn init_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("YUKENT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::Config(format!("YUKENT_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<u8, Error> {
    init_threads()?;
    let cfg = config(cli)?;
    if cli.verify {
        let report = cmd_verify(&cfg)?;
        print!("{}", report.summary());
        println!("report: {}", cfg.out_dir.join("verify.json").display());
        return Ok(if report.passed { 0 } else { 3 });
    }
    if cli.sweep {
        let out = cmd_sweep(&cfg)?;
        println!(
            "alpha^2 slope: extrapolated {:.10e}, S2_G + S2_NG {:.10e}",
            out.extrapolated_slope, out.derived_slope
        );
        println!("wrote {}", out.file.display());
        return Ok(0);
    }
    let out = cmd_compute(&cfg)?;
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
