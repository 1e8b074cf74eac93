//! Flat `key = value` run configuration.
//!
//! ```text
//! # canonical set
//! B_r = 0.125
//! g = 1
//! m = 1
//! alpha = 0, 0.01, 0.02
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::entropy::KGrid;
use crate::error::{Error, Result};
use crate::oracle::RdmGrids;
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputMode {
    Paper,
    Derived,
    Both,
}

impl OutputMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(Self::Paper),
            "derived" => Ok(Self::Derived),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!("mode must be paper, derived or both, got `{other}`"))),
        }
    }

    pub fn paper(self) -> bool {
        self != Self::Derived
    }

    pub fn derived(self) -> bool {
        self != Self::Paper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: PhysicalParams,
    pub alpha_values: Vec<f64>,
    pub n_max: usize,
    /// Gauss-Laguerre order for matrix-element and partial-trace quadrature.
    pub quad_order: usize,
    /// Gauss-Legendre order for the polar angle of the partial trace.
    pub angular_order: usize,
    pub k_grid: KGrid,
    /// Points in each kernel dump.
    pub kernel_points: usize,
    pub mode: OutputMode,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysicalParams::default(),
            alpha_values: vec![0.0],
            n_max: 60,
            quad_order: 200,
            angular_order: 100,
            k_grid: KGrid::default(),
            kernel_points: 401,
            mode: OutputMode::Both,
            out_dir: PathBuf::from("out"),
        }
    }
}

const REQUIRED: [&str; 3] = ["B_r", "g", "m"];

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: `{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("`{key}`: `{value}` is not finite")));
    }
    Ok(v)
}

fn count(key: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: `{value}` is not a non-negative integer")))
}

/// Comma- or whitespace-separated list of finite, non-negative values.
pub fn parse_alpha_list(s: &str) -> Result<Vec<f64>> {
    let values = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| number("alpha", t))
        .collect::<Result<Vec<f64>>>()?;
    if values.is_empty() {
        return Err(Error::Config("`alpha`: empty list".into()));
    }
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(Error::Config(format!("`alpha`: {v} is negative")));
    }
    Ok(values)
}

impl RunConfig {
    /// Parses configuration text. `B_r`, `g` and `m` must be present; other
    /// keys fall back to their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            let p = &mut cfg.params;
            match key {
                "B_r" => p.b_r = number(key, value)?,
                "g" => p.g = number(key, value)?,
                "m" => p.m = number(key, value)?,
                "mu" => p.mu = number(key, value)?,
                "hbar" => p.hbar = number(key, value)?,
                "alpha" => cfg.alpha_values = parse_alpha_list(value)?,
                "n_max" => cfg.n_max = count(key, value)?,
                "quad_order" => cfg.quad_order = count(key, value)?,
                "angular_order" => cfg.angular_order = count(key, value)?,
                "k_points" => cfg.k_grid.points = count(key, value)?,
                "k_half_width" => cfg.k_grid.half_width = number(key, value)?,
                "k_tolerance" => cfg.k_grid.tolerance = number(key, value)?,
                "kernel_points" => cfg.kernel_points = count(key, value)?,
                "mode" => cfg.mode = OutputMode::parse(value)?,
                "out" => cfg.out_dir = PathBuf::from(value),
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        if let Some(missing) = REQUIRED.iter().find(|k| !seen.iter().any(|s| s == *k)) {
            return Err(Error::Config(format!("missing required key `{missing}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.params
            .validate()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.alpha_values.is_empty() {
            return Err(Error::Config("`alpha`: empty list".into()));
        }
        if let Some(v) = self.alpha_values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Config(format!("`alpha`: {v} must be finite and >= 0")));
        }
        if self.quad_order == 0 || self.angular_order == 0 {
            return Err(Error::Config("quadrature orders must be positive".into()));
        }
        if self.kernel_points < 2 {
            return Err(Error::Config("`kernel_points` must be at least 2".into()));
        }
        if !(self.k_grid.half_width > 0.0) || self.k_grid.points < 2 {
            return Err(Error::Config("k grid needs a positive half width and at least 2 points".into()));
        }
        Ok(())
    }

    pub fn rdm_grids(&self) -> RdmGrids {
        RdmGrids {
            radial_order: self.quad_order,
            angular_order: self.angular_order,
        }
    }
}
