//! Centralized numerical tolerances.
//!
//! A process-wide policy is installed once (the CLI reads it from the file
//! named by `MML_NUMERIC_POLICY`); library code reads it through
//! [`NumericPolicy::current`]. The policy is immutable after installation.

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const POLICY_ENV: &str = "MML_NUMERIC_POLICY";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Maximum squared amplitude allowed in the last four Fock levels.
    pub tail_tol: f64,
    pub hermiticity_tol: f64,
    pub unitarity_tol: f64,
    /// Allowed deviation of a squared norm from 1 for "normalized" inputs.
    pub norm_tol: f64,
    /// Smallest herald probability treated as a possible outcome.
    pub impossible_tol: f64,
    /// Absolute tolerance of quadrature integrals.
    pub integration_tol: f64,
    /// Allowed micro-mode population outside {|0>, |1>}.
    pub leakage_tol: f64,
    pub default_dim: usize,
    pub max_dim: usize,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            tail_tol: 1e-10,
            hermiticity_tol: 1e-10,
            unitarity_tol: 1e-8,
            norm_tol: 1e-10,
            impossible_tol: 1e-15,
            integration_tol: 1e-9,
            leakage_tol: 1e-10,
            default_dim: 128,
            max_dim: 1024,
        }
    }
}

static GLOBAL: OnceLock<NumericPolicy> = OnceLock::new();

impl NumericPolicy {
    /// The installed policy, or the defaults when none was installed.
    pub fn current() -> &'static NumericPolicy {
        GLOBAL.get_or_init(NumericPolicy::default)
    }

    /// Installs `policy` process-wide. Fails if a policy is already in use.
    pub fn install(policy: NumericPolicy) -> Result<()> {
        GLOBAL
            .set(policy)
            .map_err(|_| Error::Policy("a numeric policy is already installed".into()))
    }

    /// Parses `key = value` lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut policy = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Policy(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let float = || {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| {
                        Error::Policy(format!("line {}: bad value for {key}", lineno + 1))
                    })
            };
            let int = || {
                value
                    .parse::<usize>()
                    .ok()
                    .filter(|v| *v >= 2)
                    .ok_or_else(|| {
                        Error::Policy(format!("line {}: bad value for {key}", lineno + 1))
                    })
            };
            match key {
                "tail_tol" => policy.tail_tol = float()?,
                "hermiticity_tol" => policy.hermiticity_tol = float()?,
                "unitarity_tol" => policy.unitarity_tol = float()?,
                "norm_tol" => policy.norm_tol = float()?,
                "impossible_tol" => policy.impossible_tol = float()?,
                "integration_tol" => policy.integration_tol = float()?,
                "leakage_tol" => policy.leakage_tol = float()?,
                "default_dim" => policy.default_dim = int()?,
                "max_dim" => policy.max_dim = int()?,
                _ => {
                    return Err(Error::Policy(format!(
                        "line {}: unknown key {key}",
                        lineno + 1
                    )))
                }
            }
        }
        if policy.max_dim < policy.default_dim {
            return Err(Error::Policy("max_dim must be at least default_dim".into()));
        }
        Ok(policy)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Policy(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Reads the file named by `MML_NUMERIC_POLICY`, or returns the defaults.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(POLICY_ENV) {
            Some(path) if !path.is_empty() => Self::from_file(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }
}
