//! Experiment configuration, figure reproductions and verification suites.
//!
//! Configuration is JSON (see [`ExperimentConfig`]); every field is optional
//! and falls back to the experiment's defaults. Command-line flags are merged
//! on top by the CLI. Each experiment resolves its config into an explicit
//! plan which is echoed into the output header.

mod figures;
mod output;
mod suites;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use figures::{
    DEFAULT_N, DEFAULT_REPS, DEFAULT_SEED, fig1, fig1_grid, fig2, fig2_grid, Fig1Plan, Fig1Row, Fig2Plan, Fig2Row, FigureResult};
pub use output::{format_vector, reports_csv, CsvHeader};
pub use suites::{
    concentration_suite, exp3_gain_matrices, exp3_suite, regret_suite, run_suite, SuiteOutcome,
    SuitePlan,
};

use crate::environments::Noise;
use crate::error::{Error, Result};
use crate::frontier::{harmonic_point, power_point, uniform_point, BoundVector};
use crate::policies::{exp3_params, PolicySpec, UnbalancedParams, DEFAULT_UCB_EPS};

/// Per-policy parameter block.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyBlock {
    /// Bound specification, see [`BoundSpec`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ucb_eps: Option<f64>,
    /// Favoured-arm bound for `exp3g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b1: Option<f64>,
}

/// Arithmetic grid `start, start + step, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            return Err(Error::config("grid", "need step > 0 and stop >= start"));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        // snap to 12 decimals so 0.025·i prints cleanly
        Ok((0..=count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect())
    }
}

/// JSON experiment configuration. Unset fields take experiment defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Policy used by `simulate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub policies: BTreeMap<String, PolicyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Arm means for `simulate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<Noise>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn block(&self, policy: &str) -> PolicyBlock {
        self.policies.get(policy).cloned().unwrap_or_default()
    }

    pub fn block_mut(&mut self, policy: &str) -> &mut PolicyBlock {
        self.policies.entry(policy.to_string()).or_default()
    }
}

/// Bound-vector specification.
///
/// * `uniform`: `√(n(K−1))` for every arm,
/// * `moss`: `√(nK)` for every arm (the classical MOSS width),
/// * `harmonic:B1`: harmonic frontier point with the given `B₁`,
/// * `power:p`: harmonic point with `B₁ = n^p` (`p` may be a fraction `a/b`),
/// * `b1,b2,…`: explicit entries; `n` stands for the horizon and fractions
///   are accepted.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundSpec {
    Uniform,
    Moss,
    Harmonic(f64),
    Power(f64),
    Explicit(Vec<String>),
}

impl std::str::FromStr for BoundSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(BoundSpec::Uniform);
        }
        if s == "moss" {
            return Ok(BoundSpec::Moss);
        }
        if let Some(rest) = s.strip_prefix("harmonic:") {
            return Ok(BoundSpec::Harmonic(parse_number(rest, None).map_err(|m| Error::config("b", m))?));
        }
        if let Some(rest) = s.strip_prefix("power:") {
            return Ok(BoundSpec::Power(parse_number(rest, None).map_err(|m| Error::config("b", m))?));
        }
        if s.is_empty() {
            return Err(Error::config("b", "empty bound specification"));
        }
        Ok(BoundSpec::Explicit(s.split(',').map(|t| t.trim().to_string()).collect()))
    }
}

impl BoundSpec {
    pub fn resolve(&self, n: u64, arms: usize) -> Result<BoundVector> {
        match self {
            BoundSpec::Uniform => uniform_point(n, arms),
            BoundSpec::Moss => Ok(UnbalancedParams::moss(n, arms)?.bounds().clone()),
            BoundSpec::Harmonic(b1) => harmonic_point(*b1, n, arms),
            BoundSpec::Power(p) => power_point(*p, n, arms),
            BoundSpec::Explicit(tokens) => {
                let values = parse_vector(&tokens.join(","), Some(n as f64))?;
                if values.len() != arms {
                    return Err(Error::config(
                        "b",
                        format!("{} entries given for {arms} arms", values.len()),
                    ));
                }
                BoundVector::new(n, values)
            }
        }
    }
}

/// Parses `x`, `a/b`, or (when `horizon` is given) the literal `n`.
pub fn parse_number(token: &str, horizon: Option<f64>) -> std::result::Result<f64, String> {
    let t = token.trim();
    if let (Some(n), "n") = (horizon, t) {
        return Ok(n);
    }
    let value = if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| format!("cannot parse `{t}`"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("cannot parse `{t}`"))?;
        a / b
    } else {
        t.parse().map_err(|_| format!("cannot parse `{t}`"))?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{t}` is not finite"))
    }
}

/// Comma-separated numbers; errors name the 1-based position.
pub fn parse_vector(text: &str, horizon: Option<f64>) -> Result<Vec<f64>> {
    text.split(',')
        .enumerate()
        .map(|(i, tok)| {
            parse_number(tok, horizon).map_err(|msg| Error::Parse {
                row: 1,
                col: i + 1,
                msg,
            })
        })
        .collect()
}

/// Builds a policy for horizon `n` and `arms` arms from its name and block.
///
/// Names: `umoss`, `uucb`, `ucb`, `exp3g`, and `moss` (Unbalanced MOSS with
/// `B_i = √(nK)`).
pub fn build_policy(name: &str, block: &PolicyBlock, n: u64, arms: usize) -> Result<PolicySpec> {
    let eps = block.ucb_eps.unwrap_or(DEFAULT_UCB_EPS);
    let bounds = || -> Result<BoundVector> {
        let spec: BoundSpec = block.b.as_deref().unwrap_or("uniform").parse()?;
        spec.resolve(n, arms)
    };
    match name {
        "umoss" => Ok(PolicySpec::UnbalancedMoss(UnbalancedParams::new(bounds()?, eps)?)),
        "moss" => Ok(PolicySpec::UnbalancedMoss(UnbalancedParams::moss(n, arms)?)),
        "uucb" => Ok(PolicySpec::UnbalancedUcb(UnbalancedParams::new(bounds()?, eps)?)),
        "ucb" => {
            if !(eps > 0.0) {
                return Err(Error::config("ucb_eps", "must be > 0"));
            }
            Ok(PolicySpec::Ucb { horizon: n, eps })
        }
        "exp3g" => {
            let b1 = block
                .b1
                .unwrap_or_else(|| (n as f64).sqrt());
            Ok(PolicySpec::Exp3(exp3_params(b1, n, arms)?))
        }
        other => Err(Error::config(
            "policy",
            format!("unknown policy `{other}` (expected umoss|uucb|ucb|exp3g|moss)"),
        )),
    }
}
