//! Stochastic instances, gap tables, the lower-bound instance family and
//! adversarial gain tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest allowed spread `max μ − min μ`.
pub const MAX_SPREAD: f64 = 1.0;
const SPREAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    /// Mean plus a standard normal draw.
    #[serde(rename = "gaussian")]
    GaussianUnit,
    Bernoulli,
}

impl std::str::FromStr for Noise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Noise::GaussianUnit),
            "bernoulli" => Ok(Noise::Bernoulli),
            other => Err(Error::InvalidInput(format!(
                "unknown noise family `{other}` (expected gaussian|bernoulli)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StochasticInstance {
    means: Vec<f64>,
    noise: Noise,
}

impl StochasticInstance {
    pub fn new(means: Vec<f64>, noise: Noise) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::InvalidInput("an instance needs at least one arm".into()));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::InvalidInput("means must be finite".into()));
        }
        let (lo, hi) = min_max(&means);
        if hi - lo > MAX_SPREAD + SPREAD_TOL {
            return Err(Error::InvalidInput(format!(
                "mean spread {} exceeds {MAX_SPREAD}",
                hi - lo
            )));
        }
        if noise == Noise::Bernoulli && (lo < 0.0 || hi > 1.0) {
            return Err(Error::InvalidInput(
                "Bernoulli means must lie in [0, 1]".into(),
            ));
        }
        Ok(Self { means, noise })
    }

    pub fn gaussian(means: Vec<f64>) -> Result<Self> {
        Self::new(means, Noise::GaussianUnit)
    }

    pub fn bernoulli(means: Vec<f64>) -> Result<Self> {
        Self::new(means, Noise::Bernoulli)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn noise(&self) -> Noise {
        self.noise
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    /// Draws one reward for `arm`, consuming exactly one sample from `rng`.
    pub fn pull<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> Result<f64> {
        let mean = *self.means.get(arm).ok_or_else(|| {
            Error::InvalidInput(format!("arm {arm} out of range for {} arms", self.arms()))
        })?;
        Ok(sample(self.noise, mean, rng))
    }

    pub(crate) fn pull_unchecked<R: Rng + ?Sized>(&self, arm: usize, rng: &mut R) -> f64 {
        sample(self.noise, self.means[arm], rng)
    }

    pub fn gaps(&self) -> GapTable {
        gaps(self)
    }
}

#[inline]
pub(crate) fn sample<R: Rng + ?Sized>(noise: Noise, mean: f64, rng: &mut R) -> f64 {
    match noise {
        Noise::GaussianUnit => {
            let z: f64 = rng.sample(StandardNormal);
            mean + z
        }
        Noise::Bernoulli => {
            if rng.random::<f64>() < mean {
                1.0
            } else {
                0.0
            }
        }
    }
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapTable {
    /// `Δ_j = μ* − μ_j`.
    pub delta: Vec<f64>,
    /// `delta_pair[j][i] = Δ_ji = μ_i − μ_j`.
    pub delta_pair: Vec<Vec<f64>>,
    pub optimal_arm: usize,
}

impl GapTable {
    pub fn pair(&self, j: usize, i: usize) -> f64 {
        self.delta_pair[j][i]
    }
}

/// Gap table; ties for the optimal arm go to the lowest index.
pub fn gaps(instance: &StochasticInstance) -> GapTable {
    let mu = &instance.means;
    let mut optimal_arm = 0;
    for (i, &m) in mu.iter().enumerate() {
        if m > mu[optimal_arm] {
            optimal_arm = i;
        }
    }
    let best = mu[optimal_arm];
    GapTable {
        delta: mu.iter().map(|&m| best - m).collect(),
        delta_pair: mu
            .iter()
            .map(|&mj| mu.iter().map(|&mi| mi - mj).collect())
            .collect(),
        optimal_arm,
    }
}

/// Instance family used in the lower-bound argument.
///
/// Instance `k` has means `base` at arm 1, `base + ε_k` at arm `k ≠ 1` and
/// `base − ε_j` at every other arm `j`, so arm `k` is optimal in instance `k`.
/// The caller must order arms so that `ε_1` is the smallest entry.
pub fn lower_bound_family(eps: &[f64], base: f64) -> Result<Vec<StochasticInstance>> {
    if eps.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 arms".into()));
    }
    if let Some((i, e)) = eps
        .iter()
        .enumerate()
        .find(|(_, &e)| !(e > 0.0 && e <= 0.5))
    {
        return Err(Error::Precondition(format!(
            "eps[{}] = {e} must lie in (0, 1/2]",
            i + 1
        )));
    }
    if eps.iter().any(|&e| e < eps[0]) {
        return Err(Error::Precondition(
            "eps[1] must be the minimum; reorder arms before building the family".into(),
        ));
    }
    let k_arms = eps.len();
    (0..k_arms)
        .map(|k| {
            let means = (0..k_arms)
                .map(|j| {
                    base + if j == 0 {
                        0.0
                    } else if j == k {
                        eps[k]
                    } else {
                        -eps[j]
                    }
                })
                .collect();
            StochasticInstance::gaussian(means)
        })
        .collect()
}

/// Default floor applied to `ε_k` when `R_k = 0`.
pub const EPS_FLOOR: f64 = 1e-3;

/// `ε_k = max{floor, min{1/2, c·R_k/n}}`.
pub fn eps_schedule(regret: &[f64], n: u64, c: f64, floor: f64) -> Result<Vec<f64>> {
    if !(c > 2.0) {
        return Err(Error::Precondition(format!("c must exceed 2, got {c}")));
    }
    if !(floor > 0.0 && floor <= 0.5) {
        return Err(Error::InvalidInput(format!("floor must lie in (0, 1/2], got {floor}")));
    }
    if regret.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidInput("regret entries must be finite and >= 0".into()));
    }
    Ok(regret
        .iter()
        .map(|&r| (c * r / n as f64).min(0.5).max(floor))
        .collect())
}

/// Oblivious adversary: `gains[t][i]` is the gain of arm `i` at step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMatrix {
    gains: Vec<Vec<f64>>,
}

impl GainMatrix {
    pub fn new(gains: Vec<Vec<f64>>) -> Result<Self> {
        let arms = gains.first().map_or(0, Vec::len);
        if gains.is_empty() || arms == 0 {
            return Err(Error::InvalidInput("gain matrix must be non-empty".into()));
        }
        for (t, row) in gains.iter().enumerate() {
            if row.len() != arms {
                return Err(Error::Parse {
                    row: t + 1,
                    col: row.len().min(arms) + 1,
                    msg: format!("expected {arms} columns, found {}", row.len()),
                });
            }
            for (i, &g) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&g) {
                    return Err(Error::Range {
                        row: t + 1,
                        col: i + 1,
                        value: g,
                    });
                }
            }
        }
        Ok(Self { gains })
    }

    /// Builds an `n × K` table from `f(t, i)` with zero-based indices.
    pub fn from_fn(n: usize, arms: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new((0..n).map(|t| (0..arms).map(|i| f(t, i)).collect()).collect())
    }

    pub fn horizon(&self) -> usize {
        self.gains.len()
    }

    pub fn arms(&self) -> usize {
        self.gains[0].len()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.gains[t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.gains.iter().map(Vec::as_slice)
    }

    /// Cumulative gain of each arm over the whole horizon.
    pub fn totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.arms()];
        for row in &self.gains {
            for (acc, g) in totals.iter_mut().zip(row) {
                *acc += g;
            }
        }
        totals
    }

    /// Canonical CSV: no header, shortest round-trip decimals, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.gains {
            for (i, g) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{g}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut gains = Vec::new();
        for (r, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse {
                row: r + 1,
                col: 1,
                msg: e.to_string(),
            })?;
            let row = record
                .iter()
                .enumerate()
                .map(|(c, field)| {
                    field.parse::<f64>().map_err(|e| Error::Parse {
                        row: r + 1,
                        col: c + 1,
                        msg: format!("`{field}`: {e}"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            gains.push(row);
        }
        Self::new(gains)
    }
}

pub fn load_gains(path: impl AsRef<Path>) -> Result<GainMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    GainMatrix::from_csv(&text)
}

pub fn save_gains(gains: &GainMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, gains.to_csv()).map_err(|e| Error::io(path, e))
}
