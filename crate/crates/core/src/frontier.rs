//! Geometry of the set of achievable worst-case regret vectors.
//!
//! A vector `B ∈ (0, n]^K` belongs to the set when every entry dominates
//! `min{n, Σ_{j≠i} n/B_j}`. The canonical boundary points (uniform,
//! harmonic and power families), the simple sorted lower bound
//! `B_k ≥ (k−1)n/B₁` and the `8(R + K)` certificate live here.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance (in units of `n`) below which negative slack still
/// counts as membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A candidate worst-case regret vector together with its horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundVector {
    horizon: u64,
    bounds: Vec<f64>,
}

impl BoundVector {
    pub fn new(horizon: u64, bounds: Vec<f64>) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidInput("horizon must be positive".into()));
        }
        if bounds.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a bound vector needs at least 2 arms, got {}",
                bounds.len()
            )));
        }
        let n = horizon as f64;
        for (i, &b) in bounds.iter().enumerate() {
            if !(b > 0.0 && b <= n) {
                return Err(Error::InvalidInput(format!(
                    "bound {} (arm {}) must lie in (0, {n}]",
                    b,
                    i + 1
                )));
            }
        }
        Ok(Self { horizon, bounds })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    pub fn arms(&self) -> usize {
        self.bounds.len()
    }
}

/// Membership verdict plus per-arm slack `B_i − min{n, Σ_{j≠i} n/B_j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontierReport {
    pub member: bool,
    pub slack: Vec<f64>,
}

pub fn contains(b: &BoundVector) -> FrontierReport {
    let n = b.horizon as f64;
    let slack: Vec<f64> = (0..b.bounds.len())
        .map(|i| {
            let others: f64 = b
                .bounds
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &x)| n / x)
                .sum();
            b.bounds[i] - n.min(others)
        })
        .collect();
    let member = slack.iter().all(|&s| s >= -MEMBERSHIP_TOL * n);
    FrontierReport { member, slack }
}

/// `H = Σ_{k=2}^{K} 1/(k−1)`, summed directly.
pub fn harmonic_number(arms: usize) -> f64 {
    (1..arms).map(|k| 1.0 / k as f64).sum()
}

/// Every entry equal to `√(n(K−1))`.
pub fn uniform_point(n: u64, arms: usize) -> Result<BoundVector> {
    if arms < 2 {
        return Err(Error::InvalidInput("need at least 2 arms".into()));
    }
    let v = (n as f64 * (arms - 1) as f64).sqrt();
    if v > n as f64 {
        return Err(Error::Infeasible {
            reason: format!("sqrt(n(K-1)) = {v} exceeds n = {n}"),
            min_b1: v,
        });
    }
    BoundVector::new(n, vec![v; arms])
}

/// `B₁` given; `B_k = (k−1)·n·H/B₁` for the remaining arms.
pub fn harmonic_point(b1: f64, n: u64, arms: usize) -> Result<BoundVector> {
    if arms < 2 {
        return Err(Error::InvalidInput("need at least 2 arms".into()));
    }
    let nf = n as f64;
    let h = harmonic_number(arms);
    let min_b1 = (arms - 1) as f64 * h;
    if !(b1 > 0.0 && b1 <= nf) {
        return Err(Error::Infeasible {
            reason: format!("B1 = {b1} must lie in (0, {n}]"),
            min_b1,
        });
    }
    let largest = (arms - 1) as f64 * nf * h / b1;
    if largest > nf * (1.0 + MEMBERSHIP_TOL) {
        return Err(Error::Infeasible {
            reason: format!("B1 = {b1} forces B_K = {largest} > n = {n}"),
            min_b1,
        });
    }
    // arm 1 must be the favoured arm (B₁ ≤ B₂); past that the other arms'
    // constraints break for K ≥ 3
    if b1 * b1 > nf * h * (1.0 + MEMBERSHIP_TOL) {
        return Err(Error::InvalidInput(format!(
            "B1 = {b1} exceeds B2 = {}; B1 must be at most sqrt(nH) = {}",
            nf * h / b1,
            (nf * h).sqrt()
        )));
    }
    let bounds = std::iter::once(b1)
        .chain((2..=arms).map(|k| ((k - 1) as f64 * nf * h / b1).min(nf)))
        .collect();
    BoundVector::new(n, bounds)
}

/// Harmonic point with `B₁ = n^p`.
pub fn power_point(p: f64, n: u64, arms: usize) -> Result<BoundVector> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInput(format!("power p must lie in (0, 1), got {p}")));
    }
    harmonic_point((n as f64).powf(p), n, arms)
}

/// Necessary lower bound `(k−1)·n/B₁` on the `k`-th smallest worst-case regret.
pub fn simple_lower(b1: f64, k: usize, n: u64) -> f64 {
    (k.saturating_sub(1)) as f64 * n as f64 / b1
}

/// Evaluates membership of `min{n, 8(R_i + K)}`.
///
/// For true worst-case regret vectors a non-member is a contradiction of the
/// lower bound. Monte Carlo scans underestimate the supremum, so for
/// empirical input the verdict is only a diagnostic.
pub fn lower_bound_certificate(regret: &[f64], n: u64) -> Result<FrontierReport> {
    let arms = regret.len();
    if let Some((i, r)) = regret
        .iter()
        .enumerate()
        .find(|(_, r)| !(r.is_finite() && **r >= 0.0))
    {
        return Err(Error::InvalidInput(format!(
            "regret entry {} = {r} must be finite and non-negative",
            i + 1
        )));
    }
    let nf = n as f64;
    let scaled = regret
        .iter()
        .map(|&r| (8.0 * (r + arms as f64)).min(nf))
        .collect();
    Ok(contains(&BoundVector::new(n, scaled)?))
}
