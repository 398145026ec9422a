//! Bandit agents: Unbalanced MOSS, Unbalanced UCB, UCB and biased-prior
//! Exp3-γ.
//!
//! Each policy is exposed twice: as pure index/weight functions over a
//! [`PolicyState`] (used by tests and the verification layer), and as an
//! [`Agent`] that the simulator drives step by step.

mod exp3;
mod index;

use rand::Rng;
use serde::Serialize;

pub use exp3::{exp3_params, exp3_probs, exp3_update, Exp3Agent, Exp3Params};
pub use index::{
    moss_index, ucb_index, ucb_select, umoss_index, umoss_select, uucb_index, uucb_select,
    IndexAgent,
};

use crate::environments::StochasticInstance;
use crate::error::{Error, Result};
use crate::frontier::BoundVector;

/// Default `ε` in the `(2 + ε)·log t` exploration width.
pub const DEFAULT_UCB_EPS: f64 = 0.05;

/// Parameters shared by the unbalanced index policies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnbalancedParams {
    bounds: BoundVector,
    /// `n_i = n² / B_i²`.
    n_i: Vec<f64>,
    ucb_eps: f64,
}

impl UnbalancedParams {
    pub fn new(bounds: BoundVector, ucb_eps: f64) -> Result<Self> {
        if !(ucb_eps > 0.0) || !ucb_eps.is_finite() {
            return Err(Error::InvalidInput(format!("ucb_eps must be > 0, got {ucb_eps}")));
        }
        let n = bounds.horizon() as f64;
        let n_i = bounds.bounds().iter().map(|&b| n * n / (b * b)).collect();
        Ok(Self {
            bounds,
            n_i,
            ucb_eps,
        })
    }

    /// Uniform bounds `B_i = √(nK)`, i.e. `n_i = n/K`: the classical MOSS
    /// confidence width up to an arm-independent shift.
    pub fn moss(horizon: u64, arms: usize) -> Result<Self> {
        let b = (horizon as f64 * arms as f64).sqrt();
        Self::new(BoundVector::new(horizon, vec![b; arms])?, DEFAULT_UCB_EPS)
    }

    pub fn horizon(&self) -> u64 {
        self.bounds.horizon()
    }

    pub fn bounds(&self) -> &BoundVector {
        &self.bounds
    }

    pub fn n_i(&self) -> &[f64] {
        &self.n_i
    }

    pub fn ucb_eps(&self) -> f64 {
        self.ucb_eps
    }

    pub fn arms(&self) -> usize {
        self.n_i.len()
    }
}

/// A fully resolved policy configuration for a fixed horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum PolicySpec {
    #[serde(rename = "umoss")]
    UnbalancedMoss(UnbalancedParams),
    #[serde(rename = "uucb")]
    UnbalancedUcb(UnbalancedParams),
    Ucb { horizon: u64, eps: f64 },
    #[serde(rename = "exp3g")]
    Exp3(Exp3Params),
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::UnbalancedMoss(_) => "umoss",
            PolicySpec::UnbalancedUcb(_) => "uucb",
            PolicySpec::Ucb { .. } => "ucb",
            PolicySpec::Exp3(_) => "exp3g",
        }
    }

    pub fn horizon(&self) -> u64 {
        match self {
            PolicySpec::UnbalancedMoss(p) | PolicySpec::UnbalancedUcb(p) => p.horizon(),
            PolicySpec::Ucb { horizon, .. } => *horizon,
            PolicySpec::Exp3(p) => p.horizon(),
        }
    }

    /// Number of arms the policy was configured for, if it is fixed.
    pub fn arms(&self) -> Option<usize> {
        match self {
            PolicySpec::UnbalancedMoss(p) | PolicySpec::UnbalancedUcb(p) => Some(p.arms()),
            PolicySpec::Ucb { .. } => None,
            PolicySpec::Exp3(p) => Some(p.prior().len()),
        }
    }
}

/// Per-episode learner state.
///
/// `t` is the 1-based index of the step about to be played, so
/// `Σ counts = t − 1` for the index policies.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pub t: u64,
    pub counts: Vec<u64>,
    pub sums: Vec<f64>,
    pub log_weights: Option<Vec<f64>>,
}

impl PolicyState {
    pub fn new(arms: usize) -> Self {
        Self {
            t: 1,
            counts: vec![0; arms],
            sums: vec![0.0; arms],
            log_weights: None,
        }
    }

    pub fn arms(&self) -> usize {
        self.counts.len()
    }

    /// Empirical mean with the convention that an unpulled arm has mean 0.
    pub fn mean_hat(&self, arm: usize) -> f64 {
        match self.counts[arm] {
            0 => 0.0,
            c => self.sums[arm] / c as f64,
        }
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.t += 1;
    }
}

/// A learner driven by the simulator: choose, then observe.
pub trait Agent {
    fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize;
    fn observe(&mut self, arm: usize, reward: f64);
    fn state(&self) -> &PolicyState;
}

/// `Δ̄_ji = μ_i − μ_j + √(1/n_j) − √(1/n_i)`.
pub fn shifted_gap(
    instance: &StochasticInstance,
    params: &UnbalancedParams,
    i: usize,
    j: usize,
) -> Result<f64> {
    let k = instance.arms();
    if i >= k || j >= k || params.arms() != k {
        return Err(Error::InvalidInput(format!(
            "arms ({i}, {j}) invalid for a {k}-arm instance with {}-arm parameters",
            params.arms()
        )));
    }
    let mu = instance.means();
    let n = params.n_i();
    Ok(mu[i] - mu[j] + (1.0 / n[j]).sqrt() - (1.0 / n[i]).sqrt())
}

/// Lowest-index argmax; `+∞` entries compare equal to each other.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn params_n_i() {
        let b = BoundVector::new(100, vec![10.0, 50.0]).unwrap();
        let p = UnbalancedParams::new(b, 0.05).unwrap();
        assert_eq!(p.n_i(), &[100.0, 4.0]);
        assert!(UnbalancedParams::new(BoundVector::new(100, vec![10.0, 50.0]).unwrap(), 0.0).is_err());
        let m = UnbalancedParams::moss(5000, 10).unwrap();
        for &ni in m.n_i() {
            assert_relative_eq!(ni, 500.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn shifted_gap_examples() {
        let inst = StochasticInstance::gaussian(vec![0.5, 0.4]).unwrap();
        let b = BoundVector::new(100, vec![1.0, 10.0]).unwrap();
        let p = UnbalancedParams::new(b, 0.05).unwrap();
        assert_eq!(p.n_i(), &[10000.0, 100.0]);
        assert_eq!(shifted_gap(&inst, &p, 0, 0).unwrap(), 0.0);
        assert_relative_eq!(shifted_gap(&inst, &p, 0, 1).unwrap(), 0.19, epsilon = 1e-12);
        assert_relative_eq!(shifted_gap(&inst, &p, 1, 0).unwrap(), -0.19, epsilon = 1e-12);
        assert!(shifted_gap(&inst, &p, 0, 2).is_err());

        let uni = UnbalancedParams::moss(100, 2).unwrap();
        assert_relative_eq!(shifted_gap(&inst, &uni, 0, 1).unwrap(), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn state_conventions() {
        let mut s = PolicyState::new(2);
        assert_eq!(s.mean_hat(0), 0.0);
        s.record(0, 3.0);
        s.record(0, 1.0);
        assert_eq!(s.mean_hat(0), 2.0);
        assert_eq!(s.t, 3);
    }

    #[test]
    fn argmax_ties() {
        assert_eq!(argmax([1.0, 1.0]), 0);
        assert_eq!(argmax([f64::INFINITY, f64::INFINITY]), 0);
        assert_eq!(argmax([0.0, f64::INFINITY]), 1);
    }

    proptest! {
        #[test]
        fn shifted_gap_antisymmetric(
            means in prop::collection::vec(-0.5f64..0.5, 2..6),
            raw_b in prop::collection::vec(1.0f64..1000.0, 6),
        ) {
            let k = means.len();
            let inst = StochasticInstance::gaussian(means).unwrap();
            let p = UnbalancedParams::new(BoundVector::new(1000, raw_b[..k].to_vec()).unwrap(), 0.05).unwrap();
            for i in 0..k {
                for j in 0..k {
                    let a = shifted_gap(&inst, &p, i, j).unwrap();
                    let b = shifted_gap(&inst, &p, j, i).unwrap();
                    prop_assert!((a + b).abs() <= 1e-12);
                }
            }
        }
    }
}
