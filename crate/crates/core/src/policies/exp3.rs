use rand::Rng;
use serde::Serialize;

use super::{Agent, PolicyState};
use crate::error::{Error, Result};

/// Prior and learning rate for Exp3-γ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exp3Params {
    horizon: u64,
    prior: Vec<f64>,
    eta: f64,
}

impl Exp3Params {
    pub fn new(horizon: u64, prior: Vec<f64>, eta: f64) -> Result<Self> {
        if prior.len() < 2 {
            return Err(Error::InvalidInput("Exp3 needs at least 2 arms".into()));
        }
        if prior.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidInput("prior entries must lie in (0, 1]".into()));
        }
        let total: f64 = prior.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("prior sums to {total}, expected 1")));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidInput(format!("learning rate must be > 0, got {eta}")));
        }
        Ok(Self { horizon, prior, eta })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `η·K·n + ln(1/ρ_best)/η`, the regret bound against arm `best`.
    pub fn regret_bound(&self, best: usize) -> f64 {
        let k = self.prior.len() as f64;
        self.eta * k * self.horizon as f64 + (1.0 / self.prior[best]).ln() / self.eta
    }
}

/// Prior favouring arm 1: `ρ₁ = exp(−B₁²/(4Kn))`, the rest split evenly, and
/// learning rate `η = B₁/(2Kn)`.
pub fn exp3_params(b1: f64, n: u64, arms: usize) -> Result<Exp3Params> {
    let nf = n as f64;
    if !(b1 > 0.0 && b1 <= nf) {
        return Err(Error::InvalidInput(format!("B1 must lie in (0, {n}], got {b1}")));
    }
    if arms < 2 {
        return Err(Error::InvalidInput("Exp3 needs at least 2 arms".into()));
    }
    let k = arms as f64;
    let x = b1 * b1 / (4.0 * k * nf);
    let rho1 = (-x).exp();
    // 1 − ρ₁ without cancellation, so the other arms keep positive mass
    let rest = -(-x).exp_m1() / (k - 1.0);
    let mut prior = vec![rest; arms];
    prior[0] = rho1;
    Exp3Params::new(n, prior, b1 / (2.0 * k * nf))
}

/// Softmax of the log-weights with the maximum subtracted first.
pub fn exp3_probs(log_weights: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; log_weights.len()];
    softmax_into(log_weights, &mut out)?;
    Ok(out)
}

fn softmax_into(log_weights: &[f64], out: &mut [f64]) -> Result<()> {
    if log_weights.iter().any(|w| w.is_nan() || *w == f64::INFINITY) {
        return Err(Error::InvalidState("log-weights must not be NaN or +inf".into()));
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::InvalidState("all log-weights are -inf".into()));
    }
    let mut total = 0.0;
    for (o, &w) in out.iter_mut().zip(log_weights) {
        *o = (w - max).exp();
        total += *o;
    }
    for o in out.iter_mut() {
        *o /= total;
    }
    Ok(())
}

/// Importance-weighted loss update: only the chosen arm moves, by
/// `−η·(1 − gain)/prob`.
pub fn exp3_update(
    log_weights: &mut [f64],
    chosen: usize,
    gain: f64,
    prob: f64,
    eta: f64,
) -> Result<()> {
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(Error::InvalidInput(format!("probability must lie in (0, 1], got {prob}")));
    }
    if !(0.0..=1.0).contains(&gain) {
        return Err(Error::InvalidInput(format!("gain must lie in [0, 1], got {gain}")));
    }
    let w = log_weights
        .get_mut(chosen)
        .ok_or_else(|| Error::InvalidInput(format!("arm {chosen} out of range")))?;
    *w -= eta * (1.0 - gain) / prob;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct Exp3Agent {
    eta: f64,
    state: PolicyState,
    probs: Vec<f64>,
}

impl Exp3Agent {
    pub fn new(params: &Exp3Params) -> Self {
        let mut state = PolicyState::new(params.prior.len());
        state.log_weights = Some(params.prior.iter().map(|p| p.ln()).collect());
        Self {
            eta: params.eta,
            probs: vec![0.0; params.prior.len()],
            state,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

impl Agent for Exp3Agent {
    fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let lw = self.state.log_weights.as_deref().expect("exp3 state has weights");
        softmax_into(lw, &mut self.probs).expect("finite log-weights");
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // u landed in the rounding gap above the cumulative sum
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    fn observe(&mut self, arm: usize, reward: f64) {
        let prob = self.probs[arm];
        let lw = self.state.log_weights.as_mut().expect("exp3 state has weights");
        exp3_update(lw, arm, reward, prob, self.eta).expect("valid exp3 update");
        self.state.record(arm, reward);
    }

    fn state(&self) -> &PolicyState {
        &self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn params_examples() {
        let small = exp3_params(1e-2, 5000, 10).unwrap();
        assert!(small.prior()[0] < 1.0 && small.prior()[0] > 1.0 - 1e-9);
        let tiny = exp3_params(1e-6, 5000, 10).unwrap();
        assert!(tiny.prior()[1..].iter().all(|&p| p > 0.0));

        let (n, k) = (5000u64, 10usize);
        let b1 = (4.0 * k as f64 * n as f64 * 2f64.ln()).sqrt();
        let p = exp3_params(b1, n, k).unwrap();
        assert_relative_eq!(p.prior()[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.prior()[3], 0.5 / 9.0, epsilon = 1e-12);

        let p = exp3_params(200.0, 5000, 10).unwrap();
        assert_relative_eq!(p.eta(), 0.002, epsilon = 1e-15);
        assert_relative_eq!(p.prior()[0], (-0.2f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(p.prior()[0], 0.8187307530779818, epsilon = 1e-12);
        assert_relative_eq!(p.prior().iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // ηKn = B₁/2
        assert_relative_eq!(p.eta() * 10.0 * 5000.0, 100.0, epsilon = 1e-9);
        // with i* = 1 the bound collapses to B₁
        assert_relative_eq!(p.regret_bound(0), 200.0, epsilon = 1e-9);
    }

    #[test]
    fn probs_examples() {
        let p = exp3_probs(&[0.7; 4]).unwrap();
        for x in p {
            assert_relative_eq!(x, 0.25, epsilon = 1e-15);
        }
        let p = exp3_probs(&[3f64.ln(), 0.0]).unwrap();
        assert_relative_eq!(p[0], 0.75, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.25, epsilon = 1e-15);
        assert!(matches!(
            exp3_probs(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn update_examples() {
        let mut w = vec![0.0, 0.0];
        exp3_update(&mut w, 0, 1.0, 0.5, 0.002).unwrap();
        assert_eq!(w, vec![0.0, 0.0]);
        exp3_update(&mut w, 1, 0.0, 0.5, 0.002).unwrap();
        assert_relative_eq!(w[1], -0.004, epsilon = 1e-15);
        assert_eq!(w[0], 0.0);
        assert!(exp3_update(&mut w, 0, 0.5, 0.0, 0.002).is_err());
    }

    #[test]
    fn loss_estimate_unbiased() {
        // Σ_k p_k · ℓ̃_i(k) = 1 − g_i for every arm i
        let p = exp3_probs(&[0.3, -1.0, 2.0]).unwrap();
        let gains = [0.2, 0.9, 0.5];
        let eta = 0.1;
        for i in 0..3 {
            let mut expected_loss = 0.0;
            for chosen in 0..3 {
                let mut w = vec![0.0; 3];
                exp3_update(&mut w, chosen, gains[chosen], p[chosen], eta).unwrap();
                expected_loss += p[chosen] * (-w[i] / eta);
            }
            assert_relative_eq!(expected_loss, 1.0 - gains[i], epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn probs_simplex_and_shift_invariant(
            w in prop::collection::vec(-30.0f64..30.0, 2..10),
            c in -100.0f64..100.0,
        ) {
            let p = exp3_probs(&w).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|&x| x > 0.0 && x <= 1.0));
            let shifted: Vec<f64> = w.iter().map(|x| x + c).collect();
            let q = exp3_probs(&shifted).unwrap();
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
