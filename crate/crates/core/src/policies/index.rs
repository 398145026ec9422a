use rand::Rng;

use super::{argmax, Agent, PolicySpec, PolicyState, UnbalancedParams};
use crate::error::{Error, Result};
use crate::numerics::log_plus_unchecked;

/// Unbalanced MOSS index `μ̂ + √((4/s)·log₊(n_i/s)) − √(1/n_i)`.
///
/// Unpulled arms (`s = 0`) get `+∞`, which yields an initial round robin in
/// arm order.
#[inline]
pub fn umoss_index(mean_hat: f64, s: u64, n_i: f64) -> f64 {
    if s == 0 {
        return f64::INFINITY;
    }
    let s = s as f64;
    mean_hat + (4.0 / s * log_plus_unchecked(n_i / s)).sqrt() - (1.0 / n_i).sqrt()
}

/// Classical MOSS index `μ̂ + √((4/s)·log₊(n/(K·s)))`.
pub fn moss_index(mean_hat: f64, s: u64, n: f64, arms: usize) -> f64 {
    if s == 0 {
        return f64::INFINITY;
    }
    let s = s as f64;
    mean_hat + (4.0 / s * log_plus_unchecked(n / (arms as f64 * s))).sqrt()
}

/// Unbalanced UCB index `μ̂ + √((2+ε)·ln t / s) − √(ln n / n_i)`.
#[inline]
pub fn uucb_index(mean_hat: f64, s: u64, t: f64, n: f64, n_i: f64, eps: f64) -> f64 {
    if s == 0 {
        return f64::INFINITY;
    }
    ucb_index(mean_hat, s, t, eps) - (n.ln() / n_i).sqrt()
}

/// UCB index `μ̂ + √((2+ε)·ln t / s)`, the unshifted variant.
#[inline]
pub fn ucb_index(mean_hat: f64, s: u64, t: f64, eps: f64) -> f64 {
    if s == 0 {
        return f64::INFINITY;
    }
    mean_hat + ((2.0 + eps) * t.ln() / s as f64).sqrt()
}

pub fn umoss_select(state: &PolicyState, params: &UnbalancedParams) -> usize {
    argmax((0..state.arms()).map(|i| {
        umoss_index(state.mean_hat(i), state.counts[i], params.n_i()[i])
    }))
}

pub fn uucb_select(state: &PolicyState, params: &UnbalancedParams) -> usize {
    let n = params.horizon() as f64;
    let t = state.t as f64;
    argmax((0..state.arms()).map(|i| {
        uucb_index(state.mean_hat(i), state.counts[i], t, n, params.n_i()[i], params.ucb_eps())
    }))
}

pub fn ucb_select(state: &PolicyState, eps: f64) -> usize {
    let t = state.t as f64;
    argmax((0..state.arms()).map(|i| ucb_index(state.mean_hat(i), state.counts[i], t, eps)))
}

#[derive(Debug, Clone)]
enum Kind {
    UnbalancedMoss { n_i: Vec<f64> },
    UnbalancedUcb { shift: Vec<f64>, eps: f64 },
    Ucb { eps: f64 },
}

/// Agent for the three index policies.
///
/// The MOSS index of an arm only changes when that arm is pulled, so it is
/// cached and refreshed for the pulled arm alone.
#[derive(Debug, Clone)]
pub struct IndexAgent {
    kind: Kind,
    state: PolicyState,
    cache: Vec<f64>,
}

impl IndexAgent {
    pub fn new(spec: &PolicySpec, arms: usize) -> Result<Self> {
        if let Some(k) = spec.arms() {
            if k != arms {
                return Err(Error::InvalidInput(format!(
                    "policy configured for {k} arms, instance has {arms}"
                )));
            }
        }
        let kind = match spec {
            PolicySpec::UnbalancedMoss(p) => Kind::UnbalancedMoss {
                n_i: p.n_i().to_vec(),
            },
            PolicySpec::UnbalancedUcb(p) => {
                let log_n = (p.horizon() as f64).ln();
                Kind::UnbalancedUcb {
                    shift: p.n_i().iter().map(|&ni| (log_n / ni).sqrt()).collect(),
                    eps: p.ucb_eps(),
                }
            }
            PolicySpec::Ucb { eps, .. } => Kind::Ucb { eps: *eps },
            PolicySpec::Exp3(_) => {
                return Err(Error::InvalidInput("exp3g is not an index policy".into()))
            }
        };
        Ok(Self {
            kind,
            state: PolicyState::new(arms),
            cache: vec![f64::INFINITY; arms],
        })
    }
}

impl Agent for IndexAgent {
    #[inline]
    fn select<R: Rng + ?Sized>(&mut self, _rng: &mut R) -> usize {
        match &self.kind {
            Kind::UnbalancedMoss { .. } => argmax(self.cache.iter().copied()),
            Kind::UnbalancedUcb { shift, eps } => {
                let t = self.state.t as f64;
                let s = &self.state;
                argmax((0..s.arms()).map(|i| {
                    ucb_index(s.mean_hat(i), s.counts[i], t, *eps) - shift[i]
                }))
            }
            Kind::Ucb { eps } => ucb_select(&self.state, *eps),
        }
    }

    #[inline]
    fn observe(&mut self, arm: usize, reward: f64) {
        self.state.record(arm, reward);
        if let Kind::UnbalancedMoss { n_i } = &self.kind {
            self.cache[arm] = umoss_index(self.state.mean_hat(arm), self.state.counts[arm], n_i[arm]);
        }
    }

    fn state(&self) -> &PolicyState {
        &self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use crate::frontier::BoundVector;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: u64, b: &[f64]) -> UnbalancedParams {
        UnbalancedParams::new(BoundVector::new(n, b.to_vec()).unwrap(), 0.05).unwrap()
    }

    #[test]
    fn umoss_index_examples() {
        assert_eq!(umoss_index(0.3, 0, 7.0), f64::INFINITY);
        // 0.5 + √(ln 25) − 0.1, ln 25 from the stdlib oracle
        let expected = 0.5 + 25f64.ln().sqrt() - 0.1;
        assert_relative_eq!(expected, 2.1941225779941016, epsilon = 1e-12);
        assert_relative_eq!(umoss_index(0.5, 4, 100.0), expected, epsilon = 1e-14);
        assert_relative_eq!(umoss_index(0.5, 200, 100.0), 0.4, epsilon = 1e-14);
    }

    #[test]
    fn umoss_select_examples() {
        // n = 1000, B = 100 gives n_i = 100
        let p = params(1000, &[100.0, 100.0]);
        let mut s = PolicyState::new(2);
        assert_eq!(umoss_select(&s, &p), 0);
        s.record(0, 0.0);
        assert_eq!(umoss_select(&s, &p), 1);

        let s = PolicyState {
            t: 9,
            counts: vec![4, 4],
            sums: vec![2.0, 2.0],
            log_weights: None,
        };
        assert_eq!(umoss_select(&s, &p), 0);
    }

    #[test]
    fn uucb_index_examples() {
        assert_eq!(uucb_index(0.5, 0, 3.0, 10.0, 10.0, 0.05), f64::INFINITY);
        let e = std::f64::consts::E;
        let v = uucb_index(0.5, 4, e * e, e.powi(4), e.powi(4), 0.05);
        let expected = 0.5 + (2.05f64 * 2.0 / 4.0).sqrt() - (4.0 / e.powi(4)).sqrt();
        assert_relative_eq!(v, expected, epsilon = 1e-14);
        assert_relative_eq!(v, 1.241752, epsilon = 1e-6);
    }

    fn random_state(rng: &mut ChaCha8Rng, arms: usize, max_count: u64) -> PolicyState {
        let counts: Vec<u64> = (0..arms).map(|_| rng.random_range(0..=max_count)).collect();
        let sums = counts
            .iter()
            .map(|&c| c as f64 * rng.random_range(-1.0..1.0))
            .collect();
        PolicyState {
            t: counts.iter().sum::<u64>() + 1,
            counts,
            sums,
            log_weights: None,
        }
    }

    #[test]
    fn uniform_shift_matches_ucb() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = params(5000, &[70.0; 4]);
        for _ in 0..2000 {
            let s = random_state(&mut rng, 4, 50);
            assert_eq!(uucb_select(&s, &p), ucb_select(&s, 0.05));
        }
    }

    #[test]
    fn cached_agent_matches_pure_select() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = params(2000, &[20.0, 100.0, 400.0]);
        for spec in [
            PolicySpec::UnbalancedMoss(p.clone()),
            PolicySpec::UnbalancedUcb(p.clone()),
        ] {
            let mut agent = IndexAgent::new(&spec, 3).unwrap();
            for _ in 0..500 {
                let pure = match &spec {
                    PolicySpec::UnbalancedMoss(p) => umoss_select(agent.state(), p),
                    PolicySpec::UnbalancedUcb(p) => uucb_select(agent.state(), p),
                    _ => unreachable!(),
                };
                let arm = agent.select(&mut rng);
                assert_eq!(arm, pure);
                agent.observe(arm, rng.random_range(-1.0..1.0));
            }
        }
    }

    #[test]
    fn every_arm_pulled_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = params(100, &[5.0, 50.0, 90.0, 99.0]);
        for spec in [
            PolicySpec::UnbalancedMoss(p.clone()),
            PolicySpec::UnbalancedUcb(p.clone()),
            PolicySpec::Ucb { horizon: 100, eps: 0.05 },
        ] {
            let mut agent = IndexAgent::new(&spec, 4).unwrap();
            for expected in 0..4 {
                let arm = agent.select(&mut rng);
                assert_eq!(arm, expected);
                agent.observe(arm, 10.0);
            }
        }
    }

    proptest! {
        #[test]
        fn umoss_index_monotone(m in -2.0f64..2.0, d in 0.001f64..1.0, s in 1u64..500, n_i in 1.0f64..1e6) {
            prop_assert!(umoss_index(m + d, s, n_i) > umoss_index(m, s, n_i));
            prop_assert!(umoss_index(m, s + 1, n_i) <= umoss_index(m, s, n_i));
        }
    }
}
