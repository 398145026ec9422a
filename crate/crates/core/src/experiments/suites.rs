//! Verification suites behind `verify {concentration|regret|exp3|all}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::figures::{fig1_grid, fig2_grid, DEFAULT_N, DEFAULT_SEED};
use super::output::{reports_csv, CsvHeader};
use super::{ExperimentConfig, GridSpec};
use crate::environments::{GainMatrix, StochasticInstance};
use crate::error::{Error, Result};
use crate::frontier::{harmonic_point, power_point, BoundVector};
use crate::policies::{PolicySpec, UnbalancedParams, DEFAULT_UCB_EPS};
use crate::simulation::{child_seed, Executor};
use crate::verification::{
    check_exp3_bound, check_maximal, check_regret_bound, check_tau, peeling_maxima,
    peeling_report, uucb_shape_constant, BoundCheckReport, CheckStatus,
};

/// Gaussian-path checks.
const MAXIMAL_N: u64 = 100;
const MAXIMAL_EPS: [f64; 2] = [20.0, 30.0];
const PEELING_N: u64 = 1000;
const PEELING_DELTAS: [f64; 3] = [0.25, 0.5, 1.0];
const TAU_NJ: [f64; 2] = [16.0, 1000.0];
const TAU_DBAR: [f64; 3] = [0.5, 1.0, 2.0];
const CONCENTRATION_REPS: usize = 100_000;
const TAU_REPS: usize = 10_000;

const REGRET_REPS: usize = 2000;

const EXP3_B1: [f64; 2] = [50.0, 200.0];
const EXP3_ARMS: [usize; 2] = [2, 10];
const EXP3_REPS: usize = 1000;

/// Resolved suite parameters, echoed into the CSV header.
#[derive(Debug, Clone, Serialize)]
pub struct SuitePlan {
    pub suite: String,
    pub n: u64,
    /// Overrides every check's default replication count when set.
    pub reps: Option<usize>,
    #[serde(skip)]
    pub seed: u64,
}

impl SuitePlan {
    pub fn resolve(suite: &str, cfg: &ExperimentConfig) -> Result<Self> {
        if !matches!(suite, "concentration" | "regret" | "exp3" | "all") {
            return Err(Error::config(
                "suite",
                format!("unknown suite `{suite}` (expected concentration|regret|exp3|all)"),
            ));
        }
        if matches!(cfg.reps, Some(r) if r < 2) {
            return Err(Error::config("reps", "must be at least 2"));
        }
        Ok(Self {
            suite: suite.to_string(),
            n: cfg.n.unwrap_or(DEFAULT_N),
            reps: cfg.reps,
            seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

pub struct SuiteOutcome {
    pub header: CsvHeader,
    pub reports: Vec<BoundCheckReport>,
}

impl SuiteOutcome {
    /// True when every conclusive check passed.
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.status != CheckStatus::Fail)
    }

    pub fn to_csv(&self) -> String {
        reports_csv(&self.header, &self.reports)
    }
}

pub fn concentration_suite(reps: Option<usize>, seed: u64, exec: &Executor) -> Result<Vec<BoundCheckReport>> {
    let mut out = Vec::new();
    let mut idx = 0u64;
    let mut next_seed = || {
        idx += 1;
        child_seed(seed, idx)
    };
    for eps in MAXIMAL_EPS {
        out.push(check_maximal(MAXIMAL_N, eps, reps.unwrap_or(CONCENTRATION_REPS), next_seed(), exec)?);
    }
    // n_i = n; one set of paths serves every Δ
    let n_i = PEELING_N as f64;
    let z = peeling_maxima(n_i, PEELING_N, reps.unwrap_or(CONCENTRATION_REPS), next_seed(), exec);
    for delta in PEELING_DELTAS {
        out.push(peeling_report(n_i, delta, &z));
    }
    for n_j in TAU_NJ {
        for dbar in TAU_DBAR {
            out.push(check_tau(n_j, dbar, reps.unwrap_or(TAU_REPS), next_seed(), exec)?);
        }
    }
    Ok(out)
}

/// Worst-case and per-instance regret bounds for Unbalanced MOSS on both
/// figure setups: two arms with `B = (n^{1/3}, n^{2/3})` over `μ = (0, −Δ)`,
/// and ten arms on the harmonic point with `B₁ = √n` over one-hot means.
pub fn regret_suite(
    n: u64,
    reps: Option<usize>,
    seed: u64,
    exec: &Executor,
) -> Result<(Vec<BoundCheckReport>, Vec<String>)> {
    let reps = reps.unwrap_or(REGRET_REPS);
    let mut reports = Vec::new();
    let mut info = Vec::new();

    let two = power_point(1.0 / 3.0, n, 2)?;
    let deltas = GridSpec { start: -0.5, stop: 0.5, step: 0.025 }.values()?;
    let grid = fig1_grid(&deltas)?;
    reports.extend(labelled("fig1_", check_regret_bound(&umoss(&two)?, &two, &grid, n, reps, child_seed(seed, 1), exec)?));

    let ten = harmonic_point((n as f64).sqrt(), n, 10)?;
    let deltas = GridSpec { start: 0.0, stop: 0.5, step: 0.025 }.values()?;
    let i_stars: Vec<usize> = (1..=10).collect();
    let grid: Vec<StochasticInstance> = fig2_grid(&deltas, &i_stars, 10)?
        .into_iter()
        .map(|(_, _, inst)| inst)
        .collect();
    reports.extend(labelled("fig2_", check_regret_bound(&umoss(&ten)?, &ten, &grid, n, reps, child_seed(seed, 2), exec)?));

    // Unbalanced UCB: problem-independent shape constant on small gaps,
    // reported only
    let params = UnbalancedParams::new(two, DEFAULT_UCB_EPS)?;
    let small: Vec<StochasticInstance> = [0.025, 0.05, 0.1, -0.025, -0.05, -0.1]
        .iter()
        .map(|&d| StochasticInstance::gaussian(vec![0.0, -d]))
        .collect::<Result<_>>()?;
    let shape = uucb_shape_constant(&params, &small, (reps / 10).max(2), child_seed(seed, 3), exec)?;
    info.push(format!("uucb_shape_constant (max R/(B_i* sqrt(ln n)), small gaps): {shape}"));
    Ok((reports, info))
}

fn umoss(b: &BoundVector) -> Result<PolicySpec> {
    Ok(PolicySpec::UnbalancedMoss(UnbalancedParams::new(b.clone(), DEFAULT_UCB_EPS)?))
}

fn labelled(prefix: &str, reports: Vec<BoundCheckReport>) -> Vec<BoundCheckReport> {
    reports
        .into_iter()
        .map(|mut r| {
            r.name = format!("{prefix}{}", r.name);
            r
        })
        .collect()
}

/// The five gain tables: constant, a single best arm (the last one),
/// alternating one-hot, i.i.d. uniform, and i.i.d. Bernoulli with rising
/// means. The random tables use fixed seeds and do not depend on the run seed.
pub fn exp3_gain_matrices(n: usize, arms: usize) -> Result<Vec<(String, GainMatrix)>> {
    let mut uniform_rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
    let uniform: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..arms).map(|_| uniform_rng.random::<f64>()).collect())
        .collect();
    let mut bern_rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
    let bernoulli: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..arms)
                .map(|i| {
                    let p = 0.3 + 0.4 * i as f64 / (arms - 1) as f64;
                    f64::from(u8::from(bern_rng.random::<f64>() < p))
                })
                .collect()
        })
        .collect();
    Ok(vec![
        ("constant".into(), GainMatrix::from_fn(n, arms, |_, _| 0.5)?),
        (
            "single_best".into(),
            GainMatrix::from_fn(n, arms, |_, i| if i == arms - 1 { 1.0 } else { 0.0 })?,
        ),
        (
            "alternating".into(),
            GainMatrix::from_fn(n, arms, |t, i| if t % arms == i { 1.0 } else { 0.0 })?,
        ),
        ("random_uniform".into(), GainMatrix::new(uniform)?),
        ("random_bernoulli".into(), GainMatrix::new(bernoulli)?),
    ])
}

pub fn exp3_suite(n: u64, reps: Option<usize>, seed: u64, exec: &Executor) -> Result<Vec<BoundCheckReport>> {
    let reps = reps.unwrap_or(EXP3_REPS);
    let mut out = Vec::new();
    let mut idx = 0;
    for arms in EXP3_ARMS {
        let matrices = exp3_gain_matrices(n as usize, arms)?;
        for b1 in EXP3_B1 {
            idx += 1;
            out.extend(check_exp3_bound(b1, n, arms, &matrices, reps, child_seed(seed, idx), exec)?);
        }
    }
    Ok(out)
}

pub fn run_suite(suite: &str, cfg: &ExperimentConfig, exec: &Executor) -> Result<SuiteOutcome> {
    let plan = SuitePlan::resolve(suite, cfg)?;
    let mut header = CsvHeader::new(&format!("verify {suite}"), &plan, plan.seed);
    let mut reports = Vec::new();
    let seed = plan.seed;
    if matches!(suite, "concentration" | "all") {
        reports.extend(concentration_suite(plan.reps, child_seed(seed, 100), exec)?);
    }
    if matches!(suite, "regret" | "all") {
        let (r, info) = regret_suite(plan.n, plan.reps, child_seed(seed, 200), exec)?;
        reports.extend(r);
        for line in info {
            header.push(line);
        }
    }
    if matches!(suite, "exp3" | "all") {
        reports.extend(exp3_suite(plan.n, plan.reps, child_seed(seed, 300), exec)?);
    }
    Ok(SuiteOutcome { header, reports })
}
