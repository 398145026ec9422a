//! MOSS versus Unbalanced MOSS on the two-arm and ten-arm sweeps.
//!
//! "MOSS" is Unbalanced MOSS with uniform `B_i = √(nK)`, which selects the
//! same arm as the classical MOSS index. Regret columns are pseudo-regret
//! against the optimal arm of each instance. Both policies share the
//! per-instance master seed `child_seed(seed, g)` where `g` is the row index.

use serde::Serialize;

use super::output::CsvHeader;
use super::{BoundSpec, ExperimentConfig, GridSpec};
use crate::environments::StochasticInstance;
use crate::error::{Error, Result};
use crate::policies::{PolicySpec, UnbalancedParams};
use crate::simulation::{child_seed, monte_carlo, Executor, RegretEstimate};

pub const DEFAULT_REPS: usize = 2000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_N: u64 = 5000;

pub trait CsvRow {
    fn csv_row(&self) -> String;
}

pub struct FigureResult<R> {
    pub header: CsvHeader,
    pub columns: &'static str,
    pub rows: Vec<R>,
}

impl<R: CsvRow> FigureResult<R> {
    pub fn to_csv(&self) -> String {
        let mut out = self.header.render();
        out.push_str(self.columns);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.csv_row());
            out.push('\n');
        }
        out
    }
}

fn optimal(est: &RegretEstimate, inst: &StochasticInstance) -> (f64, f64) {
    let star = inst.gaps().optimal_arm;
    (est.mean[star], est.stderr[star])
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Plan {
    pub n: u64,
    pub k: usize,
    pub reps: usize,
    pub umoss_bounds: Vec<f64>,
    pub moss_bounds: Vec<f64>,
    pub deltas: Vec<f64>,
    #[serde(skip)]
    pub seed: u64,
}

impl Fig1Plan {
    pub fn resolve(cfg: &ExperimentConfig) -> Result<Self> {
        let n = cfg.n.unwrap_or(DEFAULT_N);
        let k = cfg.k.unwrap_or(2);
        if k != 2 {
            return Err(Error::config("k", "fig1 is a two-arm experiment"));
        }
        let reps = resolve_reps(cfg)?;
        let b: BoundSpec = cfg.block("umoss").b.as_deref().unwrap_or("power:1/3").parse()?;
        let grid = cfg.grid.unwrap_or(GridSpec {
            start: -0.5,
            stop: 0.5,
            step: 0.025,
        });
        let deltas = grid.values()?;
        if deltas.iter().any(|d| d.abs() > 1.0) {
            return Err(Error::config("grid", "fig1 gaps must lie in [-1, 1]"));
        }
        Ok(Self {
            n,
            k,
            reps,
            umoss_bounds: b.resolve(n, k)?.bounds().to_vec(),
            moss_bounds: UnbalancedParams::moss(n, k)?.bounds().bounds().to_vec(),
            deltas,
            seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

fn resolve_reps(cfg: &ExperimentConfig) -> Result<usize> {
    let reps = cfg.reps.unwrap_or(DEFAULT_REPS);
    if reps < 2 {
        return Err(Error::config("reps", "must be at least 2"));
    }
    Ok(reps)
}

fn policies(n: u64, umoss: &[f64], moss: &[f64]) -> Result<(PolicySpec, PolicySpec)> {
    use crate::frontier::BoundVector;
    let eps = crate::policies::DEFAULT_UCB_EPS;
    Ok((
        PolicySpec::UnbalancedMoss(UnbalancedParams::new(BoundVector::new(n, moss.to_vec())?, eps)?),
        PolicySpec::UnbalancedMoss(UnbalancedParams::new(BoundVector::new(n, umoss.to_vec())?, eps)?),
    ))
}

/// Instances `μ = (0, −Δ)`.
pub fn fig1_grid(deltas: &[f64]) -> Result<Vec<StochasticInstance>> {
    deltas
        .iter()
        .map(|&d| StochasticInstance::gaussian(vec![0.0, -d]))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Fig1Row {
    pub delta: f64,
    pub instance: StochasticInstance,
    pub moss: RegretEstimate,
    pub umoss: RegretEstimate,
}

impl CsvRow for Fig1Row {
    fn csv_row(&self) -> String {
        let (m, ms) = optimal(&self.moss, &self.instance);
        let (u, us) = optimal(&self.umoss, &self.instance);
        format!("{},{m},{ms},{u},{us}", self.delta)
    }
}

pub fn fig1(plan: &Fig1Plan, exec: &Executor) -> Result<FigureResult<Fig1Row>> {
    let (moss, umoss) = policies(plan.n, &plan.umoss_bounds, &plan.moss_bounds)?;
    let grid = fig1_grid(&plan.deltas)?;
    let rows = grid
        .into_iter()
        .zip(&plan.deltas)
        .enumerate()
        .map(|(g, (instance, &delta))| {
            let seed = child_seed(plan.seed, g as u64);
            Ok(Fig1Row {
                delta,
                moss: monte_carlo(&moss, &instance, plan.n, plan.reps, seed, exec)?,
                umoss: monte_carlo(&umoss, &instance, plan.n, plan.reps, seed, exec)?,
                instance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureResult {
        header: CsvHeader::new("fig1", plan, plan.seed),
        columns: "delta,moss_regret,moss_stderr,umoss_regret,umoss_stderr",
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Plan {
    pub n: u64,
    pub k: usize,
    pub reps: usize,
    pub umoss_bounds: Vec<f64>,
    pub moss_bounds: Vec<f64>,
    pub deltas: Vec<f64>,
    /// 1-based optimal arms to sweep.
    pub i_stars: Vec<usize>,
    #[serde(skip)]
    pub seed: u64,
}

impl Fig2Plan {
    pub fn resolve(cfg: &ExperimentConfig) -> Result<Self> {
        let n = cfg.n.unwrap_or(DEFAULT_N);
        let k = cfg.k.unwrap_or(10);
        if k < 2 {
            return Err(Error::config("k", "need at least 2 arms"));
        }
        let reps = resolve_reps(cfg)?;
        let b: BoundSpec = cfg.block("umoss").b.as_deref().unwrap_or("power:1/2").parse()?;
        let grid = cfg.grid.unwrap_or(GridSpec {
            start: 0.0,
            stop: 0.5,
            step: 0.025,
        });
        let deltas = grid.values()?;
        if deltas.iter().any(|d| d.abs() > 1.0) {
            return Err(Error::config("grid", "fig2 gaps must lie in [-1, 1]"));
        }
        Ok(Self {
            n,
            k,
            reps,
            umoss_bounds: b.resolve(n, k)?.bounds().to_vec(),
            moss_bounds: UnbalancedParams::moss(n, k)?.bounds().bounds().to_vec(),
            deltas,
            i_stars: (1..=k).collect(),
            seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        })
    }

    /// Restricts the sweep to the given 1-based optimal arms.
    pub fn with_i_stars(mut self, i_stars: Vec<usize>) -> Result<Self> {
        if i_stars.iter().any(|&i| i == 0 || i > self.k) {
            return Err(Error::config("i_stars", format!("entries must lie in 1..={}", self.k)));
        }
        self.i_stars = i_stars;
        Ok(self)
    }
}

/// Instances `μ_k = Δ·1{k = i*}`, ordered by `i*` then `Δ`.
pub fn fig2_grid(deltas: &[f64], i_stars: &[usize], arms: usize) -> Result<Vec<(usize, f64, StochasticInstance)>> {
    let mut out = Vec::with_capacity(deltas.len() * i_stars.len());
    for &i_star in i_stars {
        for &d in deltas {
            let mut means = vec![0.0; arms];
            means[i_star - 1] = d;
            out.push((i_star, d, StochasticInstance::gaussian(means)?));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Fig2Row {
    pub i_star: usize,
    pub delta: f64,
    pub instance: StochasticInstance,
    pub moss: RegretEstimate,
    pub umoss: RegretEstimate,
}

impl Fig2Row {
    pub fn theta(&self) -> f64 {
        self.delta + (self.i_star as f64 - 1.0) / 2.0
    }
}

impl CsvRow for Fig2Row {
    fn csv_row(&self) -> String {
        let (m, ms) = optimal(&self.moss, &self.instance);
        let (u, us) = optimal(&self.umoss, &self.instance);
        format!("{},{},{},{m},{ms},{u},{us}", self.theta(), self.i_star, self.delta)
    }
}

pub fn fig2(plan: &Fig2Plan, exec: &Executor) -> Result<FigureResult<Fig2Row>> {
    let (moss, umoss) = policies(plan.n, &plan.umoss_bounds, &plan.moss_bounds)?;
    let rows = fig2_grid(&plan.deltas, &plan.i_stars, plan.k)?
        .into_iter()
        .enumerate()
        .map(|(g, (i_star, delta, instance))| {
            // seed keyed by the (i*, Δ) position in the full sweep so that
            // restricting i_stars leaves the remaining rows unchanged
            let d_idx = plan.deltas.iter().position(|&x| x == delta).unwrap_or(g);
            let key = ((i_star - 1) * plan.deltas.len() + d_idx) as u64;
            let seed = child_seed(plan.seed, key);
            Ok(Fig2Row {
                i_star,
                delta,
                moss: monte_carlo(&moss, &instance, plan.n, plan.reps, seed, exec)?,
                umoss: monte_carlo(&umoss, &instance, plan.n, plan.reps, seed, exec)?,
                instance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FigureResult {
        header: CsvHeader::new("fig2", plan, plan.seed),
        columns: "theta,i_star,delta,moss_regret,moss_stderr,umoss_regret,umoss_stderr",
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            n: Some(300),
            reps: Some(20),
            grid: Some(GridSpec { start: -0.5, stop: 0.5, step: 0.5 }),
            ..Default::default()
        }
    }

    #[test]
    fn fig1_defaults() {
        let plan = Fig1Plan::resolve(&ExperimentConfig::default()).unwrap();
        assert_eq!(plan.n, 5000);
        assert_eq!(plan.reps, 2000);
        assert_eq!(plan.deltas.len(), 41);
        assert!((plan.umoss_bounds[0] - 17.0998).abs() < 1e-4);
        let bad = ExperimentConfig { k: Some(3), ..Default::default() };
        assert!(matches!(Fig1Plan::resolve(&bad), Err(Error::Config { .. })));
        let bad = ExperimentConfig { reps: Some(1), ..Default::default() };
        assert!(matches!(Fig1Plan::resolve(&bad), Err(Error::Config { field, .. }) if field == "reps"));
    }

    #[test]
    fn fig1_small_run() {
        let plan = Fig1Plan::resolve(&small_cfg()).unwrap();
        let res = fig1(&plan, &Executor::sequential()).unwrap();
        let csv = res.to_csv();
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "delta,moss_regret,moss_stderr,umoss_regret,umoss_stderr");
        assert_eq!(body.len(), 4);
        assert!(body[2].starts_with("0,"));
        assert_eq!(csv, fig1(&plan, &Executor::sequential()).unwrap().to_csv());
    }

    #[test]
    fn fig2_small_run() {
        let cfg = ExperimentConfig {
            n: Some(300),
            k: Some(3),
            reps: Some(10),
            grid: Some(GridSpec { start: 0.0, stop: 0.5, step: 0.5 }),
            ..Default::default()
        };
        let plan = Fig2Plan::resolve(&cfg).unwrap();
        let res = fig2(&plan, &Executor::sequential()).unwrap();
        assert_eq!(res.rows.len(), 6);
        let last = res.rows.last().unwrap();
        assert_eq!(last.theta(), 1.5);
        assert!(res.to_csv().contains("1.5,3,0.5,"));

        let sub = fig2(&plan.clone().with_i_stars(vec![3]).unwrap(), &Executor::sequential()).unwrap();
        assert_eq!(sub.rows[1].umoss, last.umoss);
    }
}
