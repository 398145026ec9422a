//! `pareto-bandit` command-line tool.
//!
//! Exit codes: 0 success / member / all checks pass, 1 usage or
//! configuration error, 2 non-member or a failed check.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pareto_bandit::environments::Noise;
use pareto_bandit::experiments::{
    build_policy, fig1, fig2, format_vector, parse_vector, run_suite, CsvHeader, ExperimentConfig,
    Fig1Plan, Fig2Plan, DEFAULT_N, DEFAULT_REPS, DEFAULT_SEED,
};
use pareto_bandit::frontier::{contains, harmonic_point, lower_bound_certificate, power_point, uniform_point};
use pareto_bandit::simulation::{monte_carlo, run_episode_seeded, write_trace};
use pareto_bandit::{BoundVector, Executor, FrontierReport, StochasticInstance};

#[derive(Parser)]
#[command(name = "pareto-bandit", version, about = "Pareto regret frontier experiments for multi-armed bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two arms, μ = (0, −Δ): MOSS against Unbalanced MOSS.
    Fig1(FigArgs),
    /// K arms, one-hot means: MOSS against Unbalanced MOSS.
    Fig2 {
        #[command(flatten)]
        args: FigArgs,
        /// Restrict to these 1-based optimal arms (comma separated).
        #[arg(long, value_delimiter = ',')]
        i_star: Option<Vec<usize>>,
    },
    /// Frontier membership and constructions.
    #[command(subcommand)]
    Frontier(FrontierCommand),
    /// Empirical checks of the regret and concentration bounds.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo run of one policy on one stochastic instance.
    Simulate(SimulateArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Horizon.
    #[arg(long)]
    n: Option<u64>,
    /// Number of arms.
    #[arg(long)]
    k: Option<usize>,
    /// Replications per instance.
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores, 1 = sequential).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct FigArgs {
    #[command(flatten)]
    common: Common,
    /// Unbalanced MOSS bounds: uniform | moss | harmonic:B1 | power:p | b1,b2,…
    #[arg(long)]
    b: Option<String>,
}

#[derive(Subcommand)]
enum FrontierCommand {
    /// Is the vector B in the frontier set?
    Check {
        #[arg(long)]
        n: u64,
        /// Comma-separated bounds; `n` stands for the horizon.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Prints a frontier point.
    Point {
        #[arg(long, value_enum)]
        kind: PointKind,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        /// Favoured-arm bound (harmonic).
        #[arg(long)]
        b1: Option<f64>,
        /// Exponent with B1 = n^p (power).
        #[arg(long)]
        p: Option<String>,
        /// Decimal places.
        #[arg(long, default_value_t = 4)]
        precision: usize,
    },
    /// Membership of min{n, 8(R_i + K)} for a worst-case regret vector R.
    Certificate {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PointKind {
    Uniform,
    Harmonic,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Concentration,
    Regret,
    Exp3,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Concentration => "concentration",
            Suite::Regret => "regret",
            Suite::Exp3 => "exp3",
            Suite::All => "all",
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// umoss | moss | uucb | ucb | exp3g
    #[arg(long)]
    policy: Option<String>,
    /// Bounds for umoss/uucb, as in `fig1 --b`.
    #[arg(long)]
    b: Option<String>,
    /// Favoured-arm bound for exp3g.
    #[arg(long)]
    b1: Option<f64>,
    /// Comma-separated arm means.
    #[arg(long, allow_hyphen_values = true)]
    means: Option<String>,
    /// gaussian | bernoulli
    #[arg(long)]
    noise: Option<Noise>,
    /// Writes the step-by-step trace of the first replication here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Fig1(args) => {
            let (cfg, exec) = prepare(&args.common, "fig1", args.b.as_deref())?;
            let plan = Fig1Plan::resolve(&cfg)?;
            emit(&fig1(&plan, &exec)?.to_csv(), cfg.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fig2 { args, i_star } => {
            let (cfg, exec) = prepare(&args.common, "fig2", args.b.as_deref())?;
            let mut plan = Fig2Plan::resolve(&cfg)?;
            if let Some(i_stars) = i_star {
                plan = plan.with_i_stars(i_stars)?;
            }
            emit(&fig2(&plan, &exec)?.to_csv(), cfg.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Frontier(cmd) => frontier(cmd),
        Command::Verify { suite, common } => {
            let (cfg, exec) = prepare(&common, "verify", None)?;
            let outcome = run_suite(suite.name(), &cfg, &exec)?;
            let csv = outcome.to_csv();
            match cfg.out.as_deref() {
                Some(path) => {
                    write_file(path, &csv)?;
                    for r in &outcome.reports {
                        println!("{r}");
                    }
                }
                None => {
                    print!("{csv}");
                    for r in &outcome.reports {
                        eprintln!("{r}");
                    }
                }
            }
            Ok(if outcome.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Simulate(args) => simulate(args),
    }
}

/// Loads `--config` and lays the flags over it.
fn prepare(common: &Common, experiment: &str, b: Option<&str>) -> anyhow::Result<(ExperimentConfig, Executor)> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(name) = &cfg.experiment {
        if name != experiment {
            bail!("config is for experiment `{name}`, not `{experiment}`");
        }
    }
    cfg.n = common.n.or(cfg.n);
    cfg.k = common.k.or(cfg.k);
    cfg.reps = common.reps.or(cfg.reps);
    cfg.seed = common.seed.or(cfg.seed);
    cfg.out = common.out.clone().or(cfg.out);
    if let Some(b) = b {
        cfg.block_mut("umoss").b = Some(b.to_string());
    }
    let exec = Executor::with_threads(common.threads)?;
    Ok((cfg, exec))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(r: &FrontierReport) -> ExitCode {
    println!("member: {}", r.member);
    println!("slack: {}", format_vector(&r.slack, None));
    if r.member {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn frontier(cmd: FrontierCommand) -> anyhow::Result<ExitCode> {
    match cmd {
        FrontierCommand::Check { n, b } => {
            let bounds = parse_vector(&b, Some(n as f64)).context("--b")?;
            Ok(report(&contains(&BoundVector::new(n, bounds)?)))
        }
        FrontierCommand::Certificate { n, r } => {
            let regret = parse_vector(&r, Some(n as f64)).context("--r")?;
            Ok(report(&lower_bound_certificate(&regret, n)?))
        }
        FrontierCommand::Point { kind, n, k, b1, p, precision } => {
            let point = match kind {
                PointKind::Uniform => uniform_point(n, k)?,
                PointKind::Harmonic => {
                    let b1 = b1.context("--kind harmonic needs --b1")?;
                    harmonic_point(b1, n, k)?
                }
                PointKind::Power => {
                    let p = p.context("--kind power needs --p")?;
                    let p = parse_vector(&p, None).context("--p")?;
                    let [p] = p[..] else { bail!("--p takes a single number") };
                    power_point(p, n, k)?
                }
            };
            println!("{}", format_vector(point.bounds(), Some(precision)));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let (mut cfg, exec) = prepare(&args.common, "simulate", None)?;
    let policy = args.policy.or(cfg.policy.take()).unwrap_or_else(|| "umoss".into());
    if let Some(b) = args.b {
        cfg.block_mut(&policy).b = Some(b);
    }
    if let Some(b1) = args.b1 {
        cfg.block_mut(&policy).b1 = Some(b1);
    }
    let means = match args.means {
        Some(text) => parse_vector(&text, None).context("--means")?,
        None => cfg.means.clone().context("simulate needs --means")?,
    };
    let noise = args.noise.or(cfg.noise).unwrap_or(Noise::GaussianUnit);
    let n = cfg.n.unwrap_or(DEFAULT_N);
    let reps = cfg.reps.unwrap_or(DEFAULT_REPS);
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    if let Some(k) = cfg.k {
        if k != means.len() {
            bail!("--k {k} disagrees with {} means", means.len());
        }
    }
    let instance = StochasticInstance::new(means, noise)?;
    let block = cfg.block(&policy);
    let spec = build_policy(&policy, &block, n, instance.arms())?;

    let plan = serde_json::json!({
        "n": n,
        "k": instance.arms(),
        "reps": reps,
        "policy": spec,
        "means": instance.means(),
        "noise": instance.noise(),
    });
    let est = monte_carlo(&spec, &instance, n, reps, seed, &exec)?;
    let mut csv = CsvHeader::new("simulate", &plan, seed).render();
    csv.push_str("arm,mean,stderr\n");
    for (i, (m, s)) in est.mean.iter().zip(&est.stderr).enumerate() {
        csv.push_str(&format!("{},{m},{s}\n", i + 1));
    }
    emit(&csv, cfg.out.as_deref())?;

    if let Some(path) = args.trace {
        // replication 0 of the Monte Carlo run
        let ep = run_episode_seeded(&spec, &instance, n, seed, true)?;
        write_trace(ep.trace.as_deref().unwrap_or_default(), &path)?;
    }
    Ok(ExitCode::SUCCESS)
}
