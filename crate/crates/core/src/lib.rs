//! Unbalanced stochastic and adversarial bandits.
//!
//! The crate covers four layers:
//!
//! * [`frontier`]: the set of achievable worst-case regret vectors, its
//!   canonical boundary points and the lower-bound certificate.
//! * [`environments`] and [`policies`]: Gaussian/Bernoulli instances,
//!   adversarial gain tables, Unbalanced MOSS, Unbalanced UCB, UCB and a
//!   biased-prior Exp3-γ.
//! * [`simulation`]: reproducible, parallel Monte Carlo estimation of
//!   pseudo-regret and grid scans of worst-case regret.
//! * [`verification`] and [`experiments`]: one-sided statistical checks of
//!   the concentration and regret inequalities, and the figure
//!   reproductions driven by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod environments;
pub mod error;
pub mod experiments;
pub mod frontier;
pub mod numerics;
pub mod policies;
pub mod simulation;
pub mod verification;

pub use environments::{GainMatrix, GapTable, Noise, StochasticInstance};
pub use error::{Error, Result};
pub use frontier::{BoundVector, FrontierReport};
pub use policies::{Exp3Params, PolicySpec, PolicyState, UnbalancedParams};
pub use simulation::{EpisodeResult, Executor, RegretEstimate, WorstCaseEstimate};
pub use verification::{BoundCheckReport, CheckStatus};

/// Version string recorded in every CSV header.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
