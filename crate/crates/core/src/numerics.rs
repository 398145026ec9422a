//! Scalar special functions: `log₊`, the principal Lambert W branch and the
//! expected stopping-time bound built on it.

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// A finite, non-negative real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NonNegReal(f64);

impl NonNegReal {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!("{value} is not a finite non-negative real")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Deref for NonNegReal {
    type Target = f64;

    fn deref(&self) -> &f64 {
        &self.0
    }
}

impl fmt::Display for NonNegReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `max{0, ln x}` for finite `x > 0`.
pub fn log_plus(x: f64) -> Result<NonNegReal> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_plus requires finite x > 0, got {x}")));
    }
    Ok(NonNegReal(log_plus_unchecked(x)))
}

/// `log_plus` without the domain check, for hot loops where `x > 0` holds by
/// construction.
#[inline]
pub(crate) fn log_plus_unchecked(x: f64) -> f64 {
    if x <= 1.0 {
        0.0
    } else {
        x.ln()
    }
}

const HALLEY_TOL: f64 = 1e-14;
const HALLEY_MAX_ITER: usize = 50;

/// Principal branch of the Lambert W function on `[0, ∞)`, i.e. the unique
/// `w ≥ 0` with `w·eʷ = x`.
///
/// Halley iteration from `ln(1 + x)`.
pub fn lambert_w0(x: f64) -> Result<NonNegReal> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("lambert_w0 requires finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(NonNegReal(0.0));
    }
    let mut w = x.ln_1p();
    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() < HALLEY_TOL * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(NonNegReal(w.max(0.0)))
}

/// Upper bound on the expected stopping time of a suboptimal arm:
/// `40/Δ̄² + (64/Δ̄²)·W(n_j·Δ̄²/64)`.
pub fn tau_bound(n_j: f64, delta_bar: f64) -> Result<NonNegReal> {
    if !(delta_bar > 0.0) || !delta_bar.is_finite() {
        return Err(Error::Domain(format!(
            "stopping-time bound requires a positive shifted gap, got {delta_bar}"
        )));
    }
    if !(n_j > 0.0) || !n_j.is_finite() {
        return Err(Error::Domain(format!("n_j must be positive, got {n_j}")));
    }
    let d2 = delta_bar * delta_bar;
    let w = lambert_w0(n_j * d2 / 64.0)?;
    NonNegReal::new(40.0 / d2 + 64.0 / d2 * w.get())
}
