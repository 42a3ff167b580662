//! Closed-form S-curves: Gompertz, logistic, and multilogistic evaluation,
//! uniform sampling, and finite-difference checks against the defining ODEs.
//!
//! The ODE residual functions exist as test oracles; sampling always uses
//! the closed forms.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::{abs, exp, floor, ln, positive, round, sigmoid};

/// Gompertz curve `x_sat * exp(-exp(-s*(t - t0)))`.
///
/// `t0` is both the integration constant and the inflection point; the curve
/// attains `x_sat/e` there. The initial value `x(0)` is derived, not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GompertzParams {
    /// Saturation level (upper asymptote), > 0.
    pub x_sat: f64,
    /// Growth rate in 1/time, > 0.
    pub s: f64,
    /// Inflection time.
    pub t0: f64,
}

impl GompertzParams {
    pub fn new(x_sat: f64, s: f64, t0: f64) -> Result<Self> {
        if !positive(x_sat) {
            return Err(Error::InvalidParameter("Gompertz x_sat must be finite and > 0"));
        }
        if !positive(s) {
            return Err(Error::InvalidParameter("Gompertz s must be finite and > 0"));
        }
        if !t0.is_finite() {
            return Err(Error::InvalidParameter("Gompertz t0 must be finite"));
        }
        Ok(Self { x_sat, s, t0 })
    }

    /// Curve value at `t`. Monotone increasing from 0 to `x_sat`.
    pub fn eval(&self, t: f64) -> f64 {
        self.x_sat * exp(-exp(-self.s * (t - self.t0)))
    }

    /// The inflection time (where the second derivative changes sign).
    pub fn inflection(&self) -> f64 {
        self.t0
    }

    /// Derived initial value `x(0) = x_sat * exp(-exp(s*t0))`.
    pub fn initial_value(&self) -> f64 {
        self.x_sat * exp(-exp(self.s * self.t0))
    }

    /// Residual of the Gompertz ODE `x' = s*x*log(x_sat/x)` at `t`, with the
    /// derivative estimated by a centered difference of step `h`. O(h^2) for
    /// valid parameters; a test oracle for the closed form.
    pub fn ode_residual(&self, t: f64, h: f64) -> Result<f64> {
        if !positive(h) {
            return Err(Error::NonpositiveStep);
        }
        let x = self.eval(t);
        if !positive(x) {
            return Err(Error::DomainError("Gompertz value underflowed to 0"));
        }
        let deriv = (self.eval(t + h) - self.eval(t - h)) / (2.0 * h);
        Ok(deriv - self.s * x * ln(self.x_sat / x))
    }
}

/// One logistic component `y_sat / (1 + exp(-(t - b)/a))`.
///
/// `a` is the dilation (the steepness is `1/a`), `b` the center/inflection
/// time where the wave attains `y_sat/2`. Negative `y_sat` encodes a
/// decreasing (inhibitory) wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticWave {
    /// Dilation in time units, > 0.
    pub a: f64,
    /// Center (inflection) time.
    pub b: f64,
    /// Saturation level, any sign but nonzero.
    pub y_sat: f64,
}

impl LogisticWave {
    pub fn new(a: f64, b: f64, y_sat: f64) -> Result<Self> {
        if !positive(a) {
            return Err(Error::InvalidParameter("wave dilation a must be finite and > 0"));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParameter("wave center b must be finite"));
        }
        if !(y_sat.is_finite() && y_sat != 0.0) {
            return Err(Error::InvalidParameter("wave y_sat must be finite and nonzero"));
        }
        Ok(Self { a, b, y_sat })
    }

    /// Wave value at `t`. Saturates cleanly for extreme arguments.
    pub fn eval(&self, t: f64) -> f64 {
        self.y_sat * sigmoid((t - self.b) / self.a)
    }

    /// Steepness `s = 1/a` of the equivalent rate parameterization.
    pub fn steepness(&self) -> f64 {
        1.0 / self.a
    }

    /// Residual of the logistic ODE `x' = (s/y_sat)*x*(y_sat - x)` at `t`
    /// (with `s = 1/a`), derivative by centered difference of step `h`.
    pub fn ode_residual(&self, t: f64, h: f64) -> Result<f64> {
        if !positive(h) {
            return Err(Error::NonpositiveStep);
        }
        let x = self.eval(t);
        let deriv = (self.eval(t + h) - self.eval(t - h)) / (2.0 * h);
        Ok(deriv - self.steepness() / self.y_sat * x * (self.y_sat - x))
    }
}

/// An ordered sum of logistic waves.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilogisticModel {
    pub waves: Vec<LogisticWave>,
}

impl MultilogisticModel {
    pub fn new(waves: Vec<LogisticWave>) -> Result<Self> {
        if waves.is_empty() {
            return Err(Error::EmptyModel);
        }
        Ok(Self { waves })
    }

    /// Sum of the component values at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.waves.iter().map(|w| w.eval(t)).sum()
    }

    /// Sum of the component saturation levels (the model's upper asymptote).
    pub fn saturation_sum(&self) -> f64 {
        self.waves.iter().map(|w| w.y_sat).sum()
    }
}

/// A uniformly sampled (by construction or by check) time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    /// Sample times, strictly increasing.
    pub t: Vec<f64>,
    /// Sample values, same length as `t`.
    pub y: Vec<f64>,
}

impl SampledSeries {
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() < 3 {
            return Err(Error::SeriesTooShort { len: t.len(), min: 3 });
        }
        if t.len() != y.len() {
            return Err(Error::InvalidParameter("t and y must have the same length"));
        }
        if t.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("series values must be finite"));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("sample times must be strictly increasing"));
        }
        Ok(Self { t, y })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// The common spacing when the series is uniform (relative tolerance
    /// 1e-9), otherwise an error.
    pub fn uniform_spacing(&self) -> Result<f64> {
        let dt = self.t[1] - self.t[0];
        for w in self.t.windows(2) {
            if abs(w[1] - w[0] - dt) > 1e-9 * abs(dt) {
                return Err(Error::NonUniformSpacing);
            }
        }
        Ok(dt)
    }

    /// (min, max) of the sample values.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = self.y[0];
        let mut hi = self.y[0];
        for &v in &self.y {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (lo, hi)
    }
}

/// Sample a curve uniformly on `[t_start, t_end]` with the given step,
/// inclusive of both endpoints when the step divides the span (within
/// floating tolerance).
pub fn sample_curve<F: Fn(f64) -> f64>(
    f: F,
    t_start: f64,
    t_end: f64,
    step: f64,
) -> Result<SampledSeries> {
    if !positive(step) {
        return Err(Error::NonpositiveStep);
    }
    let ordered = t_end > t_start;
    if !ordered {
        return Err(Error::InvalidParameter("t_end must exceed t_start"));
    }
    let span = t_end - t_start;
    let n_exact = span / step;
    let n = if abs(n_exact - round(n_exact)) <= 1e-9 * n_exact.max(1.0) {
        round(n_exact) as usize
    } else {
        floor(n_exact) as usize
    };
    let mut t = Vec::with_capacity(n + 1);
    let mut y = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let ti = t_start + i as f64 * step;
        t.push(ti);
        y.push(f(ti));
    }
    SampledSeries::new(t, y)
}
