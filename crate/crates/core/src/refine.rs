//! Derivative-free refinement of a multilogistic model against a series,
//! plus the fit metrics (max absolute error, RMSE, R^2).
//!
//! The optimizer is Nelder-Mead over the 3k parameters `(ln a_i, b_i,
//! y_sat_i)` with deterministic, seeded multiplicative restarts. Dilations
//! stay positive through the log reparameterization; the minimax objective
//! is evaluated exactly (no smoothing). The refined objective never exceeds
//! the starting one: the best evaluated point is tracked across the whole
//! search and the start is the first evaluation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numeric::{abs, exp, ln, pairwise_sum_by, sigmoid, sqrt, SplitMix64};
use crate::scurve::{LogisticWave, MultilogisticModel, SampledSeries};

/// Objective minimized by [`refine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Maximum absolute residual.
    Minimax,
    /// Sum of squared residuals.
    LeastSquares,
}

/// Optimizer settings. `max_evaluations` is the total budget across the
/// initial run and all restarts.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineConfig {
    pub objective: Objective,
    pub max_evaluations: usize,
    /// Relative scale of the initial simplex steps, per parameter; in (0, 0.5).
    pub initial_step_fraction: f64,
    /// Number of jittered restarts from the best point found so far.
    pub restarts: u32,
    /// Seed for the deterministic restart jitter.
    pub seed: u64,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Minimax,
            max_evaluations: 20_000,
            initial_step_fraction: 0.05,
            restarts: 3,
            seed: 0,
        }
    }
}

/// Residual statistics of a model against a series.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// max |y_n - f(t_n)|
    pub max_abs_error: f64,
    /// sqrt(mean of squared residuals)
    pub rmse: f64,
    /// 1 - SSE/SST; `None` when the series has zero variance.
    pub r_squared: Option<f64>,
    /// y_n - f(t_n), in sample order.
    pub residuals: Vec<f64>,
}

/// Result of a refinement run.
#[derive(Debug, Clone, PartialEq)]
pub struct RefineOutcome {
    pub model: MultilogisticModel,
    pub report: FitReport,
    /// False when the evaluation budget ran out before the simplex met the
    /// convergence criteria; the model is still the best point found.
    pub converged: bool,
    /// Objective evaluations spent.
    pub evaluations: usize,
}

/// Residuals and summary statistics of `model` against `series`.
pub fn fit_metrics(series: &SampledSeries, model: &MultilogisticModel) -> Result<FitReport> {
    if model.waves.is_empty() {
        return Err(Error::EmptyModel);
    }
    let n = series.len();
    let residuals: Vec<f64> =
        series.t.iter().zip(&series.y).map(|(&t, &y)| y - model.eval(t)).collect();
    let max_abs_error = residuals.iter().fold(0.0_f64, |m, &r| m.max(abs(r)));
    let sse = pairwise_sum_by(0, n, &|i| residuals[i] * residuals[i]);
    let rmse = sqrt(sse / n as f64);
    let mean = pairwise_sum_by(0, n, &|i| series.y[i]) / n as f64;
    let sst = pairwise_sum_by(0, n, &|i| {
        let d = series.y[i] - mean;
        d * d
    });
    let r_squared = if sst > 0.0 { Some(1.0 - sse / sst) } else { None };
    Ok(FitReport { max_abs_error, rmse, r_squared, residuals })
}

/// Asymptotic saturation mismatch: the final series value minus the sum of
/// the model's saturation levels. Requires the series to have plateaued:
/// the last value within 1% of the maximum and the trailing tenth of the
/// samples flat to within 1% of the data range.
pub fn residual_tail_gap(series: &SampledSeries, model: &MultilogisticModel) -> Result<f64> {
    if model.waves.is_empty() {
        return Err(Error::EmptyModel);
    }
    let n = series.len();
    let (y_min, y_max) = series.value_range();
    let range = y_max - y_min;
    if range <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let last = series.y[n - 1];
    let tail_start = n - 1 - (n / 10).max(1);
    if y_max - last > 0.01 * range || abs(last - series.y[tail_start]) > 0.01 * range {
        return Err(Error::NotPlateaued);
    }
    Ok(last - model.saturation_sum())
}

// ---- Nelder-Mead ----------------------------------------------------------

struct ObjectiveFn<'a> {
    series: &'a SampledSeries,
    objective: Objective,
    evaluations: usize,
}

impl ObjectiveFn<'_> {
    /// Model value at `t` for packed parameters [ln a, b, y_sat] per wave.
    fn model_value(params: &[f64], t: f64) -> f64 {
        let mut f = 0.0;
        for w in params.chunks_exact(3) {
            f += w[2] * sigmoid((t - w[1]) / exp(w[0]));
        }
        f
    }

    fn eval(&mut self, params: &[f64]) -> f64 {
        self.evaluations += 1;
        match self.objective {
            Objective::Minimax => {
                let mut worst = 0.0_f64;
                for (&t, &y) in self.series.t.iter().zip(&self.series.y) {
                    worst = worst.max(abs(y - Self::model_value(params, t)));
                }
                worst
            }
            Objective::LeastSquares => pairwise_sum_by(0, self.series.len(), &|i| {
                let r = self.series.y[i] - Self::model_value(params, self.series.t[i]);
                r * r
            }),
        }
    }
}

fn params_valid(p: &[f64]) -> bool {
    p.chunks_exact(3).all(|w| {
        let a = exp(w[0]);
        a.is_finite() && a > 0.0 && w[1].is_finite() && w[2].is_finite() && w[2] != 0.0
    })
}

fn pack(model: &MultilogisticModel) -> Vec<f64> {
    let mut p = Vec::with_capacity(model.waves.len() * 3);
    for w in &model.waves {
        p.push(ln(w.a));
        p.push(w.b);
        p.push(w.y_sat);
    }
    p
}

fn unpack(params: &[f64]) -> Result<MultilogisticModel> {
    let waves = params
        .chunks_exact(3)
        .map(|w| LogisticWave::new(exp(w[0]), w[1], w[2]))
        .collect::<Result<Vec<_>>>()?;
    MultilogisticModel::new(waves)
}

/// One Nelder-Mead run. Returns true when the run terminated through a
/// convergence criterion rather than the budget.
#[allow(clippy::needless_range_loop)] // the shrink step reads vertex 0 while writing vertex i
fn nelder_mead_run(
    obj: &mut ObjectiveFn<'_>,
    start: &[f64],
    step_fraction: f64,
    budget: usize,
    spread_tolerance: f64,
    best: &mut (Vec<f64>, f64),
) -> bool {
    let dim = start.len();
    if budget < dim + 2 {
        return false;
    }
    let spent_at_entry = obj.evaluations;
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        v[i] += step_fraction * abs(v[i]).max(1.0);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| obj.eval(v)).collect();
    let consider = |best: &mut (Vec<f64>, f64), v: &[f64], f: f64| {
        if f < best.1 && params_valid(v) {
            best.0 = v.to_vec();
            best.1 = f;
        }
    };
    for (v, &f) in simplex.iter().zip(&values) {
        consider(best, v, f);
    }

    loop {
        // order ascending by objective
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&x, &y| values[x].partial_cmp(&values[y]).unwrap_or(core::cmp::Ordering::Equal));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reordered;
        values = revalues;

        if converged(&simplex, &values, spread_tolerance) {
            return true;
        }
        if obj.evaluations - spent_at_entry >= budget {
            return false;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflect: Vec<f64> =
            (0..dim).map(|k| centroid[k] + (centroid[k] - worst[k])).collect();
        let f_reflect = obj.eval(&reflect);
        consider(best, &reflect, f_reflect);

        if f_reflect < values[0] {
            let expand: Vec<f64> =
                (0..dim).map(|k| centroid[k] + 2.0 * (centroid[k] - worst[k])).collect();
            let f_expand = obj.eval(&expand);
            consider(best, &expand, f_expand);
            if f_expand < f_reflect {
                simplex[dim] = expand;
                values[dim] = f_expand;
            } else {
                simplex[dim] = reflect;
                values[dim] = f_reflect;
            }
        } else if f_reflect < values[dim - 1] {
            simplex[dim] = reflect;
            values[dim] = f_reflect;
        } else {
            let contract: Vec<f64> =
                (0..dim).map(|k| centroid[k] + 0.5 * (worst[k] - centroid[k])).collect();
            let f_contract = obj.eval(&contract);
            consider(best, &contract, f_contract);
            if f_contract < values[dim] {
                simplex[dim] = contract;
                values[dim] = f_contract;
            } else {
                // shrink toward the best vertex
                for i in 1..=dim {
                    for k in 0..dim {
                        simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                    }
                    values[i] = obj.eval(&simplex[i]);
                    let (v, f) = (simplex[i].clone(), values[i]);
                    consider(best, &v, f);
                }
            }
        }
    }
}

/// Simplex diameter below 1e-8 relative (per coordinate, against the best
/// vertex) or objective spread below the given tolerance.
fn converged(simplex: &[Vec<f64>], values: &[f64], spread_tolerance: f64) -> bool {
    let dim = simplex[0].len();
    if values[values.len() - 1] - values[0] < spread_tolerance {
        return true;
    }
    let best = &simplex[0];
    simplex[1..].iter().all(|v| {
        (0..dim).all(|k| abs(v[k] - best[k]) <= 1e-8 * abs(best[k]))
    })
}

/// Minimize the configured objective over the model parameters, starting
/// from `m0`. The returned objective never exceeds the starting one, and
/// the returned report is exactly `fit_metrics` of the returned model.
pub fn refine(
    series: &SampledSeries,
    m0: &MultilogisticModel,
    cfg: &RefineConfig,
) -> Result<RefineOutcome> {
    if m0.waves.is_empty() {
        return Err(Error::EmptyModel);
    }
    if cfg.max_evaluations == 0 {
        return Err(Error::InvalidParameter("max_evaluations must be > 0"));
    }
    let step_ok = cfg.initial_step_fraction > 0.0 && cfg.initial_step_fraction < 0.5;
    if !step_ok {
        return Err(Error::InvalidParameter("initial_step_fraction must be in (0, 0.5)"));
    }
    let (y_min, y_max) = series.value_range();
    let spread_tolerance = 1e-6 * (y_max - y_min);

    let mut obj = ObjectiveFn { series, objective: cfg.objective, evaluations: 0 };
    let start = pack(m0);
    let f_start = obj.eval(&start);
    let mut best = (start.clone(), f_start);
    let mut rng = SplitMix64::new(cfg.seed);

    let runs = cfg.restarts as usize + 1;
    let mut converged_at_best = false;
    for run in 0..runs {
        let origin = if run == 0 {
            start.clone()
        } else {
            // multiplicative jitter of the best model parameters
            let mut m = unpack(&best.0)?;
            for w in &mut m.waves {
                let j = 2.0 * cfg.initial_step_fraction;
                w.a *= 1.0 + j * (2.0 * rng.next_unit() - 1.0);
                w.b *= 1.0 + j * (2.0 * rng.next_unit() - 1.0);
                w.y_sat *= 1.0 + j * (2.0 * rng.next_unit() - 1.0);
            }
            pack(&m)
        };
        let remaining = cfg.max_evaluations.saturating_sub(obj.evaluations);
        if remaining == 0 {
            break;
        }
        let budget = remaining / (runs - run);
        let before = best.1;
        let run_converged = nelder_mead_run(
            &mut obj,
            &origin,
            cfg.initial_step_fraction,
            budget,
            spread_tolerance,
            &mut best,
        );
        if best.1 < before || run == 0 {
            converged_at_best = run_converged;
        }
    }

    let model = unpack(&best.0)?;
    let report = fit_metrics(series, &model)?;
    Ok(RefineOutcome { model, report, converged: converged_at_best, evaluations: obj.evaluations })
}
