//! Central differences of a series and the discrete wavelet scalogram of
//! those differences.
//!
//! The scalogram cell at scale `a` and shift `b` is the inner product of the
//! second-difference series with the child wavelet sampled at the series'
//! own times:
//!
//! ```text
//! index(a, b) = sum_n d2[n] * psi((t[n] - b)/a) / sqrt(a)
//! ```
//!
//! which approximates the continuous wavelet transform of the series' second
//! derivative. For a series that locally follows a logistic wave with
//! parameters `(a*, b*, y_sat)`, the surface attains its extremum at
//! `(a*, b*)` with value `y_sat / (sqrt(30) * a*^(3/2))`, so wave parameters
//! can be read off the extremum and the saturation recovered from the cell
//! value (see [`crate::extract`]).
//!
//! No padding is applied: wavelet tails extending beyond the data are
//! truncated by the finite sum, so cells within about three dilations of the
//! series boundary carry edge bias.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::logwavelet::{child_psi2_raw, SQRT_30, SUPPORT_RADIUS};
use crate::numeric::{ceil, floor, pairwise_sum_by, positive, sqrt};
use crate::scurve::{LogisticWave, SampledSeries};

/// Order of a central difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    /// `(y[n+1] - y[n-1]) / 2`
    First,
    /// `y[n+1] - 2*y[n] + y[n-1]`
    Second,
}

/// Interior central differences of a uniformly spaced series. Both orders
/// drop the two endpoint samples.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffSeries {
    pub order: DiffOrder,
    /// Times of the interior samples.
    pub t: Vec<f64>,
    /// Difference values (per sample step, not divided by the spacing).
    pub d: Vec<f64>,
    /// The uniform spacing of the source series.
    pub spacing: f64,
}

/// Central differences of `series`; requires at least 3 samples and uniform
/// spacing.
pub fn central_diff(series: &SampledSeries, order: DiffOrder) -> Result<DiffSeries> {
    if series.len() < 3 {
        return Err(Error::SeriesTooShort { len: series.len(), min: 3 });
    }
    let spacing = series.uniform_spacing()?;
    let n = series.len();
    let mut t = Vec::with_capacity(n - 2);
    let mut d = Vec::with_capacity(n - 2);
    for i in 1..n - 1 {
        t.push(series.t[i]);
        d.push(match order {
            DiffOrder::First => (series.y[i + 1] - series.y[i - 1]) / 2.0,
            DiffOrder::Second => series.y[i + 1] - 2.0 * series.y[i] + series.y[i - 1],
        });
    }
    Ok(DiffSeries { order, t, d, spacing })
}

/// The scalogram matrix over a (scale, shift) grid; rows are scales.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalogram {
    /// Scale grid, ascending, all positive.
    pub scales: Vec<f64>,
    /// Shift grid, ascending.
    pub shifts: Vec<f64>,
    /// `index[i][j]` is the cell value at `(scales[i], shifts[j])`.
    pub index: Vec<Vec<f64>>,
}

impl Scalogram {
    pub fn n_scales(&self) -> usize {
        self.scales.len()
    }

    pub fn n_shifts(&self) -> usize {
        self.shifts.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.index[i][j]
    }

    /// Grid coordinates and value of the largest cell.
    pub fn argmax(&self) -> (f64, f64, f64) {
        self.arg_extremum(|v, best| v > best)
    }

    /// Grid coordinates and value of the smallest cell.
    pub fn argmin(&self) -> (f64, f64, f64) {
        self.arg_extremum(|v, best| v < best)
    }

    fn arg_extremum(&self, better: impl Fn(f64, f64) -> bool) -> (f64, f64, f64) {
        let mut bi = 0;
        let mut bj = 0;
        let mut best = self.index[0][0];
        for (i, row) in self.index.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if better(v, best) {
                    bi = i;
                    bj = j;
                    best = v;
                }
            }
        }
        (self.scales[bi], self.shifts[bj], best)
    }
}

/// Inner product of a difference series with the child wavelet at `(a, b)`.
///
/// Terms where the wavelet is below its effective support are skipped; the
/// sum is accumulated pairwise.
pub fn cwt_index(diff: &DiffSeries, a: f64, b: f64) -> Result<f64> {
    if !positive(a) {
        return Err(Error::InvalidParameter("scale a must be finite and > 0"));
    }
    if !b.is_finite() {
        return Err(Error::InvalidParameter("shift b must be finite"));
    }
    Ok(index_unchecked(diff, a, b))
}

fn index_unchecked(diff: &DiffSeries, a: f64, b: f64) -> f64 {
    let radius = SUPPORT_RADIUS * a;
    let lo = diff.t.partition_point(|&t| t < b - radius);
    let hi = diff.t.partition_point(|&t| t <= b + radius);
    if lo >= hi {
        return 0.0;
    }
    pairwise_sum_by(lo, hi, &|i| diff.d[i] * child_psi2_raw(a, b, diff.t[i]))
}

/// One scalogram row: the index values at a fixed scale across all shifts.
pub fn cwt_row(diff: &DiffSeries, a: f64, shifts: &[f64]) -> Vec<f64> {
    shifts.iter().map(|&b| index_unchecked(diff, a, b)).collect()
}

/// Grid checks shared by every scalogram engine: nonempty, strictly
/// ascending, positive scales, shifts within the data span.
pub fn validate_grids(diff: &DiffSeries, scales: &[f64], shifts: &[f64]) -> Result<()> {
    if scales.is_empty() || shifts.is_empty() {
        return Err(Error::InvalidGrid("scale and shift grids must be nonempty"));
    }
    if scales.iter().any(|&a| !positive(a)) {
        return Err(Error::InvalidGrid("scales must be finite and positive"));
    }
    if scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("scales must be strictly ascending"));
    }
    if shifts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("shifts must be strictly ascending"));
    }
    let (t0, t1) = (diff.t[0], diff.t[diff.t.len() - 1]);
    if shifts[0] < t0 || shifts[shifts.len() - 1] > t1 {
        return Err(Error::InvalidGrid("shifts must lie within the data span"));
    }
    Ok(())
}

/// Full scalogram of a difference series over the given grids; deterministic
/// (bit-identical for identical inputs).
pub fn scalogram(diff: &DiffSeries, scales: &[f64], shifts: &[f64]) -> Result<Scalogram> {
    validate_grids(diff, scales, shifts)?;
    let index = scales.iter().map(|&a| cwt_row(diff, a, shifts)).collect();
    Ok(Scalogram { scales: scales.to_vec(), shifts: shifts.to_vec(), index })
}

/// Strategy for evaluating scalograms. Rows are independent, so
/// implementations may compute them in parallel as long as the assembled
/// matrix is identical to the sequential result.
pub trait ScalogramEngine {
    fn scalogram(&self, diff: &DiffSeries, scales: &[f64], shifts: &[f64]) -> Result<Scalogram>;
}

/// Row-by-row evaluation on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct SequentialEngine;

impl ScalogramEngine for SequentialEngine {
    fn scalogram(&self, diff: &DiffSeries, scales: &[f64], shifts: &[f64]) -> Result<Scalogram> {
        scalogram(diff, scales, shifts)
    }
}

/// Verification oracle for the extremum property: builds the exact second
/// derivative of `wave` on the integer sample grid, computes its scalogram
/// over the given grids, and returns the grid point of the extremum
/// (maximum for positive saturation, minimum for negative).
///
/// The grids must bracket `(wave.a, wave.b)`; the returned point is expected
/// to be the grid point nearest them.
pub fn extremum_oracle(wave: &LogisticWave, scales: &[f64], shifts: &[f64]) -> Result<(f64, f64)> {
    if scales.is_empty() || shifts.is_empty() {
        return Err(Error::InvalidGrid("scale and shift grids must be nonempty"));
    }
    if !(scales[0] <= wave.a && wave.a <= scales[scales.len() - 1]) {
        return Err(Error::GridDoesNotBracket);
    }
    if !(shifts[0] <= wave.b && wave.b <= shifts[shifts.len() - 1]) {
        return Err(Error::GridDoesNotBracket);
    }
    // sample y'' far enough past the shift grid to cover the wave's mass
    let pad = 8.0 * wave.a;
    let lo = floor((shifts[0] - pad).min(wave.b - pad)) as i64;
    let hi = ceil((shifts[shifts.len() - 1] + pad).max(wave.b + pad)) as i64;
    let amplitude = wave.y_sat / (SQRT_30 * wave.a * sqrt(wave.a));
    let mut t = Vec::with_capacity((hi - lo + 1) as usize);
    let mut d = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let tn = n as f64;
        t.push(tn);
        d.push(amplitude * child_psi2_raw(wave.a, wave.b, tn));
    }
    let diff = DiffSeries { order: DiffOrder::Second, t, d, spacing: 1.0 };
    let sg = scalogram(&diff, scales, shifts)?;
    let (a, b, _) = if wave.y_sat > 0.0 { sg.argmax() } else { sg.argmin() };
    Ok((a, b))
}

/// Geometric scale grid `2^(k/voices)` from 1 up to `span/8`.
pub fn geometric_scales(span: f64, voices_per_octave: u32) -> Vec<f64> {
    let mut scales = Vec::new();
    let top = span / 8.0;
    let mut k = 0u32;
    loop {
        let a = libm_pow2(k as f64 / voices_per_octave as f64);
        if a > top * (1.0 + 1e-12) {
            break;
        }
        scales.push(a);
        k += 1;
    }
    scales
}

#[inline]
fn libm_pow2(x: f64) -> f64 {
    crate::numeric::exp(x * core::f64::consts::LN_2)
}
