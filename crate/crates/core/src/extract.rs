//! Scalogram extremum detection and the iterative residual decomposition.
//!
//! Decomposition proceeds in passes. Each pass takes the second differences
//! of the current residual, evaluates the scalogram, picks the strongest
//! admissible extrema (one wave in the first pass, up to two per pass after
//! that), converts them to logistic waves through the saturation estimate
//! `y_sat = sqrt(30) * a^(3/2) * index`, subtracts the waves, and repeats
//! until the wave budget is spent or nothing admissible remains.
//!
//! A single greedy readout systematically overestimates the saturation of
//! overlapping waves: a wave's scalogram ridge is nearly flat in scale, and
//! neighboring components bleed into the cell picked at the top of the
//! ridge. The pass loop therefore ends with one joint linear least-squares
//! solve for the saturation levels over the detected wave shapes (the
//! amplitude step of orthogonal matching pursuit). Centers and dilations
//! stay as detected; only the saturations are re-solved. For a series
//! containing a single wave this step is a no-op up to rounding.

use alloc::vec;
use alloc::vec::Vec;

use crate::diffcwt::{
    central_diff, geometric_scales, DiffOrder, Scalogram, ScalogramEngine, SequentialEngine,
};
use crate::error::{Error, Result};
use crate::logwavelet::SQRT_30;
use crate::numeric::{abs, ln, pairwise_sum_by, positive, sigmoid, solve_dense, sqrt};
use crate::scurve::{LogisticWave, MultilogisticModel, SampledSeries};

/// Whether an extremum is a local maximum or minimum of the scalogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

/// A strict local extremum of the scalogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalogramExtremum {
    pub a: f64,
    pub b: f64,
    /// Scalogram value at `(a, b)`: positive for maxima, negative for minima.
    pub index_value: f64,
    pub kind: ExtremumKind,
}

/// Scale grid specification for decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleGrid {
    /// Geometric grid `2^(k/voices)` from 1 to (difference-series span)/8.
    Auto { voices_per_octave: u32 },
    /// Explicit ascending positive scales.
    Explicit(Vec<f64>),
}

/// Shift grid specification for decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftGrid {
    /// Every sample time of the difference series.
    EverySample,
    /// Explicit ascending shifts within the data span.
    Explicit(Vec<f64>),
}

/// Tuning knobs of [`decompose`]. The defaults reproduce the reference
/// three-wave workflow.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionConfig {
    /// Maximum number of waves to extract (>= 1).
    pub max_waves: usize,
    /// Reject waves whose |saturation| is below this fraction of the data
    /// range; in (0, 1).
    pub min_saturation_fraction: f64,
    /// Two extrema conflict when they are within this many octaves in scale
    /// ...
    pub exclusion_scale_octaves: f64,
    /// ... and within `factor * max(a1, a2)` samples in shift.
    pub exclusion_shift_factor: f64,
    pub scale_grid: ScaleGrid,
    pub shift_grid: ShiftGrid,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        Self {
            max_waves: 3,
            min_saturation_fraction: 0.02,
            // wide enough that the sub-grid quantization residue of an
            // already-extracted wave (which reads 0.55-0.8 octaves below
            // it) is not re-detected as a wave of its own; deliberately not
            // a multiple of the default 1/16-octave grid spacing, so grid
            // pairs never sit exactly on the boundary
            exclusion_scale_octaves: 0.8,
            exclusion_shift_factor: 2.0,
            scale_grid: ScaleGrid::Auto { voices_per_octave: 16 },
            shift_grid: ShiftGrid::EverySample,
        }
    }
}


impl DecompositionConfig {
    /// True when two (scale, shift) points fall inside one exclusion box:
    /// close in scale (octaves) and close in shift (relative to the larger
    /// dilation).
    fn excludes(&self, a1: f64, b1: f64, a2: f64, b2: f64) -> bool {
        let octaves = abs(ln(a1 / a2)) / core::f64::consts::LN_2;
        let shift_radius = self.exclusion_shift_factor * a1.max(a2);
        octaves <= self.exclusion_scale_octaves && abs(b1 - b2) <= shift_radius
    }

    fn validate(&self) -> Result<()> {
        if self.max_waves < 1 {
            return Err(Error::InvalidParameter("max_waves must be >= 1"));
        }
        let fraction_ok =
            positive(self.min_saturation_fraction) && self.min_saturation_fraction < 1.0;
        if !fraction_ok {
            return Err(Error::InvalidParameter("min_saturation_fraction must be in (0, 1)"));
        }
        let radii_ok = self.exclusion_scale_octaves >= 0.0 && self.exclusion_shift_factor >= 0.0;
        if !radii_ok {
            return Err(Error::InvalidParameter("exclusion radii must be nonnegative"));
        }
        if let ScaleGrid::Auto { voices_per_octave } = self.scale_grid {
            if voices_per_octave == 0 {
                return Err(Error::InvalidParameter("voices_per_octave must be >= 1"));
            }
        }
        Ok(())
    }
}

/// One pass of the decomposition as recorded in the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceIteration {
    /// The residual series this pass analyzed (the original series for the
    /// first pass).
    pub residual: SampledSeries,
    /// The scalogram of the residual's second differences.
    pub scalogram: Scalogram,
    /// The extrema chosen by this pass, strongest first.
    pub extrema: Vec<ScalogramExtremum>,
    /// The waves those extrema produced (scalogram-readout estimates).
    pub waves: Vec<LogisticWave>,
}

/// Audit record of a decomposition: one entry per pass. The residual of
/// pass k equals the source series minus the waves of passes < k.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecompositionTrace {
    pub iterations: Vec<TraceIteration>,
}

/// Strict local extrema of the scalogram in the 8-neighborhood sense,
/// ranked by |value| and greedily filtered by the exclusion radius.
/// Boundary rows and columns cannot certify an extremum and are skipped.
pub fn find_extrema(s: &Scalogram, cfg: &DecompositionConfig) -> Vec<ScalogramExtremum> {
    let rows = s.n_scales();
    let cols = s.n_shifts();
    let mut found: Vec<ScalogramExtremum> = Vec::new();
    for i in 1..rows.saturating_sub(1) {
        for j in 1..cols.saturating_sub(1) {
            let v = s.index[i][j];
            if v == 0.0 {
                continue;
            }
            let mut is_max = v > 0.0;
            let mut is_min = v < 0.0;
            'nb: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let u = s.index[(i as i64 + di) as usize][(j as i64 + dj) as usize];
                    if u >= v {
                        is_max = false;
                    }
                    if u <= v {
                        is_min = false;
                    }
                    if !is_max && !is_min {
                        break 'nb;
                    }
                }
            }
            if is_max || is_min {
                found.push(ScalogramExtremum {
                    a: s.scales[i],
                    b: s.shifts[j],
                    index_value: v,
                    kind: if is_max { ExtremumKind::Maximum } else { ExtremumKind::Minimum },
                });
            }
        }
    }
    found.sort_by(|x, y| {
        abs(y.index_value)
            .partial_cmp(&abs(x.index_value))
            .unwrap()
            .then(x.a.partial_cmp(&y.a).unwrap())
            .then(x.b.partial_cmp(&y.b).unwrap())
    });
    let mut kept: Vec<ScalogramExtremum> = Vec::new();
    for cand in found {
        if !kept.iter().any(|k| cfg.excludes(cand.a, cand.b, k.a, k.b)) {
            kept.push(cand);
        }
    }
    kept
}

/// Saturation level implied by an extremum: `sqrt(30) * a^(3/2) * index`.
/// The sign carries automatically (negative for minima).
pub fn estimate_saturation(e: &ScalogramExtremum) -> f64 {
    SQRT_30 * e.a * sqrt(e.a) * e.index_value
}

/// Convert an extremum into a logistic wave, rejecting waves whose
/// |saturation| falls below `min_abs_saturation`.
pub fn extremum_to_wave(e: &ScalogramExtremum, min_abs_saturation: f64) -> Result<LogisticWave> {
    let y_sat = estimate_saturation(e);
    let admissible = abs(y_sat) >= min_abs_saturation;
    if !admissible || y_sat == 0.0 {
        return Err(Error::WaveTooWeak { y_sat, floor: min_abs_saturation });
    }
    LogisticWave::new(e.a, e.b, y_sat)
}

/// Decompose a series into a sum of logistic waves using the default
/// sequential scalogram evaluation.
pub fn decompose(
    series: &SampledSeries,
    cfg: &DecompositionConfig,
) -> Result<(MultilogisticModel, DecompositionTrace)> {
    decompose_with_engine(series, cfg, &SequentialEngine)
}

/// [`decompose`] with a caller-provided scalogram engine (e.g. a threaded
/// one). The passes themselves are inherently sequential.
pub fn decompose_with_engine<E: ScalogramEngine + ?Sized>(
    series: &SampledSeries,
    cfg: &DecompositionConfig,
    engine: &E,
) -> Result<(MultilogisticModel, DecompositionTrace)> {
    cfg.validate()?;
    let n = series.len();
    if n < 8 {
        return Err(Error::SeriesTooShort { len: n, min: 8 });
    }
    let spacing = series.uniform_spacing()?;
    let t_origin = series.t[0];
    let (y_min, y_max) = series.value_range();
    let range = y_max - y_min;
    if range <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let floor = cfg.min_saturation_fraction * range;

    // all detection happens on the sample-index grid; waves are mapped back
    // to time units at the end
    let index_times: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let diff_span = (n - 3) as f64;
    let scales = match &cfg.scale_grid {
        ScaleGrid::Auto { voices_per_octave } => geometric_scales(diff_span, *voices_per_octave),
        ScaleGrid::Explicit(s) => s.clone(),
    };
    if scales.is_empty() {
        return Err(Error::InvalidGrid("scale grid is empty (series too short for Auto)"));
    }
    let shifts: Vec<f64> = match &cfg.shift_grid {
        ShiftGrid::EverySample => index_times[1..n - 1].to_vec(),
        ShiftGrid::Explicit(s) => s.clone(),
    };

    let mut waves: Vec<LogisticWave> = Vec::new(); // index-unit waves
    let mut trace = DecompositionTrace::default();

    while waves.len() < cfg.max_waves {
        let residual: Vec<f64> = series
            .y
            .iter()
            .enumerate()
            .map(|(i, &y)| y - waves.iter().map(|w| w.eval(i as f64)).sum::<f64>())
            .collect();
        let residual_series = SampledSeries::new(index_times.clone(), residual)?;
        let diff2 = central_diff(&residual_series, DiffOrder::Second)?;
        let sg = engine.scalogram(&diff2, &scales, &shifts)?;
        let extrema = find_extrema(&sg, cfg);

        let cap = if waves.is_empty() { 1 } else { 2.min(cfg.max_waves - waves.len()) };
        let mut chosen_extrema = Vec::new();
        let mut chosen_waves = Vec::new();
        for e in &extrema {
            // an extremum inside the exclusion box of an already-extracted
            // wave is its own residue, not a new wave
            if waves.iter().any(|w| cfg.excludes(e.a, e.b, w.a, w.b)) {
                continue;
            }
            match extremum_to_wave(e, floor) {
                Ok(w) => {
                    chosen_extrema.push(*e);
                    chosen_waves.push(w);
                    if chosen_waves.len() == cap {
                        break;
                    }
                }
                Err(Error::WaveTooWeak { .. }) => continue,
                Err(other) => return Err(other),
            }
        }
        if chosen_waves.is_empty() {
            break;
        }
        trace.iterations.push(TraceIteration {
            residual: SampledSeries::new(
                series.t.clone(),
                residual_series.y.clone(),
            )?,
            scalogram: convert_scalogram(&sg, spacing, t_origin),
            extrema: chosen_extrema
                .iter()
                .map(|e| convert_extremum(e, spacing, t_origin))
                .collect(),
            waves: chosen_waves
                .iter()
                .map(|w| convert_wave(w, spacing, t_origin))
                .collect::<Result<Vec<_>>>()?,
        });
        waves.extend(chosen_waves);
    }

    if waves.is_empty() {
        return Err(Error::NoAdmissibleWaves);
    }

    resolve_saturations(&series.y, &index_times, &mut waves, floor)?;

    let time_waves = waves
        .iter()
        .map(|w| convert_wave(w, spacing, t_origin))
        .collect::<Result<Vec<_>>>()?;
    Ok((MultilogisticModel::new(time_waves)?, trace))
}

/// Joint linear least-squares solve for the saturation levels over the
/// detected wave shapes. A wave whose re-solved amplitude flips sign or
/// drops below the floor is removed (weakest first) and the rest re-solved;
/// if the system is singular the scalogram estimates are kept as-is.
fn resolve_saturations(
    y: &[f64],
    times: &[f64],
    waves: &mut Vec<LogisticWave>,
    floor: f64,
) -> Result<()> {
    loop {
        let k = waves.len();
        if k == 0 {
            return Err(Error::NoAdmissibleWaves);
        }
        let n = y.len();
        // atoms[i][t]: unit-saturation wave shapes
        let atoms: Vec<Vec<f64>> = waves
            .iter()
            .map(|w| times.iter().map(|&t| sigmoid((t - w.b) / w.a)).collect())
            .collect();
        let mut gram = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for i in 0..k {
            for j in i..k {
                let g = pairwise_sum_by(0, n, &|u| atoms[i][u] * atoms[j][u]);
                gram[i][j] = g;
                gram[j][i] = g;
            }
            rhs[i] = pairwise_sum_by(0, n, &|u| atoms[i][u] * y[u]);
        }
        let Some(amps) = solve_dense(gram, rhs) else {
            return Ok(()); // keep scalogram estimates
        };
        // find the weakest violator, if any
        let mut worst: Option<usize> = None;
        for (i, (&c, w)) in amps.iter().zip(waves.iter()).enumerate() {
            let bad = !c.is_finite() || c == 0.0 || c * w.y_sat < 0.0 || abs(c) < floor;
            if bad && worst.is_none_or(|p| abs(c) < abs(amps[p])) {
                worst = Some(i);
            }
        }
        match worst {
            Some(i) => {
                waves.remove(i);
            }
            None => {
                for (w, &c) in waves.iter_mut().zip(&amps) {
                    w.y_sat = c;
                }
                return Ok(());
            }
        }
    }
}

fn convert_wave(w: &LogisticWave, spacing: f64, t_origin: f64) -> Result<LogisticWave> {
    LogisticWave::new(w.a * spacing, t_origin + w.b * spacing, w.y_sat)
}

fn convert_extremum(e: &ScalogramExtremum, spacing: f64, t_origin: f64) -> ScalogramExtremum {
    ScalogramExtremum {
        a: e.a * spacing,
        b: t_origin + e.b * spacing,
        index_value: e.index_value,
        kind: e.kind,
    }
}

fn convert_scalogram(s: &Scalogram, spacing: f64, t_origin: f64) -> Scalogram {
    Scalogram {
        scales: s.scales.iter().map(|&a| a * spacing).collect(),
        shifts: s.shifts.iter().map(|&b| t_origin + b * spacing).collect(),
        index: s.index.clone(),
    }
}
