//! File formats: two-column series CSV, model/trace/report JSON, and the
//! scalogram CSV/JSON exports. Every writer has a matching reader.
//!
//! Numbers are stored with full round-trip precision (shortest exact
//! decimal); printed output elsewhere is trimmed to six significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use logwave_core::diffcwt::Scalogram;
use logwave_core::extract::{DecompositionTrace, ExtremumKind};
use logwave_core::refine::FitReport;
use logwave_core::{LogisticWave, MultilogisticModel, SampledSeries};

#[derive(Debug)]
pub enum FormatError {
    Io(String),
    Parse { line: usize, message: String },
    Invalid(String),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Io(m) => write!(f, "{m}"),
            FormatError::Parse { line, message } => write!(f, "line {line}: {message}"),
            FormatError::Invalid(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for FormatError {}

fn io_err(path: &Path, e: std::io::Error) -> FormatError {
    FormatError::Io(format!("{}: {e}", path.display()))
}

/// Full-precision decimal for file storage (shortest exact round-trip),
/// switching to scientific notation for extreme magnitudes.
fn fmt_full(x: f64) -> String {
    let mag = x.abs();
    if x != 0.0 && !(1e-4..1e15).contains(&mag) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

// ---- series CSV ------------------------------------------------------------

pub fn read_series(path: &Path) -> Result<SampledSeries, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut t = Vec::new();
    let mut y = Vec::new();
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::Parse { line: 1, message: "empty file".into() });
    };
    let header = header.trim_end_matches('\r');
    if header.trim() != "t,y" {
        return Err(FormatError::Parse {
            line: 1,
            message: format!("expected header 't,y', found '{header}'"),
        });
    }
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(ts), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(FormatError::Parse {
                line: line_no,
                message: "expected exactly two comma-separated values".into(),
            });
        };
        let tv: f64 = ts.trim().parse().map_err(|e| FormatError::Parse {
            line: line_no,
            message: format!("bad t value '{ts}': {e}"),
        })?;
        let yv: f64 = ys.trim().parse().map_err(|e| FormatError::Parse {
            line: line_no,
            message: format!("bad y value '{ys}': {e}"),
        })?;
        t.push(tv);
        y.push(yv);
    }
    SampledSeries::new(t, y).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_series(path: &Path, series: &SampledSeries) -> Result<(), FormatError> {
    let mut out = String::from("t,y\n");
    for (t, y) in series.t.iter().zip(&series.y) {
        let _ = writeln!(out, "{},{}", fmt_full(*t), fmt_full(*y));
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Evaluation output: `t,y` plus an optional residual column.
pub fn write_eval_csv(
    path: &Path,
    t: &[f64],
    f: &[f64],
    residuals: Option<&[f64]>,
) -> Result<(), FormatError> {
    let mut out = String::new();
    match residuals {
        Some(r) => {
            out.push_str("t,y,residual\n");
            for ((tv, fv), rv) in t.iter().zip(f).zip(r) {
                let _ = writeln!(out, "{},{},{}", fmt_full(*tv), fmt_full(*fv), fmt_full(*rv));
            }
        }
        None => {
            out.push_str("t,y\n");
            for (tv, fv) in t.iter().zip(f) {
                let _ = writeln!(out, "{},{}", fmt_full(*tv), fmt_full(*fv));
            }
        }
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

/// Time, value, and residual columns of an evaluation output.
pub type EvalColumns = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Reader for the three-column evaluation output.
pub fn read_eval_csv(path: &Path) -> Result<EvalColumns, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate().skip(1) {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(FormatError::Parse {
                line: i + 1,
                message: "expected three columns".into(),
            });
        }
        let parse = |s: &str| -> Result<f64, FormatError> {
            s.trim().parse().map_err(|e| FormatError::Parse {
                line: i + 1,
                message: format!("bad value '{s}': {e}"),
            })
        };
        rows.0.push(parse(fields[0])?);
        rows.1.push(parse(fields[1])?);
        rows.2.push(parse(fields[2])?);
    }
    Ok(rows)
}

// ---- model JSON ------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub waves: Vec<WaveRecord>,
    pub meta: Meta,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveRecord {
    pub a: f64,
    pub b: f64,
    pub y_sat: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub source: String,
    pub created: String,
    pub tool_version: String,
}

impl Meta {
    pub fn now(source: &str) -> Self {
        Self {
            source: source.to_string(),
            created: rfc3339_now(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

fn wave_records(m: &MultilogisticModel) -> Vec<WaveRecord> {
    m.waves.iter().map(|w| WaveRecord { a: w.a, b: w.b, y_sat: w.y_sat }).collect()
}

pub fn write_model(
    path: &Path,
    model: &MultilogisticModel,
    source: &str,
) -> Result<(), FormatError> {
    let file = ModelFile { waves: wave_records(model), meta: Meta::now(source) };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

pub fn read_model(path: &Path) -> Result<MultilogisticModel, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| FormatError::Invalid(e.to_string()))?;
    let waves = file
        .waves
        .iter()
        .map(|w| LogisticWave::new(w.a, w.b, w.y_sat))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    MultilogisticModel::new(waves).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ---- trace JSON ------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct TraceFile {
    pub iterations: Vec<TraceIterationRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TraceIterationRecord {
    pub extrema: Vec<ExtremumRecord>,
    pub waves: Vec<WaveRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ExtremumRecord {
    pub a: f64,
    pub b: f64,
    pub index_value: f64,
    pub kind: String,
}

pub fn trace_to_file(trace: &DecompositionTrace) -> TraceFile {
    TraceFile {
        iterations: trace
            .iterations
            .iter()
            .map(|it| TraceIterationRecord {
                extrema: it
                    .extrema
                    .iter()
                    .map(|e| ExtremumRecord {
                        a: e.a,
                        b: e.b,
                        index_value: e.index_value,
                        kind: match e.kind {
                            ExtremumKind::Maximum => "maximum".to_string(),
                            ExtremumKind::Minimum => "minimum".to_string(),
                        },
                    })
                    .collect(),
                waves: it
                    .waves
                    .iter()
                    .map(|w| WaveRecord { a: w.a, b: w.b, y_sat: w.y_sat })
                    .collect(),
            })
            .collect(),
    }
}

pub fn write_trace(path: &Path, trace: &DecompositionTrace) -> Result<(), FormatError> {
    let json = serde_json::to_string_pretty(&trace_to_file(trace))
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

pub fn read_trace(path: &Path) -> Result<TraceFile, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ---- scalogram CSV / JSON --------------------------------------------------

/// CSV layout: header row of shifts with a `scale` corner label, one row
/// per scale, cell (i, j) holding the matrix value.
pub fn write_scalogram_csv(path: &Path, s: &Scalogram) -> Result<(), FormatError> {
    let mut out = String::from("scale");
    for b in &s.shifts {
        let _ = write!(out, ",{}", fmt_full(*b));
    }
    out.push('\n');
    for (i, a) in s.scales.iter().enumerate() {
        let _ = write!(out, "{}", fmt_full(*a));
        for v in &s.index[i] {
            let _ = write!(out, ",{}", fmt_full(*v));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn read_scalogram_csv(path: &Path) -> Result<Scalogram, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::Parse { line: 1, message: "empty file".into() });
    };
    let mut fields = header.trim_end_matches('\r').split(',');
    if fields.next() != Some("scale") {
        return Err(FormatError::Parse {
            line: 1,
            message: "expected 'scale' corner label".into(),
        });
    }
    let shifts = fields
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|e| FormatError::Parse { line: 1, message: format!("bad shift: {e}") })
        })
        .collect::<Result<Vec<f64>, _>>()?;
    let mut scales = Vec::new();
    let mut index = Vec::new();
    for (i, raw) in lines {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let a: f64 = fields
            .next()
            .unwrap()
            .trim()
            .parse()
            .map_err(|e| FormatError::Parse { line: i + 1, message: format!("bad scale: {e}") })?;
        let row = fields
            .map(|s| {
                s.trim().parse().map_err(|e| FormatError::Parse {
                    line: i + 1,
                    message: format!("bad cell: {e}"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        if row.len() != shifts.len() {
            return Err(FormatError::Parse {
                line: i + 1,
                message: "row width does not match header".into(),
            });
        }
        scales.push(a);
        index.push(row);
    }
    Ok(Scalogram { scales, shifts, index })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScalogramJson {
    pub scales: Vec<f64>,
    pub shifts: Vec<f64>,
    pub index: Vec<Vec<f64>>,
}

pub fn write_scalogram_json(path: &Path, s: &Scalogram) -> Result<(), FormatError> {
    let file = ScalogramJson {
        scales: s.scales.clone(),
        shifts: s.shifts.clone(),
        index: s.index.clone(),
    };
    let json =
        serde_json::to_string(&file).map_err(|e| FormatError::Invalid(e.to_string()))?;
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

pub fn read_scalogram_json(path: &Path) -> Result<ScalogramJson, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ---- fit report JSON -------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub max_abs_error: f64,
    pub rmse: f64,
    pub r_squared: Option<f64>,
    pub converged: Option<bool>,
    pub evaluations: Option<usize>,
    pub residuals: Vec<f64>,
}

pub fn report_to_file(
    report: &FitReport,
    converged: Option<bool>,
    evaluations: Option<usize>,
) -> ReportFile {
    ReportFile {
        max_abs_error: report.max_abs_error,
        rmse: report.rmse,
        r_squared: report.r_squared,
        converged,
        evaluations,
        residuals: report.residuals.clone(),
    }
}

pub fn write_report(
    path: &Path,
    report: &FitReport,
    converged: Option<bool>,
    evaluations: Option<usize>,
) -> Result<(), FormatError> {
    let json = serde_json::to_string_pretty(&report_to_file(report, converged, evaluations))
        .map_err(|e| FormatError::Invalid(e.to_string()))?;
    fs::write(path, json + "\n").map_err(|e| io_err(path, e))
}

pub fn read_report(path: &Path) -> Result<ReportFile, FormatError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| FormatError::Invalid(e.to_string()))
}

// ---- formatting helpers ----------------------------------------------------

/// Six significant digits for printed output; files keep full precision.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&magnitude) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// RFC 3339 timestamp (UTC, second precision) without external crates.
fn rfc3339_now() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (h, m, s) = (rem / 3600, (rem % 3600) / 60, rem % 60);
    let (y, mo, d) = civil_from_days(days);
    format!("{y:04}-{mo:02}-{d:02}T{h:02}:{m:02}:{s:02}Z")
}

/// Gregorian date from days since 1970-01-01 (Howard Hinnant's algorithm).
fn civil_from_days(z: i64) -> (i64, u32, u32) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = (z - era * 146_097) as u64;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe as i64 + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    (if m <= 2 { y + 1 } else { y }, m, d)
}
