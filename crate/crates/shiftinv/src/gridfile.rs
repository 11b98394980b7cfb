//! Sampled Fourier transforms stored on regular grids.
//!
//! Two formats are read. CSV files have columns `xi_1, .., xi_d, re, im`, one row per
//! cell, where each row gives the lower corner of its cell. The binary format starts
//! with the magic `SIGG`, then little-endian `u32` version and `u32` dimension, then per
//! axis `f64 lo`, `f64 hi`, `u64 n`, then `n_1 ⋯ n_d` pairs `(re, im)` of `f64` with
//! axis 0 varying fastest.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use shiftinv_core::genspace::Grid;

pub const MAGIC: &[u8; 4] = b"SIGG";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum GridFileError {
    #[error("cannot read grid file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed grid file {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn malformed(path: &Path, reason: impl Into<String>) -> GridFileError {
    GridFileError::Malformed { path: path.display().to_string(), reason: reason.into() }
}

/// Read a grid, choosing the format from the leading bytes.
pub fn load_grid(path: &Path) -> Result<Grid, GridFileError> {
    let bytes = fs::read(path).map_err(|source| GridFileError::Io { path: path.display().to_string(), source })?;
    if bytes.starts_with(MAGIC) {
        parse_binary(path, &bytes)
    } else {
        parse_csv(path, &bytes)
    }
}

fn parse_binary(path: &Path, bytes: &[u8]) -> Result<Grid, GridFileError> {
    let mut cur = &bytes[MAGIC.len()..];
    let mut take = |n: usize| -> Result<&[u8], GridFileError> {
        if cur.len() < n {
            return Err(malformed(path, "truncated"));
        }
        let (head, tail) = cur.split_at(n);
        cur = tail;
        Ok(head)
    };
    let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap());
    let f64_at = |b: &[u8]| f64::from_le_bytes(b.try_into().unwrap());
    let version = u32_at(take(4)?);
    if version != VERSION {
        return Err(malformed(path, format!("unsupported version {version}")));
    }
    let dim = u32_at(take(4)?) as usize;
    if dim == 0 || dim > shiftinv_core::MAX_DIM {
        return Err(malformed(path, format!("bad dimension {dim}")));
    }
    let (mut lo, mut hi, mut res) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..dim {
        lo.push(f64_at(take(8)?));
        hi.push(f64_at(take(8)?));
        let n = u64::from_le_bytes(take(8)?.try_into().unwrap());
        res.push(usize::try_from(n).map_err(|_| malformed(path, "axis too long"))?);
    }
    let total = res.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).ok_or_else(|| malformed(path, "grid too large"))?;
    let body = take(total.checked_mul(16).ok_or_else(|| malformed(path, "grid too large"))?)?;
    let samples = body.chunks_exact(16).map(|c| Complex64::new(f64_at(&c[..8]), f64_at(&c[8..]))).collect();
    if !cur.is_empty() {
        return Err(malformed(path, "trailing bytes"));
    }
    Grid::new(lo, hi, res, samples).map_err(|e| malformed(path, e.to_string()))
}

/// Sorted distinct values of one coordinate, with the common step between them.
fn axis_of(path: &Path, mut values: Vec<f64>, axis: usize) -> Result<(Vec<f64>, f64), GridFileError> {
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.len() < 2 {
        return Err(malformed(path, format!("axis {} needs at least two distinct coordinates", axis + 1)));
    }
    let step = (values[values.len() - 1] - values[0]) / (values.len() - 1) as f64;
    for (k, v) in values.iter().enumerate() {
        if (v - (values[0] + k as f64 * step)).abs() > 1e-9 * step.max(1.0) {
            return Err(malformed(path, format!("axis {} is not evenly spaced", axis + 1)));
        }
    }
    Ok((values, step))
}

fn parse_csv(path: &Path, bytes: &[u8]) -> Result<Grid, GridFileError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let width = reader.headers()?.len();
    if width < 3 {
        return Err(malformed(path, "expected columns xi_1..xi_d, re, im"));
    }
    let dim = width - 2;
    if dim > shiftinv_core::MAX_DIM {
        return Err(malformed(path, format!("dimension {dim} too large")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let parsed = parsed.map_err(|e| malformed(path, format!("line {}: {e}", rows.len() + 2)))?;
        if parsed.iter().any(|v| !v.is_finite()) {
            return Err(malformed(path, format!("line {}: non-finite value", rows.len() + 2)));
        }
        rows.push(parsed);
    }
    let mut axes = Vec::with_capacity(dim);
    for k in 0..dim {
        axes.push(axis_of(path, rows.iter().map(|r| r[k]).collect(), k)?);
    }
    let res: Vec<usize> = axes.iter().map(|(v, _)| v.len()).collect();
    let total: usize = res.iter().product();
    if rows.len() != total {
        return Err(malformed(path, format!("expected {total} rows for a complete grid, found {}", rows.len())));
    }
    let mut samples = vec![Complex64::new(0.0, 0.0); total];
    let mut seen = vec![false; total];
    for row in &rows {
        let mut index = 0;
        let mut stride = 1;
        for (k, (values, step)) in axes.iter().enumerate() {
            let i = ((row[k] - values[0]) / step).round() as usize;
            index += i * stride;
            stride *= values.len();
        }
        if std::mem::replace(&mut seen[index], true) {
            return Err(malformed(path, "duplicate grid cell"));
        }
        samples[index] = Complex64::new(row[dim], row[dim + 1]);
    }
    let lo = axes.iter().map(|(v, _)| v[0]).collect();
    let hi = axes.iter().map(|(v, s)| v[v.len() - 1] + s).collect();
    Grid::new(lo, hi, res, samples).map_err(|e| malformed(path, e.to_string()))
}

/// Write `grid` in the binary format.
pub fn write_binary(path: &Path, grid: &Grid) -> std::io::Result<()> {
    let mut out = Vec::with_capacity(12 + 24 * grid.dim() + 16 * grid.samples.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    for k in 0..grid.dim() {
        out.extend_from_slice(&grid.lo[k].to_le_bytes());
        out.extend_from_slice(&grid.hi[k].to_le_bytes());
        out.extend_from_slice(&(grid.resolution[k] as u64).to_le_bytes());
    }
    for s in &grid.samples {
        out.extend_from_slice(&s.re.to_le_bytes());
        out.extend_from_slice(&s.im.to_le_bytes());
    }
    fs::File::create(path)?.write_all(&out)
}

/// Write `grid` in the CSV format.
pub fn write_csv(path: &Path, grid: &Grid) -> Result<(), GridFileError> {
    let mut w = csv::Writer::from_path(path)?;
    let dim = grid.dim();
    let mut header: Vec<String> = (1..=dim).map(|k| format!("xi_{k}")).collect();
    header.extend(["re".to_string(), "im".to_string()]);
    w.write_record(&header)?;
    let steps: Vec<f64> = (0..dim).map(|k| (grid.hi[k] - grid.lo[k]) / grid.resolution[k] as f64).collect();
    for (flat, s) in grid.samples.iter().enumerate() {
        let mut rest = flat;
        let mut row = Vec::with_capacity(dim + 2);
        for (k, step) in steps.iter().enumerate() {
            let i = rest % grid.resolution[k];
            rest /= grid.resolution[k];
            row.push((grid.lo[k] + i as f64 * step).to_string());
        }
        row.push(s.re.to_string());
        row.push(s.im.to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|source| GridFileError::Io { path: path.display().to_string(), source })?;
    Ok(())
}

