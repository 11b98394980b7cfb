//! Integer dilation matrices: expansiveness, adjoint, powers and coset digits.
//!
//! Negative powers come from the integer adjugate, `A^{-j} = adj(A)^j / det(A)^j`,
//! computed in `i128` and divided once, so deep iterates such as `A^{-40}` carry a
//! single rounding per entry. All powers in `[-range, range]` are tabulated at
//! construction and shared behind an `Arc`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Serialize, Serializer};

use crate::math;
use crate::point::{Point, MAX_DIM};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DilationError {
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) = {value} is not an integer")]
    NonInteger { row: usize, col: usize, value: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not expansive: {reason}")]
    NotExpansive { reason: String },
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionUnsupported { dim: usize, max: usize },
    #[error("power {requested} outside the tabulated range ±{max}")]
    PowerRangeExceeded { requested: i64, max: u32 },
    #[error("coset digit search exhausted at box radius {radius}")]
    InternalSearchExhausted { radius: i64 },
}

/// Parameters of the norm-decay certificate used for `d ≥ 3`.
#[derive(Debug, Clone, Copy)]
pub struct ExpansiveCertificate {
    /// First power `n` inspected; doubled up to `max_doublings` times before rejecting.
    pub iterations: u32,
    pub delta: f64,
    pub max_doublings: u32,
}

impl Default for ExpansiveCertificate {
    fn default() -> Self {
        Self { iterations: 64, delta: 1e-6, max_doublings: 6 }
    }
}

struct PowerTable {
    dim: usize,
    range: u32,
    // power j at offset j*dim*dim, j = 0..=range
    forward: Vec<f64>,
    inverse: Vec<f64>,
}

impl PowerTable {
    fn matrix(&self, j: i64) -> &[f64] {
        let n = self.dim * self.dim;
        let idx = j.unsigned_abs() as usize;
        let table = if j >= 0 { &self.forward } else { &self.inverse };
        &table[idx * n..(idx + 1) * n]
    }
}

/// An expansive integer matrix `A` with `|det A| ≥ 2`.
#[derive(Clone)]
pub struct DilationMatrix {
    entries: Vec<i64>,
    dim: usize,
    det: i64,
    powers: Arc<PowerTable>,
}

/// Borrowed view of a tabulated power `A^j`.
#[derive(Clone, Copy)]
pub struct PowerView<'a> {
    m: &'a [f64],
    dim: usize,
}

impl PowerView<'_> {
    #[inline]
    pub fn apply(&self, x: &Point) -> Point {
        let mut y = Point::zeros(self.dim);
        let out = y.as_mut_slice();
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.m[i * self.dim..(i + 1) * self.dim];
            *o = row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
        }
        y
    }

    /// Induced sup-norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        self.m
            .chunks(self.dim)
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> &[f64] {
        self.m
    }
}

/// Default power range: 40 in dimension one, 25 otherwise.
pub fn default_power_range(dim: usize) -> u32 {
    if dim == 1 {
        40
    } else {
        25
    }
}

/// Validate a real-valued square matrix as an expansive integer dilation.
pub fn validate_expansive(rows: &[Vec<f64>]) -> Result<DilationMatrix, DilationError> {
    let dim = check_shape(rows.iter().map(|r| r.len()), rows.len())?;
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || math::floor(v) != v || v.abs() > 1e15 {
                return Err(DilationError::NonInteger { row: i, col: j, value: v });
            }
            entries.push(v as i64);
        }
    }
    DilationMatrix::from_entries(dim, entries, ExpansiveCertificate::default())
}

fn check_shape(lens: impl Iterator<Item = usize>, n: usize) -> Result<usize, DilationError> {
    if n == 0 {
        return Err(DilationError::Empty);
    }
    for (row, len) in lens.enumerate() {
        if len != n {
            return Err(DilationError::NotSquare { row, len, expected: n });
        }
    }
    if n > MAX_DIM {
        return Err(DilationError::DimensionUnsupported { dim: n, max: MAX_DIM });
    }
    Ok(n)
}

impl DilationMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, DilationError> {
        let dim = check_shape(rows.iter().map(|r| r.len()), rows.len())?;
        let entries = rows.iter().flatten().copied().collect();
        Self::from_entries(dim, entries, ExpansiveCertificate::default())
    }

    pub fn from_entries(
        dim: usize,
        entries: Vec<i64>,
        cert: ExpansiveCertificate,
    ) -> Result<Self, DilationError> {
        check_shape(core::iter::repeat_n(dim, dim), dim)?;
        assert_eq!(entries.len(), dim * dim);
        let det = bareiss_det(&entries, dim);
        if det == 0 {
            return Err(DilationError::Singular);
        }
        let det = i64::try_from(det).map_err(|_| DilationError::NotExpansive {
            reason: String::from("determinant overflows i64"),
        })?;
        check_expansive(&entries, dim, det, cert)?;
        let powers = build_powers(&entries, dim, det, default_power_range(dim))?;
        Ok(Self { entries, dim, det, powers: Arc::new(powers) })
    }

    /// Scalar dilation `[[a]]`.
    pub fn scalar(a: i64) -> Result<Self, DilationError> {
        Self::from_rows(&[vec![a]])
    }

    /// The quincunx matrix `[[1, 1], [1, -1]]`.
    pub fn quincunx() -> Self {
        Self::from_rows(&[vec![1, 1], vec![1, -1]]).expect("quincunx is expansive")
    }

    /// Re-tabulate powers for `|j| ≤ range`.
    pub fn with_power_range(&self, range: u32) -> Result<Self, DilationError> {
        let powers = build_powers(&self.entries, self.dim, self.det, range)?;
        Ok(Self { powers: Arc::new(powers), ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    /// `d_A = |det A|`.
    pub fn det_abs(&self) -> u64 {
        self.det.unsigned_abs()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn power_range(&self) -> u32 {
        self.powers.range
    }

    /// The adjoint `A*` (transpose). Same eigenvalues, so no re-validation.
    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut t = vec![0; d * d];
        for i in 0..d {
            for j in 0..d {
                t[j * d + i] = self.entries[i * d + j];
            }
        }
        let powers = build_powers(&t, d, self.det, self.powers.range)
            .expect("transpose shares the power growth of the original");
        Self { entries: t, dim: d, det: self.det, powers: Arc::new(powers) }
    }

    pub fn power(&self, j: i64) -> Result<PowerView<'_>, DilationError> {
        let max = self.powers.range;
        if j.unsigned_abs() > max as u64 {
            return Err(DilationError::PowerRangeExceeded { requested: j, max });
        }
        Ok(PowerView { m: self.powers.matrix(j), dim: self.dim })
    }

    /// `A^j x` for `|j| ≤ power_range()`.
    pub fn apply_power(&self, j: i64, x: &Point) -> Result<Point, DilationError> {
        assert_eq!(x.dim(), self.dim, "point dimension mismatch");
        Ok(self.power(j)?.apply(x))
    }

    /// Exact `A k` for a lattice vector.
    pub fn apply_int(&self, k: &[i64]) -> Vec<i64> {
        self.entries
            .chunks(self.dim)
            .map(|r| r.iter().zip(k).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `‖A^{-n}‖∞^{1/n}`, an upper bound on the spectral radius of `A^{-1}`.
    pub fn inverse_decay_rate(&self, n: u32) -> f64 {
        let inv = inverse_f64(&self.entries, self.dim, self.det);
        power_norm_root(&inv, self.dim, n)
    }

    /// Coset representatives of `Z^d / A Z^d`, exactly `d_A` of them, origin first.
    pub fn digit_set(&self) -> Result<Vec<Vec<i64>>, DilationError> {
        let norm = self
            .entries
            .chunks(self.dim)
            .map(|r| r.iter().map(|v| v.abs()).sum::<i64>())
            .max()
            .unwrap_or(1);
        let adj = adjugate(&self.entries, self.dim);
        let target = self.det_abs() as usize;
        let mut radius = norm.max(1);
        for _ in 0..4 {
            let digits = search_digits(&adj, self.dim, self.det, radius, target);
            if digits.len() == target {
                return Ok(digits);
            }
            radius *= 2;
        }
        Err(DilationError::InternalSearchExhausted { radius })
    }
}

impl PartialEq for DilationMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.entries == other.entries
    }
}

impl fmt::Debug for DilationMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DilationMatrix")
            .field("rows", &self.rows())
            .field("det", &self.det)
            .field("power_range", &self.powers.range)
            .finish()
    }
}

impl Serialize for DilationMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

fn check_expansive(
    a: &[i64],
    dim: usize,
    det: i64,
    cert: ExpansiveCertificate,
) -> Result<(), DilationError> {
    match dim {
        1 => {
            if a[0].abs() < 2 {
                return Err(DilationError::NotExpansive {
                    reason: format!("|{}| <= 1", a[0]),
                });
            }
        }
        2 => {
            // λ² - tλ + D has both roots outside the closed unit disc iff
            // |D| ≥ 2 and |t| < |1 + D| (Schur–Cohn on the reversed polynomial).
            let t = a[0] + a[3];
            let ok = det.abs() >= 2 && t.abs() < (1 + det).abs();
            if !ok {
                return Err(DilationError::NotExpansive {
                    reason: format!(
                        "characteristic polynomial λ² - ({t})λ + ({det}) has a root of modulus <= 1"
                    ),
                });
            }
        }
        _ => {
            if det.abs() < 2 {
                return Err(DilationError::NotExpansive {
                    reason: format!("|det| = {} < 2", det.abs()),
                });
            }
            let inv = inverse_f64(a, dim, det);
            let mut n = cert.iterations.max(1);
            let mut best = f64::INFINITY;
            for _ in 0..=cert.max_doublings {
                best = best.min(power_norm_root(&inv, dim, n));
                if best < 1.0 - cert.delta {
                    return Ok(());
                }
                n = n.saturating_mul(2);
            }
            return Err(DilationError::NotExpansive {
                reason: format!("‖A^-n‖^(1/n) = {best} does not certify decay below 1 - {}", cert.delta),
            });
        }
    }
    Ok(())
}

/// `‖B^n‖∞^{1/n}` by squaring with renormalisation (no underflow).
fn power_norm_root(b: &[f64], dim: usize, n: u32) -> f64 {
    let norm = |m: &[f64]| {
        m.chunks(dim)
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    // Binary exponentiation carrying log scale factors.
    let mut result: Option<(Vec<f64>, f64)> = None;
    let mut base = b.to_vec();
    let mut base_log = 0.0;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => (base.clone(), base_log),
                Some((r, rl)) => {
                    let mut p = matmul(&r, &base, dim);
                    let s = norm(&p);
                    if s == 0.0 {
                        return 0.0;
                    }
                    p.iter_mut().for_each(|v| *v /= s);
                    (p, rl + base_log + math::ln(s))
                }
            });
        }
        e >>= 1;
        if e > 0 {
            let mut sq = matmul(&base, &base, dim);
            let s = norm(&sq);
            if s == 0.0 {
                return 0.0;
            }
            sq.iter_mut().for_each(|v| *v /= s);
            base = sq;
            base_log = 2.0 * base_log + math::ln(s);
        }
    }
    let (r, rl) = result.expect("n >= 1");
    let total = rl + math::ln(norm(&r));
    math::exp(total / n as f64)
}

fn matmul(a: &[f64], b: &[f64], d: usize) -> Vec<f64> {
    let mut c = vec![0.0; d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            for j in 0..d {
                c[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    c
}

fn matmul_i128(a: &[i128], b: &[i128], d: usize) -> Option<Vec<i128>> {
    let mut c = vec![0i128; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc: i128 = 0;
            for k in 0..d {
                acc = acc.checked_add(a[i * d + k].checked_mul(b[k * d + j])?)?;
            }
            c[i * d + j] = acc;
        }
    }
    Some(c)
}

fn build_powers(a: &[i64], dim: usize, det: i64, range: u32) -> Result<PowerTable, DilationError> {
    let n = dim * dim;
    let overflow = |j: u32| DilationError::PowerRangeExceeded { requested: j as i64, max: range };
    let identity: Vec<i128> = (0..n).map(|i| if i % (dim + 1) == 0 { 1 } else { 0 }).collect();
    let a128: Vec<i128> = a.iter().map(|&v| v as i128).collect();
    let adj128: Vec<i128> = adjugate(a, dim).iter().map(|&v| v as i128).collect();
    let det_abs = det.unsigned_abs() as f64;
    let det_sign = det.signum() as f64;

    let mut forward = Vec::with_capacity(n * (range as usize + 1));
    let mut inverse = Vec::with_capacity(n * (range as usize + 1));
    let mut fwd = identity.clone();
    let mut adj_pow = identity;
    for j in 0..=range {
        if j > 0 {
            fwd = matmul_i128(&fwd, &a128, dim).ok_or(overflow(j))?;
            adj_pow = matmul_i128(&adj_pow, &adj128, dim).ok_or(overflow(j))?;
        }
        forward.extend(fwd.iter().map(|&v| v as f64));
        // A^{-j} = adj^j / det^j
        let scale = math::powi(det_abs, j as i32);
        let sign = if j % 2 == 1 { det_sign } else { 1.0 };
        inverse.extend(adj_pow.iter().map(|&v| sign * (v as f64) / scale));
    }
    Ok(PowerTable { dim, range, forward, inverse })
}

fn inverse_f64(a: &[i64], dim: usize, det: i64) -> Vec<f64> {
    adjugate(a, dim).iter().map(|&v| v as f64 / det as f64).collect()
}

/// Fraction-free Gaussian elimination; exact for integer input.
pub(crate) fn bareiss_det(a: &[i64], n: usize) -> i128 {
    let mut m: Vec<i128> = a.iter().map(|&v| v as i128).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n.saturating_sub(1) {
        if m[k * n + k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                m.swap(k * n + c, swap * n + c);
            }
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
            }
        }
        prev = m[k * n + k];
    }
    sign * m[n * n - 1]
}

/// Integer adjugate: `A · adj(A) = det(A) I`.
pub(crate) fn adjugate(a: &[i64], n: usize) -> Vec<i64> {
    if n == 1 {
        return vec![1];
    }
    let mut adj = vec![0i64; n * n];
    let mut minor = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..n {
        for j in 0..n {
            minor.clear();
            for r in (0..n).filter(|&r| r != i) {
                for c in (0..n).filter(|&c| c != j) {
                    minor.push(a[r * n + c]);
                }
            }
            let cof = bareiss_det(&minor, n - 1) as i64;
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            // transpose of the cofactor matrix
            adj[j * n + i] = sign * cof;
        }
    }
    adj
}

/// Coordinate order 0, 1, .., r, -1, .., -r so nonnegative residues come first.
fn coordinate_value(idx: i64, radius: i64) -> i64 {
    if idx <= radius {
        idx
    } else {
        radius - idx
    }
}

fn search_digits(adj: &[i64], dim: usize, det: i64, radius: i64, target: usize) -> Vec<Vec<i64>> {
    let side = 2 * radius + 1;
    let total = (side as u128).pow(dim as u32);
    let congruent = |x: &[i64], y: &[i64]| {
        // x ≡ y (mod A Z^d)  ⇔  adj(A)(x - y) ≡ 0 (mod det)
        adj.chunks(dim).all(|row| {
            let s: i128 = row
                .iter()
                .zip(x.iter().zip(y))
                .map(|(a, (xi, yi))| *a as i128 * (*xi - *yi) as i128)
                .sum();
            s % det as i128 == 0
        })
    };
    let mut digits: Vec<Vec<i64>> = Vec::with_capacity(target);
    let mut cand = vec![0i64; dim];
    let mut counter: u128 = 0;
    while counter < total && digits.len() < target {
        // first coordinate varies fastest
        let mut rest = counter;
        for c in cand.iter_mut() {
            *c = coordinate_value((rest % side as u128) as i64, radius);
            rest /= side as u128;
        }
        if digits.iter().all(|d| !congruent(d, &cand)) {
            digits.push(cand.clone());
        }
        counter += 1;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(r: &[&[f64]]) -> Vec<Vec<f64>> {
        r.iter().map(|x| x.to_vec()).collect()
    }

    #[test]
    fn accepts_dyadic_and_quincunx() {
        let a = validate_expansive(&rows(&[&[2.0]])).unwrap();
        assert_eq!(a.det_abs(), 2);
        let q = validate_expansive(&rows(&[&[1.0, 1.0], &[1.0, -1.0]])).unwrap();
        assert_eq!(q.det_abs(), 2);
        // eigenvalues ±√2: ‖Q^{-n}‖^{1/n} → 1/√2
        let rate = q.inverse_decay_rate(64);
        assert!((rate - core::f64::consts::FRAC_1_SQRT_2).abs() < 0.02, "{rate}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            validate_expansive(&rows(&[&[2.0, 0.0], &[0.0, 1.0]])),
            Err(DilationError::NotExpansive { .. })
        ));
        assert!(matches!(
            validate_expansive(&rows(&[&[2.0, 0.0]])),
            Err(DilationError::NotSquare { .. })
        ));
        assert!(matches!(
            validate_expansive(&rows(&[&[2.5]])),
            Err(DilationError::NonInteger { .. })
        ));
        assert!(matches!(
            validate_expansive(&rows(&[&[1.0, 2.0], &[2.0, 4.0]])),
            Err(DilationError::Singular)
        ));
        assert!(matches!(validate_expansive(&[]), Err(DilationError::Empty)));
        // det 2 but eigenvalues 2 and 1
        assert!(DilationMatrix::from_rows(&[vec![2, 1], vec![0, 1]]).is_err());
        // rotation-like with |eigenvalue| = 1
        assert!(DilationMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).is_err());
    }

    #[test]
    fn two_by_two_boundary_cases() {
        // eigenvalues 2, 2 (Jordan block)
        assert!(DilationMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).is_ok());
        // eigenvalues 1 ± i, modulus √2
        assert!(DilationMatrix::from_rows(&[vec![1, -1], vec![1, 1]]).is_ok());
        // eigenvalues -2, 1
        assert!(DilationMatrix::from_rows(&[vec![-2, 0], vec![0, 1]]).is_err());
        // eigenvalues 3, -1
        assert!(DilationMatrix::from_rows(&[vec![1, 2], vec![2, 1]]).is_err());
    }

    #[test]
    fn three_dimensional_certificate() {
        let a = DilationMatrix::from_rows(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 2]]).unwrap();
        assert_eq!(a.det_abs(), 8);
        assert!(DilationMatrix::from_rows(&[vec![2, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]).is_err());
        // companion matrix of x³ - 2 (eigenvalue modulus 2^{1/3})
        let c = DilationMatrix::from_rows(&[vec![0, 0, 2], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(c.det_abs(), 2);
        assert_eq!(c.digit_set().unwrap().len(), 2);
    }

    #[test]
    fn adjoint_is_transpose() {
        let a = DilationMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        assert_eq!(a.adjoint().rows(), vec![vec![2, 0], vec![1, 2]]);
        assert_eq!(a.adjoint().adjoint(), a);
        let q = DilationMatrix::quincunx();
        assert_eq!(q.adjoint(), q);
    }

    #[test]
    fn power_examples() {
        let a = DilationMatrix::scalar(2).unwrap();
        assert_eq!(a.apply_power(-3, &Point::new(&[8.0])).unwrap().as_slice(), &[1.0]);
        assert_eq!(a.apply_power(0, &Point::new(&[0.37])).unwrap().as_slice(), &[0.37]);
        let q = DilationMatrix::quincunx();
        let y = q.apply_power(2, &Point::new(&[1.0, 0.0])).unwrap();
        assert_eq!(y.as_slice(), &[2.0, 0.0]);
        assert!(matches!(
            a.apply_power(41, &Point::new(&[1.0])),
            Err(DilationError::PowerRangeExceeded { .. })
        ));
        let wide = a.with_power_range(60).unwrap();
        assert_eq!(wide.apply_power(-60, &Point::new(&[1.0])).unwrap()[0], math::powi(2.0, -60));
    }

    #[test]
    fn digit_sets() {
        assert_eq!(DilationMatrix::scalar(2).unwrap().digit_set().unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(
            DilationMatrix::scalar(3).unwrap().digit_set().unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
        let q = DilationMatrix::quincunx().digit_set().unwrap();
        assert_eq!(q, vec![vec![0, 0], vec![1, 0]]);
        let b = DilationMatrix::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap();
        assert_eq!(b.digit_set().unwrap().len(), 4);
    }

    #[test]
    fn adjugate_identity() {
        let a = [3i64, 1, 4, 1, 5, 9, 2, 6, 5];
        let adj = adjugate(&a, 3);
        let det = bareiss_det(&a, 3) as i64;
        for i in 0..3 {
            for j in 0..3 {
                let s: i64 = (0..3).map(|k| a[i * 3 + k] * adj[k * 3 + j]).sum();
                assert_eq!(s, if i == j { det } else { 0 });
            }
        }
    }
}
