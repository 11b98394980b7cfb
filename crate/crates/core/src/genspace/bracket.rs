use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{DecayHint, FourierFunction, GenspaceError};
use crate::math;
use crate::point::{Bbox, Point};
use crate::TAU_SUPP;

/// Truncated bracket `Σ_{|k|∞ ≤ K} |f̂(ξ + k)|²` with a bound on what was dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketEstimate {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

impl BracketEstimate {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound
    }
}

/// Visit every `k ∈ Z^d` with `lo_i ≤ k_i ≤ hi_i`.
pub(crate) fn for_each_lattice_point(lo: &[i64], hi: &[i64], mut visit: impl FnMut(&[i64])) {
    let d = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return;
    }
    let mut k = lo.to_vec();
    loop {
        visit(&k);
        let mut axis = 0;
        loop {
            if axis == d {
                return;
            }
            if k[axis] < hi[axis] {
                k[axis] += 1;
                break;
            }
            k[axis] = lo[axis];
            axis += 1;
        }
    }
}

/// Lattice shifts `k` with `ξ + k` inside the box.
pub(crate) fn lattice_range(b: &Bbox, xi: &[f64]) -> (Vec<i64>, Vec<i64>) {
    let lo = (0..xi.len()).map(|i| libm::ceil(b.lo[i] - xi[i]) as i64).collect();
    let hi = (0..xi.len()).map(|i| math::floor(b.hi[i] - xi[i]) as i64).collect();
    (lo, hi)
}

/// Periodization `[f̂, f̂](ξ) = Σ_k |f̂(ξ + k)|²` by direct lattice summation.
///
/// Finitely supported functions are summed exactly over the lattice points that meet
/// the support; otherwise the sum runs over `|k|∞ ≤ radius` and the decay hint bounds
/// the remainder.
pub fn bracket_product(
    f: &FourierFunction,
    xi: &[f64],
    radius: u32,
) -> Result<BracketEstimate, GenspaceError> {
    let x = Point::new(xi);
    if let Some(b) = f.support() {
        if b.is_empty() {
            return Ok(BracketEstimate { value: 0.0, tail_bound: 0.0, terms: 0 });
        }
        let (lo, hi) = lattice_range(&b, xi);
        let mut value = 0.0;
        let mut terms = 0;
        for_each_lattice_point(&lo, &hi, |k| {
            value += f.norm_sq(&x.shifted(k));
            terms += 1;
        });
        return Ok(BracketEstimate { value, tail_bound: 0.0, terms });
    }
    let hint = f
        .decay()
        .ok_or_else(|| GenspaceError::TailUnbounded { label: f.label().to_string() })?;
    let xi_inf = x.norm_inf();
    let tail_bound = hint
        .lattice_tail(f.dim(), radius, xi_inf)
        .ok_or(GenspaceError::TruncationTooSmall { radius, xi_inf })?;
    let r = radius as i64;
    let lo = vec![-r; f.dim()];
    let hi = vec![r; f.dim()];
    let mut value = 0.0;
    let mut terms = 0;
    for_each_lattice_point(&lo, &hi, |k| {
        value += f.norm_sq(&x.shifted(k));
        terms += 1;
    });
    Ok(BracketEstimate { value, tail_bound, terms })
}

/// Reduce `ξ` to the fundamental cell `[-1/2, 1/2)^d`.
fn reduce(xi: &[f64]) -> Point {
    let mut p = Point::new(xi);
    p.as_mut_slice().iter_mut().for_each(|c| *c -= math::floor(*c + 0.5));
    p
}

/// Normalise a generator: `f̂ / [f̂, f̂]^{1/2}` where the bracket exceeds `TAU_SUPP`, zero elsewhere.
///
/// Uses the function's closed-form periodization when attached, otherwise the truncated
/// lattice sum evaluated at `ξ` reduced mod `Z^d` (the bracket is periodic).
pub fn normalize_generator(f: &FourierFunction, radius: u32) -> Result<FourierFunction, GenspaceError> {
    let bracket: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> = if f.has_periodization() {
        let g = f.clone();
        Arc::new(move |x: &[f64]| g.periodization(x).expect("periodization attached"))
    } else {
        // validate once; per-point failures cannot occur on the reduced cell
        bracket_product(f, &vec![0.0; f.dim()], radius)?;
        let g = f.clone();
        Arc::new(move |x: &[f64]| {
            bracket_product(&g, &reduce(x), radius).map(|b| b.value).unwrap_or(0.0)
        })
    };

    let inner = f.clone();
    let b1 = bracket.clone();
    let mut out = FourierFunction::closed_form(f.dim(), format!("normalized({})", f.label()), move |x| {
        let b = b1(x);
        if b > TAU_SUPP {
            inner.eval(x) / math::sqrt(b)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    if let Some(s) = f.support() {
        out = out.with_support(s);
    }
    if let Some(h) = f.decay() {
        // |g|² ≤ |f|² / min bracket; the minimum is scanned on a coarse cell grid
        let per_axis = if f.dim() == 1 { 257 } else { 17 };
        let min_b = scan_cell_minimum(f.dim(), per_axis, &*bracket);
        if min_b > TAU_SUPP {
            out = out.with_decay(DecayHint { constant: 2.0 * h.constant / min_b, exponent: h.exponent });
        }
    }
    let b2 = bracket;
    Ok(out.with_periodization(move |x| if b2(x) > TAU_SUPP { 1.0 } else { 0.0 }))
}

fn scan_cell_minimum(dim: usize, per_axis: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let lo = vec![0i64; dim];
    let hi = vec![per_axis as i64 - 1; dim];
    let mut m = f64::INFINITY;
    for_each_lattice_point(&lo, &hi, |k| {
        let x: Vec<f64> = k.iter().map(|&i| -0.5 + (i as f64 + 0.5) / per_axis as f64).collect();
        m = m.min(f(&x));
    });
    m
}
