//! Adaptive Gauss–Kronrod (7/15) quadrature on intervals and boxes.
//!
//! Intervals with the largest error estimate are bisected first. Boxes are handled
//! by nesting the one-dimensional rule over the axes.

use alloc::collections::BinaryHeap;
use core::cell::Cell;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::point::{Bbox, Point};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisections allowed per one-dimensional integral.
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-10, max_subdivisions: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge after {subdivisions} subdivisions (value {value}, error {error})")]
    NonConvergent { value: f64, error: f64, subdivisions: usize },
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 15-point Kronrod panel with the QUADPACK error heuristic.
fn qk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = hlgth.abs();
    let fc = f(centr);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let (f1, f2) = (f(centr - absc), f(centr + absc));
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let (f1, f2) = (f(centr - absc), f(centr + absc));
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * crate::math::powf(200.0 * abserr / resasc, 1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    (result, abserr)
}

/// `∫_a^b f`, adaptively bisecting the worst panel until the total error estimate is
/// below `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult, QuadratureError> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (value, error) = qk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let (mut total, mut total_err) = (value, error);
    let mut evaluations = 15;
    let mut subdivisions = 0;
    while total_err > cfg.abs_tol.max(cfg.rel_tol * total.abs()) {
        if subdivisions >= cfg.max_subdivisions {
            return Err(QuadratureError::NonConvergent { value: total, error: total_err, subdivisions });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // panel at machine resolution; nothing left to bisect
            return Err(QuadratureError::NonConvergent { value: total, error: total_err, subdivisions });
        }
        let (v1, e1) = qk15(&mut f, worst.a, mid);
        let (v2, e2) = qk15(&mut f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        if subdivisions % 64 == 0 {
            // resum to keep incremental rounding out of the stopping test
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, error, evaluations })
}

/// `∫_B f` over a box by nested one-dimensional integration (last axis innermost).
pub fn integrate_box<F: Fn(&[f64]) -> f64>(f: F, b: &Bbox, cfg: &QuadConfig) -> Result<QuadResult, QuadratureError> {
    if b.is_empty() {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut x = Point::zeros(b.dim());
    nested(&f, b, 0, &mut x, cfg)
}

fn nested<F: Fn(&[f64]) -> f64>(f: &F, b: &Bbox, axis: usize, x: &mut Point, cfg: &QuadConfig) -> Result<QuadResult, QuadratureError> {
    if axis + 1 == b.dim() {
        return integrate(
            |t| {
                x.as_mut_slice()[axis] = t;
                f(x)
            },
            b.lo[axis],
            b.hi[axis],
            cfg,
        );
    }
    let failure: Cell<Option<QuadratureError>> = Cell::new(None);
    let inner_err = Cell::new(0.0f64);
    let evals = Cell::new(0usize);
    let mut outer = integrate(
        |t| {
            let mut y = *x;
            y.as_mut_slice()[axis] = t;
            match nested(f, b, axis + 1, &mut y, cfg) {
                Ok(r) => {
                    inner_err.set(inner_err.get().max(r.error));
                    evals.set(evals.get() + r.evaluations);
                    r.value
                }
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            }
        },
        b.lo[axis],
        b.hi[axis],
        cfg,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    outer.error += inner_err.get() * (b.hi[axis] - b.lo[axis]);
    outer.evaluations = evals.get();
    Ok(outer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 3.75).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_and_kinked() {
        let cfg = QuadConfig::default();
        let r = integrate(crate::math::sin, 0.0, core::f64::consts::PI, &cfg).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        let r = integrate(|x: f64| x.abs(), -1.0, 3.0, &cfg).unwrap();
        assert!((r.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn step_function_converges() {
        let r = integrate(|x| if x > 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, &QuadConfig::default()).unwrap();
        assert!((r.value - 0.7).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadConfig { max_subdivisions: 3, ..Default::default() };
        let err = integrate(|x| if x > 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, QuadratureError::NonConvergent { subdivisions: 3, .. }));
    }

    #[test]
    fn box_integral() {
        let b = Bbox::new(&[0.0, 0.0], &[1.0, 2.0]);
        let r = integrate_box(|x| x[0] * x[1], &b, &QuadConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }
}
