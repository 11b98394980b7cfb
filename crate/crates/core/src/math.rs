//! Thin wrappers over `libm` plus the few special functions the registry needs.

use core::f64::consts::PI;

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

/// `sin(πx) / (πx)`, with the removable singularity filled in.
pub(crate) fn sinc_pi(x: f64) -> f64 {
    let t = PI * x;
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        sin(t) / t
    }
}

/// Cardinal B-spline `M_m` supported on `[0, m]` (Cox–de Boor recursion on integer knots).
pub(crate) fn cardinal_bspline(m: u32, x: f64) -> f64 {
    if m == 1 {
        return if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 };
    }
    if x <= 0.0 || x >= m as f64 {
        return 0.0;
    }
    let mf = m as f64;
    (x * cardinal_bspline(m - 1, x) + (mf - x) * cardinal_bspline(m - 1, x - 1.0)) / (mf - 1.0)
}
