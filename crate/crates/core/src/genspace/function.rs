use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use super::GenspaceError;
use crate::dilation::DilationMatrix;
use crate::geometry::RegionSet;
use crate::math;
use crate::point::{Bbox, Point};

pub type ComplexFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;
pub type RealFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// `|f(ξ)|² ≤ constant · |ξ|∞^{-exponent}` whenever `|ξ|∞ ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayHint {
    pub constant: f64,
    pub exponent: f64,
}

impl DecayHint {
    /// Bound on `Σ_{|k|∞ > K} |f(ξ + k)|²`; `None` when the hint cannot control it.
    pub fn lattice_tail(&self, dim: usize, radius: u32, xi_inf: f64) -> Option<f64> {
        let d = dim as f64;
        let p = self.exponent;
        let k = radius as f64;
        if p <= d || k < xi_inf + 1.0 || k < 1.0 {
            return None;
        }
        let shell = 2.0 * d * math::powi(3.0, dim as i32 - 1);
        let shift = math::powf(1.0 - xi_inf / (k + 1.0), -p);
        Some(shell * self.constant * shift * math::powf(k, d - p) / (p - d))
    }
}

/// Piecewise-constant samples on a regular grid over `[lo, hi)`; zero outside.
///
/// Cell `(i_0, .., i_{d-1})` is stored at `Σ i_k · stride_k` with axis 0 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
    pub samples: Vec<Complex64>,
}

impl Grid {
    pub fn new(
        lo: Vec<f64>,
        hi: Vec<f64>,
        resolution: Vec<usize>,
        samples: Vec<Complex64>,
    ) -> Result<Self, GenspaceError> {
        let bad = |reason: String| Err(GenspaceError::GridShape { reason });
        if lo.is_empty() || lo.len() != hi.len() || lo.len() != resolution.len() {
            return bad("lo, hi and resolution must share one nonzero length".to_string());
        }
        if lo.len() > crate::point::MAX_DIM {
            return bad(format!("dimension {} too large", lo.len()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return bad("every axis needs lo < hi".to_string());
        }
        if resolution.contains(&0) {
            return bad("resolution entries must be positive".to_string());
        }
        let total: usize = resolution.iter().product();
        if total != samples.len() {
            return bad(format!("expected {total} samples, found {}", samples.len()));
        }
        Ok(Self { lo, hi, resolution, samples })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn bbox(&self) -> Bbox {
        Bbox::new(&self.lo, &self.hi)
    }

    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        let mut index = 0usize;
        let mut stride = 1usize;
        for axis in 0..self.dim() {
            let (lo, hi, n) = (self.lo[axis], self.hi[axis], self.resolution[axis]);
            let x = xi[axis];
            if !(x >= lo && x < hi) {
                return Complex64::new(0.0, 0.0);
            }
            let h = (hi - lo) / n as f64;
            let cell = (math::floor((x - lo) / h) as usize).min(n - 1);
            index += cell * stride;
            stride *= n;
        }
        self.samples[index]
    }
}

#[derive(Clone)]
pub enum FunctionKind {
    ClosedForm,
    Grid(Arc<Grid>),
}

/// An evaluable Fourier-side function `ξ ↦ f̂(ξ)`.
///
/// Optional metadata steers lattice sums: a support box makes them finite, a decay
/// hint bounds the truncated tail, and a closed-form periodization `Σ_k |f̂(ξ+k)|²`
/// replaces the sum entirely where one is known.
#[derive(Clone)]
pub struct FourierFunction {
    dim: usize,
    label: String,
    kind: FunctionKind,
    eval: Arc<ComplexFn>,
    decay: Option<DecayHint>,
    support: Option<Bbox>,
    periodization: Option<Arc<RealFn>>,
}

impl fmt::Debug for FourierFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("grid", &matches!(self.kind, FunctionKind::Grid(_)))
            .field("decay", &self.decay)
            .field("support", &self.support)
            .field("periodization", &self.periodization.is_some())
            .finish()
    }
}

impl FourierFunction {
    pub fn closed_form<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            dim,
            label: label.into(),
            kind: FunctionKind::ClosedForm,
            eval: Arc::new(f),
            decay: None,
            support: None,
            periodization: None,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::closed_form(dim, "zero", |_| Complex64::new(0.0, 0.0)).with_support(Bbox::empty(dim))
    }

    /// Indicator of a bounded region; the region's bounding box becomes the support.
    pub fn indicator(region: RegionSet) -> Self {
        let support = region.bounding().unwrap_or_else(|| {
            panic!("indicator of unbounded region '{}' has no finite support", region.label())
        });
        let label = format!("chi[{}]", region.label());
        Self::closed_form(region.dim(), label, move |x| {
            Complex64::new(if region.contains(x) { 1.0 } else { 0.0 }, 0.0)
        })
        .with_support(support)
    }

    /// Indicator of the half-open box `[lo, hi)`.
    pub fn indicator_box(lo: &[f64], hi: &[f64]) -> Self {
        let b = Bbox::new(lo, hi);
        let (l, h) = (b.lo, b.hi);
        let label = format!("chi[{:?},{:?})", l, h);
        Self::closed_form(lo.len(), label, move |x| {
            let inside = x.iter().enumerate().all(|(i, v)| *v >= l[i] && *v < h[i]);
            Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
        })
        .with_support(b)
    }

    pub fn from_grid(grid: Grid, label: impl Into<String>) -> Self {
        let grid = Arc::new(grid);
        let g = grid.clone();
        Self {
            dim: grid.dim(),
            label: label.into(),
            support: Some(grid.bbox()),
            kind: FunctionKind::Grid(grid),
            eval: Arc::new(move |x| g.eval(x)),
            decay: None,
            periodization: None,
        }
    }

    pub fn with_decay(mut self, hint: DecayHint) -> Self {
        self.decay = Some(hint);
        self
    }

    pub fn with_support(mut self, support: Bbox) -> Self {
        self.support = Some(support);
        self
    }

    /// Attach a closed form of `Σ_k |f̂(ξ + k)|²`.
    pub fn with_periodization<F>(mut self, p: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        self.periodization = Some(Arc::new(p));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn decay(&self) -> Option<DecayHint> {
        self.decay
    }

    pub fn support(&self) -> Option<Bbox> {
        self.support
    }

    pub fn periodization(&self, xi: &[f64]) -> Option<f64> {
        self.periodization.as_ref().map(|p| p(xi))
    }

    pub(crate) fn has_periodization(&self) -> bool {
        self.periodization.is_some()
    }

    #[inline]
    pub fn eval(&self, xi: &[f64]) -> Complex64 {
        debug_assert_eq!(xi.len(), self.dim);
        (self.eval)(xi)
    }

    #[inline]
    pub fn norm_sq(&self, xi: &[f64]) -> f64 {
        self.eval(xi).norm_sqr()
    }

    /// `c · f̂`, metadata rescaled accordingly.
    pub fn scaled(&self, c: Complex64) -> Self {
        let inner = self.eval.clone();
        let c2 = c.norm_sqr();
        let mut out = Self::closed_form(self.dim, format!("{}*{}", c, self.label), move |x| c * inner(x));
        out.support = self.support;
        out.decay = self.decay.map(|h| DecayHint { constant: h.constant * c2, ..h });
        if let Some(p) = self.periodization.clone() {
            out.periodization = Some(Arc::new(move |x| c2 * p(x)));
        }
        out
    }

    /// `|f̂|` as a real function.
    pub fn modulus(&self) -> RealFunction {
        let inner = self.eval.clone();
        RealFunction::new(self.dim, format!("|{}|", self.label), move |x| inner(x).norm())
    }

    /// Fourier transform of `D_A T_q f`: `d_A^{-1/2} e^{-2πi q·A*^{-1}ξ} f̂(A*^{-1}ξ)`.
    ///
    /// Over the digit set `q ∈ Z^d / A Z^d` these generate `D_A V` as a tight frame
    /// whenever `{f}` generates `V` as one.
    pub fn dilated_component(&self, dilation: &DilationMatrix, digit: &[i64]) -> Self {
        let adj = dilation.adjoint();
        let inv = adj.power(-1).expect("power range ≥ 1");
        let m: Vec<f64> = inv.entries().to_vec();
        let dim = self.dim;
        let scale = 1.0 / math::sqrt(dilation.det_abs() as f64);
        let q: Vec<f64> = digit.iter().map(|&v| v as f64).collect();
        let inner = self.eval.clone();
        let label = format!("D_A T_{:?} {}", digit, self.label);
        let apply = move |x: &[f64]| {
            let mut y = Point::zeros(dim);
            for i in 0..dim {
                y.as_mut_slice()[i] = (0..dim).map(|k| m[i * dim + k] * x[k]).sum();
            }
            y
        };
        let mut out = Self::closed_form(dim, label, move |x| {
            let y = apply(x);
            let phase: f64 = q.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
            let rot = Complex64::new(math::cos(2.0 * PI * phase), -math::sin(2.0 * PI * phase));
            rot * inner(&y) * scale
        });
        if let Some(h) = self.decay {
            let norm = adj.power(1).expect("range ≥ 1").norm_inf();
            out.decay = Some(DecayHint {
                constant: h.constant * math::powf(norm, h.exponent) * scale * scale,
                exponent: h.exponent,
            });
        }
        if let Some(s) = self.support {
            // image of the support box under A*: hull of mapped corners
            let fwd = adj.power(1).expect("range ≥ 1");
            let mut hull = Bbox::empty(dim);
            for mask in 0..(1usize << dim) {
                let mut c = Point::zeros(dim);
                for i in 0..dim {
                    c.as_mut_slice()[i] = if mask >> i & 1 == 1 { s.hi[i] } else { s.lo[i] };
                }
                let img = fwd.apply(&c);
                hull = hull.hull(&Bbox { lo: img, hi: img });
            }
            out.support = Some(hull);
        }
        out
    }
}

/// A real-valued function on `R^d` (spectral functions, moduli, differences).
#[derive(Clone)]
pub struct RealFunction {
    dim: usize,
    label: String,
    eval: Arc<RealFn>,
}

impl fmt::Debug for RealFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFunction({}, d={})", self.label, self.dim)
    }
}

impl RealFunction {
    pub fn new<F>(dim: usize, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self { dim, label: label.into(), eval: Arc::new(f) }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::new(dim, format!("const({c})"), move |_| c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn grid_is_piecewise_constant_and_zero_outside() {
        let samples = vec![Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let g = Grid::new(vec![0.0], vec![1.0], vec![2], samples).unwrap();
        let f = FourierFunction::from_grid(g, "g");
        assert_eq!(f.eval(&[0.1]).re, 1.0);
        assert_eq!(f.eval(&[0.49]).re, 1.0);
        assert_eq!(f.eval(&[0.5]).re, 2.0);
        assert_eq!(f.eval(&[0.999]).re, 2.0);
        assert_eq!(f.eval(&[1.0]).re, 0.0);
        assert_eq!(f.eval(&[-0.01]).re, 0.0);
    }

    #[test]
    fn grid_shape_errors() {
        assert!(Grid::new(vec![0.0], vec![1.0], vec![3], vec![Complex64::new(0.0, 0.0)]).is_err());
        assert!(Grid::new(vec![1.0], vec![0.0], vec![1], vec![Complex64::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn two_dimensional_grid_layout() {
        // axis 0 fastest: index = i0 + 2*i1
        let s: Vec<Complex64> = (0..4).map(|v| Complex64::new(v as f64, 0.0)).collect();
        let g = Grid::new(vec![0.0, 0.0], vec![2.0, 2.0], vec![2, 2], s).unwrap();
        assert_eq!(g.eval(&[1.5, 0.5]).re, 1.0);
        assert_eq!(g.eval(&[0.5, 1.5]).re, 2.0);
    }

    #[test]
    fn tail_bound_matches_haar_closed_form() {
        let h = DecayHint { constant: 1.0 / (PI * PI), exponent: 2.0 };
        let t = h.lattice_tail(1, 10_000, 0.0).unwrap();
        assert!((t - 2.0 / (PI * PI * 10_000.0)).abs() < 1e-12);
        assert!(h.lattice_tail(2, 100, 0.0).is_none());
    }
}
