//! Affine systems `{d_A^{j/2} ψ^α(A^j · - k)}` checked on the Fourier side.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dilation::{DilationError, DilationMatrix};
use crate::genspace::{
    default_truncation, for_each_lattice_point, lattice_range, DecayHint, FourierFunction, GenspaceError, RealFunction, SampleCheck, SpectralFunction,
};
use crate::geometry::{
    is_approx_continuity_point, ContinuityReport, DensityProbe, GeometryError, RegionSet, Verdict,
};
use crate::point::{Bbox, Point};
use crate::rng::{self, Sampler};
use crate::TAU_SUPP;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WaveletError {
    #[error("wavelet system is empty")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator {index} is nonzero at {at:?}, outside G")]
    SupportEscapesRegion { index: usize, at: Point },
    #[error("σ_V(A*^(-1)ξ) - σ_V(ξ) = {value} < -tol at {at:?}; the core space is not refinable")]
    NegativeSpectral { at: Point, value: f64 },
    #[error("system '{label}' is not claimed semiorthogonal")]
    NotSemiorthogonal { label: String },
    #[error("generator '{label}' has neither finite support nor a decay hint")]
    TailUnbounded { label: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Genspace(#[from] GenspaceError),
    #[error(transparent)]
    Dilation(#[from] DilationError),
}

/// A finite multiwavelet `Ψ = {ψ^α}` for `H²_G`.
#[derive(Clone, Debug)]
pub struct WaveletSystem {
    label: String,
    psis: Vec<FourierFunction>,
    dilation: DilationMatrix,
    region: RegionSet,
    semiorthogonal_claimed: bool,
}

impl WaveletSystem {
    /// Each `ψ̂^α` must vanish outside `G` at the sampled points.
    pub fn new(
        label: impl Into<String>,
        psis: Vec<FourierFunction>,
        dilation: DilationMatrix,
        region: RegionSet,
        semiorthogonal_claimed: bool,
    ) -> Result<Self, WaveletError> {
        if psis.is_empty() {
            return Err(WaveletError::Empty);
        }
        let dim = dilation.dim();
        if region.dim() != dim {
            return Err(WaveletError::DimensionMismatch { expected: dim, found: region.dim() });
        }
        let check = SampleCheck::default();
        for (index, psi) in psis.iter().enumerate() {
            if psi.dim() != dim {
                return Err(WaveletError::DimensionMismatch { expected: dim, found: psi.dim() });
            }
            let extra: Vec<Bbox> = psi.support().into_iter().collect();
            for p in check.points(dim, &extra, "wavelet_support") {
                if psi.norm_sq(&p) > TAU_SUPP && !region.contains(&p) {
                    return Err(WaveletError::SupportEscapesRegion { index, at: p });
                }
            }
        }
        Ok(Self { label: label.into(), psis, dilation, region, semiorthogonal_claimed })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn psis(&self) -> &[FourierFunction] {
        &self.psis
    }

    pub fn dilation(&self) -> &DilationMatrix {
        &self.dilation
    }

    pub fn region(&self) -> &RegionSet {
        &self.region
    }

    pub fn dim(&self) -> usize {
        self.dilation.dim()
    }

    pub fn semiorthogonal_claimed(&self) -> bool {
        self.semiorthogonal_claimed
    }

    /// `ξ ↦ Σ_α |ψ̂^α(ξ)|²`.
    pub fn sigma(&self) -> RealFunction {
        let psis = self.psis.clone();
        RealFunction::new(self.dim(), format!("sigma[{}]", self.label), move |x| {
            psis.iter().map(|p| p.norm_sq(x)).sum()
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalderonConfig {
    /// Sum over `|j| ≤ j_range`; `None` uses the dilation's default power range.
    pub j_range: Option<u32>,
    /// Perturbation used to detect samples on a support edge.
    pub h: f64,
    /// Allowed deviation from `χ_G` at interior samples.
    pub tol: f64,
}

impl Default for CalderonConfig {
    fn default() -> Self {
        Self { j_range: None, h: 1e-9, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalderonSum {
    pub value: f64,
    /// The sum changes under a perturbation of size `h`; excluded from statistics.
    pub boundary: bool,
}

fn calderon_raw(w: &WaveletSystem, adj: &DilationMatrix, xi: &Point, j_range: u32) -> Result<f64, DilationError> {
    let mut s = 0.0;
    let r = j_range as i64;
    for j in -r..=r {
        let y = adj.power(j)?.apply(xi);
        s += w.psis.iter().map(|p| p.norm_sq(&y)).sum::<f64>();
    }
    Ok(s)
}

fn adjoint_with_range(a: &DilationMatrix, range: u32) -> Result<DilationMatrix, DilationError> {
    let adj = a.adjoint();
    if adj.power_range() >= range {
        Ok(adj)
    } else {
        adj.with_power_range(range)
    }
}

/// `Σ_α Σ_{|j| ≤ J} |ψ̂^α(A*^j ξ)|²`, flagged when `ξ` sits on a support edge.
pub fn calderon_sum(w: &WaveletSystem, xi: &[f64], cfg: &CalderonConfig) -> Result<CalderonSum, WaveletError> {
    let j_range = cfg.j_range.unwrap_or_else(|| crate::dilation::default_power_range(w.dim()));
    let adj = adjoint_with_range(&w.dilation, j_range)?;
    calderon_at(w, &adj, &Point::new(xi), j_range, cfg)
}

fn calderon_at(
    w: &WaveletSystem,
    adj: &DilationMatrix,
    xi: &Point,
    j_range: u32,
    cfg: &CalderonConfig,
) -> Result<CalderonSum, WaveletError> {
    let value = calderon_raw(w, adj, xi, j_range)?;
    let mut boundary = false;
    for axis in 0..xi.dim() {
        for sign in [-1.0, 1.0] {
            let mut p = *xi;
            p.as_mut_slice()[axis] += sign * cfg.h;
            if (calderon_raw(w, adj, &p, j_range)? - value).abs() > cfg.tol {
                boundary = true;
            }
        }
    }
    Ok(CalderonSum { value, boundary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalderonReport {
    pub verdict: Verdict,
    /// Fraction of interior samples with `|sum - χ_G| ≤ tol`.
    pub agreement: f64,
    pub interior: usize,
    pub boundary: usize,
    pub worst_deviation: f64,
    pub worst_at: Option<Point>,
}

/// Sampled Calderón condition `Σ_{α,j} |ψ̂^α(A*^j ξ)|² = χ_G(ξ)` on the probe cube.
pub fn calderon_check(w: &WaveletSystem, cfg: &CalderonConfig, probe: &DensityProbe) -> Result<CalderonReport, WaveletError> {
    probe.validate()?;
    let j_range = cfg.j_range.unwrap_or_else(|| probe.j_max_for(&w.dilation));
    let adj = adjoint_with_range(&w.dilation, j_range)?;
    let cube = Bbox::centered(w.dim(), probe.box_half_width);
    let mut pts = Vec::with_capacity(probe.samples_per_level);
    rng::for_each_draw(probe.samples_per_level, probe.seed, rng::tag("calderon"), 0, |s| s.point_in_box(&cube), |p| {
        pts.push(p)
    });
    let (mut interior, mut boundary, mut good) = (0usize, 0usize, 0usize);
    let mut worst = 0.0;
    let mut worst_at = None;
    for p in &pts {
        let c = calderon_at(w, &adj, p, j_range, cfg)?;
        if c.boundary {
            boundary += 1;
            continue;
        }
        interior += 1;
        let target = if w.region.contains(p) { 1.0 } else { 0.0 };
        let dev = (c.value - target).abs();
        if dev <= cfg.tol {
            good += 1;
        }
        if dev > worst {
            worst = dev;
            worst_at = Some(*p);
        }
    }
    let agreement = if interior == 0 { 0.0 } else { good as f64 / interior as f64 };
    let se = crate::geometry::binomial_se(agreement, interior);
    let verdict = if interior == 0 { Verdict::Inconclusive } else { Verdict::from_fraction(agreement, se, probe.epsilon) };
    Ok(CalderonReport { verdict, agreement, interior, boundary, worst_deviation: worst, worst_at })
}

/// `σ_W(ξ) = σ_V(A*^{-1}ξ) - σ_V(ξ)`, the spectral function of the wavelet space of a
/// refinable core `V`.
///
/// The difference is scanned first and a value below `-tol` is an error.
pub fn sigma_from_core(sigma: &SpectralFunction, check: &SampleCheck) -> Result<RealFunction, WaveletError> {
    let adj = sigma.dilation().adjoint();
    let inv: Vec<f64> = adj.power(-1)?.entries().to_vec();
    let dim = sigma.dim();
    let s = sigma.clone();
    let diff = move |x: &[f64]| {
        let mut y = Point::zeros(dim);
        for i in 0..dim {
            y.as_mut_slice()[i] = (0..dim).map(|k| inv[i * dim + k] * x[k]).sum();
        }
        s.eval(&y) - s.eval(x)
    };
    let extra: Vec<Bbox> = sigma.support_box().into_iter().collect();
    for p in check.points(dim, &extra, "sigma_from_core") {
        let v = diff(&p);
        if v < -check.tol {
            return Err(WaveletError::NegativeSpectral { at: p, value: v });
        }
    }
    Ok(RealFunction::new(dim, format!("sigma_W[{}]", sigma.label()), diff))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginReport {
    pub verdict: Verdict,
    pub per_psi: Vec<(String, ContinuityReport)>,
}

/// For each `α`, is the origin a point of `A*`-approximate continuity of `|ψ̂^α|` with value 0?
pub fn wavelet_origin_test(w: &WaveletSystem, probe: &DensityProbe) -> Result<OriginReport, WaveletError> {
    if !w.semiorthogonal_claimed {
        return Err(WaveletError::NotSemiorthogonal { label: w.label.clone() });
    }
    let adj = w.dilation.adjoint();
    let all = RegionSet::all(w.dim());
    let mut per_psi = Vec::with_capacity(w.psis.len());
    for (k, psi) in w.psis.iter().enumerate() {
        let seeded = probe.with_seed(rng::sub_seed(probe.seed, rng::tag("origin"), k as u64, 0));
        let report = is_approx_continuity_point(|x| psi.eval(x).norm(), 0.0, &all, &adj, &seeded)?;
        per_psi.push((psi.label().to_string(), report));
    }
    let verdict = Verdict::all(per_psi.iter().map(|(_, r)| r.verdict));
    Ok(OriginReport { verdict, per_psi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiorthogonalityConfig {
    /// Levels `1 ≤ j ≤ j_small` are tested.
    pub j_small: u32,
    pub samples: usize,
    /// Lattice truncation for generators without finite support.
    pub truncation: Option<u32>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SemiorthogonalityConfig {
    fn default() -> Self {
        Self { j_small: 4, samples: 256, truncation: None, tol: 1e-9, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemiorthogonalityReport {
    pub verdict: Verdict,
    /// Largest `|t_j(ξ)|` minus its tail bound.
    pub worst_excess: f64,
    pub worst_value: f64,
    pub worst_at: Option<Point>,
    pub worst_j: u32,
    pub max_tail_bound: f64,
    pub evaluations: usize,
}

/// Hull of the image of a box under a linear map.
fn image_box(b: &Bbox, m: &crate::dilation::PowerView<'_>) -> Bbox {
    let dim = b.dim();
    let mut hull = Bbox::empty(dim);
    for mask in 0..(1usize << dim) {
        let mut c = Point::zeros(dim);
        for i in 0..dim {
            c.as_mut_slice()[i] = if mask >> i & 1 == 1 { b.hi[i] } else { b.lo[i] };
        }
        let img = m.apply(&c);
        hull = hull.hull(&Bbox { lo: img, hi: img });
    }
    hull
}

/// Shift-orthogonality of distinct levels: for `1 ≤ j ≤ j_small` and every pair `α, β`,
/// `t_j(ξ) = Σ_k ψ̂^α(A*^j(ξ+k)) · conj(ψ̂^β(ξ+k))` must vanish.
///
/// Sums are exact over the lattice points meeting a finite support; otherwise they are
/// truncated and the remainder is bounded by Cauchy–Schwarz from the decay hints.
pub fn semiorthogonality_check(w: &WaveletSystem, cfg: &SemiorthogonalityConfig) -> Result<SemiorthogonalityReport, WaveletError> {
    let dim = w.dim();
    let adj = adjoint_with_range(&w.dilation, cfg.j_small)?;
    let radius = cfg.truncation.unwrap_or_else(|| default_truncation(dim));
    let mut sampler = Sampler::new(rng::sub_seed(cfg.seed, rng::tag("semiorthogonality"), 0, 0));
    let cell = Bbox::centered(dim, 0.5);
    let xis: Vec<Point> = (0..cfg.samples).map(|_| sampler.point_in_box(&cell)).collect();
    let mut report = SemiorthogonalityReport {
        verdict: Verdict::Pass,
        worst_excess: f64::NEG_INFINITY,
        worst_value: 0.0,
        worst_at: None,
        worst_j: 0,
        max_tail_bound: 0.0,
        evaluations: 0,
    };
    for j in 1..=cfg.j_small {
        let fwd = adj.power(j as i64)?;
        let back = adj.power(-(j as i64))?;
        let contraction = back.norm_inf();
        for alpha in &w.psis {
            for beta in &w.psis {
                // restrict k to where either factor can be nonzero
                let window = match (alpha.support(), beta.support()) {
                    (Some(a), Some(b)) => Some(image_box(&a, &back).intersect(&b)),
                    (Some(a), None) => Some(image_box(&a, &back)),
                    (None, Some(b)) => Some(b),
                    (None, None) => None,
                };
                let lifted = alpha.decay().map(|h| DecayHint {
                    constant: h.constant * libm::pow(contraction, h.exponent),
                    exponent: h.exponent,
                });
                for xi in &xis {
                    let (lo, hi, tail) = match window {
                        Some(b) => {
                            let (lo, hi) = lattice_range(&b, xi);
                            (lo, hi, 0.0)
                        }
                        None => {
                            let (ha, hb) = match (lifted, beta.decay()) {
                                (Some(a), Some(b)) => (a, b),
                                (None, _) => return Err(WaveletError::TailUnbounded { label: alpha.label().to_string() }),
                                (_, None) => return Err(WaveletError::TailUnbounded { label: beta.label().to_string() }),
                            };
                            let xi_inf = xi.norm_inf();
                            let ta = ha.lattice_tail(dim, radius, xi_inf);
                            let tb = hb.lattice_tail(dim, radius, xi_inf);
                            let (ta, tb) = match (ta, tb) {
                                (Some(a), Some(b)) => (a, b),
                                _ => return Err(GenspaceError::TruncationTooSmall { radius, xi_inf }.into()),
                            };
                            let r = radius as i64;
                            (alloc::vec![-r; dim], alloc::vec![r; dim], libm::sqrt(ta * tb))
                        }
                    };
                    let mut t = Complex64::new(0.0, 0.0);
                    for_each_lattice_point(&lo, &hi, |k| {
                        let eta = xi.shifted(k);
                        t += alpha.eval(&fwd.apply(&eta)) * beta.eval(&eta).conj();
                        report.evaluations += 1;
                    });
                    let value = t.norm();
                    report.max_tail_bound = report.max_tail_bound.max(tail);
                    let excess = value - tail;
                    if excess > report.worst_excess {
                        report.worst_excess = excess;
                        report.worst_value = value;
                        report.worst_at = Some(*xi);
                        report.worst_j = j;
                    }
                }
            }
        }
    }
    if report.worst_excess > cfg.tol {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub verdict: Verdict,
    pub max_abs_diff: f64,
    pub worst_at: Option<Point>,
    pub interior: usize,
    pub boundary: usize,
}

/// Compare `σ_V(A*^{-1}ξ) - σ_V(ξ)` with `Σ_α |ψ̂^α(ξ)|²` on cube samples.
///
/// Samples where either side jumps under a perturbation of size `h` are set aside.
pub fn decomposition_check(
    core_sigma: &SpectralFunction,
    w: &WaveletSystem,
    check: &SampleCheck,
    h: f64,
    tol: f64,
) -> Result<DecompositionReport, WaveletError> {
    let from_core = sigma_from_core(core_sigma, check)?;
    let direct = w.sigma();
    let mut report = DecompositionReport { verdict: Verdict::Pass, max_abs_diff: 0.0, worst_at: None, interior: 0, boundary: 0 };
    for p in check.points(w.dim(), &[], "decomposition") {
        let (a, b) = (from_core.eval(&p), direct.eval(&p));
        let mut edge = false;
        for axis in 0..p.dim() {
            for sign in [-1.0, 1.0] {
                let mut q = p;
                q.as_mut_slice()[axis] += sign * h;
                if (from_core.eval(&q) - a).abs() > tol || (direct.eval(&q) - b).abs() > tol {
                    edge = true;
                }
            }
        }
        if edge {
            report.boundary += 1;
            continue;
        }
        report.interior += 1;
        let diff = (a - b).abs();
        if diff > report.max_abs_diff {
            report.max_abs_diff = diff;
            report.worst_at = Some(p);
        }
    }
    if report.max_abs_diff > tol {
        report.verdict = Verdict::Fail;
    }
    Ok(report)
}
