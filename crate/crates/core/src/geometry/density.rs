use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::{DensityProbe, GeometryError, RegionSet, TraceRow, Verdict};
use crate::dilation::DilationMatrix;
use crate::math;
use crate::point::{Bbox, Point};
use crate::rng::{self, Sampler, BLOCK};
use crate::TAU_SUPP;

/// Estimated `|E ∩ G ∩ A^{-j}B_r| / |G ∩ A^{-j}B_r|` with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub ratio: f64,
    pub std_error: f64,
    /// Pulled-back draws landing in `E ∩ G`.
    pub numerator: usize,
    /// Pulled-back draws landing in `G`.
    pub denominator: usize,
    pub draws: usize,
}

impl MeasureEstimate {
    fn new(numerator: usize, denominator: usize, draws: usize) -> Self {
        let ratio = numerator as f64 / denominator as f64;
        Self { ratio, std_error: binomial_se(ratio, denominator), numerator, denominator, draws }
    }
}

pub(crate) fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    math::sqrt((p * (1.0 - p)).max(0.0) / n as f64)
}

fn check_dim(expected: usize, found: usize) -> Result<(), GeometryError> {
    if expected == found {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, found })
    }
}

/// Draw `n` points of the fixed ball `B_r`, map each by `A^{-j}` and visit it.
fn pullback<V: FnMut(&Point)>(
    a: &DilationMatrix,
    j: i64,
    r: f64,
    n: usize,
    seed: u64,
    tag: u64,
    mut visit: V,
) -> Result<(), GeometryError> {
    let view = a.power(-j)?;
    let dim = a.dim();
    rng::for_each_draw(n, seed, tag, j as u64, |s| s.point_in_ball(dim, r), |x| visit(&view.apply(&x)));
    Ok(())
}

/// Up to `samples_per_level` points of `G` inside the probe cube, by rejection.
pub(crate) fn draw_in_region(g: &RegionSet, probe: &DensityProbe, tag: u64) -> Result<Vec<Point>, GeometryError> {
    let cube = Bbox::centered(g.dim(), probe.box_half_width);
    let n = probe.samples_per_level;
    let max_blocks = (64 * n).div_ceil(BLOCK) as u64;
    let mut out = Vec::with_capacity(n);
    let mut block = 0;
    while out.len() < n && block < max_blocks {
        let mut s = Sampler::new(rng::sub_seed(probe.seed, tag, u64::MAX, block));
        for _ in 0..BLOCK {
            let p = s.point_in_box(&cube);
            if g.contains(&p) {
                out.push(p);
                if out.len() == n {
                    break;
                }
            }
        }
        block += 1;
    }
    if out.is_empty() {
        return Err(GeometryError::EmptyDenominator { j: 0, r: probe.box_half_width });
    }
    Ok(out)
}

fn radius_tag(name: &str, r: f64) -> u64 {
    rng::tag(name) ^ r.to_bits()
}

/// Pull-back estimate of the relative measure of `E` in `G ∩ A^{-j}B_r`.
pub fn relative_measure(
    e: &RegionSet,
    g: &RegionSet,
    a: &DilationMatrix,
    j: i64,
    r: f64,
    probe: &DensityProbe,
) -> Result<MeasureEstimate, GeometryError> {
    probe.validate()?;
    check_dim(a.dim(), e.dim())?;
    check_dim(a.dim(), g.dim())?;
    let a = if a.power_range() as u64 >= j.unsigned_abs() { a.clone() } else { a.with_power_range(j.unsigned_abs() as u32)? };
    let (mut num, mut den) = (0usize, 0usize);
    let n = probe.samples_per_level;
    pullback(&a, j, r, n, probe.seed, radius_tag("relative_measure", r), |y| {
        if g.contains(y) {
            den += 1;
            if e.contains(y) {
                num += 1;
            }
        }
    })?;
    if den == 0 {
        return Err(GeometryError::EmptyDenominator { j, r });
    }
    Ok(MeasureEstimate::new(num, den, n))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub verdict: Verdict,
    /// Smallest ratio over the terminal window and all radii.
    pub min_ratio: f64,
    pub trace: Vec<TraceRow>,
}

fn density_over(
    e: &RegionSet,
    g: &RegionSet,
    a: &DilationMatrix,
    probe: &DensityProbe,
    radii: &[f64],
) -> Result<DensityReport, GeometryError> {
    let (a, j_max) = probe.prepare(a)?;
    let mut verdicts = Vec::new();
    let mut trace = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for &r in radii {
        for j in (j_max - probe.window)..=j_max {
            let m = relative_measure(e, g, &a, j as i64, r, probe)?;
            trace.push(TraceRow::new(format!("ratio r={}", r), j as f64, m.ratio));
            min_ratio = min_ratio.min(m.ratio);
            verdicts.push(Verdict::from_fraction(m.ratio, m.std_error, probe.epsilon));
        }
    }
    Ok(DensityReport { verdict: Verdict::all(verdicts), min_ratio, trace })
}

/// Is the origin a point of `(G, A)`-density for `E`?
///
/// PASS when every ratio on the terminal window, for every probe radius, is at least
/// `1 - ε`; FAIL when one falls decisively below.
pub fn is_density_point(
    e: &RegionSet,
    g: &RegionSet,
    a: &DilationMatrix,
    probe: &DensityProbe,
) -> Result<DensityReport, GeometryError> {
    density_over(e, g, a, probe, &probe.radii)
}

/// Is `f` `(G, A)`-locally nonzero at the origin? Zero means `|f| ≤ TAU_SUPP`.
pub fn is_locally_nonzero<F>(f: F, g: &RegionSet, a: &DilationMatrix, probe: &DensityProbe) -> Result<DensityReport, GeometryError>
where
    F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
{
    let nonzero = RegionSet::from_predicate(g.dim(), "nonzero", move |x| f(x).abs() > TAU_SUPP);
    density_over(&nonzero, g, a, probe, &[1.0])
}

/// Outcome of one rung of the ε-ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonLevel {
    pub epsilon: f64,
    /// Least `j₀` such that the failure fraction is below `ε` on all of `[j₀, j_max]`.
    pub j0: Option<u32>,
    pub terminal_fraction: f64,
    pub terminal_std_error: f64,
    /// `j₀` exists and leaves room for the terminal window.
    pub achieved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport {
    pub verdict: Verdict,
    /// Smallest ε of the leading run of achieved rungs.
    pub deepest_epsilon: Option<f64>,
    pub levels: Vec<EpsilonLevel>,
    pub trace: Vec<TraceRow>,
}

/// ε-ladder test of `(G, A)`-approximate continuity of `f` at the origin with value `f0`.
///
/// For each ε, the fraction of `G ∩ A^{-j}B_1` on which `|f - f0| ≥ ε` must drop below
/// ε from some `j₀ ≤ j_max - window` on. FAIL is reported only when the coarsest rung
/// fails decisively across the whole terminal window; a ladder that stalls deeper down
/// is INCONCLUSIVE.
pub fn is_approx_continuity_point<F>(
    f: F,
    f0: f64,
    g: &RegionSet,
    a: &DilationMatrix,
    probe: &DensityProbe,
) -> Result<ContinuityReport, GeometryError>
where
    F: Fn(&[f64]) -> f64,
{
    check_dim(a.dim(), g.dim())?;
    let (a, j_max) = probe.prepare(a)?;
    let ladder = &probe.eps_ladder;
    let mut j0: Vec<Option<u32>> = vec![None; ladder.len()];
    let mut open = vec![true; ladder.len()];
    let mut terminal = vec![(1.0, 0.0); ladder.len()];
    let mut coarse_decisive_fail = true;
    let mut trace = Vec::new();
    let tag = rng::tag("approx_continuity");
    let mut fails = vec![0usize; ladder.len()];
    for j in (0..=j_max).rev() {
        fails.iter_mut().for_each(|c| *c = 0);
        let mut den = 0usize;
        pullback(&a, j as i64, 1.0, probe.samples_per_level, probe.seed, tag, |y| {
            if g.contains(y) {
                den += 1;
                let dev = (f(y) - f0).abs();
                for (c, eps) in fails.iter_mut().zip(ladder) {
                    if !(dev < *eps) {
                        *c += 1;
                    }
                }
            }
        })?;
        if den == 0 {
            return Err(GeometryError::EmptyDenominator { j: j as i64, r: 1.0 });
        }
        for (k, eps) in ladder.iter().enumerate() {
            let q = fails[k] as f64 / den as f64;
            let se = binomial_se(q, den);
            trace.push(TraceRow::new(format!("failure eps={}", eps), j as f64, q));
            if j == j_max {
                terminal[k] = (q, se);
            }
            if k == 0 && j >= j_max - probe.window && !(q - 3.0 * se > *eps) {
                coarse_decisive_fail = false;
            }
            if open[k] {
                if q < *eps {
                    j0[k] = Some(j);
                } else {
                    open[k] = false;
                }
            }
        }
        if j < j_max - probe.window && open.iter().all(|o| !o) {
            break;
        }
    }
    let levels: Vec<EpsilonLevel> = ladder
        .iter()
        .enumerate()
        .map(|(k, &epsilon)| EpsilonLevel {
            epsilon,
            j0: j0[k],
            terminal_fraction: terminal[k].0,
            terminal_std_error: terminal[k].1,
            achieved: j0[k].is_some_and(|j| j <= j_max - probe.window),
        })
        .collect();
    let deepest_epsilon = levels.iter().take_while(|l| l.achieved).last().map(|l| l.epsilon);
    let verdict = if levels.iter().all(|l| l.achieved) {
        Verdict::Pass
    } else if coarse_decisive_fail {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(ContinuityReport { verdict, deepest_epsilon, levels, trace })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorbingReport {
    pub verdict: Verdict,
    /// Fraction of samples with `j₀ ≤ j_max - window`.
    pub absorbed: f64,
    /// Fraction inside `E` at `j_max` but entering only within the terminal window.
    pub late: f64,
    /// Fraction outside `E` at `j_max`.
    pub never: f64,
    pub samples: usize,
    /// `histogram[j₀]` counts samples absorbed from level `j₀` on.
    pub histogram: Vec<u64>,
}

/// Is `E` `A^{-1}`-absorbing in `G`? Samples `ξ ∈ G` from the probe cube and records the
/// least `j₀` with `A^{-j}ξ ∈ E` for all `j₀ ≤ j ≤ j_max`.
pub fn is_absorbing(
    e: &RegionSet,
    g: &RegionSet,
    a: &DilationMatrix,
    probe: &DensityProbe,
) -> Result<AbsorbingReport, GeometryError> {
    check_dim(a.dim(), e.dim())?;
    check_dim(a.dim(), g.dim())?;
    let (a, j_max) = probe.prepare(a)?;
    let pts = draw_in_region(g, probe, rng::tag("absorbing"))?;
    let views = (0..=j_max).map(|j| a.power(-(j as i64))).collect::<Result<Vec<_>, _>>()?;
    let mut histogram = vec![0u64; j_max as usize + 1];
    let mut never = 0usize;
    for xi in &pts {
        let mut j0 = None;
        for j in (0..=j_max).rev() {
            if e.contains(&views[j as usize].apply(xi)) {
                j0 = Some(j);
            } else {
                break;
            }
        }
        match j0 {
            Some(j) => histogram[j as usize] += 1,
            None => never += 1,
        }
    }
    let n = pts.len();
    let absorbed_count: u64 = histogram[..=(j_max - probe.window) as usize].iter().sum();
    let absorbed = absorbed_count as f64 / n as f64;
    let never_frac = never as f64 / n as f64;
    let late = 1.0 - absorbed - never_frac;
    let verdict = if absorbed >= 1.0 - probe.epsilon {
        Verdict::Pass
    } else if Verdict::from_fraction(1.0 - never_frac, binomial_se(never_frac, n), probe.epsilon) == Verdict::Fail {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(AbsorbingReport { verdict, absorbed, late, never: never_frac, samples: n, histogram })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantReport {
    pub verdict: Verdict,
    /// Fraction of cube samples with `x ∈ G ⇔ Ax ∈ G`.
    pub agreement: f64,
    pub samples: usize,
}

/// Sampled test of `AG = G` on the probe cube. Never inconclusive.
pub fn check_invariant_set(g: &RegionSet, a: &DilationMatrix, probe: &DensityProbe) -> Result<InvariantReport, GeometryError> {
    probe.validate()?;
    check_dim(a.dim(), g.dim())?;
    let fwd = a.power(1)?;
    let cube = Bbox::centered(g.dim(), probe.box_half_width);
    let n = probe.samples_per_level;
    let mut agree = 0usize;
    rng::for_each_draw(n, probe.seed, rng::tag("invariant"), 0, |s| s.point_in_box(&cube), |x| {
        if g.contains(&x) == g.contains(&fwd.apply(&x)) {
            agree += 1;
        }
    });
    let agreement = agree as f64 / n as f64;
    let verdict = if agreement >= 1.0 - probe.epsilon { Verdict::Pass } else { Verdict::Fail };
    Ok(InvariantReport { verdict, agreement, samples: n })
}

/// Tail of `j ↦ f(A^{-j}ξ)` over the terminal window at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitSample {
    pub xi: Point,
    /// Value at `j_max`.
    pub tail: f64,
    /// `max - min` over the window.
    pub oscillation: f64,
    /// Non-decreasing along the window.
    pub monotone: bool,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSamples {
    pub j_max: u32,
    pub window: u32,
    pub samples: Vec<LimitSample>,
}

impl LimitSamples {
    pub fn converged_fraction(&self) -> f64 {
        self.samples.iter().filter(|s| s.converged).count() as f64 / self.samples.len() as f64
    }
}

fn tail_of<F: Fn(&[f64]) -> f64>(f: &F, xi: &Point, views: &[crate::dilation::PowerView<'_>], tol: f64) -> LimitSample {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut monotone = true;
    let mut prev: Option<f64> = None;
    let mut last = 0.0;
    for v in views {
        let val = f(&v.apply(xi));
        lo = lo.min(val);
        hi = hi.max(val);
        if let Some(p) = prev {
            if val < p - 4.0 * f64::EPSILON * p.abs().max(1.0) {
                monotone = false;
            }
        }
        prev = Some(val);
        last = val;
    }
    let oscillation = hi - lo;
    LimitSample { xi: *xi, tail: last, oscillation, monotone, converged: oscillation < tol || monotone }
}

fn window_views<'a>(a: &'a DilationMatrix, j_max: u32, window: u32) -> Result<Vec<crate::dilation::PowerView<'a>>, GeometryError> {
    Ok(((j_max - window)..=j_max).map(|j| a.power(-(j as i64))).collect::<Result<Vec<_>, _>>()?)
}

/// Tail estimates of `f(A^{-j}ξ)` for sampled `ξ ∈ G`. Non-convergence is flagged per
/// sample and never aborts.
pub fn subsequence_limit<F>(f: F, g: &RegionSet, a: &DilationMatrix, probe: &DensityProbe) -> Result<LimitSamples, GeometryError>
where
    F: Fn(&[f64]) -> f64,
{
    check_dim(a.dim(), g.dim())?;
    let (a, j_max) = probe.prepare(a)?;
    let pts = draw_in_region(g, probe, rng::tag("subsequence_limit"))?;
    let views = window_views(&a, j_max, probe.window)?;
    let samples = pts.iter().map(|xi| tail_of(&f, xi, &views, probe.convergence_tol)).collect();
    Ok(LimitSamples { j_max, window: probe.window, samples })
}

/// [`subsequence_limit`] at a single point.
pub fn limit_at<F>(f: F, xi: &Point, a: &DilationMatrix, probe: &DensityProbe) -> Result<LimitSample, GeometryError>
where
    F: Fn(&[f64]) -> f64,
{
    check_dim(a.dim(), xi.dim())?;
    let (a, j_max) = probe.prepare(a)?;
    let views = window_views(&a, j_max, probe.window)?;
    Ok(tail_of(&f, xi, &views, probe.convergence_tol))
}
