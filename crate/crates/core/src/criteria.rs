//! The completeness criteria suite.
//!
//! For an `A`-refinable space `V` with `Supp(σ_V) ⊆ G`, the dilates of `V` are dense in
//! `H²_G` exactly when any one of the following holds, all of them statements about
//! `σ_V` near the origin under the contraction `A*^{-1}`:
//!
//! * C2: `∪_{j∈Z} A*^j Supp(σ_V) = G` a.e.
//! * C3: Cesàro means `(1/|E|) ∫_E σ_V(A*^{-j}x) dx → 1` for bounded `E ⊆ G`.
//! * C4: `Supp(σ_V)` is `A*^{-1}`-absorbing in `G`.
//! * C5: `lim_j σ_V(A*^{-j}ξ) > 0` a.e. on `G`.
//! * C6: `lim_j σ_V(A*^{-j}ξ) = 1` a.e. on `G`.
//! * C7: `σ_V` is `(G, A*)`-locally nonzero at the origin.
//! * C8: the origin is a point of `(G, A*)`-approximate continuity of `σ_V` with value 1.
//! * P: the projection norms `∫_E σ_V(A*^{-j}x) dx` tend to `|E|`.
//!
//! Every criterion is estimated independently and the suite reports their consensus.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dilation::{DilationError, DilationMatrix};
use crate::genspace::{
    check_refinable, default_truncation, spectral_function, GeneratorSystem, GenspaceError, SampleCheck,
    SpectralFunction,
};
use crate::geometry::{
    binomial_se, check_invariant_set, draw_in_region, is_absorbing, is_approx_continuity_point, is_locally_nonzero,
    subsequence_limit, DensityProbe, GeometryError, LimitSamples, RegionSet, TraceRow, Verdict,
};
use crate::point::{Bbox, Point};
use crate::quadrature::{integrate_box, QuadConfig, QuadResult, QuadratureError};
use crate::registry::GroundTruth;
use crate::rng::{self, Sampler, BLOCK};
use crate::TAU_SUPP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    #[serde(rename = "C2_support_union")]
    C2SupportUnion,
    #[serde(rename = "C3_cesaro")]
    C3Cesaro,
    #[serde(rename = "C4_absorbing")]
    C4Absorbing,
    #[serde(rename = "C5_limit_positive")]
    C5LimitPositive,
    #[serde(rename = "C6_limit_one")]
    C6LimitOne,
    #[serde(rename = "C7_locally_nonzero")]
    C7LocallyNonzero,
    #[serde(rename = "C8_approx_continuity")]
    C8ApproxContinuity,
    #[serde(rename = "P_projection_norm")]
    PProjectionNorm,
}

impl CriterionId {
    pub const ALL: [CriterionId; 8] = [
        CriterionId::C2SupportUnion,
        CriterionId::C3Cesaro,
        CriterionId::C4Absorbing,
        CriterionId::C5LimitPositive,
        CriterionId::C6LimitOne,
        CriterionId::C7LocallyNonzero,
        CriterionId::C8ApproxContinuity,
        CriterionId::PProjectionNorm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::C2SupportUnion => "C2_support_union",
            CriterionId::C3Cesaro => "C3_cesaro",
            CriterionId::C4Absorbing => "C4_absorbing",
            CriterionId::C5LimitPositive => "C5_limit_positive",
            CriterionId::C6LimitOne => "C6_limit_one",
            CriterionId::C7LocallyNonzero => "C7_locally_nonzero",
            CriterionId::C8ApproxContinuity => "C8_approx_continuity",
            CriterionId::PProjectionNorm => "P_projection_norm",
        }
    }

    fn seeded(self, probe: &DensityProbe) -> DensityProbe {
        probe.with_seed(rng::sub_seed(probe.seed, rng::tag(self.as_str()), 0, 0))
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    #[serde(rename = "criterion_id")]
    pub id: CriterionId,
    pub verdict: Verdict,
    pub score: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Consensus {
    Pass,
    Fail,
    Split,
}

impl fmt::Display for Consensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Consensus::Pass => "PASS",
            Consensus::Fail => "FAIL",
            Consensus::Split => "SPLIT",
        })
    }
}

/// PASS when all decisive verdicts are PASS and there is at least one; FAIL likewise.
pub fn consensus<'a, I: IntoIterator<Item = &'a CriterionReport>>(reports: I) -> Consensus {
    let (mut pass, mut fail) = (0, 0);
    for r in reports {
        match r.verdict {
            Verdict::Pass => pass += 1,
            Verdict::Fail => fail += 1,
            Verdict::Inconclusive => {}
        }
    }
    match (pass, fail) {
        (p, 0) if p > 0 => Consensus::Pass,
        (0, f) if f > 0 => Consensus::Fail,
        _ => Consensus::Split,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CriteriaError {
    #[error("hypothesis violated: {reason}")]
    HypothesisViolated { reason: String },
    #[error("region '{label}' must be bounded")]
    UnboundedRegion { label: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Genspace(#[from] GenspaceError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Dilation(#[from] DilationError),
}

fn adjoint_for(sigma: &SpectralFunction, probe: &DensityProbe) -> Result<(DilationMatrix, u32), CriteriaError> {
    let adj = sigma.dilation().adjoint();
    let j_max = probe.j_max_for(&adj);
    let adj = if adj.power_range() >= j_max { adj } else { adj.with_power_range(j_max)? };
    Ok((adj, j_max))
}

fn fraction_report(id: CriterionId, hits: usize, n: usize, epsilon: f64, trace: Vec<TraceRow>) -> CriterionReport {
    let score = hits as f64 / n as f64;
    let verdict = Verdict::from_fraction(score, binomial_se(score, n), epsilon);
    CriterionReport { id, verdict, score, tolerance: epsilon, note: None, trace }
}

/// C2: for sampled `ξ ∈ G`, is `σ(A*^{-j}ξ) > TAU_SUPP` for some `|j| ≤ j_max`?
pub fn c2_support_union(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe) -> Result<CriterionReport, CriteriaError> {
    let probe = CriterionId::C2SupportUnion.seeded(probe);
    probe.validate()?;
    let (adj, j_max) = adjoint_for(sigma, &probe)?;
    let pts = draw_in_region(g, &probe, rng::tag("c2"))?;
    let order: Vec<i64> = core::iter::once(0)
        .chain((1..=j_max as i64).flat_map(|j| [j, -j]))
        .collect();
    let views = order.iter().map(|&j| adj.power(-j)).collect::<Result<Vec<_>, _>>()?;
    let mut first_hit = vec![0usize; 2 * j_max as usize + 1];
    let mut hits = 0;
    for xi in &pts {
        if let Some(pos) = views.iter().position(|v| sigma.eval(&v.apply(xi)) > TAU_SUPP) {
            hits += 1;
            first_hit[(order[pos] + j_max as i64) as usize] += 1;
        }
    }
    let trace = first_hit
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(i, c)| TraceRow::new("first_hit_count", i as f64 - j_max as f64, *c as f64))
        .collect();
    Ok(fraction_report(CriterionId::C2SupportUnion, hits, pts.len(), probe.epsilon, trace))
}

/// The default Cesàro family: `B_1 ∩ G` and the shifted box `[1/4, 5/4]^d ∩ G`.
pub fn default_cesaro_family(g: &RegionSet) -> Vec<RegionSet> {
    let d = g.dim();
    vec![
        RegionSet::ball(d, 1.0).intersection(g),
        RegionSet::boxed(&vec![0.25; d], &vec![1.25; d]).intersection(g),
    ]
}

fn draw_bounded(e: &RegionSet, n: usize, seed: u64, tag: u64) -> Result<Vec<Point>, CriteriaError> {
    let b = e.bounding().ok_or_else(|| CriteriaError::UnboundedRegion { label: e.label().to_string() })?;
    let mut out = Vec::with_capacity(n);
    let max_blocks = (64 * n).div_ceil(BLOCK) as u64;
    let mut block = 0;
    while out.len() < n && block < max_blocks {
        let mut s = Sampler::new(rng::sub_seed(seed, tag, 0, block));
        for _ in 0..BLOCK {
            let p = s.point_in_box(&b);
            if e.contains(&p) {
                out.push(p);
                if out.len() == n {
                    break;
                }
            }
        }
        block += 1;
    }
    if out.is_empty() {
        return Err(GeometryError::EmptyDenominator { j: 0, r: 0.0 }.into());
    }
    Ok(out)
}

/// C3: pull-back Cesàro means `(1/|E|) ∫_E σ(A*^{-j}x) dx` over a family of bounded `E ⊆ G`.
///
/// Score is the smallest mean on the terminal window over the family.
pub fn c3_cesaro(sigma: &SpectralFunction, family: &[RegionSet], probe: &DensityProbe) -> Result<CriterionReport, CriteriaError> {
    let probe = CriterionId::C3Cesaro.seeded(probe);
    probe.validate()?;
    let (adj, j_max) = adjoint_for(sigma, &probe)?;
    let mut verdicts = Vec::new();
    let mut trace = Vec::new();
    let mut score = f64::INFINITY;
    for (idx, e) in family.iter().enumerate() {
        let pts = draw_bounded(e, probe.samples_per_level, probe.seed, rng::tag("c3") ^ idx as u64)?;
        let n = pts.len() as f64;
        for j in 0..=j_max {
            let view = adj.power(-(j as i64))?;
            let (mut s1, mut s2) = (0.0, 0.0);
            for x in &pts {
                let v = sigma.eval(&view.apply(x));
                s1 += v;
                s2 += v * v;
            }
            let mean = s1 / n;
            let se = crate::math::sqrt(((s2 / n - mean * mean).max(0.0)) / n);
            trace.push(TraceRow::new(format!("mean E{}={}", idx, e.label()), j as f64, mean));
            if j >= j_max - probe.window {
                score = score.min(mean);
                verdicts.push(Verdict::from_fraction(mean, se, probe.epsilon));
            }
        }
    }
    Ok(CriterionReport {
        id: CriterionId::C3Cesaro,
        verdict: Verdict::all(verdicts),
        score,
        tolerance: probe.epsilon,
        note: None,
        trace,
    })
}

/// C4: is `Supp(σ)` absorbing in `G` under `A*^{-1}`?
pub fn c4_absorbing(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe) -> Result<CriterionReport, CriteriaError> {
    let probe = CriterionId::C4Absorbing.seeded(probe);
    let adj = sigma.dilation().adjoint();
    let r = is_absorbing(&sigma.support_region(), g, &adj, &probe)?;
    let mut trace: Vec<TraceRow> = r
        .histogram
        .iter()
        .enumerate()
        .filter(|(_, c)| **c > 0)
        .map(|(j, c)| TraceRow::new("j0_count", j as f64, *c as f64))
        .collect();
    trace.push(TraceRow::new("late_fraction", 0.0, r.late));
    trace.push(TraceRow::new("never_fraction", 0.0, r.never));
    Ok(CriterionReport { id: CriterionId::C4Absorbing, verdict: r.verdict, score: r.absorbed, tolerance: probe.epsilon, note: None, trace })
}

/// Tails of `σ(A*^{-j}ξ)` shared by C5 and C6.
pub fn spectral_limits(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe) -> Result<LimitSamples, CriteriaError> {
    let probe = probe.with_seed(rng::sub_seed(probe.seed, rng::tag("C5_C6_limits"), 0, 0));
    let adj = sigma.dilation().adjoint();
    Ok(subsequence_limit(|x| sigma.eval(x), g, &adj, &probe)?)
}

/// Samples kept in a tail trace.
const TAIL_TRACE: usize = 256;

fn limit_report(id: CriterionId, limits: &LimitSamples, epsilon: f64, meets: impl Fn(f64) -> bool) -> CriterionReport {
    let n = limits.samples.len();
    let (mut good, mut bad) = (0usize, 0usize);
    for s in &limits.samples {
        if s.converged {
            if meets(s.tail) {
                good += 1;
            } else {
                bad += 1;
            }
        }
    }
    let score = good as f64 / n as f64;
    let bad_frac = bad as f64 / n as f64;
    let verdict = if score >= 1.0 - epsilon {
        Verdict::Pass
    } else if Verdict::from_fraction(1.0 - bad_frac, binomial_se(bad_frac, n), epsilon) == Verdict::Fail {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let mut trace: Vec<TraceRow> =
        limits.samples.iter().take(TAIL_TRACE).map(|s| TraceRow::new("tail", s.xi[0], s.tail)).collect();
    trace.push(TraceRow::new("converged_fraction", limits.j_max as f64, limits.converged_fraction()));
    CriterionReport { id, verdict, score, tolerance: epsilon, note: None, trace }
}

/// C5 from shared tails: the limit is positive.
pub fn c5_from_limits(limits: &LimitSamples, probe: &DensityProbe) -> CriterionReport {
    limit_report(CriterionId::C5LimitPositive, limits, probe.epsilon, |t| t > TAU_SUPP)
}

/// C6 from shared tails: the limit is one, within `[1 - eps_val, 1 + tol]`.
pub fn c6_from_limits(limits: &LimitSamples, probe: &DensityProbe, eps_val: f64, tol: f64) -> CriterionReport {
    limit_report(CriterionId::C6LimitOne, limits, probe.epsilon, |t| t >= 1.0 - eps_val && t <= 1.0 + tol)
}

pub fn c5_limit_positive(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe) -> Result<CriterionReport, CriteriaError> {
    Ok(c5_from_limits(&spectral_limits(sigma, g, probe)?, probe))
}

pub fn c6_limit_one(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe, eps_val: f64) -> Result<CriterionReport, CriteriaError> {
    Ok(c6_from_limits(&spectral_limits(sigma, g, probe)?, probe, eps_val, 1e-9))
}

/// C7: `σ` is `(G, A*)`-locally nonzero at the origin.
pub fn c7_locally_nonzero(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe) -> Result<CriterionReport, CriteriaError> {
    let probe = CriterionId::C7LocallyNonzero.seeded(probe);
    let adj = sigma.dilation().adjoint();
    let s = sigma.clone();
    let r = is_locally_nonzero(move |x| s.eval(x), g, &adj, &probe)?;
    Ok(CriterionReport {
        id: CriterionId::C7LocallyNonzero,
        verdict: r.verdict,
        score: r.min_ratio,
        tolerance: probe.epsilon,
        note: None,
        trace: r.trace,
    })
}

/// C8: the origin is a point of `(G, A*)`-approximate continuity of `σ` with `σ(0) = 1`.
pub fn c8_approx_continuity(sigma: &SpectralFunction, g: &RegionSet, probe: &DensityProbe) -> Result<CriterionReport, CriteriaError> {
    let probe = CriterionId::C8ApproxContinuity.seeded(probe);
    let adj = sigma.dilation().adjoint();
    let r = is_approx_continuity_point(|x| sigma.eval(x), 1.0, g, &adj, &probe)?;
    let finest = r.levels.last().expect("ladder is non-empty");
    let note = Some(match r.deepest_epsilon {
        Some(e) => format!("deepest epsilon reached: {}", e),
        None => "no epsilon level reached".to_string(),
    });
    Ok(CriterionReport {
        id: CriterionId::C8ApproxContinuity,
        verdict: r.verdict,
        score: finest.terminal_fraction,
        tolerance: finest.epsilon,
        note,
        trace: r.trace,
    })
}

/// `‖P_j f‖² = d_A^j ∫_{A*^{-j}E} σ = ∫_E σ(A*^{-j}x) dx`, by quadrature over `E`'s bounding box.
pub fn projection_norm_sq(
    sigma: &SpectralFunction,
    e: &RegionSet,
    j: i64,
    quad: &QuadConfig,
) -> Result<QuadResult, CriteriaError> {
    let b = e.bounding().ok_or_else(|| CriteriaError::UnboundedRegion { label: e.label().to_string() })?;
    let adj = sigma.dilation().adjoint();
    let adj = if adj.power_range() as u64 >= j.unsigned_abs() { adj } else { adj.with_power_range(j.unsigned_abs() as u32)? };
    let view = adj.power(-j)?;
    Ok(integrate_box(
        |x| {
            if e.contains(x) {
                sigma.eval(&view.apply(&Point::new(x)))
            } else {
                0.0
            }
        },
        &b,
        quad,
    )?)
}

/// P: `‖P_{j_max} f‖² / |E|` for `E = [-1/2, 1/2]^d ∩ G`.
pub fn p_projection_norm(
    sigma: &SpectralFunction,
    g: &RegionSet,
    probe: &DensityProbe,
    quad: &QuadConfig,
) -> Result<CriterionReport, CriteriaError> {
    probe.validate()?;
    let d = sigma.dim();
    let e = RegionSet::boxed(&vec![-0.5; d], &vec![0.5; d]).intersection(g);
    let j_max = probe.j_max_for(sigma.dilation());
    let inconclusive = |err: CriteriaError| CriterionReport {
        id: CriterionId::PProjectionNorm,
        verdict: Verdict::Inconclusive,
        score: f64::NAN,
        tolerance: probe.epsilon,
        note: Some(err.to_string()),
        trace: Vec::new(),
    };
    let b = e.bounding().expect("box is bounded");
    let measure = match integrate_box(|x| if e.contains(x) { 1.0 } else { 0.0 }, &b, quad) {
        Ok(m) => m,
        Err(err) => return Ok(inconclusive(err.into())),
    };
    if measure.value <= 0.0 {
        return Err(GeometryError::EmptyDenominator { j: 0, r: 0.5 }.into());
    }
    let mut trace = Vec::with_capacity(j_max as usize + 1);
    let mut last = None;
    for j in 0..=j_max {
        match projection_norm_sq(sigma, &e, j as i64, quad) {
            Ok(r) => {
                trace.push(TraceRow::new("norm_sq", j as f64, r.value));
                last = Some(r);
            }
            Err(err) => return Ok(inconclusive(err)),
        }
    }
    let top = last.expect("at least one level");
    let ratio = top.value / measure.value;
    let slack = (top.error + measure.error) / measure.value;
    trace.push(TraceRow::new("measure_E", 0.0, measure.value));
    let verdict = if ratio >= 1.0 - probe.epsilon {
        Verdict::Pass
    } else if ratio + slack < 1.0 - probe.epsilon {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(CriterionReport { id: CriterionId::PProjectionNorm, verdict, score: ratio, tolerance: probe.epsilon, note: None, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub checks: usize,
    pub violations: usize,
    /// Largest `σ(A*^{-j}ξ) - σ(A*^{-(j+1)}ξ)`.
    pub worst: f64,
    pub worst_at: Option<Point>,
    pub worst_j: u32,
}

/// Scan `σ(A*^{-(j+1)}ξ) ≥ σ(A*^{-j}ξ) - tol` for `j < j_max` over cube samples.
pub fn monotonicity_scan(
    sigma: &SpectralFunction,
    samples: usize,
    j_max: u32,
    half_width: f64,
    tol: f64,
    seed: u64,
) -> Result<MonotonicityReport, CriteriaError> {
    let adj = sigma.dilation().adjoint();
    let adj = if adj.power_range() >= j_max { adj } else { adj.with_power_range(j_max)? };
    let views = (0..=j_max).map(|j| adj.power(-(j as i64))).collect::<Result<Vec<_>, _>>()?;
    let cube = Bbox::centered(sigma.dim(), half_width);
    let mut report = MonotonicityReport { checks: 0, violations: 0, worst: f64::NEG_INFINITY, worst_at: None, worst_j: 0 };
    rng::for_each_draw(samples, seed, rng::tag("monotonicity"), 0, |s| s.point_in_box(&cube), |xi| {
        let mut prev = sigma.eval(&xi);
        for j in 0..j_max {
            let next = sigma.eval(&views[j as usize + 1].apply(&xi));
            let drop = prev - next;
            report.checks += 1;
            if drop > tol {
                report.violations += 1;
            }
            if drop > report.worst {
                report.worst = drop;
                report.worst_at = Some(xi);
                report.worst_j = j;
            }
            prev = next;
        }
    });
    Ok(report)
}

/// Sample-level evidence for the theorem hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypotheses {
    pub refinable_worst_violation: f64,
    pub invariance_agreement: f64,
    /// Fraction of sampled support points of `σ` lying outside `G`.
    pub support_escape_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub system: String,
    pub region: String,
    pub j_max: u32,
    pub seed: u64,
    pub hypotheses: Hypotheses,
    pub reports: Vec<CriterionReport>,
    pub consensus: Consensus,
    pub ground_truth: Option<GroundTruth>,
    /// Consensus agrees with the ground truth label, when one is given.
    pub matches: Option<bool>,
}

impl SuiteResult {
    pub fn report(&self, id: CriterionId) -> Option<&CriterionReport> {
        self.reports.iter().find(|r| r.id == id)
    }
}

/// Tuning of the suite beyond the density probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOptions {
    pub quad: QuadConfig,
    /// C6 accepts tails in `[1 - limit_eps, 1 + 1e-9]`.
    pub limit_eps: f64,
    /// Samples for the refinability and support scans.
    pub hypothesis_samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { quad: QuadConfig::default(), limit_eps: 1e-3, hypothesis_samples: 4096 }
    }
}

/// Run C2 through C8 and P on the spectral function of `system` relative to `G`.
///
/// Non-tight-frame principal systems are normalized first. Fails with
/// `HypothesisViolated` when the space is not refinable, `G` is not `A*`-invariant, or
/// `Supp(σ)` escapes `G`.
pub fn run_suite(
    system: &GeneratorSystem,
    g: &RegionSet,
    probe: &DensityProbe,
    options: &SuiteOptions,
    ground_truth: Option<GroundTruth>,
) -> Result<SuiteResult, CriteriaError> {
    probe.validate()?;
    let system = if system.claimed_tight_frame() || !system.is_principal() {
        system.clone()
    } else {
        system.normalized(default_truncation(system.dim()))?
    };
    let check = SampleCheck { samples: options.hypothesis_samples, seed: probe.seed, ..SampleCheck::default() };
    let sigma = spectral_function(&system, &check)?;

    let refinable = check_refinable(&sigma, &check)?;
    if !refinable.holds {
        return Err(CriteriaError::HypothesisViolated {
            reason: format!(
                "space is not refinable: σ(ξ) - σ(A*^(-1)ξ) = {} at {:?}",
                refinable.worst_violation, refinable.at
            ),
        });
    }
    let adj = sigma.dilation().adjoint();
    let invariant = check_invariant_set(g, &adj, probe)?;
    if invariant.verdict != Verdict::Pass {
        return Err(CriteriaError::HypothesisViolated {
            reason: format!("G = {} is not A*-invariant (agreement {})", g.label(), invariant.agreement),
        });
    }
    let extra: Vec<Bbox> = sigma.support_box().into_iter().collect();
    let (mut hits, mut escapes) = (0usize, 0usize);
    for p in check.points(sigma.dim(), &extra, "support_in_g") {
        if sigma.eval(&p) > TAU_SUPP {
            hits += 1;
            if !g.contains(&p) {
                escapes += 1;
            }
        }
    }
    let escape = if hits == 0 { 0.0 } else { escapes as f64 / hits as f64 };
    if escape > probe.epsilon {
        return Err(CriteriaError::HypothesisViolated {
            reason: format!("Supp(σ) escapes G = {} on a fraction {} of support samples", g.label(), escape),
        });
    }

    let limits = spectral_limits(&sigma, g, probe)?;
    let reports = vec![
        c2_support_union(&sigma, g, probe)?,
        c3_cesaro(&sigma, &default_cesaro_family(g), probe)?,
        c4_absorbing(&sigma, g, probe)?,
        c5_from_limits(&limits, probe),
        c6_from_limits(&limits, probe, options.limit_eps, 1e-9),
        c7_locally_nonzero(&sigma, g, probe)?,
        c8_approx_continuity(&sigma, g, probe)?,
        p_projection_norm(&sigma, g, probe, &options.quad)?,
    ];
    let consensus = consensus(&reports);
    let matches = ground_truth.map(|t| match t {
        GroundTruth::Complete => consensus == Consensus::Pass,
        GroundTruth::Incomplete => consensus == Consensus::Fail,
    });
    Ok(SuiteResult {
        system: system.label().to_string(),
        region: g.label().to_string(),
        j_max: probe.j_max_for(sigma.dilation()),
        seed: probe.seed,
        hypotheses: Hypotheses {
            refinable_worst_violation: refinable.worst_violation,
            invariance_agreement: invariant.agreement,
            support_escape_fraction: escape,
        },
        reports,
        consensus,
        ground_truth,
        matches,
    })
}
