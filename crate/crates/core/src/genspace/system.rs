use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{normalize_generator, FourierFunction, GenspaceError, RealFunction};
use crate::dilation::DilationMatrix;
use crate::geometry::RegionSet;
use crate::point::{Bbox, Point};
use crate::rng::{self, Sampler};
use crate::TAU_SUPP;

/// A finite family `{φ̂^α}` generating a shift-invariant space, with its dilation.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    label: String,
    generators: Vec<FourierFunction>,
    dilation: DilationMatrix,
    claimed_tight_frame: bool,
}

/// Deterministic sampling used by validation scans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleCheck {
    pub half_width: f64,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SampleCheck {
    fn default() -> Self {
        Self { half_width: 8.0, samples: 4096, seed: 0x5eed, tol: 1e-9 }
    }
}

impl SampleCheck {
    /// Scan points: uniform in `[-h, h]^d`, then uniform in each extra box.
    pub fn points(&self, dim: usize, extra: &[Bbox], stream: &str) -> Vec<Point> {
        let mut s = Sampler::new(rng::sub_seed(self.seed, rng::tag(stream), 0, 0));
        let cube = Bbox::centered(dim, self.half_width);
        let mut pts: Vec<Point> = (0..self.samples).map(|_| s.point_in_box(&cube)).collect();
        for b in extra.iter().filter(|b| !b.is_empty()) {
            pts.extend((0..self.samples / 4).map(|_| s.point_in_box(b)));
        }
        pts
    }
}

impl GeneratorSystem {
    pub fn new(
        label: impl Into<String>,
        generators: Vec<FourierFunction>,
        dilation: DilationMatrix,
        claimed_tight_frame: bool,
    ) -> Result<Self, GenspaceError> {
        if generators.is_empty() {
            return Err(GenspaceError::EmptySystem);
        }
        let dim = dilation.dim();
        let check = SampleCheck::default();
        for (index, g) in generators.iter().enumerate() {
            if g.dim() != dim {
                return Err(GenspaceError::DimensionMismatch { expected: dim, found: g.dim() });
            }
            let extra: Vec<Bbox> = g.support().into_iter().collect();
            let pts = check.points(dim, &extra, "nonzero");
            if pts.iter().all(|p| g.norm_sq(p) <= TAU_SUPP) {
                return Err(GenspaceError::ZeroGenerator { index });
            }
        }
        Ok(Self { label: label.into(), generators, dilation, claimed_tight_frame })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn generators(&self) -> &[FourierFunction] {
        &self.generators
    }

    pub fn dilation(&self) -> &DilationMatrix {
        &self.dilation
    }

    pub fn dim(&self) -> usize {
        self.dilation.dim()
    }

    pub fn claimed_tight_frame(&self) -> bool {
        self.claimed_tight_frame
    }

    pub fn is_principal(&self) -> bool {
        self.generators.len() == 1
    }

    /// Principal case: replace `φ̂` by `φ̂ / [φ̂, φ̂]^{1/2}`, which is a tight frame generator.
    pub fn normalized(&self, radius: u32) -> Result<Self, GenspaceError> {
        if !self.is_principal() {
            return Err(GenspaceError::NotPrincipal { count: self.generators.len() });
        }
        let g = normalize_generator(&self.generators[0], radius)?;
        Ok(Self {
            label: self.label.clone(),
            generators: alloc::vec![g],
            dilation: self.dilation.clone(),
            claimed_tight_frame: true,
        })
    }

    /// Generators of `D_A V`: `{D_A T_q φ^α}` over the coset digits `q`.
    pub fn dilated(&self) -> Result<Self, GenspaceError> {
        let digits = self.dilation.digit_set()?;
        let generators = self
            .generators
            .iter()
            .flat_map(|g| digits.iter().map(move |q| g.dilated_component(&self.dilation, q)))
            .collect();
        Ok(Self {
            label: format!("D_A({})", self.label),
            generators,
            dilation: self.dilation.clone(),
            claimed_tight_frame: self.claimed_tight_frame,
        })
    }

    /// Concatenate generator lists (orthogonal sum when the spaces are orthogonal).
    pub fn union(&self, other: &GeneratorSystem) -> Result<Self, GenspaceError> {
        if other.dim() != self.dim() {
            return Err(GenspaceError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        let mut generators = self.generators.clone();
        generators.extend(other.generators.iter().cloned());
        Ok(Self {
            label: format!("{}+{}", self.label, other.label),
            generators,
            dilation: self.dilation.clone(),
            claimed_tight_frame: self.claimed_tight_frame && other.claimed_tight_frame,
        })
    }
}

/// `σ_V(ξ) = Σ_α |φ̂^α(ξ)|²` for a tight frame generator system.
#[derive(Clone, Debug)]
pub struct SpectralFunction {
    system: GeneratorSystem,
}

impl SpectralFunction {
    #[inline]
    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.system.generators.iter().map(|g| g.norm_sq(xi)).sum()
    }

    /// Value with the `0 ≤ σ ≤ 1 + tol` contract enforced.
    pub fn try_eval(&self, xi: &[f64], tol: f64) -> Result<f64, GenspaceError> {
        let v = self.eval(xi);
        if v > 1.0 + tol {
            return Err(GenspaceError::NotNormalized { at: Point::new(xi), value: v });
        }
        Ok(v)
    }

    pub fn system(&self) -> &GeneratorSystem {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn dilation(&self) -> &DilationMatrix {
        self.system.dilation()
    }

    pub fn label(&self) -> &str {
        self.system.label()
    }

    pub fn as_real(&self) -> RealFunction {
        let s = self.clone();
        RealFunction::new(self.dim(), format!("sigma[{}]", self.label()), move |x| s.eval(x))
    }

    /// `Supp(σ) = {σ > TAU_SUPP}` as a region.
    pub fn support_region(&self) -> RegionSet {
        let s = self.clone();
        RegionSet::from_predicate(self.dim(), format!("supp(sigma[{}])", self.label()), move |x| {
            s.eval(x) > TAU_SUPP
        })
    }

    /// Hull of the generators' support boxes, if all are finite.
    pub fn support_box(&self) -> Option<Bbox> {
        let mut hull = Bbox::empty(self.dim());
        for g in self.system.generators() {
            hull = hull.hull(&g.support()?);
        }
        Some(hull)
    }
}

/// Build `σ_V`, scanning for values above `1 + tol` (an error, never clipped).
pub fn spectral_function(
    system: &GeneratorSystem,
    check: &SampleCheck,
) -> Result<SpectralFunction, GenspaceError> {
    if !system.claimed_tight_frame() {
        return Err(GenspaceError::NotTightFrame { label: system.label().to_string() });
    }
    let sigma = SpectralFunction { system: system.clone() };
    let extra: Vec<Bbox> = system.generators().iter().filter_map(|g| g.support()).collect();
    for p in check.points(system.dim(), &extra, "normalization") {
        sigma.try_eval(&p, check.tol)?;
    }
    Ok(sigma)
}

/// Outcome of the sampled refinability test `σ(A*^{-1}ξ) ≥ σ(ξ) - tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinabilityReport {
    pub holds: bool,
    /// Largest `σ(ξ) - σ(A*^{-1}ξ)`; positive values are violations.
    pub worst_violation: f64,
    pub at: Option<Point>,
    pub samples: usize,
}

pub fn check_refinable(sigma: &SpectralFunction, check: &SampleCheck) -> Result<RefinabilityReport, GenspaceError> {
    let adj = sigma.dilation().adjoint();
    let contract = adj.power(-1)?;
    let extra: Vec<Bbox> = sigma.support_box().into_iter().collect();
    let pts = check.points(sigma.dim(), &extra, "refinable");
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for p in &pts {
        let v = sigma.eval(p) - sigma.eval(&contract.apply(p));
        if v > worst {
            worst = v;
            at = Some(*p);
        }
    }
    Ok(RefinabilityReport { holds: worst <= check.tol, worst_violation: worst, at, samples: pts.len() })
}
