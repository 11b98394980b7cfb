//! Regions of `R^d` and sampled measure-theoretic tests at the origin.
//!
//! Every ratio is estimated by pull-back sampling: points are drawn from a fixed ball
//! `B_r` and mapped by `A^{-j}`. Because `|A^{-j}S| = d_A^{-j}|S|`, the fraction of
//! pulled-back points landing in a set equals its relative measure in `A^{-j}B_r`, and
//! the sample density never degrades with `j`.

mod density;
pub mod expr;
mod region;

pub use density::{
    check_invariant_set, is_absorbing, is_approx_continuity_point, is_density_point, is_locally_nonzero,
    limit_at, relative_measure, subsequence_limit, AbsorbingReport, ContinuityReport, DensityReport,
    EpsilonLevel, InvariantReport, LimitSample, LimitSamples, MeasureEstimate,
};
pub(crate) use density::{binomial_se, draw_in_region};
pub use expr::{ExprError, RegionExpr};
pub use region::RegionSet;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::dilation::{DilationError, DilationMatrix};

/// Three-valued outcome of a sampled test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn is_decisive(self) -> bool {
        self != Verdict::Inconclusive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Verdict for a fraction that should reach `1 - ε`: PASS when it does, FAIL when it
    /// falls short by more than three standard errors.
    pub fn from_fraction(fraction: f64, std_error: f64, epsilon: f64) -> Self {
        if fraction >= 1.0 - epsilon {
            Verdict::Pass
        } else if fraction + 3.0 * std_error < 1.0 - epsilon {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        }
    }

    /// Worst of several verdicts: any FAIL wins, then any INCONCLUSIVE.
    pub fn all<I: IntoIterator<Item = Verdict>>(it: I) -> Self {
        let mut out = Verdict::Pass;
        for v in it {
            match v {
                Verdict::Fail => return Verdict::Fail,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Pass => {}
            }
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One diagnostic value in a named series, e.g. a ratio at level `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub series: String,
    pub x: f64,
    pub value: f64,
}

impl TraceRow {
    pub fn new(series: impl Into<String>, x: f64, value: f64) -> Self {
        Self { series: series.into(), x, value }
    }
}

/// Sampling budget and tolerances shared by all geometry tests.
///
/// The dilation is passed to each operation separately because callers use both `A`
/// and `A*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityProbe {
    /// Deepest level; `None` means the dimension default of the dilation.
    pub j_max: Option<u32>,
    /// Terminal window `[j_max - window, j_max]`.
    pub window: u32,
    pub samples_per_level: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub radii: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    /// Half width of the cube from which points of `G` are drawn.
    pub box_half_width: f64,
    /// Oscillation bound below which a tail counts as converged.
    pub convergence_tol: f64,
}

impl Default for DensityProbe {
    fn default() -> Self {
        Self {
            j_max: None,
            window: 4,
            samples_per_level: 100_000,
            seed: 42,
            epsilon: 1e-3,
            radii: alloc::vec![0.5, 1.0, 2.0],
            eps_ladder: alloc::vec![0.1, 0.01, 0.001],
            box_half_width: 8.0,
            convergence_tol: 1e-6,
        }
    }
}

/// Smallest admissible sample count per level.
pub const MIN_SAMPLES: usize = 1000;

impl DensityProbe {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |reason: &str| Err(GeometryError::InvalidProbe { reason: reason.into() });
        if self.samples_per_level < MIN_SAMPLES {
            return bad("samples_per_level must be at least 1000");
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon must lie in (0, 1)");
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r > 0.0)) {
            return bad("radii must be positive and non-empty");
        }
        if self.eps_ladder.is_empty() || self.eps_ladder.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("eps_ladder entries must lie in (0, 1)");
        }
        if !(self.box_half_width > 0.0) {
            return bad("box_half_width must be positive");
        }
        if let Some(j) = self.j_max {
            if j < self.window {
                return bad("j_max must be at least window");
            }
        }
        Ok(())
    }

    pub fn j_max_for(&self, dilation: &DilationMatrix) -> u32 {
        self.j_max.unwrap_or_else(|| crate::dilation::default_power_range(dilation.dim()))
    }

    /// Validate and return `(dilation with enough tabulated powers, j_max)`.
    pub(crate) fn prepare(&self, dilation: &DilationMatrix) -> Result<(DilationMatrix, u32), GeometryError> {
        self.validate()?;
        let j_max = self.j_max_for(dilation);
        if j_max < self.window {
            return Err(GeometryError::InvalidProbe { reason: "j_max must be at least window".into() });
        }
        let a = if dilation.power_range() >= j_max { dilation.clone() } else { dilation.with_power_range(j_max)? };
        Ok((a, j_max))
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("no sample of G hit at level j = {j} (r = {r}); G is negligible near the origin at this scale")]
    EmptyDenominator { j: i64, r: f64 },
    #[error("invalid probe: {reason}")]
    InvalidProbe { reason: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Dilation(#[from] DilationError),
}
