//! Generator systems on the Fourier side.
//!
//! A shift-invariant space `V` is never materialised; it is carried by a finite
//! [`GeneratorSystem`] `{φ̂^α}` together with its dilation. From it we get the bracket
//! product, the normalised (tight frame) generator of a principal space, the spectral
//! function `σ_V = Σ_α |φ̂^α|²`, the low-pass filter of the scaling equation and a
//! sampled refinability check.

mod bracket;
mod filter;
mod function;
mod system;

pub use bracket::{bracket_product, normalize_generator, BracketEstimate};
pub(crate) use bracket::{for_each_lattice_point, lattice_range};
pub use filter::{estimate_filter, LowPassFilter};
pub use function::{DecayHint, FourierFunction, FunctionKind, Grid, RealFunction};
pub use system::{
    check_refinable, spectral_function, GeneratorSystem, RefinabilityReport, SampleCheck,
    SpectralFunction,
};

use alloc::string::String;

use crate::point::Point;

/// Default truncation radius of the lattice sum: `10⁴` in `d = 1`, `10²` per axis otherwise.
pub fn default_truncation(dim: usize) -> u32 {
    if dim == 1 {
        10_000
    } else {
        100
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenspaceError {
    #[error("no decay information for closed-form function '{label}'; lattice tail is unbounded")]
    TailUnbounded { label: String },
    #[error("truncation radius {radius} too small for |ξ|∞ = {xi_inf}")]
    TruncationTooSmall { radius: u32, xi_inf: f64 },
    #[error("spectral value {value} exceeds 1 + tol at {at:?}; not a tight frame generator")]
    NotNormalized { at: Point, value: f64 },
    #[error("system '{label}' is not claimed to be a tight frame generator; normalize it first")]
    NotTightFrame { label: String },
    #[error("operation needs a single generator, system has {count}")]
    NotPrincipal { count: usize },
    #[error("filter modulus {modulus} exceeds 1 + tol at {at:?}")]
    FilterUnbounded { at: Point, modulus: f64 },
    #[error("scaling equation fails off the generator support at {at:?} (|φ̂(A*ξ)| = {value})")]
    MaskInconsistent { at: Point, value: f64 },
    #[error("generator system is empty")]
    EmptySystem,
    #[error("generator {index} is identically zero on the sampling grid")]
    ZeroGenerator { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grid shape invalid: {reason}")]
    GridShape { reason: String },
    #[error(transparent)]
    Dilation(#[from] crate::dilation::DilationError),
}
