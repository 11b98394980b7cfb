//! Fourier-side toolkit for shift-invariant spaces under expansive integer dilations.
//!
//! The crate computes spectral functions of finitely generated shift-invariant spaces,
//! checks refinability, and evaluates the family of origin-behaviour conditions that
//! are equivalent to the completeness of the dilates of a refinable space inside an
//! `A`-reducing space `H²_G`. It also carries the matching checks for semiorthogonal
//! tight frame multiwavelets.
//!
//! Everything here is `no_std` + `alloc`: evaluators are pure closures, sampling is
//! driven by seeded ChaCha streams, and all IO lives in the companion `shiftinv` crate.
//!
//! ```
//! use shiftinv_core::registry;
//! use shiftinv_core::genspace::spectral_function;
//!
//! let haar = registry::scaling_system("haar").unwrap();
//! let sigma = spectral_function(&haar, &Default::default()).unwrap();
//! let expected = (2.0 / core::f64::consts::PI).powi(2);
//! assert!((sigma.eval(&[0.5]) - expected).abs() < 1e-12);
//! ```
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

extern crate alloc;

pub mod criteria;
pub mod dilation;
pub mod genspace;
pub mod geometry;
pub mod point;
#[allow(clippy::excessive_precision)]
pub mod quadrature;
pub mod registry;
pub mod rng;
pub mod wavelets;

mod math;

pub use dilation::{DilationError, DilationMatrix};
pub use genspace::{FourierFunction, GeneratorSystem, RealFunction, SpectralFunction};
pub use geometry::{DensityProbe, RegionSet, Verdict};
pub use point::{Bbox, Point, MAX_DIM};

/// Numerical support threshold: a value `v` counts as nonzero when `v > TAU_SUPP`.
///
/// Applied to squared moduli (`|φ̂|²`, `σ`) throughout the crate.
pub const TAU_SUPP: f64 = 1e-12;
