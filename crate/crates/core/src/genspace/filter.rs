use alloc::vec::Vec;

use num_complex::Complex64;

use super::{FourierFunction, GeneratorSystem, GenspaceError, SampleCheck};
use crate::dilation::DilationMatrix;
use crate::point::{Bbox, Point};
use crate::TAU_SUPP;

/// The low-pass filter `m` of the scaling equation `φ̂(A*ξ) = m(ξ) φ̂(ξ)`.
///
/// `m` is only determined where `φ̂` is numerically nonzero; [`LowPassFilter::eval`]
/// returns `None` elsewhere.
#[derive(Clone, Debug)]
pub struct LowPassFilter {
    generator: FourierFunction,
    adjoint: DilationMatrix,
    /// Largest `|m(ξ)|` seen on the mask.
    pub max_modulus: f64,
    /// Largest `|φ̂(A*ξ)|` seen where `φ̂(ξ)` vanishes.
    pub off_mask_residual: f64,
    /// Largest `|m(ξ + e_i) - m(ξ)|` over samples where both sides are defined.
    pub periodicity_residual: f64,
    pub samples: usize,
}

impl LowPassFilter {
    pub fn defined(&self, xi: &[f64]) -> bool {
        self.generator.norm_sq(xi) > TAU_SUPP
    }

    pub fn eval(&self, xi: &[f64]) -> Option<Complex64> {
        let den = self.generator.eval(xi);
        if den.norm_sqr() <= TAU_SUPP {
            return None;
        }
        let up = self.adjoint.apply_power(1, &Point::new(xi)).ok()?;
        Some(self.generator.eval(&up) / den)
    }

    /// `|φ̂(A*ξ) - m(ξ)φ̂(ξ)|`, zero on the mask up to rounding.
    pub fn consistency_residual(&self, xi: &[f64]) -> f64 {
        let up = match self.adjoint.apply_power(1, &Point::new(xi)) {
            Ok(p) => p,
            Err(_) => return f64::INFINITY,
        };
        let lhs = self.generator.eval(&up);
        let rhs = self.eval(xi).unwrap_or_default() * self.generator.eval(xi);
        (lhs - rhs).norm()
    }
}

/// Estimate `m = φ̂(A*·)/φ̂` for a principal system and validate it on samples.
pub fn estimate_filter(system: &GeneratorSystem, check: &SampleCheck) -> Result<LowPassFilter, GenspaceError> {
    if !system.is_principal() {
        return Err(GenspaceError::NotPrincipal { count: system.generators().len() });
    }
    let generator = system.generators()[0].clone();
    let dim = system.dim();
    let mut filter = LowPassFilter {
        generator,
        adjoint: system.dilation().adjoint(),
        max_modulus: 0.0,
        off_mask_residual: 0.0,
        periodicity_residual: 0.0,
        samples: 0,
    };
    let extra: Vec<Bbox> = filter.generator.support().into_iter().collect();
    let pts = check.points(dim, &extra, "filter");
    let mut unbounded: Option<(Point, f64)> = None;
    let mut off_mask: Option<(Point, f64)> = None;
    for p in &pts {
        match filter.eval(p) {
            Some(m) => {
                let modulus = m.norm();
                if modulus > filter.max_modulus {
                    filter.max_modulus = modulus;
                    if modulus > 1.0 + check.tol {
                        unbounded = Some((*p, modulus));
                    }
                }
                for axis in 0..dim {
                    let mut k = [0i64; crate::MAX_DIM];
                    k[axis] = 1;
                    if let Some(m2) = filter.eval(&p.shifted(&k[..dim])) {
                        filter.periodicity_residual = filter.periodicity_residual.max((m2 - m).norm());
                    }
                }
            }
            None => {
                let up = filter.adjoint.apply_power(1, p)?;
                let value = filter.generator.eval(&up).norm();
                if value > filter.off_mask_residual {
                    filter.off_mask_residual = value;
                    if value * value > TAU_SUPP {
                        off_mask = Some((*p, value));
                    }
                }
            }
        }
    }
    filter.samples = pts.len();
    if let Some((at, modulus)) = unbounded {
        return Err(GenspaceError::FilterUnbounded { at, modulus });
    }
    if let Some((at, value)) = off_mask {
        return Err(GenspaceError::MaskInconsistent { at, value });
    }
    Ok(filter)
}
