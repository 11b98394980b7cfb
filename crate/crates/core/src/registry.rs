//! Built-in scaling functions and wavelets with their ground-truth labels.
//!
//! Ground truth says whether the dilates of the space are dense in `H²_G` for a given
//! region `G`. It comes from closed-form analysis of each example and is keyed by the
//! canonical text of the region expression.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dilation::DilationMatrix;
use crate::genspace::{default_truncation, DecayHint, FourierFunction, GeneratorSystem, GenspaceError};
use crate::geometry::{RegionExpr, RegionSet};
use crate::math;
use crate::point::Bbox;
use crate::wavelets::{WaveletError, WaveletSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundTruth {
    /// The dilates of `V` are dense in `H²_G`.
    Complete,
    Incomplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Scaling,
    Wavelet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Case {
    pub region: &'static str,
    pub truth: GroundTruth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Entry {
    pub key: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
    /// Region used when a run does not name one.
    pub default_region: &'static str,
    pub cases: &'static [Case],
    /// Scaling key of the core space of a wavelet, when there is one.
    pub core: Option<&'static str>,
}

const COMPLETE_ON_ALL: &[Case] = &[Case { region: "all", truth: GroundTruth::Complete }];

const ENTRIES: &[Entry] = &[
    Entry {
        key: "haar",
        kind: EntryKind::Scaling,
        description: "Haar scaling function, φ̂(ξ) = e^{-iπξ} sinc(πξ), A = [[2]]",
        default_region: "all",
        cases: COMPLETE_ON_ALL,
        core: None,
    },
    Entry {
        key: "shannon",
        kind: EntryKind::Scaling,
        description: "Shannon scaling function, φ̂ = χ_[-1/2,1/2), A = [[2]]",
        default_region: "all",
        cases: COMPLETE_ON_ALL,
        core: None,
    },
    Entry {
        key: "bspline:n",
        kind: EntryKind::Scaling,
        description: "normalized cardinal B-spline of order n, φ̂ = sinc^n(πξ) e^{-iπnξ} / [φ̂,φ̂]^{1/2}, A = [[2]]",
        default_region: "all",
        cases: COMPLETE_ON_ALL,
        core: None,
    },
    Entry {
        key: "hardy-shannon",
        kind: EntryKind::Scaling,
        description: "Hardy-space Shannon function, φ̂ = χ_(0,1/2], A = [[2]]",
        default_region: "halfspace(1,0)",
        cases: &[
            Case { region: "halfspace(1,0)", truth: GroundTruth::Complete },
            Case { region: "all", truth: GroundTruth::Incomplete },
        ],
        core: None,
    },
    Entry {
        key: "quincunx-shannon",
        kind: EntryKind::Scaling,
        description: "indicator of the fundamental domain [-1/2,1/2)², quincunx dilation [[1,1],[1,-1]]",
        default_region: "all",
        cases: COMPLETE_ON_ALL,
        core: None,
    },
    Entry {
        key: "haar-wavelet",
        kind: EntryKind::Wavelet,
        description: "Haar wavelet, ψ̂(ξ) = i e^{-iπξ} sin(πξ/2) sinc(πξ/2)",
        default_region: "all",
        cases: &[],
        core: Some("haar"),
    },
    Entry {
        key: "shannon-wavelet",
        kind: EntryKind::Wavelet,
        description: "Shannon wavelet, ψ̂ = χ_[-1,-1/2) + χ_[1/2,1)",
        default_region: "all",
        cases: &[],
        core: Some("shannon"),
    },
    Entry {
        key: "journe",
        kind: EntryKind::Wavelet,
        description: "Journé wavelet, ψ̂ = χ_K with K = [-16/7,-2] ∪ [-1/2,-2/7] ∪ [2/7,1/2] ∪ [2,16/7]",
        default_region: "all",
        cases: &[],
        core: None,
    },
    Entry {
        key: "perturbed-shannon-wavelet",
        kind: EntryKind::Wavelet,
        description: "Shannon wavelet plus χ_[-0.05,0.05]; double covers near the origin (negative control)",
        default_region: "all",
        cases: &[],
        core: None,
    },
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("unknown registry key '{0}'")]
    UnknownKey(String),
    #[error("'{0}' is not a scaling example")]
    NotScaling(String),
    #[error("'{0}' is not a wavelet example")]
    NotWavelet(String),
    #[error(transparent)]
    Genspace(#[from] GenspaceError),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
}

pub fn entries() -> &'static [Entry] {
    ENTRIES
}

/// Order of a `bspline:n` key.
fn bspline_order(key: &str) -> Option<u32> {
    let n: u32 = key.strip_prefix("bspline:")?.parse().ok()?;
    (1..=12).contains(&n).then_some(n)
}

pub fn lookup(key: &str) -> Result<&'static Entry, RegistryError> {
    let template = if bspline_order(key).is_some() { "bspline:n" } else { key };
    ENTRIES.iter().find(|e| e.key == template).ok_or_else(|| RegistryError::UnknownKey(key.to_string()))
}

/// Declared label of `(key, region)`, matched on the canonical region expression.
pub fn ground_truth(key: &str, region: &str) -> Option<GroundTruth> {
    let entry = lookup(key).ok()?;
    let want = RegionExpr::canonical(region).ok()?;
    entry
        .cases
        .iter()
        .find(|c| RegionExpr::canonical(c.region).ok().as_deref() == Some(want.as_str()))
        .map(|c| c.truth)
}

fn dyadic() -> DilationMatrix {
    DilationMatrix::scalar(2).expect("2 is expansive")
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(t: f64) -> Complex64 {
    c(math::cos(t), -math::sin(t))
}

/// Haar transform `e^{-iπξ} sinc(πξ)`: orthonormal shifts, so its periodization is 1.
pub fn haar_transform() -> FourierFunction {
    FourierFunction::closed_form(1, "haar", |x| phase(PI * x[0]) * math::sinc_pi(x[0]))
        .with_decay(DecayHint { constant: 1.0 / (PI * PI), exponent: 2.0 })
        .with_periodization(|_| 1.0)
}

/// Raw transform of the centred-at-`n/2` cardinal B-spline of order `n`.
///
/// Its periodization `Σ_k sinc^{2n}(π(ξ+k))` is the trigonometric polynomial
/// `M_{2n}(n) + 2 Σ_{l=1}^{n-1} M_{2n}(n+l) cos(2πlξ)`.
pub fn bspline_transform(n: u32) -> FourierFunction {
    let nf = n as f64;
    let coeffs: Vec<f64> = (0..n).map(|l| math::cardinal_bspline(2 * n, nf + l as f64)).collect();
    FourierFunction::closed_form(1, format!("bspline{}", n), move |x| {
        phase(PI * nf * x[0]) * math::powi(math::sinc_pi(x[0]), n as i32)
    })
    .with_decay(DecayHint { constant: math::powi(PI, -2 * n as i32), exponent: 2.0 * nf })
    .with_periodization(move |x| {
        coeffs[0] + 2.0 * (1..coeffs.len()).map(|l| coeffs[l] * math::cos(2.0 * PI * l as f64 * x[0])).sum::<f64>()
    })
}

/// Tight frame generator system of a scaling example (normalized where needed).
pub fn scaling_system(key: &str) -> Result<GeneratorSystem, RegistryError> {
    let entry = lookup(key)?;
    if entry.kind != EntryKind::Scaling {
        return Err(RegistryError::NotScaling(key.to_string()));
    }
    if let Some(n) = bspline_order(key) {
        let raw = GeneratorSystem::new(key, vec![bspline_transform(n)], dyadic(), false)?;
        return Ok(raw.normalized(default_truncation(1))?);
    }
    let system = match key {
        "haar" => GeneratorSystem::new(key, vec![haar_transform()], dyadic(), true)?,
        "shannon" => GeneratorSystem::new(key, vec![FourierFunction::indicator_box(&[-0.5], &[0.5])], dyadic(), true)?,
        "hardy-shannon" => {
            let f = FourierFunction::closed_form(1, "chi(0,1/2]", |x| {
                c(if x[0] > 0.0 && x[0] <= 0.5 { 1.0 } else { 0.0 }, 0.0)
            })
            .with_support(Bbox::new(&[0.0], &[0.5]));
            GeneratorSystem::new(key, vec![f], dyadic(), true)?
        }
        "quincunx-shannon" => GeneratorSystem::new(
            key,
            vec![FourierFunction::indicator_box(&[-0.5, -0.5], &[0.5, 0.5])],
            DilationMatrix::quincunx(),
            true,
        )?,
        _ => return Err(RegistryError::UnknownKey(key.to_string())),
    };
    Ok(system)
}

fn shannon_wavelet_transform() -> FourierFunction {
    FourierFunction::closed_form(1, "shannon-wavelet", |x| {
        let a = x[0].abs();
        let inside = if x[0] < 0.0 { a > 0.5 && a <= 1.0 } else { (0.5..1.0).contains(&a) };
        c(if inside { 1.0 } else { 0.0 }, 0.0)
    })
    .with_support(Bbox::new(&[-1.0], &[1.0]))
}

/// Haar wavelet transform `i e^{-iπξ} sin(πξ/2) sinc(πξ/2)`.
pub fn haar_wavelet_transform() -> FourierFunction {
    FourierFunction::closed_form(1, "haar-wavelet", |x| {
        let t = PI * x[0];
        c(0.0, 1.0) * phase(t) * math::sin(0.5 * t) * math::sinc_pi(0.5 * x[0])
    })
    .with_decay(DecayHint { constant: 4.0 / (PI * PI), exponent: 2.0 })
}

/// Journé wavelet set.
pub fn journe_set() -> RegionSet {
    RegionSet::interval_union(&[
        (-16.0 / 7.0, -2.0),
        (-0.5, -2.0 / 7.0),
        (2.0 / 7.0, 0.5),
        (2.0, 16.0 / 7.0),
    ])
}

pub fn wavelet_system(key: &str) -> Result<WaveletSystem, RegistryError> {
    let entry = lookup(key)?;
    if entry.kind != EntryKind::Wavelet {
        return Err(RegistryError::NotWavelet(key.to_string()));
    }
    let all = RegionSet::all(1);
    let (psi, semiorthogonal) = match key {
        "haar-wavelet" => (haar_wavelet_transform(), true),
        "shannon-wavelet" => (shannon_wavelet_transform(), true),
        "journe" => (FourierFunction::indicator(journe_set()).with_label("journe"), true),
        "perturbed-shannon-wavelet" => {
            let base = shannon_wavelet_transform();
            let f = FourierFunction::closed_form(1, "perturbed-shannon-wavelet", move |x| {
                let bump = if x[0].abs() <= 0.05 { 1.0 } else { 0.0 };
                base.eval(x) + c(bump, 0.0)
            })
            .with_support(Bbox::new(&[-1.0], &[1.0]));
            (f, false)
        }
        _ => return Err(RegistryError::UnknownKey(key.to_string())),
    };
    Ok(WaveletSystem::new(key, vec![psi], dyadic(), all, semiorthogonal)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for e in entries() {
            let key = if e.key == "bspline:n" { "bspline:3" } else { e.key };
            match e.kind {
                EntryKind::Scaling => assert!(scaling_system(key).is_ok(), "{key}"),
                EntryKind::Wavelet => assert!(wavelet_system(key).is_ok(), "{key}"),
            }
        }
    }

    #[test]
    fn ground_truth_uses_canonical_regions() {
        assert_eq!(ground_truth("hardy-shannon", "halfspace(1.0, 0)"), Some(GroundTruth::Complete));
        assert_eq!(ground_truth("hardy-shannon", "all"), Some(GroundTruth::Incomplete));
        assert_eq!(ground_truth("bspline:4", "all"), Some(GroundTruth::Complete));
        assert_eq!(ground_truth("haar", "halfspace(1,0)"), None);
        assert!(matches!(lookup("bspline:0"), Err(RegistryError::UnknownKey(_))));
    }

    #[test]
    fn kinds_are_enforced() {
        assert!(matches!(scaling_system("journe"), Err(RegistryError::NotScaling(_))));
        assert!(matches!(wavelet_system("haar"), Err(RegistryError::NotWavelet(_))));
    }
}
