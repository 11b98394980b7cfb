use num_complex::Complex64;
use shiftinv_core::genspace::{spectral_function, FourierFunction, GeneratorSystem, SampleCheck};
use shiftinv_core::registry;
use shiftinv_core::rng::Sampler;
use shiftinv_core::wavelets::{
    calderon_check, calderon_sum, decomposition_check, semiorthogonality_check, sigma_from_core, wavelet_origin_test,
    CalderonConfig, SemiorthogonalityConfig, WaveletError, WaveletSystem,
};
use shiftinv_core::{DensityProbe, DilationMatrix, RegionSet, Verdict};

fn dyadic() -> DilationMatrix {
    DilationMatrix::scalar(2).unwrap()
}

fn light() -> DensityProbe {
    DensityProbe { samples_per_level: 20_000, j_max: Some(30), ..DensityProbe::default() }
}

#[test]
fn calderon_examples() {
    let cfg = CalderonConfig::default();
    let shannon = registry::wavelet_system("shannon-wavelet").unwrap();
    assert_eq!(calderon_sum(&shannon, &[0.3], &cfg).unwrap().value, 1.0);
    let journe = registry::wavelet_system("journe").unwrap();
    assert_eq!(calderon_sum(&journe, &[0.4], &cfg).unwrap().value, 1.0);
    let perturbed = registry::wavelet_system("perturbed-shannon-wavelet").unwrap();
    assert!(calderon_sum(&perturbed, &[0.03], &cfg).unwrap().value >= 2.0 - 1e-9);
}

#[test]
fn journe_calderon_matches_interval_oracle() {
    let journe = registry::wavelet_system("journe").unwrap();
    let cfg = CalderonConfig { j_range: Some(30), ..CalderonConfig::default() };
    let k = [(-16.0 / 7.0, -2.0), (-0.5, -2.0 / 7.0), (2.0 / 7.0, 0.5), (2.0, 16.0 / 7.0)];
    let mut s = Sampler::new(3);
    for _ in 0..500 {
        let x = s.uniform_in(-5.0, 5.0);
        let hits = (-30..=30)
            .filter(|&j| {
                let y = x * 2f64.powi(j);
                k.iter().any(|&(a, b)| a <= y && y <= b)
            })
            .count();
        let sum = calderon_sum(&journe, &[x], &cfg).unwrap();
        if !sum.boundary {
            assert_eq!(sum.value, hits as f64, "at {x}");
        }
    }
}

#[test]
fn calderon_check_verdicts() {
    let p = light();
    let cfg = CalderonConfig::default();
    for key in ["shannon-wavelet", "journe", "haar-wavelet"] {
        let w = registry::wavelet_system(key).unwrap();
        assert_eq!(calderon_check(&w, &cfg, &p).unwrap().verdict, Verdict::Pass, "{key}");
    }
    let w = registry::wavelet_system("perturbed-shannon-wavelet").unwrap();
    assert_eq!(calderon_check(&w, &cfg, &p).unwrap().verdict, Verdict::Fail);
}

#[test]
fn semiorthogonality_examples() {
    let cfg = SemiorthogonalityConfig::default();
    for key in ["shannon-wavelet", "journe", "haar-wavelet"] {
        let w = registry::wavelet_system(key).unwrap();
        let r = semiorthogonality_check(&w, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{key}: {r:?}");
    }
    let shifted = FourierFunction::indicator_box(&[0.5], &[1.5]);
    let w = WaveletSystem::new("chi[1/2,3/2)", vec![shifted], dyadic(), RegionSet::all(1), true).unwrap();
    assert_eq!(semiorthogonality_check(&w, &cfg).unwrap().verdict, Verdict::Fail);
}

#[test]
fn semiorthogonality_needs_tail_control() {
    let f = FourierFunction::closed_form(1, "no hint", |x| Complex64::new((-x[0] * x[0]).exp() * x[0], 0.0));
    let w = WaveletSystem::new("gauss", vec![f], dyadic(), RegionSet::all(1), true).unwrap();
    assert!(matches!(semiorthogonality_check(&w, &SemiorthogonalityConfig::default()), Err(WaveletError::TailUnbounded { .. })));
}

#[test]
fn sigma_from_core_examples() {
    let check = SampleCheck::default();
    let haar = spectral_function(&registry::scaling_system("haar").unwrap(), &check).unwrap();
    let sigma_w = sigma_from_core(&haar, &check).unwrap();
    assert_eq!(sigma_w.eval(&[0.0]), 0.0);
    let one = GeneratorSystem::new("one", vec![FourierFunction::closed_form(1, "1", |_| Complex64::new(1.0, 0.0))], dyadic(), true)
        .unwrap();
    let flat = sigma_from_core(&spectral_function(&one, &check).unwrap(), &check).unwrap();
    let mut s = Sampler::new(8);
    for _ in 0..200 {
        assert_eq!(flat.eval(&[s.uniform_in(-9.0, 9.0)]), 0.0);
    }
}

#[test]
fn sigma_from_core_is_nonnegative() {
    let check = SampleCheck::default();
    for key in ["haar", "shannon", "bspline:2", "bspline:5", "hardy-shannon", "quincunx-shannon"] {
        let sigma = spectral_function(&registry::scaling_system(key).unwrap(), &check).unwrap();
        let w = sigma_from_core(&sigma, &check).unwrap();
        for p in check.points(sigma.dim(), &[], "nonnegative") {
            assert!(w.eval(&p) >= -check.tol, "{key} at {p:?}");
        }
    }
}

#[test]
fn non_refinable_cores_are_rejected() {
    let check = SampleCheck::default();
    let bad = GeneratorSystem::new("chi[1,2]", vec![FourierFunction::indicator_box(&[1.0], &[2.0])], dyadic(), true).unwrap();
    let sigma = spectral_function(&bad, &check).unwrap();
    assert!(matches!(sigma_from_core(&sigma, &check), Err(WaveletError::NegativeSpectral { .. })));
}

#[test]
fn decomposition_matches_registered_pairs() {
    let check = SampleCheck { samples: 1000, ..SampleCheck::default() };
    for (core, wavelet) in [("shannon", "shannon-wavelet"), ("haar", "haar-wavelet")] {
        let sigma = spectral_function(&registry::scaling_system(core).unwrap(), &check).unwrap();
        let w = registry::wavelet_system(wavelet).unwrap();
        let r = decomposition_check(&sigma, &w, &check, 1e-9, 1e-6).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{wavelet}: {r:?}");
        assert!(r.interior >= 990);
    }
}

#[test]
fn origin_test_follows_from_the_other_checks() {
    let p = light();
    for e in registry::entries().iter().filter(|e| e.kind == registry::EntryKind::Wavelet) {
        let w = registry::wavelet_system(e.key).unwrap();
        let semi = semiorthogonality_check(&w, &SemiorthogonalityConfig::default()).unwrap();
        let cal = calderon_check(&w, &CalderonConfig::default(), &p).unwrap();
        if semi.verdict == Verdict::Pass && cal.verdict == Verdict::Pass {
            let origin = wavelet_origin_test(&w, &p).unwrap();
            assert_eq!(origin.verdict, Verdict::Pass, "{}", e.key);
        }
    }
}

#[test]
fn origin_test_requires_a_semiorthogonality_claim() {
    let w = registry::wavelet_system("perturbed-shannon-wavelet").unwrap();
    assert!(matches!(wavelet_origin_test(&w, &light()), Err(WaveletError::NotSemiorthogonal { .. })));
}

#[test]
fn wavelets_must_live_in_g() {
    let psi = FourierFunction::indicator_box(&[-1.0], &[-0.5]);
    let g = RegionSet::half_space(&[1.0], 0.0);
    assert!(matches!(WaveletSystem::new("neg", vec![psi], dyadic(), g, true), Err(WaveletError::SupportEscapesRegion { .. })));
}
