use std::f64::consts::PI;

use num_complex::Complex64;
use shiftinv_core::criteria::{
    c2_support_union, c3_cesaro, c4_absorbing, c5_from_limits, c6_from_limits, c7_locally_nonzero, c8_approx_continuity,
    consensus, projection_norm_sq, run_suite, spectral_limits, Consensus, CriteriaError, CriterionReport, SuiteOptions,
};
use shiftinv_core::genspace::{spectral_function, FourierFunction, GeneratorSystem, SampleCheck};
use shiftinv_core::quadrature::{integrate, QuadConfig};
use shiftinv_core::registry;
use shiftinv_core::{DensityProbe, DilationMatrix, RegionSet, SpectralFunction, Verdict};

fn light() -> DensityProbe {
    DensityProbe { samples_per_level: 20_000, j_max: Some(30), ..DensityProbe::default() }
}

fn sigma_of(key: &str) -> SpectralFunction {
    spectral_function(&registry::scaling_system(key).unwrap(), &SampleCheck::default()).unwrap()
}

fn sigma_from(label: &str, f: FourierFunction) -> SpectralFunction {
    let system = GeneratorSystem::new(label, vec![f], DilationMatrix::scalar(2).unwrap(), true).unwrap();
    spectral_function(&system, &SampleCheck::default()).unwrap()
}

fn half_line() -> RegionSet {
    RegionSet::half_space(&[1.0], 0.0)
}

#[test]
fn support_union_examples() {
    let p = light();
    let all = RegionSet::all(1);
    assert_eq!(c2_support_union(&sigma_of("shannon"), &all, &p).unwrap().verdict, Verdict::Pass);
    assert_eq!(c2_support_union(&sigma_of("hardy-shannon"), &all, &p).unwrap().verdict, Verdict::Fail);
    assert_eq!(c2_support_union(&sigma_of("hardy-shannon"), &half_line(), &p).unwrap().verdict, Verdict::Pass);
}

fn mean_at(report: &CriterionReport, j: f64) -> f64 {
    report.trace.iter().find(|r| r.series.starts_with("mean") && r.x == j).expect("trace row").value
}

#[test]
fn cesaro_examples() {
    let p = DensityProbe { j_max: Some(30), ..DensityProbe::default() };
    let e = RegionSet::boxed(&[-0.5], &[0.5]);
    let haar = c3_cesaro(&sigma_of("haar"), &[e], &p).unwrap();
    assert_eq!(haar.verdict, Verdict::Pass);
    let oracle = integrate(|x| if x == 0.0 { 1.0 } else { ((PI * x).sin() / (PI * x)).powi(2) }, -0.5, 0.5, &QuadConfig::default())
        .unwrap()
        .value;
    assert!((mean_at(&haar, 0.0) - oracle).abs() < 5e-3, "{} vs {oracle}", mean_at(&haar, 0.0));
    let means: Vec<f64> = (0..=30).map(|j| mean_at(&haar, j as f64)).collect();
    assert!(means[30] > means[0]);

    let shannon = c3_cesaro(&sigma_of("shannon"), &[RegionSet::boxed(&[-0.25], &[0.25])], &p).unwrap();
    assert!(shannon.trace.iter().filter(|r| r.series.starts_with("mean")).all(|r| r.value == 1.0));

    let hardy = c3_cesaro(&sigma_of("hardy-shannon"), &[RegionSet::boxed(&[-1.0], &[1.0])], &p).unwrap();
    assert_eq!(hardy.verdict, Verdict::Fail);
    assert!((hardy.score - 0.5).abs() < 0.02);
}

#[test]
fn absorbing_examples() {
    let p = light();
    let all = RegionSet::all(1);
    assert_eq!(c4_absorbing(&sigma_of("haar"), &all, &p).unwrap().verdict, Verdict::Pass);
    assert_eq!(c4_absorbing(&sigma_of("hardy-shannon"), &half_line(), &p).unwrap().verdict, Verdict::Pass);
    assert_eq!(c4_absorbing(&sigma_of("hardy-shannon"), &all, &p).unwrap().verdict, Verdict::Fail);
}

struct Case {
    name: &'static str,
    sigma: SpectralFunction,
    g: RegionSet,
}

fn cases() -> Vec<Case> {
    let all = RegionSet::all(1);
    vec![
        Case { name: "haar", sigma: sigma_of("haar"), g: all.clone() },
        Case { name: "shannon", sigma: sigma_of("shannon"), g: all.clone() },
        Case { name: "bspline:3", sigma: sigma_of("bspline:3"), g: all.clone() },
        Case { name: "hardy/(0,inf)", sigma: sigma_of("hardy-shannon"), g: half_line() },
        Case { name: "hardy/R", sigma: sigma_of("hardy-shannon"), g: all.clone() },
        Case { name: "quincunx", sigma: sigma_of("quincunx-shannon"), g: RegionSet::all(2) },
        Case {
            name: "zero-padded shannon",
            sigma: sigma_from("chi[-1/4,1/4]", FourierFunction::indicator_box(&[-0.25], &[0.25])),
            g: all.clone(),
        },
        Case {
            name: "sigma = 1/2",
            sigma: sigma_from("half", FourierFunction::closed_form(1, "sqrt(1/2)", |_| Complex64::new(0.5f64.sqrt(), 0.0))),
            g: all,
        },
    ]
}

#[test]
fn c5_and_c6_can_differ_only_in_the_right_direction() {
    let p = light();
    for c in cases() {
        let limits = spectral_limits(&c.sigma, &c.g, &p).unwrap();
        let c5 = c5_from_limits(&limits, &p);
        let c6 = c6_from_limits(&limits, &p, 1e-3, 1e-9);
        let c4 = c4_absorbing(&c.sigma, &c.g, &p).unwrap();
        let c7 = c7_locally_nonzero(&c.sigma, &c.g, &p).unwrap();
        if c6.verdict == Verdict::Pass {
            assert_ne!(c5.verdict, Verdict::Fail, "{}", c.name);
        }
        if c5.verdict == Verdict::Pass {
            assert_ne!(c4.verdict, Verdict::Fail, "{}", c.name);
            assert_ne!(c7.verdict, Verdict::Fail, "{}", c.name);
        }
        if c4.verdict.is_decisive() && c7.verdict.is_decisive() {
            assert_eq!(c4.verdict, c7.verdict, "{}", c.name);
        }
        match c.name {
            "sigma = 1/2" => {
                assert_eq!(c5.verdict, Verdict::Pass);
                assert_eq!(c6.verdict, Verdict::Fail);
            }
            "hardy/R" => {
                assert_eq!(c5.verdict, Verdict::Fail);
                assert_eq!(c6.verdict, Verdict::Fail);
            }
            name => {
                assert_eq!(c5.verdict, Verdict::Pass, "{name}");
                assert_eq!(c6.verdict, Verdict::Pass, "{name}");
            }
        }
    }
}

#[test]
fn local_criteria_examples() {
    let p = light();
    let all = RegionSet::all(1);
    for (key, g, want) in [
        ("haar", all.clone(), Verdict::Pass),
        ("shannon", all.clone(), Verdict::Pass),
        ("hardy-shannon", all.clone(), Verdict::Fail),
        ("hardy-shannon", half_line(), Verdict::Pass),
    ] {
        let sigma = sigma_of(key);
        assert_eq!(c7_locally_nonzero(&sigma, &g, &p).unwrap().verdict, want, "C7 {key}");
        assert_eq!(c8_approx_continuity(&sigma, &g, &p).unwrap().verdict, want, "C8 {key}");
    }
}

#[test]
fn projection_norm_of_a_null_set_is_zero() {
    let e = RegionSet::boxed(&[0.3], &[0.3]);
    assert_eq!(projection_norm_sq(&sigma_of("haar"), &e, 4, &QuadConfig::default()).unwrap().value, 0.0);
    assert!(matches!(
        projection_norm_sq(&sigma_of("haar"), &RegionSet::all(1), 0, &QuadConfig::default()),
        Err(CriteriaError::UnboundedRegion { .. })
    ));
}

#[test]
fn projection_norm_converges_for_complete_examples() {
    let quad = QuadConfig::default();
    for key in ["bspline:2", "bspline:4", "hardy-shannon"] {
        let sigma = sigma_of(key);
        let e = if key == "hardy-shannon" { RegionSet::boxed(&[0.0], &[0.5]) } else { RegionSet::boxed(&[-0.5], &[0.5]) };
        let measure = 0.5 + if key == "hardy-shannon" { 0.0 } else { 0.5 };
        let mut prev = f64::NEG_INFINITY;
        for j in 0..=30 {
            let r = projection_norm_sq(&sigma, &e, j, &quad).unwrap();
            assert!(r.value >= prev - 1e-9, "{key} decreases at j = {j}");
            prev = r.value;
        }
        assert!((prev - measure).abs() <= 1e-3 * measure, "{key}: {prev}");
    }
}

#[test]
fn suite_rejects_violated_hypotheses() {
    let p = light();
    let options = SuiteOptions::default();
    let not_refinable =
        GeneratorSystem::new("chi[1,2]", vec![FourierFunction::indicator_box(&[1.0], &[2.0])], DilationMatrix::scalar(2).unwrap(), true)
            .unwrap();
    let err = run_suite(&not_refinable, &RegionSet::all(1), &p, &options, None).unwrap_err();
    assert!(matches!(err, CriteriaError::HypothesisViolated { .. }), "{err}");

    let hardy = registry::scaling_system("hardy-shannon").unwrap();
    let negative = RegionSet::half_space(&[-1.0], 0.0);
    assert!(matches!(run_suite(&hardy, &negative, &p, &options, None), Err(CriteriaError::HypothesisViolated { .. })));

    let not_invariant = RegionSet::ball(1, 1.0);
    assert!(matches!(run_suite(&hardy, &not_invariant, &p, &options, None), Err(CriteriaError::HypothesisViolated { .. })));
}

#[test]
fn suite_consensus_on_light_probe() {
    let p = light();
    let options = SuiteOptions::default();
    let quincunx = registry::scaling_system("quincunx-shannon").unwrap();
    let r = run_suite(&quincunx, &RegionSet::all(2), &p, &options, Some(registry::GroundTruth::Complete)).unwrap();
    assert_eq!(r.consensus, Consensus::Pass);
    assert_eq!(r.matches, Some(true));
    assert_eq!(consensus(&r.reports), r.consensus);
    assert_eq!(r.reports.len(), 8);
}

#[test]
fn suite_is_deterministic() {
    let p = light();
    let haar = registry::scaling_system("haar").unwrap();
    let a = run_suite(&haar, &RegionSet::all(1), &p, &SuiteOptions::default(), None).unwrap();
    let b = run_suite(&haar, &RegionSet::all(1), &p, &SuiteOptions::default(), None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn consensus_rules() {
    let report = |v| CriterionReport {
        id: shiftinv_core::criteria::CriterionId::C2SupportUnion,
        verdict: v,
        score: 0.0,
        tolerance: 0.0,
        note: None,
        trace: vec![],
    };
    use Verdict::*;
    assert_eq!(consensus(&[report(Pass), report(Inconclusive)]), Consensus::Pass);
    assert_eq!(consensus(&[report(Fail), report(Fail)]), Consensus::Fail);
    assert_eq!(consensus(&[report(Pass), report(Fail)]), Consensus::Split);
    assert_eq!(consensus(&[report(Inconclusive)]), Consensus::Split);
}
