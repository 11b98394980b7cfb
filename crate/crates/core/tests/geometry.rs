use proptest::prelude::*;
use shiftinv_core::geometry::{
    check_invariant_set, is_absorbing, is_approx_continuity_point, is_density_point, is_locally_nonzero, limit_at,
    relative_measure, subsequence_limit, GeometryError, RegionExpr,
};
use shiftinv_core::rng::Sampler;
use shiftinv_core::{Bbox, DensityProbe, DilationMatrix, Point, RegionSet, Verdict};

fn dyadic() -> DilationMatrix {
    DilationMatrix::scalar(2).unwrap()
}

fn light() -> DensityProbe {
    DensityProbe { samples_per_level: 20_000, j_max: Some(30), ..DensityProbe::default() }
}

fn half_line() -> RegionSet {
    RegionSet::half_space(&[1.0], 0.0)
}

#[test]
fn relative_measure_examples() {
    let probe = DensityProbe::default();
    let all = RegionSet::all(1);
    let r = relative_measure(&RegionSet::ball(1, 1.0), &all, &dyadic(), 3, 1.0, &probe).unwrap();
    assert_eq!(r.ratio, 1.0);
    for j in [0, 7, 33] {
        let r = relative_measure(&half_line(), &all, &dyadic(), j, 1.0, &probe).unwrap();
        assert!((r.ratio - 0.5).abs() <= 3.0 * r.std_error, "j = {j}: {r:?}");
    }
}

#[test]
fn empty_denominator_is_reported() {
    let far = RegionSet::boxed(&[5.0], &[6.0]);
    let err = relative_measure(&far, &far, &dyadic(), 2, 1.0, &light()).unwrap_err();
    assert!(matches!(err, GeometryError::EmptyDenominator { .. }));
}

#[test]
fn probe_validation() {
    let bad = DensityProbe { samples_per_level: 999, ..DensityProbe::default() };
    assert!(relative_measure(&half_line(), &RegionSet::all(1), &dyadic(), 0, 1.0, &bad).is_err());
}

/// Direct estimate: sample the box around `A^{-j}B_r` and reject points outside it.
fn direct_ratio(e: &RegionSet, g: &RegionSet, a: &DilationMatrix, j: i64, r: f64, n: usize, seed: u64) -> (f64, f64) {
    let dim = a.dim();
    let half = (0..dim).fold(0.0f64, |m, _| m.max(r)) * a.power(-j).unwrap().norm_inf();
    let cube = Bbox::centered(dim, half.max(1e-300));
    let mut s = Sampler::new(seed);
    let (mut den, mut num) = (0usize, 0usize);
    while den < n {
        let x = s.point_in_box(&cube);
        if a.apply_power(j, &x).unwrap().norm() >= r || !g.contains(&x) {
            continue;
        }
        den += 1;
        if e.contains(&x) {
            num += 1;
        }
    }
    let p = num as f64 / den as f64;
    (p, (p * (1.0 - p) / den as f64).sqrt())
}

#[test]
fn pull_back_matches_direct_sampling() {
    let probe = DensityProbe::default();
    let q = DilationMatrix::quincunx();
    let cases: Vec<(DilationMatrix, RegionSet, RegionSet)> = vec![
        (dyadic(), RegionSet::boxed(&[0.1], &[0.7]), RegionSet::all(1)),
        (dyadic(), RegionSet::boxed(&[-0.3], &[0.2]), half_line()),
        (q.clone(), RegionSet::half_space(&[1.0, 2.0], 0.1), RegionSet::all(2)),
        (q, RegionSet::ball(2, 0.4), RegionSet::half_space(&[0.0, 1.0], 0.0)),
    ];
    for (a, e, g) in &cases {
        for j in 0..=2 {
            for r in [0.5, 1.0] {
                let pulled = relative_measure(e, g, a, j, r, &probe).unwrap();
                let (direct, se) = direct_ratio(e, g, a, j, r, 100_000, 77 + j as u64);
                let combined = (pulled.std_error.powi(2) + se.powi(2)).sqrt();
                assert!(
                    (pulled.ratio - direct).abs() <= 3.0 * combined.max(1e-12),
                    "{} in {} at j = {j}, r = {r}: pull-back {} direct {direct}",
                    e.label(),
                    g.label(),
                    pulled.ratio
                );
            }
        }
    }
}

#[test]
fn density_point_examples() {
    let probe = light();
    let all = RegionSet::all(1);
    let punctured = RegionSet::from_predicate(1, "R minus {0, 1/3}", |x| x[0] != 0.0 && x[0] != 1.0 / 3.0);
    assert_eq!(is_density_point(&punctured, &all, &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
    let r = is_density_point(&half_line(), &all, &dyadic(), &probe).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.min_ratio - 0.5).abs() < 0.02);
    assert_eq!(is_density_point(&half_line(), &half_line(), &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
}

#[test]
fn approx_continuity_examples() {
    let probe = light();
    let sinc2 = |x: &[f64]| {
        let t = std::f64::consts::PI * x[0];
        if t == 0.0 { 1.0 } else { (t.sin() / t).powi(2) }
    };
    let step = |x: &[f64]| if x[0] > 0.0 { 1.0 } else { 0.0 };
    let all = RegionSet::all(1);
    let r = is_approx_continuity_point(sinc2, 1.0, &all, &dyadic(), &probe).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    let r = is_approx_continuity_point(step, 1.0, &all, &dyadic(), &probe).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(!r.levels[0].achieved);
    assert_eq!(is_approx_continuity_point(step, 1.0, &half_line(), &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
}

#[test]
fn passing_continuity_has_small_terminal_fractions() {
    let probe = light();
    let f = |x: &[f64]| 1.0 - x[0].abs().sqrt();
    let r = is_approx_continuity_point(f, 1.0, &RegionSet::all(1), &dyadic(), &probe).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.levels.len(), probe.eps_ladder.len());
    for level in &r.levels {
        assert!(level.achieved);
        assert!(level.terminal_fraction < level.epsilon, "{level:?}");
    }
}

#[test]
fn locally_nonzero_examples() {
    let probe = light();
    let all = RegionSet::all(1);
    let shannon = |x: &[f64]| if (-0.5..0.5).contains(&x[0]) { 1.0 } else { 0.0 };
    let hardy = |x: &[f64]| if x[0] > 0.0 && x[0] <= 0.5 { 1.0 } else { 0.0 };
    assert_eq!(is_locally_nonzero(shannon, &all, &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
    assert_eq!(is_locally_nonzero(hardy, &all, &dyadic(), &probe).unwrap().verdict, Verdict::Fail);
    assert_eq!(is_locally_nonzero(hardy, &half_line(), &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
}

#[test]
fn absorbing_examples() {
    let probe = light();
    let all = RegionSet::all(1);
    let r = is_absorbing(&RegionSet::ball(1, 1.0), &all, &dyadic(), &probe).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    // Cube half width 8: every sample has entered B_1 by level 4.
    assert!(r.histogram.iter().skip(5).all(|&c| c == 0), "{:?}", r.histogram);
    assert_eq!(r.histogram.iter().sum::<u64>() as usize, r.samples);
    assert_eq!(is_absorbing(&half_line(), &all, &dyadic(), &probe).unwrap().verdict, Verdict::Fail);
    let haar_support = RegionSet::from_predicate(1, "R minus Z*", |x| x[0] == 0.0 || x[0].fract() != 0.0);
    assert_eq!(is_absorbing(&haar_support, &all, &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
}

#[test]
fn invariant_set_examples() {
    let probe = light();
    assert_eq!(check_invariant_set(&half_line(), &dyadic(), &probe).unwrap().verdict, Verdict::Pass);
    assert_eq!(check_invariant_set(&RegionSet::ball(1, 1.0), &dyadic(), &probe).unwrap().verdict, Verdict::Fail);
    assert_eq!(check_invariant_set(&RegionSet::all(2), &DilationMatrix::quincunx(), &probe).unwrap().verdict, Verdict::Pass);
}

#[test]
fn limit_examples() {
    let probe = DensityProbe::default();
    let sinc2 = |x: &[f64]| {
        let t = std::f64::consts::PI * x[0];
        if t == 0.0 { 1.0 } else { (t.sin() / t).powi(2) }
    };
    let shannon = |x: &[f64]| if (-0.5..0.5).contains(&x[0]) { 1.0 } else { 0.0 };
    let hardy = |x: &[f64]| if x[0] > 0.0 && x[0] <= 0.5 { 1.0 } else { 0.0 };
    let a = dyadic();
    assert!((limit_at(sinc2, &Point::new(&[3.7]), &a, &probe).unwrap().tail - 1.0).abs() < 1e-6);
    assert_eq!(limit_at(shannon, &Point::new(&[100.0]), &a, &probe).unwrap().tail, 1.0);
    assert_eq!(limit_at(hardy, &Point::new(&[-2.0]), &a, &probe).unwrap().tail, 0.0);
}

#[test]
fn monotone_sequences_are_flagged_converged() {
    let probe = light();
    let f = |x: &[f64]| 1.0 / (1.0 + x[0].abs());
    let limits = subsequence_limit(f, &RegionSet::all(1), &dyadic(), &probe).unwrap();
    assert!(!limits.samples.is_empty());
    assert!(limits.samples.iter().all(|s| s.monotone && s.converged));
    assert_eq!(limits.converged_fraction(), 1.0);
}

#[test]
fn identical_seeds_give_identical_traces() {
    let probe = light();
    let f = |x: &[f64]| if x[0] > 0.0 { 1.0 } else { 0.0 };
    let a = is_approx_continuity_point(f, 1.0, &RegionSet::all(1), &dyadic(), &probe).unwrap();
    let b = is_approx_continuity_point(f, 1.0, &RegionSet::all(1), &dyadic(), &probe).unwrap();
    assert_eq!(a, b);
    let c = is_approx_continuity_point(f, 1.0, &RegionSet::all(1), &dyadic(), &probe.with_seed(43)).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn balls_are_open() {
    let b = RegionSet::ball(2, 1.0);
    assert!(!b.contains(&[1.0, 0.0]));
    assert!(b.contains(&[0.6, 0.79]));
}

fn num() -> impl Strategy<Value = String> {
    prop_oneof![(-20i32..20).prop_map(|n| n.to_string()), (-40i32..40, 1u32..9).prop_map(|(p, q)| format!("{p}/{q}")), (-5.0f64..5.0).prop_map(|x| format!("{x}"))]
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("all".to_string()),
        (0.1f64..4.0).prop_map(|r| format!("ball({r})")),
        (num(), num()).prop_map(|(a, b)| format!("interval({a},{b})")),
        (num(), num()).prop_map(|(a, b)| format!("box({a},{b})")),
        (num(), num()).prop_map(|(n, c)| format!("halfspace({n},{c})")),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| format!("complement({e})")),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(|v| format!("union({})", v.join(", "))),
            proptest::collection::vec(inner, 2..4).prop_map(|v| format!("intersect({})", v.join(","))),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn region_expressions_round_trip(text in expr(), xs in proptest::collection::vec(-6.0f64..6.0, 32)) {
        let parsed = RegionExpr::parse(&text).unwrap();
        let printed = parsed.to_string();
        let reparsed = RegionExpr::parse(&printed).unwrap();
        prop_assert_eq!(&reparsed, &parsed);
        prop_assert_eq!(reparsed.to_string(), printed.clone());
        prop_assert_eq!(RegionExpr::canonical(&printed).unwrap(), printed);
        let Ok(a) = parsed.build(1, None) else { return Ok(()) };
        let b = reparsed.build(1, None).unwrap();
        for x in xs {
            prop_assert_eq!(a.contains(&[x]), b.contains(&[x]));
        }
    }

    #[test]
    fn ball_membership_is_strict_norm_comparison(r in 0.1f64..5.0, x in -6.0f64..6.0, y in -6.0f64..6.0) {
        let b = RegionSet::ball(2, r);
        prop_assert_eq!(b.contains(&[x, y]), (x * x + y * y).sqrt() < r);
    }
}
