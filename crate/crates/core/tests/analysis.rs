use bilip_core::analysis::{
    classify_single_variable, full_verdict, separation_analysis, AnalysisConfig, Conclusion, PointVerdict,
};
use bilip_core::probe::{distance_probe, ProbeConfig};
use bilip_core::{parse, GaussianRational, MultiPoly};
use num_complex::Complex64;
use num_rational::Rational64;
use proptest::prelude::*;

fn xy(s: &str) -> MultiPoly {
    parse(s, &["x", "y"]).unwrap()
}

const CORPUS: &[&str] = &[
    "x*y",
    "x + y^2",
    "x + y^3",
    "x^2*y + x",
    "x^2 + y^3 + x*y",
    "y^2 + x*(y - x^2)",
    "x^2 - y^4 + y",
    "x*y^2 + x + y^3",
    "(x+2*y)^3 + (x+2*y)",
    "(x - i*y)^2 + 3*(x - i*y)",
    "x + 1",
    "(2*x + y - 1)^4",
];

#[test]
fn single_variable_xor_distance_zero() {
    let config = AnalysisConfig::default();
    for expr in CORPUS {
        let f = xy(expr);
        let v = full_verdict(&f, &config).unwrap();
        let single = v.classification.single_variable;
        let decided =
            v.per_point.iter().any(|p| matches!(p.verdict, PointVerdict::DistanceZero | PointVerdict::ConeCriterion));
        assert!(single ^ decided, "{expr}");
        let expected =
            if single { Conclusion::BilipschitzTrivialValuesExist } else { Conclusion::GenericFiberDistanceZero };
        assert_eq!(v.conclusion, expected, "{expr}");
    }
}

#[test]
fn ordering_and_negative_exponent() {
    let config = AnalysisConfig::default();
    let zero = Rational64::from_integer(0);
    for expr in CORPUS {
        for r in separation_analysis(&xy(expr), &config).unwrap_or_default() {
            if r.branch_data.is_empty() {
                continue;
            }
            let beta = r.beta.unwrap();
            assert_eq!(r.ordering_holds, Some(r.m < beta && beta <= r.degree), "{expr}");
            assert_eq!(beta, r.point.mult_a, "{expr}: β equals the multiplicity on the trace");
            if r.ordering_holds == Some(true) && r.m < r.degree {
                assert!(r.exponent_e.unwrap() < zero, "{expr}");
                assert!(r.branch_data.iter().all(|b| b.exponent_e.unwrap() < zero), "{expr}");
            }
        }
    }
}

#[test]
fn equal_ratios_for_symmetric_branches() {
    let reps = separation_analysis(&xy("x^3 - y^6 + y"), &AnalysisConfig::default()).unwrap();
    let r = &reps[0];
    assert_eq!(r.branch_data.len(), 3);
    assert_eq!(r.ratios_equal, Some(true));
    assert_eq!(r.kappa_matches, Some(true));
    assert_eq!(r.exponent_e, Some(Rational64::new(-5, 2)));
}

#[test]
fn unequal_ratios_at_one_point() {
    // two smooth branches v ~ u^2 and v ~ u^3 through the same point
    let reps = separation_analysis(&xy("x^3 - x^2*y^2 - x*y^3 + y^5"), &AnalysisConfig::default()).unwrap();
    let r = reps.iter().find(|r| !r.branch_data.is_empty()).unwrap();
    let ratios: Vec<(u32, u32)> = r.branch_data.iter().map(|b| (b.ramification, b.beta)).collect();
    assert_eq!(ratios, vec![(1, 2), (1, 3)]);
    assert_eq!(r.ratios_equal, Some(false));
    // separation still has a negative exponent on each branch
    assert_eq!(r.verdict, PointVerdict::DistanceZero);
    let kappas: Vec<_> = r.branch_data.iter().map(|b| b.kappa).collect();
    assert_eq!(kappas, vec![Some(Rational64::from_integer(6)), Some(Rational64::from_integer(10))]);
}

#[test]
fn kappa_for_non_coprime_leading_pair() {
    // Q = 2 with integral leading exponent 2: κ is 11/2, the formula gives 6
    let reps = separation_analysis(&xy("x^3 - 2*x^2*y^2 + x*y^4 - y^5"), &AnalysisConfig::default()).unwrap();
    let r = reps.iter().find(|r| !r.branch_data.is_empty()).unwrap();
    assert_eq!((r.m, r.beta), (2, Some(4)));
    assert_eq!(r.kappa, Some(Rational64::from_integer(6)));
    assert_eq!(r.branch_data[0].kappa, Some(Rational64::new(11, 2)));
    assert_eq!(r.kappa_matches, Some(false));
    assert_eq!(r.verdict, PointVerdict::DistanceZero);
}

/// The probe samples the first coordinate; at [0:1] the chart's leading
/// coordinate is y, so the probe runs on f(y, x).
#[test]
fn probe_matches_symbolic_exponent() {
    let config = AnalysisConfig::default();
    for expr in ["x + y^2", "x + y^3", "x + y^4", "x^2 + y^3", "x^2 + y^5", "x^3 + y^4", "(x+y)^2 + x", "x^2 + y"] {
        let f = xy(expr);
        let reps = separation_analysis(&f, &config).unwrap();
        assert_eq!(reps.len(), 1, "{expr}");
        let r = &reps[0];
        let e = r.branch_data.iter().filter_map(|b| b.exponent_e).min().unwrap();
        let probed = if r.point.coords[0].is_zero() { parse(expr, &["y", "x"]).unwrap() } else { f };
        let report =
            distance_probe(&probed, Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), &ProbeConfig::default())
                .unwrap();
        let fit = report.fitted_exponent.unwrap().exponent;
        let e = *e.numer() as f64 / *e.denom() as f64;
        assert!((fit - e).abs() <= 0.1, "{expr}: probe {fit} vs {e}");
        assert!(report.ratio_to_value_gap < 0.01, "{expr}");
    }
}

#[test]
fn single_variable_distance_is_achieved() {
    let f = xy("(x - i*y)^2 + 3*(x - i*y)");
    let r = distance_probe(&f, Complex64::new(1.0, 0.0), Complex64::new(2.5, 0.5), &ProbeConfig::default()).unwrap();
    assert!(r.relative_variation() < 0.1, "{:?}", r.min_distance_per_radius);
}

#[test]
fn three_variables_single_variable() {
    let f = parse("(x1 + 2*x2 - x3)^3 - (x1 + 2*x2 - x3)", &["x1", "x2", "x3"]).unwrap();
    let v = full_verdict(&f, &AnalysisConfig::default()).unwrap();
    assert_eq!(v.conclusion, Conclusion::BilipschitzTrivialValuesExist);
    assert!(v.restriction.is_none());
}

fn gi(a: i64, b: i64) -> GaussianRational {
    GaussianRational::from_integers(a, b)
}

fn invertible_2x2() -> impl Strategy<Value = [[GaussianRational; 2]; 2]> {
    prop::array::uniform4((-3i64..=3, -1i64..=1))
        .prop_map(|a| [[gi(a[0].0, a[0].1), gi(a[1].0, a[1].1)], [gi(a[2].0, a[2].1), gi(a[3].0, a[3].1)]])
        .prop_filter("invertible", |m| !(&(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])).is_zero())
}

fn pick(exprs: &'static [&'static str]) -> impl Strategy<Value = &'static str> {
    prop::sample::select(exprs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_is_coordinate_free(expr in pick(CORPUS), m in invertible_2x2()) {
        let f = xy(expr);
        let images = [MultiPoly::linear(&m[0]), MultiPoly::linear(&m[1])];
        let g = f.substitute(&images).unwrap();
        let a = classify_single_variable(&f).unwrap();
        let b = classify_single_variable(&g).unwrap();
        prop_assert_eq!(a.single_variable, b.single_variable);
        if b.single_variable {
            let dir = b.direction.unwrap();
            let p = MultiPoly::from_univariate(b.univariate.as_ref().unwrap(), 1, 0);
            prop_assert_eq!(p.substitute(&[MultiPoly::linear(&dir)]).unwrap(), g);
        }
    }
}
