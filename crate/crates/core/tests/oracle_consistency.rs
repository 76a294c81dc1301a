//! Cross-oracle agreement: the spectral value, the word-count slope, the
//! closed-form period average, and the Caratheodory bisection must all
//! tell the same story on systems where each is exact.

mod common;

use common::{golden_mean, phi_ln, random_branching_schedule};
use entroscope::cover::{estimate_cover_entropy, EstimateParams};
use entroscope::dim::{dim_entropy, moran_oracle, schedule_entropy_exact};
use entroscope::cover::CoverSpec;
use entroscope::rng::SplitMix64;
use entroscope::symbolic::count::count_words;
use entroscope::symbolic::shift::spectral_entropy;
use entroscope::symbolic::{DigitSetSchedule, MetricParams, SubshiftSpec};
use entroscope::estimate::fit_slope;

/// Finite-window slope of the language growth agrees with the exact
/// Perron value at n = 24 for alphabets up to 4.
#[test]
fn count_slope_matches_spectral_at_n24() {
    let shifts = vec![
        SubshiftSpec::full_shift(2),
        SubshiftSpec::full_shift(3),
        SubshiftSpec::full_shift(4),
        golden_mean(),
        SubshiftSpec::from_matrix(vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![true, false, true],
        ])
        .unwrap(),
    ];
    for shift in &shifts {
        let exact = spectral_entropy(shift).value;
        let pts: Vec<(usize, f64)> = (12..=24)
            .map(|n| (n, count_words(shift, None, n).unwrap().ln()))
            .collect();
        let slope = fit_slope(&pts).slope;
        assert!(
            (slope - exact).abs() < 1e-3,
            "alphabet {}: slope {slope} vs spectral {exact}",
            shift.alphabet_size()
        );
    }
}

/// Caratheodory bisection agrees with the closed-form period average on
/// randomized eventually periodic schedules in full shifts.
#[test]
fn dim_entropy_matches_moran_on_random_schedules() {
    let cover = CoverSpec::word_partition(1);
    let mut rng = SplitMix64::new(2024);
    let tol = 1e-3;
    for case in 0..10 {
        let m = if case % 2 == 0 { 2 } else { 3 };
        let shift = SubshiftSpec::full_shift(m);
        let sched = random_branching_schedule(&mut rng, m);
        let expect = moran_oracle(&sched);
        let ce = dim_entropy(&shift, &sched, &cover, tol, 64).unwrap();
        assert!(
            ce.contains(expect, tol),
            "case {case}: moran {expect} outside {ce:?}"
        );
        // The transfer-product oracle agrees too.
        let exact = schedule_entropy_exact(&shift, &sched).unwrap();
        assert!((exact - expect).abs() < 1e-9);
    }
}

/// Covering-entropy estimates agree with the closed form on the same
/// randomized schedules.
#[test]
fn cover_estimates_match_moran_on_random_schedules() {
    let mut rng = SplitMix64::new(77);
    let params = EstimateParams::with_n_max(20);
    for case in 0..10 {
        let m = if case % 2 == 0 { 2 } else { 3 };
        let shift = SubshiftSpec::full_shift(m);
        let sched = random_branching_schedule(&mut rng, m);
        let expect = moran_oracle(&sched);
        let est = estimate_cover_entropy(&shift, &sched, &params).unwrap();
        assert!(
            (est.value - expect).abs() < 0.02 + est.residual,
            "case {case}: estimate {} vs moran {expect}",
            est.value
        );
    }
}

/// Entropy values do not depend on the metric base (estimates at base 2
/// and base 3 agree): the compatible-metric freedom, checked empirically.
#[test]
fn metric_base_invariance() {
    let shift = golden_mean();
    let free = DigitSetSchedule::free(2);
    let base2 = EstimateParams {
        n_max: 20,
        eps_list: vec![0.5, 0.25],
        metric: MetricParams::default(),
    };
    let base3 = EstimateParams {
        n_max: 20,
        eps_list: vec![0.5, 0.25],
        metric: MetricParams::new(3.0),
    };
    let a = estimate_cover_entropy(&shift, &free, &base2).unwrap();
    let b = estimate_cover_entropy(&shift, &free, &base3).unwrap();
    assert!((a.value - b.value).abs() < 0.01, "{} vs {}", a.value, b.value);
    assert!((a.value - phi_ln()).abs() < 0.02);
}

/// Dimensional entropy never exceeds covering entropy (nonempty sets).
#[test]
fn dim_entropy_below_cover_entropy() {
    let cover = CoverSpec::word_partition(1);
    let mut rng = SplitMix64::new(99);
    for case in 0..6 {
        let m = if case % 2 == 0 { 2 } else { 3 };
        let shift = SubshiftSpec::full_shift(m);
        let sched = random_branching_schedule(&mut rng, m);
        let ce = dim_entropy(&shift, &sched, &cover, 1e-3, 64).unwrap();
        let est = estimate_cover_entropy(&shift, &sched, &EstimateParams::with_n_max(20)).unwrap();
        assert!(
            ce.lower <= est.value + 0.02 + est.residual,
            "case {case}: dim {ce:?} vs cover {}",
            est.value
        );
    }
}
