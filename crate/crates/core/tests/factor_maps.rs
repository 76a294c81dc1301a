//! Factor-map inequalities: images never gain entropy, and the loss is
//! bounded by the relative entropy of the map.

mod common;

use common::{golden_mean, random_branching_schedule};
use entroscope::cover::{
    estimate_cover_entropy, image_entropy_estimate, relative_entropy_over_factor,
    EstimateParams,
};
use entroscope::rng::SplitMix64;
use entroscope::symbolic::{BlockCode, DigitSetSchedule, SubshiftSpec, SymbolSet};

const SLACK: f64 = 0.04;

fn pairing_code() -> BlockCode {
    BlockCode::pointwise(
        SubshiftSpec::full_shift(4),
        SubshiftSpec::full_shift(2),
        |s| s % 2,
    )
    .unwrap()
}

fn xor_code() -> BlockCode {
    let full = SubshiftSpec::full_shift(2);
    BlockCode::new(full.clone(), full, 1, |w| w[0] ^ w[2]).unwrap()
}

/// `h(S, pi(K)) <= h(T, K)` for every code and schedule.
#[test]
fn factor_inequality() {
    let mut rng = SplitMix64::new(19);
    let n_max = 16;
    let params = EstimateParams::with_n_max(n_max);

    let cases: Vec<(BlockCode, DigitSetSchedule)> = vec![
        (BlockCode::identity(golden_mean()), DigitSetSchedule::free(2)),
        (pairing_code(), DigitSetSchedule::free(4)),
        (
            pairing_code(),
            DigitSetSchedule::periodic(4, vec![SymbolSet::full(4), SymbolSet::singleton(2)])
                .unwrap(),
        ),
        (xor_code(), DigitSetSchedule::free(2)),
        (xor_code(), random_branching_schedule(&mut rng, 2)),
    ];
    for (i, (code, sched)) in cases.iter().enumerate() {
        let source = estimate_cover_entropy(code.source(), sched, &params).unwrap();
        let image = image_entropy_estimate(code, Some(sched), n_max).unwrap();
        assert!(
            image.value <= source.value + 2.0 * SLACK,
            "case {i}: image {} vs source {}",
            image.value,
            source.value
        );
    }
}

/// The two-sided factor sandwich
/// `h(S, pi E) <= h(T, E) <= h(S, pi E) + h_top(T, X | pi)` on five fixed
/// code/schedule pairs.
#[test]
fn factor_sandwich() {
    let n_max = 16;
    let params = EstimateParams::with_n_max(n_max);
    let mut rng = SplitMix64::new(23);

    let cases: Vec<(BlockCode, DigitSetSchedule)> = vec![
        (BlockCode::identity(golden_mean()), DigitSetSchedule::free(2)),
        (pairing_code(), DigitSetSchedule::free(4)),
        (
            pairing_code(),
            DigitSetSchedule::periodic(4, vec![SymbolSet::full(4), SymbolSet::singleton(0)])
                .unwrap(),
        ),
        (xor_code(), DigitSetSchedule::free(2)),
        (pairing_code(), random_branching_schedule(&mut rng, 4)),
    ];
    for (i, (code, sched)) in cases.iter().enumerate() {
        let h_source = estimate_cover_entropy(code.source(), sched, &params)
            .unwrap()
            .value;
        let h_image = image_entropy_estimate(code, Some(sched), n_max).unwrap().value;
        let h_rel = relative_entropy_over_factor(code, n_max, 8)
            .unwrap()
            .estimate
            .value;
        assert!(
            h_image <= h_source + 2.0 * SLACK,
            "case {i}: lower side {h_image} vs {h_source}"
        );
        assert!(
            h_source <= h_image + h_rel + 2.0 * SLACK,
            "case {i}: upper side {h_source} vs {h_image} + {h_rel}"
        );
    }
}

/// Cover power law: the T^m estimate is m times the T estimate, within 2%.
#[test]
fn power_law_for_cover_estimates() {
    let params = EstimateParams::with_n_max(18);
    for shift in [SubshiftSpec::full_shift(2), golden_mean()] {
        let sched = DigitSetSchedule::free(shift.alphabet_size());
        let base = estimate_cover_entropy(&shift, &sched, &params).unwrap().value;
        for m in 2..=4usize {
            let (blocked_shift, blocks) = shift.block_power(m).unwrap();
            let blocked_sched = sched.blocked(m, &blocks).unwrap();
            let powered = estimate_cover_entropy(&blocked_shift, &blocked_sched, &params)
                .unwrap()
                .value;
            let expect = m as f64 * base;
            assert!(
                (powered - expect).abs() <= 0.02 * expect.max(1.0),
                "m={m}: {powered} vs {expect}"
            );
        }
    }
}
