//! Shared helpers for the integration suites.

use entroscope::rng::SplitMix64;
use entroscope::symbolic::{DigitSetSchedule, SubshiftSpec, SymbolSet};

pub fn golden_mean() -> SubshiftSpec {
    SubshiftSpec::golden_mean()
}

pub fn phi_ln() -> f64 {
    ((1.0 + 5.0f64.sqrt()) / 2.0).ln()
}

/// Random eventually periodic schedule over a full shift: preperiod up to
/// 2 sets, period up to 4 sets, each a random nonempty subset.
pub fn random_schedule(rng: &mut SplitMix64, m: usize) -> DigitSetSchedule {
    let pre_len = rng.next_below(3) as usize;
    let q = 1 + rng.next_below(4) as usize;
    let mut sets = |count: usize| -> Vec<SymbolSet> {
        (0..count)
            .map(|_| {
                let mut set = SymbolSet::empty();
                while set.is_empty() {
                    for s in 0..m {
                        if rng.next_f64() < 0.6 {
                            set.insert(s as u8);
                        }
                    }
                }
                set
            })
            .collect()
    };
    let preperiod = sets(pre_len);
    let period = sets(q);
    DigitSetSchedule::new(
        m,
        preperiod,
        period,
        entroscope::symbolic::TwoSidedRule::Free,
    )
    .expect("random schedule is valid")
}

/// A random schedule with at least one branching position per period, so
/// the subset is uncountable and oracle agreement is informative.
pub fn random_branching_schedule(rng: &mut SplitMix64, m: usize) -> DigitSetSchedule {
    loop {
        let sched = random_schedule(rng, m);
        if sched.period().iter().any(|s| s.len() >= 2) {
            return sched;
        }
    }
}
