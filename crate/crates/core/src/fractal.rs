//! Hausdorff measure and dimension of digit Cantor sets on the circle,
//! and the bridge between Hausdorff dimension and dimensional entropy
//! under the base-m expanding map.
//!
//! A digit schedule over `{0..m-1}` projects to the circle through the
//! base-m expansion; generation-k arcs are the cylinders of the expansion.
//! Upper measure bounds come from generation-arc covers; lower bounds from
//! the mass-distribution principle with the uniform product measure on the
//! schedule tree, evaluated sharply enough to certify the full circle at
//! t = 1 to within 1e-9.

use thiserror::Error;

use crate::cover::CoverSpec;
use crate::dim::{dim_entropy, moran_oracle, DimError};
use crate::estimate::fit_slope;
use crate::symbolic::count::count_words;
use crate::symbolic::{DigitSetSchedule, SubshiftSpec, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FractalError {
    #[error("circle base must be at least 2, got {0}")]
    BadBase(usize),
    #[error("schedule alphabet {alphabet} does not match base {base}")]
    AlphabetMismatch { alphabet: usize, base: usize },
    #[error("scale {0} undercuts the smallest representable generation")]
    ScaleUnderflow(f64),
    #[error("delta must lie in (0, 1/4] for arc enclosure, got {0}")]
    BadDelta(f64),
    #[error("generation {0} would materialize too many arcs")]
    TooManyArcs(usize),
    #[error("exponent t must lie in [0, 1.5], got {0}")]
    BadExponent(f64),
    #[error(transparent)]
    Dim(#[from] DimError),
}

/// Deepest generation used by measure bounds.
const MAX_GENERATION: usize = 64;

/// The image of a digit schedule on the circle under base-m expansion.
#[derive(Debug, Clone)]
pub struct CircleSet {
    source: DigitSetSchedule,
    base: usize,
    shift: SubshiftSpec,
}

impl CircleSet {
    /// The image depends only on forward coordinates; any two-sided rule on
    /// the source is irrelevant here and simply carried along.
    pub fn new(source: DigitSetSchedule, base: usize) -> Result<Self, FractalError> {
        if base < 2 {
            return Err(FractalError::BadBase(base));
        }
        if source.alphabet_size() != base {
            return Err(FractalError::AlphabetMismatch {
                alphabet: source.alphabet_size(),
                base,
            });
        }
        Ok(CircleSet {
            source,
            base,
            shift: SubshiftSpec::full_shift(base),
        })
    }

    /// Same digit set at every coordinate, e.g. digits {0, 2} in base 3.
    pub fn from_digits(base: usize, digits: &[u8]) -> Result<Self, FractalError> {
        let set = crate::symbolic::SymbolSet::from_symbols(digits.iter().copied());
        let sched = DigitSetSchedule::periodic(base, vec![set])
            .map_err(|_| FractalError::BadBase(base))?;
        CircleSet::new(sched, base)
    }

    pub fn full_circle(base: usize) -> Self {
        CircleSet::new(DigitSetSchedule::free(base), base).expect("full circle")
    }

    pub fn source(&self) -> &DigitSetSchedule {
        &self.source
    }

    pub fn base(&self) -> usize {
        self.base
    }

    fn arc_count(&self, k: usize) -> f64 {
        count_words(&self.shift, Some(&self.source), k)
            .map(|c| c.to_f64())
            .unwrap_or(0.0)
    }

    fn log_arc_count(&self, k: usize) -> f64 {
        count_words(&self.shift, Some(&self.source), k)
            .map(|c| c.ln())
            .unwrap_or(f64::NEG_INFINITY)
    }

    /// Log mass of a single generation-k arc under the uniform product
    /// measure: minus the sum of log allowed-set sizes over the first k
    /// digits.
    fn log_arc_mass(&self, k: usize) -> f64 {
        -(0..k as isize)
            .map(|j| (self.source.allowed_at(j).len() as f64).ln())
            .sum::<f64>()
    }
}

/// A generation-k arc: the circle points whose first k digits match `word`.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub word: Word,
    /// Exact left endpoint `numerator / base^k`.
    pub numerator: u128,
    pub generation: usize,
    pub start: f64,
    pub length: f64,
}

/// The generation-k arcs meeting the set; the arc count equals the word
/// count of the schedule at depth k.
pub fn project_intervals(set: &CircleSet, k: usize) -> Result<Vec<Arc>, FractalError> {
    if k > 40 || (set.base as f64).powi(k as i32) > 1e30 {
        return Err(FractalError::TooManyArcs(k));
    }
    let words = crate::symbolic::count::enumerate_window_words(
        &set.shift,
        &|i| set.source.allowed_at(i),
        0,
        k,
        1_000_000,
    )
    .ok_or(FractalError::TooManyArcs(k))?;
    let m = set.base as u128;
    let len = (set.base as f64).powi(-(k as i32));
    Ok(words
        .into_iter()
        .map(|w| {
            let mut num: u128 = 0;
            for &d in w.symbols() {
                num = num * m + d as u128;
            }
            Arc {
                start: num as f64 * len,
                numerator: num,
                generation: k,
                length: len,
                word: w,
            }
        })
        .collect())
}

/// Two-sided bounds on the t-dimensional Hausdorff measure at scale delta.
///
/// Upper: best generation-arc cover with arc length at most delta.
/// Lower: mass distribution. Any set of diameter `l <= 1/4` sits inside an
/// arc of length `l`, which meets at most `l m^J + 1` generation-J arcs of
/// mass `M_J` each, so `mu(U) <= min_J (l m^J + 1) M_J`; a cover then
/// costs at least `1 / sup_l [min_J (l m^J + 1) M_J / l^t]`. The supremum
/// is evaluated per band of scales with a periodic tail check; when no
/// certificate exists the lower bound is 0.
pub fn hausdorff_measure_approx(
    set: &CircleSet,
    t: f64,
    delta: f64,
) -> Result<(f64, f64), FractalError> {
    if !(0.0..=1.5).contains(&t) {
        return Err(FractalError::BadExponent(t));
    }
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(FractalError::BadDelta(delta));
    }
    let m = set.base as f64;
    let k_min = (-(delta.ln()) / m.ln()).ceil() as usize;
    if k_min + 8 > MAX_GENERATION {
        return Err(FractalError::ScaleUnderflow(delta));
    }

    // Upper bound: minimize over available generations.
    let mut upper = f64::INFINITY;
    for k in k_min..=MAX_GENERATION.min(k_min + 24) {
        let log_cost = set.log_arc_count(k) - t * k as f64 * m.ln();
        upper = upper.min(log_cost.exp());
    }

    // Lower bound, with the scale boost H^{t,delta} >= delta^(t-t') H^{t'}.
    let mut lower = mass_bound(set, t, k_min);
    let mut tp = t + 0.01;
    while tp <= 1.5 {
        let base_bound = mass_bound(set, tp, k_min);
        if base_bound > 0.0 {
            lower = lower.max(delta.powf(t - tp) * base_bound);
        }
        tp += 0.01;
    }
    Ok((lower, upper.max(0.0)))
}

/// `1 / C(t)` where `C` bounds `mu(U) / diam(U)^t` over sets of diameter
/// at most `m^-s_min`; zero when the band values fail to stay bounded.
fn mass_bound(set: &CircleSet, t: f64, s_min: usize) -> f64 {
    let m = set.base as f64;
    let lnm = m.ln();
    let q = set.source.period_len().max(1);
    let s_max = (MAX_GENERATION - 4).min(s_min + 10 * q + 20);
    let j_max = MAX_GENERATION;
    let log_mass: Vec<f64> = (0..=j_max).map(|j| set.log_arc_mass(j)).collect();

    let mut band_values = Vec::new();
    let mut c_log = f64::NEG_INFINITY;
    for s in s_min..=s_max {
        // Per-band value: sup over l in [m^-(s+1), m^-s] of
        // min_J [ M_J m^J l^(1-t) + M_J l^-t ], bounding each term at its
        // worst l in the band.
        let mut best = f64::INFINITY;
        for j in 0..=j_max {
            let l_for_term1 = if t <= 1.0 { s as f64 } else { (s + 1) as f64 };
            let term1 = log_mass[j] + j as f64 * lnm - l_for_term1 * (1.0 - t) * lnm;
            let term2 = log_mass[j] + t * ((s + 1) as f64) * lnm;
            let val = log_add(term1, term2);
            best = best.min(val);
        }
        band_values.push(best);
        c_log = c_log.max(best);
    }
    // Tail certificate: the last whole periods of band values must not grow.
    if band_values.len() < 2 * q + 1 {
        return 0.0;
    }
    let tail = &band_values[band_values.len() - 2 * q..];
    for i in 0..q {
        if tail[q + i] > tail[i] + 1e-9 {
            return 0.0;
        }
    }
    (-c_log).exp()
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// How a dimension value was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionMethod {
    MoranClosedForm,
    BoxCount,
}

#[derive(Debug, Clone)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: DimensionMethod,
    pub scales_used: Vec<f64>,
    pub residual: f64,
}

/// Hausdorff dimension of the digit set.
///
/// Schedules are eventually periodic, so the closed form applies: the
/// period average of log allowed-set sizes over log base.
pub fn hausdorff_dimension(set: &CircleSet, tol: f64) -> Result<DimensionEstimate, FractalError> {
    assert!(tol > 0.0);
    let value = (moran_oracle(&set.source) / (set.base as f64).ln()).clamp(0.0, 1.0);
    Ok(DimensionEstimate {
        value,
        method: DimensionMethod::MoranClosedForm,
        scales_used: Vec::new(),
        residual: 0.0,
    })
}

/// Box-counting estimate: slope of log arc counts against log scale over
/// generations 6..=12. An independent cross-check of the closed form.
pub fn box_count_dimension(set: &CircleSet) -> Result<DimensionEstimate, FractalError> {
    let lnm = (set.base as f64).ln();
    let ks: Vec<usize> = (6..=12).collect();
    let pts: Vec<(usize, f64)> = ks.iter().map(|&k| (k, set.log_arc_count(k))).collect();
    let fit = fit_slope(&pts);
    Ok(DimensionEstimate {
        value: (fit.slope / lnm).clamp(0.0, 1.0),
        method: DimensionMethod::BoxCount,
        scales_used: ks
            .iter()
            .map(|&k| (set.base as f64).powi(-(k as i32)))
            .collect(),
        residual: fit.residual,
    })
}

/// Dimension by bisection on t using the mass-distribution bound: the
/// largest t still certifying positive measure. Independent of the closed
/// form; used to validate the measure machinery.
pub fn dimension_via_measure_bisection(
    set: &CircleSet,
    tol: f64,
) -> Result<DimensionEstimate, FractalError> {
    assert!(tol >= 1e-6);
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mass_bound(set, mid, 8) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DimensionEstimate {
        value: 0.5 * (lo + hi),
        method: DimensionMethod::BoxCount,
        scales_used: Vec::new(),
        residual: 0.5 * (hi - lo),
    })
}

/// Result of the dimension-entropy bridge comparison.
#[derive(Debug, Clone)]
pub struct BridgeReport {
    pub hausdorff: f64,
    pub dim_entropy_over_log_base: f64,
    pub gap: f64,
    pub pass: bool,
    pub tol: f64,
}

/// Cross-validates `H_d(C) = h^B(T_m, C) / log m` by running the two
/// pipelines independently: the closed form on the circle side, the
/// Caratheodory bisection on the symbolic side.
pub fn bridge_check(set: &CircleSet, tol: f64) -> Result<BridgeReport, FractalError> {
    assert!(tol > 0.0);
    let lnm = (set.base as f64).ln();
    let hd = hausdorff_dimension(set, tol)?.value;
    let cover = CoverSpec::word_partition(1);
    let lambda_tol = (tol * lnm * 0.5).max(1e-8);
    let ce = dim_entropy(&set.shift, &set.source, &cover, lambda_tol, 64)?;
    let hb = ce.midpoint() / lnm;
    let gap = (hd - hb).abs();
    Ok(BridgeReport {
        hausdorff: hd,
        dim_entropy_over_log_base: hb,
        gap,
        pass: gap <= tol,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::SymbolSet;

    fn middle_thirds() -> CircleSet {
        CircleSet::from_digits(3, &[0, 2]).unwrap()
    }

    #[test]
    fn project_intervals_examples() {
        // Full 3-shift, one generation: three arcs of length 1/3.
        let full = CircleSet::full_circle(3);
        let arcs = project_intervals(&full, 1).unwrap();
        assert_eq!(arcs.len(), 3);
        assert!(arcs.iter().all(|a| (a.length - 1.0 / 3.0).abs() < 1e-15));

        // Digits {0, 2} in base 3 at generation 2: four arcs of length 1/9.
        let arcs = project_intervals(&middle_thirds(), 2).unwrap();
        assert_eq!(arcs.len(), 4);
        let starts: Vec<u128> = arcs.iter().map(|a| a.numerator).collect();
        assert_eq!(starts, vec![0, 2, 6, 8]);

        // Pinned schedule: one arc.
        let pinned = CircleSet::from_digits(3, &[1]).unwrap();
        let arcs = project_intervals(&pinned, 5).unwrap();
        assert_eq!(arcs.len(), 1);
    }

    #[test]
    fn arc_count_matches_word_count() {
        let set = middle_thirds();
        for k in 1..=8 {
            let arcs = project_intervals(&set, k).unwrap();
            assert_eq!(arcs.len() as f64, set.arc_count(k));
        }
    }

    #[test]
    fn full_circle_measure_at_t1() {
        let full = CircleSet::full_circle(3);
        let (lower, upper) = hausdorff_measure_approx(&full, 1.0, 1.0 / 9.0).unwrap();
        assert!(upper <= 1.0 + 1e-9, "upper {upper}");
        assert!(lower >= 1.0 - 1e-9, "lower {lower}");
    }

    #[test]
    fn middle_thirds_measure_at_critical_t() {
        // 2^k arcs of size 3^-k: the cover sum is exactly 1 at every
        // generation.
        let set = middle_thirds();
        let t = 2.0f64.ln() / 3.0f64.ln();
        let (lower, upper) = hausdorff_measure_approx(&set, t, 1.0 / 27.0).unwrap();
        assert!(upper <= 1.0 + 1e-9, "upper {upper}");
        assert!(lower > 0.0, "lower {lower}");
    }

    #[test]
    fn single_point_measure_vanishes() {
        let pinned = CircleSet::from_digits(3, &[1]).unwrap();
        let mut prev = f64::INFINITY;
        for delta_k in [2usize, 4, 8, 16] {
            let delta = 3.0f64.powi(-(delta_k as i32));
            let (_, upper) = hausdorff_measure_approx(&pinned, 0.5, delta).unwrap();
            assert!(upper <= prev + 1e-15);
            prev = upper;
        }
        assert!(prev < 1e-3, "upper should vanish: {prev}");
    }

    #[test]
    fn threshold_behavior() {
        // Below the dimension the lower bound blows up as delta shrinks;
        // above it the upper bound vanishes.
        let set = middle_thirds();
        let dim = 2.0f64.ln() / 3.0f64.ln();
        let t_low = dim - 0.15;
        let mut lowers = Vec::new();
        let mut uppers = Vec::new();
        for k in [10usize, 20, 30, 40] {
            let delta = 3.0f64.powi(-(k as i32));
            let (lo, _) = hausdorff_measure_approx(&set, t_low, delta).unwrap();
            let (_, up) = hausdorff_measure_approx(&set, dim + 0.1, delta).unwrap();
            lowers.push(lo);
            uppers.push(up);
        }
        assert!(lowers.windows(2).all(|w| w[1] >= w[0]), "{lowers:?}");
        assert!(lowers.last().unwrap() > &100.0, "{lowers:?}");
        assert!(
            uppers.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            "{uppers:?}"
        );
        assert!(uppers.last().unwrap() < &1e-2, "{uppers:?}");
    }

    #[test]
    fn dimension_examples() {
        let full = CircleSet::full_circle(3);
        assert!((hausdorff_dimension(&full, 1e-3).unwrap().value - 1.0).abs() < 1e-12);

        let set = middle_thirds();
        let expect = 2.0f64.ln() / 3.0f64.ln();
        let est = hausdorff_dimension(&set, 1e-3).unwrap();
        assert!((est.value - expect).abs() < 1e-12);
        assert_eq!(est.method, DimensionMethod::MoranClosedForm);

        // Box-count cross-check over generations up to 12.
        let bc = box_count_dimension(&set).unwrap();
        assert!((bc.value - expect).abs() < 1e-6, "{}", bc.value);

        // A single point has dimension 0.
        let pinned = CircleSet::from_digits(3, &[1]).unwrap();
        assert_eq!(hausdorff_dimension(&pinned, 1e-3).unwrap().value, 0.0);
    }

    #[test]
    fn measure_bisection_agrees() {
        let set = middle_thirds();
        let expect = 2.0f64.ln() / 3.0f64.ln();
        let est = dimension_via_measure_bisection(&set, 1e-3).unwrap();
        assert!((est.value - expect).abs() < 5e-3, "{}", est.value);
    }

    #[test]
    fn bridge_examples() {
        // Middle-thirds digits: both pipelines give log 2 / log 3.
        let report = bridge_check(&middle_thirds(), 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!((report.hausdorff - 0.63093).abs() < 1e-4);

        // Full circle: 1 on both sides.
        let report = bridge_check(&CircleSet::full_circle(3), 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!((report.hausdorff - 1.0).abs() < 1e-9);

        // Pinned single point: 0 on both sides.
        let pinned = CircleSet::from_digits(2, &[0]).unwrap();
        let report = bridge_check(&pinned, 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.hausdorff.abs() < 1e-12);
    }

    #[test]
    fn dimension_monotone_under_refinement() {
        let big = middle_thirds();
        let small = CircleSet::new(
            DigitSetSchedule::periodic(
                3,
                vec![SymbolSet::from_symbols([0, 2]), SymbolSet::from_symbols([0])],
            )
            .unwrap(),
            3,
        )
        .unwrap();
        assert!(small.source().is_subset_of(big.source()));
        let d_small = hausdorff_dimension(&small, 1e-3).unwrap().value;
        let d_big = hausdorff_dimension(&big, 1e-3).unwrap().value;
        assert!(d_small <= d_big + 1e-12);
    }
}
