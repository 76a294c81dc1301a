//! Covering entropy of schedule subsets: minimal subcovers, spanning and
//! separated counts, slope-fit estimates with sandwich certificates,
//! conditional entropy over covers, relative entropy over factor maps, and
//! local entropy of forward fibers.
//!
//! For the cylinder metric everything reduces to window-word combinatorics:
//! two points are `(n, eps)`-close exactly when they agree on the window
//! `-k..n+k` with `k` the radius of `eps`, so spanning and separated counts
//! coincide with exact window counts and the usual sandwich
//! `N(U) <= r_n <= s_n <= N(V)` is certified by counting at two depths.

use thiserror::Error;

use crate::estimate::{fit_slope, fit_window, EntropyEstimate, SlopeFit};
use crate::symbolic::count::{count_window, enumerate_window_words, CountError, WordCount};
use crate::symbolic::{
    count_fiber_words, BlockCode, DigitSetSchedule, EventuallyPeriodicPoint, MetricParams,
    SubshiftSpec, SymbolSet, TwoSidedRule, Word,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("window depth overflow: {0}")]
    DepthOverflow(String),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("cover and subset alphabets disagree")]
    IncompatibleAlphabet,
    #[error("n_max must be at least 8, got {0}")]
    WindowTooSmall(usize),
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("center point is not admissible in the shift")]
    InadmissibleCenter,
    #[error("general covers of this size are not enumerable: {0}")]
    CoverTooLarge(String),
}

/// A finite union of cylinders `[word]` anchored at nonnegative coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderUnion {
    pub cylinders: Vec<(usize, Word)>,
}

impl CylinderUnion {
    /// Extent of the constrained window `0..extent`.
    pub fn extent(&self) -> usize {
        self.cylinders
            .iter()
            .map(|(a, w)| a + w.len())
            .max()
            .unwrap_or(0)
    }

    /// Does the union contain every point, i.e. is some cylinder empty-worded?
    pub fn is_whole_space(&self) -> bool {
        self.cylinders.iter().any(|(_, w)| w.is_empty())
    }

    fn contains_window(&self, window: &[crate::symbolic::Symbol]) -> bool {
        self.cylinders.iter().any(|(a, w)| {
            window.len() >= a + w.len() && &window[*a..a + w.len()] == w.symbols()
        })
    }
}

/// A cover of the shift: a depth-`d` word partition or a general finite
/// family of cylinder unions.
#[derive(Debug, Clone, PartialEq)]
pub enum CoverSpec {
    /// Cells are the cylinders on `0..depth`; a clopen partition.
    WordPartition { depth: usize },
    /// Arbitrary finite family of cylinder unions covering the space.
    General { elements: Vec<CylinderUnion> },
}

impl CoverSpec {
    pub fn word_partition(depth: usize) -> Self {
        assert!(depth >= 1);
        CoverSpec::WordPartition { depth }
    }

    /// The trivial cover `{X}`.
    pub fn trivial() -> Self {
        CoverSpec::General {
            elements: vec![CylinderUnion {
                cylinders: vec![(0, Word::empty())],
            }],
        }
    }

    pub fn depth(&self) -> Option<usize> {
        match self {
            CoverSpec::WordPartition { depth } => Some(*depth),
            CoverSpec::General { .. } => None,
        }
    }
}

/// Result of a minimal-subcover computation.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcoverCount {
    pub count: WordCount,
    /// True for greedy set-cover values on general covers.
    pub approximate: bool,
}

/// Minimal cardinality of a subfamily of the iterated cover `U_0^{n-1}`
/// covering `K`.
///
/// Word partitions are exact (cells are disjoint, so the minimum is the
/// number of cells meeting `K`); general covers use greedy set cover and
/// flag the value approximate. The empty set counts 1 by convention.
pub fn min_subcover_count(
    shift: &SubshiftSpec,
    cover: &CoverSpec,
    subset: &DigitSetSchedule,
    n: usize,
) -> Result<SubcoverCount, CoverError> {
    if subset.alphabet_size() != shift.alphabet_size() {
        return Err(CoverError::IncompatibleAlphabet);
    }
    match cover {
        CoverSpec::WordPartition { depth } => {
            let len = n + depth - 1;
            let count = count_window(shift, &|i| subset.allowed_at(i), 0, len)?;
            if count.is_zero() {
                return Ok(SubcoverCount {
                    count: WordCount::one(),
                    approximate: false,
                });
            }
            Ok(SubcoverCount {
                count,
                approximate: false,
            })
        }
        CoverSpec::General { elements } => greedy_subcover(shift, elements, subset, n),
    }
}

const GENERAL_UNIVERSE_LIMIT: usize = 100_000;
const GENERAL_TUPLE_LIMIT: usize = 20_000;

fn greedy_subcover(
    shift: &SubshiftSpec,
    elements: &[CylinderUnion],
    subset: &DigitSetSchedule,
    n: usize,
) -> Result<SubcoverCount, CoverError> {
    let extent = elements.iter().map(CylinderUnion::extent).max().unwrap_or(1);
    let depth = n - 1 + extent.max(1);
    let tuples = (elements.len() as f64).powi(n as i32);
    if tuples > GENERAL_TUPLE_LIMIT as f64 {
        return Err(CoverError::CoverTooLarge(format!(
            "{}^{} product cells",
            elements.len(),
            n
        )));
    }
    let universe = enumerate_window_words(
        shift,
        &|i| subset.allowed_at(i),
        0,
        depth,
        GENERAL_UNIVERSE_LIMIT,
    )
    .ok_or_else(|| CoverError::DepthOverflow(format!("universe at depth {depth}")))?;
    if universe.is_empty() {
        return Ok(SubcoverCount {
            count: WordCount::one(),
            approximate: false,
        });
    }

    // Membership of each window word in each product cell (i_0..i_{n-1}).
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut tuple = vec![0usize; n];
    loop {
        let covered: Vec<usize> = universe
            .iter()
            .enumerate()
            .filter(|(_, w)| {
                (0..n).all(|t| elements[tuple[t]].contains_window(&w.symbols()[t..]))
            })
            .map(|(i, _)| i)
            .collect();
        if !covered.is_empty() {
            cells.push(covered);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(SubcoverCount {
                    count: WordCount::Exact(greedy_cover_size(universe.len(), &cells).into()),
                    approximate: true,
                });
            }
            tuple[pos] += 1;
            if tuple[pos] < elements.len() {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
    }
}

fn greedy_cover_size(universe: usize, cells: &[Vec<usize>]) -> u64 {
    let mut uncovered = vec![true; universe];
    let mut remaining = universe;
    let mut picked = 0u64;
    while remaining > 0 {
        let best = cells
            .iter()
            .max_by_key(|cell| cell.iter().filter(|&&i| uncovered[i]).count())
            .expect("cells cover the universe");
        let gain = best.iter().filter(|&&i| uncovered[i]).count();
        assert!(gain > 0, "cover elements do not cover the subset");
        for &i in best {
            if uncovered[i] {
                uncovered[i] = false;
                remaining -= 1;
            }
        }
        picked += 1;
    }
    picked
}

/// Exact `(n, eps)`-separated and spanning counts of a schedule subset.
///
/// For `eps` in `[b^-(k+1), b^-k)` both counts equal the number of
/// admissible patterns on the window `-k..n+k`; the empty set counts
/// `(1, 1)` by convention. Returns `(s_n, r_n)`.
pub fn separated_spanning_counts(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    n: usize,
    eps: f64,
    metric: &MetricParams,
) -> Result<(WordCount, WordCount), CoverError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(CoverError::BadEpsilon(eps));
    }
    if subset.alphabet_size() != shift.alphabet_size() {
        return Err(CoverError::IncompatibleAlphabet);
    }
    let count = match metric.window_radius(eps) {
        None => WordCount::one(),
        Some(k) => count_window(shift, &|i| subset.allowed_at(i), -(k as isize), n + 2 * k)?,
    };
    if count.is_zero() {
        return Ok((WordCount::one(), WordCount::one()));
    }
    Ok((count.clone(), count))
}

/// Parameters for cover-entropy estimation.
#[derive(Debug, Clone)]
pub struct EstimateParams {
    pub n_max: usize,
    /// Descending scales; the estimate is taken at the finest.
    pub eps_list: Vec<f64>,
    pub metric: MetricParams,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            n_max: 24,
            eps_list: vec![0.5, 0.25, 0.125],
            metric: MetricParams::default(),
        }
    }
}

impl EstimateParams {
    pub fn with_n_max(n_max: usize) -> Self {
        EstimateParams {
            n_max,
            ..Default::default()
        }
    }
}

/// One row of the estimation grid, as emitted to CSV.
#[derive(Debug, Clone)]
pub struct GridRow {
    pub n: usize,
    pub eps: f64,
    pub s_n: WordCount,
    pub r_n: WordCount,
    /// `N(U_0^{n-1}, K)` for the 1-block partition: the sandwich lower count.
    pub n_lower: WordCount,
    /// `N(V_0^{n-1}, K)` for the window partition finer than eps.
    pub n_upper: WordCount,
    /// Per-eps fitted slope, repeated on each row of the eps block.
    pub slope: f64,
}

#[derive(Debug, Clone)]
pub struct CoverEntropyGrid {
    pub rows: Vec<GridRow>,
    pub per_eps: Vec<(f64, SlopeFit)>,
    pub estimate: EntropyEstimate,
}

/// Covering-entropy estimate of a schedule subset: limsup slope of
/// `log s_n` over the upper half of the window, per scale, taking the value
/// at the finest scale and certifying the count sandwich at every grid
/// point.
pub fn estimate_cover_entropy(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    params: &EstimateParams,
) -> Result<EntropyEstimate, CoverError> {
    Ok(cover_entropy_grid(shift, subset, params)?.estimate)
}

pub fn cover_entropy_grid(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    params: &EstimateParams,
) -> Result<CoverEntropyGrid, CoverError> {
    if params.n_max < 8 {
        return Err(CoverError::WindowTooSmall(params.n_max));
    }
    let mut eps_list = params.eps_list.clone();
    eps_list.sort_by(|a, b| b.partial_cmp(a).expect("finite eps"));
    eps_list.dedup();
    let ns: Vec<usize> = fit_window(params.n_max).collect();

    let mut rows = Vec::new();
    let mut per_eps = Vec::new();
    let mut lower_slope = f64::INFINITY;
    for &eps in &eps_list {
        let mut pts = Vec::new();
        let mut eps_rows = Vec::new();
        for &n in &ns {
            let (s_n, r_n) = separated_spanning_counts(shift, subset, n, eps, &params.metric)?;
            let n_lower = {
                let c = count_window(shift, &|i| subset.allowed_at(i), 0, n)?;
                if c.is_zero() {
                    WordCount::one()
                } else {
                    c
                }
            };
            pts.push((n, s_n.ln()));
            eps_rows.push(GridRow {
                n,
                eps,
                n_lower,
                n_upper: s_n.clone(),
                s_n: s_n.clone(),
                r_n,
                slope: 0.0,
            });
        }
        let fit = fit_slope(&pts);
        for row in &mut eps_rows {
            row.slope = fit.slope;
        }
        rows.extend(eps_rows);
        per_eps.push((eps, fit));

        let lower_pts: Vec<(usize, f64)> = ns
            .iter()
            .map(|&n| {
                let c = count_window(shift, &|i| subset.allowed_at(i), 0, n)
                    .map(|c| c.ln())
                    .unwrap_or(f64::NEG_INFINITY);
                (n, c)
            })
            .collect();
        lower_slope = lower_slope.min(fit_slope(&lower_pts).slope);
    }

    let finest = per_eps.last().expect("at least one eps").1;
    let all_exact = rows.iter().all(|r| r.s_n.is_exact());
    let mut estimate = EntropyEstimate::slope_fit(finest, (ns[0], *ns.last().unwrap()));
    let upper = per_eps
        .iter()
        .map(|(_, f)| f.slope)
        .fold(f64::NEG_INFINITY, f64::max);
    let lower = lower_slope.max(0.0).min(estimate.value);
    estimate = estimate.with_bounds(lower, upper.max(0.0));
    estimate.exact = all_exact && finest.residual < 1e-9;
    Ok(CoverEntropyGrid {
        rows,
        per_eps,
        estimate,
    })
}

/// Conditional entropy `h(T, U1 | U2)`: growth rate of the largest number
/// of `U1`-product cells needed to cover a single `U2`-product cell.
///
/// The sequence `log N(U1_0^{n-1} | U2_0^{n-1})` is subadditive, so every
/// computed `a_n / n` is a certified upper bound for the limit; the value
/// reported is the slope fit capped by that certificate.
pub fn conditional_cover_entropy(
    shift: &SubshiftSpec,
    u1: &CoverSpec,
    u2: &CoverSpec,
    n_max: usize,
) -> Result<EntropyEstimate, CoverError> {
    if n_max < 8 {
        return Err(CoverError::WindowTooSmall(n_max));
    }
    let ns: Vec<usize> = fit_window(n_max).collect();
    let mut pts = Vec::new();
    let mut inf_certificate = f64::INFINITY;
    for &n in &ns {
        let value = conditional_count(shift, u1, u2, n)?;
        let ln = value.ln();
        pts.push((n, ln));
        inf_certificate = inf_certificate.min(ln / n as f64);
    }
    let fit = fit_slope(&pts);
    let mut est = EntropyEstimate::slope_fit(fit, (ns[0], *ns.last().unwrap()));
    est.value = est.value.min(inf_certificate).max(0.0);
    est = est.with_bounds(0.0, inf_certificate);
    Ok(est)
}

/// `N(U1_0^{n-1} | U2_0^{n-1})` for word partitions (exact) and the trivial
/// cover on the right.
fn conditional_count(
    shift: &SubshiftSpec,
    u1: &CoverSpec,
    u2: &CoverSpec,
    n: usize,
) -> Result<WordCount, CoverError> {
    let d1 = match u1 {
        CoverSpec::WordPartition { depth } => *depth,
        CoverSpec::General { .. } => {
            return Err(CoverError::CoverTooLarge(
                "conditional entropy needs a word partition on the left".into(),
            ))
        }
    };
    match u2 {
        CoverSpec::General { elements }
            if elements.len() == 1 && elements[0].is_whole_space() =>
        {
            let free = DigitSetSchedule::free(shift.alphabet_size());
            Ok(min_subcover_count(shift, u1, &free, n)?.count)
        }
        CoverSpec::General { .. } => Err(CoverError::CoverTooLarge(
            "conditional entropy supports word partitions and the trivial cover".into(),
        )),
        CoverSpec::WordPartition { depth: d2 } => {
            if d1 <= *d2 {
                // Every w2-cylinder lies inside a single w1-cylinder.
                return Ok(WordCount::one());
            }
            let l2 = n + d2 - 1;
            let delta = d1 - d2;
            // Max over admissible (n+d2-1)-words of the number of admissible
            // extensions by delta symbols: reachability DP, then path counts
            // from each reachable end state.
            let dfa = shift.dfa();
            let clen = shift.memory() - 1;
            if l2 < clen {
                return Err(CoverError::DepthOverflow(
                    "conditional window shorter than constraint memory".into(),
                ));
            }
            let mut reach = vec![false; dfa.num_states()];
            for (i, ok) in reach.iter_mut().enumerate() {
                *ok = dfa.backward_live[i];
            }
            for _ in clen..l2 {
                let mut next = vec![false; dfa.num_states()];
                for (i, &ok) in reach.iter().enumerate() {
                    if ok {
                        for &j in dfa.step[i].iter().flatten() {
                            next[j] = true;
                        }
                    }
                }
                reach = next;
            }
            let mut best = 0u64;
            for (i, &ok) in reach.iter().enumerate() {
                if !ok || !dfa.forward_live[i] {
                    continue;
                }
                let mut counts = vec![0u64; dfa.num_states()];
                counts[i] = 1;
                for _ in 0..delta {
                    let mut next = vec![0u64; dfa.num_states()];
                    for (a, &c) in counts.iter().enumerate() {
                        if c > 0 {
                            for &b in dfa.step[a].iter().flatten() {
                                next[b] += c;
                            }
                        }
                    }
                    counts = next;
                }
                let total: u64 = counts
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| dfa.forward_live[*j])
                    .map(|(_, &c)| c)
                    .sum();
                best = best.max(total);
            }
            Ok(WordCount::Exact(best.into()))
        }
    }
}

/// Relative entropy over a factor map, with the sampling bookkeeping.
#[derive(Debug, Clone)]
pub struct RelativeEntropyReport {
    pub estimate: EntropyEstimate,
    pub fibers_sampled: usize,
    pub argmax_fiber: EventuallyPeriodicPoint,
}

/// Relative entropy `h_top(T, X | pi)` as the sup over sampled eventually
/// periodic fibers of the fiber word-count slope.
///
/// Fibers are the periodic points of the target of period up to 6, taken in
/// (period, lexicographic) order; the supremum over that fixed family is a
/// heuristic stand-in for the sup over all fiber base points.
pub fn relative_entropy_over_factor(
    code: &BlockCode,
    n_max: usize,
    fiber_samples: usize,
) -> Result<RelativeEntropyReport, CoverError> {
    if n_max < 8 {
        return Err(CoverError::WindowTooSmall(n_max));
    }
    let fibers = periodic_points(code.target(), 6, fiber_samples.max(1));
    assert!(!fibers.is_empty(), "target language has periodic points");
    let ns: Vec<usize> = fit_window(n_max).collect();
    let mut best: Option<(SlopeFit, EventuallyPeriodicPoint)> = None;
    for y in &fibers {
        let pts: Vec<(usize, f64)> = ns
            .iter()
            .map(|&n| (n, count_fiber_words(code, y, n).ln()))
            .collect();
        let fit = fit_slope(&pts);
        if best.as_ref().map(|(b, _)| fit.slope > b.slope).unwrap_or(true) {
            best = Some((fit, y.clone()));
        }
    }
    let (fit, argmax) = best.expect("at least one fiber");
    let estimate = EntropyEstimate::slope_fit(fit, (ns[0], *ns.last().unwrap()));
    Ok(RelativeEntropyReport {
        estimate,
        fibers_sampled: fibers.len(),
        argmax_fiber: argmax,
    })
}

/// Covering-entropy estimate of the image of a schedule subset under a
/// block code: slope of the distinct-image-word counts.
pub fn image_entropy_estimate(
    code: &BlockCode,
    subset: Option<&DigitSetSchedule>,
    n_max: usize,
) -> Result<EntropyEstimate, CoverError> {
    if n_max < 8 {
        return Err(CoverError::WindowTooSmall(n_max));
    }
    let ns: Vec<usize> = fit_window(n_max).collect();
    let pts: Vec<(usize, f64)> = ns
        .iter()
        .map(|&n| (n, crate::symbolic::count_image_words(code, subset, n).ln()))
        .collect();
    let fit = fit_slope(&pts);
    Ok(EntropyEstimate::slope_fit(fit, (ns[0], *ns.last().unwrap())))
}

/// Admissible periodic points of period up to `max_period`, in
/// (period, lexicographic) order, capped at `limit`.
pub fn periodic_points(
    shift: &SubshiftSpec,
    max_period: usize,
    limit: usize,
) -> Vec<EventuallyPeriodicPoint> {
    let mut out: Vec<EventuallyPeriodicPoint> = Vec::new();
    for q in 1..=max_period {
        for w in shift.enumerate_words(q) {
            let point = EventuallyPeriodicPoint::new(Word::empty(), w);
            if point.is_admissible(shift) && !out.contains(&point) {
                out.push(point);
                if out.len() == limit {
                    return out;
                }
            }
        }
    }
    out
}

/// A forward local fiber: the points whose forward orbit stays within
/// `epsilon` of the center's.
#[derive(Debug, Clone)]
pub struct LocalBallSpec {
    pub center: EventuallyPeriodicPoint,
    pub epsilon: f64,
}

/// The fiber as a schedule: agree with the center on every coordinate
/// from `-k` on, where `k` is the window radius of `epsilon`.
pub fn local_fiber_schedule(
    shift: &SubshiftSpec,
    ball: &LocalBallSpec,
    metric: &MetricParams,
) -> Result<DigitSetSchedule, CoverError> {
    if !(ball.epsilon > 0.0 && ball.epsilon <= 1.0) {
        return Err(CoverError::BadEpsilon(ball.epsilon));
    }
    if !ball.center.is_admissible(shift) {
        return Err(CoverError::InadmissibleCenter);
    }
    let m = shift.alphabet_size();
    match metric.window_radius(ball.epsilon) {
        None => Ok(DigitSetSchedule::free(m)),
        Some(k) => {
            let x = &ball.center;
            let pre: Vec<SymbolSet> = (0..x.preperiod.len() as isize)
                .map(|i| SymbolSet::singleton(x.symbol_at(i)))
                .collect();
            let p = x.preperiod.len() as isize;
            let per: Vec<SymbolSet> = (p..p + x.period.len() as isize)
                .map(|i| SymbolSet::singleton(x.symbol_at(i)))
                .collect();
            let rule = if k == 0 {
                TwoSidedRule::Free
            } else {
                TwoSidedRule::PinnedToWord(x.window(-(k as isize), k))
            };
            Ok(DigitSetSchedule::new(m, pre, per, rule).expect("fiber schedule is valid"))
        }
    }
}

/// Local entropy `h(T, Phi_eps(x))`: materialize the forward fiber as a
/// schedule and estimate its covering entropy.
pub fn local_entropy(
    shift: &SubshiftSpec,
    ball: &LocalBallSpec,
    params: &EstimateParams,
) -> Result<EntropyEstimate, CoverError> {
    let fiber = local_fiber_schedule(shift, ball, &params.metric)?;
    // Probe at scales no coarser than the ball itself.
    let mut params = params.clone();
    params.eps_list = params
        .eps_list
        .iter()
        .copied()
        .filter(|&e| e <= ball.epsilon)
        .chain([ball.epsilon.min(1.0)])
        .collect();
    cover_entropy_grid(shift, &fiber, &params).map(|g| g.estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::count_words;

    fn full2() -> SubshiftSpec {
        SubshiftSpec::full_shift(2)
    }

    fn period2_schedule() -> DigitSetSchedule {
        DigitSetSchedule::periodic(2, vec![SymbolSet::full(2), SymbolSet::singleton(0)]).unwrap()
    }

    #[test]
    fn min_subcover_whole_space() {
        let shift = full2();
        let cover = CoverSpec::word_partition(1);
        let free = DigitSetSchedule::free(2);
        let got = min_subcover_count(&shift, &cover, &free, 5).unwrap();
        assert_eq!(got.count.to_f64(), 32.0);
        assert!(!got.approximate);
    }

    #[test]
    fn min_subcover_empty_is_one() {
        let shift = SubshiftSpec::golden_mean();
        let empty = DigitSetSchedule::periodic(2, vec![SymbolSet::singleton(1)]).unwrap();
        let cover = CoverSpec::word_partition(1);
        let got = min_subcover_count(&shift, &cover, &empty, 4).unwrap();
        assert_eq!(got.count, WordCount::one());
    }

    #[test]
    fn min_subcover_period2() {
        let shift = full2();
        let cover = CoverSpec::word_partition(1);
        let got = min_subcover_count(&shift, &cover, &period2_schedule(), 4).unwrap();
        assert_eq!(got.count.to_f64(), 4.0);
    }

    #[test]
    fn general_cover_greedy_matches_partition() {
        // The two 1-cylinders as a "general" cover reproduce the partition
        // count, with the approximate flag raised.
        let shift = full2();
        let elements = vec![
            CylinderUnion {
                cylinders: vec![(0, Word::from([0]))],
            },
            CylinderUnion {
                cylinders: vec![(0, Word::from([1]))],
            },
        ];
        let cover = CoverSpec::General { elements };
        let free = DigitSetSchedule::free(2);
        let got = min_subcover_count(&shift, &cover, &free, 3).unwrap();
        assert_eq!(got.count.to_f64(), 8.0);
        assert!(got.approximate);
    }

    #[test]
    fn separated_counts_examples() {
        let shift = full2();
        let metric = MetricParams::default();
        let free = DigitSetSchedule::free(2);
        let (s, r) = separated_spanning_counts(&shift, &free, 3, 0.6, &metric).unwrap();
        assert_eq!(s.to_f64(), 8.0);
        assert!(s.ln() >= r.ln());

        // Empty set convention.
        let gm = SubshiftSpec::golden_mean();
        let empty = DigitSetSchedule::periodic(2, vec![SymbolSet::singleton(1)]).unwrap();
        let (s, r) = separated_spanning_counts(&gm, &empty, 5, 0.3, &metric).unwrap();
        assert_eq!((s.to_f64(), r.to_f64()), (1.0, 1.0));

        // Fixed-point singleton.
        let point = EventuallyPeriodicPoint::constant(0);
        let single = DigitSetSchedule::singleton(2, &point);
        let (s, _) = separated_spanning_counts(&shift, &single, 10, 0.25, &metric).unwrap();
        assert_eq!(s.to_f64(), 1.0);
    }

    #[test]
    fn separated_counts_brute_force_oracle() {
        // Oracle: materialize the window words and confirm the reduction of
        // pairwise separation to window disagreement.
        let shift = SubshiftSpec::golden_mean();
        let sched = DigitSetSchedule::free(2);
        let metric = MetricParams::default();
        for (n, eps, k) in [(3usize, 0.6, 0usize), (4, 0.3, 1), (5, 0.25, 1)] {
            assert_eq!(metric.window_radius(eps), Some(k));
            let words = enumerate_window_words(
                &shift,
                &|i| sched.allowed_at(i),
                -(k as isize),
                n + 2 * k,
                100_000,
            )
            .unwrap();
            let (s, _) = separated_spanning_counts(&shift, &sched, n, eps, &metric).unwrap();
            assert_eq!(s.to_f64(), words.len() as f64);
        }
    }

    #[test]
    fn estimate_full_shift_and_golden_mean() {
        let params = EstimateParams::with_n_max(24);
        let est = estimate_cover_entropy(&full2(), &DigitSetSchedule::free(2), &params).unwrap();
        assert!((est.value - 2.0f64.ln()).abs() < 0.01, "{}", est.value);
        assert!(!est.non_convergent);

        let gm = SubshiftSpec::golden_mean();
        let est = estimate_cover_entropy(&gm, &DigitSetSchedule::free(2), &params).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((est.value - phi.ln()).abs() < 0.02, "{}", est.value);

        let est = estimate_cover_entropy(&full2(), &period2_schedule(), &params).unwrap();
        assert!((est.value - 0.5 * 2.0f64.ln()).abs() < 0.02, "{}", est.value);
    }

    #[test]
    fn grid_sandwich_holds() {
        let shift = SubshiftSpec::golden_mean();
        let grid = cover_entropy_grid(
            &shift,
            &DigitSetSchedule::free(2),
            &EstimateParams::with_n_max(16),
        )
        .unwrap();
        for row in &grid.rows {
            assert!(row.n_lower.ln() <= row.r_n.ln() + 1e-12);
            assert!(row.r_n.ln() <= row.s_n.ln() + 1e-12);
            assert!(row.s_n.ln() <= row.n_upper.ln() + 1e-12);
        }
    }

    #[test]
    fn conditional_entropy_examples() {
        let shift = full2();
        let u = CoverSpec::word_partition(1);
        let est = conditional_cover_entropy(&shift, &u, &u, 16).unwrap();
        assert_eq!(est.value, 0.0);

        let u1 = CoverSpec::word_partition(2);
        let est = conditional_cover_entropy(&shift, &u1, &CoverSpec::trivial(), 16).unwrap();
        assert!((est.value - 2.0f64.ln()).abs() < 0.05, "{}", est.value);
        let (lo, hi) = est.bounds.unwrap();
        assert!(lo <= est.value && est.value <= hi);

        let est = conditional_cover_entropy(
            &shift,
            &CoverSpec::word_partition(1),
            &CoverSpec::word_partition(2),
            16,
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn relative_entropy_examples() {
        // Identity on golden mean: fibers are singletons.
        let id = BlockCode::identity(SubshiftSpec::golden_mean());
        let rep = relative_entropy_over_factor(&id, 16, 8).unwrap();
        assert!(rep.estimate.value < 1e-9);

        // Collapse golden mean to a point: the fiber is the whole space.
        let collapse = BlockCode::pointwise(
            SubshiftSpec::golden_mean(),
            SubshiftSpec::from_matrix(vec![vec![true]]).unwrap(),
            |_| 0,
        )
        .unwrap();
        let rep = relative_entropy_over_factor(&collapse, 20, 4).unwrap();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!(
            (rep.estimate.value - phi.ln()).abs() < 0.02,
            "{}",
            rep.estimate.value
        );

        // Pairing code: fibers carry a full binary choice per symbol.
        let pairing = BlockCode::pointwise(
            SubshiftSpec::full_shift(4),
            SubshiftSpec::full_shift(2),
            |s| s % 2,
        )
        .unwrap();
        let rep = relative_entropy_over_factor(&pairing, 16, 8).unwrap();
        assert!((rep.estimate.value - 2.0f64.ln()).abs() < 0.01);
    }

    #[test]
    fn local_entropy_is_zero_on_full_shift() {
        let shift = full2();
        let ball = LocalBallSpec {
            center: EventuallyPeriodicPoint::constant(0),
            epsilon: 0.125,
        };
        let est = local_entropy(&shift, &ball, &EstimateParams::with_n_max(16)).unwrap();
        assert!(est.value < 1e-9, "{}", est.value);

        // Fixed point system: zero as well.
        let loop1 = SubshiftSpec::from_matrix(vec![vec![true]]).unwrap();
        let ball = LocalBallSpec {
            center: EventuallyPeriodicPoint::constant(0),
            epsilon: 0.5,
        };
        let est = local_entropy(&loop1, &ball, &EstimateParams::with_n_max(12)).unwrap();
        assert!(est.value < 1e-9);
    }

    #[test]
    fn local_fiber_counts_are_bounded() {
        // Counts of the fiber at finer scales are bounded by 2^(k'-k),
        // uniformly in n.
        let shift = full2();
        let metric = MetricParams::default();
        let ball = LocalBallSpec {
            center: EventuallyPeriodicPoint::constant(0),
            epsilon: 0.125, // k = 2
        };
        let fiber = local_fiber_schedule(&shift, &ball, &metric).unwrap();
        for n in 4..=16 {
            let (s, _) =
                separated_spanning_counts(&shift, &fiber, n, 0.125 / 4.0, &metric).unwrap();
            assert!(s.to_f64() <= 4.0, "n={n}: {}", s.to_f64());
        }
    }

    #[test]
    fn monotone_under_refinement() {
        let shift = full2();
        let small = period2_schedule();
        let big = DigitSetSchedule::free(2);
        assert!(small.is_subset_of(&big));
        for n in 2..=12 {
            let a = count_words(&shift, Some(&small), n).unwrap().to_f64();
            let b = count_words(&shift, Some(&big), n).unwrap().to_f64();
            assert!(a <= b);
        }
    }
}
