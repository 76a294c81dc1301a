//! Digit-schedule subsets: per-coordinate allowed-symbol sets with an
//! eventually periodic forward schedule, plus eventually periodic points
//! and the cylinder metric.
//!
//! Every subset the toolkit computes with — Cantor digit sets, entropy
//! lowering targets, forward local-entropy fibers — is one of these.

use thiserror::Error;

use super::shift::SubshiftSpec;
use super::word::{Symbol, SymbolSet, Word, MAX_ALPHABET};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("alphabet size {0} out of range 1..={MAX_ALPHABET}")]
    BadAlphabet(usize),
    #[error("period must contain at least one coordinate set")]
    EmptyPeriod,
    #[error("allowed set at coordinate {0} is empty")]
    EmptyAllowedSet(usize),
    #[error("allowed set at coordinate {0} uses symbols outside the alphabet")]
    SetOutOfAlphabet(usize),
    #[error("schedule alphabet {schedule} does not match shift alphabet {shift}")]
    IncompatibleAlphabet { schedule: usize, shift: usize },
}

/// Constraint rule for negative coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoSidedRule {
    /// Negative coordinates are unconstrained.
    Free,
    /// Coordinate `-1-i` mirrors coordinate `i`.
    Mirrored,
    /// The word occupies coordinates `-len..-1`; further left is free.
    PinnedToWord(Word),
}

/// A closed subset of the shift given by per-coordinate allowed sets:
/// preperiod sets for coordinates `0..p`, then the period repeating.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitSetSchedule {
    alphabet_size: usize,
    preperiod: Vec<SymbolSet>,
    period: Vec<SymbolSet>,
    two_sided: TwoSidedRule,
}

impl DigitSetSchedule {
    pub fn new(
        alphabet_size: usize,
        preperiod: Vec<SymbolSet>,
        period: Vec<SymbolSet>,
        two_sided: TwoSidedRule,
    ) -> Result<Self, ScheduleError> {
        if alphabet_size == 0 || alphabet_size > MAX_ALPHABET {
            return Err(ScheduleError::BadAlphabet(alphabet_size));
        }
        if period.is_empty() {
            return Err(ScheduleError::EmptyPeriod);
        }
        let full = SymbolSet::full(alphabet_size);
        for (i, set) in preperiod.iter().chain(period.iter()).enumerate() {
            if set.is_empty() {
                return Err(ScheduleError::EmptyAllowedSet(i));
            }
            if !set.is_subset_of(&full) {
                return Err(ScheduleError::SetOutOfAlphabet(i));
            }
        }
        Ok(DigitSetSchedule {
            alphabet_size,
            preperiod,
            period,
            two_sided,
        })
    }

    /// The whole shift space: every coordinate free.
    pub fn free(alphabet_size: usize) -> Self {
        DigitSetSchedule::new(
            alphabet_size,
            Vec::new(),
            vec![SymbolSet::full(alphabet_size)],
            TwoSidedRule::Free,
        )
        .expect("free schedule is valid")
    }

    /// Purely periodic schedule from symbol lists, free on the left.
    pub fn periodic(alphabet_size: usize, period: Vec<SymbolSet>) -> Result<Self, ScheduleError> {
        DigitSetSchedule::new(alphabet_size, Vec::new(), period, TwoSidedRule::Free)
    }

    /// The singleton schedule of an eventually periodic point: every forward
    /// coordinate pinned, negative side pinned to the point's left tail over
    /// one period.
    pub fn singleton(alphabet_size: usize, point: &EventuallyPeriodicPoint) -> Self {
        let pre: Vec<SymbolSet> = point
            .preperiod
            .symbols()
            .iter()
            .map(|&s| SymbolSet::singleton(s))
            .collect();
        let per: Vec<SymbolSet> = point
            .period
            .symbols()
            .iter()
            .map(|&s| SymbolSet::singleton(s))
            .collect();
        let left: Vec<Symbol> = (1..=point.period.len() as isize)
            .rev()
            .map(|i| point.symbol_at(-i))
            .collect();
        DigitSetSchedule::new(
            alphabet_size,
            pre,
            per,
            TwoSidedRule::PinnedToWord(Word(left)),
        )
        .expect("point schedule is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn preperiod(&self) -> &[SymbolSet] {
        &self.preperiod
    }

    pub fn period(&self) -> &[SymbolSet] {
        &self.period
    }

    pub fn two_sided(&self) -> &TwoSidedRule {
        &self.two_sided
    }

    pub fn preperiod_len(&self) -> usize {
        self.preperiod.len()
    }

    pub fn period_len(&self) -> usize {
        self.period.len()
    }

    /// Allowed symbols at coordinate `i` (any integer).
    pub fn allowed_at(&self, i: isize) -> SymbolSet {
        if i >= 0 {
            let i = i as usize;
            if i < self.preperiod.len() {
                self.preperiod[i]
            } else {
                self.period[(i - self.preperiod.len()) % self.period.len()]
            }
        } else {
            match &self.two_sided {
                TwoSidedRule::Free => SymbolSet::full(self.alphabet_size),
                TwoSidedRule::Mirrored => self.allowed_at(-1 - i),
                TwoSidedRule::PinnedToWord(w) => {
                    let j = w.len() as isize + i; // i in -len..-1 maps to 0..len-1
                    if j >= 0 {
                        SymbolSet::singleton(w.symbols()[j as usize])
                    } else {
                        SymbolSet::full(self.alphabet_size)
                    }
                }
            }
        }
    }

    /// Forward containment check: every allowed set of `self` inside the
    /// matching set of `other`, over all forward coordinates (decided on
    /// preperiods plus one lcm of the periods) and the negative side.
    pub fn is_subset_of(&self, other: &DigitSetSchedule) -> bool {
        if self.alphabet_size != other.alphabet_size {
            return false;
        }
        let pre = self.preperiod.len().max(other.preperiod.len());
        let horizon = pre + lcm(self.period.len(), other.period.len());
        for i in 0..horizon as isize {
            if !self.allowed_at(i).is_subset_of(&other.allowed_at(i)) {
                return false;
            }
        }
        let neg_horizon = match (&self.two_sided, &other.two_sided) {
            (_, TwoSidedRule::Free) => 0,
            (TwoSidedRule::PinnedToWord(a), TwoSidedRule::PinnedToWord(b)) => {
                a.len().max(b.len())
            }
            _ => horizon,
        };
        for i in 1..=neg_horizon as isize {
            if !self.allowed_at(-i).is_subset_of(&other.allowed_at(-i)) {
                return false;
            }
        }
        true
    }

    /// The schedule of the image set under `i` applications of the shift
    /// map (coordinates move left by `i`). Only the forward schedule is
    /// tracked; the exposed negative coordinates become free.
    pub fn shifted(&self, i: usize) -> DigitSetSchedule {
        let mut pre = Vec::new();
        let mut skip = i;
        let mut rotated = self.period.clone();
        if skip >= self.preperiod.len() {
            skip -= self.preperiod.len();
            let q = self.period.len();
            rotated.rotate_left(skip % q);
        } else {
            pre = self.preperiod[skip..].to_vec();
            skip = 0;
        }
        let _ = skip;
        DigitSetSchedule::new(self.alphabet_size, pre, rotated, TwoSidedRule::Free)
            .expect("shifted schedule is valid")
    }

    /// Blocked presentation for the `n`-th power system: coordinate `j` of
    /// the blocked schedule allows exactly the admissible `n`-blocks whose
    /// symbols satisfy this schedule at coordinates `jn..jn+n`.
    ///
    /// `blocks` must be the block alphabet from [`SubshiftSpec::block_power`].
    pub fn blocked(&self, n: usize, blocks: &[Word]) -> Result<DigitSetSchedule, ScheduleError> {
        let horizon_blocks = div_ceil(self.preperiod.len(), n) as isize;
        let q_blocks = self.period.len() / gcd(self.period.len(), n) as usize;
        let allowed_block = |j: isize| -> SymbolSet {
            SymbolSet::from_symbols(blocks.iter().enumerate().filter_map(|(b, w)| {
                let ok = w
                    .symbols()
                    .iter()
                    .enumerate()
                    .all(|(t, &s)| self.allowed_at(j * n as isize + t as isize).contains(s));
                if ok {
                    Some(b as Symbol)
                } else {
                    None
                }
            }))
        };
        let pre: Vec<SymbolSet> = (0..horizon_blocks).map(allowed_block).collect();
        let per: Vec<SymbolSet> = (horizon_blocks..horizon_blocks + q_blocks as isize)
            .map(allowed_block)
            .collect();
        DigitSetSchedule::new(blocks.len(), pre, per, TwoSidedRule::Free)
    }

    /// First depth at which no admissible word satisfies the schedule, if
    /// any, scanning forward up to `max_depth`.
    pub fn first_empty_depth(&self, shift: &SubshiftSpec, max_depth: usize) -> Option<usize> {
        for n in 1..=max_depth {
            let count = super::count::count_words(shift, Some(self), n).ok()?;
            if count.is_zero() {
                return Some(n);
            }
        }
        None
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn div_ceil(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// A two-sided eventually periodic point: `preperiod` occupies coordinates
/// `0..p`, the period repeats to the right from `p` and to the left from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EventuallyPeriodicPoint {
    pub preperiod: Word,
    pub period: Word,
}

impl EventuallyPeriodicPoint {
    pub fn new(preperiod: Word, period: Word) -> Self {
        assert!(!period.is_empty(), "period word must be non-empty");
        EventuallyPeriodicPoint { preperiod, period }
    }

    /// The fixed point `s^infinity`.
    pub fn constant(s: Symbol) -> Self {
        EventuallyPeriodicPoint::new(Word::empty(), Word(vec![s]))
    }

    pub fn symbol_at(&self, i: isize) -> Symbol {
        let p = self.preperiod.len() as isize;
        let q = self.period.len() as isize;
        if i >= 0 && i < p {
            self.preperiod.symbols()[i as usize]
        } else {
            let j = (((i - p) % q) + q) % q;
            self.period.symbols()[j as usize]
        }
    }

    /// Window of symbols on coordinates `start..start+len`.
    pub fn window(&self, start: isize, len: usize) -> Word {
        Word((0..len as isize).map(|t| self.symbol_at(start + t)).collect())
    }

    /// The point shifted so that `new(i) = old(i + offset)`; the left-shift
    /// image under the shift map for `offset = 1`.
    pub fn translated(&self, offset: isize) -> EventuallyPeriodicPoint {
        let p = self.preperiod.len() as isize;
        let q = self.period.len();
        let p_new = (p - offset).max(0) as usize;
        let pre = self.window(offset, p_new);
        let per = self.window(offset + p_new as isize, q);
        EventuallyPeriodicPoint::new(pre, per)
    }

    /// Is every window of the point admissible in the shift? Checked on a
    /// window long enough to cover the preperiod, one period on each side,
    /// and the constraint memory.
    pub fn is_admissible(&self, shift: &SubshiftSpec) -> bool {
        let p = self.preperiod.len();
        let q = self.period.len();
        let m = shift.memory();
        let len = p + 2 * (q + m) + 2 * q;
        let start = -((q + m) as isize);
        shift.word_occurs(&self.window(start, len))
    }
}

/// The cylinder metric `d(x, y) = base^(-min{|i| : x_i != y_i})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricParams {
    base: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { base: 2.0 }
    }
}

impl MetricParams {
    pub fn new(base: f64) -> Self {
        assert!(base > 1.0, "metric base must exceed 1");
        MetricParams { base }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// The window radius k with `base^-(k+1) <= eps < base^-k`, so two
    /// points are within `eps` exactly when they agree on coordinates of
    /// modulus at most k. For `eps >= 1` the radius is reported as `None`
    /// (no agreement required).
    pub fn window_radius(&self, eps: f64) -> Option<usize> {
        assert!(eps > 0.0, "eps must be positive");
        if eps >= 1.0 {
            return None;
        }
        // Smallest k with base^-(k+1) <= eps, robust at exact powers.
        let raw = -eps.ln() / self.base.ln();
        let mut k = raw.ceil() as i64 - 1;
        k = k.max(0);
        while self.base.powi(-(k as i32 + 1)) > eps {
            k += 1;
        }
        while k > 0 && self.base.powi(-(k as i32)) <= eps {
            k -= 1;
        }
        Some(k as usize)
    }

    /// Distance between two eventually periodic points, scanning a bounded
    /// coordinate range.
    pub fn distance(
        &self,
        x: &EventuallyPeriodicPoint,
        y: &EventuallyPeriodicPoint,
        scan: usize,
    ) -> f64 {
        for k in 0..=scan as isize {
            if x.symbol_at(k) != y.symbol_at(k) || x.symbol_at(-k) != y.symbol_at(-k) {
                return self.base.powi(-(k as i32));
            }
        }
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allowed_at_schedules() {
        let sched = DigitSetSchedule::new(
            2,
            vec![SymbolSet::singleton(1)],
            vec![SymbolSet::full(2), SymbolSet::singleton(0)],
            TwoSidedRule::Free,
        )
        .unwrap();
        assert_eq!(sched.allowed_at(0), SymbolSet::singleton(1));
        assert_eq!(sched.allowed_at(1), SymbolSet::full(2));
        assert_eq!(sched.allowed_at(2), SymbolSet::singleton(0));
        assert_eq!(sched.allowed_at(3), SymbolSet::full(2));
        assert_eq!(sched.allowed_at(-5), SymbolSet::full(2));
    }

    #[test]
    fn two_sided_rules() {
        let mirrored = DigitSetSchedule::new(
            2,
            vec![SymbolSet::singleton(1)],
            vec![SymbolSet::singleton(0)],
            TwoSidedRule::Mirrored,
        )
        .unwrap();
        assert_eq!(mirrored.allowed_at(-1), SymbolSet::singleton(1));
        assert_eq!(mirrored.allowed_at(-2), SymbolSet::singleton(0));

        let pinned = DigitSetSchedule::new(
            2,
            vec![],
            vec![SymbolSet::full(2)],
            TwoSidedRule::PinnedToWord(Word::from([1, 0])),
        )
        .unwrap();
        assert_eq!(pinned.allowed_at(-1), SymbolSet::singleton(0));
        assert_eq!(pinned.allowed_at(-2), SymbolSet::singleton(1));
        assert_eq!(pinned.allowed_at(-3), SymbolSet::full(2));
    }

    #[test]
    fn empty_set_rejected() {
        let err = DigitSetSchedule::new(2, vec![], vec![SymbolSet::empty()], TwoSidedRule::Free);
        assert!(matches!(err, Err(ScheduleError::EmptyAllowedSet(_))));
    }

    #[test]
    fn subset_relation() {
        let big = DigitSetSchedule::free(2);
        let small =
            DigitSetSchedule::periodic(2, vec![SymbolSet::full(2), SymbolSet::singleton(0)])
                .unwrap();
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
        assert!(small.is_subset_of(&small));
    }

    #[test]
    fn shifted_rotates_period() {
        let sched = DigitSetSchedule::new(
            2,
            vec![SymbolSet::singleton(1)],
            vec![SymbolSet::full(2), SymbolSet::singleton(0)],
            TwoSidedRule::Free,
        )
        .unwrap();
        let s1 = sched.shifted(1);
        assert_eq!(s1.preperiod_len(), 0);
        assert_eq!(s1.allowed_at(0), SymbolSet::full(2));
        assert_eq!(s1.allowed_at(1), SymbolSet::singleton(0));
        let s2 = sched.shifted(2);
        assert_eq!(s2.allowed_at(0), SymbolSet::singleton(0));
        assert_eq!(s2.allowed_at(1), SymbolSet::full(2));
    }

    #[test]
    fn point_coordinates() {
        let x = EventuallyPeriodicPoint::new(Word::from([1]), Word::from([0, 1]));
        assert_eq!(x.symbol_at(0), 1);
        assert_eq!(x.symbol_at(1), 0);
        assert_eq!(x.symbol_at(2), 1);
        assert_eq!(x.symbol_at(3), 0);
        // Left tail is the periodic pattern anchored at the preperiod end:
        // x_{-1} = period[(-1 - p) mod q] = period[0].
        assert_eq!(x.symbol_at(-1), 0);
        assert_eq!(x.symbol_at(-2), 1);
    }

    #[test]
    fn window_radius_brackets() {
        let d = MetricParams::default();
        assert_eq!(d.window_radius(0.6), Some(0));
        assert_eq!(d.window_radius(0.5), Some(0));
        assert_eq!(d.window_radius(0.25), Some(1));
        assert_eq!(d.window_radius(0.26), Some(1));
        assert_eq!(d.window_radius(0.125), Some(2));
        assert_eq!(d.window_radius(1.0), None);
        let d3 = MetricParams::new(3.0);
        assert_eq!(d3.window_radius(1.0 / 3.0), Some(0));
        assert_eq!(d3.window_radius(1.0 / 9.0), Some(1));
    }

    #[test]
    fn point_distance() {
        let d = MetricParams::default();
        let x = EventuallyPeriodicPoint::constant(0);
        let y = EventuallyPeriodicPoint::new(Word::from([1]), Word::from([0]));
        assert_eq!(d.distance(&x, &x, 32), 0.0);
        assert_eq!(d.distance(&x, &y, 32), 1.0); // differ at coordinate 0
    }
}
