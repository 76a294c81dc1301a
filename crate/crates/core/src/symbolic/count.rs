//! Exact word counting over windows, with schedule constraints.
//!
//! Counts are exact big integers up to window length `EXACT_LIMIT`; longer
//! windows fall back to log-domain floating point and are flagged
//! approximate. Entropy slopes are always fitted inside the exact range.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::schedule::DigitSetSchedule;
use super::shift::SubshiftSpec;
use super::word::{Symbol, SymbolSet, Word};

/// Window length up to which counting is exact big-integer arithmetic.
pub const EXACT_LIMIT: usize = 64;

/// Hard cap on window length, to keep runs desk-scale.
pub const MAX_WINDOW: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountError {
    #[error("schedule alphabet {schedule} does not match shift alphabet {shift}")]
    IncompatibleAlphabet { schedule: usize, shift: usize },
    #[error("window length {0} exceeds the counting limit {MAX_WINDOW}")]
    WindowTooLong(usize),
}

/// An exact or log-domain word count.
#[derive(Debug, Clone, PartialEq)]
pub enum WordCount {
    Exact(BigUint),
    /// Natural log of the count; `-inf` encodes zero.
    LogApprox(f64),
}

impl WordCount {
    pub fn zero() -> Self {
        WordCount::Exact(BigUint::zero())
    }

    pub fn one() -> Self {
        WordCount::Exact(BigUint::from(1u32))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            WordCount::Exact(b) => b.is_zero(),
            WordCount::LogApprox(l) => *l == f64::NEG_INFINITY,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, WordCount::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            WordCount::Exact(b) => Some(b),
            WordCount::LogApprox(_) => None,
        }
    }

    /// Natural log of the count (`-inf` for zero).
    pub fn ln(&self) -> f64 {
        match self {
            WordCount::Exact(b) => ln_biguint(b),
            WordCount::LogApprox(l) => *l,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            WordCount::Exact(b) => b.to_f64().unwrap_or(f64::INFINITY),
            WordCount::LogApprox(l) => l.exp(),
        }
    }
}

impl std::fmt::Display for WordCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WordCount::Exact(b) => write!(f, "{b}"),
            WordCount::LogApprox(l) => write!(f, "~e^{l:.6}"),
        }
    }
}

/// Natural log of a big integer, exact to f64 precision at any size.
pub fn ln_biguint(b: &BigUint) -> f64 {
    if b.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = b.bits();
    if bits <= 900 {
        b.to_f64().expect("fits f64 range").ln()
    } else {
        let shift = bits - 64;
        let top = (b >> shift).to_f64().expect("64-bit mantissa");
        top.ln() + (shift as f64) * std::f64::consts::LN_2
    }
}

/// Number of admissible `n`-words at coordinates `0..n` consistent with the
/// schedule, exactly. An empty intersection is count 0, not an error.
pub fn count_words(
    shift: &SubshiftSpec,
    constraint: Option<&DigitSetSchedule>,
    n: usize,
) -> Result<WordCount, CountError> {
    if let Some(sched) = constraint {
        if sched.alphabet_size() != shift.alphabet_size() {
            return Err(CountError::IncompatibleAlphabet {
                schedule: sched.alphabet_size(),
                shift: shift.alphabet_size(),
            });
        }
    }
    let full = shift.full_symbol_set();
    count_window(
        shift,
        &|i| match constraint {
            Some(s) => s.allowed_at(i),
            None => full,
        },
        0,
        n,
    )
}

/// Number of distinct admissible patterns on the coordinate window
/// `start..start+len`, under a per-coordinate allowed-set lookup.
///
/// A pattern is counted when it occurs in some point of the shift, i.e. it
/// avoids forbidden factors and extends bi-infinitely.
pub fn count_window(
    shift: &SubshiftSpec,
    allowed: &dyn Fn(isize) -> SymbolSet,
    start: isize,
    len: usize,
) -> Result<WordCount, CountError> {
    if len > MAX_WINDOW {
        return Err(CountError::WindowTooLong(len));
    }
    if len == 0 {
        return Ok(WordCount::one());
    }
    let clen = shift.memory() - 1;
    if len < clen {
        // Window shorter than the constraint memory: enumerate directly.
        let mut count: u64 = 0;
        let mut buf = vec![0 as Symbol; len];
        enumerate_short(shift, allowed, start, &mut buf, 0, &mut count);
        return Ok(WordCount::Exact(BigUint::from(count)));
    }
    if len <= EXACT_LIMIT {
        Ok(WordCount::Exact(count_exact(shift, allowed, start, len)))
    } else {
        Ok(WordCount::LogApprox(count_log(shift, allowed, start, len)))
    }
}

/// Number of admissible patterns on a window satisfying at least one of
/// the given schedules: exact union counting via a liveness bitmask per
/// schedule (at most 16 schedules).
pub fn count_union_window(
    shift: &SubshiftSpec,
    subsets: &[&DigitSetSchedule],
    start: isize,
    len: usize,
) -> Result<WordCount, CountError> {
    assert!(!subsets.is_empty() && subsets.len() <= 16);
    for s in subsets {
        if s.alphabet_size() != shift.alphabet_size() {
            return Err(CountError::IncompatibleAlphabet {
                schedule: s.alphabet_size(),
                shift: shift.alphabet_size(),
            });
        }
    }
    if len > MAX_WINDOW {
        return Err(CountError::WindowTooLong(len));
    }
    if len == 0 {
        return Ok(WordCount::one());
    }
    let full_mask: u16 = if subsets.len() == 16 {
        u16::MAX
    } else {
        (1u16 << subsets.len()) - 1
    };
    let dfa = shift.dfa();
    let clen = shift.memory() - 1;
    // Frontier over (context word, satisfied-mask); masks only shrink.
    let mut frontier: HashMap<(Word, u16), BigUint> = HashMap::new();
    frontier.insert((Word::empty(), full_mask), BigUint::from(1u32));
    for t in 0..len {
        let pos = start + t as isize;
        let mut next: HashMap<(Word, u16), BigUint> = HashMap::new();
        for ((w, mask), c) in &frontier {
            for s in 0..shift.alphabet_size() as u16 {
                let sym = s as Symbol;
                let mut new_mask = 0u16;
                for (i, sched) in subsets.iter().enumerate() {
                    if mask & (1 << i) != 0 && sched.allowed_at(pos).contains(sym) {
                        new_mask |= 1 << i;
                    }
                }
                if new_mask == 0 {
                    continue;
                }
                let mut ext = w.0.clone();
                ext.push(sym);
                if !prefix_admissible(shift, &ext) {
                    continue;
                }
                if ext.len() >= clen {
                    let key = Word(ext[ext.len() - clen..].to_vec());
                    match dfa.index.get(&key) {
                        Some(&i)
                            if dfa.forward_live[i]
                                && (ext.len() > clen || dfa.backward_live[i]) => {}
                        _ => continue,
                    }
                }
                let keep = ext.len().min(clen);
                let ctx = Word(ext[ext.len() - keep..].to_vec());
                *next
                    .entry((ctx, new_mask))
                    .or_insert_with(BigUint::zero) += c;
            }
        }
        frontier = next;
    }
    if len < clen {
        // Contexts are still whole words; liveness has not been checked.
        return Ok(WordCount::Exact(
            frontier
                .iter()
                .filter(|((w, _), _)| shift.word_occurs(w))
                .map(|(_, c)| c.clone())
                .sum(),
        ));
    }
    Ok(WordCount::Exact(frontier.values().sum()))
}

/// Materialize the admissible patterns on a window, up to `limit` of them.
/// Returns `None` when the limit would be exceeded.
pub fn enumerate_window_words(
    shift: &SubshiftSpec,
    allowed: &dyn Fn(isize) -> SymbolSet,
    start: isize,
    len: usize,
    limit: usize,
) -> Option<Vec<Word>> {
    fn rec(
        shift: &SubshiftSpec,
        allowed: &dyn Fn(isize) -> SymbolSet,
        start: isize,
        buf: &mut Vec<Symbol>,
        pos: usize,
        out: &mut Vec<Word>,
        limit: usize,
    ) -> bool {
        if pos == buf.len() {
            let w = Word(buf.clone());
            if shift.word_occurs(&w) {
                if out.len() == limit {
                    return false;
                }
                out.push(w);
            }
            return true;
        }
        // Prune subtrees that already contain a forbidden factor.
        if pos >= 1 && !shift.word_occurs_prefix(&buf[..pos]) {
            return true;
        }
        for s in allowed(start + pos as isize).iter() {
            buf[pos] = s;
            if !rec(shift, allowed, start, buf, pos + 1, out, limit) {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    let mut buf = vec![0 as Symbol; len];
    if rec(shift, allowed, start, &mut buf, 0, &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

fn enumerate_short(
    shift: &SubshiftSpec,
    allowed: &dyn Fn(isize) -> SymbolSet,
    start: isize,
    buf: &mut Vec<Symbol>,
    pos: usize,
    count: &mut u64,
) {
    if pos == buf.len() {
        if shift.word_occurs(&Word(buf.clone())) {
            *count += 1;
        }
        return;
    }
    for s in allowed(start + pos as isize).iter() {
        buf[pos] = s;
        enumerate_short(shift, allowed, start, buf, pos + 1, count);
    }
}

fn count_exact(
    shift: &SubshiftSpec,
    allowed: &dyn Fn(isize) -> SymbolSet,
    start: isize,
    len: usize,
) -> BigUint {
    let dfa = shift.dfa();
    let clen = shift.memory() - 1;

    // Build the full-context frontier over the first memory-1 coordinates.
    let mut partial: HashMap<Word, BigUint> = HashMap::new();
    partial.insert(Word::empty(), BigUint::from(1u32));
    for t in 0..clen {
        let sets = allowed(start + t as isize);
        let mut next: HashMap<Word, BigUint> = HashMap::new();
        for (w, c) in partial {
            for s in sets.iter() {
                let mut ext = w.0.clone();
                ext.push(s);
                if prefix_admissible(shift, &ext) {
                    *next.entry(Word(ext)).or_insert_with(BigUint::zero) += &c;
                }
            }
        }
        partial = next;
    }

    let mut counts = vec![BigUint::zero(); dfa.num_states()];
    for (w, c) in partial {
        if let Some(&i) = dfa.index.get(&w) {
            if dfa.backward_live[i] {
                counts[i] = c;
            }
        }
    }

    for t in clen..len {
        let sets = allowed(start + t as isize);
        let mut next = vec![BigUint::zero(); dfa.num_states()];
        for (i, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for s in sets.iter() {
                if let Some(j) = dfa.step[i][s as usize] {
                    next[j] += c;
                }
            }
        }
        counts = next;
    }

    counts
        .iter()
        .enumerate()
        .filter(|(i, _)| dfa.forward_live[*i])
        .map(|(_, c)| c.clone())
        .sum()
}

fn count_log(
    shift: &SubshiftSpec,
    allowed: &dyn Fn(isize) -> SymbolSet,
    start: isize,
    len: usize,
) -> f64 {
    let dfa = shift.dfa();
    let clen = shift.memory() - 1;

    let mut partial: HashMap<Word, f64> = HashMap::new();
    partial.insert(Word::empty(), 0.0);
    for t in 0..clen {
        let sets = allowed(start + t as isize);
        let mut next: HashMap<Word, f64> = HashMap::new();
        for (w, c) in partial {
            for s in sets.iter() {
                let mut ext = w.0.clone();
                ext.push(s);
                if prefix_admissible(shift, &ext) {
                    let e = next.entry(Word(ext)).or_insert(f64::NEG_INFINITY);
                    *e = log_add(*e, c);
                }
            }
        }
        partial = next;
    }

    let mut counts = vec![f64::NEG_INFINITY; dfa.num_states()];
    for (w, c) in partial {
        if let Some(&i) = dfa.index.get(&w) {
            if dfa.backward_live[i] {
                counts[i] = c;
            }
        }
    }

    for t in clen..len {
        let sets = allowed(start + t as isize);
        let mut next = vec![f64::NEG_INFINITY; dfa.num_states()];
        for (i, &c) in counts.iter().enumerate() {
            if c == f64::NEG_INFINITY {
                continue;
            }
            for s in sets.iter() {
                if let Some(j) = dfa.step[i][s as usize] {
                    next[j] = log_add(next[j], c);
                }
            }
        }
        counts = next;
    }

    counts
        .iter()
        .enumerate()
        .filter(|(i, _)| dfa.forward_live[*i])
        .fold(f64::NEG_INFINITY, |acc, (_, &c)| log_add(acc, c))
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

fn prefix_admissible(shift: &SubshiftSpec, w: &[Symbol]) -> bool {
    // Factor check only; liveness is enforced once the context is full.
    match shift.constraint() {
        super::shift::ShiftConstraint::Full => true,
        super::shift::ShiftConstraint::Forbidden(words) => !words.iter().any(|f| {
            let fl = f.len();
            fl <= w.len() && w.windows(fl).any(|win| win == f.symbols())
        }),
        super::shift::ShiftConstraint::Matrix(rows) => {
            w.windows(2).all(|p| rows[p[0] as usize][p[1] as usize])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::schedule::TwoSidedRule;

    fn big(n: u64) -> WordCount {
        WordCount::Exact(BigUint::from(n))
    }

    /// Brute-force oracle: enumerate all alphabet^len windows and keep the
    /// admissible, schedule-consistent ones.
    fn brute_count(
        shift: &SubshiftSpec,
        sched: Option<&DigitSetSchedule>,
        start: isize,
        len: usize,
    ) -> u64 {
        let m = shift.alphabet_size();
        let mut count = 0u64;
        let mut w = vec![0 as Symbol; len];
        loop {
            let ok_sched = (0..len).all(|t| match sched {
                Some(s) => s.allowed_at(start + t as isize).contains(w[t]),
                None => true,
            });
            if ok_sched && shift.word_occurs(&Word(w.clone())) {
                count += 1;
            }
            // Odometer step.
            let mut i = 0;
            loop {
                if i == len {
                    return count;
                }
                w[i] += 1;
                if (w[i] as usize) < m {
                    break;
                }
                w[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn full_2_shift_n3_is_8() {
        let shift = SubshiftSpec::full_shift(2);
        assert_eq!(count_words(&shift, None, 3).unwrap(), big(8));
    }

    #[test]
    fn golden_mean_n4_is_8() {
        // Oracle: brute-force enumeration of {0,1}^4 minus words containing
        // "11"; cross-checked against the Fibonacci recurrence.
        let shift = SubshiftSpec::golden_mean();
        assert_eq!(brute_count(&shift, None, 0, 4), 8);
        assert_eq!(count_words(&shift, None, 4).unwrap(), big(8));

        // Fibonacci oracle: counts satisfy c(n) = c(n-1) + c(n-2).
        let mut prev = count_words(&shift, None, 1).unwrap().to_f64();
        let mut cur = count_words(&shift, None, 2).unwrap().to_f64();
        for n in 3..=20 {
            let next = count_words(&shift, None, n).unwrap().to_f64();
            assert_eq!(next, prev + cur, "Fibonacci recurrence at n={n}");
            prev = cur;
            cur = next;
        }
    }

    #[test]
    fn period_2_schedule_counts() {
        // Schedule (free, {0}): 2^ceil(n/2) words by direct enumeration.
        let shift = SubshiftSpec::full_shift(2);
        let sched = DigitSetSchedule::periodic(
            2,
            vec![SymbolSet::full(2), SymbolSet::singleton(0)],
        )
        .unwrap();
        assert_eq!(count_words(&shift, Some(&sched), 4).unwrap(), big(4));
        for n in 1usize..=10 {
            let expect = 1u64 << n.div_ceil(2);
            assert_eq!(brute_count(&shift, Some(&sched), 0, n), expect);
            assert_eq!(count_words(&shift, Some(&sched), n).unwrap(), big(expect));
        }
    }

    #[test]
    fn incompatible_alphabet_is_error() {
        let shift = SubshiftSpec::full_shift(2);
        let sched = DigitSetSchedule::free(3);
        assert!(matches!(
            count_words(&shift, Some(&sched), 3),
            Err(CountError::IncompatibleAlphabet { .. })
        ));
    }

    #[test]
    fn empty_intersection_counts_zero() {
        // Golden mean with both coordinates pinned to 1: no admissible word.
        let shift = SubshiftSpec::golden_mean();
        let sched =
            DigitSetSchedule::periodic(2, vec![SymbolSet::singleton(1)]).unwrap();
        assert_eq!(count_words(&shift, Some(&sched), 2).unwrap(), big(0));
        assert_eq!(sched.first_empty_depth(&shift, 8), Some(2));
    }

    #[test]
    fn windows_with_negative_start() {
        let shift = SubshiftSpec::golden_mean();
        let sched = DigitSetSchedule::new(
            2,
            vec![],
            vec![SymbolSet::full(2)],
            TwoSidedRule::PinnedToWord(Word::from([0, 1])),
        )
        .unwrap();
        for (start, len) in [(-3isize, 7usize), (-2, 5), (-1, 4)] {
            let got = count_window(&shift, &|i| sched.allowed_at(i), start, len).unwrap();
            let want = brute_count(&shift, Some(&sched), start, len);
            assert_eq!(got, big(want), "window start {start} len {len}");
        }
    }

    #[test]
    fn log_domain_beyond_exact_limit() {
        let shift = SubshiftSpec::full_shift(2);
        let n = EXACT_LIMIT + 10;
        let count = count_words(&shift, None, n).unwrap();
        assert!(!count.is_exact());
        assert!((count.ln() - n as f64 * 2.0f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn subadditivity_of_language_growth() {
        let shift = SubshiftSpec::golden_mean();
        let m = BigUint::from(shift.alphabet_size());
        let mut prev = count_words(&shift, None, 1).unwrap();
        for n in 2..=16 {
            let cur = count_words(&shift, None, n).unwrap();
            let bound = prev.as_exact().unwrap() * &m;
            assert!(cur.as_exact().unwrap() <= &bound);
            prev = cur;
        }
    }

    #[test]
    fn ln_biguint_large() {
        let big = BigUint::from(2u32).pow(5000);
        assert!((ln_biguint(&big) - 5000.0 * std::f64::consts::LN_2).abs() < 1e-6);
    }
}
