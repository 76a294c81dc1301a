//! Sliding block codes between subshifts, with exact image-word and
//! fiber-word counting.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use super::count::WordCount;
use super::schedule::{DigitSetSchedule, EventuallyPeriodicPoint};
use super::shift::SubshiftSpec;
use super::word::{Symbol, SymbolSet, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlockCodeError {
    #[error("local rule missing admissible window {0}")]
    RuleNotTotal(Word),
    #[error("image of window {window} is not admissible in the target")]
    ImageNotAdmissible { window: Word },
    #[error("word of length {len} is shorter than the window {window}")]
    WordTooShort { len: usize, window: usize },
    #[error("word {0} is not admissible in the source")]
    InadmissibleWord(Word),
}

/// A sliding block code `x -> y`, `y_i = rule(x[i-r..i+r])`.
#[derive(Debug, Clone)]
pub struct BlockCode {
    window_radius: usize,
    source: SubshiftSpec,
    target: SubshiftSpec,
    rule: HashMap<Word, Symbol>,
}

impl BlockCode {
    /// Build a code from a local rule, checking totality on admissible
    /// windows and admissibility of image words in the target.
    pub fn new(
        source: SubshiftSpec,
        target: SubshiftSpec,
        window_radius: usize,
        rule: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self, BlockCodeError> {
        let width = 2 * window_radius + 1;
        let mut table = HashMap::new();
        for w in source.enumerate_words(width) {
            table.insert(w.clone(), rule(w.symbols()));
        }
        let code = BlockCode {
            window_radius,
            source,
            target,
            rule: table,
        };
        code.check_images()?;
        Ok(code)
    }

    /// The identity code on a shift.
    pub fn identity(shift: SubshiftSpec) -> Self {
        BlockCode::new(shift.clone(), shift, 0, |w| w[0]).expect("identity code")
    }

    /// Radius-0 code applying a symbol map.
    pub fn pointwise(
        source: SubshiftSpec,
        target: SubshiftSpec,
        map: impl Fn(Symbol) -> Symbol,
    ) -> Result<Self, BlockCodeError> {
        BlockCode::new(source, target, 0, |w| map(w[0]))
    }

    fn check_images(&self) -> Result<(), BlockCodeError> {
        let width = 2 * self.window_radius + 1;
        // Totality, then factor admissibility of images long enough to
        // exercise the target constraints.
        for w in self.source.enumerate_words(width) {
            if !self.rule.contains_key(&w) {
                return Err(BlockCodeError::RuleNotTotal(w));
            }
        }
        let probe = width - 1 + self.target.memory().max(1);
        for w in self.source.enumerate_words(probe) {
            let image = self.apply_unchecked(&w);
            if !self.target.word_occurs(&image) {
                return Err(BlockCodeError::ImageNotAdmissible { window: w });
            }
        }
        Ok(())
    }

    pub fn window_radius(&self) -> usize {
        self.window_radius
    }

    pub fn source(&self) -> &SubshiftSpec {
        &self.source
    }

    pub fn target(&self) -> &SubshiftSpec {
        &self.target
    }

    /// Image of an admissible word; length shrinks by `2 * radius`.
    pub fn apply(&self, w: &Word) -> Result<Word, BlockCodeError> {
        let width = 2 * self.window_radius + 1;
        if w.len() < width {
            return Err(BlockCodeError::WordTooShort {
                len: w.len(),
                window: width,
            });
        }
        if !self.source.word_occurs(w) {
            return Err(BlockCodeError::InadmissibleWord(w.clone()));
        }
        Ok(self.apply_unchecked(w))
    }

    fn apply_unchecked(&self, w: &Word) -> Word {
        let width = 2 * self.window_radius + 1;
        let out: Vec<Symbol> = w
            .symbols()
            .windows(width)
            .map(|win| self.rule[&Word(win.to_vec())])
            .collect();
        Word(out)
    }

    /// Image of an eventually periodic point (for factor-map experiments);
    /// the image has the same eventual period.
    pub fn apply_point(&self, x: &EventuallyPeriodicPoint) -> EventuallyPeriodicPoint {
        let r = self.window_radius as isize;
        let p = x.preperiod.len();
        let q = x.period.len();
        let sym = |i: isize| -> Symbol {
            let win = x.window(i - r, 2 * self.window_radius + 1);
            self.rule[&win]
        };
        let pre: Vec<Symbol> = (0..p as isize).map(sym).collect();
        let per: Vec<Symbol> = (p as isize..(p + q) as isize).map(sym).collect();
        EventuallyPeriodicPoint::new(Word(pre), Word(per))
    }
}

/// NFA state for code-counting walks: the last `max(memory-1, 2r)` source
/// symbols, which is enough context for both factor checks and rule windows.
type CodeState = Word;

struct CodeWalk<'a> {
    code: &'a BlockCode,
    ctx_len: usize,
}

impl<'a> CodeWalk<'a> {
    fn new(code: &'a BlockCode) -> Self {
        let ctx_len = (code.source.memory() - 1).max(2 * code.window_radius);
        CodeWalk { code, ctx_len }
    }

    /// Extend `state` by source symbol `s`, where `global_after` is the
    /// number of source symbols placed including `s`. `None` when the factor
    /// is inadmissible or the context fails the liveness needed for the
    /// word to belong to the language.
    fn extend(
        &self,
        state: &CodeState,
        s: Symbol,
        global_after: usize,
    ) -> Option<(CodeState, Option<Symbol>)> {
        let mut ext = state.0.clone();
        ext.push(s);
        if !factor_ok(&self.code.source, &ext) {
            return None;
        }
        let clen = self.code.source.memory() - 1;
        if global_after >= clen {
            let ctx = Word(ext[ext.len() - clen..].to_vec());
            let dfa = self.code.source.dfa();
            match dfa.index.get(&ctx) {
                Some(&i) => {
                    if !dfa.forward_live[i] {
                        return None;
                    }
                    // First full context also carries the infinite past.
                    if global_after == clen && !dfa.backward_live[i] {
                        return None;
                    }
                }
                None => return None,
            }
        }
        let width = 2 * self.code.window_radius + 1;
        let emitted = if global_after >= width {
            let win = Word(ext[ext.len() - width..].to_vec());
            Some(self.code.rule.get(&win).copied()?)
        } else {
            None
        };
        let keep = ext.len().min(self.ctx_len);
        Some((Word(ext[ext.len() - keep..].to_vec()), emitted))
    }
}

fn factor_ok(shift: &SubshiftSpec, w: &[Symbol]) -> bool {
    use super::shift::ShiftConstraint;
    match shift.constraint() {
        ShiftConstraint::Full => true,
        ShiftConstraint::Forbidden(words) => !words.iter().any(|f| {
            let fl = f.len();
            fl <= w.len() && w.windows(fl).any(|win| win == f.symbols())
        }),
        ShiftConstraint::Matrix(rows) => {
            w.windows(2).all(|p| rows[p[0] as usize][p[1] as usize])
        }
    }
}

/// Number of distinct image `n`-words over source points satisfying the
/// schedule, by on-the-fly determinization of the code automaton.
///
/// The image coordinates `0..n` read the source window `-r..n+r`; schedule
/// constraints apply to source coordinates.
pub fn count_image_words(
    code: &BlockCode,
    constraint: Option<&DigitSetSchedule>,
    n: usize,
) -> WordCount {
    let walk = CodeWalk::new(code);
    let r = code.window_radius as isize;
    let full = code.source.full_symbol_set();
    let allowed = |i: isize| -> SymbolSet {
        match constraint {
            Some(s) => s.allowed_at(i),
            None => full,
        }
    };

    // Lead-in: source positions -r..r, no output emitted yet. All reachable
    // code states merge into the starting subset.
    let mut subset: Vec<CodeState> = vec![Word::empty()];
    for p in -r..r {
        let global_after = (p + r + 1) as usize;
        let mut next: Vec<CodeState> = Vec::new();
        for st in &subset {
            for s in allowed(p).iter() {
                if let Some((nst, emitted)) = walk.extend(st, s, global_after) {
                    debug_assert!(emitted.is_none());
                    if !next.contains(&nst) {
                        next.push(nst);
                    }
                }
            }
        }
        subset = next;
    }
    subset.sort();

    // Determinized walk over output positions.
    let mut frontier: BTreeMap<Vec<CodeState>, BigUint> = BTreeMap::new();
    if !subset.is_empty() {
        frontier.insert(subset, BigUint::from(1u32));
    }
    for i in 0..n {
        let p = i as isize + r;
        let global_after = (p + r + 1) as usize;
        let mut next: BTreeMap<Vec<CodeState>, BigUint> = BTreeMap::new();
        for (states, c) in &frontier {
            let mut by_output: BTreeMap<Symbol, Vec<CodeState>> = BTreeMap::new();
            for st in states {
                for s in allowed(p).iter() {
                    if let Some((nst, Some(y))) = walk.extend(st, s, global_after) {
                        let bucket = by_output.entry(y).or_default();
                        if !bucket.contains(&nst) {
                            bucket.push(nst);
                        }
                    }
                }
            }
            for (_, mut bucket) in by_output {
                bucket.sort();
                *next.entry(bucket).or_insert_with(BigUint::zero) += c;
            }
        }
        frontier = next;
    }
    WordCount::Exact(frontier.values().sum())
}

/// Number of source words of length `n + 2r` whose image is the window
/// `y[0..n]` of the given target point. This is the fiber word count used
/// by relative entropy estimates.
pub fn count_fiber_words(code: &BlockCode, y: &EventuallyPeriodicPoint, n: usize) -> WordCount {
    let walk = CodeWalk::new(code);
    let r = code.window_radius as isize;
    let full = code.source.full_symbol_set();

    let mut frontier: HashMap<CodeState, BigUint> = HashMap::new();
    frontier.insert(Word::empty(), BigUint::from(1u32));
    for p in -r..n as isize + r {
        let global_after = (p + r + 1) as usize;
        let expect = if p >= r { Some(y.symbol_at(p - r)) } else { None };
        let mut next: HashMap<CodeState, BigUint> = HashMap::new();
        for (st, c) in &frontier {
            for s in full.iter() {
                if let Some((nst, emitted)) = walk.extend(st, s, global_after) {
                    if emitted == expect {
                        *next.entry(nst).or_insert_with(BigUint::zero) += c;
                    }
                }
            }
        }
        frontier = next;
    }
    WordCount::Exact(frontier.values().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_code_applies() {
        let code = BlockCode::identity(SubshiftSpec::full_shift(2));
        let w = Word::from([0, 1, 0, 1]);
        assert_eq!(code.apply(&w).unwrap(), w);
    }

    #[test]
    fn pairing_code_mod2() {
        let code = BlockCode::pointwise(
            SubshiftSpec::full_shift(4),
            SubshiftSpec::full_shift(2),
            |s| s % 2,
        )
        .unwrap();
        assert_eq!(
            code.apply(&Word::from([0, 1, 2, 3])).unwrap(),
            Word::from([0, 1, 0, 1])
        );
    }

    #[test]
    fn xor_code_radius_1() {
        // y_i = x_{i-1} xor x_{i+1}; "010" maps to the single window value 0.
        let shift = SubshiftSpec::full_shift(2);
        let code = BlockCode::new(shift.clone(), shift, 1, |w| w[0] ^ w[2]).unwrap();
        assert_eq!(code.apply(&Word::from([0, 1, 0])).unwrap(), Word::from([0]));
        assert_eq!(
            code.apply(&Word::from([0, 1, 1, 0])).unwrap(),
            Word::from([1, 1])
        );
    }

    #[test]
    fn too_short_and_inadmissible_errors() {
        let code = BlockCode::new(
            SubshiftSpec::golden_mean(),
            SubshiftSpec::golden_mean(),
            1,
            |w| w[1],
        )
        .unwrap();
        assert!(matches!(
            code.apply(&Word::from([0])),
            Err(BlockCodeError::WordTooShort { .. })
        ));
        assert!(matches!(
            code.apply(&Word::from([1, 1, 0])),
            Err(BlockCodeError::InadmissibleWord(_))
        ));
    }

    #[test]
    fn image_admissibility_enforced() {
        // A rule that produces a forbidden 2-block in the target must fail:
        // map everything to 1 while the target forbids "11".
        let err = BlockCode::pointwise(
            SubshiftSpec::full_shift(2),
            SubshiftSpec::golden_mean(),
            |_| 1,
        );
        assert!(matches!(err, Err(BlockCodeError::ImageNotAdmissible { .. })));
    }

    #[test]
    fn image_word_counts() {
        // Identity: image counts equal source counts.
        let id = BlockCode::identity(SubshiftSpec::golden_mean());
        for n in 1..=8 {
            let img = count_image_words(&id, None, n);
            let src = super::super::count::count_words(id.source(), None, n).unwrap();
            assert_eq!(img, src);
        }
        // Pairing 4 -> 2: every binary word is an image.
        let pairing = BlockCode::pointwise(
            SubshiftSpec::full_shift(4),
            SubshiftSpec::full_shift(2),
            |s| s % 2,
        )
        .unwrap();
        for n in 1..=6 {
            assert_eq!(
                count_image_words(&pairing, None, n).to_f64(),
                (1u64 << n) as f64
            );
        }
    }

    #[test]
    fn fiber_word_counts() {
        // Pairing 4 -> 2: each output word has exactly 2^n preimage words.
        let pairing = BlockCode::pointwise(
            SubshiftSpec::full_shift(4),
            SubshiftSpec::full_shift(2),
            |s| s % 2,
        )
        .unwrap();
        let y = EventuallyPeriodicPoint::constant(0);
        for n in 1..=8 {
            assert_eq!(
                count_fiber_words(&pairing, &y, n).to_f64(),
                (1u64 << n) as f64
            );
        }
        // Identity on golden mean: each fiber window is a single word.
        let id = BlockCode::identity(SubshiftSpec::golden_mean());
        let y = EventuallyPeriodicPoint::new(Word::empty(), Word::from([0, 1]));
        for n in 1..=8 {
            assert_eq!(count_fiber_words(&id, &y, n).to_f64(), 1.0);
        }
    }

    #[test]
    fn apply_point_periodicity() {
        let pairing = BlockCode::pointwise(
            SubshiftSpec::full_shift(4),
            SubshiftSpec::full_shift(2),
            |s| s % 2,
        )
        .unwrap();
        let x = EventuallyPeriodicPoint::new(Word::from([3]), Word::from([0, 1]));
        let y = pairing.apply_point(&x);
        assert_eq!(y.symbol_at(0), 1);
        assert_eq!(y.symbol_at(1), 0);
        assert_eq!(y.symbol_at(2), 1);
        assert_eq!(y.symbol_at(3), 0);
    }
}
