//! Subshifts of finite type and the context automaton that drives all
//! exact word counting.
//!
//! A subshift is described either by a finite list of forbidden words or by
//! a 0/1 transition matrix. Construction compiles the description into a
//! deterministic context automaton whose states are the admissible contexts
//! of length `memory - 1`, trimmed to the bi-extendable (live) part. The
//! automaton is what makes counting, spectral entropy, and the cover
//! machinery exact.

use std::collections::HashMap;

use petgraph::graph::DiGraph;
use thiserror::Error;

use super::word::{Symbol, SymbolSet, Word, MAX_ALPHABET};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShiftError {
    #[error("alphabet size {0} out of range 1..={MAX_ALPHABET}")]
    BadAlphabet(usize),
    #[error("forbidden word is empty")]
    EmptyForbiddenWord,
    #[error("forbidden word uses symbols outside the alphabet")]
    ForbiddenWordOutOfAlphabet,
    #[error("transition matrix is {rows}x{cols}, expected {expected}x{expected}")]
    BadMatrixShape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("the subshift language is empty")]
    EmptyLanguage,
}

/// How the subshift constraints were supplied.
#[derive(Debug, Clone, PartialEq)]
pub enum ShiftConstraint {
    /// No constraints: the full shift.
    Full,
    /// Finite list of forbidden words.
    Forbidden(Vec<Word>),
    /// 0/1 matrix: `matrix[a][b]` allows the 2-block `ab`.
    Matrix(Vec<Vec<bool>>),
}

/// A subshift of finite type over `{0, .., alphabet_size-1}`.
#[derive(Debug, Clone)]
pub struct SubshiftSpec {
    alphabet_size: usize,
    constraint: ShiftConstraint,
    memory: usize,
    dfa: ContextDfa,
}

/// Deterministic automaton over admissible contexts of length `memory - 1`.
///
/// `forward_live[s]` means an infinite admissible continuation exists from
/// `s`; `backward_live[s]` means `s` is reachable from a cycle, i.e. has an
/// infinite admissible past. Words of the shift language correspond to paths
/// whose first full context is backward-live and whose final context is
/// forward-live.
#[derive(Debug, Clone)]
pub struct ContextDfa {
    pub contexts: Vec<Word>,
    pub index: HashMap<Word, usize>,
    /// `step[state][symbol]` — successor context, if admissible.
    pub step: Vec<Vec<Option<usize>>>,
    pub forward_live: Vec<bool>,
    pub backward_live: Vec<bool>,
}

impl ContextDfa {
    pub fn num_states(&self) -> usize {
        self.contexts.len()
    }

    pub fn live(&self, s: usize) -> bool {
        self.forward_live[s] && self.backward_live[s]
    }
}

impl SubshiftSpec {
    /// Full shift on `m` symbols.
    pub fn full_shift(m: usize) -> Self {
        Self::new(m, ShiftConstraint::Full).expect("full shift is always valid")
    }

    /// Golden-mean shift: binary, `11` forbidden.
    pub fn golden_mean() -> Self {
        Self::from_forbidden(2, vec![Word::from([1, 1])]).expect("golden mean shift")
    }

    pub fn from_forbidden(m: usize, forbidden: Vec<Word>) -> Result<Self, ShiftError> {
        Self::new(m, ShiftConstraint::Forbidden(forbidden))
    }

    pub fn from_matrix(matrix: Vec<Vec<bool>>) -> Result<Self, ShiftError> {
        let m = matrix.len();
        Self::new(m, ShiftConstraint::Matrix(matrix))
    }

    pub fn new(m: usize, constraint: ShiftConstraint) -> Result<Self, ShiftError> {
        if m == 0 || m > MAX_ALPHABET {
            return Err(ShiftError::BadAlphabet(m));
        }
        let memory = match &constraint {
            ShiftConstraint::Full => 1,
            ShiftConstraint::Forbidden(words) => {
                for w in words {
                    if w.is_empty() {
                        return Err(ShiftError::EmptyForbiddenWord);
                    }
                    if !w.fits_alphabet(m) {
                        return Err(ShiftError::ForbiddenWordOutOfAlphabet);
                    }
                }
                words.iter().map(Word::len).max().unwrap_or(1).max(1)
            }
            ShiftConstraint::Matrix(rows) => {
                for row in rows {
                    if rows.len() != m || row.len() != m {
                        return Err(ShiftError::BadMatrixShape {
                            rows: rows.len(),
                            cols: row.len(),
                            expected: m,
                        });
                    }
                }
                if rows.is_empty() {
                    return Err(ShiftError::BadAlphabet(0));
                }
                2
            }
        };
        let dfa = build_dfa(m, &constraint, memory)?;
        Ok(SubshiftSpec {
            alphabet_size: m,
            constraint,
            memory,
            dfa,
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Block length of the defining constraints.
    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn constraint(&self) -> &ShiftConstraint {
        &self.constraint
    }

    pub fn dfa(&self) -> &ContextDfa {
        &self.dfa
    }

    pub fn full_symbol_set(&self) -> SymbolSet {
        SymbolSet::full(self.alphabet_size)
    }

    /// Does `w` occur in some point of the shift?
    ///
    /// Checks factor admissibility plus bi-extendability of the context
    /// states. Short words (below `memory - 1`) are checked by searching for
    /// an admissible completion.
    pub fn word_occurs(&self, w: &Word) -> bool {
        if !w.fits_alphabet(self.alphabet_size) {
            return false;
        }
        let need = self.memory.saturating_sub(1);
        if w.len() >= need {
            self.scan_word(w.symbols()).is_some()
        } else {
            // Try all left pads of length `need - |w|`; the scan then has a
            // full starting context.
            let pad = need - w.len();
            let mut buf = vec![0 as Symbol; pad + w.len()];
            buf[pad..].copy_from_slice(w.symbols());
            self.try_pads(&mut buf, 0, pad)
        }
    }

    /// Factor admissibility of a partial word, without liveness checks.
    /// Useful for pruning searches; weaker than [`Self::word_occurs`].
    pub fn word_occurs_prefix(&self, w: &[Symbol]) -> bool {
        is_factor_admissible(self.alphabet_size, &self.constraint, w)
    }

    fn try_pads(&self, buf: &mut [Symbol], pos: usize, pad: usize) -> bool {
        if pos == pad {
            return self.scan_word(buf).is_some();
        }
        for s in 0..self.alphabet_size as u16 {
            buf[pos] = s as Symbol;
            if self.try_pads(buf, pos + 1, pad) {
                return true;
            }
        }
        false
    }

    /// Walk the automaton along `w` (|w| >= memory-1). Returns the final
    /// state when `w` is a word of the language.
    fn scan_word(&self, w: &[Symbol]) -> Option<usize> {
        let need = self.memory.saturating_sub(1);
        let first: Word = Word(w[..need].to_vec());
        let mut state = *self.dfa.index.get(&first)?;
        if !self.dfa.backward_live[state] {
            return None;
        }
        for &s in &w[need..] {
            state = self.dfa.step[state][s as usize]?;
        }
        if self.dfa.forward_live[state] {
            Some(state)
        } else {
            None
        }
    }

    /// Non-overlapping `n`-block presentation: alphabet = admissible
    /// `n`-words, transitions = admissibility of the concatenation. Returns
    /// the blocked shift together with the block words in symbol order.
    pub fn block_power(&self, n: usize) -> Result<(SubshiftSpec, Vec<Word>), ShiftError> {
        // Pair admissibility of blocks captures all constraints only when
        // no forbidden word spans three blocks.
        assert!(n + 1 >= self.memory, "block length below constraint memory");
        let blocks = self.enumerate_words(n);
        if blocks.is_empty() {
            return Err(ShiftError::EmptyLanguage);
        }
        assert!(
            blocks.len() <= MAX_ALPHABET,
            "block alphabet {} too large",
            blocks.len()
        );
        let mut matrix = vec![vec![false; blocks.len()]; blocks.len()];
        for (i, u) in blocks.iter().enumerate() {
            for (j, v) in blocks.iter().enumerate() {
                let mut joined = u.0.clone();
                joined.extend_from_slice(v.symbols());
                matrix[i][j] = self.word_occurs(&Word(joined));
            }
        }
        Ok((SubshiftSpec::from_matrix(matrix)?, blocks))
    }

    /// All words of length `n` in the language, lexicographic. Intended for
    /// small `n` (oracle and blocking use).
    pub fn enumerate_words(&self, n: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut buf = vec![0 as Symbol; n];
        self.enumerate_rec(&mut buf, 0, &mut out);
        out
    }

    fn enumerate_rec(&self, buf: &mut Vec<Symbol>, pos: usize, out: &mut Vec<Word>) {
        if pos == buf.len() {
            let w = Word(buf.clone());
            if self.word_occurs(&w) {
                out.push(w);
            }
            return;
        }
        for s in 0..self.alphabet_size as u16 {
            buf[pos] = s as Symbol;
            self.enumerate_rec(buf, pos + 1, out);
        }
    }
}

fn is_factor_admissible(m: usize, constraint: &ShiftConstraint, w: &[Symbol]) -> bool {
    match constraint {
        ShiftConstraint::Full => true,
        ShiftConstraint::Forbidden(words) => !words.iter().any(|f| {
            let fl = f.len();
            fl <= w.len() && w.windows(fl).any(|win| win == f.symbols())
        }),
        ShiftConstraint::Matrix(rows) => w
            .windows(2)
            .all(|p| rows[p[0] as usize][p[1] as usize])
            && w.iter().all(|&s| (s as usize) < m),
    }
}

fn build_dfa(m: usize, constraint: &ShiftConstraint, memory: usize) -> Result<ContextDfa, ShiftError> {
    let clen = memory - 1;
    // Enumerate admissible contexts of length memory-1.
    let mut contexts: Vec<Word> = Vec::new();
    let mut buf = vec![0 as Symbol; clen];
    enumerate_contexts(m, constraint, &mut buf, 0, &mut contexts);
    let index: HashMap<Word, usize> = contexts
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();

    let mut step = vec![vec![None; m]; contexts.len()];
    for (i, ctx) in contexts.iter().enumerate() {
        for s in 0..m {
            let mut ext = ctx.0.clone();
            ext.push(s as Symbol);
            if is_factor_admissible(m, constraint, &ext) {
                let next = Word(ext[ext.len() - clen..].to_vec());
                if let Some(&j) = index.get(&next) {
                    step[i][s] = Some(j);
                }
            }
        }
    }

    let (forward_live, backward_live) = liveness(&step, contexts.len());
    if !forward_live
        .iter()
        .zip(backward_live.iter())
        .any(|(&f, &b)| f && b)
    {
        return Err(ShiftError::EmptyLanguage);
    }
    Ok(ContextDfa {
        contexts,
        index,
        step,
        forward_live,
        backward_live,
    })
}

fn enumerate_contexts(
    m: usize,
    constraint: &ShiftConstraint,
    buf: &mut Vec<Symbol>,
    pos: usize,
    out: &mut Vec<Word>,
) {
    if pos == buf.len() {
        if is_factor_admissible(m, constraint, buf) {
            out.push(Word(buf.clone()));
        }
        return;
    }
    for s in 0..m as u16 {
        buf[pos] = s as Symbol;
        enumerate_contexts(m, constraint, buf, pos + 1, out);
    }
}

/// Forward-live = can reach a cycle; backward-live = reachable from a cycle.
fn liveness(step: &[Vec<Option<usize>>], n: usize) -> (Vec<bool>, Vec<bool>) {
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for (i, row) in step.iter().enumerate() {
        for next in row.iter().flatten() {
            graph.add_edge(nodes[i], nodes[*next], ());
        }
    }
    let sccs = petgraph::algo::tarjan_scc(&graph);
    let mut in_cycle = vec![false; n];
    for comp in &sccs {
        let cyclic = comp.len() > 1
            || step[comp[0].index()]
                .iter()
                .flatten()
                .any(|&next| next == comp[0].index());
        if cyclic {
            for node in comp {
                in_cycle[node.index()] = true;
            }
        }
    }
    // Forward: reverse reachability to cycle nodes.
    let mut forward = in_cycle.clone();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if !forward[i] && step[i].iter().flatten().any(|&next| forward[next]) {
                forward[i] = true;
                changed = true;
            }
        }
    }
    // Backward: forward reachability from cycle nodes.
    let mut backward = in_cycle;
    changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if backward[i] {
                for &next in step[i].iter().flatten() {
                    if !backward[next] {
                        backward[next] = true;
                        changed = true;
                    }
                }
            }
        }
    }
    (forward, backward)
}

/// Spectral entropy of an SFT, with an irreducibility flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEntropy {
    /// log of the Perron eigenvalue of the (trimmed) transition structure,
    /// in nats.
    pub value: f64,
    /// False when the trimmed automaton has more than one recurrent
    /// component; the value is then the max over components.
    pub irreducible: bool,
}

/// Topological entropy of the SFT as the log Perron eigenvalue of its
/// context automaton, by power iteration to relative tolerance 1e-12.
///
/// Reducible transition structures are decomposed into strongly connected
/// components; the result is the max over components and `irreducible` is
/// reported false.
pub fn spectral_entropy(shift: &SubshiftSpec) -> SpectralEntropy {
    let dfa = shift.dfa();
    // Trim to live states first; the flag speaks about the trimmed graph.
    let live: Vec<usize> = (0..dfa.num_states()).filter(|&i| dfa.live(i)).collect();
    let pos: HashMap<usize, usize> = live.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = live.iter().map(|_| graph.add_node(())).collect();
    for (k, &i) in live.iter().enumerate() {
        for next in dfa.step[i].iter().flatten() {
            if let Some(&j) = pos.get(next) {
                graph.add_edge(nodes[k], nodes[j], ());
            }
        }
    }
    let sccs = petgraph::algo::tarjan_scc(&graph);
    let mut best = 0.0f64;
    let mut recurrent = 0usize;
    for comp in &sccs {
        let members: Vec<usize> = comp.iter().map(|nd| live[nd.index()]).collect();
        let has_edge = members.iter().any(|&i| {
            dfa.step[i]
                .iter()
                .flatten()
                .any(|next| members.contains(next))
        });
        if !has_edge {
            continue;
        }
        recurrent += 1;
        let rho = perron_root(&members, &dfa.step);
        best = best.max(rho.ln());
    }
    SpectralEntropy {
        value: best.max(0.0),
        irreducible: recurrent == 1 && sccs.len() == 1,
    }
}

/// Perron root of the adjacency submatrix on `members`, by power iteration
/// on A + I (the shift keeps periodic components convergent).
fn perron_root(members: &[usize], step: &[Vec<Option<usize>>]) -> f64 {
    let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let k = members.len();
    let mut v = vec![1.0f64; k];
    let mut lambda = 0.0f64;
    for _ in 0..100_000 {
        let mut w = v.clone(); // the +I term
        for (idx, &i) in members.iter().enumerate() {
            for next in step[i].iter().flatten() {
                if let Some(&j) = pos.get(next) {
                    w[j] += v[idx];
                }
            }
        }
        let norm: f64 = w.iter().sum();
        let rayleigh: f64 = w
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / v.iter().map(|b| b * b).sum::<f64>();
        for x in &mut w {
            *x /= norm;
        }
        let next_lambda = rayleigh - 1.0;
        let done = (next_lambda - lambda).abs() <= 1e-13 * next_lambda.abs().max(1.0);
        v = w;
        lambda = next_lambda;
        if done {
            break;
        }
    }
    lambda.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_entropy_is_log_m() {
        for m in [2usize, 3, 4, 8] {
            let shift = SubshiftSpec::full_shift(m);
            let se = spectral_entropy(&shift);
            assert!(se.irreducible);
            assert!((se.value - (m as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_mean_entropy_is_log_phi() {
        let shift = SubshiftSpec::golden_mean();
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let se = spectral_entropy(&shift);
        assert!(se.irreducible);
        assert!((se.value - phi.ln()).abs() < 1e-11, "got {}", se.value);
    }

    #[test]
    fn single_loop_entropy_zero() {
        // One symbol with a self-transition.
        let shift = SubshiftSpec::from_matrix(vec![vec![true]]).unwrap();
        let se = spectral_entropy(&shift);
        assert_eq!(se.value, 0.0);
        assert!(se.irreducible);
    }

    #[test]
    fn reducible_matrix_flags_and_takes_max() {
        // Two disconnected full components: {0,1} free among themselves, {2}
        // self loop. Perron = 2 on the first component.
        let matrix = vec![
            vec![true, true, false],
            vec![true, true, false],
            vec![false, false, true],
        ];
        let shift = SubshiftSpec::from_matrix(matrix).unwrap();
        let se = spectral_entropy(&shift);
        assert!(!se.irreducible);
        assert!((se.value - 2.0f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn empty_language_rejected() {
        let err = SubshiftSpec::from_forbidden(2, vec![Word::from([0]), Word::from([1])]);
        assert_eq!(err.unwrap_err(), ShiftError::EmptyLanguage);
    }

    #[test]
    fn word_occurs_respects_liveness() {
        // Only cycle is 1 -> 1; symbol 0 has no incoming edge, so it is
        // stranded and no point of the shift contains it.
        let matrix = vec![vec![false, true], vec![false, true]];
        let shift = SubshiftSpec::from_matrix(matrix).unwrap();
        assert!(shift.word_occurs(&Word::from([1, 1])));
        assert!(!shift.word_occurs(&Word::from([0, 1])));
        assert!(!shift.word_occurs(&Word::from([0, 0])));
        // After trimming the stranded symbol the shift is a single loop.
        assert!(spectral_entropy(&shift).irreducible);
        assert_eq!(spectral_entropy(&shift).value, 0.0);
    }

    #[test]
    fn golden_mean_forbids_11() {
        let shift = SubshiftSpec::golden_mean();
        assert!(shift.word_occurs(&Word::from([0, 1, 0, 1])));
        assert!(!shift.word_occurs(&Word::from([0, 1, 1])));
        assert_eq!(shift.enumerate_words(4).len(), 8);
    }

    #[test]
    fn block_power_of_golden_mean() {
        let shift = SubshiftSpec::golden_mean();
        let (blocked, blocks) = shift.block_power(2).unwrap();
        // Admissible 2-words: 00, 01, 10 — entropy doubles.
        assert_eq!(blocks.len(), 3);
        let se = spectral_entropy(&blocked);
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert!((se.value - 2.0 * phi.ln()).abs() < 1e-10);
    }
}
