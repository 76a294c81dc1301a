//! Bowen dimensional entropy via the Caratheodory construction.
//!
//! The outer measure at exponent `lambda` weighs a cover element `E` by
//! `exp(-lambda * n(E))`, where `n(E)` counts how many consecutive forward
//! images of `E` each fit inside a single cover cell. For schedule subsets
//! and word-partition covers, the infimum over cylinder covers is computed
//! by dynamic programming over the schedule's word tree, and a matching
//! lower bound comes from the mass-distribution principle applied to the
//! Perron product measure on the tree. The critical exponent is then
//! bracketed by bisection with a certificate on each side:
//!
//! - above: uniform-cover costs decay geometrically over whole periods, so
//!   the measure vanishes at every refinement level;
//! - below: the product measure assigns every admissible element mass at
//!   most `C * exp(-lambda * n(E))`, so every cover costs at least `1/C`.

use thiserror::Error;

use crate::cover::CoverSpec;
use crate::symbolic::count::{count_window, CountError};
use crate::symbolic::{DigitSetSchedule, EventuallyPeriodicPoint, SubshiftSpec, Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimError {
    #[error("depth cap {cap} cannot certify covering at k={k}, cover depth {depth}")]
    DepthCapTooSmall { cap: usize, k: usize, depth: usize },
    #[error(
        "bisection inconclusive at depth cap: bracket [{lower}, {upper}] after {iterations} probes"
    )]
    Inconclusive {
        lower: f64,
        upper: f64,
        iterations: usize,
    },
    #[error("dimensional entropy requires a word-partition cover")]
    GeneralCoverUnsupported,
    #[error("schedule and shift alphabets disagree")]
    IncompatibleAlphabet,
    #[error("cover extraction would exceed {0} elements")]
    TooManyElements(usize),
    #[error(transparent)]
    Count(#[from] CountError),
}

/// `n_{T,U}(E)`: finite run length or the forever marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NValue {
    Finite(u64),
    Infinite,
}

impl NValue {
    /// `exp(-lambda * n)`, honoring `0 * inf = 0`.
    pub fn weight(&self, lambda: f64) -> f64 {
        match self {
            NValue::Finite(n) => (-lambda * *n as f64).exp(),
            NValue::Infinite => {
                if lambda > 0.0 {
                    0.0
                } else if lambda == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

/// The point set of a cover element.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementSet {
    /// The cylinder fixing `word` on coordinates `anchor..anchor+len`.
    Cylinder { word: Word, anchor: isize },
    /// A certified one-point set.
    Singleton(EventuallyPeriodicPoint),
}

/// A cover element with its cached `n`-value.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderElement {
    pub set: ElementSet,
    pub n_value: NValue,
}

impl CylinderElement {
    pub fn cylinder(
        shift: &SubshiftSpec,
        cover: &CoverSpec,
        word: Word,
        anchor: isize,
    ) -> Result<Self, DimError> {
        let set = ElementSet::Cylinder { word, anchor };
        let n_value = n_value(shift, &set, cover)?;
        Ok(CylinderElement { set, n_value })
    }

    pub fn singleton(point: EventuallyPeriodicPoint) -> Self {
        CylinderElement {
            set: ElementSet::Singleton(point),
            n_value: NValue::Infinite,
        }
    }
}

/// How far the forced-extension scan runs before concluding a cycle.
fn forcing_cap(shift: &SubshiftSpec) -> usize {
    shift.dfa().num_states() * shift.memory() + 64
}

/// `n_{T,U}(E)` for a word-partition cover of depth `d`.
///
/// A singleton refines every partition at every time, so its value is
/// infinite. A cylinder is first tightened by forced symbols on both sides
/// (unique admissible extensions), then the run length follows from the
/// constrained window: `T^i E` lies in one cell iff the window covers
/// `i..i+d`.
pub fn n_value(
    shift: &SubshiftSpec,
    set: &ElementSet,
    cover: &CoverSpec,
) -> Result<NValue, DimError> {
    let d = cover.depth().ok_or(DimError::GeneralCoverUnsupported)?;
    match set {
        ElementSet::Singleton(_) => Ok(NValue::Infinite),
        ElementSet::Cylinder { word, anchor } => {
            if word.is_empty() {
                // The whole space: in one cell only if the space is a point.
                let cells = count_window(shift, &|_| shift.full_symbol_set(), 0, d)?;
                return Ok(if cells.to_f64() <= 1.0 {
                    NValue::Infinite
                } else {
                    NValue::Finite(0)
                });
            }
            let cap = forcing_cap(shift);
            let mut w = word.0.clone();
            let mut a = *anchor;
            // Forced left extensions.
            for _ in 0..cap {
                let mut candidates = Vec::new();
                for s in 0..shift.alphabet_size() as u16 {
                    let mut probe = vec![s as Symbol];
                    probe.extend_from_slice(&w);
                    if shift.word_occurs(&Word(probe)) {
                        candidates.push(s as Symbol);
                        if candidates.len() > 1 {
                            break;
                        }
                    }
                }
                if candidates.len() == 1 {
                    let mut ext = vec![candidates[0]];
                    ext.extend_from_slice(&w);
                    w = ext;
                    a -= 1;
                } else {
                    break;
                }
            }
            // Forced right extensions, with the scan cap standing in for
            // cycle detection: outrunning every context means the forcing
            // repeats forever.
            let mut forced_forever = false;
            for step in 0..=cap {
                let mut candidates = Vec::new();
                for s in 0..shift.alphabet_size() as u16 {
                    let mut probe = w.clone();
                    probe.push(s as Symbol);
                    if shift.word_occurs(&Word(probe)) {
                        candidates.push(s as Symbol);
                        if candidates.len() > 1 {
                            break;
                        }
                    }
                }
                if candidates.len() == 1 {
                    if step == cap {
                        forced_forever = true;
                        break;
                    }
                    w.push(candidates[0]);
                } else {
                    break;
                }
            }
            let len = w.len() as isize;
            if forced_forever && a <= 0 {
                return Ok(NValue::Infinite);
            }
            // T^i E sits inside one cell iff a <= i <= a + len - d; the run
            // counts from i = 0.
            if a > 0 || a + len - (d as isize) < 0 {
                return Ok(NValue::Finite(0));
            }
            Ok(NValue::Finite((a + len - d as isize + 1) as u64))
        }
    }
}

/// A finite weighted cover in the Caratheodory construction.
#[derive(Debug, Clone)]
pub struct WeightedCylinderCover {
    pub elements: Vec<CylinderElement>,
    pub lambda: f64,
    pub k_floor: usize,
    pub weight_sum: f64,
}

impl WeightedCylinderCover {
    pub fn new(
        elements: Vec<CylinderElement>,
        lambda: f64,
        k_floor: usize,
    ) -> Result<Self, DimError> {
        for e in &elements {
            let ok = match e.n_value {
                NValue::Finite(n) => n >= k_floor as u64,
                NValue::Infinite => true,
            };
            if !ok {
                return Err(DimError::DepthCapTooSmall {
                    cap: 0,
                    k: k_floor,
                    depth: 0,
                });
            }
        }
        let weight_sum = elements.iter().map(|e| e.n_value.weight(lambda)).sum();
        Ok(WeightedCylinderCover {
            elements,
            lambda,
            k_floor,
            weight_sum,
        })
    }

    /// Checks at depth `depth` that every admissible schedule word extends
    /// some element: the uncovered complement of the language is empty.
    pub fn covers(
        &self,
        shift: &SubshiftSpec,
        subset: &DigitSetSchedule,
        depth: usize,
    ) -> Result<bool, DimError> {
        let words = crate::symbolic::count::enumerate_window_words(
            shift,
            &|i| subset.allowed_at(i),
            0,
            depth,
            200_000,
        )
        .ok_or(DimError::TooManyElements(200_000))?;
        'words: for w in &words {
            for e in &self.elements {
                match &e.set {
                    ElementSet::Cylinder { word, anchor } => {
                        if *anchor == 0
                            && word.len() <= w.len()
                            && w.symbols()[..word.len()] == *word.symbols()
                        {
                            continue 'words;
                        }
                    }
                    ElementSet::Singleton(p) => {
                        if (0..w.len()).all(|i| p.symbol_at(i as isize) == w.symbols()[i]) {
                            continue 'words;
                        }
                    }
                }
            }
            return Ok(false);
        }
        Ok(true)
    }
}

/// Closed-form entropy of an eventually periodic schedule in a full shift:
/// the period average of the log allowed-set sizes. Exact, and independent
/// of the Caratheodory machinery; the standard oracle for cross-checks.
pub fn moran_oracle(subset: &DigitSetSchedule) -> f64 {
    let q = subset.period_len() as f64;
    subset
        .period()
        .iter()
        .map(|set| (set.len() as f64).ln())
        .sum::<f64>()
        / q
}

// ---------------------------------------------------------------------------
// Schedule tree: liveness, single-branch rays, Perron product measure.
// ---------------------------------------------------------------------------

/// Pruned word tree of a schedule subset inside a subshift.
///
/// Depth-`t` nodes below the constraint memory are partial words; from
/// `t0 = max(preperiod, memory-1)` on, nodes are DFA contexts and the
/// structure is periodic in `t` with the schedule period.
pub(crate) struct ScheduleTree {
    pub q: usize,
    pub t0: usize,
    /// Periodic children per phase and state: `(symbol, next_state)`.
    pub children: Vec<Vec<Vec<(Symbol, usize)>>>,
    pub live: Vec<Vec<bool>>,
    pub single: Vec<Vec<bool>>,
    /// Transient levels `0..t0`; level `t` nodes point into level `t+1`
    /// (or into periodic phase-0 states for `t = t0-1`).
    pub transient: Vec<Vec<TransientNode>>,
    pub root_live: bool,
    pub num_states: usize,
}

pub(crate) struct TransientNode {
    #[allow(dead_code)]
    pub word_suffix: Word,
    pub children: Vec<(Symbol, usize)>,
    pub single: bool,
}

impl ScheduleTree {
    pub fn build(shift: &SubshiftSpec, subset: &DigitSetSchedule) -> Result<Self, DimError> {
        if shift.alphabet_size() != subset.alphabet_size() {
            return Err(DimError::IncompatibleAlphabet);
        }
        let dfa = shift.dfa();
        let clen = shift.memory() - 1;
        let pre = subset.preperiod_len();
        let q = subset.period_len();
        let t0 = pre.max(clen);
        let n_states = dfa.num_states();

        // Periodic phase j covers depths t0 + j + kq.
        let raw_children = |j: usize| -> Vec<Vec<(Symbol, usize)>> {
            let sets = subset.allowed_at((t0 + j) as isize);
            (0..n_states)
                .map(|s| {
                    sets.iter()
                        .filter_map(|sym| dfa.step[s][sym as usize].map(|next| (sym, next)))
                        .filter(|(_, next)| dfa.forward_live[*next])
                        .collect()
                })
                .collect()
        };
        let all_children: Vec<Vec<Vec<(Symbol, usize)>>> = (0..q).map(raw_children).collect();

        // Greatest fixpoint: a periodic node is live when some child is.
        let mut live = vec![vec![true; n_states]; q];
        loop {
            let mut changed = false;
            for j in 0..q {
                let nj = (j + 1) % q;
                for s in 0..n_states {
                    if live[j][s] {
                        let ok = all_children[j][s].iter().any(|(_, c)| live[nj][*c]);
                        if !ok {
                            live[j][s] = false;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let children: Vec<Vec<Vec<(Symbol, usize)>>> = (0..q)
            .map(|j| {
                let nj = (j + 1) % q;
                all_children[j]
                    .iter()
                    .map(|kids| {
                        kids.iter()
                            .copied()
                            .filter(|(_, c)| live[nj][*c])
                            .collect()
                    })
                    .collect()
            })
            .collect();

        // Single-branch-forever: greatest fixpoint on the pruned graph.
        let mut single = vec![vec![true; n_states]; q];
        for j in 0..q {
            for s in 0..n_states {
                if !live[j][s] {
                    single[j][s] = false;
                }
            }
        }
        loop {
            let mut changed = false;
            for j in 0..q {
                let nj = (j + 1) % q;
                for s in 0..n_states {
                    if single[j][s] {
                        let kids = &children[j][s];
                        let ok = kids.len() == 1 && single[nj][kids[0].1];
                        if !ok {
                            single[j][s] = false;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        // Transient levels 0..t0, built forward then pruned backward.
        let mut levels: Vec<Vec<(Word, Vec<(Symbol, usize)>)>> = Vec::new();
        let mut frontier: Vec<Word> = vec![Word::empty()];
        for t in 0..t0 {
            let sets = subset.allowed_at(t as isize);
            let mut next_words: Vec<Word> = Vec::new();
            let mut level: Vec<(Word, Vec<(Symbol, usize)>)> = Vec::new();
            for w in &frontier {
                let mut kids = Vec::new();
                for sym in sets.iter() {
                    let mut ext = w.0.clone();
                    ext.push(sym);
                    if !shift.word_occurs_prefix(&ext) {
                        continue;
                    }
                    let keep = ext.len().min(clen);
                    let key = Word(ext[ext.len() - keep..].to_vec());
                    if ext.len() >= clen {
                        match dfa.index.get(&key) {
                            Some(&i)
                                if dfa.forward_live[i]
                                    && (ext.len() > clen || dfa.backward_live[i]) => {}
                            _ => continue,
                        }
                    }
                    let child_idx = if t + 1 == t0 {
                        let i = *dfa.index.get(&key).expect("full context at t0");
                        if !live[0][i] {
                            continue;
                        }
                        i
                    } else {
                        match next_words.iter().position(|x| x == &key) {
                            Some(i) => i,
                            None => {
                                next_words.push(key.clone());
                                next_words.len() - 1
                            }
                        }
                    };
                    kids.push((sym, child_idx));
                }
                level.push((w.clone(), kids));
            }
            levels.push(level);
            frontier = next_words;
        }

        // Backward prune of transient levels: drop nodes with no live child.
        let mut alive_next: Vec<bool> = live[0].clone();
        let mut transient: Vec<Vec<TransientNode>> = Vec::new();
        let mut keep_maps: Vec<Vec<Option<usize>>> = Vec::new();
        for t in (0..t0).rev() {
            let level = &levels[t];
            let mut keep: Vec<Option<usize>> = vec![None; level.len()];
            let mut nodes = Vec::new();
            for (i, (w, kids)) in level.iter().enumerate() {
                let live_kids: Vec<(Symbol, usize)> = kids
                    .iter()
                    .copied()
                    .filter(|(_, c)| alive_next[*c])
                    .collect();
                if !live_kids.is_empty() {
                    keep[i] = Some(nodes.len());
                    nodes.push(TransientNode {
                        word_suffix: w.clone(),
                        children: live_kids,
                        single: false,
                    });
                }
            }
            alive_next = keep.iter().map(|k| k.is_some()).collect();
            transient.push(nodes);
            keep_maps.push(keep);
        }
        transient.reverse();
        keep_maps.reverse();
        // Remap child indices to the pruned numbering of the next level.
        for t in 0..t0 {
            if t + 1 < t0 {
                let map = keep_maps[t + 1].clone();
                for node in &mut transient[t] {
                    for (_, c) in &mut node.children {
                        *c = map[*c].expect("child kept");
                    }
                }
            }
        }
        // Transient single-branch flags, backward from the periodic data.
        for t in (0..t0).rev() {
            let singles_next: Vec<bool> = if t + 1 < t0 {
                transient[t + 1].iter().map(|n| n.single).collect()
            } else {
                single[0].clone()
            };
            for node in &mut transient[t] {
                node.single =
                    node.children.len() == 1 && singles_next[node.children[0].1];
            }
        }

        let root_live = if t0 == 0 {
            live[0].iter().any(|&b| b)
        } else {
            !transient[0].is_empty()
        };
        Ok(ScheduleTree {
            q,
            t0,
            children,
            live,
            single,
            transient,
            root_live,
            num_states: n_states,
        })
    }

    /// Apply one full period of child sums to a phase-0 future-count vector.
    fn cycle_apply(&self, v: &[f64]) -> Vec<f64> {
        let mut cur = v.to_vec();
        for j in (0..self.q).rev() {
            let mut prev = vec![0.0; self.num_states];
            for s in 0..self.num_states {
                if !self.live[j][s] {
                    continue;
                }
                prev[s] = self.children[j][s].iter().map(|(_, c)| cur[*c]).sum();
            }
            cur = prev;
        }
        cur
    }

    /// Per-period log growth of the schedule language and the phase-0
    /// Perron vector, by power iteration on (cycle + identity).
    pub fn periodic_growth(&self) -> (f64, Vec<f64>) {
        let mut v: Vec<f64> = self.live[0]
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        if v.iter().all(|&x| x == 0.0) {
            return (f64::NEG_INFINITY, v);
        }
        let mut lambda = 0.0f64;
        for _ in 0..200_000 {
            let mut w = self.cycle_apply(&v);
            for (wi, vi) in w.iter_mut().zip(v.iter()) {
                *wi += vi;
            }
            let rayleigh: f64 = w.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>()
                / v.iter().map(|b| b * b).sum::<f64>();
            let norm: f64 = w.iter().sum();
            for x in &mut w {
                *x /= norm;
            }
            let next = rayleigh - 1.0;
            let done = (next - lambda).abs() <= 1e-14 * next.abs().max(1.0);
            v = w;
            lambda = next;
            if done {
                break;
            }
        }
        (lambda.max(0.0).ln(), v)
    }

    /// Future-mass vectors per phase (`w[q] = w[0]` is the Perron vector),
    /// each rescaled to sum 1. The measure ratio of a child under its
    /// parent is `w[j+1][child] / sum over siblings`.
    pub fn phase_vectors(&self) -> Vec<Vec<f64>> {
        let (_, v0) = self.periodic_growth();
        let mut ws = vec![Vec::new(); self.q + 1];
        ws[self.q] = v0.clone();
        for j in (0..self.q).rev() {
            let mut w = vec![0.0; self.num_states];
            for s in 0..self.num_states {
                if !self.live[j][s] {
                    continue;
                }
                w[s] = self.children[j][s]
                    .iter()
                    .map(|(_, c)| ws[j + 1][*c])
                    .sum();
            }
            let norm: f64 = w.iter().sum();
            if norm > 0.0 {
                for x in &mut w {
                    *x /= norm;
                }
            }
            ws[j] = w;
        }
        ws[self.q] = ws[0].clone();
        ws
    }

    /// Any reachable single-branch ray makes the product measure atomic.
    pub fn has_forced_ray(&self) -> bool {
        for level in &self.transient {
            if level.iter().any(|n| n.single) {
                return true;
            }
        }
        self.single
            .iter()
            .zip(self.live.iter())
            .any(|(srow, lrow)| srow.iter().zip(lrow.iter()).any(|(&s, &l)| s && l))
    }
}

/// Exact growth rate (entropy) of the schedule language inside the shift:
/// log of the per-period Perron root divided by the period length.
pub fn schedule_entropy_exact(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
) -> Result<f64, DimError> {
    let tree = ScheduleTree::build(shift, subset)?;
    if !tree.root_live {
        return Ok(0.0);
    }
    let (lng, _) = tree.periodic_growth();
    if lng == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((lng / tree.q as f64).max(0.0))
}

/// Two-sided bounds on the outer measure `m(K, lambda, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MValueBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds for `m_{T,U}(K, lambda, k)` from covers up to `depth_cap`.
///
/// Upper: the best cylinder cover found by DP over the schedule word tree,
/// closing elements at depth at least `k + d - 1` (weight from the nominal
/// run length) or as zero-weight singletons on forced rays when
/// `lambda > 0`. Lower: mass distribution with the Perron product measure,
/// restricted to elements of depth at least `k + d - 1`; zero when no
/// certificate exists at this lambda.
///
/// Empty subsets follow the convention `+inf / 1 / 0` by the sign of
/// lambda.
pub fn m_value(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    cover: &CoverSpec,
    lambda: f64,
    k: usize,
    depth_cap: usize,
) -> Result<MValueBounds, DimError> {
    let d = cover.depth().ok_or(DimError::GeneralCoverUnsupported)?;
    let tree = ScheduleTree::build(shift, subset)?;
    if !tree.root_live {
        let v = if lambda < 0.0 {
            f64::INFINITY
        } else if lambda == 0.0 {
            1.0
        } else {
            0.0
        };
        return Ok(MValueBounds { lower: v, upper: v });
    }
    let min_close = k + d - 1;
    if depth_cap < min_close || depth_cap < tree.t0 + 1 {
        return Err(DimError::DepthCapTooSmall {
            cap: depth_cap,
            k,
            depth: d,
        });
    }
    let upper = dp_upper(&tree, lambda, d, min_close, depth_cap);
    let lower = mass_lower(&tree, lambda, d, min_close);
    Ok(MValueBounds {
        lower: lower.min(upper),
        upper,
    })
}

/// DP optimum over cylinder covers, in the rescaled variable
/// `g = f * exp(lambda * (t - d + 1))`: closing costs 1, recursing costs
/// `exp(-lambda) * sum(children)`.
fn dp_upper(tree: &ScheduleTree, lambda: f64, d: usize, min_close: usize, cap: usize) -> f64 {
    let decay = (-lambda).exp();
    let phase = |t: usize| (t - tree.t0) % tree.q;
    let mut g: Vec<f64> = (0..tree.num_states)
        .map(|s| {
            if tree.live[phase(cap)][s] {
                1.0
            } else {
                f64::INFINITY
            }
        })
        .collect();
    for t in (tree.t0..cap).rev() {
        let j = phase(t);
        let mut prev = vec![f64::INFINITY; tree.num_states];
        for s in 0..tree.num_states {
            if !tree.live[j][s] {
                continue;
            }
            let recurse: f64 =
                decay * tree.children[j][s].iter().map(|(_, c)| g[*c]).sum::<f64>();
            let mut best = recurse;
            if t >= min_close {
                best = best.min(1.0);
                if lambda > 0.0 && tree.single[j][s] {
                    best = 0.0;
                }
            }
            prev[s] = best;
        }
        g = prev;
    }
    let g_root = if tree.t0 == 0 {
        let s = tree.live[0].iter().position(|&l| l).expect("live root state");
        g[s]
    } else {
        let mut cur = g;
        for t in (0..tree.t0).rev() {
            let level = &tree.transient[t];
            let mut prev = vec![f64::INFINITY; level.len()];
            for (i, node) in level.iter().enumerate() {
                let recurse: f64 =
                    decay * node.children.iter().map(|(_, c)| cur[*c]).sum::<f64>();
                let mut best = recurse;
                if t >= min_close {
                    best = best.min(1.0);
                    if lambda > 0.0 && node.single {
                        best = 0.0;
                    }
                }
                prev[i] = best;
            }
            cur = prev;
        }
        debug_assert_eq!(cur.len(), 1, "single root node");
        cur[0]
    };
    (lambda * (d as f64 - 1.0)).exp() * g_root
}

const BURN_CYCLES: usize = 8;

/// Mass-distribution lower bound `1 / C`, where `C` bounds
/// `mu(E) * exp(lambda * n(E))` over all elements of depth at least
/// `min_close`. Returns 0 when no certificate exists (atomic measure, or
/// no per-cycle decay at this lambda).
fn mass_lower(tree: &ScheduleTree, lambda: f64, d: usize, min_close: usize) -> f64 {
    if tree.has_forced_ray() {
        return 0.0;
    }
    let (ln_growth, _) = tree.periodic_growth();
    if ln_growth == f64::NEG_INFINITY {
        return 0.0;
    }
    // Per-cycle factor of mu * e^(lambda t) is exp(lambda q) / Lambda.
    if lambda * tree.q as f64 >= ln_growth - 1e-9 {
        return 0.0;
    }
    let ws = tree.phase_vectors();
    let s_of = |t: usize, logmu: f64| logmu + lambda * (t as f64 - d as f64 + 1.0);
    let mut best_s = f64::NEG_INFINITY;

    // Transient walk of the max path measure (log domain).
    let mut level_logs: Vec<f64> = vec![0.0];
    for t in 0..tree.t0 {
        let level = &tree.transient[t];
        let next_len = if t + 1 < tree.t0 {
            tree.transient[t + 1].len()
        } else {
            tree.num_states
        };
        let mut next = vec![f64::NEG_INFINITY; next_len];
        for (i, node) in level.iter().enumerate() {
            if level_logs[i] == f64::NEG_INFINITY {
                continue;
            }
            let child_mass = |c: usize| -> f64 {
                if t + 1 < tree.t0 {
                    transient_future_mass(tree, t + 1, c, &ws)
                } else {
                    ws[0][c]
                }
            };
            let denom: f64 = node.children.iter().map(|(_, c)| child_mass(*c)).sum();
            if denom <= 0.0 {
                return 0.0;
            }
            for (_, c) in &node.children {
                let wc = child_mass(*c);
                if wc <= 0.0 {
                    continue;
                }
                let lm = level_logs[i] + (wc / denom).ln();
                if lm > next[*c] {
                    next[*c] = lm;
                }
            }
        }
        level_logs = next;
        let depth = t + 1;
        if depth >= min_close && depth < tree.t0 {
            for &lm in &level_logs {
                if lm > f64::NEG_INFINITY {
                    best_s = best_s.max(s_of(depth, lm));
                }
            }
        }
    }
    if tree.t0 == 0 {
        level_logs = tree.live[0]
            .iter()
            .map(|&l| if l { 0.0 } else { f64::NEG_INFINITY })
            .collect();
    }

    // Periodic walk with per-cycle stabilization check. The window must
    // reach past min_close and then observe several whole cycles.
    let q = tree.q;
    let total_cycles =
        BURN_CYCLES + (min_close.saturating_sub(tree.t0)).div_ceil(q.max(1)) + 1;
    let mut prev_cycle_max = f64::NEG_INFINITY;
    let mut stabilized = 0usize;
    let mut saw_decay = false;
    for cycle in 0..total_cycles {
        let mut cycle_max = f64::NEG_INFINITY;
        for j in 0..q {
            let t = tree.t0 + cycle * q + j;
            if t >= min_close {
                for (s, &lm) in level_logs.iter().enumerate() {
                    if tree.live[j][s] && lm > f64::NEG_INFINITY {
                        let sv = s_of(t, lm);
                        best_s = best_s.max(sv);
                        cycle_max = cycle_max.max(sv);
                    }
                }
            }
            let mut next = vec![f64::NEG_INFINITY; tree.num_states];
            for s in 0..tree.num_states {
                if !tree.live[j][s] || level_logs[s] == f64::NEG_INFINITY {
                    continue;
                }
                let denom: f64 = tree.children[j][s]
                    .iter()
                    .map(|(_, c)| ws[j + 1][*c])
                    .sum();
                if denom <= 0.0 {
                    return 0.0;
                }
                for (_, c) in &tree.children[j][s] {
                    if ws[j + 1][*c] <= 0.0 {
                        continue;
                    }
                    let lm = level_logs[s] + (ws[j + 1][*c] / denom).ln();
                    if lm > next[*c] {
                        next[*c] = lm;
                    }
                }
            }
            level_logs = next;
        }
        if prev_cycle_max > f64::NEG_INFINITY && cycle_max > f64::NEG_INFINITY {
            let ratio = cycle_max - prev_cycle_max;
            let expected = lambda * q as f64 - ln_growth;
            if ratio < -1e-12 {
                saw_decay = true;
            }
            if (ratio - expected).abs() < 1e-9 && ratio < -1e-12 {
                stabilized += 1;
                if stabilized >= 2 {
                    return (-best_s).exp();
                }
            } else {
                stabilized = 0;
            }
        }
        prev_cycle_max = cycle_max;
    }
    if saw_decay {
        (-best_s).exp()
    } else {
        0.0
    }
}

/// Future mass of a transient node: pull the phase-0 Perron vector back
/// through the (short) transient tree.
fn transient_future_mass(tree: &ScheduleTree, t: usize, idx: usize, ws: &[Vec<f64>]) -> f64 {
    if t == tree.t0 {
        return ws[0][idx];
    }
    let node = &tree.transient[t][idx];
    node.children
        .iter()
        .map(|(_, c)| {
            if t + 1 == tree.t0 {
                ws[0][*c]
            } else {
                transient_future_mass(tree, t + 1, *c, ws)
            }
        })
        .sum()
}

/// A certified bracket for the critical exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponent {
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

impl CriticalExponent {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.lower - slack && v <= self.upper + slack
    }
}

/// Dimensional entropy `h^B_U(T, K)` by bisection on lambda with a
/// certificate on each side.
///
/// The bracket starts at `[0, log m]`; the empty set returns the exact
/// zero bracket. Negative lambda is never probed.
pub fn dim_entropy(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    cover: &CoverSpec,
    tol: f64,
    depth_cap: usize,
) -> Result<CriticalExponent, DimError> {
    assert!(tol > 0.0);
    let d = cover.depth().ok_or(DimError::GeneralCoverUnsupported)?;
    let tree = ScheduleTree::build(shift, subset)?;
    if !tree.root_live {
        return Ok(CriticalExponent {
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
        });
    }
    assert!(tol >= 1e-8, "certificate margins need tol >= 1e-8");
    let counts = cycle_counts(shift, subset, &tree, d)?;
    let mut lo = 0.0f64;
    let mut hi = (shift.alphabet_size() as f64).ln().max(tol);
    let mut iterations = 0usize;
    let _ = depth_cap;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        if decays_above(&counts, tree.q, mid) {
            hi = mid;
        } else if mass_lower(&tree, mid, d, 1) > 0.0 {
            lo = mid;
        } else {
            // The probe may sit exactly at the critical value; pinch the
            // bracket around it instead.
            let delta = ((hi - lo) * 0.01).max(tol * 0.25);
            if decays_above(&counts, tree.q, mid + delta)
                && mass_lower(&tree, mid - delta, d, 1) > 0.0
            {
                lo = mid - delta;
                hi = mid + delta;
            } else {
                return Err(DimError::Inconclusive {
                    lower: lo,
                    upper: hi,
                    iterations,
                });
            }
        }
        if iterations > 200 {
            return Err(DimError::Inconclusive {
                lower: lo,
                upper: hi,
                iterations,
            });
        }
    }
    Ok(CriticalExponent {
        lower: lo,
        upper: hi,
        iterations,
    })
}

/// Dimensional entropy of a finite union of schedule subsets.
///
/// The union of trees is not a tree, but both certificate routes extend:
/// the union contains each component, so any component's mass-distribution
/// certificate bounds the union from below; and exact union word counts
/// (mask DP) drive the decay certificate from above, sampled at whole
/// common periods.
pub fn dim_entropy_union(
    shift: &SubshiftSpec,
    subsets: &[&DigitSetSchedule],
    cover: &CoverSpec,
    tol: f64,
    depth_cap: usize,
) -> Result<CriticalExponent, DimError> {
    assert!(tol >= 1e-8);
    assert!(!subsets.is_empty());
    let d = cover.depth().ok_or(DimError::GeneralCoverUnsupported)?;
    let _ = depth_cap;
    let trees: Vec<ScheduleTree> = subsets
        .iter()
        .map(|s| ScheduleTree::build(shift, s))
        .collect::<Result<_, _>>()?;
    if trees.iter().all(|t| !t.root_live) {
        return Ok(CriticalExponent {
            lower: 0.0,
            upper: 0.0,
            iterations: 0,
        });
    }
    // Common period and transient horizon.
    let q = subsets
        .iter()
        .map(|s| s.period_len())
        .fold(1usize, |acc, x| acc / gcd(acc, x) * x);
    let t0 = trees.iter().map(|t| t.t0).max().unwrap_or(0);
    let burn = 8usize;
    let base = t0.max(d).max(1) + burn * q;
    let mut counts = Vec::new();
    for c in 0..=5usize {
        let t = base + c * q;
        let count = crate::symbolic::count::count_union_window(shift, subsets, 0, t)?;
        counts.push((t, count.ln()));
    }

    let mut lo = 0.0f64;
    let mut hi = (shift.alphabet_size() as f64).ln().max(tol);
    let mut iterations = 0usize;
    let below = |lambda: f64| -> bool {
        trees
            .iter()
            .any(|tree| tree.root_live && mass_lower(tree, lambda, d, 1) > 0.0)
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        if decays_above(&counts, q, mid) {
            hi = mid;
        } else if below(mid) {
            lo = mid;
        } else {
            let delta = ((hi - lo) * 0.01).max(tol * 0.25);
            if decays_above(&counts, q, mid + delta) && below(mid - delta) {
                lo = mid - delta;
                hi = mid + delta;
            } else {
                return Err(DimError::Inconclusive {
                    lower: lo,
                    upper: hi,
                    iterations,
                });
            }
        }
        if iterations > 200 {
            return Err(DimError::Inconclusive {
                lower: lo,
                upper: hi,
                iterations,
            });
        }
    }
    Ok(CriticalExponent {
        lower: lo,
        upper: hi,
        iterations,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Log window counts at whole-period sample depths, for the decay
/// certificate. Sampling starts several periods in so that count ratios
/// have settled to the Perron rate (early ratios oscillate).
fn cycle_counts(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    tree: &ScheduleTree,
    d: usize,
) -> Result<Vec<(usize, f64)>, DimError> {
    let mut out = Vec::new();
    let cycles = 5usize;
    let burn = 8usize;
    let base = tree.t0.max(d).max(1) + burn * tree.q;
    for c in 0..=cycles {
        let t = base + c * tree.q;
        let count = count_window(shift, &|i| subset.allowed_at(i), 0, t)?;
        out.push((t, count.ln()));
    }
    Ok(out)
}

/// Uniform covers at whole periods: log cost is `ln N_t - lambda (t-d+1)`;
/// the certificate asks for strict decay between consecutive samples.
fn decays_above(counts: &[(usize, f64)], q: usize, lambda: f64) -> bool {
    let mut ok = 0;
    for pair in counts.windows(2) {
        let (t0, c0) = pair[0];
        let (t1, c1) = pair[1];
        debug_assert_eq!(t1 - t0, q);
        let delta = (c1 - lambda * t1 as f64) - (c0 - lambda * t0 as f64);
        if delta <= -1e-9 {
            ok += 1;
        } else {
            return false;
        }
    }
    ok >= 2
}

const COVER_EXTRACT_LIMIT: usize = 100_000;

/// Materialize the DP-optimal cover at a small depth cap, for inspection
/// and verification.
pub fn optimal_cylinder_cover(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    cover: &CoverSpec,
    lambda: f64,
    k: usize,
    depth_cap: usize,
) -> Result<WeightedCylinderCover, DimError> {
    let d = cover.depth().ok_or(DimError::GeneralCoverUnsupported)?;
    let tree = ScheduleTree::build(shift, subset)?;
    if !tree.root_live {
        return WeightedCylinderCover::new(Vec::new(), lambda, k);
    }
    let min_close = k + d - 1;
    if depth_cap < min_close || depth_cap < tree.t0 + 1 {
        return Err(DimError::DepthCapTooSmall {
            cap: depth_cap,
            k,
            depth: d,
        });
    }
    let mut elements = Vec::new();
    let mut stack: Vec<(usize, Word, NodeRef)> = vec![(0, Word::empty(), root_ref(&tree))];
    while let Some((t, word, node)) = stack.pop() {
        if elements.len() > COVER_EXTRACT_LIMIT {
            return Err(DimError::TooManyElements(COVER_EXTRACT_LIMIT));
        }
        let single = node_single(&tree, t, &node);
        if t >= min_close && lambda > 0.0 && single {
            elements.push(CylinderElement::singleton(ray_point(
                shift, subset, t, &word,
            )));
            continue;
        }
        let close_now = t >= min_close
            && (t == depth_cap || {
                let g = subtree_g(&tree, lambda, min_close, depth_cap, t, &node);
                1.0 <= g + 1e-12
            });
        if close_now {
            elements.push(CylinderElement {
                set: ElementSet::Cylinder {
                    word: word.clone(),
                    anchor: 0,
                },
                n_value: NValue::Finite((t - d + 1) as u64),
            });
            continue;
        }
        for (sym, child) in node_children(&tree, t, &node) {
            let mut w = word.0.clone();
            w.push(sym);
            stack.push((t + 1, Word(w), child));
        }
    }
    WeightedCylinderCover::new(elements, lambda, k)
}

enum NodeRef {
    Transient(usize),
    Periodic(usize),
}

fn root_ref(tree: &ScheduleTree) -> NodeRef {
    if tree.t0 == 0 {
        let s = tree.live[0].iter().position(|&l| l).expect("live root");
        NodeRef::Periodic(s)
    } else {
        NodeRef::Transient(0)
    }
}

fn node_children(tree: &ScheduleTree, t: usize, node: &NodeRef) -> Vec<(Symbol, NodeRef)> {
    match node {
        NodeRef::Transient(i) => tree.transient[t][*i]
            .children
            .iter()
            .map(|&(sym, c)| {
                if t + 1 == tree.t0 {
                    (sym, NodeRef::Periodic(c))
                } else {
                    (sym, NodeRef::Transient(c))
                }
            })
            .collect(),
        NodeRef::Periodic(s) => {
            let j = (t - tree.t0) % tree.q;
            tree.children[j][*s]
                .iter()
                .map(|&(sym, c)| (sym, NodeRef::Periodic(c)))
                .collect()
        }
    }
}

fn node_single(tree: &ScheduleTree, t: usize, node: &NodeRef) -> bool {
    match node {
        NodeRef::Transient(i) => tree.transient[t][*i].single,
        NodeRef::Periodic(s) => tree.single[(t - tree.t0) % tree.q][*s],
    }
}

/// DP value of a single subtree (rescaled g), recomputed on demand.
fn subtree_g(
    tree: &ScheduleTree,
    lambda: f64,
    min_close: usize,
    cap: usize,
    t: usize,
    node: &NodeRef,
) -> f64 {
    if t == cap {
        return 1.0;
    }
    let decay = (-lambda).exp();
    let recurse: f64 = decay
        * node_children(tree, t, node)
            .iter()
            .map(|(_, c)| subtree_g(tree, lambda, min_close, cap, t + 1, c))
            .sum::<f64>();
    let mut best = recurse;
    if t >= min_close {
        best = best.min(1.0);
        if lambda > 0.0 && node_single(tree, t, node) {
            best = 0.0;
        }
    }
    best
}

/// The unique point of a forced ray below `word`, as an eventually
/// periodic point.
fn ray_point(
    shift: &SubshiftSpec,
    subset: &DigitSetSchedule,
    t: usize,
    word: &Word,
) -> EventuallyPeriodicPoint {
    let mut w = word.0.clone();
    let q = subset.period_len();
    let clen = shift.memory() - 1;
    let mut seen: Vec<(usize, Word)> = Vec::new();
    let mut depth = t;
    loop {
        let in_period = depth >= subset.preperiod_len();
        let phase = if in_period {
            (depth - subset.preperiod_len()) % q
        } else {
            usize::MAX
        };
        let ctx = Word(w[w.len().saturating_sub(clen)..].to_vec());
        if in_period {
            if let Some(pos) = seen.iter().position(|(p, c)| *p == phase && *c == ctx) {
                let cycle_start = w.len() - (seen.len() - pos);
                let pre = Word(w[..cycle_start].to_vec());
                let per = Word(w[cycle_start..].to_vec());
                return EventuallyPeriodicPoint::new(pre, per);
            }
            seen.push((phase, ctx));
        }
        let allowed = subset.allowed_at(depth as isize);
        let next = allowed
            .iter()
            .find(|&s| {
                let mut probe = w.clone();
                probe.push(s);
                shift.word_occurs_prefix(&probe)
            })
            .expect("forced ray has a continuation");
        w.push(next);
        depth += 1;
    }
}
