//! Subshifts, words, digit-schedule subsets, block codes, and the exact
//! counting/spectral oracles everything else is built on.

pub mod block_code;
pub mod count;
pub mod json;
pub mod schedule;
pub mod shift;
pub mod word;

pub use block_code::{count_fiber_words, count_image_words, BlockCode, BlockCodeError};
pub use count::{count_window, count_words, ln_biguint, CountError, WordCount, EXACT_LIMIT};
pub use schedule::{
    DigitSetSchedule, EventuallyPeriodicPoint, MetricParams, ScheduleError, TwoSidedRule,
};
pub use shift::{spectral_entropy, ShiftConstraint, ShiftError, SpectralEntropy, SubshiftSpec};
pub use word::{Symbol, SymbolSet, Word, MAX_ALPHABET};
