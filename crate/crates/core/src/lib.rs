//! Entropy and dimension toolkit for symbolic dynamics.
//!
//! The crate computes and cross-validates entropy-like quantities of
//! subshifts and circle expanding maps at desk scale:
//!
//! - exact word counting and spectral entropy of SFTs ([`symbolic`]),
//! - covering entropy of digit-schedule subsets via spanning/separated
//!   counts, conditional and relative entropy, local entropy ([`cover`]),
//! - Bowen dimensional entropy through the weighted-cylinder-cover
//!   construction with certified two-sided bounds ([`dim`]),
//! - Hausdorff measure and dimension of digit Cantor sets on the circle
//!   and the dimension-entropy bridge ([`fractal`]),
//! - constructive entropy lowering inside full shifts, mixing SFTs, and
//!   schedule subsets, plus finite product-diagonal experiments
//!   ([`lowering`]),
//! - cyclic tower systems and their local-entropy profiles ([`tower`]).
//!
//! All operations are pure functions of immutable inputs; grid evaluations
//! can run concurrently without coordination.

pub mod cover;
pub mod dim;
pub mod estimate;
pub mod fractal;
pub mod lowering;
pub mod rng;
pub mod symbolic;
pub mod tower;

pub use estimate::{EntropyEstimate, EstimateMethod};
pub use symbolic::{
    BlockCode, DigitSetSchedule, EventuallyPeriodicPoint, MetricParams, SubshiftSpec, SymbolSet,
    Word,
};
