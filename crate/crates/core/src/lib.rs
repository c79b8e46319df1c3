//! Exact-arithmetic construction and certification of random null sets that
//! meet every admissible affine copy `x + t*C` of a symmetric Cantor set.
//!
//! The crate has five layers:
//!
//! * [`rational`] / [`interval`] — exact rational numbers and finite unions of
//!   disjoint closed intervals. All core computation is exact; floats appear
//!   only in rendered diagnostics.
//! * [`cantor`] — symmetric Cantor set specifications (ratio rules), their
//!   generations, endpoint sets and Newhouse thickness.
//! * [`diagnostics`] — decay-ratio tables for the non-universality conditions
//!   (reported as evidence, never as a boolean theorem verdict).
//! * [`construction`] — the randomized generation-by-generation build of the
//!   nested sets `F_n`, with Markov measure acceptance and retry.
//! * [`verifier`] — exact certification of the trapping property over a whole
//!   parameter rectangle by face enumeration of the cut-line arrangement,
//!   plus an independent brute-force sampling oracle.
//!
//! Persistence schemas for traces and verdicts live in [`trace`].

pub mod cantor;
pub mod construction;
pub mod diagnostics;
pub mod error;
pub mod interval;
pub mod rational;
pub mod rng;
pub mod trace;
pub mod verifier;

pub use cantor::{CantorSpec, EndpointSet, RatioRule, TailRule};
pub use construction::{
    ConstructionParams, ConstructionTrace, GenerationState, ParamRect, PhiRule, QSchedule,
};
pub use error::Error;
pub use interval::{Interval, IntervalSet};
pub use rational::Rational;
pub use verifier::{CutLine, FaceSample, Verdict};
