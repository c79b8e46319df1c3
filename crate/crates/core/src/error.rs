use crate::rational::Rational;

/// Errors produced by the core modules.
///
/// `RetryCapExceeded` is not a bug signal: it means the requested parameters
/// were too aggressive for the requested depth and carries the evidence.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed interval: lo {lo} > hi {hi}")]
    MalformedInterval { lo: Rational, hi: Rational },

    #[error("degenerate affine map: t = 0")]
    DegenerateMap,

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-monotone input: sequence must be strictly decreasing")]
    NonMonotone,

    #[error("epsilon out of range: need 0 < epsilon < 1, got {0}")]
    EpsilonRange(Rational),

    #[error("generation depth {requested} exceeds cap {cap} (2^n interval blow-up guard); raise the cap explicitly to override")]
    DepthCap { requested: u32, cap: u32 },

    #[error("subdivision would need {cells} cells, beyond cap {cap}")]
    CellCap { cells: u128, cap: u64 },

    #[error("exponent 2^{delta_phi} too large for exact bound evaluation (cap 2^{cap})")]
    ExponentCap { delta_phi: u64, cap: u32 },

    #[error("retry cap {cap} exceeded at generation {generation}; best candidate kept {kept_cells} cells, counterexample (x, t) = ({x}, {t})")]
    RetryCapExceeded {
        generation: u32,
        cap: u32,
        kept_cells: u64,
        x: Rational,
        t: Rational,
    },
}
