use thiserror::Error;

/// Errors raised by the simulation kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("kbar = {kbar} does not satisfy the resonance condition kbar = 2*pi*{ell}")]
    ResonanceMismatch { kbar: f64, ell: u32 },

    #[error("ladder half-width {have} is below the required {need}")]
    LadderTooSmall { have: usize, need: usize },

    #[error("ratio {ratio} has no rational approximation r/s with s <= 1e6")]
    NotRational { ratio: f64 },

    #[error("truncation at kick {kick} discarded {leaked:e} of the norm")]
    LadderLeak { kick: usize, leaked: f64 },

    #[error("operation requires a simple resonance (ell must be set)")]
    NotResonant,

    #[error("operation requires {expected} resonance order, got ell = {ell}")]
    ResonanceParity { ell: u32, expected: &'static str },

    #[error("momentum index {n} lies outside the ladder [-{half_width}, {half_width}]")]
    OutOfLadder { n: i64, half_width: usize },

    #[error("fit window holds {points} points, at least 4 are required")]
    WindowTooSmall { points: usize },

    #[error("|beta| * t = {value} lies outside the central lobe")]
    OutOfLobe { value: f64 },

    #[error("series of length {len} is too short")]
    SeriesTooShort { len: usize },

    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("fibers disagree on ladder half-width ({0} vs {1})")]
    LadderMismatch(usize, usize),
}

pub type Result<T> = core::result::Result<T, Error>;
