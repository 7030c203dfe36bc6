use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficients cover indices {first}..={last}, but index {needed} is required")]
    InsufficientCoefficients { first: i64, last: i64, needed: i64 },

    #[error("index {index} outside of window {first}..={last}")]
    IndexOutOfRange { index: i64, first: i64, last: i64 },

    #[error("coefficient sequences have mismatched lengths (a: {a}, b: {b}, f: {f})")]
    LengthMismatch { a: usize, b: usize, f: usize },

    #[error("empty coefficient or grid window")]
    EmptyWindow,

    #[error("b[{index}] vanishes; backward sweeps need b != 0")]
    VanishingCoupling { index: i64 },

    #[error("boundary system is singular (|det| = {det:e})")]
    SingularBoundarySystem { det: f64 },

    #[error("splitting sequences coincide{}", fmt_index(*.index))]
    DegenerateSplit { index: Option<i64> },

    #[error("scatter denominator vanishes at index {index}")]
    SingularScatterDenominator { index: i64 },

    #[error("expected a scatter-form step matrix at position {position}")]
    NotScatterForm { position: usize },

    #[error("star product is singular (|1 - A22 B11| = {value:e})")]
    StarProductSingular { value: f64 },

    #[error("inverse Riccati step hits a pole at index {index}")]
    PoleHit { index: i64 },

    #[error("Riccati iteration left the admissible range at index {index}")]
    RiccatiDiverged { index: i64 },

    #[error("no physical (positive real) root for cell {cell}")]
    NoPhysicalRoot { cell: usize },

    #[error("invalid slab profile: {0}")]
    InvalidProfile(String),

    #[error("invalid chain design: {0}")]
    InvalidDesign(String),
}

fn fmt_index(index: Option<i64>) -> String {
    index.map(|k| format!(" at index {k}")).unwrap_or_default()
}
