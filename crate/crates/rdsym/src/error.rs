//! Error type shared by the whole crate.
//!
//! Every error belongs to one of four categories that the CLI maps to
//! process exit codes: config (2), domain (3), tolerance (4), numerics (5).

use thiserror::Error;

/// Coarse error category, used for CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Config,
    Domain,
    Tolerance,
    Numerics,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Config => 2,
            Category::Domain => 3,
            Category::Tolerance => 4,
            Category::Numerics => 5,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- domain errors ----
    #[error("fractional power of a non-positive base: {base}^{exponent}")]
    FractionalPower { base: f64, exponent: f64 },

    #[error("zero raised to a non-positive power: 0^{exponent}")]
    ZeroToNonPositive { exponent: f64 },

    #[error("exponent {name} = {value} is not admissible: {why}")]
    BadExponent {
        name: &'static str,
        value: f64,
        why: &'static str,
    },

    #[error("jet point is missing the `{0}` slot")]
    MissingSlot(&'static str),

    #[error("{what} base {base} is not positive at (t, x) = ({t}, {x})")]
    NonPositiveBase {
        what: &'static str,
        base: f64,
        t: f64,
        x: f64,
    },

    #[error("family {family} restriction violated: {restriction}")]
    Restriction {
        family: u8,
        restriction: &'static str,
    },

    #[error("time {t} is outside the validity window [0, {t_max}]")]
    OutsideValidity { t: f64, t_max: f64 },

    #[error("{field} became non-positive at node {node} (x = {x}), t = {t}")]
    PositivityBreach {
        field: &'static str,
        node: usize,
        x: f64,
        t: f64,
    },

    #[error("coupling elimination requires beta1 != 0")]
    Beta1Zero,

    #[error("spectrum is not purely imaginary; closed-form profiles are out of scope")]
    NotPurelyImaginary,

    #[error("quartic spectrum is degenerate (repeated roots)")]
    DegenerateSpectrum,

    #[error("{0}")]
    Domain(String),

    // ---- numerics errors ----
    #[error("ODE solution blew up near x = {x} (|p| > {limit:e})")]
    BlowUp { x: f64, limit: f64 },

    #[error("integration step count {steps} exceeds the limit {limit}")]
    TooManySteps { steps: usize, limit: usize },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("singular interpolation system")]
    SingularSystem,

    #[error("{0}")]
    Numerics(String),

    // ---- tolerance errors ----
    #[error("{what} = {value:e} exceeds the tolerance {tol:e}")]
    ToleranceExceeded {
        what: String,
        value: f64,
        tol: f64,
    },

    // ---- config errors ----
    #[error("line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },

    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },

    #[error("missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("{0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> Category {
        use Error::*;
        match self {
            FractionalPower { .. }
            | ZeroToNonPositive { .. }
            | BadExponent { .. }
            | MissingSlot(_)
            | NonPositiveBase { .. }
            | Restriction { .. }
            | OutsideValidity { .. }
            | PositivityBreach { .. }
            | Beta1Zero
            | NotPurelyImaginary
            | DegenerateSpectrum
            | Domain(_) => Category::Domain,
            BlowUp { .. }
            | TooManySteps { .. }
            | UnstableStep { .. }
            | SingularSystem
            | Numerics(_)
            | Io(_) => Category::Numerics,
            ToleranceExceeded { .. } => Category::Tolerance,
            ConfigSyntax { .. }
            | UnknownKey { .. }
            | DuplicateKey { .. }
            | MissingKey(_)
            | Config(_) => Category::Config,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
