use thiserror::Error;

/// Errors shared by all modules. Variants carry the numeric witness that
/// triggered them so callers (and the CLI) can report it.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("polynomial mixes even- and odd-degree terms")]
    MixedParity,

    #[error("not divisible: residual {residual:.3e} exceeds tolerance")]
    NotDivisible { residual: f64 },

    #[error("degenerate quadratic form: |det B| = {det:.3e} is below threshold")]
    Degenerate { det: f64 },

    #[error("graded solve failed: condition estimate {cond:.3e}")]
    SolveFailure { cond: f64 },

    #[error("zero binary form")]
    ZeroForm,

    #[error("root iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("projective points coincide; use a tangent line instead")]
    CoincidentPoints,

    #[error("divisor is not closed under conjugation")]
    NotConjugateClosed,

    #[error("(2d-1)!! overflows 64 bits for d = {d}")]
    Overflow { d: u32 },

    #[error("enumeration of size {size} exceeds the limit {limit}")]
    ExplosionGuard { size: u128, limit: u128 },

    #[error("polynomial is divisible by the quadratic form")]
    DivisibleInput,

    #[error("no probe point found away from the divisor")]
    ProbeDegenerate,

    #[error("polynomial is not harmonic: residual {residual:.3e}")]
    NotHarmonic { residual: f64 },

    #[error("no direction set matched: best relative distance {distance:.3e}")]
    MaxwellMismatch { distance: f64 },

    #[error("point is off the surface: |Q(v) - 1| = {deviation:.3e}")]
    OffSurface { deviation: f64 },

    #[error("numerical rank is indeterminate near the threshold")]
    RankIndeterminate,

    #[error("rank deficient basis: expected {expected} elements, got {got}")]
    RankDeficiency { expected: usize, got: usize },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable code, used in structured CLI error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::MixedParity => "mixed_parity",
            Error::NotDivisible { .. } => "not_divisible",
            Error::Degenerate { .. } => "degenerate",
            Error::SolveFailure { .. } => "solve_failure",
            Error::ZeroForm => "zero_form",
            Error::NoConvergence { .. } => "no_convergence",
            Error::CoincidentPoints => "coincident_points",
            Error::NotConjugateClosed => "not_conjugate_closed",
            Error::Overflow { .. } => "overflow",
            Error::ExplosionGuard { .. } => "explosion_guard",
            Error::DivisibleInput => "divisible_input",
            Error::ProbeDegenerate => "probe_degenerate",
            Error::NotHarmonic { .. } => "not_harmonic",
            Error::MaxwellMismatch { .. } => "maxwell_mismatch",
            Error::OffSurface { .. } => "off_surface",
            Error::RankIndeterminate => "rank_indeterminate",
            Error::RankDeficiency { .. } => "rank_deficiency",
            Error::Invalid(_) => "invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
