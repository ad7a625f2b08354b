use serde::Serialize;

/// Numeric defaults used across the library. All tolerances are relative
/// unless noted otherwise; each operation that certifies a result takes the
/// tolerance explicitly so callers can override.
#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Divisibility certification: `‖q·r − p‖ ≤ div_tol · max(1, ‖p‖)`.
    pub div_tol: f64,
    /// Chordal clustering radius for projective roots.
    pub cluster_tol: f64,
    /// Relative singular-value cutoff for numerical rank decisions.
    pub rank_tol: f64,
    /// Condition-estimate limit above which graded solves abort.
    pub cond_limit: f64,
    /// Canonical-multipole dedup tolerance.
    pub dedup_tol: f64,
    /// Iteration cap for the simultaneous root solver.
    pub max_root_iters: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            div_tol: 1e-9,
            cluster_tol: 1e-7,
            rank_tol: 1e-8,
            cond_limit: 1e12,
            dedup_tol: 1e-6,
            max_root_iters: 200,
        }
    }
}

/// `|det B|` below `DEGENERACY_TOL · ‖B‖³` rejects a quadratic form.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Probe points must stay `PROBE_CLEARANCE · cluster_tol` away from the
/// divisor (chordal distance).
pub const PROBE_CLEARANCE: f64 = 10.0;

/// Attempts before giving up on a probe point.
pub const PROBE_RETRIES: usize = 5;

/// Refuse to enumerate parcellings of multiplicity functions with
/// `‖μ‖₁` beyond this.
pub const PARCEL_L1_LIMIT: u32 = 24;

/// Total multiplicity cap for fiber enumeration.
pub const FIBER_MULT_LIMIT: usize = 12;

/// Number of surface samples used by certification checks.
pub const SURFACE_SAMPLES: usize = 50;
