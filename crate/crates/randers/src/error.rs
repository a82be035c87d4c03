//! Error taxonomy for the solver library.

/// Errors raised by the metric, geodesic, connection, and planning layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The wind reaches or exceeds unit speed at the queried position, so the
    /// Randers construction is undefined there. Raised strictly at
    /// `|W| >= 1 - 1e-12`; the guard band keeps `1/lambda` well conditioned.
    #[error("convexity violation at ({x}, {y}): |W| = {speed} >= 1")]
    ConvexityViolation { x: f64, y: f64, speed: f64 },

    /// A Finsler norm was evaluated on the zero vector.
    #[error("zero velocity vector")]
    ZeroVector,

    /// `|W| >= 1` on every neighbourhood of the requested center, so no
    /// convexity interval exists.
    #[error("|W| >= 1 on every neighbourhood of y = {center}")]
    NotWeakEverywhere { center: f64 },

    /// The velocity Hessian of F^2/2 became numerically singular. This
    /// signals a breach of the strong-convexity guard.
    #[error("degenerate fundamental tensor at ({x}, {y}) (det = {det})")]
    DegenerateHessian { x: f64, y: f64, det: f64 },

    /// Adaptive step control underflowed without meeting its tolerance,
    /// typically just outside the resolvable neighbourhood of the convexity
    /// boundary.
    #[error("step size underflow at t = {t} (h = {h})")]
    StepFailure { t: f64, h: f64 },

    /// No shooting seed produced a geodesic reaching the target.
    #[error("no geodesic connection from ({from_x}, {from_y}) to ({to_x}, {to_y})")]
    NoConnection {
        from_x: f64,
        from_y: f64,
        to_x: f64,
        to_y: f64,
    },

    /// The cross-track wind reaches unit speed on a track segment, so no
    /// heading can hold the straight course over ground.
    #[error("track infeasible on segment {segment}: |cross-track wind| = {w_perp} >= 1")]
    InfeasibleTrack { segment: usize, w_perp: f64 },

    /// Waypoint translation exhausted its iteration budget without reaching
    /// a complete search.
    #[error("coverage still incomplete after {iters} translations (worst distance {worst})")]
    CoverageUnreachable { iters: usize, worst: f64 },

    /// Structurally invalid input (counts, signs, ranges).
    #[error("bad parameters: {0}")]
    BadParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
