//! Time-optimal navigation on a windy plane via Randers metrics.
//!
//! A vessel of unit own-speed moving through a weak stationary wind
//! (`|W| < 1`) travels time-optimally along the geodesics of a Randers
//! metric built from the pair (Euclidean background, wind). This crate
//! provides:
//!
//! - the wind-field catalogue and convexity domains ([`wind`]),
//! - the Randers metric and its split `F = alpha + beta` ([`metric`]),
//! - fundamental tensor, spray coefficients, flag curvature and
//!   projective-flatness residuals ([`analysis`]),
//! - geodesic integration: single paths, fans, time fronts ([`geodesic`]),
//! - two-point time-optimal connections by shooting ([`mod@connect`]),
//! - search-pattern generation and remodeling with coverage checks
//!   ([`search`]),
//! - a scenario-level invariant suite ([`diagnostics`]).

pub mod analysis;
pub mod connect;
pub mod diagnostics;
pub mod error;
pub mod geodesic;
pub mod geom;
mod jet;
pub mod metric;
pub mod search;
pub mod wind;

pub use analysis::{
    curvature_profile, fundamental_tensor, gauss_curvature, gauss_curvature_fd,
    projective_flatness_residual, riemannian_spray, spray_coefficients, FundamentalTensor,
    MetricChoice, SprayCoefficients, TangentSample,
};
pub use connect::{connect, track_time, ConnectOpts, ConnectResult};
pub use error::{Error, Result};
pub use geodesic::{
    fan, initial_state, integrate, integrate_with, time_front, FanSpec, GeodesicPath,
    GeodesicState, IntegrateOpts, Termination,
};
pub use geom::{Point, SymMat2, Vec2};
pub use metric::{build_randers, eval_alpha_beta, eval_f, indicatrix, RandersData};
pub use search::{
    compare, coverage_check, generate_pattern, nominal_domain, plan_optimal, plan_standard,
    Comparison, CoverageReport, Domain, PatternKind, PlanOpts, SearchPattern, SearchPlan,
};
pub use wind::{ConvexityDomain, CustomWind, WindField, WindJacobian};
