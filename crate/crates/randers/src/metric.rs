//! The Randers metric built from navigation data: Euclidean background plus
//! a weak wind.
//!
//! For `|W| < 1` the travel-time norm on tangent vectors is
//!
//! ```text
//! F(x, y; u, v) = (sqrt(u^2 + v^2 - (u W2 - v W1)^2) - W1 u - W2 v) / (1 - |W|^2)
//! ```
//!
//! which splits as `F = alpha + beta` into a Riemannian norm and a 1-form.
//! The unit sphere of `F` is the `W`-translate of the Euclidean unit circle,
//! so `F(u + W) = 1` whenever `|u| = 1`.

use crate::error::{Error, Result};
use crate::geom::{Point, SymMat2, Vec2};
use crate::wind::WindField;

/// Pointwise data of the Randers construction.
#[derive(Clone, Copy, Debug)]
pub struct RandersData {
    /// New Riemannian metric coefficients `a_ij = delta_ij / lambda + W_i W_j / lambda^2`.
    pub a: SymMat2,
    /// 1-form coefficients `b_i = -W_i / lambda`.
    pub b: Vec2,
    /// `lambda = 1 - |W|^2`; equals 1 exactly when the wind vanishes.
    pub lambda: f64,
    /// Wind vector at the evaluation point.
    pub w: Vec2,
}

impl RandersData {
    /// Riemannian norm `alpha(vel) = sqrt(a_ij vel^i vel^j)`.
    pub fn alpha(&self, vel: Vec2) -> f64 {
        self.a.quad(vel).sqrt()
    }

    /// 1-form value `beta(vel) = b_i vel^i`.
    pub fn beta(&self, vel: Vec2) -> f64 {
        self.b.dot(vel)
    }

    /// Norm of the 1-form in the metric `a`, `|b|_a^2 = a^{ij} b_i b_j`.
    /// Strong convexity of the Randers norm is `|b|_a < 1`.
    pub fn beta_norm(&self) -> f64 {
        self.a.inv_quad(self.b).sqrt()
    }
}

/// Assemble the pointwise Randers data at `pos`.
pub fn build_randers(field: &WindField, pos: Point) -> Result<RandersData> {
    field.check_inside(pos)?;
    let w = field.eval(pos);
    let lambda = 1.0 - w.norm2();
    // With h = delta_ij the covector W_i equals the vector components.
    let a = SymMat2::new(
        1.0 / lambda + w.x * w.x / (lambda * lambda),
        w.x * w.y / (lambda * lambda),
        1.0 / lambda + w.y * w.y / (lambda * lambda),
    );
    let b = -w * (1.0 / lambda);
    Ok(RandersData { a, b, lambda, w })
}

/// Travel-time norm `F(pos; vel)`.
pub fn eval_f(field: &WindField, pos: Point, vel: Vec2) -> Result<f64> {
    field.check_inside(pos)?;
    if vel.norm2() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let w = field.eval(pos);
    Ok(eval_f_with_wind(w, vel))
}

/// `F` given the wind vector directly; shared with the integrator hot path.
pub(crate) fn eval_f_with_wind(w: Vec2, vel: Vec2) -> f64 {
    let lambda = 1.0 - w.norm2();
    let c = vel.x * w.y - vel.y * w.x;
    ((vel.norm2() - c * c).sqrt() - w.dot(vel)) / lambda
}

/// The split `(alpha, beta)` with `alpha + beta = F` and `alpha >= |beta|`.
pub fn eval_alpha_beta(field: &WindField, pos: Point, vel: Vec2) -> Result<(f64, f64)> {
    field.check_inside(pos)?;
    if vel.norm2() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let w = field.eval(pos);
    let lambda = 1.0 - w.norm2();
    let c = vel.x * w.y - vel.y * w.x;
    let alpha = (vel.norm2() - c * c).sqrt() / lambda;
    let beta = -w.dot(vel) / lambda;
    Ok((alpha, beta))
}

/// `n` samples of the indicatrix `{v : F(v) = 1}` at `pos`: the wind
/// translate of the unit circle, sampled at angles `2 pi k / n`.
pub fn indicatrix(field: &WindField, pos: Point, n: usize) -> Result<Vec<Vec2>> {
    if n < 3 {
        return Err(Error::BadParams(format!(
            "indicatrix needs at least 3 samples, got {n}"
        )));
    }
    field.check_inside(pos)?;
    let w = field.eval(pos);
    Ok((0..n)
        .map(|k| Vec2::unit(2.0 * std::f64::consts::PI * k as f64 / n as f64) + w)
        .collect())
}
