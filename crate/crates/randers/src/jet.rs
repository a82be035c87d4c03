//! Exact first- and second-order partials of the metric on the tangent
//! bundle, assembled in closed form from the wind value and jacobian.
//!
//! Everything downstream (fundamental tensor, spray coefficients, flatness
//! residuals, the geodesic right-hand side) reads from these jets, so no
//! production path ever differentiates numerically.

use crate::error::{Error, Result};
use crate::geom::{Point, Vec2};
use crate::wind::WindField;

/// Which norm the jet describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricKind {
    /// The full Randers metric `F = alpha + beta`.
    Randers,
    /// The Riemannian term `alpha` alone.
    Alpha,
}

/// Value and partials of the metric `m(x, y; u, v)` at one tangent vector.
/// Mixed second partials in two velocity or one position and one velocity
/// slot are all that the spray formulas require.
#[derive(Clone, Copy, Debug, Default)]
pub struct MetricJet {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub dx: f64,
    pub dy: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
    pub dxu: f64,
    pub dxv: f64,
    pub dyu: f64,
    pub dyv: f64,
}

/// Evaluate the jet of `F` or `alpha` at `(pos; vel)`.
///
/// With `W = (w1, w2)`, `c = u w2 - v w1`, `d = u w1 + v w2`,
/// `rho = u^2 + v^2 - c^2` and `lambda = 1 - |W|^2`, both norms share the
/// shape `m = (sqrt(rho) - kappa d) / lambda` with `kappa = 1` for the
/// Randers metric and `kappa = 0` for its Riemannian term.
pub fn metric_jet(
    field: &WindField,
    pos: Point,
    vel: Vec2,
    kind: MetricKind,
) -> Result<MetricJet> {
    field.check_inside(pos)?;
    if vel.norm2() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let w = field.eval(pos);
    let jac = field.jacobian(pos);
    let kappa = match kind {
        MetricKind::Randers => 1.0,
        MetricKind::Alpha => 0.0,
    };

    let (u, v) = (vel.x, vel.y);
    let (w1, w2) = (w.x, w.y);
    let s = w1 * w1 + w2 * w2;
    let lambda = 1.0 - s;
    let c = u * w2 - v * w1;
    let d = u * w1 + v * w2;
    let rho = u * u + v * v - c * c;
    // Inside the weak-wind region rho >= lambda |vel|^2 > 0.
    debug_assert!(rho > 0.0);
    let p = rho.sqrt();

    let m = (p - kappa * d) / lambda;

    // Velocity partials.
    let p_u = (u - c * w2) / p;
    let p_v = (v + c * w1) / p;
    let m_u = (p_u - kappa * w1) / lambda;
    let m_v = (p_v - kappa * w2) / lambda;
    let p_uu = (1.0 - w2 * w2 - p_u * p_u) / p;
    let p_vv = (1.0 - w1 * w1 - p_v * p_v) / p;
    let p_uv = (w1 * w2 - p_u * p_v) / p;

    // Position partials through the wind jacobian; xi ranges over {x, y}.
    let pos_partial = |w1_xi: f64, w2_xi: f64| {
        let s_xi = 2.0 * (w1 * w1_xi + w2 * w2_xi);
        let c_xi = u * w2_xi - v * w1_xi;
        let d_xi = u * w1_xi + v * w2_xi;
        let p_xi = -c * c_xi / p;
        let m_xi = (p_xi - kappa * d_xi) / lambda + m * s_xi / lambda;
        let p_u_xi = (-c_xi * w2 - c * w2_xi) / p - p_u * p_xi / p;
        let p_v_xi = (c_xi * w1 + c * w1_xi) / p - p_v * p_xi / p;
        let m_u_xi = (p_u_xi - kappa * w1_xi) / lambda + m_u * s_xi / lambda;
        let m_v_xi = (p_v_xi - kappa * w2_xi) / lambda + m_v * s_xi / lambda;
        (m_xi, m_u_xi, m_v_xi)
    };
    let (m_x, m_xu, m_xv) = pos_partial(jac.dw1_dx, jac.dw2_dx);
    let (m_y, m_yu, m_yv) = pos_partial(jac.dw1_dy, jac.dw2_dy);

    Ok(MetricJet {
        value: m,
        du: m_u,
        dv: m_v,
        dx: m_x,
        dy: m_y,
        duu: p_uu / lambda,
        duv: p_uv / lambda,
        dvv: p_vv / lambda,
        dxu: m_xu,
        dxv: m_xv,
        dyu: m_yu,
        dyv: m_yv,
    })
}

/// Partials of the energy `L = m^2 / 2`, the quantity entering the spray
/// formulas and the fundamental tensor.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnergyJet {
    pub value: f64,
    pub dx: f64,
    pub dy: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
    pub dxu: f64,
    pub dxv: f64,
    pub dyu: f64,
    pub dyv: f64,
}

impl MetricJet {
    pub fn energy(&self) -> EnergyJet {
        let m = self.value;
        EnergyJet {
            value: 0.5 * m * m,
            dx: m * self.dx,
            dy: m * self.dy,
            duu: self.du * self.du + m * self.duu,
            duv: self.du * self.dv + m * self.duv,
            dvv: self.dv * self.dv + m * self.dvv,
            dxu: self.dx * self.du + m * self.dxu,
            dxv: self.dx * self.dv + m * self.dxv,
            dyu: self.dy * self.du + m * self.dyu,
            dyv: self.dy * self.dv + m * self.dyv,
        }
    }
}
