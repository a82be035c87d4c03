//! Differential-geometric quantities of the Randers metric: fundamental
//! tensor, spray coefficients, flag (Gauss) curvature, and projective
//! flatness residuals.

use crate::error::{Error, Result};
use crate::geom::{Point, SymMat2, Vec2};
use crate::jet::{metric_jet, EnergyJet, MetricKind};
use crate::metric::eval_f;
use crate::wind::WindField;

/// A point of the slit tangent bundle: position plus nonzero velocity.
#[derive(Clone, Copy, Debug)]
pub struct TangentSample {
    pub pos: Point,
    pub vel: Vec2,
}

impl TangentSample {
    pub fn new(x: f64, y: f64, u: f64, v: f64) -> Self {
        TangentSample {
            pos: Point::new(x, y),
            vel: Vec2::new(u, v),
        }
    }
}

/// Fundamental tensor `g_ij = 1/2 [F^2]_{y^i y^j}` at a tangent sample.
#[derive(Clone, Copy, Debug)]
pub struct FundamentalTensor {
    pub g: SymMat2,
    pub det: f64,
}

/// Spray coefficients `(G, H)` of the geodesic equation
/// `x'' + 2G = 0`, `y'' + 2H = 0`, plus the energy `L = F^2 / 2`
/// they were assembled from. Both are positively homogeneous of degree 2
/// in the velocity.
#[derive(Clone, Copy, Debug)]
pub struct SprayCoefficients {
    pub g1: f64,
    pub g2: f64,
    pub energy: f64,
}

/// Which metric a flatness residual refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricChoice {
    Randers,
    Alpha,
}

/// Half the velocity Hessian of `F^2`, in closed form.
pub fn fundamental_tensor(field: &WindField, s: &TangentSample) -> Result<FundamentalTensor> {
    let e = metric_jet(field, s.pos, s.vel, MetricKind::Randers)?.energy();
    let g = SymMat2::new(e.duu, e.duv, e.dvv);
    let det = g.det();
    if !(det.is_finite() && det > 0.0) {
        return Err(Error::DegenerateHessian {
            x: s.pos.x,
            y: s.pos.y,
            det,
        });
    }
    Ok(FundamentalTensor { g, det })
}

fn spray_from_energy(e: &EnergyJet, vel: Vec2, pos: Point) -> Result<(f64, f64)> {
    let (u, v) = (vel.x, vel.y);
    let bracket_u = e.dxu * u + e.dyu * v - e.dx;
    let bracket_v = e.dxv * u + e.dyv * v - e.dy;
    let det = e.duu * e.dvv - e.duv * e.duv;
    if !(det.is_finite() && det > 0.0) {
        return Err(Error::DegenerateHessian {
            x: pos.x,
            y: pos.y,
            det,
        });
    }
    let g1 = (e.dvv * bracket_u - e.duv * bracket_v) / (2.0 * det);
    let g2 = (e.duu * bracket_v - e.duv * bracket_u) / (2.0 * det);
    Ok((g1, g2))
}

fn spray_of(field: &WindField, s: &TangentSample, kind: MetricKind) -> Result<SprayCoefficients> {
    let e = metric_jet(field, s.pos, s.vel, kind)?.energy();
    let (g1, g2) = spray_from_energy(&e, s.vel, s.pos)?;
    Ok(SprayCoefficients {
        g1,
        g2,
        energy: e.value,
    })
}

/// Spray coefficients of the Randers metric via the general 2D formulas,
/// with all energy partials exact.
pub fn spray_coefficients(field: &WindField, s: &TangentSample) -> Result<SprayCoefficients> {
    spray_of(field, s, MetricKind::Randers)
}

/// Spray coefficients of the Riemannian term `alpha` alone.
pub fn riemannian_spray(field: &WindField, s: &TangentSample) -> Result<SprayCoefficients> {
    spray_of(field, s, MetricKind::Alpha)
}

/// Bare `(G, H)` pair for the integrator hot path.
pub(crate) fn spray_pair(field: &WindField, pos: Point, vel: Vec2) -> Result<(f64, f64)> {
    let e = metric_jet(field, pos, vel, MetricKind::Randers)?.energy();
    spray_from_energy(&e, vel, pos)
}

/// Flag (Gauss) curvature at a tangent sample.
///
/// The shear field uses the closed-form rational expression; other winds go
/// through the generic finite-difference path over the exact spray.
pub fn gauss_curvature(field: &WindField, s: &TangentSample) -> Result<f64> {
    match field {
        WindField::Shear => {
            field.check_inside(s.pos)?;
            if s.vel.norm2() == 0.0 {
                return Err(Error::ZeroVector);
            }
            Ok(shear_curvature(s.pos.y, s.vel.x, s.vel.y))
        }
        _ => gauss_curvature_fd(field, s),
    }
}

/// Generic curvature path: Richardson-extrapolated central differences of
/// the closed-form spray, evaluated at the velocity rescaled to `F = 1`
/// (the curvature is degree-0 homogeneous, so the rescaling is free and
/// fixes the derivative step scale).
pub fn gauss_curvature_fd(field: &WindField, s: &TangentSample) -> Result<f64> {
    let f_val = eval_f(field, s.pos, s.vel)?;
    let vel = s.vel * (1.0 / f_val);
    let (u, v) = (vel.x, vel.y);
    let eval = |du: f64, dv: f64, dx: f64, dy: f64| -> Result<(f64, f64)> {
        spray_pair(
            field,
            Point::new(s.pos.x + dx, s.pos.y + dy),
            Vec2::new(u + du, v + dv),
        )
    };

    let h = FD_STEP;
    let (g0, h0) = eval(0.0, 0.0, 0.0, 0.0)?;

    // First derivatives of G and H.
    let d1 = |slot: usize, take_g: bool| -> Result<f64> {
        let at = |t: f64| -> Result<f64> {
            let mut d = [0.0; 4];
            d[slot] = t;
            let (g, hh) = eval(d[0], d[1], d[2], d[3])?;
            Ok(if take_g { g } else { hh })
        };
        richardson_first(&at, h)
    };
    let g_u = d1(0, true)?;
    let g_v = d1(1, true)?;
    let g_x = d1(2, true)?;
    let h_u = d1(0, false)?;
    let h_v = d1(1, false)?;
    let h_y = d1(3, false)?;

    // Second derivatives entering Q = G_u + H_v.
    let d2 = |slot: usize, take_g: bool| -> Result<f64> {
        let at = |t: f64| -> Result<f64> {
            let mut d = [0.0; 4];
            d[slot] = t;
            let (g, hh) = eval(d[0], d[1], d[2], d[3])?;
            Ok(if take_g { g } else { hh })
        };
        richardson_second(&at, if take_g { g0 } else { h0 }, h)
    };
    let mixed = |slot_a: usize, slot_b: usize, take_g: bool| -> Result<f64> {
        let at = |ta: f64, tb: f64| -> Result<f64> {
            let mut d = [0.0; 4];
            d[slot_a] = ta;
            d[slot_b] = tb;
            let (g, hh) = eval(d[0], d[1], d[2], d[3])?;
            Ok(if take_g { g } else { hh })
        };
        richardson_mixed(&at, h)
    };

    let q_u = d2(0, true)? + mixed(0, 1, false)?; // G_uu + H_uv
    let q_v = mixed(0, 1, true)? + d2(1, false)?; // G_uv + H_vv
    let q_x = mixed(0, 2, true)? + mixed(1, 2, false)?; // G_ux + H_vx
    let q_y = mixed(0, 3, true)? + mixed(1, 3, false)?; // G_uy + H_vy

    // Ric / F^2 with F = 1 after the rescale.
    Ok(-2.0 * g_v * h_u + 2.0 * g0 * q_u - g_u * g_u + 2.0 * g_x + 2.0 * h0 * q_v
        - h_v * h_v
        + 2.0 * h_y
        - u * q_x
        - v * q_y)
}

/// Base step for curvature finite differences.
const FD_STEP: f64 = 1e-4;

fn richardson_first<F: Fn(f64) -> Result<f64>>(f: &F, h: f64) -> Result<f64> {
    let coarse = (f(h)? - f(-h)?) / (2.0 * h);
    let fine = (f(0.5 * h)? - f(-0.5 * h)?) / h;
    Ok((4.0 * fine - coarse) / 3.0)
}

fn richardson_second<F: Fn(f64) -> Result<f64>>(f: &F, center: f64, h: f64) -> Result<f64> {
    let coarse = (f(h)? - 2.0 * center + f(-h)?) / (h * h);
    let hh = 0.5 * h;
    let fine = (f(hh)? - 2.0 * center + f(-hh)?) / (hh * hh);
    Ok((4.0 * fine - coarse) / 3.0)
}

fn richardson_mixed<F: Fn(f64, f64) -> Result<f64>>(f: &F, h: f64) -> Result<f64> {
    let cross = |t: f64| -> Result<f64> {
        Ok((f(t, t)? - f(t, -t)? - f(-t, t)? + f(-t, -t)?) / (4.0 * t * t))
    };
    let coarse = cross(h)?;
    let fine = cross(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Residual of the projective-flatness system
/// `(u m_xu + v m_yu - m_x, u m_xv + v m_yv - m_y)`; the zero vector exactly
/// when the chosen metric is projectively flat at the sample.
pub fn projective_flatness_residual(
    field: &WindField,
    s: &TangentSample,
    which: MetricChoice,
) -> Result<Vec2> {
    let kind = match which {
        MetricChoice::Randers => MetricKind::Randers,
        MetricChoice::Alpha => MetricKind::Alpha,
    };
    let jet = metric_jet(field, s.pos, s.vel, kind)?;
    let (u, v) = (s.vel.x, s.vel.y);
    Ok(Vec2::new(
        u * jet.dxu + v * jet.dyu - jet.dx,
        u * jet.dxv + v * jet.dyv - jet.dy,
    ))
}

/// Curvature sampled along the admissible resultants `unit(theta) + W(pos)`
/// for `n` equally spaced control angles. Returns `(angle, K)` pairs.
pub fn curvature_profile(
    field: &WindField,
    pos: Point,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    if n < 8 {
        return Err(Error::BadParams(format!(
            "curvature profile needs at least 8 angles, got {n}"
        )));
    }
    field.check_inside(pos)?;
    let w = field.eval(pos);
    (0..n)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / n as f64;
            let vel = Vec2::unit(phi) + w;
            let kappa = gauss_curvature(field, &TangentSample { pos, vel })?;
            Ok((phi, kappa))
        })
        .collect()
}

fn poly_in_y2(y2: f64, coeffs_desc: &[f64]) -> f64 {
    coeffs_desc.iter().fold(0.0, |acc, &c| acc * y2 + c)
}

/// Closed-form Gauss curvature of the shear-wind Randers metric,
/// `K = -3 k_n / k_d`.
fn shear_curvature(y: f64, u: f64, v: f64) -> f64 {
    let y2 = y * y;
    let v2 = v * v;
    let delta = y2 - 1.0;
    let p = (u * u - v2 * delta).sqrt();

    let core = y * (y2 + 3.0) * u * u * u - (3.0 * y2 + 1.0) * p * u * u
        - 3.0 * v2 * y * delta * u
        + v2 * delta * p;
    let k_d = 4.0 * p * (p - u * y).powi(2) * core.powi(4);

    let u_pow = |n: i32| u.powi(n);
    let d_pow = |n: i32| delta.powi(n);
    let v_pow = |n: i32| v.powi(n);

    let k_n = -4.0
        * y
        * poly_in_y2(y2, &[7.0, 182.0, 1001.0, 1716.0, 1001.0, 182.0, 7.0])
        * u_pow(15)
        + 2.0
            * poly_in_y2(y2, &[1.0, 91.0, 1001.0, 3003.0, 3003.0, 1001.0, 91.0, 1.0])
            * p
            * u_pow(14)
        + 32.0
            * v2
            * y
            * poly_in_y2(y2, &[2.0, 63.0, 364.0, 429.0, -286.0, -455.0, -112.0, -5.0])
            * u_pow(13)
        + v2
            * poly_in_y2(
                y2,
                &[-3.0, -374.0, -4914.0, -14014.0, -3432.0, 14014.0, 7826.0, 886.0, 11.0],
            )
            * p
            * u_pow(12)
        - 2.0
            * v_pow(4)
            * y
            * d_pow(2)
            * poly_in_y2(y2, &[23.0, 1056.0, 8921.0, 21648.0, 16929.0, 3968.0, 191.0])
            * u_pow(11)
        + v_pow(4)
            * d_pow(2)
            * poly_in_y2(
                y2,
                &[1.0, 241.0, 4895.0, 23199.0, 33495.0, 15191.0, 1801.0, 25.0],
            )
            * p
            * u_pow(10)
        + 2.0
            * v_pow(6)
            * y
            * d_pow(3)
            * poly_in_y2(y2, &[5.0, 440.0, 5379.0, 16896.0, 16115.0, 4440.0, 245.0])
            * u_pow(9)
        - 3.0
            * v_pow(6)
            * d_pow(3)
            * poly_in_y2(y2, &[15.0, 605.0, 4224.0, 7986.0, 4455.0, 625.0, 10.0])
            * p
            * u_pow(8)
        - 4.0
            * v_pow(8)
            * y
            * d_pow(4)
            * poly_in_y2(y2, &[30.0, 723.0, 3330.0, 4133.0, 1390.0, 90.0])
            * u_pow(7)
        + 2.0
            * v_pow(8)
            * d_pow(4)
            * poly_in_y2(y2, &[105.0, 1491.0, 4197.0, 3075.0, 530.0, 10.0])
            * p
            * u_pow(6)
        + 4.0
            * v_pow(10)
            * y
            * d_pow(5)
            * poly_in_y2(y2, &[63.0, 588.0, 1080.0, 472.0, 37.0])
            * u_pow(5)
        - v_pow(10)
            * d_pow(5)
            * poly_in_y2(y2, &[210.0, 1245.0, 1367.0, 307.0, 7.0])
            * p
            * u_pow(4)
        - 2.0
            * v_pow(12)
            * y
            * d_pow(6)
            * poly_in_y2(y2, &[60.0, 235.0, 152.0, 15.0])
            * u_pow(3)
        + v_pow(12)
            * d_pow(6)
            * poly_in_y2(y2, &[45.0, 113.0, 37.0, 1.0])
            * p
            * u_pow(2)
        + 2.0 * v_pow(14) * y * d_pow(7) * poly_in_y2(y2, &[5.0, 8.0, 1.0]) * u
        - v_pow(14) * y2 * d_pow(7) * (y2 + 1.0) * p;

    -3.0 * k_n / k_d
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_2_INV: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn euclidean_tensor_is_identity() {
        let s = TangentSample::new(1.0, -2.0, 0.4, 0.9);
        let t = fundamental_tensor(&WindField::Zero, &s).unwrap();
        assert!((t.g.xx - 1.0).abs() < 1e-15);
        assert!(t.g.xy.abs() < 1e-15);
        assert!((t.g.yy - 1.0).abs() < 1e-15);
        assert!((t.det - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shear_tensor_at_midstream_is_identity() {
        // W vanishes at y = 0 and g only sees velocity partials there.
        let s = TangentSample::new(0.0, 0.0, 1.0, 0.0);
        let t = fundamental_tensor(&WindField::Shear, &s).unwrap();
        assert!((t.g.xx - 1.0).abs() < 1e-14);
        assert!(t.g.xy.abs() < 1e-14);
        assert!((t.g.yy - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_is_degree_zero_homogeneous() {
        let field = WindField::Shear;
        let s = TangentSample::new(0.0, 0.5, 1.0, 1.0);
        let t1 = fundamental_tensor(&field, &s).unwrap();
        for k in [0.5, 3.0] {
            let sk = TangentSample::new(0.0, 0.5, k, k);
            let tk = fundamental_tensor(&field, &sk).unwrap();
            assert!((t1.g.xx - tk.g.xx).abs() <= 1e-12 * t1.g.xx.abs());
            assert!((t1.g.xy - tk.g.xy).abs() <= 1e-12 * t1.g.xy.abs().max(1.0));
            assert!((t1.g.yy - tk.g.yy).abs() <= 1e-12 * t1.g.yy.abs());
        }
    }

    #[test]
    fn sprays_vanish_without_position_dependence() {
        for field in [WindField::Zero, WindField::constant(0.5, 0.3)] {
            let s = TangentSample::new(0.7, -0.2, 0.9, -1.4);
            let sp = spray_coefficients(&field, &s).unwrap();
            assert_eq!(sp.g1, 0.0);
            assert_eq!(sp.g2, 0.0);
            let sa = riemannian_spray(&field, &s).unwrap();
            assert_eq!(sa.g1, 0.0);
            assert_eq!(sa.g2, 0.0);
        }
    }

    #[test]
    fn riemannian_spray_matches_shear_closed_forms() {
        // G_alpha = -2 u v y / (y^2 - 1), H_alpha = y (-2u^2 - v^2 (y^2-1)) / (2 (y^2-1)^2)
        let cases = [
            (0.5f64, 1.0f64, 1.0f64),
            (-0.5, 0.5, 0.866),
            (0.3, -1.1, 0.4),
            (0.8, 0.2, -0.7),
        ];
        for (y, u, v) in cases {
            let s = TangentSample::new(0.0, y, u, v);
            let sp = riemannian_spray(&WindField::Shear, &s).unwrap();
            let delta = y * y - 1.0;
            let g_ref = -2.0 * u * v * y / delta;
            let h_ref = y * (-2.0 * u * u - v * v * delta) / (2.0 * delta * delta);
            assert!((sp.g1 - g_ref).abs() <= 1e-12 * g_ref.abs().max(1.0), "y={y}");
            assert!((sp.g2 - h_ref).abs() <= 1e-12 * h_ref.abs().max(1.0));
        }
        // Hand substitution: y=1/2, u=v=1 gives 4/3.
        let sp = riemannian_spray(
            &WindField::Shear,
            &TangentSample::new(0.0, 0.5, 1.0, 1.0),
        )
        .unwrap();
        assert!((sp.g1 - 4.0 / 3.0).abs() < 1e-13);
        // Midstream symmetry.
        let sp0 = riemannian_spray(&WindField::Shear, &TangentSample::new(0.0, 0.0, 1.0, 1.0))
            .unwrap();
        assert_eq!(sp0.g1, 0.0);
        assert_eq!(sp0.g2, 0.0);
    }

    #[test]
    fn spray_homogeneity_degree_two() {
        let field = WindField::quartic_river();
        let s = TangentSample::new(0.2, 0.8, 0.7, -0.4);
        let sp = spray_coefficients(&field, &s).unwrap();
        for k in [0.5, 3.0] {
            let sk = TangentSample::new(0.2, 0.8, k * 0.7, k * -0.4);
            let spk = spray_coefficients(&field, &sk).unwrap();
            assert!((spk.g1 - k * k * sp.g1).abs() <= 1e-9 * spk.g1.abs().max(1e-12));
            assert!((spk.g2 - k * k * sp.g2).abs() <= 1e-9 * spk.g2.abs().max(1e-12));
        }
    }

    #[test]
    fn curvature_spot_values_from_closed_form() {
        let k1 = gauss_curvature(
            &WindField::Shear,
            &TangentSample::new(0.0, 0.0, SQRT_2_INV, SQRT_2_INV),
        )
        .unwrap();
        assert!((k1 + 9.0 / 16.0).abs() < 1e-12, "got {k1}");

        let k2 = gauss_curvature(
            &WindField::Shear,
            &TangentSample::new(0.0, -0.5, 0.0, 3f64.sqrt() / 2.0),
        )
        .unwrap();
        assert!((k2 + 15.0 / 64.0).abs() < 1e-12, "got {k2}");

        // The same value recurs at the origin for the four tilted unit vectors.
        for (u, v) in [(0.5, 0.866_025_403_784_438_6), (-0.5, 0.866_025_403_784_438_6)] {
            for sign in [1.0, -1.0] {
                let k = gauss_curvature(
                    &WindField::Shear,
                    &TangentSample::new(0.0, 0.0, u, sign * v),
                )
                .unwrap();
                assert!((k + 15.0 / 64.0).abs() < 1e-9, "got {k}");
            }
        }
    }

    #[test]
    fn fd_curvature_agrees_with_closed_form_on_shear() {
        let samples = [
            (0.0, 0.0, SQRT_2_INV, SQRT_2_INV),
            (0.0, -0.5, 0.0, 0.866_025_403_784_438_6),
            (0.3, 0.4, 1.1, -0.6),
            (-1.0, -0.3, -0.4, 0.9),
        ];
        for (x, y, u, v) in samples {
            let s = TangentSample::new(x, y, u, v);
            let exact = gauss_curvature(&WindField::Shear, &s).unwrap();
            let fd = gauss_curvature_fd(&WindField::Shear, &s).unwrap();
            assert!((exact - fd).abs() < 1e-5, "({x},{y},{u},{v}): {exact} vs {fd}");
        }
    }

    #[test]
    fn curvature_is_scale_invariant() {
        // Closed-form path: invariance down to rounding.
        let s = TangentSample::new(0.1, 0.4, 0.8, 0.5);
        let k1 = gauss_curvature(&WindField::Shear, &s).unwrap();
        for k in [0.5, 3.0] {
            let sk = TangentSample::new(0.1, 0.4, k * 0.8, k * 0.5);
            let kk = gauss_curvature(&WindField::Shear, &sk).unwrap();
            assert!((k1 - kk).abs() <= 1e-9 * k1.abs().max(1.0));
        }
        // Finite-difference path: the internal rescale to F = 1 leaves only
        // step-noise amplified rounding in the inputs.
        let field = WindField::gaussian_river();
        let s = TangentSample::new(0.1, 0.6, 0.8, 0.5);
        let k1 = gauss_curvature(&field, &s).unwrap();
        for k in [0.5, 3.0] {
            let sk = TangentSample::new(0.1, 0.6, k * 0.8, k * 0.5);
            let kk = gauss_curvature(&field, &sk).unwrap();
            assert!((k1 - kk).abs() <= 5e-6, "{k1} vs {kk}");
        }
    }

    #[test]
    fn curvature_is_x_invariant_for_river_winds() {
        for field in [WindField::Shear, WindField::quartic_river()] {
            let a = gauss_curvature(&field, &TangentSample::new(0.0, 0.35, 0.9, 0.2)).unwrap();
            let b = gauss_curvature(&field, &TangentSample::new(5.5, 0.35, 0.9, 0.2)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn flatness_residuals() {
        // Euclidean and constant winds are projectively flat.
        for field in [WindField::Zero, WindField::constant(0.6, 0.0)] {
            let r = projective_flatness_residual(
                &field,
                &TangentSample::new(0.4, -0.9, 1.2, 0.3),
                MetricChoice::Randers,
            )
            .unwrap();
            assert_eq!(r, Vec2::ZERO);
        }
        // The shear metric and its alpha term are not.
        let s = TangentSample::new(0.0, 0.5, 1.0, 1.0);
        for which in [MetricChoice::Randers, MetricChoice::Alpha] {
            let r = projective_flatness_residual(&WindField::Shear, &s, which).unwrap();
            assert!(r.norm() > 1e-6, "{which:?} residual unexpectedly small");
        }
    }

    #[test]
    fn profile_rejects_tiny_counts() {
        let err = curvature_profile(&WindField::Shear, Point::new(0.0, 0.0), 4).unwrap_err();
        assert!(matches!(err, Error::BadParams(_)));
    }

    #[test]
    fn zero_wind_profile_is_flat() {
        for (_, k) in curvature_profile(&WindField::Zero, Point::ZERO, 16).unwrap() {
            assert_eq!(k, 0.0);
        }
    }
}
