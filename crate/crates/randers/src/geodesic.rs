//! Geodesic integration: single time-optimal paths, fans over the initial
//! control angle, and time fronts.
//!
//! The geodesic system `x'' = -2G(x, y; x', y')`, `y'' = -2H(x, y; x', y')`
//! is integrated in the time parameterization (`F(pos, vel) = 1`) by an
//! embedded Dormand-Prince 5(4) pair with PI step control. Leaving the open
//! convexity domain is an event: the offending step is never extrapolated,
//! and the crossing is located on cubic Hermite dense output by bisection.

use crate::analysis::spray_pair;
use crate::error::{Error, Result};
use crate::geom::{Point, Vec2};
use crate::metric::eval_f_with_wind;
use crate::wind::WindField;

/// Phase-space state along a geodesic, with elapsed time in units of the
/// unit-speed normalization.
#[derive(Clone, Copy, Debug)]
pub struct GeodesicState {
    pub pos: Point,
    pub vel: Vec2,
    pub t: f64,
}

/// Why integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    TimeExhausted,
    DomainBoundary,
    TargetReached,
}

/// A time-stamped polyline solution of the geodesic system.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub samples: Vec<GeodesicState>,
    /// Initial control angle (heading of the own-velocity `u`, radians).
    pub phi0: f64,
    pub termination: Termination,
}

impl GeodesicPath {
    pub fn start(&self) -> &GeodesicState {
        &self.samples[0]
    }

    pub fn end(&self) -> &GeodesicState {
        self.samples.last().expect("paths are never empty")
    }

    /// Elapsed time from first to last sample.
    pub fn duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    /// Quarter-plane tag of the initial control angle,
    /// `floor(2 phi0 / pi) mod 4`.
    pub fn quadrant(&self) -> u8 {
        let tau = std::f64::consts::TAU;
        let phi = self.phi0.rem_euclid(tau);
        // Nudge against roundoff for angles that are exact multiples of pi/2.
        (((2.0 * phi / std::f64::consts::PI + 1e-9).floor()) as i64).rem_euclid(4) as u8
    }

    /// Worst deviation of `F(pos, vel)` from 1 over the samples.
    pub fn max_speed_defect(&self, field: &WindField) -> f64 {
        self.samples
            .iter()
            .map(|s| (eval_f_with_wind(field.eval(s.pos), s.vel) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// A family of geodesics from one start point over a range of control
/// angles.
#[derive(Clone, Copy, Debug)]
pub struct FanSpec {
    pub start: Point,
    /// Angle increment (radians), positive.
    pub d_phi: f64,
    /// Half-open angle interval `[phi_from, phi_to)`.
    pub phi_range: (f64, f64),
    pub t_max: f64,
}

impl FanSpec {
    /// Full-circle fan with the given increment.
    pub fn full(start: Point, d_phi: f64, t_max: f64) -> Self {
        FanSpec {
            start,
            d_phi,
            phi_range: (0.0, std::f64::consts::TAU),
            t_max,
        }
    }
}

/// Integrator tolerances and step bounds.
#[derive(Clone, Copy, Debug)]
pub struct IntegrateOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub h_max: f64,
    pub h_init: f64,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        IntegrateOpts {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            h_max: 0.25,
            h_init: 1e-3,
        }
    }
}

impl IntegrateOpts {
    pub fn with_tol(tol: f64) -> Self {
        IntegrateOpts {
            abs_tol: tol,
            rel_tol: tol,
            ..IntegrateOpts::default()
        }
    }
}

/// Unit-own-speed state at `start` with control angle `phi0`: the resultant
/// velocity is `unit(phi0) + W(start)`, which satisfies `F = 1` exactly.
pub fn initial_state(field: &WindField, start: Point, phi0: f64) -> Result<GeodesicState> {
    field.check_inside(start)?;
    Ok(GeodesicState {
        pos: start,
        vel: Vec2::unit(phi0) + field.eval(start),
        t: 0.0,
    })
}

/// Integrate with default options.
pub fn integrate(field: &WindField, init: GeodesicState, t_max: f64) -> Result<GeodesicPath> {
    integrate_with(field, init, t_max, &IntegrateOpts::default())
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const H_MIN: f64 = 1e-13;
/// Geodesics stop this far inside the open convexity boundary so the metric
/// stays evaluable on the final sample.
const EVENT_MARGIN: f64 = 1e-9;
/// Event location tolerance in t.
const EVENT_T_TOL: f64 = 1e-10;

type State4 = [f64; 4];

fn rhs(field: &WindField, s: &State4) -> Result<State4> {
    let (g, h) = spray_pair(field, Point::new(s[0], s[1]), Vec2::new(s[2], s[3]))?;
    Ok([s[2], s[3], -2.0 * g, -2.0 * h])
}

fn hermite(y0: &State4, f0: &State4, y1: &State4, f1: &State4, h: f64, theta: f64) -> State4 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let b0 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let b1 = t3 - 2.0 * t2 + theta;
    let b2 = -2.0 * t3 + 3.0 * t2;
    let b3 = t3 - t2;
    std::array::from_fn(|i| b0 * y0[i] + b1 * h * f0[i] + b2 * y1[i] + b3 * h * f1[i])
}

fn state_of(y: &State4, t: f64) -> GeodesicState {
    GeodesicState {
        pos: Point::new(y[0], y[1]),
        vel: Vec2::new(y[2], y[3]),
        t,
    }
}

/// Integrate the geodesic system from `init` until `t_max`, the convexity
/// boundary, or a step failure. Along the accepted samples the unit-speed
/// invariant `|F - 1| <= 1e-6` holds; the velocity is rescaled to `F = 1`
/// after every accepted step, which reparameterizes nothing because the
/// spray is homogeneous of degree two.
pub fn integrate_with(
    field: &WindField,
    init: GeodesicState,
    t_max: f64,
    opts: &IntegrateOpts,
) -> Result<GeodesicPath> {
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::BadParams(format!("t_max must be positive, got {t_max}")));
    }
    field.check_inside(init.pos)?;
    let domain = field.convexity_bound()?;
    let phi0 = (init.vel - field.eval(init.pos)).angle();

    let mut y: State4 = [init.pos.x, init.pos.y, init.vel.x, init.vel.y];
    let mut t = init.t;
    let t_end = init.t + t_max;
    let mut f = rhs(field, &y)?;
    let mut samples = vec![state_of(&y, t)];
    let mut h = opts.h_init.min(opts.h_max).min(t_max);
    let mut err_prev: f64 = 1e-2;
    let mut k = [[0.0f64; 4]; 7];

    loop {
        if t_end - t <= 1e-14 * t_end.abs().max(1.0) {
            return Ok(GeodesicPath {
                samples,
                phi0,
                termination: Termination::TimeExhausted,
            });
        }
        h = h.min(t_end - t);
        if h < H_MIN {
            // Step control has collapsed. If we are essentially at the
            // boundary, report arrival there; otherwise surface the failure.
            if domain.margin(y[1]) <= 1e-6 {
                return Ok(GeodesicPath {
                    samples,
                    phi0,
                    termination: Termination::DomainBoundary,
                });
            }
            return Err(Error::StepFailure { t, h });
        }

        // One attempted Dormand-Prince step; any stage outside the weak-wind
        // region rejects the attempt.
        k[0] = f;
        let mut stage_failed = false;
        for i in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(i + 1) {
                let a = A[i][j];
                if a != 0.0 {
                    for (m, ysm) in ys.iter_mut().enumerate() {
                        *ysm += h * a * kj[m];
                    }
                }
            }
            let _ = C; // stage times unused: the system is autonomous
            match rhs(field, &ys) {
                Ok(ki) => k[i + 1] = ki,
                Err(_) => {
                    stage_failed = true;
                    break;
                }
            }
        }
        if stage_failed {
            h *= 0.5;
            continue;
        }

        // 5th-order solution is the last stage argument (FSAL pair).
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[5][j];
            if a != 0.0 {
                for (m, ym) in y_new.iter_mut().enumerate() {
                    *ym += h * a * kj[m];
                }
            }
        }
        let f_new = k[6];

        let mut err: f64 = 0.0;
        for m in 0..4 {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[m];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[m].abs().max(y_new[m].abs());
            err += (e / scale) * (e / scale);
        }
        err = (err / 4.0).sqrt();

        if err > 1.0 {
            let factor = (0.9 * err.powf(-0.2)).max(0.2);
            h *= factor;
            continue;
        }

        // Accepted. Check the boundary event before committing.
        let t_new = t + h;
        if domain.margin(y_new[1]) - EVENT_MARGIN <= 0.0 {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            while (hi - lo) * h > EVENT_T_TOL {
                let mid = 0.5 * (lo + hi);
                let ym = hermite(&y, &f, &y_new, &f_new, h, mid);
                if domain.margin(ym[1]) - EVENT_MARGIN <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let mut y_hit = hermite(&y, &f, &y_new, &f_new, h, hi);
            // Clamp onto the event surface and restore exact unit speed.
            let (lo_b, hi_b) = (domain.y_min + EVENT_MARGIN, domain.y_max - EVENT_MARGIN);
            y_hit[1] = y_hit[1].clamp(lo_b.min(hi_b), hi_b.max(lo_b));
            let pos = Point::new(y_hit[0], y_hit[1]);
            let w = field.eval(pos);
            let fval = eval_f_with_wind(w, Vec2::new(y_hit[2], y_hit[3]));
            y_hit[2] /= fval;
            y_hit[3] /= fval;
            samples.push(state_of(&y_hit, t + hi * h));
            return Ok(GeodesicPath {
                samples,
                phi0,
                termination: Termination::DomainBoundary,
            });
        }

        // Rescale to exact unit Finsler speed; record-keeping only.
        let w = field.eval(Point::new(y_new[0], y_new[1]));
        let fval = eval_f_with_wind(w, Vec2::new(y_new[2], y_new[3]));
        let s = 1.0 / fval;
        y_new[2] *= s;
        y_new[3] *= s;
        f = [
            y_new[2],
            y_new[3],
            f_new[2] * s * s,
            f_new[3] * s * s,
        ];
        y = y_new;
        t = t_new;
        samples.push(state_of(&y, t));

        // PI controller (Hairer's dopri5 constants).
        let err_clamped = err.max(1e-10);
        let factor = (0.9 * err_clamped.powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 5.0);
        err_prev = err_clamped;
        h = (h * factor).min(opts.h_max);
    }
}

/// One geodesic per control angle in the fan range. Quadrant tags are
/// available on each returned path.
pub fn fan(field: &WindField, spec: &FanSpec) -> Result<Vec<GeodesicPath>> {
    if spec.d_phi.is_nan() || spec.d_phi <= 0.0 {
        return Err(Error::BadParams(format!(
            "fan angle increment must be positive, got {}",
            spec.d_phi
        )));
    }
    let (from, to) = spec.phi_range;
    if to.is_nan() || from.is_nan() || to <= from {
        return Err(Error::BadParams(format!(
            "empty fan angle range [{from}, {to})"
        )));
    }
    let n = ((to - from) / spec.d_phi - 1e-9).ceil().max(1.0) as usize;
    (0..n)
        .map(|i| {
            let phi0 = from + i as f64 * spec.d_phi;
            let init = initial_state(field, spec.start, phi0)?;
            let mut path = integrate(field, init, spec.t_max)?;
            // Pin the angle exactly; reconstructing it from the velocity
            // would round through atan2.
            path.phi0 = phi0;
            Ok(path)
        })
        .collect()
}

/// Endpoints at elapsed time `t` of `n` geodesics fanned uniformly over
/// `[0, 2 pi)`. Members that reach the convexity boundary earlier contribute
/// their boundary point.
pub fn time_front(field: &WindField, start: Point, t: f64, n: usize) -> Result<Vec<Point>> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::BadParams(format!("front time must be positive, got {t}")));
    }
    if n < 3 {
        return Err(Error::BadParams(format!(
            "time front needs at least 3 members, got {n}"
        )));
    }
    (0..n)
        .map(|i| {
            let phi0 = std::f64::consts::TAU * i as f64 / n as f64;
            let init = initial_state(field, start, phi0)?;
            let path = integrate(field, init, t)?;
            Ok(path.end().pos)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::eval_f;

    #[test]
    fn initial_states_by_vector_addition() {
        let s = initial_state(&WindField::Zero, Point::ZERO, 0.0).unwrap();
        assert!((s.vel - Vec2::new(1.0, 0.0)).norm() < 1e-15);

        let s = initial_state(
            &WindField::Shear,
            Point::new(0.0, -0.5),
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap();
        assert!((s.vel - Vec2::new(-0.5, 1.0)).norm() < 1e-15);

        let s = initial_state(
            &WindField::constant(0.3, 0.4),
            Point::ZERO,
            std::f64::consts::PI,
        )
        .unwrap();
        assert!((s.vel - Vec2::new(-0.7, 0.4)).norm() < 1e-12);
        let f = eval_f(&WindField::constant(0.3, 0.4), Point::ZERO, s.vel).unwrap();
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_wind_geodesic_is_straight() {
        let init = initial_state(&WindField::Zero, Point::ZERO, std::f64::consts::FRAC_PI_4)
            .unwrap();
        let path = integrate(&WindField::Zero, init, 2.0).unwrap();
        assert_eq!(path.termination, Termination::TimeExhausted);
        let end = path.end();
        let sqrt2 = std::f64::consts::SQRT_2;
        assert!((end.pos - Point::new(sqrt2, sqrt2)).norm() < 1e-7);
        assert!((end.t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_wind_geodesics_are_collinear() {
        let field = WindField::constant(0.4, -0.2);
        let init = initial_state(&field, Point::new(1.0, 1.0), 0.7).unwrap();
        let path = integrate(&field, init, 5.0).unwrap();
        let a = path.start().pos;
        let b = path.end().pos;
        let dir = (b - a).normalized();
        for s in &path.samples {
            let off = (s.pos - a).cross(dir);
            assert!(off.abs() < 1e-9, "collinearity defect {off}");
        }
    }

    #[test]
    fn shear_upward_shot_reaches_boundary() {
        let field = WindField::Shear;
        let init = initial_state(&field, Point::new(0.0, -0.5), std::f64::consts::FRAC_PI_2)
            .unwrap();
        let path = integrate(&field, init, 50.0).unwrap();
        assert_eq!(path.termination, Termination::DomainBoundary);
        let end = path.end();
        assert!((end.pos.y - 1.0).abs() < 1e-6, "stopped at y = {}", end.pos.y);
        // This particular control holds theta = pi/2, so arrival is at t = 1.5.
        assert!((end.t - 1.5).abs() < 1e-6, "arrival t = {}", end.t);
        for s in &path.samples {
            assert!(s.pos.y.abs() < 1.0);
        }
    }

    #[test]
    fn unit_speed_is_conserved() {
        let field = WindField::Shear;
        for phi_deg in [10.0f64, 100.0, 200.0, 340.0] {
            let init =
                initial_state(&field, Point::new(0.0, -0.5), phi_deg.to_radians()).unwrap();
            let path = integrate(&field, init, 20.0).unwrap();
            assert!(path.max_speed_defect(&field) <= 1e-6);
            // Samples strictly increasing in t.
            for pair in path.samples.windows(2) {
                assert!(pair[1].t > pair[0].t);
            }
        }
    }

    #[test]
    fn fan_counts_and_quadrants() {
        let field = WindField::Shear;
        let spec = FanSpec::full(Point::new(0.0, -0.5), std::f64::consts::PI / 18.0, 3.0);
        let paths = fan(&field, &spec).unwrap();
        assert_eq!(paths.len(), 36);
        let mut per_quadrant = [0usize; 4];
        for p in &paths {
            per_quadrant[p.quadrant() as usize] += 1;
        }
        assert_eq!(per_quadrant, [9, 9, 9, 9]);

        let spec = FanSpec {
            start: Point::new(0.0, -0.5),
            d_phi: std::f64::consts::PI / 18.0,
            phi_range: (0.0, std::f64::consts::FRAC_PI_2),
            t_max: 1.0,
        };
        let paths = fan(&field, &spec).unwrap();
        assert_eq!(paths.len(), 9);
        assert!(paths.iter().all(|p| p.quadrant() == 0));
    }

    #[test]
    fn front_under_constant_wind_is_translated_circle() {
        let field = WindField::constant(0.5, 0.0);
        let pts = time_front(&field, Point::ZERO, 1.0, 4).unwrap();
        let expect = [
            Point::new(1.5, 0.0),
            Point::new(0.5, 1.0),
            Point::new(-0.5, 0.0),
            Point::new(0.5, -1.0),
        ];
        for (p, e) in pts.iter().zip(expect) {
            assert!((*p - e).norm() < 1e-9);
        }
    }

    #[test]
    fn quartic_fan_from_near_bank_reenters() {
        let field = WindField::quartic_river();
        let y0 = field.convexity_bound().unwrap().y_max;
        let spec = FanSpec::full(
            Point::new(0.0, y0 - 1e-6),
            std::f64::consts::PI / 9.0,
            6.0,
        );
        let paths = fan(&field, &spec).unwrap();
        assert_eq!(paths.len(), 18);
        // Some members dive into the strip and come back out to a bank.
        let reentries = paths
            .iter()
            .filter(|p| {
                p.termination == Termination::DomainBoundary
                    && p.samples.iter().any(|s| s.pos.y < y0 - 0.5)
            })
            .count();
        assert!(reentries > 0);
        for p in &paths {
            for s in &p.samples {
                assert!(s.pos.y.abs() <= y0);
            }
        }
    }

    // Endpoint error of the fixed-step 5th-order propagation should shrink
    // like h^5; the fitted slope must clear 3.5.
    #[test]
    fn fixed_step_convergence_order() {
        let field = WindField::Shear;
        let init = initial_state(&field, Point::new(0.0, -0.5), 0.3).unwrap();
        let reference = integrate_with(
            &field,
            init,
            1.0,
            &IntegrateOpts::with_tol(1e-13),
        )
        .unwrap();
        let ref_end = reference.end().pos;

        let fixed = |h: f64| -> Point {
            let mut y: State4 = [init.pos.x, init.pos.y, init.vel.x, init.vel.y];
            let steps = (1.0 / h).round() as usize;
            let mut k = [[0.0f64; 4]; 7];
            for _ in 0..steps {
                k[0] = rhs(&field, &y).unwrap();
                for i in 0..6 {
                    let mut ys = y;
                    for (j, kj) in k.iter().enumerate().take(i + 1) {
                        let a = A[i][j];
                        if a != 0.0 {
                            for (m, ysm) in ys.iter_mut().enumerate() {
                                *ysm += h * a * kj[m];
                            }
                        }
                    }
                    k[i + 1] = rhs(&field, &ys).unwrap();
                }
                for (j, kj) in k.iter().enumerate().take(6) {
                    let a = A[5][j];
                    if a != 0.0 {
                        for (m, ym) in y.iter_mut().enumerate() {
                            *ym += h * a * kj[m];
                        }
                    }
                }
            }
            Point::new(y[0], y[1])
        };

        let hs = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hs.iter().map(|&h| (fixed(h) - ref_end).norm()).collect();
        // Least-squares slope of log(err) against log(h).
        let n = hs.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for (&h, &e) in hs.iter().zip(&errs) {
            let (x, y) = (h.ln(), e.max(1e-16).ln());
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope >= 3.5, "convergence slope {slope}, errors {errs:?}");
    }

    #[test]
    fn front_matches_indicatrix_to_first_order() {
        let field = WindField::Shear;
        let t = 0.01;
        let front = time_front(&field, Point::ZERO, t, 16).unwrap();
        let ind = crate::metric::indicatrix(&field, Point::ZERO, 16).unwrap();
        for (p, v) in front.iter().zip(ind) {
            assert!((*p - v * t).norm() < 5.0 * t * t);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            integrate(
                &WindField::Zero,
                initial_state(&WindField::Zero, Point::ZERO, 0.0).unwrap(),
                -1.0
            ),
            Err(Error::BadParams(_))
        ));
        assert!(matches!(
            initial_state(&WindField::Shear, Point::new(0.0, 1.2), 0.0),
            Err(Error::ConvexityViolation { .. })
        ));
    }
}
