//! Two-point problem: find the control angle whose geodesic reaches a
//! target, minimizing elapsed time.
//!
//! The solver is a multistart shooting method. Every seed angle is
//! integrated once; the residual refined by a secant iteration is the
//! signed cross-track miss at the path point closest to the target, a
//! smooth scalar in the control angle that avoids solving jointly for
//! angle and arrival time.

use crate::error::{Error, Result};
use crate::geodesic::{initial_state, integrate_with, GeodesicPath, IntegrateOpts, Termination};
use crate::geom::{Point, Vec2};
use crate::wind::WindField;

/// Options of the two-point solver.
#[derive(Clone, Copy, Debug)]
pub struct ConnectOpts {
    /// Accepted final distance to the target.
    pub pos_tol: f64,
    /// Number of multistart seed angles.
    pub seed_angles: usize,
    /// Cap on per-seed integration time; derived from the crab-track
    /// baseline when absent.
    pub t_max: Option<f64>,
    /// Secant iteration budget per bracket.
    pub max_refine: usize,
    pub integrate: IntegrateOpts,
}

impl Default for ConnectOpts {
    fn default() -> Self {
        ConnectOpts {
            pos_tol: 1e-6,
            seed_angles: 72,
            t_max: None,
            max_refine: 30,
            integrate: IntegrateOpts::default(),
        }
    }
}

/// A converged two-point connection.
#[derive(Clone, Debug)]
pub struct ConnectResult {
    /// Initial control angle of the winning geodesic.
    pub phi0: f64,
    /// The geodesic truncated at the target (termination `TargetReached`).
    pub path: GeodesicPath,
    /// Elapsed time to the target.
    pub time: f64,
    /// Final distance to the target.
    pub miss: f64,
}

/// Time to hold the straight over-ground track from `from` to `to` by
/// crabbing into the wind, split into `n_seg` pieces with the wind frozen at
/// each piece midpoint. This is the non-optimal baseline a ship following a
/// standard pattern leg over ground needs.
pub fn track_time(field: &WindField, from: Point, to: Point, n_seg: usize) -> Result<f64> {
    if n_seg == 0 {
        return Err(Error::BadParams("track_time needs n_seg >= 1".into()));
    }
    let chord = to - from;
    let len = chord.norm();
    if len == 0.0 {
        return Ok(0.0);
    }
    let tau = chord * (1.0 / len);
    let piece = len / n_seg as f64;
    let mut total = 0.0;
    for i in 0..n_seg {
        let mid = from + tau * ((i as f64 + 0.5) * piece);
        let w = field.eval(mid);
        let w_par = w.dot(tau);
        let w_perp = tau.cross(w);
        if w_perp.abs() >= 1.0 {
            return Err(Error::InfeasibleTrack {
                segment: i,
                w_perp,
            });
        }
        let speed = w_par + (1.0 - w_perp * w_perp).sqrt();
        if speed <= 0.0 {
            // Headwind too strong for any heading to make way along the track.
            return Err(Error::InfeasibleTrack {
                segment: i,
                w_perp,
            });
        }
        total += piece / speed;
    }
    Ok(total)
}

/// Ground-velocity heading that holds the track direction `tau` at wind `w`.
/// Returns `(own_heading_vector, speed_over_ground)`.
pub(crate) fn crab_heading(tau: Vec2, w: Vec2) -> Option<(Vec2, f64)> {
    let w_perp = tau.cross(w);
    if w_perp.abs() >= 1.0 {
        return None;
    }
    let u_par = (1.0 - w_perp * w_perp).sqrt();
    let u = tau * u_par - tau.perp() * w_perp;
    let speed = u_par + w.dot(tau);
    if speed <= 0.0 {
        None
    } else {
        Some((u, speed))
    }
}

/// Closest approach of a path to `target`, refined inside each sample
/// interval on the cubic Hermite reconstruction.
struct Approach {
    t: f64,
    pos: Point,
    tangent: Vec2,
    dist: f64,
}

fn closest_approach(path: &GeodesicPath, target: Point) -> Approach {
    let s = &path.samples;
    let mut best = Approach {
        t: s[0].t,
        pos: s[0].pos,
        tangent: s[0].vel,
        dist: s[0].pos.dist(target),
    };
    let hermite = |a: &crate::geodesic::GeodesicState,
                   b: &crate::geodesic::GeodesicState,
                   theta: f64| {
        let h = b.t - a.t;
        let t2 = theta * theta;
        let t3 = t2 * theta;
        let (b0, b1, b2, b3) = (
            2.0 * t3 - 3.0 * t2 + 1.0,
            t3 - 2.0 * t2 + theta,
            -2.0 * t3 + 3.0 * t2,
            t3 - t2,
        );
        let pos = a.pos * b0 + a.vel * (b1 * h) + b.pos * b2 + b.vel * (b3 * h);
        // Derivative of the Hermite basis gives the tangent.
        let (d0, d1, d2, d3) = (
            6.0 * t2 - 6.0 * theta,
            3.0 * t2 - 4.0 * theta + 1.0,
            -6.0 * t2 + 6.0 * theta,
            3.0 * t2 - 2.0 * theta,
        );
        let tan = a.pos * (d0 / h) + a.vel * d1 + b.pos * (d2 / h) + b.vel * d3;
        (pos, tan)
    };
    for win in s.windows(2) {
        let (a, b) = (&win[0], &win[1]);
        // Golden-section search on the squared distance over the segment.
        let inv_phi = 0.618_033_988_749_894_8;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut x1 = hi - inv_phi * (hi - lo);
        let mut x2 = lo + inv_phi * (hi - lo);
        let d = |theta: f64| hermite(a, b, theta).0.dist(target);
        let (mut d1v, mut d2v) = (d(x1), d(x2));
        for _ in 0..40 {
            if d1v < d2v {
                hi = x2;
                x2 = x1;
                d2v = d1v;
                x1 = hi - inv_phi * (hi - lo);
                d1v = d(x1);
            } else {
                lo = x1;
                x1 = x2;
                d1v = d2v;
                x2 = lo + inv_phi * (hi - lo);
                d2v = d(x2);
            }
        }
        let theta = 0.5 * (lo + hi);
        let (pos, tan) = hermite(a, b, theta);
        let dist = pos.dist(target);
        if dist < best.dist {
            best = Approach {
                t: a.t + theta * (b.t - a.t),
                pos,
                tangent: tan,
                dist,
            };
        }
    }
    // Endpoint may beat every interior minimum.
    let end = s.last().unwrap();
    if end.pos.dist(target) < best.dist {
        best = Approach {
            t: end.t,
            pos: end.pos,
            tangent: end.vel,
            dist: end.pos.dist(target),
        };
    }
    best
}

#[derive(Clone, Copy)]
struct Shot {
    phi: f64,
    miss_signed: f64,
    dist: f64,
    time: f64,
}

fn shoot(
    field: &WindField,
    from: Point,
    to: Point,
    phi: f64,
    t_cap: f64,
    opts: &ConnectOpts,
) -> Option<Shot> {
    let init = initial_state(field, from, phi).ok()?;
    let path = integrate_with(field, init, t_cap, &opts.integrate).ok()?;
    let ap = closest_approach(&path, to);
    let tan = ap.tangent.normalized();
    Some(Shot {
        phi,
        miss_signed: tan.cross(to - ap.pos),
        dist: ap.dist,
        time: ap.t,
    })
}

/// Least-time geodesic connection between two interior points.
///
/// Seeds `opts.seed_angles` control angles, refines every sign-change
/// bracket of the signed miss by secant iteration, and returns the
/// minimal-time converged root (ties broken toward the direct bearing).
pub fn connect(
    field: &WindField,
    from: Point,
    to: Point,
    opts: &ConnectOpts,
) -> Result<ConnectResult> {
    field.check_inside(from)?;
    field.check_inside(to)?;
    let dist = from.dist(to);
    if dist == 0.0 {
        return Err(Error::BadParams("connect endpoints coincide".into()));
    }
    let t_cap = match opts.t_max {
        Some(t) => t,
        None => {
            let baseline = track_time(field, from, to, 64).unwrap_or(10.0 * dist);
            3.0 * baseline + 0.5
        }
    };

    let n = opts.seed_angles.max(4);
    let tau = std::f64::consts::TAU;
    let shots: Vec<Option<Shot>> = (0..n)
        .map(|k| shoot(field, from, to, tau * k as f64 / n as f64, t_cap, opts))
        .collect();

    let refine = |s0: &Shot, s1: &Shot| -> Option<Shot> {
        let (mut phi_a, mut m_a) = (s0.phi, s0.miss_signed);
        let (mut phi_b, mut m_b) = (s1.phi, s1.miss_signed);
        let mut best: Option<Shot> = None;
        for _ in 0..opts.max_refine {
            if (m_b - m_a).abs() < 1e-300 {
                break;
            }
            let mut phi_next = phi_b - m_b * (phi_b - phi_a) / (m_b - m_a);
            // Keep the iterate near the bracket.
            let span = (tau / n as f64) * 4.0;
            let center = 0.5 * (phi_a + phi_b);
            phi_next = phi_next.clamp(center - span, center + span);
            let shot = shoot(field, from, to, phi_next, t_cap, opts)?;
            let done = shot.dist <= opts.pos_tol;
            phi_a = phi_b;
            m_a = m_b;
            phi_b = shot.phi;
            m_b = shot.miss_signed;
            if best.as_ref().is_none_or(|b| shot.dist < b.dist) {
                best = Some(shot);
            }
            if done {
                break;
            }
        }
        best.filter(|b| b.dist <= opts.pos_tol)
    };

    let mut converged: Vec<Shot> = Vec::new();
    for k in 0..n {
        let (Some(s0), Some(s1)) = (&shots[k], &shots[(k + 1) % n]) else {
            continue;
        };
        // A sign change of the cross-track miss brackets a root, provided
        // the pair actually sweeps past the target rather than wrapping
        // around the far side.
        let gate = 4.0 * dist + 1.0;
        if s0.miss_signed.signum() != s1.miss_signed.signum()
            && s0.dist.min(s1.dist) < gate
        {
            converged.extend(refine(s0, s1));
        }
    }
    // Also polish the few best direct shots; grazing contacts may not
    // produce a sign change on the coarse seed ring.
    let mut by_dist: Vec<Shot> = shots.iter().flatten().copied().collect();
    by_dist.sort_by(|a, b| a.dist.total_cmp(&b.dist));
    for s in by_dist.into_iter().take(4) {
        if s.dist <= opts.pos_tol {
            converged.push(s);
            continue;
        }
        if let Some(s1) = shoot(field, from, to, s.phi + 1e-4, t_cap, opts) {
            converged.extend(refine(&s, &s1));
        }
    }

    if converged.is_empty() {
        return Err(Error::NoConnection {
            from_x: from.x,
            from_y: from.y,
            to_x: to.x,
            to_y: to.y,
        });
    }

    // Deduplicate roots by angle, keep the fastest, tie-break toward the
    // direct bearing.
    let bearing = (to - from).angle();
    let ang_diff = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(tau);
        d.min(tau - d)
    };
    converged.sort_by(|a, b| {
        a.time
            .total_cmp(&b.time)
            .then(ang_diff(a.phi, bearing).total_cmp(&ang_diff(b.phi, bearing)))
    });
    let w = converged[0];

    // Re-integrate the winner up to its arrival time for a clean path.
    let init = initial_state(field, from, w.phi)?;
    let mut path = integrate_with(field, init, w.time, &opts.integrate)?;
    path.phi0 = w.phi;
    path.termination = Termination::TargetReached;
    let miss = path.end().pos.dist(to);
    let time = path.end().t;
    Ok(ConnectResult {
        phi0: w.phi,
        path,
        time,
        miss,
    })
}
