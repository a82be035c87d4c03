//! Standard search patterns, their time-optimal remodeling, and the
//! complete-search coverage test.
//!
//! A standard pattern is a waypoint polyline held over ground by crabbing
//! into the wind. The remodeled plan replaces every leg with the time-optimal
//! geodesic connection between the same waypoints; legs whose geodesics
//! stray from the pattern are split at their chord midpoints, and waypoints
//! are translated outward when coverage at `epsilon = spacing / 2` fails.

use crate::connect::{connect, crab_heading, track_time, ConnectOpts};
use crate::error::{Error, Result};
use crate::geodesic::{GeodesicPath, GeodesicState, Termination};
use crate::geom::{dist_to_segment, Point, Vec2};
use crate::wind::WindField;

/// Pattern families with their kind-specific parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PatternKind {
    /// Leg lengths `1,1,2,2,3,3,... x spacing` with 90-degree left turns.
    ExpandingSquare { legs: usize },
    /// `sectors` radials of the given radius run out-and-back through the
    /// datum.
    SectorSearch { radius: f64, sectors: usize },
    /// `legs` parallel sweeps of length `leg_len` separated by the track
    /// spacing.
    CreepingLine { legs: usize, leg_len: f64 },
    /// Same geometry as the creeping line, oriented along the major axis of
    /// the search area.
    Parallel { legs: usize, leg_len: f64 },
}

/// A standard waypoint pattern.
#[derive(Clone, Debug)]
pub struct SearchPattern {
    pub kind: PatternKind,
    /// Commence-search point (datum).
    pub origin: Point,
    /// Pattern orientation, radians.
    pub heading: f64,
    /// Track spacing `epsilon*`.
    pub spacing: f64,
    pub waypoints: Vec<Point>,
}

/// A piecewise plan: straight tracked legs (standard) or geodesic legs
/// (optimal).
#[derive(Clone, Debug)]
pub struct SearchPlan {
    pub legs: Vec<GeodesicPath>,
    pub waypoints: Vec<Point>,
    pub total_time: f64,
    /// Coverage parameter; `spacing / 2` unless overridden.
    pub epsilon: f64,
}

/// Absolute slack on the completeness comparison, matching the position
/// accuracy of integrated legs.
const COVERAGE_SLACK: f64 = 1e-9;

/// Result of the complete-search test.
#[derive(Clone, Copy, Debug)]
pub struct CoverageReport {
    pub complete: bool,
    pub worst_distance: f64,
    pub worst_point: Point,
    pub samples: usize,
}

/// Bounded search domain.
#[derive(Clone, Copy, Debug)]
pub enum Domain {
    Rect {
        center: Point,
        half_width: f64,
        half_height: f64,
        /// Rotation of the rectangle about its center, radians.
        rotation: f64,
    },
    Disc { center: Point, radius: f64 },
}

/// Options for [`plan_optimal`] and [`compare`].
#[derive(Clone, Debug)]
pub struct PlanOpts {
    pub connect: ConnectOpts,
    /// Waypoint translation iteration budget.
    pub max_iters: usize,
    /// Coverage grid per axis during planning.
    pub grid: usize,
    /// Coverage domain; the pattern's nominal domain when absent.
    pub domain: Option<Domain>,
    /// Coverage parameter; `spacing / 2` when absent.
    pub epsilon: Option<f64>,
    /// Recursive midpoint-split depth for legs whose geodesic strays more
    /// than `epsilon` from the straight leg.
    pub split_depth: usize,
    /// Segment count for straight-leg timing.
    pub n_seg: usize,
}

impl Default for PlanOpts {
    fn default() -> Self {
        // Plan legs cap the step size well below the solo-path default so
        // the sampled polylines track the true curves to ~1e-5, far inside
        // the coverage margins.
        let mut connect = ConnectOpts::default();
        connect.integrate.h_max = 0.05;
        PlanOpts {
            connect,
            max_iters: 10,
            grid: 120,
            domain: None,
            epsilon: None,
            split_depth: 4,
            n_seg: 64,
        }
    }
}

/// Standard-vs-optimal comparison.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub standard: SearchPlan,
    pub optimal: SearchPlan,
    /// Relative time saving `(standard - optimal) / standard`.
    pub saving: f64,
}

/// Lay out the waypoints of a standard pattern.
pub fn generate_pattern(
    kind: PatternKind,
    origin: Point,
    heading: f64,
    spacing: f64,
) -> Result<SearchPattern> {
    if spacing.is_nan() || spacing <= 0.0 {
        return Err(Error::BadParams(format!(
            "track spacing must be positive, got {spacing}"
        )));
    }
    let dir = |angle: f64| Vec2::unit(heading + angle);
    let waypoints = match kind {
        PatternKind::ExpandingSquare { legs } => {
            if legs == 0 {
                return Err(Error::BadParams("expanding square needs legs >= 1".into()));
            }
            let mut pts = vec![origin];
            let mut cur = origin;
            for i in 1..=legs {
                let len = i.div_ceil(2) as f64 * spacing;
                let d = dir((i - 1) as f64 * std::f64::consts::FRAC_PI_2);
                cur = cur + d * len;
                pts.push(cur);
            }
            pts
        }
        PatternKind::SectorSearch { radius, sectors } => {
            if sectors < 2 || radius.is_nan() || radius <= 0.0 {
                return Err(Error::BadParams(
                    "sector search needs sectors >= 2 and radius > 0".into(),
                ));
            }
            let mut pts = vec![origin];
            for k in 0..sectors {
                let tip = origin + dir(std::f64::consts::TAU * k as f64 / sectors as f64) * radius;
                pts.push(tip);
                pts.push(origin);
            }
            pts
        }
        PatternKind::CreepingLine { legs, leg_len }
        | PatternKind::Parallel { legs, leg_len } => {
            if legs == 0 || leg_len.is_nan() || leg_len <= 0.0 {
                return Err(Error::BadParams(
                    "line search needs legs >= 1 and leg_len > 0".into(),
                ));
            }
            let sweep = dir(0.0);
            let advance = dir(std::f64::consts::FRAC_PI_2) * spacing;
            let mut pts = Vec::with_capacity(2 * legs);
            let mut cur = origin;
            for i in 0..legs {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                pts.push(cur);
                cur = cur + sweep * (s * leg_len);
                pts.push(cur);
                if i + 1 < legs {
                    cur = cur + advance;
                }
            }
            pts
        }
    };
    Ok(SearchPattern {
        kind,
        origin,
        heading,
        spacing,
        waypoints,
    })
}

/// Domain a pattern is designed to cover completely at
/// `epsilon = spacing / 2`.
///
/// For sweep patterns the swept band is exact. An expanding square does not
/// cover its whole bounding box at half the track spacing (the spiral leaves
/// pockets along the ring diagonals), so its nominal domain is found by
/// bisection: the largest square centered on the waypoint bounding box that
/// the straight pattern covers completely, shrunk by a small safety margin.
pub fn nominal_domain(pattern: &SearchPattern) -> Domain {
    match pattern.kind {
        PatternKind::ExpandingSquare { .. } => {
            let eps = 0.5 * pattern.spacing;
            // Work in the pattern frame.
            let local: Vec<Point> = pattern
                .waypoints
                .iter()
                .map(|w| (*w - pattern.origin).rotate(-pattern.heading))
                .collect();
            let (mut lo_pt, mut hi_pt) = (local[0], local[0]);
            for p in &local {
                lo_pt = Point::new(lo_pt.x.min(p.x), lo_pt.y.min(p.y));
                hi_pt = Point::new(hi_pt.x.max(p.x), hi_pt.y.max(p.y));
            }
            let center_local = (lo_pt + hi_pt) * 0.5;
            let segments: Vec<(Point, Point)> =
                local.windows(2).map(|w| (w[0], w[1])).collect();
            let covered = |half: f64| {
                let domain = Domain::Rect {
                    center: center_local,
                    half_width: half,
                    half_height: half,
                    rotation: 0.0,
                };
                let (worst, _, _) = worst_over_domain(&segments, &domain, 101);
                worst <= eps
            };
            let (mut lo, mut hi) = (
                0.25 * pattern.spacing,
                0.5 * (hi_pt - lo_pt).x.max((hi_pt - lo_pt).y) + eps,
            );
            if !covered(lo) {
                lo = 0.0;
            }
            for _ in 0..20 {
                let mid = 0.5 * (lo + hi);
                if covered(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let half = 0.94 * lo;
            Domain::Rect {
                center: pattern.origin + center_local.rotate(pattern.heading),
                half_width: half,
                half_height: half,
                rotation: pattern.heading,
            }
        }
        PatternKind::SectorSearch { radius, .. } => Domain::Disc {
            center: pattern.origin,
            radius,
        },
        PatternKind::CreepingLine { legs, leg_len }
        | PatternKind::Parallel { legs, leg_len } => {
            let s = pattern.spacing;
            let span = (legs - 1) as f64 * s;
            let center_local = Vec2::new(0.5 * leg_len, 0.5 * span);
            Domain::Rect {
                center: pattern.origin + center_local.rotate(pattern.heading),
                half_width: 0.5 * leg_len,
                half_height: 0.5 * (span + s),
                rotation: pattern.heading,
            }
        }
    }
}

/// Worst distance from the domain samples to the segment set, with the
/// realizing point.
fn worst_over_domain(
    segments: &[(Point, Point)],
    domain: &Domain,
    grid: usize,
) -> (f64, Point, usize) {
    let samples = domain_samples(domain, grid);
    let count = samples.len();
    let mut worst = 0.0f64;
    let mut worst_point = match samples.first() {
        Some(p) => *p,
        None => Point::ZERO,
    };
    for p in samples {
        let mut d = f64::INFINITY;
        for &(a, b) in segments {
            let dd = dist_to_segment(p, a, b);
            if dd < d {
                d = dd;
            }
            if d <= 1e-15 {
                break;
            }
        }
        if d > worst {
            worst = d;
            worst_point = p;
        }
    }
    (worst, worst_point, count)
}

/// Straight-leg path with timing from [`track_time`]. Each sample carries
/// the crabbed ground velocity for the wind at that sample, so `F = 1`
/// holds exactly along the leg; elapsed time integrates the piece-midpoint
/// speeds, matching the `track_time` quadrature.
fn straight_leg(field: &WindField, from: Point, to: Point, n_seg: usize, t0: f64) -> Result<GeodesicPath> {
    let chord = to - from;
    let len = chord.norm();
    if len == 0.0 {
        return Err(Error::BadParams("zero-length leg".into()));
    }
    let tau = chord * (1.0 / len);
    let piece = len / n_seg as f64;
    let ground_vel = |pos: Point, seg: usize| -> Result<(Vec2, f64)> {
        let w = field.eval(pos);
        let (u, speed) = crab_heading(tau, w).ok_or(Error::InfeasibleTrack {
            segment: seg,
            w_perp: tau.cross(w),
        })?;
        Ok((u, speed))
    };
    let mut samples = Vec::with_capacity(n_seg + 1);
    let mut t = t0;
    let (u0, s0) = ground_vel(from, 0)?;
    let phi0 = u0.angle();
    samples.push(GeodesicState {
        pos: from,
        vel: tau * s0,
        t,
    });
    for i in 0..n_seg {
        let (_, mid_speed) = ground_vel(from + tau * ((i as f64 + 0.5) * piece), i)?;
        t += piece / mid_speed;
        let pos = from + tau * ((i + 1) as f64 * piece);
        let (_, speed) = ground_vel(pos, i)?;
        samples.push(GeodesicState {
            pos,
            vel: tau * speed,
            t,
        });
    }
    Ok(GeodesicPath {
        samples,
        phi0,
        termination: Termination::TargetReached,
    })
}

/// The baseline plan: every leg held straight over ground.
pub fn plan_standard(
    field: &WindField,
    pattern: &SearchPattern,
    n_seg: usize,
) -> Result<SearchPlan> {
    if n_seg == 0 {
        return Err(Error::BadParams("plan_standard needs n_seg >= 1".into()));
    }
    let mut legs = Vec::new();
    let mut total_time = 0.0;
    for pair in pattern.waypoints.windows(2) {
        let time = track_time(field, pair[0], pair[1], n_seg)?;
        legs.push(straight_leg(field, pair[0], pair[1], n_seg, total_time)?);
        total_time += time;
    }
    Ok(SearchPlan {
        legs,
        waypoints: pattern.waypoints.clone(),
        total_time,
        epsilon: 0.5 * pattern.spacing,
    })
}

/// Max deviation of a geodesic leg from its straight chord.
fn chord_deviation(path: &GeodesicPath, from: Point, to: Point) -> f64 {
    path.samples
        .iter()
        .map(|s| dist_to_segment(s.pos, from, to))
        .fold(0.0, f64::max)
}

fn connect_leg(
    field: &WindField,
    from: Point,
    to: Point,
    epsilon: f64,
    depth: usize,
    opts: &ConnectOpts,
    out: &mut Vec<GeodesicPath>,
) -> Result<()> {
    let c = connect(field, from, to, opts)?;
    if depth > 0 && chord_deviation(&c.path, from, to) > epsilon {
        let mid = from + (to - from) * 0.5;
        if field.is_inside(mid) {
            connect_leg(field, from, mid, epsilon, depth - 1, opts, out)?;
            connect_leg(field, mid, to, epsilon, depth - 1, opts, out)?;
            return Ok(());
        }
    }
    out.push(c.path);
    Ok(())
}

fn assemble_plan(
    field: &WindField,
    waypoints: &[Point],
    epsilon: f64,
    opts: &PlanOpts,
) -> Result<SearchPlan> {
    let mut legs = Vec::new();
    for pair in waypoints.windows(2) {
        connect_leg(
            field,
            pair[0],
            pair[1],
            epsilon,
            opts.split_depth,
            &opts.connect,
            &mut legs,
        )?;
    }
    // Rebase leg times so the plan is one increasing clock.
    let mut t0 = 0.0;
    for leg in &mut legs {
        let start = leg.samples[0].t;
        for s in &mut leg.samples {
            s.t = s.t - start + t0;
        }
        t0 = leg.samples.last().unwrap().t;
    }
    Ok(SearchPlan {
        legs,
        waypoints: waypoints.to_vec(),
        total_time: t0,
        epsilon,
    })
}

/// Piecewise time-optimal plan over the pattern waypoints.
///
/// Legs are geodesic connections; if the plan fails the complete-search test
/// on the coverage domain, the waypoint nearest the deficit is translated
/// outward along the local normal by the deficit and the plan is rebuilt,
/// up to `opts.max_iters` times.
pub fn plan_optimal(
    field: &WindField,
    pattern: &SearchPattern,
    opts: &PlanOpts,
) -> Result<SearchPlan> {
    for w in &pattern.waypoints {
        field.check_inside(*w)?;
    }
    let epsilon = opts.epsilon.unwrap_or(0.5 * pattern.spacing);
    let domain = opts.domain.unwrap_or_else(|| nominal_domain(pattern));
    let mut waypoints = pattern.waypoints.clone();

    let mut last_worst = f64::INFINITY;
    for iter in 0..=opts.max_iters {
        let plan = assemble_plan(field, &waypoints, epsilon, opts)?;
        let report = coverage_check(&plan, &domain, epsilon, opts.grid)?;
        if report.complete {
            return Ok(plan);
        }
        last_worst = report.worst_distance;
        if iter == opts.max_iters {
            break;
        }

        // Translate the waypoint nearest the deficit outward along the local
        // normal (the perpendicular from the plan toward the uncovered point).
        let worst = report.worst_point;
        let (mut best_d2, mut nearest_on_plan) = (f64::INFINITY, worst);
        for leg in &plan.legs {
            for pair in leg.samples.windows(2) {
                let d = dist_to_segment(worst, pair[0].pos, pair[1].pos);
                if d * d < best_d2 {
                    best_d2 = d * d;
                    let seg = pair[1].pos - pair[0].pos;
                    let t = if seg.norm2() > 0.0 {
                        ((worst - pair[0].pos).dot(seg) / seg.norm2()).clamp(0.0, 1.0)
                    } else {
                        0.0
                    };
                    nearest_on_plan = pair[0].pos + seg * t;
                }
            }
        }
        let outward = (worst - nearest_on_plan).normalized();
        let deficit = report.worst_distance - epsilon;
        let (wi, _) = waypoints
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                a.dist(nearest_on_plan).total_cmp(&b.dist(nearest_on_plan))
            })
            .expect("patterns have waypoints");
        let moved = waypoints[wi] + outward * (1.05 * deficit);
        if !field.is_inside(moved) {
            break;
        }
        waypoints[wi] = moved;
    }
    Err(Error::CoverageUnreachable {
        iters: opts.max_iters,
        worst: last_worst,
    })
}

fn domain_samples(domain: &Domain, grid: usize) -> Vec<Point> {
    match *domain {
        Domain::Rect {
            center,
            half_width,
            half_height,
            rotation,
        } => {
            let mut pts = Vec::with_capacity(grid * grid);
            for i in 0..grid {
                for j in 0..grid {
                    let fx = i as f64 / (grid - 1) as f64 * 2.0 - 1.0;
                    let fy = j as f64 / (grid - 1) as f64 * 2.0 - 1.0;
                    let local = Vec2::new(fx * half_width, fy * half_height);
                    pts.push(center + local.rotate(rotation));
                }
            }
            pts
        }
        Domain::Disc { center, radius } => {
            // Ring sampling with roughly uniform density, rim included.
            let mut pts = vec![center];
            for j in 1..grid {
                let r = radius * j as f64 / (grid - 1) as f64;
                let m = (std::f64::consts::TAU * j as f64).ceil() as usize;
                for k in 0..m {
                    let phi = std::f64::consts::TAU * k as f64 / m as f64;
                    pts.push(center + Vec2::unit(phi) * r);
                }
            }
            pts
        }
    }
}

/// Grid test of the complete-search condition: every sampled domain point
/// must lie within `epsilon` of the plan polyline.
pub fn coverage_check(
    plan: &SearchPlan,
    domain: &Domain,
    epsilon: f64,
    grid: usize,
) -> Result<CoverageReport> {
    if grid < 10 {
        return Err(Error::BadParams(format!(
            "coverage grid must be at least 10 per axis, got {grid}"
        )));
    }
    if epsilon < 0.0 {
        return Err(Error::BadParams("epsilon must be nonnegative".into()));
    }
    let mut segments: Vec<(Point, Point)> = Vec::new();
    for leg in &plan.legs {
        for pair in leg.samples.windows(2) {
            segments.push((pair[0].pos, pair[1].pos));
        }
    }
    let (worst, worst_point, count) = worst_over_domain(&segments, domain, grid);
    Ok(CoverageReport {
        complete: worst <= epsilon + COVERAGE_SLACK,
        worst_distance: worst,
        worst_point,
        samples: count,
    })
}

/// Standard and optimal plans side by side with their relative saving.
pub fn compare(field: &WindField, pattern: &SearchPattern, opts: &PlanOpts) -> Result<Comparison> {
    let standard = plan_standard(field, pattern, opts.n_seg)?;
    let optimal = plan_optimal(field, pattern, opts)?;
    let saving = if standard.total_time > 0.0 {
        (standard.total_time - optimal.total_time) / standard.total_time
    } else {
        0.0
    };
    Ok(Comparison {
        standard,
        optimal,
        saving,
    })
}
