//! Wind (current) fields perturbing the Euclidean background.
//!
//! The catalogue consists of river-type fields `W = (f(y), 0)` with shear,
//! quartic and Gaussian profiles, plus the constant and zero winds. Custom
//! fields can be plugged in through [`CustomWind`], which must supply exact
//! first derivatives: downstream layers assemble metric derivatives by the
//! chain rule and never differentiate a wind numerically.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{Point, Vec2};

/// Margin below `|W| = 1` at which evaluation is refused. Near the boundary
/// `lambda = 1 - |W|^2` ends up in denominators, so a thin guard band keeps
/// the arithmetic finite.
pub const WEAK_WIND_GUARD: f64 = 1e-12;

/// Exact first derivatives of a wind field at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WindJacobian {
    pub dw1_dx: f64,
    pub dw1_dy: f64,
    pub dw2_dx: f64,
    pub dw2_dy: f64,
}

impl WindJacobian {
    pub const ZERO: WindJacobian = WindJacobian {
        dw1_dx: 0.0,
        dw1_dy: 0.0,
        dw2_dx: 0.0,
        dw2_dy: 0.0,
    };

    fn scaled(self, k: f64) -> WindJacobian {
        WindJacobian {
            dw1_dx: k * self.dw1_dx,
            dw1_dy: k * self.dw1_dy,
            dw2_dx: k * self.dw2_dx,
            dw2_dy: k * self.dw2_dy,
        }
    }
}

/// Plug-in evaluator for winds outside the built-in catalogue.
///
/// Implementations must return analytically exact jacobians; supplying
/// finite-difference approximations here silently degrades every spray and
/// curvature quantity computed on top of them.
pub trait CustomWind: Send + Sync {
    fn eval(&self, pos: Point) -> Vec2;
    fn jacobian(&self, pos: Point) -> WindJacobian;

    /// Center of the convexity search along the y-axis.
    fn symmetry_axis(&self) -> f64 {
        0.0
    }

    fn label(&self) -> &str {
        "custom"
    }
}

/// A planar wind field.
#[derive(Clone)]
pub enum WindField {
    /// Unperturbed sea, `W = 0`.
    Zero,
    /// Steady flow `W = (p, q)`.
    Constant { p: f64, q: f64 },
    /// Linear shear `W = (y, 0)`, strongly convex on `|y| < 1`.
    Shear,
    /// Quartic profile `W = (a (b - y^2)^2, 0)`.
    Quartic { a: f64, b: f64 },
    /// Gaussian profile `W = (a exp(-(y - b)^2 / (2 c^2)), 0)`.
    Gaussian { a: f64, b: f64, c: f64 },
    /// A catalogue field with its speed scaled by a constant factor.
    Scaled { factor: f64, inner: Box<WindField> },
    /// User-supplied evaluator.
    Custom(Arc<dyn CustomWind>),
}

impl fmt::Debug for WindField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindField::Zero => write!(f, "Zero"),
            WindField::Constant { p, q } => write!(f, "Constant {{ p: {p}, q: {q} }}"),
            WindField::Shear => write!(f, "Shear"),
            WindField::Quartic { a, b } => write!(f, "Quartic {{ a: {a}, b: {b} }}"),
            WindField::Gaussian { a, b, c } => {
                write!(f, "Gaussian {{ a: {a}, b: {b}, c: {c} }}")
            }
            WindField::Scaled { factor, inner } => {
                write!(f, "Scaled {{ factor: {factor}, inner: {inner:?} }}")
            }
            WindField::Custom(w) => write!(f, "Custom({})", w.label()),
        }
    }
}

/// Open interval of admissible y-values (x is unbounded). Infinite bounds
/// encode an unbounded side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexityDomain {
    pub y_min: f64,
    pub y_max: f64,
    /// The bounds are open; evaluation on them is an error.
    pub strict: bool,
}

impl ConvexityDomain {
    pub fn unbounded() -> Self {
        ConvexityDomain {
            y_min: f64::NEG_INFINITY,
            y_max: f64::INFINITY,
            strict: true,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.y_min == f64::NEG_INFINITY && self.y_max == f64::INFINITY
    }

    pub fn contains(&self, y: f64) -> bool {
        y > self.y_min && y < self.y_max
    }

    /// Distance to the nearest bound; positive inside, `+inf` if unbounded.
    pub fn margin(&self, y: f64) -> f64 {
        (y - self.y_min).min(self.y_max - y)
    }
}

impl WindField {
    pub fn quartic(a: f64, b: f64) -> Self {
        WindField::Quartic { a, b }
    }

    pub fn gaussian(a: f64, b: f64, c: f64) -> Self {
        WindField::Gaussian { a, b, c }
    }

    pub fn constant(p: f64, q: f64) -> Self {
        WindField::Constant { p, q }
    }

    pub fn scaled(factor: f64, inner: WindField) -> Self {
        WindField::Scaled {
            factor,
            inner: Box::new(inner),
        }
    }

    /// The quartic field of the reference scenario, `a = 0.8`, `b = 1`.
    pub fn quartic_river() -> Self {
        WindField::Quartic { a: 0.8, b: 1.0 }
    }

    /// The Gaussian field with `a = 5 / (2 sqrt(2 pi))`, `b = 0`, `c = 1`,
    /// weak on the whole plane.
    pub fn gaussian_river() -> Self {
        WindField::Gaussian {
            a: 2.5 / (2.0 * std::f64::consts::PI).sqrt(),
            b: 0.0,
            c: 1.0,
        }
    }

    /// Wind vector `W(x, y)`. Evaluation is total; domain checks are separate.
    pub fn eval(&self, pos: Point) -> Vec2 {
        match self {
            WindField::Zero => Vec2::ZERO,
            WindField::Constant { p, q } => Vec2::new(*p, *q),
            WindField::Shear => Vec2::new(pos.y, 0.0),
            WindField::Quartic { a, b } => {
                let s = b - pos.y * pos.y;
                Vec2::new(a * s * s, 0.0)
            }
            WindField::Gaussian { a, b, c } => {
                let z = (pos.y - b) / c;
                Vec2::new(a * (-0.5 * z * z).exp(), 0.0)
            }
            WindField::Scaled { factor, inner } => inner.eval(pos) * *factor,
            WindField::Custom(w) => w.eval(pos),
        }
    }

    /// Exact partials of `W` at `pos`. River-type kinds have
    /// `dW1/dx = 0` and a vanishing second component.
    pub fn jacobian(&self, pos: Point) -> WindJacobian {
        match self {
            WindField::Zero | WindField::Constant { .. } => WindJacobian::ZERO,
            WindField::Shear => WindJacobian {
                dw1_dy: 1.0,
                ..WindJacobian::ZERO
            },
            WindField::Quartic { a, b } => WindJacobian {
                // d/dy [a (b - y^2)^2] = -4 a y (b - y^2)
                dw1_dy: -4.0 * a * pos.y * (b - pos.y * pos.y),
                ..WindJacobian::ZERO
            },
            WindField::Gaussian { a, b, c } => {
                let z = (pos.y - b) / c;
                WindJacobian {
                    dw1_dy: -a * z / c * (-0.5 * z * z).exp(),
                    ..WindJacobian::ZERO
                }
            }
            WindField::Scaled { factor, inner } => inner.jacobian(pos).scaled(*factor),
            WindField::Custom(w) => w.jacobian(pos),
        }
    }

    /// Wind speed `|W(pos)|`.
    pub fn speed(&self, pos: Point) -> f64 {
        self.eval(pos).norm()
    }

    /// True for fields of the form `W = (f(y), 0)`.
    pub fn is_river_type(&self) -> bool {
        match self {
            WindField::Shear | WindField::Quartic { .. } | WindField::Gaussian { .. } => true,
            WindField::Zero | WindField::Constant { .. } | WindField::Custom(_) => false,
            WindField::Scaled { inner, .. } => inner.is_river_type(),
        }
    }

    fn symmetry_axis(&self) -> f64 {
        match self {
            WindField::Gaussian { b, .. } => *b,
            WindField::Scaled { inner, .. } => inner.symmetry_axis(),
            WindField::Custom(w) => w.symmetry_axis(),
            _ => 0.0,
        }
    }

    /// Maximal open y-interval around the field's symmetry axis on which
    /// `|W| < 1`, found by bisection on `|W(0, y)| - 1` (tolerance 1e-12)
    /// after geometric bracket expansion. Returns an unbounded domain when
    /// the speed stays below 1 out to the search horizon.
    pub fn convexity_bound(&self) -> Result<ConvexityDomain> {
        // Constant-speed fields need no search.
        match self {
            WindField::Zero => return Ok(ConvexityDomain::unbounded()),
            WindField::Constant { p, q } => {
                let speed = Vec2::new(*p, *q).norm();
                if speed < 1.0 {
                    return Ok(ConvexityDomain::unbounded());
                }
                return Err(Error::NotWeakEverywhere { center: 0.0 });
            }
            WindField::Scaled { factor, inner } => {
                if let WindField::Constant { p, q } = **inner {
                    let speed = factor.abs() * Vec2::new(p, q).norm();
                    if speed < 1.0 {
                        return Ok(ConvexityDomain::unbounded());
                    }
                    return Err(Error::NotWeakEverywhere { center: 0.0 });
                }
            }
            _ => {}
        }

        let center = self.symmetry_axis();
        let profile = |y: f64| self.speed(Point::new(0.0, y));
        if profile(center) >= 1.0 {
            return Err(Error::NotWeakEverywhere { center });
        }
        let y_max = bound_one_side(&profile, center, 1.0);
        let y_min = bound_one_side(&profile, center, -1.0);
        Ok(ConvexityDomain {
            y_min,
            y_max,
            strict: true,
        })
    }

    /// True if `pos` lies strictly inside the weak-wind region, including the
    /// guard band.
    pub fn is_inside(&self, pos: Point) -> bool {
        self.speed(pos) < 1.0 - WEAK_WIND_GUARD
    }

    /// Error unless `pos` is strictly inside the weak-wind region.
    pub fn check_inside(&self, pos: Point) -> Result<()> {
        let speed = self.speed(pos);
        if speed >= 1.0 - WEAK_WIND_GUARD {
            Err(Error::ConvexityViolation {
                x: pos.x,
                y: pos.y,
                speed,
            })
        } else {
            Ok(())
        }
    }
}

/// Search horizon beyond which a side is declared unbounded.
const BRACKET_HORIZON: f64 = 1e6;
const BISECT_TOL: f64 = 1e-12;

/// Walk outward from `center` in direction `sign` until `profile` reaches 1,
/// then bisect the crossing. The catalogue profiles are monotone on each
/// side of their extremum once they start growing, so the first bracketed
/// crossing is the domain boundary.
fn bound_one_side<F: Fn(f64) -> f64>(profile: &F, center: f64, sign: f64) -> f64 {
    let mut step = 0.125;
    let mut lo = 0.0;
    loop {
        let hi = lo + step;
        if hi > BRACKET_HORIZON {
            return sign * f64::INFINITY;
        }
        if profile(center + sign * hi) >= 1.0 {
            // Bisect |W| - 1 = 0 in (lo, hi).
            let (mut a, mut b) = (lo, hi);
            while b - a > BISECT_TOL {
                let mid = 0.5 * (a + b);
                if profile(center + sign * mid) >= 1.0 {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return center + sign * 0.5 * (a + b);
        }
        lo = hi;
        step *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_eval_matches_profile() {
        let w = WindField::Shear;
        assert_eq!(w.eval(Point::new(0.0, -0.5)), Vec2::new(-0.5, 0.0));
        assert_eq!(w.eval(Point::new(7.0, -0.5)), Vec2::new(-0.5, 0.0));
    }

    #[test]
    fn zero_wind_everywhere() {
        let w = WindField::Zero;
        assert_eq!(w.eval(Point::new(3.0, -2.0)), Vec2::ZERO);
        assert!(w.convexity_bound().unwrap().is_unbounded());
    }

    #[test]
    fn quartic_eval_by_hand() {
        let w = WindField::quartic_river();
        // a (b - y^2)^2 at y = 0 is a b^2 = 0.8.
        assert!((w.eval(Point::new(3.0, 0.0)).x - 0.8).abs() < 1e-15);
        assert_eq!(w.eval(Point::new(3.0, 0.0)).y, 0.0);
    }

    #[test]
    fn shear_bound_is_unit_interval() {
        let d = WindField::Shear.convexity_bound().unwrap();
        assert!((d.y_min + 1.0).abs() < 1e-11);
        assert!((d.y_max - 1.0).abs() < 1e-11);
        assert!(d.strict);
    }

    #[test]
    fn quartic_bound_matches_root() {
        let d = WindField::quartic_river().convexity_bound().unwrap();
        // 0.8 (1 - y0^2)^2 = 1  =>  y0 = sqrt(1 + 1/sqrt(0.8)).
        let y0 = (1.0 + 1.0 / 0.8f64.sqrt()).sqrt();
        assert!((d.y_max - y0).abs() < 1e-11);
        assert!((d.y_min + y0).abs() < 1e-11);
        assert!((d.y_max - 1.4553).abs() < 5e-4);
    }

    #[test]
    fn gaussian_bound_unbounded() {
        let d = WindField::gaussian_river().convexity_bound().unwrap();
        assert!(d.is_unbounded());
        // Peak speed stays below 1.
        assert!(WindField::gaussian_river().speed(Point::new(0.0, 0.0)) < 1.0);
    }

    #[test]
    fn strong_constant_wind_rejected() {
        let err = WindField::constant(0.8, 0.8).convexity_bound().unwrap_err();
        assert!(matches!(err, Error::NotWeakEverywhere { .. }));
    }

    #[test]
    fn scaled_shear_bound_widens() {
        let w = WindField::scaled(0.5, WindField::Shear);
        let d = w.convexity_bound().unwrap();
        assert!((d.y_max - 2.0).abs() < 1e-11);
    }

    #[test]
    fn guard_band_applies_at_boundary() {
        let w = WindField::Shear;
        assert!(w.check_inside(Point::new(0.0, 0.999)).is_ok());
        let err = w.check_inside(Point::new(0.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::ConvexityViolation { .. }));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let fields = [
            WindField::Shear,
            WindField::quartic_river(),
            WindField::gaussian_river(),
            WindField::constant(0.3, 0.4),
            WindField::scaled(0.7, WindField::quartic_river()),
        ];
        let h = 1e-6;
        for f in &fields {
            for &y in &[-0.9, -0.3, 0.0, 0.4, 0.8] {
                let p = Point::new(0.3, y);
                let j = f.jacobian(p);
                let dy = (f.eval(Point::new(p.x, y + h)) - f.eval(Point::new(p.x, y - h)))
                    * (0.5 / h);
                let dx = (f.eval(Point::new(p.x + h, y)) - f.eval(Point::new(p.x - h, y)))
                    * (0.5 / h);
                assert!((j.dw1_dy - dy.x).abs() < 1e-6, "{f:?} at y={y}");
                assert!((j.dw2_dy - dy.y).abs() < 1e-6);
                assert!(j.dw1_dx.abs() < 1e-12 && dx.norm() < 1e-6);
            }
        }
    }
}
