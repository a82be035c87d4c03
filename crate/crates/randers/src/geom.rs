//! Small planar vector/matrix types shared across the crate.

use std::ops::{Add, Mul, Neg, Sub};

/// Planar vector. Also used for positions; see [`Point`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

/// A position in the plane.
pub type Point = Vec2;

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `theta` from the positive x-axis.
    pub fn unit(theta: f64) -> Self {
        Vec2 {
            x: theta.cos(),
            y: theta.sin(),
        }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Scalar cross product `self.x * other.y - self.y * other.x`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counterclockwise rotation by `theta`.
    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2 {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    /// Left-hand normal (counterclockwise quarter turn).
    pub fn perp(self) -> Vec2 {
        Vec2 {
            x: -self.y,
            y: self.x,
        }
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2 {
            x: self.x / n,
            y: self.y / n,
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Symmetric 2x2 matrix, stored as its three independent entries.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub const IDENTITY: SymMat2 = SymMat2 {
        xx: 1.0,
        xy: 0.0,
        yy: 1.0,
    };

    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        SymMat2 { xx, xy, yy }
    }

    pub fn det(self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Quadratic form `v^T M v`.
    pub fn quad(self, v: Vec2) -> f64 {
        self.xx * v.x * v.x + 2.0 * self.xy * v.x * v.y + self.yy * v.y * v.y
    }

    /// Inverse quadratic form `c^T M^{-1} c` (for covectors).
    pub fn inv_quad(self, c: Vec2) -> f64 {
        let d = self.det();
        (self.yy * c.x * c.x - 2.0 * self.xy * c.x * c.y + self.xx * c.y * c.y) / d
    }

    /// Positive definiteness via the leading-minor test.
    pub fn is_positive_definite(self) -> bool {
        self.xx > 0.0 && self.det() > 0.0
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm2();
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotate_quarter_turn_matches_perp() {
        let v = Vec2::new(0.3, -1.7);
        let r = v.rotate(std::f64::consts::FRAC_PI_2);
        let p = v.perp();
        assert!((r - p).norm() < 1e-15);
    }

    #[test]
    fn segment_distance_clamps_to_endpoints() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(1.0, 0.0);
        assert_eq!(dist_to_segment(Vec2::new(-3.0, 4.0), a, b), 5.0);
        assert_eq!(dist_to_segment(Vec2::new(0.5, 2.0), a, b), 2.0);
        assert_eq!(dist_to_segment(Vec2::new(3.0, 0.0), a, b), 2.0);
    }

    #[test]
    fn inv_quad_matches_explicit_inverse() {
        let m = SymMat2::new(2.0, 0.5, 1.5);
        let c = Vec2::new(0.7, -0.2);
        // Explicit inverse of [[2, .5], [.5, 1.5]].
        let d = m.det();
        let inv = SymMat2::new(m.yy / d, -m.xy / d, m.xx / d);
        assert!((m.inv_quad(c) - inv.quad(c)).abs() < 1e-15);
    }
}
