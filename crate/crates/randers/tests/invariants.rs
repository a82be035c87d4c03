//! Property tests of the metric axioms on the shear river.

use proptest::prelude::*;
use randers::{eval_f, Point, Vec2, WindField};

fn interior_y() -> impl Strategy<Value = f64> {
    -0.9..0.9f64
}

fn velocity() -> impl Strategy<Value = Vec2> {
    ((-2.0..2.0f64), (-2.0..2.0f64))
        .prop_filter("nonzero velocity", |(u, v)| u.abs().max(v.abs()) > 0.05)
        .prop_map(|(u, v)| Vec2::new(u, v))
}

proptest! {
    // F(k v) = k F(v) for k > 0.
    #[test]
    fn positive_homogeneity(y in interior_y(), v in velocity(), k in 0.1..10.0f64) {
        let field = WindField::Shear;
        let pos = Point::new(0.0, y);
        let f1 = eval_f(&field, pos, v).unwrap();
        let fk = eval_f(&field, pos, v * k).unwrap();
        prop_assert!((fk - k * f1).abs() <= 1e-12 * fk.abs().max(1e-12));
    }

    // Convexity gives the triangle inequality within each tangent space.
    #[test]
    fn triangle_inequality(y in interior_y(), a in velocity(), b in velocity()) {
        let field = WindField::Shear;
        let pos = Point::new(0.0, y);
        let sum = a + b;
        prop_assume!(sum.norm() > 0.05);
        let fa = eval_f(&field, pos, a).unwrap();
        let fb = eval_f(&field, pos, b).unwrap();
        let fsum = eval_f(&field, pos, sum).unwrap();
        prop_assert!(fsum <= fa + fb + 1e-9, "{fsum} > {fa} + {fb}");
    }

    // The wind translate of any unit vector lies on the unit level set.
    #[test]
    fn indicatrix_property(y in interior_y(), theta in 0.0..std::f64::consts::TAU) {
        let field = WindField::Shear;
        let pos = Point::new(0.0, y);
        let v = Vec2::unit(theta) + field.eval(pos);
        let f = eval_f(&field, pos, v).unwrap();
        prop_assert!((f - 1.0).abs() <= 1e-12);
    }

    // Under any nonzero wind there is a direction measured differently
    // forward and backward.
    #[test]
    fn wind_breaks_reversibility(y in 0.05..0.9f64) {
        let field = WindField::Shear;
        let pos = Point::new(0.0, y);
        let v = Vec2::new(1.0, 0.0);
        let fwd = eval_f(&field, pos, v).unwrap();
        let bwd = eval_f(&field, pos, -v).unwrap();
        prop_assert!((fwd - bwd).abs() > 1e-6);
    }
}
