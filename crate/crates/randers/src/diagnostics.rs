//! Scenario-level invariant suite, used by the CLI `check` subcommand.
//!
//! Each check samples the given wind field deterministically and verifies
//! one structural property of the construction. Failures carry the observed
//! worst value for the report.

use crate::analysis::{fundamental_tensor, spray_coefficients, TangentSample};
use crate::error::Result;
use crate::geodesic::{initial_state, integrate};
use crate::geom::{Point, Vec2};
use crate::metric::{build_randers, eval_alpha_beta, eval_f, indicatrix};
use crate::wind::WindField;

/// Outcome of a single named check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Deterministic 64-bit generator (SplitMix64); identical sample streams on
/// every platform keep `check` output reproducible.
struct Sampler {
    state: u64,
}

impl Sampler {
    fn new(seed: u64) -> Self {
        Sampler { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + u * (hi - lo)
    }
}

/// A y-range to sample: the convexity interval clipped to a desk-scale span
/// and shrunk away from the boundary.
fn sample_band(field: &WindField) -> Result<(f64, f64)> {
    let d = field.convexity_bound()?;
    let lo = d.y_min.max(-3.0);
    let hi = d.y_max.min(3.0);
    let pad = 0.05 * (hi - lo);
    Ok((lo + pad, hi - pad))
}

fn sample_pos(s: &mut Sampler, band: (f64, f64)) -> Point {
    Point::new(s.uniform(-2.0, 2.0), s.uniform(band.0, band.1))
}

fn sample_vel(s: &mut Sampler) -> Vec2 {
    loop {
        let v = Vec2::new(s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0));
        if v.norm() > 0.05 {
            return v;
        }
    }
}

/// Run the full invariant suite against `field`.
pub fn run_checks(field: &WindField) -> Result<Vec<CheckOutcome>> {
    let band = sample_band(field)?;
    let mut out = Vec::new();

    // Weak wind strictly inside the convexity bound.
    {
        let mut s = Sampler::new(0x5eed_0001);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let p = sample_pos(&mut s, band);
            worst = worst.max(field.speed(p));
        }
        out.push(CheckOutcome {
            name: "weak-wind-inside-domain",
            passed: worst < 1.0,
            detail: format!("max |W| over 1000 samples = {worst:.6}"),
        });
    }

    // Analytic jacobian against central differences.
    {
        let mut s = Sampler::new(0x5eed_0002);
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let p = sample_pos(&mut s, band);
            let j = field.jacobian(p);
            let dy = (field.eval(Point::new(p.x, p.y + h)) - field.eval(Point::new(p.x, p.y - h)))
                * (0.5 / h);
            let dx = (field.eval(Point::new(p.x + h, p.y)) - field.eval(Point::new(p.x - h, p.y)))
                * (0.5 / h);
            worst = worst
                .max((j.dw1_dy - dy.x).abs())
                .max((j.dw2_dy - dy.y).abs())
                .max((j.dw1_dx - dx.x).abs())
                .max((j.dw2_dx - dx.y).abs());
        }
        out.push(CheckOutcome {
            name: "jacobian-matches-finite-differences",
            passed: worst <= 1e-6,
            detail: format!("max abs deviation = {worst:.3e}"),
        });
    }

    // River-type fields are invariant along x.
    if field.is_river_type() {
        let mut s = Sampler::new(0x5eed_0003);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let y = s.uniform(band.0, band.1);
            let a = field.eval(Point::new(s.uniform(-5.0, 5.0), y));
            let b = field.eval(Point::new(s.uniform(-5.0, 5.0), y));
            worst = worst.max((a - b).norm());
        }
        out.push(CheckOutcome {
            name: "x-translation-invariance",
            passed: worst == 0.0,
            detail: format!("max |W(x1,y) - W(x2,y)| = {worst:.3e}"),
        });
    }

    // Indicatrix points sit on the unit level set of F.
    {
        let mut s = Sampler::new(0x5eed_0004);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let p = sample_pos(&mut s, band);
            for v in indicatrix(field, p, 24)? {
                worst = worst.max((eval_f(field, p, v)? - 1.0).abs());
            }
        }
        out.push(CheckOutcome {
            name: "indicatrix-on-unit-level-set",
            passed: worst <= 1e-12,
            detail: format!("max |F - 1| = {worst:.3e}"),
        });
    }

    // Positive homogeneity of F and the alpha/beta split.
    {
        let mut s = Sampler::new(0x5eed_0005);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let p = sample_pos(&mut s, band);
            let v = sample_vel(&mut s);
            let f1 = eval_f(field, p, v)?;
            for k in [0.5, 2.0, 10.0] {
                let fk = eval_f(field, p, v * k)?;
                worst = worst.max((fk - k * f1).abs() / fk.abs());
            }
            let (a, b) = eval_alpha_beta(field, p, v)?;
            worst = worst.max((a + b - f1).abs() / f1.abs());
            if a < b.abs() {
                worst = worst.max(1.0);
            }
        }
        out.push(CheckOutcome {
            name: "homogeneity-and-split",
            passed: worst <= 1e-12,
            detail: format!("max relative defect = {worst:.3e}"),
        });
    }

    // det(g) = (F/alpha)^3 det(a) in dimension two.
    {
        let mut s = Sampler::new(0x5eed_0006);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let p = sample_pos(&mut s, band);
            let v = sample_vel(&mut s);
            let t = fundamental_tensor(field, &TangentSample { pos: p, vel: v })?;
            let data = build_randers(field, p)?;
            let (alpha, _) = eval_alpha_beta(field, p, v)?;
            let f = eval_f(field, p, v)?;
            let expect = (f / alpha).powi(3) * data.a.det();
            worst = worst.max((t.det - expect).abs() / expect.abs());
        }
        out.push(CheckOutcome {
            name: "determinant-identity",
            passed: worst <= 1e-9,
            detail: format!("max relative defect = {worst:.3e}"),
        });
    }

    // Spray homogeneity of degree two.
    {
        let mut s = Sampler::new(0x5eed_0007);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let p = sample_pos(&mut s, band);
            let v = sample_vel(&mut s);
            let sp = spray_coefficients(field, &TangentSample { pos: p, vel: v })?;
            for k in [0.5, 3.0] {
                let spk = spray_coefficients(field, &TangentSample { pos: p, vel: v * k })?;
                let scale = sp.g1.abs().max(sp.g2.abs()).max(1e-9);
                worst = worst.max((spk.g1 - k * k * sp.g1).abs() / (k * k * scale));
                worst = worst.max((spk.g2 - k * k * sp.g2).abs() / (k * k * scale));
            }
        }
        out.push(CheckOutcome {
            name: "spray-homogeneity",
            passed: worst <= 1e-9,
            detail: format!("max relative defect = {worst:.3e}"),
        });
    }

    // A probe geodesic keeps unit speed.
    {
        let mut s = Sampler::new(0x5eed_0008);
        let p = Point::new(0.0, 0.5 * (band.0 + band.1));
        let init = initial_state(field, p, s.uniform(0.0, std::f64::consts::TAU))?;
        let path = integrate(field, init, 5.0)?;
        let defect = path.max_speed_defect(field);
        out.push(CheckOutcome {
            name: "geodesic-unit-speed",
            passed: defect <= 1e-6,
            detail: format!("max |F - 1| along probe = {defect:.3e}"),
        });
    }

    Ok(out)
}
