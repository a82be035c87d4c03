//! CSV and SVG emission. Column orders are fixed and versioned in a header
//! comment; floats are printed in shortest round-trip form.

use std::fmt::Write as _;

use randers::{eval_f, GeodesicPath, Point, SearchPlan, Vec2, WindField};

pub fn metric_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from("# randers metric samples v1\n");
    out.push_str("x,y,u,v,F,alpha,beta,g_uu,g_uv,g_vv,det_g,K,res1,res2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.x, r.y, r.u, r.v, r.f, r.alpha, r.beta, r.g_uu, r.g_uv, r.g_vv, r.det_g, r.k,
            r.res1, r.res2
        );
    }
    out
}

pub struct MetricRow {
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub v: f64,
    pub f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub g_uu: f64,
    pub g_uv: f64,
    pub g_vv: f64,
    pub det_g: f64,
    pub k: f64,
    pub res1: f64,
    pub res2: f64,
}

fn f_residual(field: &WindField, pos: Point, vel: Vec2) -> f64 {
    eval_f(field, pos, vel).map(|f| f - 1.0).unwrap_or(f64::NAN)
}

pub fn geodesic_csv(field: &WindField, path: &GeodesicPath) -> String {
    let mut out = String::from("# geodesic path v1\n");
    out.push_str("t,x,y,xdot,ydot,F_residual\n");
    for s in &path.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.t,
            s.pos.x,
            s.pos.y,
            s.vel.x,
            s.vel.y,
            f_residual(field, s.pos, s.vel)
        );
    }
    out
}

pub fn fan_csv(field: &WindField, paths: &[GeodesicPath]) -> String {
    let mut out = String::from("# geodesic fan v1\n");
    out.push_str("path,phi0,quadrant,t,x,y,xdot,ydot,F_residual\n");
    for (i, p) in paths.iter().enumerate() {
        for s in &p.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                i,
                p.phi0,
                p.quadrant(),
                s.t,
                s.pos.x,
                s.pos.y,
                s.vel.x,
                s.vel.y,
                f_residual(field, s.pos, s.vel)
            );
        }
    }
    out
}

pub fn front_csv(phis: &[f64], points: &[Point]) -> String {
    let mut out = String::from("# time front v1\n");
    out.push_str("phi0,x,y\n");
    for (phi, p) in phis.iter().zip(points) {
        let _ = writeln!(out, "{},{},{}", phi, p.x, p.y);
    }
    out
}

/// Minimal SVG builder. World y points up; the canvas flips it.
pub struct SvgCanvas {
    min: Point,
    max: Point,
    body: Vec<String>,
    boundaries: Vec<f64>,
}

impl Default for SvgCanvas {
    fn default() -> Self {
        Self::new()
    }
}

impl SvgCanvas {
    pub fn new() -> Self {
        SvgCanvas {
            min: Point::new(f64::INFINITY, f64::INFINITY),
            max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            body: Vec::new(),
            boundaries: Vec::new(),
        }
    }

    fn grow(&mut self, p: Point) {
        self.min = Point::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Point::new(self.max.x.max(p.x), self.max.y.max(p.y));
    }

    fn path_data(points: &[Point]) -> String {
        let mut d = String::new();
        for (i, p) in points.iter().enumerate() {
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, p.x, -p.y);
        }
        d
    }

    /// Polyline with a CSS class.
    pub fn polyline(&mut self, points: &[Point], class: &str) {
        if points.len() < 2 {
            return;
        }
        for p in points {
            self.grow(*p);
        }
        self.body.push(format!(
            r#"<path class="{}" d="{}"/>"#,
            class,
            Self::path_data(points)
        ));
    }

    pub fn circle(&mut self, center: Point, r: f64, class: &str) {
        self.grow(center + Vec2::new(r, r));
        self.grow(center - Vec2::new(r, r));
        self.body.push(format!(
            r#"<circle class="{}" cx="{}" cy="{}" r="{}"/>"#,
            class, center.x, -center.y, r
        ));
    }

    /// Horizontal dashed rule at world height `y` (convexity boundary).
    /// Drawn at render time so it spans the final bounds.
    pub fn boundary_line(&mut self, y: f64) {
        self.boundaries.push(y);
    }

    /// Wind glyphs: one arrow per grid point, scaled by the wind vector.
    pub fn wind_glyphs(&mut self, field: &WindField, nx: usize, ny: usize, scale: f64) {
        if !self.min.is_finite() || !self.max.is_finite() {
            return;
        }
        let span = self.max - self.min;
        for i in 0..nx {
            for j in 0..ny {
                let p = self.min
                    + Vec2::new(
                        span.x * (i as f64 + 0.5) / nx as f64,
                        span.y * (j as f64 + 0.5) / ny as f64,
                    );
                let w = field.eval(p);
                if w.norm() < 1e-9 {
                    continue;
                }
                let tip = p + w * scale;
                let side = (tip - p).perp() * 0.15;
                let barb1 = tip - (tip - p) * 0.3 + side;
                let barb2 = tip - (tip - p) * 0.3 - side;
                self.body.push(format!(
                    r#"<path class="wind" d="{}"/>"#,
                    Self::path_data(&[p, tip, barb1, tip, barb2])
                ));
            }
        }
    }

    pub fn render(&self) -> String {
        let (min, max) = if self.min.is_finite() && self.max.is_finite() {
            (self.min, self.max)
        } else {
            (Point::new(-1.0, -1.0), Point::new(1.0, 1.0))
        };
        let span = max - min;
        let pad = 0.05 * span.x.max(span.y).max(1e-9);
        let stroke = (span.x.max(span.y) + 2.0 * pad) / 400.0;
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
            min.x - pad,
            -max.y - pad,
            span.x + 2.0 * pad,
            span.y + 2.0 * pad
        );
        let _ = writeln!(
            out,
            "<style>path{{fill:none;stroke-width:{stroke}}}\
             .q0{{stroke:#1f77b4}}.q1{{stroke:#000000}}.q2{{stroke:#d62728}}.q3{{stroke:#2ca02c}}\
             .std{{stroke:#1f77b4;stroke-dasharray:{d1} {d2}}}.opt{{stroke:#d62728}}\
             .bound{{stroke:#555555;stroke-dasharray:{d1} {d2}}}\
             .wind{{stroke:#9ecae1;stroke-width:{wind_stroke}}}\
             circle{{fill:#000000}}</style>",
            d1 = 4.0 * stroke,
            d2 = 3.0 * stroke,
            wind_stroke = 0.6 * stroke,
        );
        for y in &self.boundaries {
            let _ = writeln!(
                out,
                r#"<path class="bound" d="M{} {} L{} {}"/>"#,
                min.x - pad,
                -y,
                max.x + pad,
                -y
            );
        }
        for el in &self.body {
            let _ = writeln!(out, "{el}");
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Fan figure: one colored path per geodesic, dashed convexity boundary.
pub fn fan_svg(field: &WindField, paths: &[GeodesicPath]) -> String {
    let mut canvas = SvgCanvas::new();
    for p in paths {
        let pts: Vec<Point> = p.samples.iter().map(|s| s.pos).collect();
        let class = format!("q{}", p.quadrant());
        canvas.polyline(&pts, &class);
    }
    if let Ok(domain) = field.convexity_bound() {
        if domain.y_min.is_finite() {
            canvas.boundary_line(domain.y_min);
        }
        if domain.y_max.is_finite() {
            canvas.boundary_line(domain.y_max);
        }
    }
    canvas.render()
}

/// Plan overlay: standard pattern dashed, optimal plan solid, wind glyphs.
pub fn plan_svg(field: &WindField, standard: &SearchPlan, optimal: &SearchPlan) -> String {
    let mut canvas = SvgCanvas::new();
    for leg in &standard.legs {
        let pts: Vec<Point> = leg.samples.iter().map(|s| s.pos).collect();
        canvas.polyline(&pts, "std");
    }
    for leg in &optimal.legs {
        let pts: Vec<Point> = leg.samples.iter().map(|s| s.pos).collect();
        canvas.polyline(&pts, "opt");
    }
    canvas.wind_glyphs(field, 12, 12, 0.08);
    canvas.render()
}

/// Pattern alone, dashed.
pub fn pattern_svg(waypoints: &[Point]) -> String {
    let mut canvas = SvgCanvas::new();
    canvas.polyline(waypoints, "std");
    if let Some(first) = waypoints.first() {
        let span = 0.01_f64;
        canvas.circle(*first, span.max(1e-3), "datum");
    }
    canvas.render()
}
