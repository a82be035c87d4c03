//! Scenario configuration: one wind field plus exactly one command block.
//!
//! All lengths are dimensionless with the vessel's own speed normalized
//! to 1; the wind parameters are speed ratios. Unknown keys are rejected.

use randers::{Domain, PatternKind, Point, SearchPattern, WindField};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub wind: WindSpec,
    #[serde(default)]
    pub metric: Option<MetricBlock>,
    #[serde(default)]
    pub geodesic: Option<GeodesicBlock>,
    #[serde(default)]
    pub fan: Option<FanBlock>,
    #[serde(default)]
    pub front: Option<FrontBlock>,
    #[serde(default)]
    pub connect: Option<ConnectBlock>,
    #[serde(default)]
    pub pattern: Option<PatternBlock>,
    #[serde(default)]
    pub plan: Option<PlanBlock>,
    #[serde(default)]
    pub check: Option<CheckBlock>,
}

impl Scenario {
    pub fn parse(text: &str) -> anyhow::Result<Scenario> {
        let s: Scenario = serde_json::from_str(text)?;
        let blocks = [
            s.metric.is_some(),
            s.geodesic.is_some(),
            s.fan.is_some(),
            s.front.is_some(),
            s.connect.is_some(),
            s.pattern.is_some(),
            s.plan.is_some(),
            s.check.is_some(),
        ];
        let count = blocks.iter().filter(|b| **b).count();
        anyhow::ensure!(
            count == 1,
            "a scenario must contain exactly one command block, found {count}"
        );
        Ok(s)
    }

    pub fn wind_field(&self) -> WindField {
        self.wind.build()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum WindSpec {
    Zero,
    Shear,
    Constant { p: f64, q: f64 },
    Quartic { a: f64, b: f64 },
    Gaussian { a: f64, b: f64, c: f64 },
    Scaled { factor: f64, inner: Box<WindSpec> },
}

impl WindSpec {
    pub fn build(&self) -> WindField {
        match self {
            WindSpec::Zero => WindField::Zero,
            WindSpec::Shear => WindField::Shear,
            WindSpec::Constant { p, q } => WindField::constant(*p, *q),
            WindSpec::Quartic { a, b } => WindField::quartic(*a, *b),
            WindSpec::Gaussian { a, b, c } => WindField::gaussian(*a, *b, *c),
            WindSpec::Scaled { factor, inner } => WindField::scaled(*factor, inner.build()),
        }
    }
}

fn to_point(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricBlock {
    pub samples: Vec<SampleSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicBlock {
    pub start: [f64; 2],
    pub phi0: f64,
    pub t_max: f64,
}

impl GeodesicBlock {
    pub fn start_point(&self) -> Point {
        to_point(self.start)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanBlock {
    pub start: [f64; 2],
    pub d_phi: f64,
    pub t_max: f64,
    #[serde(default)]
    pub range: Option<[f64; 2]>,
}

impl FanBlock {
    pub fn spec(&self) -> randers::FanSpec {
        randers::FanSpec {
            start: to_point(self.start),
            d_phi: self.d_phi,
            phi_range: match self.range {
                Some([a, b]) => (a, b),
                None => (0.0, std::f64::consts::TAU),
            },
            t_max: self.t_max,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontBlock {
    pub start: [f64; 2],
    pub t: f64,
    pub n: usize,
}

impl FrontBlock {
    pub fn start_point(&self) -> Point {
        to_point(self.start)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectBlock {
    pub from: [f64; 2],
    pub to: [f64; 2],
    #[serde(default)]
    pub pos_tol: Option<f64>,
}

impl ConnectBlock {
    pub fn endpoints(&self) -> (Point, Point) {
        (to_point(self.from), to_point(self.to))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PatternSpec {
    ExpandingSquare { legs: usize },
    SectorSearch { radius: f64, sectors: usize },
    CreepingLine { legs: usize, leg_len: f64 },
    Parallel { legs: usize, leg_len: f64 },
}

impl PatternSpec {
    pub fn kind(&self) -> PatternKind {
        match *self {
            PatternSpec::ExpandingSquare { legs } => PatternKind::ExpandingSquare { legs },
            PatternSpec::SectorSearch { radius, sectors } => {
                PatternKind::SectorSearch { radius, sectors }
            }
            PatternSpec::CreepingLine { legs, leg_len } => {
                PatternKind::CreepingLine { legs, leg_len }
            }
            PatternSpec::Parallel { legs, leg_len } => PatternKind::Parallel { legs, leg_len },
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternBlock {
    #[serde(rename = "kind")]
    pub spec: PatternSpec,
    pub origin: [f64; 2],
    pub heading: f64,
    pub spacing: f64,
}

impl PatternBlock {
    pub fn build(&self) -> randers::Result<SearchPattern> {
        randers::generate_pattern(
            self.spec.kind(),
            to_point(self.origin),
            self.heading,
            self.spacing,
        )
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Rect {
        center: [f64; 2],
        half_width: f64,
        half_height: f64,
        #[serde(default)]
        rotation: f64,
    },
    Disc {
        center: [f64; 2],
        radius: f64,
    },
}

impl DomainSpec {
    pub fn build(&self) -> Domain {
        match *self {
            DomainSpec::Rect {
                center,
                half_width,
                half_height,
                rotation,
            } => Domain::Rect {
                center: to_point(center),
                half_width,
                half_height,
                rotation,
            },
            DomainSpec::Disc { center, radius } => Domain::Disc {
                center: to_point(center),
                radius,
            },
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanBlock {
    pub pattern: PatternBlock,
    #[serde(default)]
    pub n_seg: Option<usize>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBlock {}

/// Exported plan document; floats round-trip bit-exactly through JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanDoc {
    pub waypoints: Vec<[f64; 2]>,
    pub legs: Vec<LegDoc>,
    pub total_time: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegDoc {
    pub phi0: f64,
    pub time: f64,
}

impl PlanDoc {
    pub fn from_plan(plan: &randers::SearchPlan) -> Self {
        PlanDoc {
            waypoints: plan.waypoints.iter().map(|w| [w.x, w.y]).collect(),
            legs: plan
                .legs
                .iter()
                .map(|l| LegDoc {
                    phi0: l.phi0,
                    time: l.duration(),
                })
                .collect(),
            total_time: plan.total_time,
            epsilon: plan.epsilon,
        }
    }
}
