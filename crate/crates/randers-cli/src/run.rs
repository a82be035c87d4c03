//! Subcommand execution: library calls plus artifact emission.

use std::path::{Path, PathBuf};

use anyhow::Context;
use randers::{
    connect, coverage_check, eval_alpha_beta, eval_f, fan, fundamental_tensor, gauss_curvature,
    initial_state, integrate_with, projective_flatness_residual, time_front, ConnectOpts,
    IntegrateOpts, MetricChoice, PlanOpts, TangentSample,
};
use serde_json::json;

use crate::emit;
use crate::scenario::{PlanDoc, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Metric,
    Geodesic,
    Fan,
    Front,
    Connect,
    Pattern,
    Plan,
    Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug)]
pub struct RunOpts {
    pub out_dir: PathBuf,
    /// When present, only artifacts of these formats are written.
    pub formats: Option<Vec<Format>>,
    pub tol: Option<f64>,
    pub seed_angles: Option<usize>,
}

impl RunOpts {
    fn wants(&self, f: Format) -> bool {
        self.formats.as_ref().is_none_or(|v| v.contains(&f))
    }

    fn integrate_opts(&self) -> IntegrateOpts {
        match self.tol {
            Some(t) => IntegrateOpts::with_tol(t),
            None => IntegrateOpts::default(),
        }
    }

    fn connect_opts(&self) -> ConnectOpts {
        let mut c = ConnectOpts {
            integrate: self.integrate_opts(),
            ..ConnectOpts::default()
        };
        if let Some(n) = self.seed_angles {
            c.seed_angles = n;
        }
        c
    }
}

#[derive(Debug, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
    pub failed_checks: usize,
}

fn write_artifact(
    out: &mut RunOutput,
    dir: &Path,
    name: &str,
    content: &str,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    out.files.push(path);
    Ok(())
}

pub fn run(cmd: Command, scenario: &Scenario, opts: &RunOpts) -> anyhow::Result<RunOutput> {
    let field = scenario.wind_field();
    let mut out = RunOutput::default();
    match cmd {
        Command::Metric => {
            let block = scenario
                .metric
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `metric` block"))?;
            let mut rows = Vec::with_capacity(block.samples.len());
            for s in &block.samples {
                let sample = TangentSample::new(s.pos[0], s.pos[1], s.vel[0], s.vel[1]);
                let f = eval_f(&field, sample.pos, sample.vel)?;
                let (alpha, beta) = eval_alpha_beta(&field, sample.pos, sample.vel)?;
                let tensor = fundamental_tensor(&field, &sample)?;
                let k = gauss_curvature(&field, &sample)?;
                let res = projective_flatness_residual(&field, &sample, MetricChoice::Randers)?;
                rows.push(emit::MetricRow {
                    x: sample.pos.x,
                    y: sample.pos.y,
                    u: sample.vel.x,
                    v: sample.vel.y,
                    f,
                    alpha,
                    beta,
                    g_uu: tensor.g.xx,
                    g_uv: tensor.g.xy,
                    g_vv: tensor.g.yy,
                    det_g: tensor.det,
                    k,
                    res1: res.x,
                    res2: res.y,
                });
            }
            if opts.wants(Format::Csv) {
                write_artifact(&mut out, &opts.out_dir, "metric.csv", &emit::metric_csv(&rows))?;
            }
            out.lines.push(format!("metric: {} samples", rows.len()));
        }
        Command::Geodesic => {
            let block = scenario
                .geodesic
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `geodesic` block"))?;
            let init = initial_state(&field, block.start_point(), block.phi0)?;
            let path = integrate_with(&field, init, block.t_max, &opts.integrate_opts())?;
            if opts.wants(Format::Csv) {
                write_artifact(
                    &mut out,
                    &opts.out_dir,
                    "geodesic.csv",
                    &emit::geodesic_csv(&field, &path),
                )?;
            }
            if opts.wants(Format::Svg) {
                write_artifact(
                    &mut out,
                    &opts.out_dir,
                    "geodesic.svg",
                    &emit::fan_svg(&field, std::slice::from_ref(&path)),
                )?;
            }
            out.lines.push(format!(
                "geodesic: {} samples, t_end = {}, {:?}",
                path.samples.len(),
                path.end().t,
                path.termination
            ));
        }
        Command::Fan => {
            let block = scenario
                .fan
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `fan` block"))?;
            let paths = fan(&field, &block.spec())?;
            if opts.wants(Format::Csv) {
                write_artifact(&mut out, &opts.out_dir, "fan.csv", &emit::fan_csv(&field, &paths))?;
            }
            if opts.wants(Format::Svg) {
                write_artifact(&mut out, &opts.out_dir, "fan.svg", &emit::fan_svg(&field, &paths))?;
            }
            out.lines.push(format!("fan: {} paths", paths.len()));
        }
        Command::Front => {
            let block = scenario
                .front
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `front` block"))?;
            let points = time_front(&field, block.start_point(), block.t, block.n)?;
            let phis: Vec<f64> = (0..block.n)
                .map(|i| std::f64::consts::TAU * i as f64 / block.n as f64)
                .collect();
            if opts.wants(Format::Csv) {
                write_artifact(
                    &mut out,
                    &opts.out_dir,
                    "front.csv",
                    &emit::front_csv(&phis, &points),
                )?;
            }
            out.lines.push(format!("front: {} points at t = {}", points.len(), block.t));
        }
        Command::Connect => {
            let block = scenario
                .connect
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `connect` block"))?;
            let (from, to) = block.endpoints();
            let mut copts = opts.connect_opts();
            if let Some(tol) = block.pos_tol {
                copts.pos_tol = tol;
            }
            let r = connect(&field, from, to, &copts)?;
            let doc = json!({
                "from": [from.x, from.y],
                "to": [to.x, to.y],
                "phi0": r.phi0,
                "time": r.time,
                "miss": r.miss,
                "samples": r.path.samples.iter()
                    .map(|s| [s.t, s.pos.x, s.pos.y])
                    .collect::<Vec<_>>(),
            });
            if opts.wants(Format::Json) {
                write_artifact(
                    &mut out,
                    &opts.out_dir,
                    "connect.json",
                    &format!("{:#}\n", doc),
                )?;
            }
            out.lines
                .push(format!("connect: phi0 = {}, time = {}, miss = {}", r.phi0, r.time, r.miss));
        }
        Command::Pattern => {
            let block = scenario
                .pattern
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `pattern` block"))?;
            let pattern = block.build()?;
            let doc = json!({
                "origin": [pattern.origin.x, pattern.origin.y],
                "heading": pattern.heading,
                "spacing": pattern.spacing,
                "waypoints": pattern.waypoints.iter().map(|w| [w.x, w.y]).collect::<Vec<_>>(),
            });
            if opts.wants(Format::Json) {
                write_artifact(&mut out, &opts.out_dir, "pattern.json", &format!("{:#}\n", doc))?;
            }
            if opts.wants(Format::Svg) {
                write_artifact(
                    &mut out,
                    &opts.out_dir,
                    "pattern.svg",
                    &emit::pattern_svg(&pattern.waypoints),
                )?;
            }
            out.lines
                .push(format!("pattern: {} waypoints", pattern.waypoints.len()));
        }
        Command::Plan => {
            let block = scenario
                .plan
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `plan` block"))?;
            let pattern = block.pattern.build()?;
            let mut popts = PlanOpts {
                connect: opts.connect_opts(),
                ..PlanOpts::default()
            };
            popts.connect.integrate.h_max = popts.connect.integrate.h_max.min(0.05);
            if let Some(n) = block.n_seg {
                popts.n_seg = n;
            }
            if let Some(e) = block.epsilon {
                popts.epsilon = Some(e);
            }
            if let Some(d) = &block.domain {
                popts.domain = Some(d.build());
            }
            if let Some(m) = block.max_iters {
                popts.max_iters = m;
            }
            if let Some(g) = block.grid {
                popts.grid = g;
            }
            let cmp = randers::compare(&field, &pattern, &popts)?;
            let domain = popts
                .domain
                .unwrap_or_else(|| randers::nominal_domain(&pattern));
            let epsilon = popts.epsilon.unwrap_or(0.5 * pattern.spacing);
            let coverage = coverage_check(&cmp.optimal, &domain, epsilon, popts.grid)?;
            let doc = json!({
                "standard": PlanDoc::from_plan(&cmp.standard),
                "optimal": PlanDoc::from_plan(&cmp.optimal),
                "saving": cmp.saving,
                "coverage": {
                    "complete": coverage.complete,
                    "worst_distance": coverage.worst_distance,
                    "worst_point": [coverage.worst_point.x, coverage.worst_point.y],
                    "samples": coverage.samples,
                },
            });
            if opts.wants(Format::Json) {
                write_artifact(&mut out, &opts.out_dir, "plan.json", &format!("{:#}\n", doc))?;
            }
            if opts.wants(Format::Svg) {
                write_artifact(
                    &mut out,
                    &opts.out_dir,
                    "plan.svg",
                    &emit::plan_svg(&field, &cmp.standard, &cmp.optimal),
                )?;
            }
            out.lines.push(format!(
                "plan: standard {} / optimal {} (saving {:.3}%), coverage complete: {}",
                cmp.standard.total_time,
                cmp.optimal.total_time,
                100.0 * cmp.saving,
                coverage.complete
            ));
        }
        Command::Check => {
            scenario
                .check
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("scenario has no `check` block"))?;
            let outcomes = randers::diagnostics::run_checks(&field)?;
            for o in &outcomes {
                out.lines.push(format!(
                    "{} {}: {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.name,
                    o.detail
                ));
                if !o.passed {
                    out.failed_checks += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Exit-code taxonomy: 1 domain/convexity, 2 numerical failure, 3 bad input.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<randers::Error>() {
        Some(randers::Error::ConvexityViolation { .. })
        | Some(randers::Error::NotWeakEverywhere { .. })
        | Some(randers::Error::ZeroVector) => 1,
        Some(randers::Error::StepFailure { .. })
        | Some(randers::Error::DegenerateHessian { .. })
        | Some(randers::Error::NoConnection { .. })
        | Some(randers::Error::InfeasibleTrack { .. })
        | Some(randers::Error::CoverageUnreachable { .. }) => 2,
        Some(randers::Error::BadParams(_)) | None => 3,
    }
}

/// Machine-readable error for stderr.
pub fn error_json(err: &anyhow::Error) -> String {
    let kind = match err.downcast_ref::<randers::Error>() {
        Some(randers::Error::ConvexityViolation { .. }) => "convexity_violation",
        Some(randers::Error::ZeroVector) => "zero_vector",
        Some(randers::Error::NotWeakEverywhere { .. }) => "not_weak_everywhere",
        Some(randers::Error::DegenerateHessian { .. }) => "degenerate_hessian",
        Some(randers::Error::StepFailure { .. }) => "step_failure",
        Some(randers::Error::NoConnection { .. }) => "no_connection",
        Some(randers::Error::InfeasibleTrack { .. }) => "infeasible_track",
        Some(randers::Error::CoverageUnreachable { .. }) => "coverage_unreachable",
        Some(randers::Error::BadParams(_)) => "bad_params",
        None => "bad_input",
    };
    format!("{:#}\n", json!({"error": {"kind": kind, "message": format!("{err:#}")}}))
}
