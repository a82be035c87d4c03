use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use randers_cli::{error_json, exit_code_for, run, Command, Format, RunOpts, Scenario};

/// Time-optimal navigation under weak planar winds via Randers geodesics.
#[derive(Parser)]
#[command(name = "randers", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Metric quantities (F, alpha, beta, tensor, curvature, residuals) at sample points.
    Metric(Common),
    /// One geodesic from a start point and control angle.
    Geodesic(Common),
    /// A family of geodesics over a range of control angles.
    Fan(Common),
    /// Endpoints of a uniform fan at a fixed elapsed time.
    Front(Common),
    /// Least-time two-point connection by shooting.
    Connect(Common),
    /// Waypoints of a standard search pattern.
    Pattern(Common),
    /// Standard vs time-optimal search plan with coverage report.
    Plan(Common),
    /// Run the scenario invariant suite and report pass/fail.
    Check(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario configuration (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for artifacts.
    #[arg(long, env = "RANDERS_OUT", default_value = ".")]
    out: PathBuf,
    /// Restrict emitted artifacts to these formats (repeatable).
    #[arg(long, value_enum)]
    format: Vec<FormatArg>,
    /// Integrator tolerance (absolute and relative).
    #[arg(long)]
    tol: Option<f64>,
    /// Number of multistart seed angles for connections.
    #[arg(long)]
    seed_angles: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Svg,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Svg => Format::Svg,
        }
    }
}

fn dispatch(cmd: Command, common: &Common) -> anyhow::Result<usize> {
    let text = std::fs::read_to_string(&common.scenario)?;
    let scenario = Scenario::parse(&text)?;
    let opts = RunOpts {
        out_dir: common.out.clone(),
        formats: if common.format.is_empty() {
            None
        } else {
            Some(common.format.iter().map(|f| Format::from(*f)).collect())
        },
        tol: common.tol,
        seed_angles: common.seed_angles,
    };
    let output = run(cmd, &scenario, &opts)?;
    for line in &output.lines {
        println!("{line}");
    }
    for file in &output.files {
        println!("wrote {}", file.display());
    }
    Ok(output.failed_checks)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, common) = match &cli.command {
        Sub::Metric(c) => (Command::Metric, c),
        Sub::Geodesic(c) => (Command::Geodesic, c),
        Sub::Fan(c) => (Command::Fan, c),
        Sub::Front(c) => (Command::Front, c),
        Sub::Connect(c) => (Command::Connect, c),
        Sub::Pattern(c) => (Command::Pattern, c),
        Sub::Plan(c) => (Command::Plan, c),
        Sub::Check(c) => (Command::Check, c),
    };
    match dispatch(cmd, common) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(err) => {
            eprint!("{}", error_json(&err));
            ExitCode::from(exit_code_for(&err) as u8)
        }
    }
}
