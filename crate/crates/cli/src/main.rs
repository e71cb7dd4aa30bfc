use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use shapeinv_cli::config::{ScenarioConfig, Task};
use shapeinv_cli::emit::{emit, EmitFormat};
use shapeinv_cli::error::{CliError, Result};
use shapeinv_cli::report::{RunReport, TaskStatus};
use shapeinv_cli::{builtin_example, run};

#[derive(Parser)]
#[command(
    name = "shapeinv",
    version,
    about = "Shape-invariant matrix superpotentials: verification, spectra, zero modes and ladders"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

impl From<FormatArg> for EmitFormat {
    fn from(f: FormatArg) -> EmitFormat {
        match f {
            FormatArg::Csv => EmitFormat::Csv,
            FormatArg::Json => EmitFormat::Json,
            FormatArg::Both => EmitFormat::Both,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Spectral parameter override.
    #[arg(long)]
    k: Option<f64>,
    /// Domain override: lower bound, upper bound, node count.
    #[arg(long, num_args = 3, value_names = ["A", "B", "N"], allow_negative_numbers = true)]
    domain: Option<Vec<f64>>,
    /// Number of ladder levels.
    #[arg(long)]
    levels: Option<usize>,
    /// Verification tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory for the report artifacts.
    #[arg(long, default_value = ".")]
    output: PathBuf,
    /// Which artifacts to write.
    #[arg(long, value_enum, default_value = "both")]
    format: FormatArg,
}

#[derive(Args)]
struct ModelArgs {
    /// Scenario JSON file.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct AllArgs {
    /// Scenario JSON file.
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated task list overriding the scenario's tasks.
    #[arg(long, value_delimiter = ',')]
    task: Option<Vec<String>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ExampleArgs {
    /// Oscillator strength (must be positive).
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Channel coupling.
    #[arg(long, default_value_t = 0.5)]
    phi: f64,
    /// Comma-separated task list.
    #[arg(long, value_delimiter = ',')]
    task: Option<Vec<String>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the determining equations and shape invariance by residuals.
    Verify(ModelArgs),
    /// Compute the low spectrum and compare it with the ladder predictions.
    Spectrum(ModelArgs),
    /// Construct zero modes by two-sided integration.
    Groundstate(ModelArgs),
    /// Raise zero modes into excited states and compare energies.
    Ladder(ModelArgs),
    /// Run the tasks requested in the scenario file.
    All(AllArgs),
    /// Run the built-in coupled radial-oscillator example scenario.
    ExamplePs(ExampleArgs),
}

fn apply_common(config: &mut ScenarioConfig, common: &CommonArgs) -> Result<()> {
    if let Some(k) = common.k {
        config.k = k;
    }
    if let Some(dom) = &common.domain {
        config.domain.a = dom[0];
        config.domain.b = dom[1];
        if dom[2] <= 0.0 || dom[2].fract() != 0.0 {
            return Err(CliError::Config(format!(
                "domain node count must be a positive integer, got {}",
                dom[2]
            )));
        }
        config.domain.npoints = dom[2] as usize;
    }
    if let Some(levels) = common.levels {
        config.levels = levels;
    }
    if let Some(tol) = common.tol {
        config.tolerances.verify = tol;
    }
    Ok(())
}

fn parse_tasks(list: &[String]) -> Result<Vec<Task>> {
    list.iter().map(|s| Task::parse(s)).collect()
}

fn print_summary(report: &RunReport) {
    for (name, task) in &report.tasks {
        let status = match task.status {
            TaskStatus::Ok => "ok",
            TaskStatus::ToleranceFailed => "tolerance failed",
            TaskStatus::Error => "error",
        };
        match &task.error {
            Some(msg) => println!("{name}: {status} ({msg})"),
            None => println!("{name}: {status}"),
        }
    }
}

fn execute(mut config: ScenarioConfig, common: &CommonArgs, tasks: Option<Vec<Task>>) -> Result<i32> {
    apply_common(&mut config, common)?;
    if let Some(tasks) = tasks {
        config.tasks = tasks;
    }
    let report = run(&config)?;
    let written = emit(&report, common.format.into(), &common.output)?;
    print_summary(&report);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(report.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Verify(args) => {
            let config = ScenarioConfig::load(&args.model)?;
            execute(config, &args.common, Some(vec![Task::Verify]))
        }
        Cmd::Spectrum(args) => {
            let config = ScenarioConfig::load(&args.model)?;
            execute(config, &args.common, Some(vec![Task::Spectrum]))
        }
        Cmd::Groundstate(args) => {
            let config = ScenarioConfig::load(&args.model)?;
            execute(config, &args.common, Some(vec![Task::Groundstate]))
        }
        Cmd::Ladder(args) => {
            let config = ScenarioConfig::load(&args.model)?;
            execute(config, &args.common, Some(vec![Task::Ladder]))
        }
        Cmd::All(args) => {
            let config = ScenarioConfig::load(&args.model)?;
            let tasks = args.task.as_deref().map(parse_tasks).transpose()?;
            execute(config, &args.common, tasks)
        }
        Cmd::ExamplePs(args) => {
            // Default spectral parameter 0.3: positive and non-integer keeps
            // the ground family two-dimensional.
            let config = builtin_example(args.mu, args.phi, args.common.k.unwrap_or(0.3))?;
            let tasks = args.task.as_deref().map(parse_tasks).transpose()?;
            execute(config, &args.common, tasks)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
