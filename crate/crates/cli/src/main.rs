use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use subdiff_cli::config::{parse_list, ConfigFile, ExperimentConfig, Overrides, PRESET_IDS};
use subdiff_cli::criteria::CheckOptions;
use subdiff_cli::kernel_table::open_grid;
use subdiff_cli::output::ensure_dir;
use subdiff_cli::{emit_kernel_table, run_experiment, run_forward, run_verification_suite, CliError, CliResult, SuiteLevel};

/// Multi-term time-fractional diffusion: forward solves, subordination
/// kernels, source reconstruction and verification.
#[derive(Debug, Parser)]
#[command(name = "subdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Noise seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative noise level
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Tikhonov weight
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Number of time steps
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Number of space cells
    #[arg(long, global = true)]
    cells: Option<usize>,
    /// Comma-separated fractional orders
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// Comma-separated weights, one per order
    #[arg(long, global = true)]
    q: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the forward problem with both solvers and write the fields
    Forward,
    /// Tabulate the subordination kernel on a 40×40 grid over (0,T]²
    Kernel,
    /// Reconstruct g from synthetic data; a custom run must set every parameter
    Invert,
    /// Run the verification suite
    Verify {
        /// quick or full
        #[arg(default_value = "quick")]
        level: String,
    },
    /// Run a preset experiment
    Example {
        /// One of ex1a, ex1b, ex2a, ex2b, ex3a, ex3b
        id: String,
    },
}

impl Common {
    fn overrides(&self) -> CliResult<Overrides> {
        let list = |flag: &str, v: &Option<String>| {
            v.as_deref()
                .map(|s| parse_list(s).map_err(|e| CliError::Config(format!("--{flag}: {e}"))))
                .transpose()
        };
        Ok(Overrides {
            seed: self.seed,
            out: self.out.clone(),
            delta: self.delta,
            lambda: self.lambda,
            steps: self.steps,
            cells: self.cells,
            alpha: list("alpha", &self.alpha)?,
            q: list("q", &self.q)?,
        })
    }

    fn file(&self) -> CliResult<Option<ConfigFile>> {
        self.config.as_deref().map(ConfigFile::load).transpose()
    }

    fn resolve(&self, example: Option<&str>, require_complete: bool) -> CliResult<ExperimentConfig> {
        ExperimentConfig::resolve(example, self.file()?.as_ref(), &self.overrides()?, require_complete)
    }
}

fn print_config(cfg: &ExperimentConfig) {
    for (k, v) in cfg.echo() {
        println!("{k} = {v}");
    }
}

fn invert(cfg: &ExperimentConfig) -> CliResult<()> {
    print_config(cfg);
    let (report, files) = run_experiment(cfg)?;
    println!("iterations = {}", report.iterations);
    println!("stop_reason = {}", report.stop_reason.as_str());
    if let Some(e) = report.rel_error {
        println!("rel_error = {e:.6e}");
    }
    println!("wrote {}", files.g_rec.display());
    println!("wrote {}", files.residuals.display());
    if let Some(p) = &files.observation {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", files.report.display());
    Ok(())
}

fn kernel(cfg: &ExperimentConfig) -> CliResult<()> {
    ensure_dir(&cfg.out_dir)?;
    let path = cfg.out_dir.join("kernel.csv");
    let grid = open_grid(cfg.t_end, 40);
    let table = emit_kernel_table(&cfg.spec()?, &cfg.contour()?, &grid, &grid, &path)?;
    println!("min_kernel = {:.6e}", table.min());
    println!("wrote {}", path.display());
    Ok(())
}

fn verify(common: &Common, level: &str) -> CliResult<()> {
    let level = SuiteLevel::parse(level)
        .ok_or_else(|| CliError::Config(format!("unknown suite level {level:?}; expected quick or full")))?;
    let theta0 = common.file()?.and_then(|f| f.theta0);
    let report = run_verification_suite(level, &CheckOptions { theta0 });
    print!("{}", report.to_text());
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().iter().map(|o| o.name).collect();
        Err(CliError::Acceptance(names.join(", ")))
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let common = &cli.common;
    match &cli.command {
        Command::Forward => {
            let cfg = common.resolve(None, false)?;
            print_config(&cfg);
            let s = run_forward(&cfg)?;
            println!("scheme_difference = {:.6e}", s.scheme_difference);
            println!("wrote {}", s.field.display());
            println!("wrote {}", s.observation.display());
            Ok(())
        }
        Command::Kernel => kernel(&common.resolve(None, false)?),
        Command::Invert => invert(&common.resolve(None, true)?),
        Command::Verify { level } => verify(common, level),
        Command::Example { id } => {
            if !PRESET_IDS.contains(&id.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown example {id:?}; expected one of {}",
                    PRESET_IDS.join(", ")
                )));
            }
            invert(&common.resolve(Some(id), false)?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let result = run(&cli);
    println!("wall_time = {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

