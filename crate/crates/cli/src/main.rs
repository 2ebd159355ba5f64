mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use szego_core::error::ErrorClass;
use szego_core::Error;

use config::{FileConfig, Overrides, RunConfig};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "szego", version, about = "Szegő/Bergman kernels of Im z₂ = (Re z₁)^{2m}: φ, its zeros, kernel routes and probes")]
struct Cli {
    /// Order m of the model hypersurface (default 2).
    #[arg(long, global = true)]
    m: Option<u32>,
    /// JSON config file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    max_evals: Option<usize>,
    /// Zero table to load (JSON). Defaults to $SZEGO_ZERO_DIR/zeros_m{m}.json when present.
    #[arg(long, global = true)]
    table: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Also write a gnuplot script plotting the output file.
    #[arg(long, global = true, requires = "output")]
    plot_script: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate φ at points or on a real grid.
    Phi(commands::PhiArgs),
    /// Locate the zeros ia_j of φ and persist the table.
    Zeros(commands::ZerosArgs),
    /// Evaluate the Szegő or Bergman kernel by one or more routes.
    Kernel(commands::KernelArgs),
    /// Run a diagnostic probe.
    Probe(ProbeCmd),
}

#[derive(Args, Debug)]
struct ProbeCmd {
    #[command(subcommand)]
    which: commands::Probe,
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Usage | ErrorClass::Io => 2,
        ErrorClass::Domain => 3,
        ErrorClass::Numerical => 4,
    }
}

fn run(cli: Cli) -> szego_core::Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::merge(
        file,
        Overrides {
            m: cli.m,
            rel_tol: cli.rel_tol,
            abs_tol: cli.abs_tol,
            max_evals: cli.max_evals,
            table: cli.table.clone(),
            format: cli.format,
        },
    )?;
    let mut table = match &cli.cmd {
        Command::Phi(a) => commands::phi(&cfg, a)?,
        Command::Zeros(a) => commands::zeros(&cfg, a)?,
        Command::Kernel(a) => commands::kernel(&cfg, a)?,
        Command::Probe(p) => commands::probe(&cfg, &p.which)?,
    };
    table.meta = cfg.meta();
    let text = table.render(cfg.format)?;
    output::emit(&text, cli.output.as_deref())?;
    if let (Some(script), Some(data)) = (&cli.plot_script, &cli.output) {
        output::emit(&output::plot_script(&table, data)?, Some(script))?;
    }
    if table.rows.is_empty() == false && commands::all_rows_failed(&table) {
        return Err(Error::Domain("every requested row failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
