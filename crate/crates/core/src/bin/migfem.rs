use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use migfem::cli::{self, Format, RunConfig};

#[derive(Parser)]
#[command(name = "migfem", version, about = "Rating-migration finite element solver", after_help = cli::config_help())]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set mesh.order=2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory (replaces outputs.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output formats (replaces outputs.formats).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Worker threads for assembly and convergence rows.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the time loop and write the surface, diagnostics and stability report.
    Solve,
    /// Spatial and temporal convergence tables.
    Converge,
    /// Track the migration boundary.
    Boundary,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

fn load(args: &Args) -> migfem::Result<RunConfig> {
    let mut config = cli::parse_config(args.config.as_deref(), &args.overrides)?;
    if let Some(dir) = &args.out {
        config.outputs.directory = dir.clone();
    }
    if let Some(f) = args.format {
        config.outputs.formats = match f {
            FormatArg::Csv => vec![Format::Csv],
            FormatArg::Json => vec![Format::Json],
            FormatArg::Both => vec![Format::Csv, Format::Json],
        };
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(cli::EXIT_CONFIG as u8);
        }
    }
    let config = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(cli::exit_code(&e) as u8);
        }
    };
    let result = match args.command {
        Command::Solve => cli::command_solve(&config),
        Command::Converge => cli::command_converge(&config),
        Command::Boundary => cli::command_boundary(&config),
    };
    match result {
        Ok(outcome) => {
            for m in &outcome.messages {
                println!("{m}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
