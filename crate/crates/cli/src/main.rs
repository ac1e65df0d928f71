use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use eit2des::commands;
use eit2des::{CliError, ConfigBuilder, RunConfig};

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Write one 2D spectrum CSV per waiting time
    Spectrum,
    /// Write closed-form and propagated population Green's functions
    Population,
    /// Write both coherence propagators with and without control
    Greens,
    /// Print analytic and grid trough positions
    Troughs,
    /// Check closed forms against direct propagation
    Validate,
}

#[derive(clap::Args, Debug)]
struct Options {
    /// Run configuration (key = value lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    kind: Option<Kind>,
    #[arg(long, value_enum, global = true)]
    control: Option<Switch>,
    /// Waiting time in ps; repeat for several
    #[arg(long = "t2", global = true)]
    t2: Vec<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Kind {
    Rp,
    Nr,
    Abs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Switch {
    On,
    Off,
}

#[derive(Parser, Debug)]
#[command(
    name = "eit2des",
    version,
    about = "2D spectra of a three-level atom under EIT"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

fn load(options: &Options) -> Result<RunConfig, CliError> {
    let mut builder = match &options.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
            ConfigBuilder::from_text(&text)?
        }
        None => ConfigBuilder::default(),
    };
    if let Some(out) = &options.out {
        builder.set("output", out.display().to_string())?;
    }
    if let Some(kind) = options.kind {
        let tag = match kind {
            Kind::Rp => "rp",
            Kind::Nr => "nr",
            Kind::Abs => "abs",
        };
        builder.set("kind", tag)?;
    }
    if let Some(control) = options.control {
        let tag = match control {
            Switch::On => "on",
            Switch::Off => "off",
        };
        builder.set("control", tag)?;
    }
    if !options.t2.is_empty() {
        let list: Vec<String> = options.t2.iter().map(|t| t.to_string()).collect();
        builder.set("t2", list.join(","))?;
    }
    builder.build()
}

fn run(args: &Args) -> Result<(), CliError> {
    let cfg = load(&args.options)?;
    for line in cfg.summary_lines() {
        println!("{line}");
    }
    match args.command {
        Command::Spectrum => {
            for f in commands::spectrum(&cfg)? {
                println!("wrote {}", f.display());
            }
        }
        Command::Population => println!("wrote {}", commands::population(&cfg)?.display()),
        Command::Greens => {
            for f in commands::greens(&cfg)? {
                println!("wrote {}", f.display());
            }
        }
        Command::Troughs => {
            for line in commands::troughs(&cfg)? {
                println!("{line}");
            }
        }
        Command::Validate => {
            let (lines, failure) = commands::validate(&cfg)?;
            for line in lines {
                println!("{line}");
            }
            if let Some(err) = failure {
                return Err(err);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
