use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qwsqueeze_cli::config::{OutputConfig, OutputFormat, RunConfig};
use qwsqueeze_cli::{cmd_point, cmd_sweep, exit};
use qwsqueeze_core::sweep::{CaptionCoupling, FigureId};

#[derive(Parser)]
#[command(
    name = "qwsqueeze",
    version,
    about = "Mechanical squeezing in a two-quantum-well optomechanical cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single operating point and print a JSON record.
    Point {
        #[command(flatten)]
        common: Common,
    },
    /// Run a 1D or 2D parameter sweep and write result files.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Caption preset for a figure panel (overrides the config's physics).
        #[arg(long, value_name = "ID")]
        figure: Option<String>,
        /// Exciton-cavity coupling reading used by figure presets.
        #[arg(long, value_enum, default_value_t = CouplingReading::TwoOmegaM)]
        caption_coupling: CouplingReading,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        /// Worker threads; 0 picks automatically.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration or sweep metadata sidecar.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CouplingReading {
    /// g₁ = g₂ = 2ω_m
    TwoOmegaM,
    /// g₁ = g₂ = ω_m
    OmegaM,
}

impl From<CouplingReading> for CaptionCoupling {
    fn from(r: CouplingReading) -> Self {
        match r {
            CouplingReading::TwoOmegaM => CaptionCoupling::TwoOmegaM,
            CouplingReading::OmegaM => CaptionCoupling::OmegaM,
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Point { common } => {
            let path = common.config.context("`point` requires --config")?;
            let mut cfg = RunConfig::load(&path)?;
            if let Some(format) = common.format {
                cfg.output.format = format;
            }
            cmd_point(&cfg, std::io::stdout().lock())
        }
        Command::Sweep {
            common,
            figure,
            caption_coupling,
            out,
            threads,
        } => {
            let loaded = common.config.as_deref().map(RunConfig::load).transpose()?;
            let mut cfg = match (figure, loaded) {
                (Some(id), loaded) => {
                    let id: FigureId = id.parse()?;
                    let output = loaded
                        .map(|c| c.output)
                        .unwrap_or_else(OutputConfig::default);
                    RunConfig::figure(id, caption_coupling.into(), output)
                }
                (None, Some(cfg)) => cfg,
                (None, None) => anyhow::bail!("`sweep` requires --config or --figure"),
            };
            if let Some(format) = common.format {
                cfg.output.format = format;
            }
            let report = cmd_sweep(&cfg, &out, threads)?;
            for f in &report.files {
                println!("{}", f.display());
            }
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // exit code 2 is reserved for unstable points
            let code = if e.use_stderr() {
                exit::ERROR
            } else {
                exit::SUCCESS
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::ERROR as u8)
        }
    }
}
