use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use alohacr_cli::commands;
use alohacr_cli::config::{self, AnalyticConfig, BerSweepConfig, MacSweepConfig, Prop1Config};

#[derive(Parser)]
#[command(
    name = "alohacr",
    about = "Slotted random access with two-user collision resolution: simulator and analysis front end",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV and SVG files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Raw BER of the blind / training / SIC-only schemes over two-user slots.
    BerSweep(CommonArgs),
    /// Buffered-ALOHA sweep over arrival-rate and contention grids.
    MacSweep(CommonArgs),
    /// Non-resolvable-collision probability versus intentional-delay spread.
    Prop1Scan(CommonArgs),
    /// Closed-form throughput/stability/delay model without simulation.
    Analytic(CommonArgs),
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::BerSweep(args) => {
            let mut cfg: BerSweepConfig = config::load(&args.config)?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            let table = commands::ber_sweep::run(&cfg, &args.out)?;
            println!(
                "ber-sweep: {} rows -> {}",
                table.rows(),
                args.out.join("ber_sweep.csv").display()
            );
        }
        Command::MacSweep(args) => {
            let mut cfg: MacSweepConfig = config::load(&args.config)?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            let table = commands::mac_sweep::run(&cfg, &args.out)?;
            println!(
                "mac-sweep: {} rows -> {}",
                table.rows(),
                args.out.join("mac_sweep.csv").display()
            );
        }
        Command::Prop1Scan(args) => {
            let cfg: Prop1Config = config::load(&args.config)?;
            let table = commands::prop1_scan::run(&cfg, &args.out)?;
            println!(
                "prop1-scan: {} rows -> {}",
                table.rows(),
                args.out.join("prop1_scan.csv").display()
            );
        }
        Command::Analytic(args) => {
            let cfg: AnalyticConfig = config::load(&args.config)?;
            let table = commands::analytic::run(&cfg, &args.out)?;
            println!(
                "analytic: {} rows -> {}",
                table.rows(),
                args.out.join("analytic.csv").display()
            );
        }
    }
    Ok(())
}
