use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lisl_core::topology::Arrangement;
use lisl_sim::commands::{self, Check};
use lisl_sim::report::{self, RunRecord};
use lisl_sim::{exit, pipeline, Config, SimError};

/// LEO constellation network simulator: laser inter-satellite link
/// topologies, weighted traffic, store-and-forward flow simulation.
#[derive(Parser)]
#[command(name = "lisl-sim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one `sat_<id>.json` record per satellite.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the flow simulation on a record directory and print the report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        records: PathBuf,
        /// Overrides `traffic.seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare measured graph diameters with the hop-count formulas.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Write satellite, edge, region and weight-histogram CSV tables.
    Export {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several seeded trials per arrangement and average them.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        /// Comma-separated names or numbers 1–4.
        #[arg(long, value_delimiter = ',', default_value = "full4,three_within_plane,three_between_planes,two")]
        arrangements: Vec<Arrangement>,
    },
}

fn run(cli: Cli) -> Result<i32, SimError> {
    match cli.command {
        Command::Generate { config, out } => {
            let config = Config::load(&config)?;
            let n = commands::generate(&config, &out)?;
            println!("wrote {n} records to {}", out.display());
            Ok(exit::SUCCESS)
        }
        Command::Simulate { config, records, seed } => {
            let config = Config::load(&config)?;
            let report = pipeline::simulate_dir(&config, &records, seed)?;
            let record = RunRecord::new(&config, seed.unwrap_or(config.traffic.seed), report);
            print!("{}", report::render_text(&record));
            report::persist(&config, &record)?;
            if record.report.flows_dropped > 0 {
                eprintln!("{} of {} flows dropped", record.report.flows_dropped, record.report.flow_count);
                return Ok(exit::DROPPED);
            }
            Ok(exit::SUCCESS)
        }
        Command::Validate { config } => {
            let config = Config::load(&config)?;
            let rows = commands::validate(&config)?;
            print!("{}", commands::render_validate(&rows));
            if rows.iter().any(|r| r.check == Check::Mismatch) {
                return Ok(exit::MISMATCH);
            }
            Ok(exit::SUCCESS)
        }
        Command::Export { config, records, out } => {
            let config = Config::load(&config)?;
            let done = commands::export_dir(&config, &records, &out)?;
            for f in &done.files {
                println!("{}", f.display());
            }
            Ok(exit::SUCCESS)
        }
        Command::Sweep { config, trials, arrangements } => {
            let config = Config::load(&config)?;
            let sweep = commands::sweep(&config, &arrangements, trials)?;
            print!("{}", commands::render_sweep(&sweep));
            if let Some(log) = &config.output.runs_log {
                for r in sweep.run_records(&config) {
                    report::append_line(log, &r.to_json_line())?;
                }
            }
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    });
    ExitCode::from(code as u8)
}
