use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rabi_core::semiclassical::resonance_table;
use rabi_dyn::config::TableConfig;
use rabi_dyn::runner::{default_out_dir, estimate_seconds, run_batch};
use rabi_dyn::{plot, presets, Batch, CliError, CliResult, ScenarioConfig};

/// Two-level atom dynamics in a classical or quantized field.
#[derive(Parser)]
#[command(name = "rabi-dyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios of a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (default: out/<batch name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Run a built-in preset: table1, fig2, fig3, fig4 or fig5.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the beta^2 = 30000 quantum runs.
        #[arg(long)]
        paper_scale: bool,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Print the config the preset expands to and exit.
        #[arg(long)]
        dump: bool,
    },
    /// Print the multiphoton resonance table.
    Table1 {
        /// Field strength G/omega.
        #[arg(long, default_value_t = 0.2)]
        coupling: f64,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        /// Also write table.csv and a manifest here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a matplotlib script for a manifest.
    Plot {
        manifest: PathBuf,
        /// Script path (default: plot.py next to the manifest).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn execute(batch: &Batch, out: Option<PathBuf>, jobs: usize) -> CliResult<()> {
    let out = out.unwrap_or_else(|| default_out_dir(batch));
    let manifest = run_batch(batch, &out, jobs)?;
    for (_, f) in manifest.files() {
        println!("{}", out.join(&f.path).display());
    }
    println!("{}", out.join(rabi_dyn::runner::MANIFEST_FILE).display());
    Ok(())
}

fn read_config(path: &Path) -> CliResult<Batch> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Batch::parse(&text)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { config, out, jobs } => execute(&read_config(&config)?, out, jobs),
        Command::Preset {
            name,
            out,
            paper_scale,
            jobs,
            dump,
        } => {
            let batch = presets::preset(&name, paper_scale)?;
            if dump {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&batch)
                        .map_err(|e| CliError::Io(e.to_string()))?
                );
                return Ok(());
            }
            if paper_scale {
                let secs = estimate_seconds(&batch);
                eprintln!(
                    "paper-scale run: estimated {:.0} min of quantum integration",
                    secs / 60.0
                );
            }
            execute(&batch, out, jobs)
        }
        Command::Table1 {
            coupling,
            kmax,
            out,
        } => {
            let table = TableConfig {
                name: "table1".into(),
                coupling_ratio: coupling,
                k_max: kmax,
            };
            table.validate()?;
            let ks: Vec<u32> = (1..=kmax).collect();
            println!(
                "{:>3} {:>14} {:>12} {:>12} {:>12}",
                "K", "Omega_K/w", "|L_K|/w", "w T_K", "delta/w"
            );
            for r in resonance_table(coupling, &ks)? {
                println!(
                    "{:>3} {:>14.9} {:>12.5e} {:>12.4e} {:>12.5e}",
                    r.k, r.omega_k, r.l_k_abs, r.t_k, r.delta
                );
            }
            match out {
                Some(dir) => {
                    let batch = Batch {
                        name: "table1".into(),
                        scenarios: vec![ScenarioConfig::Table(table)],
                    };
                    execute(&batch, Some(dir), 1)
                }
                None => Ok(()),
            }
        }
        Command::Plot { manifest, output } => {
            let path = plot::emit_script(&manifest, output.as_deref())?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
