//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::experiment::{execute, ResultBundle, RunError};
use crate::presets::{preset, write_filter_csv, write_mechanism_csv, Overrides, Preset};

#[derive(Debug, Parser)]
#[command(name = "krqr", version, about = "Kicked-rotor quantum resonance experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a TOML configuration file.
    Run { config: PathBuf },
    /// Run a named preset (fig1a, fig1b, fig2, fig3a, fig3b, fig4,
    /// plane-wave, anti-resonance, ratchet, broad, reconstruction).
    Scenario {
        name: String,
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        kbar: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long)]
        kicks: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Check a configuration file without running it.
    Validate { config: PathBuf },
}

fn report(bundle: &ResultBundle) {
    let cfg = &bundle.config;
    eprintln!(
        "{}: wrote {} and {}",
        cfg.scenario,
        crate::export::csv_path(&cfg.output_path).display(),
        crate::export::json_path(&cfg.output_path).display()
    );
    if let Some(dev) = bundle.engine_deviation {
        eprintln!("engine deviation {dev:.3e}");
    }
}

fn fail(err: RunError) -> i32 {
    eprintln!("error: {err}");
    err.exit_code()
}

/// Parses `args` (including the program name) and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run { config } => {
            match ExperimentConfig::load(&config).map_err(RunError::from).and_then(|c| execute(&c)) {
                Ok(bundle) => {
                    report(&bundle);
                    0
                }
                Err(e) => fail(e),
            }
        }
        Command::Validate { config } => match ExperimentConfig::load(&config).and_then(|c| c.validate().map(|r| (c, r))) {
            Ok((c, r)) => {
                eprintln!(
                    "{}: ok ({} kicks, ladder half-width {})",
                    c.scenario, r.params.n_kicks, r.params.ladder_half_width
                );
                0
            }
            Err(e) => fail(e.into()),
        },
        Command::Scenario { name, k, kbar, sigma, delta, phi, kicks, out } => {
            let overrides = Overrides { k, kbar, sigma, delta, phi, kicks, out };
            match preset(&name, &overrides) {
                Ok(Preset::Experiment(cfg)) => match execute(&cfg) {
                    Ok(bundle) => {
                        report(&bundle);
                        0
                    }
                    Err(e) => fail(e),
                },
                Ok(Preset::Mechanism(spec)) => finish(&name, write_mechanism_csv(&spec)),
                Ok(Preset::Filter(spec)) => finish(&name, write_filter_csv(&spec)),
                Err(e) => fail(e.into()),
            }
        }
    }
}

fn finish(name: &str, written: Result<PathBuf, crate::export::ExportError>) -> i32 {
    match written {
        Ok(path) => {
            eprintln!("{name}: wrote {}", path.display());
            0
        }
        Err(e) => fail(e.into()),
    }
}
