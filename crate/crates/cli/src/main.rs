//! `hydrosar`: reservoir water extent from dual-polarization SAR scenes,
//! gridded rainfall aggregation, and rainfall-versus-extent analysis over
//! local files.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or input error.

mod analyze;
mod config;
mod exit;
mod extent;
mod rain;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::exit::CmdResult;

/// Declares a flag group whose every flag is an optional override of the
/// config key with the same name.
macro_rules! config_flags {
    ($name:ident { $($field:ident),* $(,)? }) => {
        #[derive(Debug, Args)]
        struct $name {
            $(
                #[arg(long, help = config::doc(stringify!($field)))]
                $field: Option<String>,
            )*
        }

        impl $name {
            fn overrides(&self) -> Vec<(&'static str, Option<String>)> {
                vec![$((stringify!($field), self.$field.clone())),*]
            }
        }
    };
}

config_flags!(ExtentFlags {
    vv_dir, vh_dir, reservoir, out_csv, mask_out_dir,
    window, looks, min_valid, nbins, combine, connectivity, min_pixels, units, jobs,
});
config_flags!(RainFlags { daily_dir, mode, polygon, start_year, end_year, out, latitude_weighting });
config_flags!(AnalyzeFlags { extent_csv, rain_csv, out_dir, max_lag });

#[derive(Debug, Parser)]
#[command(name = "hydrosar", version, about = "Reservoir water extent and rainfall analysis from local rasters")]
struct Cli {
    /// Flat key = value config file (default: $HYDROSAR_CONFIG); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Water extent per date from VV/VH scene directories.
    Extent(ExtentFlags),
    /// Annual mean, monthly climatology, or basin zonal series from daily grids.
    Rain(RainFlags),
    /// Monthly box statistics, series plot and rainfall-to-extent lag correlation.
    Analyze(AnalyzeFlags),
    /// Synthetic scenes or rainfall stacks with known answers.
    Synth(synth::SynthArgs),
    /// List every config key with its default and meaning.
    Keys,
}

fn configured(cli: &Cli, overrides: Vec<(&'static str, Option<String>)>) -> CmdResult<RunConfig> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(overrides)?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Extent(f) => extent::run(&configured(cli, f.overrides())?),
        Command::Rain(f) => rain::run(&configured(cli, f.overrides())?),
        Command::Analyze(f) => analyze::run(&configured(cli, f.overrides())?),
        Command::Synth(args) => synth::run(args),
        Command::Keys => {
            for (key, default, doc) in config::KEYS {
                println!("{key} = {default}\t# {doc}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hydrosar: error: {f}");
            f.code()
        }
    }
}
