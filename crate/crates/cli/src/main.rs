//! Experiment runner for the PAM-4 PON equalizer laboratory.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use ponlab_cli::config::{EqualizerKind, ExperimentConfig};
use ponlab_cli::{complexity, runner};
use ponlab_core::link::Scenario;

#[derive(Parser)]
#[command(
    name = "ponlab",
    about = "Waveform-level simulator and equalizer laboratory for a downstream 100G PAM-4 PON",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Experiment config JSON; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario override: CD or Realistic.
    #[arg(long)]
    scenario: Option<String>,
    /// Distance list override, comma separated km.
    #[arg(long)]
    distances: Option<String>,
    /// Output directory override (PONLAB_OUT also works).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the default experiment config to a file.
    InitConfig {
        /// Destination path.
        #[arg(long, default_value = "ponlab.json")]
        path: PathBuf,
    },
    /// Simulate captures at one distance and dump frames + dataset cache.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        distance: f64,
    },
    /// Train one learnable equalizer at one distance; saves checkpoint +
    /// training log.
    Train {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        distance: f64,
        /// dnn or fc-scinet
        #[arg(long)]
        equalizer: String,
    },
    /// Evaluate one equalizer at one distance.
    Evaluate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        distance: f64,
        /// none, ffe9, ffe21, dnn or fc-scinet
        #[arg(long)]
        equalizer: String,
    },
    /// Full BER-vs-distance sweep over every configured equalizer.
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// BER map over (window p × interactor levels L) at one distance.
    Hypermap {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        distance: f64,
        /// Window sizes, comma separated.
        #[arg(long, default_value = "16,32,64")]
        windows: String,
        /// Interactor levels, comma separated.
        #[arg(long, default_value = "1,2,3,4,5")]
        levels: String,
    },
    /// RMpS / mBER / PRB table, optionally fed by sweep CSVs.
    Complexity {
        #[command(flatten)]
        common: CommonOpts,
        /// sweep.csv produced by the sweep subcommand.
        #[arg(long)]
        sweep_csv: Option<PathBuf>,
    },
}

fn parse_equalizer(s: &str) -> anyhow::Result<EqualizerKind> {
    Ok(match s {
        "none" => EqualizerKind::None,
        "ffe9" => EqualizerKind::Ffe9,
        "ffe21" => EqualizerKind::Ffe21,
        "dnn" => EqualizerKind::Dnn,
        "fc-scinet" | "scinet" => EqualizerKind::FcScinet,
        other => bail!("unknown equalizer '{other}'"),
    })
}

fn load_config(common: &CommonOpts) -> anyhow::Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = match &common.config {
        Some(path) => serde_json::from_str(
            &std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?,
        )
        .context("parsing config JSON")?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(s) = &common.scenario {
        cfg.link.link.scenario = match s.to_ascii_lowercase().as_str() {
            "cd" => Scenario::Cd,
            "realistic" => Scenario::Realistic,
            other => bail!("unknown scenario '{other}' (use CD or Realistic)"),
        };
    }
    if let Some(d) = &common.distances {
        cfg.distances_km = d
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .context("parsing --distances")?;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_usize_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(|v| v.trim().parse::<usize>().map_err(Into::into))
        .collect()
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::InitConfig { path } => {
            let cfg = ExperimentConfig::default();
            std::fs::write(&path, serde_json::to_string_pretty(&cfg)?)?;
            println!("wrote {}", path.display());
        }
        Command::Simulate { common, distance } => {
            let cfg = load_config(&common)?;
            let dir = cfg.resolved_output_dir();
            runner::run_simulate(&cfg, distance, &dir)?;
            println!(
                "simulated {} captures of {} symbols at {distance} km into {}",
                cfg.n_captures,
                cfg.n_symbols,
                dir.display()
            );
        }
        Command::Train {
            common,
            distance,
            equalizer,
        } => {
            let cfg = load_config(&common)?;
            let eq = parse_equalizer(&equalizer)?;
            let dir = cfg.resolved_output_dir();
            runner::run_train(&cfg, distance, eq, &dir)?;
            println!("trained {eq} at {distance} km; artifacts in {}", dir.display());
        }
        Command::Evaluate {
            common,
            distance,
            equalizer,
        } => {
            let cfg = load_config(&common)?;
            let eq = parse_equalizer(&equalizer)?;
            let dir = cfg.resolved_output_dir();
            let outcome = runner::run_evaluate(&cfg, distance, eq, &dir)?;
            match &outcome.outcome {
                Ok(r) => println!(
                    "{} at {distance} km ({}): BER {:.3e} ({} bit errors / {} bits)",
                    eq, cfg.link.link.scenario, r.ber, r.bit_errors, r.bits_counted
                ),
                Err(e) => println!("{eq} at {distance} km failed: {e}"),
            }
        }
        Command::Sweep { common } => {
            let cfg = load_config(&common)?;
            let dir = cfg.resolved_output_dir();
            let outcomes = runner::run_sweep(&cfg)?;
            runner::write_sweep_outputs(&cfg, &outcomes, &dir)?;
            for o in &outcomes {
                match &o.outcome {
                    Ok(r) => println!(
                        "d={:5.1} km {:<10} BER {:.3e}",
                        o.distance_km,
                        o.equalizer.to_string(),
                        r.ber
                    ),
                    Err(e) => println!(
                        "d={:5.1} km {:<10} failed: {e}",
                        o.distance_km,
                        o.equalizer.to_string()
                    ),
                }
            }
            println!("wrote {}/sweep.csv and ber_vs_distance.svg", dir.display());
        }
        Command::Hypermap {
            common,
            distance,
            windows,
            levels,
        } => {
            let cfg = load_config(&common)?;
            let dir = cfg.resolved_output_dir();
            let windows = parse_usize_list(&windows)?;
            let levels = parse_usize_list(&levels)?;
            let map = runner::run_hypermap(&cfg, distance, &windows, &levels)?;
            runner::write_hypermap_outputs(&cfg, distance, &map, &dir)?;
            match map.argmin {
                Some((w, l, ber)) => {
                    println!("best cell: window {w}, levels {l}, BER {ber:.3e}")
                }
                None => println!("no feasible cell"),
            }
            println!("wrote {}/hypermap.csv and hypermap.svg", dir.display());
        }
        Command::Complexity { common, sweep_csv } => {
            let cfg = load_config(&common)?;
            let dir = cfg.resolved_output_dir();
            let measured = match &sweep_csv {
                Some(path) => Some(complexity::mber_from_sweep_csv(path)?),
                None => None,
            };
            let report = complexity::build_report(&cfg, measured.as_ref())?;
            complexity::write_report(&report, &dir)?;
            print!("{}", complexity::format_table(&report));
            println!("wrote {}/complexity.json", dir.display());
        }
    }
    Ok(())
}
