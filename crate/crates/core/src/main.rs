use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use noma_vlc::channel::from_db;
use noma_vlc::experiment::{self, ExperimentConfig, ExperimentKind};
use noma_vlc::region::{feasibility_scan, sca_solve, Objective};
use noma_vlc::scheduler::{evaluate_schedule, RegionCache, Scheme, UserChannelSet};
use noma_vlc::{Error, Result};

#[derive(Parser)]
#[command(
    name = "noma-vlc",
    version,
    about = "Adaptive NOMA/TDMA user pairing for VLC downlinks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross-check every SCA solve against the bisection oracle.
    #[arg(long, global = true)]
    validate_oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// NOMA region against weak-user SNR.
    Region(#[command(flatten)] Common),
    /// Mean sum-rate of TDMA, forced and adaptive pairing against user count.
    SweepUsers(#[command(flatten)] Common),
    /// Sum-rate of the fixed six-user layout against LED power.
    SweepPower(#[command(flatten)] Common),
    /// Pair users with the given channel gains.
    Pair {
        #[command(flatten)]
        common: Common,
        /// Comma-separated channel gains; users are numbered from 1.
        #[arg(long, value_delimiter = ',', required = true)]
        gains: Vec<f64>,
        /// LED power in W (defaults to the config value).
        #[arg(long)]
        p_led: Option<f64>,
        #[arg(long, value_enum, default_value = "proposed")]
        scheme: SchemeArg,
    },
    /// Dump the SCA iterates for one bound as CSV (iter, r, f).
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        snr_db: f64,
        #[arg(long, value_enum)]
        bound: BoundArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Tdma,
    Forced,
    Proposed,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Tdma => Scheme::Tdma,
            SchemeArg::Forced => Scheme::Forced,
            SchemeArg::Proposed => Scheme::Proposed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundArg {
    Min,
    Max,
}

fn load_config(common: &Common, kind: Option<ExperimentKind>) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let (Some(want), Some(have)) = (kind, cfg.experiment) {
        if want != have {
            return Err(Error::Config(format!(
                "config is for {have:?} but the {want:?} subcommand was run"
            )));
        }
    }
    cfg.experiment = kind.or(cfg.experiment);
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if common.out.is_some() {
        cfg.output = common.out.clone();
    }
    cfg.validate_oracle |= common.validate_oracle;
    cfg.validate()?;
    Ok(cfg)
}

fn output(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Region(c) => experiment_command(&c, ExperimentKind::Region),
        Command::SweepUsers(c) => experiment_command(&c, ExperimentKind::SweepUsers),
        Command::SweepPower(c) => experiment_command(&c, ExperimentKind::SweepPower),
        Command::Pair {
            common,
            gains,
            p_led,
            scheme,
        } => {
            let cfg = load_config(&common, None)?;
            let p_led = p_led.unwrap_or(cfg.led_power_w);
            let ids: Vec<(usize, f64)> =
                gains.iter().enumerate().map(|(i, &h)| (i + 1, h)).collect();
            let users = UserChannelSet::from_gains(&ids, p_led, cfg.noise_power_w)?;
            let regions = RegionCache::new(cfg.sca_settings());
            let plan = Scheme::from(scheme).plan(&users, &regions)?;
            let mut out = output(&cfg)?;
            write!(out, "{plan}")?;
            for s in Scheme::ALL {
                let rate = evaluate_schedule(&s.plan(&users, &regions)?, &users)?.sum_rate;
                writeln!(out, "# {} {rate}", s.name())?;
            }
            out.flush()?;
            Ok(())
        }
        Command::Trace {
            common,
            snr_db,
            bound,
        } => {
            let cfg = load_config(&common, None)?;
            let settings = cfg.sca_settings();
            let snr = from_db(snr_db);
            let Some(seed) = feasibility_scan(snr, &settings)? else {
                eprintln!("NOMA region is empty at {snr_db} dB");
                return Ok(());
            };
            let objective = match bound {
                BoundArg::Min => Objective::Min,
                BoundArg::Max => Objective::Max,
            };
            let (_, trace) = sca_solve(snr, objective, seed, &settings)?;
            trace.write_csv(snr, output(&cfg)?)
        }
    }
}

fn experiment_command(common: &Common, kind: ExperimentKind) -> Result<()> {
    let cfg = load_config(common, Some(kind))?;
    let table = experiment::run(&cfg, kind)?;
    table.write_csv(output(&cfg)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
