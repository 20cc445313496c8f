use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fcm_phantom::experiment::presets::{dolphin_scenario, reference_dolphin_scenario};
use fcm_phantom::experiment::{
    demo_fcm_closure, demo_markov_nonclosure, replay_component, run_scenario, RasterFormat,
    ScenarioConfig,
};
use fcm_phantom::{FcmError, StateVector};

#[derive(Parser)]
#[command(
    name = "fcm-phantom",
    version,
    about = "Phantom-node learning and mixing for fuzzy cognitive maps"
)]
struct Cli {
    /// Seed for training and evaluation, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Raster output format, overriding the config.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Pgm,
    Both,
}

impl From<Format> for RasterFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => RasterFormat::Csv,
            Format::Pgm => RasterFormat::Pgm,
            Format::Both => RasterFormat::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the experts, mix them and write the report.
    Run { config: PathBuf },
    /// Re-run one trained component (or `mixture`) from a binary initial state.
    Replay {
        config: PathBuf,
        #[arg(long)]
        expert: String,
        /// Comma-separated initial state, e.g. 0,0,0,1,0
        #[arg(long)]
        initial: String,
    },
    /// Print a closure demonstration.
    Demo {
        #[arg(value_enum)]
        which: Demo,
    },
    /// Write a ready-to-run scenario file.
    Preset {
        #[arg(value_enum)]
        which: Preset,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Markov,
    Closure,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Dolphin,
    DolphinReference,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: Cli) -> Result<(), FcmError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| FcmError::Config(format!("cannot start {n} threads: {e}")))?;
    }
    let load = |path: &Path| -> Result<ScenarioConfig, FcmError> {
        let mut cfg = ScenarioConfig::load(path)?;
        if let Some(seed) = cli.seed {
            cfg.set_seed(seed);
        }
        if let Some(f) = cli.format {
            cfg.raster_format = f.into();
        }
        Ok(cfg)
    };
    match &cli.command {
        Command::Run { config } => {
            let cfg = load(config)?;
            let report = run_scenario(&cfg)?;
            print!("{}", report.to_text());
            println!("outputs written to {}", cfg.output_dir().display());
        }
        Command::Replay {
            config,
            expert,
            initial,
        } => {
            let cfg = load(config)?;
            let initial = StateVector::parse_csv(initial)?;
            let r = replay_component(&cfg, expert, &initial)?;
            println!("{expert} over {}", r.matrix.labels().join(","));
            for (t, s) in r.trajectory.iter().enumerate() {
                println!("{t:>4}  {}", s.bit_string());
            }
            println!("attractor: {}", r.attractor.kind_label());
            for p in &r.written {
                println!("wrote {}", p.display());
            }
        }
        Command::Demo {
            which: Demo::Markov,
        } => print!("{}", demo_markov_nonclosure()?.text),
        Command::Demo {
            which: Demo::Closure,
        } => print!("{}", demo_fcm_closure()?.text),
        Command::Preset { which, out } => {
            std::fs::create_dir_all(out).map_err(|e| FcmError::io(out, e))?;
            let (file, mut cfg) = match which {
                Preset::Dolphin => ("dolphin.toml", dolphin_scenario("results")),
                Preset::DolphinReference => (
                    "dolphin-reference.toml",
                    reference_dolphin_scenario("results-reference"),
                ),
            };
            if let Some(seed) = cli.seed {
                cfg.set_seed(seed);
            }
            if let Some(f) = cli.format {
                cfg.raster_format = f.into();
            }
            let path = out.join(file);
            cfg.save(&path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
