use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use vlc_noma::experiment::{
    run_realization_traced, run_sweep, summary_table, write_diagnostics, write_results,
};
use vlc_noma::export::dump_realization;
use vlc_noma::seed::realization_seed;
use vlc_noma::{ExperimentConfig, Optimizer, SchemeSelection, SweepVar};

/// Monte-Carlo max-min rate sweeps for multi-carrier NOMA VLC networks.
#[derive(Debug, Parser)]
#[command(name = "vlc-noma", version)]
struct Args {
    /// JSON config file; command-line flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// imposed, not-imposed or both.
    #[arg(long)]
    scheme: Option<SchemeSelection>,
    /// users, leds, subcarriers, power, led-angle, fov or height.
    #[arg(long)]
    sweep: Option<SweepVar>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    /// Comma-separated subcarrier counts K evaluated at every sweep value.
    #[arg(long, value_delimiter = ',')]
    subcarriers: Option<Vec<usize>>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// sa or ts.
    #[arg(long)]
    optimizer: Option<Optimizer>,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Result CSV path.
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Optional per-row diagnostics CSV.
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// Dump positions, binding, pairs, allocation, trace and SINR of the
    /// first realization of the first sweep point into this directory.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

fn resolve(args: &Args) -> vlc_noma::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.scheme {
        cfg.scheme = v;
    }
    if let Some(v) = args.sweep {
        cfg.sweep = v;
    }
    if let Some(v) = &args.values {
        cfg.values = v.clone();
    }
    if let Some(v) = &args.subcarriers {
        cfg.subcarriers = v.clone();
    }
    if let Some(v) = args.realizations {
        cfg.realizations = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.optimizer {
        cfg.optimizer = v;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    Ok(cfg)
}

fn run(args: &Args) -> vlc_noma::Result<()> {
    let cfg = resolve(args)?;
    if args.print_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    cfg.validate()?;

    if let Some(dir) = &args.dump {
        let scheme = cfg.scheme.schemes()[0];
        let point = cfg.point(cfg.values[0], cfg.k_values()[0], scheme)?;
        let r = run_realization_traced(&point, realization_seed(cfg.master_seed, 0), true)?;
        dump_realization(dir, &r)?;
        log::info!("dumped realization 0 to {}", dir.display());
    }

    let rows = run_sweep(&cfg)?;
    write_results(BufWriter::new(File::create(&args.out)?), &rows)?;
    if let Some(path) = &args.diagnostics {
        write_diagnostics(BufWriter::new(File::create(path)?), &rows)?;
    }
    print!("{}", summary_table(&rows));
    let failed: usize = rows.iter().map(|r| r.failed).sum();
    if failed > 0 {
        log::warn!("{failed} realizations failed and were excluded from the means");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
