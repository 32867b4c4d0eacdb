use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use toomqca_cli::config::*;
use toomqca_cli::{execute, init_thread_pool, replay, CliError, RunReport, EXIT_INVARIANT, EXIT_OK};

/// Seeded experiments for the Toom-stabilized cellular automaton.
///
/// Settings come from `--config` (TOML) and are overridden by flags. Each run
/// writes CSV files and a manifest into `--out`. Set TOOMQCA_THREADS to size
/// the worker pool.
#[derive(Parser, Debug)]
#[command(name = "toomqca", version)]
struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed, decimal or 0x-prefixed hex.
    #[arg(long, global = true)]
    seed: Option<Seed>,

    /// Re-run the experiment recorded in a manifest and compare digests.
    #[arg(long, conflicts_with = "config")]
    replay: Option<PathBuf>,

    #[command(flatten)]
    schedule: ScheduleFlags,

    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Synchronous run of the full rule.
    RunSync(SyncFlags),
    /// Marching-soldier run with random update order.
    RunAsync(AsyncFlags),
    /// Continuous-time run with Poisson clocks.
    RunCt(CtFlags),
    /// Extended-rectangle statistics: failure sparsity or adversarial placements.
    ExrecScan(ScanFlags),
    /// Iterates the noise-strength recursion over levels.
    ThresholdFlow(FlowFlags),
    /// Exhaustive fault enumeration on a built-in gadget.
    GadgetCheck(GadgetFlags),
    /// Memory lifetime of a Toom-protected classical bit.
    Lifetime(LifetimeFlags),
    /// Smallest scale constants meeting the feasibility constraints.
    SolveParams(SolveFlags),
    /// Random error sets inside triangles under noiseless Toom dynamics.
    ErosionTest(ErosionFlags),
}

fn resolve(cli: &Cli, cmd: &Cmd) -> Result<RunConfig, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut schedule = file.schedule;
    cli.schedule.apply(&mut schedule);
    let experiment = match cmd {
        Cmd::RunSync(f) => Experiment::RunSync(overlay(file.run_sync, |s| f.apply(s))),
        Cmd::RunAsync(f) => Experiment::RunAsync(overlay(file.run_async, |s| f.apply(s))),
        Cmd::RunCt(f) => Experiment::RunCt(overlay(file.run_ct, |s| f.apply(s))),
        Cmd::ExrecScan(f) => Experiment::ExrecScan(overlay(file.exrec_scan, |s| f.apply(s))),
        Cmd::ThresholdFlow(f) => Experiment::ThresholdFlow(overlay(file.threshold_flow, |s| f.apply(s))),
        Cmd::GadgetCheck(f) => Experiment::GadgetCheck(overlay(file.gadget_check, |s| f.apply(s))),
        Cmd::Lifetime(f) => Experiment::Lifetime(overlay(file.lifetime, |s| f.apply(s))),
        Cmd::SolveParams(f) => Experiment::SolveParams(overlay(file.solve_params, |s| f.apply(s))),
        Cmd::ErosionTest(f) => Experiment::ErosionTest(overlay(file.erosion_test, |s| f.apply(s))),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(Seed(DEFAULT_SEED));
    let cfg = RunConfig { seed, schedule, experiment };
    cfg.validate()?;
    Ok(cfg)
}

fn overlay<T>(mut s: T, f: impl FnOnce(&mut T)) -> T {
    f(&mut s);
    s
}

fn report(r: &RunReport) -> u8 {
    for line in &r.summary {
        println!("{line}");
    }
    println!("manifest: {}", r.manifest_path.display());
    match &r.violation {
        Some(v) => {
            eprintln!("invariant violated: {v}");
            EXIT_INVARIANT as u8
        }
        None => EXIT_OK as u8,
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    init_thread_pool()?;
    if let Some(m) = &cli.replay {
        let rep = replay(m, &cli.out)?;
        let code = report(&rep.run);
        if rep.mismatched.is_empty() {
            println!("replay reproduced {} outputs byte for byte", rep.run.manifest.outputs.len());
            return Ok(code);
        }
        eprintln!("replay differs in: {}", rep.mismatched.join(", "));
        return Ok(EXIT_INVARIANT as u8);
    }
    let Some(cmd) = &cli.cmd else {
        Cli::command().print_help()?;
        return Err(CliError::Config("no subcommand given".into()));
    };
    let cfg = resolve(&cli, cmd)?;
    Ok(report(&execute(&cfg, &cli.out)?))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
