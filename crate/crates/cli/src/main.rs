//! `jcas-sim`: experiment runner for the FD-JCAS detection simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jcas_core::config::EvalOptions;
use jcas_core::experiment::{
    load_config, run_experiment, seed_report, Mode, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "jcas-sim",
    about = "Cooperative radar detection in FD-JCAS mmWave HetNets: \
             Monte Carlo simulation cross-validated against closed-form bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    mode: ModeCmd,
}

#[derive(Subcommand)]
enum ModeCmd {
    /// Fused detection probability vs. threshold (analytic bound + MC).
    Detection(CommonArgs),
    /// CFAR: false-alarm rates and threshold round trips.
    #[command(name = "false-alarm")]
    FalseAlarm(CommonArgs),
    /// Two-slot joint/conditional detection and the correlation ratio.
    Temporal(CommonArgs),
    /// Downlink coverage probability vs. SINR target.
    Coverage(CommonArgs),
    /// Detection with |analytic − mc| tolerance flags per row.
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration file (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Override the sweep: `key=v1,v2,...` where key is `theta`,
    /// `target_fa`, `eta`, or a network path like `tiers.0.beta`.
    #[arg(long)]
    sweep: Option<String>,

    /// Override the Monte Carlo trial count.
    #[arg(long)]
    trials: Option<u64>,

    /// Override the base seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output CSV path (stdout when omitted). A `.provenance.json` record is
    /// written next to it.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Un-condition with the literal per-order sum (comparison variant).
    #[arg(long)]
    compat_eq20: bool,

    /// Use the per-factor-squared two-slot transform (comparison variant).
    #[arg(long)]
    compat_eq24: bool,

    /// Print the reproducibility record and exit without running.
    #[arg(long)]
    seed_report: bool,
}

fn parse_sweep(s: &str) -> Result<SweepSpec, String> {
    let (path, values) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=v1,v2,..., got `{s}`"))?;
    let values: Result<Vec<f64>, _> = values.split(',').map(str::trim).map(str::parse).collect();
    match values {
        Ok(values) if !values.is_empty() => Ok(SweepSpec { path: path.trim().into(), values }),
        _ => Err(format!("could not parse sweep values in `{s}`")),
    }
}

fn run(mode: Mode, args: CommonArgs) -> Result<(), (i32, String)> {
    let mut file = load_config(&args.config).map_err(|e| (e.exit_code(), e.to_string()))?;
    if let Some(sweep) = &args.sweep {
        file.sweep = Some(parse_sweep(sweep).map_err(|m| (1, m))?);
    }
    if let Some(trials) = args.trials {
        file.mc.n_trials = trials;
    }
    if let Some(seed) = args.seed {
        file.mc.base_seed = seed;
    }
    if args.out.is_some() {
        file.output = args.out.clone();
    }
    if let Ok(workers) = std::env::var("JCAS_SIM_WORKERS") {
        let n: usize = workers
            .parse()
            .map_err(|_| (1, format!("JCAS_SIM_WORKERS must be an integer, got `{workers}`")))?;
        file.mc.workers = Some(n);
    }
    let eval = EvalOptions {
        compat_eq20: args.compat_eq20,
        compat_eq24: args.compat_eq24,
        ..Default::default()
    };
    let spec = file.into_spec(mode, eval);
    if args.seed_report {
        let prov = seed_report(&spec).map_err(|e| (e.exit_code(), e.to_string()))?;
        println!("{}", serde_json::to_string_pretty(&prov).map_err(|e| (3, e.to_string()))?);
        return Ok(());
    }
    let summary = run_experiment(&spec).map_err(|e| (e.exit_code(), e.to_string()))?;
    eprintln!(
        "{}: {} rows{}{}",
        summary.mode,
        summary.rows,
        if summary.flagged_rows > 0 {
            format!(", {} flagged", summary.flagged_rows)
        } else {
            String::new()
        },
        summary
            .output
            .as_deref()
            .map(|p| format!(" -> {}", p.display()))
            .unwrap_or_default()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.mode {
        ModeCmd::Detection(a) => (Mode::Detection, a),
        ModeCmd::FalseAlarm(a) => (Mode::FalseAlarm, a),
        ModeCmd::Temporal(a) => (Mode::Temporal, a),
        ModeCmd::Coverage(a) => (Mode::Coverage, a),
        ModeCmd::Compare(a) => (Mode::Compare, a),
    };
    match run(mode, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
