//! Experiment orchestration: config loading, parameter sweeps, analytic-vs-MC
//! comparison, CSV output and reproducibility provenance.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::{
    comrd_detection_prob, conditional_detection_prob, detection_threshold, dl_coverage_prob,
    false_alarm_prob, invert_false_alarm, joint_detection_prob, SlotMode,
};
use crate::config::{EvalOptions, NetworkConfig, RawNetworkConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{
    estimate_detection, estimate_dl_coverage, estimate_false_alarm, estimate_joint_detection,
    SlotCoupling,
};
use crate::rng::StreamKind;

/// Experiment mode, mirroring the CLI subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Detection,
    FalseAlarm,
    Temporal,
    Coverage,
    Compare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Detection => "detection",
            Mode::FalseAlarm => "false-alarm",
            Mode::Temporal => "temporal",
            Mode::Coverage => "coverage",
            Mode::Compare => "compare",
        }
    }

    fn stream_kind(self) -> StreamKind {
        match self {
            Mode::Detection | Mode::Compare => StreamKind::Detection,
            Mode::FalseAlarm => StreamKind::FalseAlarm,
            Mode::Temporal => StreamKind::Temporal,
            Mode::Coverage => StreamKind::Coverage,
        }
    }
}

/// One swept parameter: either a virtual scalar ("theta", "target_fa",
/// "eta") or a dotted path into the network config ("tiers.0.beta",
/// "channel.los_prob", ...).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub path: String,
    pub values: Vec<f64>,
}

/// Monte Carlo settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McSettings {
    pub n_trials: u64,
    pub base_seed: u64,
    /// Worker threads; defaults to the rayon global pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Default for McSettings {
    fn default() -> Self {
        Self { n_trials: 10_000, base_seed: 1, workers: None }
    }
}

/// Fixed experiment parameters used when they are not the swept quantity.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FixedParams {
    /// Detection threshold applied to every tier.
    #[serde(default)]
    pub theta: Option<f64>,
    /// Coverage SINR target.
    #[serde(default)]
    pub eta: Option<f64>,
    /// Coverage serving distance (defaults to channel.serving_distance_m).
    #[serde(default)]
    pub distance_m: Option<f64>,
    /// Tier index for per-tier modes (false-alarm, coverage).
    #[serde(default)]
    pub tier: usize,
}

/// On-disk experiment file: the network block is required, the rest has
/// defaults that the CLI may override.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentFile {
    pub network: RawNetworkConfig,
    #[serde(default)]
    pub mc: McSettings,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub params: FixedParams,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A fully resolved experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub network: RawNetworkConfig,
    pub sweep: SweepSpec,
    pub mc: McSettings,
    pub params: FixedParams,
    pub output: Option<PathBuf>,
    pub eval: EvalOptions,
}

/// Load and validate an experiment file.
pub fn load_config(path: &Path) -> Result<ExperimentFile> {
    let text = std::fs::read_to_string(path)?;
    let file: ExperimentFile = serde_json::from_str(&text)?;
    // surface config violations now, itemized
    file.network.build::<f64>()?;
    if file.mc.n_trials == 0 {
        return Err(Error::Config(vec!["mc.n_trials: must be >= 1".into()]));
    }
    Ok(file)
}

impl ExperimentFile {
    /// Resolve into a runnable spec for the given mode.
    pub fn into_spec(self, mode: Mode, eval: EvalOptions) -> ExperimentSpec {
        let sweep = self.sweep.unwrap_or_else(|| default_sweep(mode));
        ExperimentSpec {
            mode,
            network: self.network,
            sweep,
            mc: self.mc,
            params: self.params,
            output: self.output,
            eval,
        }
    }
}

fn default_sweep(mode: Mode) -> SweepSpec {
    match mode {
        Mode::Detection | Mode::Temporal | Mode::Compare => SweepSpec {
            path: "theta".into(),
            values: vec![1e-21, 3.16e-21, 1e-20, 3.16e-20, 1e-19, 3.16e-19, 1e-18],
        },
        Mode::FalseAlarm => SweepSpec {
            path: "target_fa".into(),
            values: vec![0.05, 0.1, 0.15, 0.2, 0.25],
        },
        Mode::Coverage => SweepSpec {
            path: "eta".into(),
            values: vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0],
        },
    }
}

/// Set a dotted-path scalar inside the raw network JSON.
fn set_network_path(network: &RawNetworkConfig, path: &str, value: f64) -> Result<RawNetworkConfig> {
    let mut v = serde_json::to_value(network)?;
    let mut cursor = &mut v;
    for seg in path.split('.') {
        cursor = match cursor {
            serde_json::Value::Object(map) => map.get_mut(seg).ok_or_else(|| {
                Error::Config(vec![format!("sweep.path: no field `{seg}` in `{path}`")])
            })?,
            serde_json::Value::Array(arr) => {
                let idx: usize = seg.parse().map_err(|_| {
                    Error::Config(vec![format!("sweep.path: `{seg}` is not an index in `{path}`")])
                })?;
                arr.get_mut(idx).ok_or_else(|| {
                    Error::Config(vec![format!("sweep.path: index {idx} out of range in `{path}`")])
                })?
            }
            _ => {
                return Err(Error::Config(vec![format!(
                    "sweep.path: `{path}` does not resolve to a scalar field"
                )]))
            }
        };
    }
    if !cursor.is_number() {
        return Err(Error::Config(vec![format!(
            "sweep.path: `{path}` does not resolve to a scalar field"
        )]));
    }
    *cursor = serde_json::json!(value);
    Ok(serde_json::from_value(v)?)
}

/// Per-tier thresholds for a sweep point.
fn resolve_thetas(
    cfg: &NetworkConfig<f64>,
    sweep_path: &str,
    sweep_value: f64,
    params: &FixedParams,
) -> Result<Vec<f64>> {
    match sweep_path {
        "theta" => Ok(vec![sweep_value; cfg.num_tiers()]),
        "target_fa" => (0..cfg.num_tiers())
            .map(|k| Ok(invert_false_alarm(sweep_value, k, cfg)?.theta))
            .collect(),
        _ => {
            let theta = params.theta.unwrap_or(1e-19);
            Ok(vec![theta; cfg.num_tiers()])
        }
    }
}

/// Outcome summary of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub mode: String,
    pub rows: usize,
    pub flagged_rows: usize,
    pub output: Option<PathBuf>,
}

enum RowSink {
    File(BufWriter<File>),
    Stdout,
}

impl RowSink {
    fn write_line(&mut self, line: &str) -> Result<()> {
        match self {
            RowSink::File(w) => {
                writeln!(w, "{line}")?;
                w.flush()?; // partial results survive a later failure
            }
            RowSink::Stdout => println!("{line}"),
        }
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Run the experiment: one CSV row per sweep value, written in sweep order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunSummary> {
    match spec.mc.workers {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
            pool.install(|| run_experiment_inner(spec))
        }
        _ => run_experiment_inner(spec),
    }
}

fn run_experiment_inner(spec: &ExperimentSpec) -> Result<RunSummary> {
    let mut sink = match &spec.output {
        Some(path) => RowSink::File(BufWriter::new(File::create(path)?)),
        None => RowSink::Stdout,
    };
    let header = match spec.mode {
        Mode::Detection => {
            "sweep_param,sweep_value,rule,kappa,varsigma,analytic,analytic_quad_err,\
             analytic_trunc_index,analytic_residual,mc_mean,mc_std_err,n_trials,base_seed"
        }
        Mode::Compare => {
            "sweep_param,sweep_value,rule,kappa,varsigma,analytic,analytic_quad_err,\
             analytic_trunc_index,analytic_residual,mc_mean,mc_std_err,abs_diff,tolerance,\
             flagged,n_trials,base_seed"
        }
        Mode::FalseAlarm => {
            "sweep_param,sweep_value,tier,theta,analytic_fa,mc_fa,mc_fa_std_err,theta_eq14,\
             mc_fa_eq14,mc_fa_eq14_std_err,n_trials,base_seed"
        }
        Mode::Temporal => {
            "sweep_param,sweep_value,rule,kappa,varsigma,analytic_single,analytic_joint,\
             analytic_conditional,analytic_rho,mc_single,mc_single_std_err,mc_joint,\
             mc_joint_std_err,mc_conditional,mc_rho,rho_gt_one,n_trials,base_seed"
        }
        Mode::Coverage => {
            "sweep_param,sweep_value,tier,distance_m,analytic,analytic_quad_err,mc_mean,\
             mc_std_err,n_trials,base_seed"
        }
    };
    sink.write_line(header)?;

    let mut flagged_rows = 0usize;
    for &value in &spec.sweep.values {
        let network = if is_virtual_path(&spec.sweep.path) {
            spec.network.clone()
        } else {
            set_network_path(&spec.network, &spec.sweep.path, value)?
        };
        let cfg: NetworkConfig<f64> = network.build()?;
        let line = match spec.mode {
            Mode::Detection | Mode::Compare => {
                let thetas = resolve_thetas(&cfg, &spec.sweep.path, value, &spec.params)?;
                let analytic = comrd_detection_prob(
                    &thetas,
                    cfg.fusion.kappa,
                    cfg.fusion.varsigma,
                    &cfg,
                    SlotMode::Single,
                    &spec.eval,
                )?;
                let mc = estimate_detection(
                    &cfg,
                    &thetas,
                    cfg.fusion.kappa,
                    cfg.fusion.varsigma,
                    spec.mc.n_trials,
                    spec.mc.base_seed,
                )?;
                let base = format!(
                    "{},{},{:?},{},{},{},{},{},{},{},{},{},{}",
                    spec.sweep.path,
                    fmt(value),
                    cfg.fusion.rule,
                    cfg.fusion.kappa,
                    fmt(cfg.fusion.varsigma),
                    fmt(analytic.value),
                    fmt(analytic.quadrature_abs_err),
                    analytic.product_truncation_index,
                    fmt(analytic.residual_bound),
                    fmt(mc.mean),
                    fmt(mc.std_err),
                    spec.mc.n_trials,
                    spec.mc.base_seed
                );
                if spec.mode == Mode::Compare {
                    let diff = (analytic.value - mc.mean).abs();
                    let tol = 3.0 * mc.std_err + analytic.quadrature_abs_err;
                    let flagged = diff > tol;
                    if flagged {
                        flagged_rows += 1;
                    }
                    // splice the comparison columns before n_trials
                    let (head, tail) = split_before_trials(&base);
                    format!("{head},{},{},{},{tail}", fmt(diff), fmt(tol), flagged)
                } else {
                    base
                }
            }
            Mode::FalseAlarm => {
                let tier = spec.params.tier;
                let (theta, theta_eq14) = match spec.sweep.path.as_str() {
                    "target_fa" => (
                        invert_false_alarm(value, tier, &cfg)?.theta,
                        detection_threshold(value, tier, &cfg)?.theta,
                    ),
                    "theta" => (value, f64::NAN),
                    _ => (spec.params.theta.unwrap_or(1e3), f64::NAN),
                };
                let analytic = false_alarm_prob(theta, tier, &cfg)?;
                let mc = estimate_false_alarm(&cfg, theta, tier, spec.mc.n_trials, spec.mc.base_seed)?;
                let (mc14, mc14_se) = if theta_eq14.is_nan() {
                    (f64::NAN, f64::NAN)
                } else {
                    let e = estimate_false_alarm(
                        &cfg,
                        theta_eq14,
                        tier,
                        spec.mc.n_trials,
                        spec.mc.base_seed,
                    )?;
                    (e.mean, e.std_err)
                };
                format!(
                    "{},{},{tier},{},{},{},{},{},{},{},{},{}",
                    spec.sweep.path,
                    fmt(value),
                    fmt(theta),
                    fmt(analytic),
                    fmt(mc.mean),
                    fmt(mc.std_err),
                    fmt(theta_eq14),
                    fmt(mc14),
                    fmt(mc14_se),
                    spec.mc.n_trials,
                    spec.mc.base_seed
                )
            }
            Mode::Temporal => {
                let thetas = resolve_thetas(&cfg, &spec.sweep.path, value, &spec.params)?;
                let single = comrd_detection_prob(
                    &thetas,
                    cfg.fusion.kappa,
                    cfg.fusion.varsigma,
                    &cfg,
                    SlotMode::Single,
                    &spec.eval,
                )?;
                let joint = joint_detection_prob(
                    &thetas,
                    cfg.fusion.kappa,
                    cfg.fusion.varsigma,
                    &cfg,
                    &spec.eval,
                )?;
                let (cond, rho) = if single.value > 1e-12 {
                    (
                        conditional_detection_prob(
                            &thetas,
                            cfg.fusion.kappa,
                            cfg.fusion.varsigma,
                            &cfg,
                            &spec.eval,
                        )?
                        .value,
                        joint.value / (single.value * single.value),
                    )
                } else {
                    (f64::NAN, f64::NAN)
                };
                let mc = estimate_joint_detection(
                    &cfg,
                    &thetas,
                    cfg.fusion.kappa,
                    cfg.fusion.varsigma,
                    SlotCoupling::Shared,
                    spec.mc.n_trials,
                    spec.mc.base_seed,
                )?;
                let mc_rho = mc.rho.unwrap_or(f64::NAN);
                let rho_gt_one = mc_rho > 1.0;
                if !rho_gt_one {
                    flagged_rows += 1;
                }
                format!(
                    "{},{},{:?},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    spec.sweep.path,
                    fmt(value),
                    cfg.fusion.rule,
                    cfg.fusion.kappa,
                    fmt(cfg.fusion.varsigma),
                    fmt(single.value),
                    fmt(joint.value),
                    fmt(cond),
                    fmt(rho),
                    fmt(mc.single.mean),
                    fmt(mc.single.std_err),
                    fmt(mc.joint.mean),
                    fmt(mc.joint.std_err),
                    fmt(mc.conditional.unwrap_or(f64::NAN)),
                    fmt(mc_rho),
                    rho_gt_one,
                    spec.mc.n_trials,
                    spec.mc.base_seed
                )
            }
            Mode::Coverage => {
                let tier = spec.params.tier;
                let d = spec.params.distance_m.unwrap_or(cfg.channel.serving_distance);
                let eta = match spec.sweep.path.as_str() {
                    "eta" => value,
                    _ => spec.params.eta.unwrap_or(0.5),
                };
                let analytic = dl_coverage_prob(eta, d, tier, &cfg)?;
                let mc = estimate_dl_coverage(
                    &cfg,
                    eta,
                    d,
                    tier,
                    spec.mc.n_trials,
                    spec.mc.base_seed,
                )?;
                format!(
                    "{},{},{tier},{},{},{},{},{},{},{}",
                    spec.sweep.path,
                    fmt(value),
                    fmt(d),
                    fmt(analytic.value),
                    fmt(analytic.quadrature_abs_err),
                    fmt(mc.mean),
                    fmt(mc.std_err),
                    spec.mc.n_trials,
                    spec.mc.base_seed
                )
            }
        };
        sink.write_line(&line)?;
    }

    let summary = RunSummary {
        mode: spec.mode.name().into(),
        rows: spec.sweep.values.len(),
        flagged_rows,
        output: spec.output.clone(),
    };
    if let Some(out) = &spec.output {
        let prov = seed_report(spec)?;
        let mut prov_path = out.clone().into_os_string();
        prov_path.push(".provenance.json");
        std::fs::write(prov_path, serde_json::to_string_pretty(&prov)?)?;
    }
    Ok(summary)
}

fn is_virtual_path(path: &str) -> bool {
    matches!(path, "theta" | "target_fa" | "eta")
}

fn split_before_trials(row: &str) -> (String, String) {
    let cols: Vec<&str> = row.split(',').collect();
    let head = cols[..cols.len() - 2].join(",");
    let tail = cols[cols.len() - 2..].join(",");
    (head, tail)
}

/// Reproducibility record: everything needed to regenerate any row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub mode: String,
    pub base_seed: u64,
    pub n_trials: u64,
    pub stream_tag: u64,
    /// Stream ids of the first trials, as a spot-check handle.
    pub first_stream_ids: Vec<u64>,
    pub config_hash: String,
    pub sweep_path: String,
    pub sweep_values: Vec<f64>,
    /// Truncation depth of the analytic products at the first sweep point.
    pub analytic_truncation_index: u32,
    pub analytic_residual_bound: f64,
}

/// Stable 64-bit FNV-1a over the canonicalized (key-sorted) JSON encoding.
pub fn config_hash(network: &RawNetworkConfig) -> Result<String> {
    let v = serde_json::to_value(network)?;
    let canon = canonical_json(&v);
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in canon.as_bytes() {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01B3);
    }
    Ok(format!("{hash:016x}"))
}

fn canonical_json(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let inner: Vec<String> =
                keys.iter().map(|k| format!("{k:?}:{}", canonical_json(&map[*k]))).collect();
            format!("{{{}}}", inner.join(","))
        }
        serde_json::Value::Array(arr) => {
            let inner: Vec<String> = arr.iter().map(canonical_json).collect();
            format!("[{}]", inner.join(","))
        }
        other => other.to_string(),
    }
}

/// Emit the provenance record for a spec.
pub fn seed_report(spec: &ExperimentSpec) -> Result<Provenance> {
    let cfg: NetworkConfig<f64> = spec.network.build()?;
    // truncation metadata from the analytic engine at the first sweep point
    let (trunc, residual) = match spec.mode {
        Mode::FalseAlarm => (0, 0.0),
        _ => {
            let value = spec.sweep.values.first().copied().unwrap_or(1e-19);
            let thetas = resolve_thetas(&cfg, &spec.sweep.path, value, &spec.params)?;
            let r = comrd_detection_prob(
                &thetas,
                cfg.fusion.kappa,
                cfg.fusion.varsigma,
                &cfg,
                SlotMode::Single,
                &spec.eval,
            )?;
            (r.product_truncation_index, r.residual_bound)
        }
    };
    let kind = spec.mode.stream_kind();
    Ok(Provenance {
        mode: spec.mode.name().into(),
        base_seed: spec.mc.base_seed,
        n_trials: spec.mc.n_trials,
        stream_tag: kind.tag(),
        first_stream_ids: (0..4).map(|t| crate::rng::stream_id(kind, t)).collect(),
        config_hash: config_hash(&spec.network)?,
        sweep_path: spec.sweep.path.clone(),
        sweep_values: spec.sweep.values.clone(),
        analytic_truncation_index: trunc,
        analytic_residual_bound: residual,
    })
}
