//! End-to-end Monte Carlo trial engine: sampled layouts with marks, CoMRD
//! pre-selection/decision/fusion, and estimators for detection, false-alarm,
//! downlink-coverage and two-slot statistics.
//!
//! Every trial draws from its own derived random stream, so estimates are
//! bit-reproducible for a given base seed and trivially parallel; reduction
//! is a sum of per-trial counts and therefore order-independent.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{
    pathloss, power_control, radar_echo_power, sample_fading_power, sample_si_power_gain,
};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::point_process::{sample_beta_gpp, sample_ppp, GppParams, Point, PointSet};
use crate::rng::{trial_rng, StreamKind};

/// Per-BS marks, drawn once per realization and frozen across time slots.
#[derive(Debug, Clone, Copy)]
pub struct BsMark {
    /// The BS runs the FD-JCAS scheme (DL transmission alongside sensing).
    pub jcas: bool,
    /// Antenna alignment and link LoS put this BS in the interfering set.
    pub aligned_interferer: bool,
    /// LoS state of the link towards the typical point of interest.
    pub los_to_poi: bool,
}

/// One sampled network with marks; the typical PoI sits at the origin.
#[derive(Debug, Clone)]
pub struct NetworkRealization<T> {
    pub tiers: Vec<PointSet<T>>,
    /// Marks aligned index-wise with each tier's points.
    pub marks: Vec<Vec<BsMark>>,
    pub object_present: bool,
}

impl<T: Real> NetworkRealization<T> {
    fn mark_of(&self, tier: usize, idx: usize) -> BsMark {
        self.marks[tier][idx]
    }

    /// Is this BS in the interfering set (FD-JCAS and aligned)?
    fn interferes(&self, tier: usize, idx: usize) -> bool {
        let m = self.mark_of(tier, idx);
        m.jcas && m.aligned_interferer
    }
}

/// Per-tier record of one CoMRD trial.
#[derive(Debug, Clone, Copy)]
pub struct TierOutcome<T> {
    pub distance: T,
    pub weight: bool,
    pub local_decision: bool,
    pub sinr: T,
}

/// Fused decision plus the per-tier records it was computed from.
#[derive(Debug, Clone)]
pub struct DetectionOutcome<T> {
    pub fused: bool,
    pub per_tier: Vec<Option<TierOutcome<T>>>,
}

/// A Bernoulli estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub mean: T,
    pub std_err: T,
    pub n_trials: u64,
    pub base_seed: u64,
}

impl<T: Real> Estimate<T> {
    pub fn from_count(hits: u64, n: u64, base_seed: u64) -> Self {
        let mean = T::of(hits as f64) / T::of(n as f64);
        let std_err = (mean * (T::one() - mean) / T::of(n as f64)).sqrt();
        Estimate { mean, std_err, n_trials: n, base_seed }
    }
}

/// Cooperator pre-selection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Association {
    /// Per-tier distance-based: the closest BS of every tier.
    Ptdb,
    /// Distance-based: the K globally closest BSs regardless of tier.
    Db,
}

/// Sample one network realization with marks.
pub fn generate_realization<T: Real, R: Rng + ?Sized>(
    cfg: &NetworkConfig<T>,
    rng: &mut R,
) -> NetworkRealization<T> {
    let ch = &cfg.channel;
    let mut tiers = Vec::with_capacity(cfg.num_tiers());
    let mut marks = Vec::with_capacity(cfg.num_tiers());
    for tier in &cfg.tiers {
        let set = if tier.beta > T::zero() {
            let params = GppParams::new(tier.density, tier.beta, ch.los_radius)
                .expect("validated tier parameters");
            sample_beta_gpp(&params, rng)
        } else {
            sample_ppp(tier.density, ch.los_radius, rng)
        };
        let align_prob = {
            let frac = ch.beamwidth / (T::of(2.0) * T::PI());
            frac * frac * ch.los_prob
        };
        let tier_marks: Vec<BsMark> = set
            .points
            .iter()
            .map(|_| BsMark {
                jcas: T::unit_draw(rng) < tier.jcas_fraction,
                aligned_interferer: T::unit_draw(rng) < align_prob,
                los_to_poi: T::unit_draw(rng) < ch.los_prob,
            })
            .collect();
        tiers.push(set);
        marks.push(tier_marks);
    }
    let object_present = T::unit_draw(rng) < ch.object_prob;
    NetworkRealization { tiers, marks, object_present }
}

/// Echo SINR of the serving BS's reflected pilot for one slot. Fresh fading
/// is drawn for the echo, every interfering link, and the residual SI.
///
/// Interferer distances are measured from the typical PoI at the origin (the
/// radial abstraction every closed form here is built on).
pub fn radar_sinr<T: Real, R: Rng + ?Sized>(
    real: &NetworkRealization<T>,
    serving_tier: usize,
    serving: &Point<T>,
    cfg: &NetworkConfig<T>,
    rng: &mut R,
) -> T {
    let ch = &cfg.channel;
    let h0 = sample_fading_power(ch.nakagami_nu, rng);
    let echo = radar_echo_power(serving.radius_sq.sqrt(), cfg.tiers[serving_tier].power, h0, ch);
    let mut interference = T::zero();
    for z in 0..real.tiers.len() {
        let coef = cfg.interferer_coef(z);
        for (idx, p) in real.tiers[z].points.iter().enumerate() {
            if z == serving_tier && p.order == serving.order {
                continue;
            }
            if !real.interferes(z, idx) {
                continue;
            }
            let h = sample_fading_power(ch.nakagami_nu, rng);
            interference += coef * h * pathloss(p.radius_sq.sqrt(), ch);
        }
    }
    let si = if real.mark_of(serving_tier, serving_index(real, serving_tier, serving)).jcas {
        let p_dl = power_control(ch.serving_distance, cfg.tiers[serving_tier].power, ch);
        p_dl * sample_si_power_gain(ch, rng)
    } else {
        T::zero()
    };
    let denom = interference + si + ch.noise_var;
    if denom == T::zero() {
        if echo == T::zero() {
            T::zero()
        } else {
            T::infinity()
        }
    } else {
        echo / denom
    }
}

fn serving_index<T: Real>(real: &NetworkRealization<T>, tier: usize, p: &Point<T>) -> usize {
    real.tiers[tier]
        .points
        .iter()
        .position(|q| q.order == p.order)
        .expect("serving point belongs to its tier")
}

/// Cooperator set under the given association scheme: (tier, point) pairs.
pub fn association_baseline<T: Real>(
    real: &NetworkRealization<T>,
    mode: Association,
    cfg: &NetworkConfig<T>,
) -> Vec<(usize, Point<T>)> {
    match mode {
        Association::Ptdb => real
            .tiers
            .iter()
            .enumerate()
            .filter_map(|(k, set)| set.nearest().map(|p| (k, *p)))
            .collect(),
        Association::Db => {
            let mut all: Vec<(usize, Point<T>)> = real
                .tiers
                .iter()
                .enumerate()
                .flat_map(|(k, set)| set.points.iter().map(move |p| (k, *p)))
                .collect();
            all.sort_by(|a, b| {
                a.1.radius_sq
                    .partial_cmp(&b.1.radius_sq)
                    .unwrap()
                    .then(a.1.order.cmp(&b.1.order))
            });
            all.truncate(cfg.num_tiers());
            all
        }
    }
}

/// One CoMRD trial on a fixed realization: pre-selection, per-BS decisions at
/// the tier thresholds, distance weights, and κ-out-of-K' fusion over the
/// included set.
pub fn comrd_trial<T: Real, R: Rng + ?Sized>(
    real: &NetworkRealization<T>,
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    cfg: &NetworkConfig<T>,
    assoc: Association,
    rng: &mut R,
) -> DetectionOutcome<T> {
    let cooperators = association_baseline(real, assoc, cfg);
    let mut per_tier: Vec<Option<TierOutcome<T>>> = vec![None; cfg.num_tiers()];
    if cooperators.is_empty() {
        return DetectionOutcome { fused: false, per_tier };
    }
    let d_min = cooperators
        .iter()
        .map(|(_, p)| p.radius_sq)
        .fold(T::infinity(), |a, b| a.min(b))
        .sqrt();
    let mut votes = 0u32;
    let mut included = 0u32;
    let mut records: Vec<(usize, TierOutcome<T>)> = Vec::with_capacity(cooperators.len());
    for (tier, point) in &cooperators {
        let dist = point.radius_sq.sqrt();
        // weight: d_min/d ≥ ς (the closest cooperator always carries weight 1)
        let weight = d_min >= varsigma * dist;
        let sinr = radar_sinr(real, *tier, point, cfg, rng);
        let idx = serving_index(real, *tier, point);
        let local = real.object_present
            && real.mark_of(*tier, idx).los_to_poi
            && sinr >= thetas[*tier];
        if weight {
            included += 1;
            if local {
                votes += 1;
            }
        }
        records.push((*tier, TierOutcome { distance: dist, weight, local_decision: local, sinr }));
    }
    let kappa_eff = kappa.min(included).max(1);
    let fused = votes >= kappa_eff;
    for (tier, rec) in records {
        // DB mode can select two BSs of one tier; keep the closer record.
        if per_tier[tier].is_none() {
            per_tier[tier] = Some(rec);
        }
    }
    DetectionOutcome { fused, per_tier }
}

fn run_counts<F>(n_trials: u64, f: F) -> u64
where
    F: Fn(u64) -> bool + Sync + Send,
{
    (0..n_trials).into_par_iter().map(|t| u64::from(f(t))).sum()
}

/// Fused detection frequency over independent realizations and fading.
pub fn estimate_detection<T: Real>(
    cfg: &NetworkConfig<T>,
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    n_trials: u64,
    base_seed: u64,
) -> Result<Estimate<T>> {
    Ok(estimate_detection_rules(cfg, thetas, &[kappa], varsigma, n_trials, base_seed)?
        .pop()
        .expect("one rule requested"))
}

/// Detection frequencies for several κ values on *identical* trials (paired
/// seeds: the per-trial randomness is reused across rules).
pub fn estimate_detection_rules<T: Real>(
    cfg: &NetworkConfig<T>,
    thetas: &[T],
    kappas: &[u32],
    varsigma: T,
    n_trials: u64,
    base_seed: u64,
) -> Result<Vec<Estimate<T>>> {
    validate_thetas(cfg, thetas)?;
    let counts: Vec<u64> = (0..n_trials)
        .into_par_iter()
        .fold(
            || vec![0u64; kappas.len()],
            |mut acc, t| {
                let mut rng = trial_rng(base_seed, StreamKind::Detection, t);
                let real = generate_realization(cfg, &mut rng);
                // One fading draw set per trial: evaluate with κ = 1 and
                // recompute every fusion rule from the per-tier records.
                let outcome = comrd_trial(&real, thetas, 1, varsigma, cfg, Association::Ptdb, &mut rng);
                let votes = outcome
                    .per_tier
                    .iter()
                    .flatten()
                    .filter(|r| r.weight && r.local_decision)
                    .count() as u32;
                let included = outcome.per_tier.iter().flatten().filter(|r| r.weight).count() as u32;
                for (slot, &kappa) in kappas.iter().enumerate() {
                    if included > 0 && votes >= kappa.min(included).max(1) {
                        acc[slot] += 1;
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; kappas.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(counts
        .into_iter()
        .map(|hits| Estimate::from_count(hits, n_trials, base_seed))
        .collect())
}

/// Paired PTDB-vs-DB detection frequencies on identical trials.
pub fn estimate_detection_associations<T: Real>(
    cfg: &NetworkConfig<T>,
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    n_trials: u64,
    base_seed: u64,
) -> Result<(Estimate<T>, Estimate<T>)> {
    validate_thetas(cfg, thetas)?;
    let (ptdb, db) = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base_seed, StreamKind::Detection, t);
            let real = generate_realization(cfg, &mut rng);
            let a = comrd_trial(&real, thetas, kappa, varsigma, cfg, Association::Ptdb, &mut rng);
            let b = comrd_trial(&real, thetas, kappa, varsigma, cfg, Association::Db, &mut rng);
            (u64::from(a.fused), u64::from(b.fused))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok((
        Estimate::from_count(ptdb, n_trials, base_seed),
        Estimate::from_count(db, n_trials, base_seed),
    ))
}

/// False-alarm frequency for a tier-k BS under the CFAR construction: the
/// echo reflects off the nearest blockage (one-way unbounded path loss,
/// coefficient π P_k G² ℓ / 4) against plane-wide PPP interference at the
/// thinned densities; no noise or SI enters the SIR.
pub fn estimate_false_alarm<T: Real>(
    cfg: &NetworkConfig<T>,
    theta: T,
    tier: usize,
    n_trials: u64,
    base_seed: u64,
) -> Result<Estimate<T>> {
    if theta < T::zero() {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {theta}")));
    }
    let ch = cfg.channel;
    let a = ch.pathloss_exponent;
    let g2 = ch.mainlobe_gain * ch.mainlobe_gain;
    let echo_coef = T::PI() / T::of(4.0) * cfg.tiers[tier].power * g2 * ch.ell();
    let coefs: Vec<T> = (0..cfg.num_tiers()).map(|z| cfg.interferer_coef(z)).collect();
    let lambdas: Vec<T> = (0..cfg.num_tiers()).map(|z| cfg.thinned_density(z)).collect();
    let hits = run_counts(n_trials, |t| {
        let mut rng = trial_rng(base_seed, StreamKind::FalseAlarm, t);
        let object = T::unit_draw(&mut rng) < ch.object_prob;
        let blocked = T::unit_draw(&mut rng) >= ch.los_prob;
        if !(object && blocked) {
            return false;
        }
        // nearest blockage distance: cdf 1 − exp(−πλ_b u²)
        let u_unit: T = T::unit_draw(&mut rng);
        let u = (-(T::one() - u_unit).ln() / (T::PI() * ch.blockage_density)).sqrt();
        let h0: T = sample_fading_power(ch.nakagami_nu, &mut rng);
        let echo = echo_coef * h0 * u.powf(-a);
        if theta == T::zero() {
            return true;
        }
        // truncation radius from the interference tail bound
        // Σ_z 2πλ_z s·c_z R^{2−a}/(a−2) ≤ 3e-4 with s = θ u^a / echo_coef
        let s = theta * u.powf(a) / echo_coef;
        let mut tail_sum = T::zero();
        for z in 0..coefs.len() {
            tail_sum += T::of(2.0) * T::PI() * lambdas[z] * s * coefs[z];
        }
        let mut interference = T::zero();
        if tail_sum > T::zero() {
            let r_sim = (tail_sum / ((a - T::of(2.0)) * T::of(3e-4)))
                .powf(T::one() / (a - T::of(2.0)));
            for z in 0..coefs.len() {
                let mean = lambdas[z] * T::PI() * r_sim * r_sim;
                // far trials are deep in the no-alarm tail; cap the work
                let n_pts = T::poisson_draw(&mut rng, mean).min(2_000_000);
                for _ in 0..n_pts {
                    let r = r_sim * T::unit_draw(&mut rng).sqrt();
                    let h: T = sample_fading_power(ch.nakagami_nu, &mut rng);
                    interference += coefs[z] * h * r.powf(-a);
                }
            }
        }
        echo >= theta * interference
    });
    Ok(Estimate::from_count(hits, n_trials, base_seed))
}

/// How much of the realization the second slot shares with the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotCoupling {
    /// Layout and all marks frozen; only fading is redrawn (the default
    /// temporal-correlation mechanism).
    Shared,
    /// Layout, JCAS and LoS marks frozen; the antenna-alignment marks are
    /// redrawn per slot.
    RedrawAlignment,
    /// Fresh layout and marks per slot (independence control).
    Independent,
}

/// Two-slot detection estimates under the chosen slot coupling.
#[derive(Debug, Clone, Copy)]
pub struct TemporalEstimate<T> {
    pub joint: Estimate<T>,
    pub single: Estimate<T>,
    /// joint / single; undefined when no single-slot detection occurred.
    pub conditional: Option<T>,
    /// joint / single²; > 1 marks positive temporal correlation.
    pub rho: Option<T>,
}

pub fn estimate_joint_detection<T: Real>(
    cfg: &NetworkConfig<T>,
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    coupling: SlotCoupling,
    n_trials: u64,
    base_seed: u64,
) -> Result<TemporalEstimate<T>> {
    validate_thetas(cfg, thetas)?;
    let (joint_hits, single_hits) = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base_seed, StreamKind::Temporal, t);
            let real = generate_realization(cfg, &mut rng);
            let slot_a = comrd_trial(&real, thetas, kappa, varsigma, cfg, Association::Ptdb, &mut rng);
            let slot_b = match coupling {
                SlotCoupling::Shared => {
                    comrd_trial(&real, thetas, kappa, varsigma, cfg, Association::Ptdb, &mut rng)
                }
                SlotCoupling::RedrawAlignment => {
                    let mut second = real.clone();
                    let ch = &cfg.channel;
                    let frac = ch.beamwidth / (T::of(2.0) * T::PI());
                    let align_prob = frac * frac * ch.los_prob;
                    for tier_marks in &mut second.marks {
                        for mark in tier_marks {
                            mark.aligned_interferer = T::unit_draw(&mut rng) < align_prob;
                        }
                    }
                    comrd_trial(&second, thetas, kappa, varsigma, cfg, Association::Ptdb, &mut rng)
                }
                SlotCoupling::Independent => {
                    let fresh = generate_realization(cfg, &mut rng);
                    comrd_trial(&fresh, thetas, kappa, varsigma, cfg, Association::Ptdb, &mut rng)
                }
            };
            (u64::from(slot_a.fused && slot_b.fused), u64::from(slot_a.fused))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let joint = Estimate::from_count(joint_hits, n_trials, base_seed);
    let single = Estimate::from_count(single_hits, n_trials, base_seed);
    let (conditional, rho) = if single_hits > 0 {
        (
            Some(joint.mean / single.mean),
            Some(joint.mean / (single.mean * single.mean)),
        )
    } else {
        (None, None)
    };
    Ok(TemporalEstimate { joint, single, conditional, rho })
}

/// Downlink coverage frequency for a tier-k user at distance d: the user
/// sits at the origin, same-tier interferers closer than squared distance d
/// are excluded, and success requires a LoS serving link and SINR ≥ η.
pub fn estimate_dl_coverage<T: Real>(
    cfg: &NetworkConfig<T>,
    eta: T,
    d: T,
    tier: usize,
    n_trials: u64,
    base_seed: u64,
) -> Result<Estimate<T>> {
    let ch = cfg.channel;
    if d > ch.los_radius {
        return Err(Error::InvalidParameter(format!(
            "serving distance {d} exceeds the LoS radius {}",
            ch.los_radius
        )));
    }
    let g2 = ch.mainlobe_gain * ch.mainlobe_gain;
    let p_serv = power_control(d, cfg.tiers[tier].power, &ch);
    let direct_coef = p_serv * g2 * pathloss(d, &ch);
    let hits = run_counts(n_trials, |t| {
        let mut rng = trial_rng(base_seed, StreamKind::Coverage, t);
        let real = generate_realization(cfg, &mut rng);
        let user_los = T::unit_draw(&mut rng) < ch.los_prob;
        if !user_los {
            return false;
        }
        let g0: T = sample_fading_power(ch.nakagami_nu, &mut rng);
        let mut interference = T::zero();
        for z in 0..real.tiers.len() {
            let coef = cfg.interferer_coef(z);
            for (idx, p) in real.tiers[z].points.iter().enumerate() {
                if z == tier && p.radius_sq <= d {
                    continue; // same-tier exclusion: squared distance above d
                }
                if !real.interferes(z, idx) {
                    continue;
                }
                let h = sample_fading_power(ch.nakagami_nu, &mut rng);
                interference += coef * h * pathloss(p.radius_sq.sqrt(), &ch);
            }
        }
        let sinr = direct_coef * g0 / (interference + ch.noise_var);
        sinr >= eta
    });
    Ok(Estimate::from_count(hits, n_trials, base_seed))
}

fn validate_thetas<T: Real>(cfg: &NetworkConfig<T>, thetas: &[T]) -> Result<()> {
    if thetas.len() != cfg.num_tiers() {
        return Err(Error::InvalidParameter(format!(
            "expected {} thresholds, got {}",
            cfg.num_tiers(),
            thetas.len()
        )));
    }
    if thetas.iter().any(|t| *t < T::zero()) {
        return Err(Error::InvalidParameter("thresholds must be >= 0".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Monte Carlo oracles for the analytic engine (exported for the test suites).
// ---------------------------------------------------------------------------

/// E[e^{−sI}] over marked realizations (mean, standard error).
pub fn mc_laplace_interference<T: Real>(
    cfg: &NetworkConfig<T>,
    s: T,
    n_trials: u64,
    base_seed: u64,
) -> (T, T) {
    let sums = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base_seed, StreamKind::LaplaceOracle, t);
            let real = generate_realization(cfg, &mut rng);
            let i_tot = total_interference(&real, cfg, &mut rng);
            let v = (-s * i_tot).exp().to_f64_lossy();
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    moments_to_estimate(sums, n_trials)
}

/// E[e^{−s(I(τ)+I(τ̂))}] with the layout shared (or redrawn) across slots.
pub fn mc_joint_laplace_interference<T: Real>(
    cfg: &NetworkConfig<T>,
    s: T,
    shared_layout: bool,
    n_trials: u64,
    base_seed: u64,
) -> (T, T) {
    let sums = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base_seed, StreamKind::LaplaceOracle, t);
            let real = generate_realization(cfg, &mut rng);
            let i_a = total_interference(&real, cfg, &mut rng);
            let i_b = if shared_layout {
                total_interference(&real, cfg, &mut rng)
            } else {
                let fresh = generate_realization(cfg, &mut rng);
                total_interference(&fresh, cfg, &mut rng)
            };
            let v = ((-s * i_a).exp() * (-s * i_b).exp()).to_f64_lossy();
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    moments_to_estimate(sums, n_trials)
}

/// E[e^{−sI}] sampling the thinned interferer process radially — the process
/// the transform models: per tier a β-GPP (or PPP) of the thinned density.
pub fn mc_laplace_interference_radial<T: Real>(
    cfg: &NetworkConfig<T>,
    s: T,
    n_trials: u64,
    base_seed: u64,
) -> (T, T) {
    let ch = cfg.channel;
    let sums = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base_seed, StreamKind::LaplaceOracle, t);
            let mut acc = T::zero();
            for z in 0..cfg.num_tiers() {
                let lambda_t = cfg.thinned_density(z);
                if lambda_t == T::zero() {
                    continue;
                }
                let coef = cfg.interferer_coef(z);
                let set = if cfg.tiers[z].beta > T::zero() {
                    let params = GppParams::new(lambda_t, cfg.tiers[z].beta, ch.los_radius)
                        .expect("validated");
                    sample_beta_gpp(&params, &mut rng)
                } else {
                    sample_ppp(lambda_t, ch.los_radius, &mut rng)
                };
                for p in &set.points {
                    let h = sample_fading_power(ch.nakagami_nu, &mut rng);
                    acc += coef * h * pathloss(p.radius_sq.sqrt(), &ch);
                }
            }
            let v = (-s * acc).exp().to_f64_lossy();
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    moments_to_estimate(sums, n_trials)
}

/// Mean aggregate interference (mean, standard error of the mean).
pub fn mc_mean_interference<T: Real>(
    cfg: &NetworkConfig<T>,
    n_trials: u64,
    base_seed: u64,
) -> (T, T) {
    let sums = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(base_seed, StreamKind::LaplaceOracle, t);
            let real = generate_realization(cfg, &mut rng);
            let v = total_interference(&real, cfg, &mut rng).to_f64_lossy();
            (v, v * v)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    moments_to_estimate(sums, n_trials)
}

fn total_interference<T: Real, R: Rng + ?Sized>(
    real: &NetworkRealization<T>,
    cfg: &NetworkConfig<T>,
    rng: &mut R,
) -> T {
    let ch = &cfg.channel;
    let mut acc = T::zero();
    for z in 0..real.tiers.len() {
        let coef = cfg.interferer_coef(z);
        for (idx, p) in real.tiers[z].points.iter().enumerate() {
            if !real.interferes(z, idx) {
                continue;
            }
            let h = sample_fading_power(ch.nakagami_nu, rng);
            acc += coef * h * pathloss(p.radius_sq.sqrt(), ch);
        }
    }
    acc
}

fn moments_to_estimate<T: Real>(sums: (f64, f64), n: u64) -> (T, T) {
    let mean = sums.0 / n as f64;
    let var = (sums.1 / n as f64 - mean * mean).max(0.0);
    (T::of(mean), T::of((var / n as f64).sqrt()))
}

/// Oracle for the conditional detection bound: the serving BS is pinned at
/// squared distance `u_sq`; interferers are drawn from the thinned repulsive
/// process of each tier exactly as the bound models them, and the trial
/// counts retention (β_k), object presence (ζ), serving-link LoS (p_L), the
/// serving BS's own JCAS state and the SINR threshold.
pub fn mc_conditional_detection<T: Real>(
    cfg: &NetworkConfig<T>,
    theta: T,
    u_sq: T,
    tier: usize,
    n_trials: u64,
    base_seed: u64,
) -> Estimate<T> {
    let ch = cfg.channel;
    let hits = run_counts(n_trials, |t| {
        let mut rng = trial_rng(base_seed, StreamKind::ConditionalOracle, t);
        let beta = cfg.tiers[tier].beta;
        let retained = beta == T::zero() || T::unit_draw(&mut rng) < beta;
        let object = T::unit_draw(&mut rng) < ch.object_prob;
        let los = T::unit_draw(&mut rng) < ch.los_prob;
        if !(retained && object && los) {
            return false;
        }
        let mut interference = T::zero();
        for z in 0..cfg.num_tiers() {
            let lambda_t = cfg.thinned_density(z);
            if lambda_t == T::zero() {
                continue;
            }
            let coef = cfg.interferer_coef(z);
            let set = if cfg.tiers[z].beta > T::zero() {
                let params = GppParams::new(lambda_t, cfg.tiers[z].beta, ch.los_radius)
                    .expect("validated");
                sample_beta_gpp(&params, &mut rng)
            } else {
                sample_ppp(lambda_t, ch.los_radius, &mut rng)
            };
            for p in &set.points {
                let h = sample_fading_power(ch.nakagami_nu, &mut rng);
                interference += coef * h * pathloss(p.radius_sq.sqrt(), &ch);
            }
        }
        let jcas = T::unit_draw(&mut rng) < cfg.tiers[tier].jcas_fraction;
        let si = if jcas {
            power_control(ch.serving_distance, cfg.tiers[tier].power, &ch)
                * sample_si_power_gain(&ch, &mut rng)
        } else {
            T::zero()
        };
        let h0 = sample_fading_power(ch.nakagami_nu, &mut rng);
        let echo = radar_echo_power(u_sq.sqrt(), cfg.tiers[tier].power, h0, &ch);
        echo >= theta * (interference + si + ch.noise_var)
    });
    Estimate::from_count(hits, n_trials, base_seed)
}
