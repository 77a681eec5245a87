//! Cooperative detection bounds: the per-tier conditional detection
//! probability (Alzer expansion over the interference and SI transforms) and
//! the fused κ-out-of-K bound, un-conditioned over the per-tier
//! nearest-retained distance law.

use crate::config::{EvalOptions, NetworkConfig};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::point_process::{GppParams, NearestRetainedLaw};
use crate::quad::gauss_legendre;
use crate::special::{binomial, ln_gamma};

use super::laplace::{interference_product, DampKind};
use super::{laplace_si, AnalyticResult};

/// Single-slot or two-slot evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotMode {
    Single,
    Joint,
}

/// Alzer constant ϖ = ν (ν!)^{−1/ν}; ϖ = 1 at ν = 1 where the bound is exact.
pub fn varpi<T: Real>(nu: u32) -> T {
    let nu_t = T::of(nu as f64);
    nu_t * (-ln_gamma(nu_t + T::one()) / nu_t).exp()
}

/// P(Σ Bernoulli(p_i) ≥ κ) for independent, non-identical trials.
pub fn poisson_binomial_tail<T: Real>(probs: &[T], kappa: usize) -> T {
    if kappa == 0 {
        return T::one();
    }
    if kappa > probs.len() {
        return T::zero();
    }
    let mut dp = vec![T::zero(); probs.len() + 1];
    dp[0] = T::one();
    for (i, &p) in probs.iter().enumerate() {
        for j in (0..=i).rev() {
            dp[j + 1] = dp[j + 1] + dp[j] * p;
            dp[j] *= T::one() - p;
        }
    }
    dp[kappa..].iter().fold(T::zero(), |acc, &v| acc + v)
}

/// Transform argument of the echo ccdf inversion:
/// s = 4πθ (ε + u^{a/2})² / (P_k G² A ℓ), with u the squared distance.
fn transform_arg<T: Real>(theta: T, u_sq: T, tier: usize, cfg: &NetworkConfig<T>) -> T {
    let ch = &cfg.channel;
    let g2 = ch.mainlobe_gain * ch.mainlobe_gain;
    let denom = cfg.tiers[tier].power * g2 * ch.rcs * ch.ell();
    let bracket = ch.pathloss_offset + u_sq.powf(ch.pathloss_exponent * T::of(0.5));
    T::of(4.0) * T::PI() * theta * bracket * bracket / denom
}

/// Numerical metadata accumulated while tabulating kernels.
#[derive(Debug, Clone, Copy)]
struct KernelMeta<T> {
    quad_err: T,
    truncation: u32,
    residual: T,
}

impl<T: Real> Default for KernelMeta<T> {
    fn default() -> Self {
        Self { quad_err: T::zero(), truncation: 0, residual: T::zero() }
    }
}

impl<T: Real> KernelMeta<T> {
    fn absorb(&mut self, quad_err: T, truncation: u32, residual: T) {
        if quad_err > self.quad_err {
            self.quad_err = quad_err;
        }
        self.truncation = self.truncation.max(truncation);
        if residual > self.residual {
            self.residual = residual;
        }
    }
}

/// Alzer kernels at one conditioning distance: entry j−1 is the kernel with
/// the serving order j excluded from the same-tier product; `no_exclusion`
/// is the kernel with the full product.
struct KernelSet<T> {
    per_order: Vec<T>,
    no_exclusion: T,
}

#[allow(clippy::too_many_arguments)]
fn alzer_kernels<T: Real>(
    theta: T,
    u_sq: T,
    tier: usize,
    orders: u32,
    cfg: &NetworkConfig<T>,
    slot: SlotMode,
    opts: &EvalOptions,
    meta: &mut KernelMeta<T>,
) -> Result<KernelSet<T>> {
    let ch = &cfg.channel;
    let nu = ch.nakagami_nu;
    let w = varpi::<T>(nu);
    let s_base = transform_arg(theta, u_sq, tier, cfg);
    let (kind, slot_mult) = match slot {
        SlotMode::Single => (DampKind::Single, T::one()),
        SlotMode::Joint => (
            if opts.compat_eq24 { DampKind::JointCompat } else { DampKind::Joint },
            T::of(2.0),
        ),
    };
    let chi = cfg.tiers[tier].jcas_fraction;
    let mut per_order = vec![T::zero(); orders as usize];
    let mut no_exclusion = T::zero();
    for xi in 1..=nu {
        let s = s_base * T::of(xi as f64) * w;
        let prod = interference_product(cfg, s, kind, None)?;
        meta.absorb(prod.quad_err, prod.truncation_index, prod.residual_bound);
        let sign = if xi % 2 == 1 { T::one() } else { -T::one() };
        let lsi = laplace_si(s, ch.serving_distance, tier, cfg);
        let lsi_slot = if slot == SlotMode::Joint { lsi * lsi } else { lsi };
        let si_factor = chi * lsi_slot + (T::one() - chi);
        let noise = (-slot_mult * s * ch.noise_var).exp();
        let coef = sign * binomial::<T>(nu, xi) * noise * si_factor;
        no_exclusion += coef * prod.value();
        for j in 1..=orders {
            per_order[j as usize - 1] += coef * prod.value_excluding(Some((tier, j)));
        }
    }
    Ok(KernelSet { per_order, no_exclusion })
}

/// Conditional detection probability of the tier-k cooperative BS at squared
/// distance `u_sq`: retention × [ζ p_L] × Alzer sum over the transforms.
///
/// The retention factor is β_k for a repulsive tier and 1 for a PPP tier
/// (where the corresponding bound carries no retention variable). No
/// same-tier order is excluded here: the standalone conditional treats the
/// serving BS as an extra point at the conditioning distance.
pub fn cond_detection_prob<T: Real>(
    theta: T,
    u_sq: T,
    tier: usize,
    cfg: &NetworkConfig<T>,
    with_presence_factor: bool,
) -> Result<AnalyticResult<T>> {
    if theta < T::zero() || u_sq < T::zero() {
        return Err(Error::InvalidParameter(
            "threshold and squared distance must be >= 0".into(),
        ));
    }
    let opts = EvalOptions { presence_factor: with_presence_factor, ..Default::default() };
    let mut meta = KernelMeta::default();
    let kernels =
        alzer_kernels(theta, u_sq, tier, 0, cfg, SlotMode::Single, &opts, &mut meta)?;
    let beta = cfg.tiers[tier].beta;
    let retention = if beta > T::zero() { beta } else { T::one() };
    let presence = if with_presence_factor {
        cfg.channel.object_prob * cfg.channel.los_prob
    } else {
        T::one()
    };
    let value = (retention * presence * kernels.no_exclusion).max(T::zero()).min(T::one());
    Ok(AnalyticResult {
        value,
        quadrature_abs_err: meta.quad_err,
        product_truncation_index: meta.truncation,
        residual_bound: meta.residual,
    })
}

/// Per-tier tabulation on the quadrature grid: node mass and the detection
/// probability conditioned on the nearest BS sitting at that node.
struct TierTable<T> {
    /// (squared distance, probability mass, conditional success probability)
    nodes: Vec<(T, T, T)>,
    present_mass: T,
}

fn tabulate_tier<T: Real>(
    tier: usize,
    theta: T,
    cfg: &NetworkConfig<T>,
    slot: SlotMode,
    opts: &EvalOptions,
    n_nodes: usize,
    meta: &mut KernelMeta<T>,
) -> Result<TierTable<T>> {
    let ch = &cfg.channel;
    let r_sq = ch.los_radius_sq();
    let grid = gauss_legendre::<T>(n_nodes, T::zero(), r_sq);
    let beta = cfg.tiers[tier].beta;
    let p_l = if opts.presence_factor { ch.los_prob } else { T::one() };
    let mut nodes = Vec::with_capacity(grid.len());
    let mut present_mass = T::zero();
    if beta > T::zero() {
        let params = GppParams::new(cfg.tiers[tier].density, beta, ch.los_radius)?;
        let law = NearestRetainedLaw::new(&params)?;
        if law.residual_bound > meta.residual {
            meta.residual = law.residual_bound;
        }
        for &(x, gl_w) in &grid {
            let comps = law.components(x);
            let f_min: T = comps.iter().fold(T::zero(), |acc, &c| acc + c);
            let mass = gl_w * f_min;
            let q = if f_min > T::zero() {
                let kernels =
                    alzer_kernels(theta, x, tier, law.orders(), cfg, slot, opts, meta)?;
                let g: T = comps
                    .iter()
                    .zip(&kernels.per_order)
                    .fold(T::zero(), |acc, (&c, &k)| acc + c * k);
                (p_l * g / f_min).max(T::zero()).min(T::one())
            } else {
                T::zero()
            };
            present_mass += mass;
            nodes.push((x, mass, q));
        }
    } else {
        // PPP tier: nearest squared distance is Exp(πλ).
        let lam = cfg.tiers[tier].density;
        let rate = T::PI() * lam;
        for &(x, gl_w) in &grid {
            let f = rate * (-rate * x).exp();
            let mass = gl_w * f;
            let kernels = alzer_kernels(theta, x, tier, 0, cfg, slot, opts, meta)?;
            let q = (p_l * kernels.no_exclusion).max(T::zero()).min(T::one());
            present_mass += mass;
            nodes.push((x, mass, q));
        }
    }
    Ok(TierTable { nodes, present_mass })
}

/// Fuse tabulated tiers: sum over presence patterns, joint quadrature over
/// the per-tier nearest distances, ς-weight selection on each distance
/// configuration, exact Poisson-binomial tail over the included set with
/// κ' = min(κ, #included).
fn fuse_tables<T: Real>(tables: &[TierTable<T>], kappa: u32, varsigma: T) -> T {
    let k = tables.len();
    let mut total = T::zero();
    for mask in 1u32..(1 << k) {
        let present: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let mut absent_prob = T::one();
        for (i, table) in tables.iter().enumerate() {
            if mask >> i & 1 == 0 {
                absent_prob *= T::one() - table.present_mass;
            }
        }
        if absent_prob == T::zero() {
            continue;
        }
        if varsigma == T::zero() {
            // Equal weights: expectation factorizes into per-tier means.
            let probs: Vec<T> = present
                .iter()
                .map(|&i| {
                    let t = &tables[i];
                    let num: T =
                        t.nodes.iter().fold(T::zero(), |acc, &(_, m, q)| acc + m * q);
                    num / t.present_mass
                })
                .collect();
            let kappa_eff = (kappa as usize).min(probs.len());
            total += absent_prob
                * tables
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .fold(T::one(), |acc, (_, t)| acc * t.present_mass)
                * poisson_binomial_tail(&probs, kappa_eff);
            continue;
        }
        // Joint quadrature over the present tiers' distances.
        let dims: Vec<&TierTable<T>> = present.iter().map(|&i| &tables[i]).collect();
        let mut idx = vec![0usize; dims.len()];
        let vs2 = varsigma * varsigma;
        'outer: loop {
            let mut mass = absent_prob;
            let mut x_min = T::infinity();
            for (d, table) in dims.iter().enumerate() {
                let (x, m, _) = table.nodes[idx[d]];
                mass *= m;
                if x < x_min {
                    x_min = x;
                }
            }
            if mass > T::zero() {
                // w_d = 1 iff d_min/d_d ≥ ς, i.e. x_min ≥ ς²·x_d.
                let mut probs: Vec<T> = Vec::with_capacity(dims.len());
                for (d, table) in dims.iter().enumerate() {
                    let (x, _, q) = table.nodes[idx[d]];
                    if x_min >= vs2 * x {
                        probs.push(q);
                    }
                }
                let kappa_eff = (kappa as usize).min(probs.len());
                total += mass * poisson_binomial_tail(&probs, kappa_eff);
            }
            // mixed-radix increment
            for d in 0..dims.len() {
                idx[d] += 1;
                if idx[d] < dims[d].nodes.len() {
                    continue 'outer;
                }
                idx[d] = 0;
            }
            break;
        }
    }
    total
}

/// Literal per-order un-conditioning (comparison mode): the per-tier value is
/// Σ_j ∫ retention·ζp_L·kernel_j(u)·f_{B_j}(u) du, which may exceed 1; the
/// fused output is reported raw and ς is ignored.
fn comrd_literal<T: Real>(
    thetas: &[T],
    kappa: u32,
    cfg: &NetworkConfig<T>,
    slot: SlotMode,
    opts: &EvalOptions,
    n_nodes: usize,
    meta: &mut KernelMeta<T>,
) -> Result<T> {
    use crate::point_process::{gamma_radial_pdf, order_truncation};
    let ch = &cfg.channel;
    let r_sq = ch.los_radius_sq();
    let grid = gauss_legendre::<T>(n_nodes, T::zero(), r_sq);
    let presence = if opts.presence_factor {
        ch.object_prob * ch.los_prob
    } else {
        T::one()
    };
    let mut per_tier = Vec::with_capacity(cfg.num_tiers());
    for (k, tier) in cfg.tiers.iter().enumerate() {
        let beta = tier.beta;
        let mut p_k = T::zero();
        if beta > T::zero() {
            let t_full = T::PI() * tier.density;
            let orders = order_truncation(tier.density, beta, r_sq);
            for &(x, gl_w) in &grid {
                let kernels = alzer_kernels(thetas[k], x, k, orders, cfg, slot, opts, meta)?;
                for j in 1..=orders {
                    let f = gamma_radial_pdf(x, j, beta, t_full)?;
                    p_k += gl_w * beta * presence * kernels.per_order[j as usize - 1] * f;
                }
            }
        } else {
            // literal PPP variant: presence factors folded into the distance law
            let rate = T::PI() * tier.density * presence;
            for &(x, gl_w) in &grid {
                let kernels = alzer_kernels(thetas[k], x, k, 0, cfg, slot, opts, meta)?;
                p_k += gl_w * kernels.no_exclusion * rate * (-rate * x).exp();
            }
        }
        per_tier.push(p_k);
    }
    Ok(poisson_binomial_tail(&per_tier, kappa as usize))
}

const NODES_FINE: usize = 48;
const NODES_COARSE: usize = 24;

/// Fused CoMRD detection bound: per-tier conditional kernels un-conditioned
/// over the nearest-retained distance law (serving order marginalized
/// jointly), ς-weighted, fused by the exact κ-out-of-K' tail, and scaled by
/// the shared object-presence probability.
pub fn comrd_detection_prob<T: Real>(
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    cfg: &NetworkConfig<T>,
    slot: SlotMode,
    opts: &EvalOptions,
) -> Result<AnalyticResult<T>> {
    let k = cfg.num_tiers();
    if thetas.len() != k {
        return Err(Error::InvalidParameter(format!(
            "expected {k} thresholds, got {}",
            thetas.len()
        )));
    }
    if !(kappa >= 1 && kappa as usize <= k) {
        return Err(Error::InvalidParameter(format!("kappa must lie in [1, {k}], got {kappa}")));
    }
    let mut meta = KernelMeta::default();
    if opts.compat_eq20 {
        let value = comrd_literal(thetas, kappa, cfg, slot, opts, NODES_FINE, &mut meta)?;
        let coarse = comrd_literal(thetas, kappa, cfg, slot, opts, NODES_COARSE, &mut meta)?;
        return Ok(AnalyticResult {
            value,
            quadrature_abs_err: (value - coarse).abs() + meta.quad_err,
            product_truncation_index: meta.truncation,
            residual_bound: meta.residual,
        });
    }
    let zeta = if opts.presence_factor { cfg.channel.object_prob } else { T::one() };
    let eval = |nodes: usize, meta: &mut KernelMeta<T>| -> Result<T> {
        let mut tables = Vec::with_capacity(k);
        for (i, &theta) in thetas.iter().enumerate() {
            tables.push(tabulate_tier(i, theta, cfg, slot, opts, nodes, meta)?);
        }
        Ok(zeta * fuse_tables(&tables, kappa, varsigma))
    };
    let fine = eval(NODES_FINE, &mut meta)?;
    let coarse = eval(NODES_COARSE, &mut meta)?;
    let value = fine.max(T::zero()).min(T::one());
    Ok(AnalyticResult {
        value,
        quadrature_abs_err: (fine - coarse).abs() + meta.quad_err,
        product_truncation_index: meta.truncation,
        residual_bound: meta.residual,
    })
}

/// PPP-limit variant: every tier forced to β = 0 (PPP nearest-distance law
/// and the exact PPP interference transform).
pub fn comrd_detection_prob_ppp<T: Real>(
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    cfg: &NetworkConfig<T>,
    slot: SlotMode,
    opts: &EvalOptions,
) -> Result<AnalyticResult<T>> {
    comrd_detection_prob(thetas, kappa, varsigma, &cfg.as_ppp(), slot, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::test_cfg::{single_tier_cfg, three_tier_cfg};

    #[test]
    fn varpi_values() {
        assert!((varpi::<f64>(1) - 1.0).abs() < 1e-14);
        assert!((varpi::<f64>(2) - 2.0 / 2.0f64.sqrt()).abs() < 1e-12);
        assert!((varpi::<f64>(3) - 3.0 / 6.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn poisson_binomial_against_enumeration() {
        let probs = [0.2f64, 0.55, 0.9, 0.35];
        for kappa in 0..=5 {
            let mut want = 0.0;
            for mask in 0u32..16 {
                let cnt = mask.count_ones() as usize;
                if cnt < kappa {
                    continue;
                }
                let mut p = 1.0;
                for (i, &pi) in probs.iter().enumerate() {
                    p *= if mask >> i & 1 == 1 { pi } else { 1.0 - pi };
                }
                want += p;
            }
            let got = poisson_binomial_tail(&probs, kappa);
            assert!((got - want).abs() < 1e-14, "kappa={kappa}");
        }
    }

    #[test]
    fn conditional_vanishes_at_huge_threshold() {
        let cfg = three_tier_cfg();
        let v = cond_detection_prob(1e9, 1.0e4, 0, &cfg, true).unwrap().value;
        assert!(v < 1e-12, "{v}");
    }

    #[test]
    fn conditional_si_factor_collapses_without_jcas() {
        // χ = 0: the SI transform must drop out of the kernel entirely, so
        // making SI arbitrarily bad cannot change the value.
        let mut cfg = three_tier_cfg();
        for tier in &mut cfg.tiers {
            tier.jcas_fraction = 0.0;
        }
        let base = cond_detection_prob(1e-16, 1.0e4, 0, &cfg, true).unwrap().value;
        cfg.channel.si_var = 1e6;
        let noisy = cond_detection_prob(1e-16, 1.0e4, 0, &cfg, true).unwrap().value;
        assert!((base - noisy).abs() < 1e-15);
    }

    #[test]
    fn conditional_at_zero_threshold_is_presence_times_retention() {
        let cfg = three_tier_cfg();
        let v = cond_detection_prob(0.0, 1.0e4, 1, &cfg, true).unwrap().value;
        // β ζ p_L = 0.9 · 1 · 0.7
        assert!((v - 0.63).abs() < 1e-10, "{v}");
        let v = cond_detection_prob(0.0, 1.0e4, 1, &cfg, false).unwrap().value;
        assert!((v - 0.9).abs() < 1e-10, "{v}");
    }

    #[test]
    fn fused_value_nonincreasing_in_kappa() {
        let cfg = three_tier_cfg();
        let thetas = [1e-19f64; 3];
        let mut prev = 1.0;
        for kappa in 1..=3 {
            let v = comrd_detection_prob(
                &thetas,
                kappa,
                0.0,
                &cfg,
                SlotMode::Single,
                &EvalOptions::default(),
            )
            .unwrap()
            .value;
            assert!(v <= prev + 1e-12, "kappa={kappa}: {v} > {prev}");
            prev = v;
        }
    }

    #[test]
    fn or_rule_matches_independent_two_tier_quadrature_oracle() {
        // Independent oracle: midpoint quadrature of
        //   E[1 − Π (1 − q_k(u_k))]
        // with q_k from the public conditional API and the nearest law pdf.
        // χ = 0 keeps interferers (and hence the serving-order exclusion)
        // out so the oracle checks the fusion∘quadrature composition alone.
        let mut cfg = three_tier_cfg();
        cfg.tiers.truncate(2);
        for tier in &mut cfg.tiers {
            tier.jcas_fraction = 0.0;
        }
        cfg.fusion.kappa = 1;
        let thetas = [3e-20f64, 3e-20];
        let got = comrd_detection_prob(
            &thetas,
            1,
            0.0,
            &cfg,
            SlotMode::Single,
            &EvalOptions::default(),
        )
        .unwrap()
        .value;

        let r_sq = cfg.channel.los_radius_sq();
        let n = 4000;
        let h = r_sq / n as f64;
        let mut p_tier = [0.0f64; 2];
        let mut present = [0.0f64; 2];
        for k in 0..2 {
            let params =
                GppParams::new(cfg.tiers[k].density, cfg.tiers[k].beta, cfg.channel.los_radius)
                    .unwrap();
            let law = NearestRetainedLaw::new(&params).unwrap();
            let mut num = 0.0;
            let mut mass = 0.0;
            for i in 0..n {
                let x = (i as f64 + 0.5) * h;
                let f = law.pdf(x);
                // strip the retention factor: the conditional given "nearest
                // retained at x" has no per-point existence probability
                let q = cond_detection_prob(thetas[k], x, k, &cfg, true).unwrap().value
                    / cfg.tiers[k].beta;
                num += q * f * h;
                mass += f * h;
            }
            p_tier[k] = num;
            present[k] = mass;
        }
        // OR over independent tiers, absent tiers contribute nothing:
        // 1 − Π_k (1 − p_k,unconditional)
        let want = 1.0 - (1.0 - p_tier[0]) * (1.0 - p_tier[1]);
        assert!(
            (got - want).abs() < 1e-4,
            "fused {got} vs oracle {want} (present masses {present:?})"
        );
    }

    #[test]
    fn varsigma_one_keeps_only_the_closest_tier() {
        // With ς = 1 the included set is the single closest BS, so the OR
        // rule must coincide with the non-cooperative baseline.
        let cfg = three_tier_cfg();
        let thetas = [1e-19f64; 3];
        let coop = comrd_detection_prob(
            &thetas,
            1,
            0.0,
            &cfg,
            SlotMode::Single,
            &EvalOptions::default(),
        )
        .unwrap()
        .value;
        let single = comrd_detection_prob(
            &thetas,
            1,
            1.0,
            &cfg,
            SlotMode::Single,
            &EvalOptions::default(),
        )
        .unwrap()
        .value;
        assert!(single < coop, "baseline {single} must trail cooperation {coop}");
        assert!(single > 0.0);
    }

    #[test]
    fn tensor_path_agrees_with_factorized_path_at_tiny_varsigma() {
        // ς = 1e-9 includes every tier at every distance configuration, which
        // is exactly the ς = 0 semantics computed by the factorized path.
        let cfg = three_tier_cfg();
        let thetas = [1e-19f64; 3];
        for kappa in [1u32, 2] {
            let a = comrd_detection_prob(
                &thetas,
                kappa,
                0.0,
                &cfg,
                SlotMode::Single,
                &EvalOptions::default(),
            )
            .unwrap()
            .value;
            let b = comrd_detection_prob(
                &thetas,
                kappa,
                1e-9,
                &cfg,
                SlotMode::Single,
                &EvalOptions::default(),
            )
            .unwrap()
            .value;
            assert!((a - b).abs() < 1e-10, "kappa={kappa}: {a} vs {b}");
        }
    }

    #[test]
    fn ppp_variant_tracks_small_beta_limit() {
        // The nearest-retained law converges to the PPP law at first order:
        // its ccdf is exp(−t·x·(−ln(1−β))/β) ≈ exp(−t·x·(1+β/2)), so the
        // detection gap shrinks like β/2. β = 0.05 lands near 5e-3 here;
        // the 2e-3 contract is checked at β = 0.01.
        let eval = |beta: f64| {
            let mut cfg = single_tier_cfg(4.0, beta, 0.8, std::f64::consts::PI / 6.0, 0.7);
            cfg.channel.nakagami_nu = 1;
            let kind = if beta > 0.0 { comrd_detection_prob } else { comrd_detection_prob_ppp };
            kind(&[3e-20f64], 1, 0.0, &cfg, SlotMode::Single, &EvalOptions::default())
                .unwrap()
                .value
        };
        let ppp = eval(0.0);
        let near = eval(0.05);
        assert!((near - ppp).abs() < 1e-2, "beta=0.05: {near} vs {ppp}");
        let nearer = eval(0.01);
        assert!((nearer - ppp).abs() < 2e-3, "beta=0.01: {nearer} vs {ppp}");
        assert!((nearer - ppp).abs() < (near - ppp).abs(), "convergence must improve");
    }

    #[test]
    fn ppp_single_tier_reduces_to_unconditioned_conditional() {
        // κ = K = 1 on a PPP tier: the fused bound is the conditional kernel
        // integrated against the PPP nearest-distance law times ζ.
        let mut cfg = single_tier_cfg(4.0, 0.0, 0.8, std::f64::consts::PI / 6.0, 0.7);
        cfg.channel.nakagami_nu = 1;
        let theta = 3e-20f64;
        let fused = comrd_detection_prob(
            &[theta],
            1,
            0.0,
            &cfg,
            SlotMode::Single,
            &EvalOptions::default(),
        )
        .unwrap()
        .value;
        let lam = cfg.tiers[0].density;
        let rate = std::f64::consts::PI * lam;
        let r_sq = cfg.channel.los_radius_sq();
        let n = 4000;
        let h = r_sq / n as f64;
        let mut want = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let q = cond_detection_prob(theta, x, 0, &cfg, true).unwrap().value;
            want += q * rate * (-rate * x).exp() * h;
        }
        assert!((fused - want).abs() < 1e-4, "{fused} vs {want}");
    }

    #[test]
    fn literal_variant_exceeds_the_corrected_one() {
        // The literal sum over orders double-counts far serving points, so it
        // must dominate the nearest-retained un-conditioning.
        let cfg = three_tier_cfg();
        let thetas = [1e-19f64; 3];
        let fixed = comrd_detection_prob(
            &thetas,
            1,
            0.0,
            &cfg,
            SlotMode::Single,
            &EvalOptions::default(),
        )
        .unwrap()
        .value;
        let literal = comrd_detection_prob(
            &thetas,
            1,
            0.0,
            &cfg,
            SlotMode::Single,
            &EvalOptions { compat_eq20: true, ..Default::default() },
        )
        .unwrap()
        .value;
        assert!(literal > fixed, "literal {literal} vs corrected {fixed}");
    }
}
