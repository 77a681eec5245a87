//! Laplace transforms of the aggregate interference and the residual
//! self-interference.
//!
//! The aggregate transform is an infinite product over tiers and Gamma
//! orders of the thinned interferer process. Every per-order factor is
//!
//!   1 − ∫_{lo}^{R²} f_{C_i}(y) · w(q(y)) dy,   q(y) = 1 / (1 + s·c_z / (ε + y^{a/2})),
//!
//! where the deficit w depends on the slot structure: β(1−q) for one slot,
//! β(1−q²) for the two-slot form (shared locations, independent fading), and
//! 2β(1−q) − β²(1−q)² for the two-slot compatibility variant. Orders
//! whose radial mass lies beyond the LoS window contribute unit factors, so
//! the product converges and is truncated at an explicit residual bound.

use crate::channel::power_control;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::point_process::{gamma_radial_cdf, gamma_radial_pdf};
use crate::quad::adaptive_quad;
use crate::special::hyp2f1_1b;

use super::AnalyticResult;

/// Which per-point damping the product uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampKind {
    /// Single-slot transform.
    Single,
    /// Two-slot transform: per-point second moment of q.
    Joint,
    /// Two-slot compatibility variant: square of the per-point factor.
    JointCompat,
}

/// Tolerance of each per-factor integral.
const FACTOR_TOL: f64 = 1e-10;
/// A factor this close to 1 stops the order scan.
const FACTOR_DEVIATION_STOP: f64 = 1e-9;
/// Hard cap on the number of orders per tier.
const ORDER_CAP: u32 = 10_000;
/// Residual beyond which the truncated product is reported as nonconvergent.
const RESIDUAL_LIMIT: f64 = 1e-6;

enum TierTransform<T> {
    /// β > 0: explicit per-order factors.
    Factors(Vec<T>),
    /// β = 0: exact PPP exponential factor (stored as the log value).
    PppLog(T),
}

/// One evaluated interference product at a fixed transform argument,
/// supporting exclusion of a single serving order.
pub(crate) struct InterferenceProduct<T> {
    tiers: Vec<TierTransform<T>>,
    pub quad_err: T,
    pub truncation_index: u32,
    pub residual_bound: T,
}

impl<T: Real> InterferenceProduct<T> {
    pub fn value(&self) -> T {
        self.value_excluding(None)
    }

    /// Product with the factor of `(tier, order)` removed; removal of an
    /// order beyond the truncation depth (its factor is 1) or on a PPP tier
    /// (continuum) is a no-op.
    pub fn value_excluding(&self, excl: Option<(usize, u32)>) -> T {
        let mut acc = T::one();
        for (z, tier) in self.tiers.iter().enumerate() {
            match tier {
                TierTransform::PppLog(log) => acc *= log.exp(),
                TierTransform::Factors(factors) => {
                    for (idx, &f) in factors.iter().enumerate() {
                        if let Some((ez, ei)) = excl {
                            if ez == z && ei as usize == idx + 1 {
                                continue;
                            }
                        }
                        acc *= f;
                    }
                }
            }
        }
        acc
    }
}

fn damp_deficit<T: Real>(kind: DampKind, beta: T, q: T) -> T {
    let one = T::one();
    match kind {
        DampKind::Single => beta * (one - q),
        DampKind::Joint => beta * (one - q * q),
        DampKind::JointCompat => {
            let d = beta * (one - q);
            T::of(2.0) * d - d * d
        }
    }
}

/// Evaluate the interference product at argument `s`.
///
/// `same_tier_lower`: optional (tier, lower squared-distance limit) pair;
/// used by the downlink coverage bound where same-tier interferers closer
/// than the limit are excluded.
pub(crate) fn interference_product<T: Real>(
    cfg: &NetworkConfig<T>,
    s: T,
    kind: DampKind,
    same_tier_lower: Option<(usize, T)>,
) -> Result<InterferenceProduct<T>> {
    if s < T::zero() {
        return Err(Error::InvalidParameter(format!("transform argument must be >= 0, got {s}")));
    }
    let ch = &cfg.channel;
    let r_sq = ch.los_radius_sq();
    let a_half = ch.pathloss_exponent * T::of(0.5);
    let eps = ch.pathloss_offset;
    let mut tiers = Vec::with_capacity(cfg.num_tiers());
    let mut quad_err = T::zero();
    let mut truncation_index = 0u32;
    let mut residual_bound = T::zero();

    for z in 0..cfg.num_tiers() {
        let lambda_t = cfg.thinned_density(z);
        let beta = cfg.tiers[z].beta;
        let c = cfg.interferer_coef(z);
        let lower = match same_tier_lower {
            Some((tz, lo)) if tz == z => lo,
            _ => T::zero(),
        };
        if lambda_t == T::zero() || s == T::zero() {
            tiers.push(TierTransform::Factors(Vec::new()));
            continue;
        }
        let q_of = |y: T| {
            let denom = eps + y.powf(a_half);
            denom / (denom + s * c)
        };
        if beta == T::zero() {
            // Exact PPP tier: log L = −πλ̃ ∫ deficit dy; the two-slot
            // compatibility variant degenerates to 2(1−q), i.e. L².
            let integrand = |y: T| {
                let q = q_of(y);
                match kind {
                    DampKind::Single => T::one() - q,
                    DampKind::Joint => T::one() - q * q,
                    DampKind::JointCompat => T::of(2.0) * (T::one() - q),
                }
            };
            let r = adaptive_quad(integrand, lower, r_sq, T::of(FACTOR_TOL) / lambda_t.max(T::of(1e-12)));
            let log = -T::PI() * lambda_t * r.value;
            quad_err += T::PI() * lambda_t * r.abs_err;
            tiers.push(TierTransform::PppLog(log));
            continue;
        }

        let t_thin = T::PI() * lambda_t;
        let mut factors = Vec::new();
        let mut head_mass = T::zero();
        let mut order = 0u32;
        loop {
            order += 1;
            if order > ORDER_CAP {
                break;
            }
            let mass = gamma_radial_cdf(r_sq, order, beta, t_thin);
            head_mass += mass;
            // |1 − factor| ≤ β · mass inside the window; stop once negligible.
            if (beta * mass).to_f64_lossy() < FACTOR_DEVIATION_STOP {
                order -= 1;
                break;
            }
            let integrand = |y: T| {
                let f = gamma_radial_pdf(y, order, beta, t_thin).expect("validated radial params");
                f * damp_deficit(kind, beta, q_of(y))
            };
            let r = adaptive_quad(integrand, lower, r_sq, T::of(FACTOR_TOL));
            factors.push(T::one() - r.value);
            quad_err += r.abs_err;
        }
        // Tail of Σ_i F_{C_i}(R²) from the identity Σ_i F_i(x) = t·x/β.
        let tail = (t_thin * r_sq / beta - head_mass).max(T::zero());
        residual_bound += beta * tail;
        truncation_index = truncation_index.max(order);
        tiers.push(TierTransform::Factors(factors));
    }

    if residual_bound.to_f64_lossy() > RESIDUAL_LIMIT {
        return Err(Error::Nonconvergence(format!(
            "interference product residual {residual_bound} exceeds {RESIDUAL_LIMIT} \
             at order cap {ORDER_CAP}"
        )));
    }
    Ok(InterferenceProduct { tiers, quad_err, truncation_index, residual_bound })
}

/// Laplace transform of the aggregate interference at `s`, optionally
/// excluding the serving point's order in its tier.
pub fn laplace_interference<T: Real>(
    s: T,
    cfg: &NetworkConfig<T>,
    exclusion: Option<(usize, u32)>,
) -> Result<AnalyticResult<T>> {
    let prod = interference_product(cfg, s, DampKind::Single, None)?;
    Ok(AnalyticResult {
        value: prod.value_excluding(exclusion),
        quadrature_abs_err: prod.quad_err,
        product_truncation_index: prod.truncation_index,
        residual_bound: prod.residual_bound,
    })
}

/// Joint two-slot Laplace transform (shared layout, independent fading).
/// `compat` selects the per-factor-squared compatibility variant.
pub fn joint_laplace_interference<T: Real>(
    s: T,
    cfg: &NetworkConfig<T>,
    exclusion: Option<(usize, u32)>,
    compat: bool,
) -> Result<AnalyticResult<T>> {
    let kind = if compat { DampKind::JointCompat } else { DampKind::Joint };
    let prod = interference_product(cfg, s, kind, None)?;
    Ok(AnalyticResult {
        value: prod.value_excluding(exclusion),
        quadrature_abs_err: prod.quad_err,
        product_truncation_index: prod.truncation_index,
        residual_bound: prod.residual_bound,
    })
}

/// Laplace transform of the residual self-interference:
/// (μ / (μ + s σ²_SI min{ρ(ε+d^a)^{ε_pc}, P_k}))^μ.
pub fn laplace_si<T: Real>(s: T, d: T, tier: usize, cfg: &NetworkConfig<T>) -> T {
    let ch = &cfg.channel;
    if ch.si_var == T::zero() || s == T::zero() {
        return T::one();
    }
    let mu = T::of(ch.si_mu as f64);
    let p = power_control(d, cfg.tiers[tier].power, ch);
    (mu / (mu + s * ch.si_var * p)).powf(mu)
}

/// Closed-form PPP limit of the aggregate transform:
/// ∏_z exp(−π λ̃_z (1 − ε/Q_z) R² · ₂F₁[1, 2/a; (2+a)/a; −R^a/Q_z]),
/// Q_z = c_z s + ε.
pub fn laplace_interference_ppp<T: Real>(s: T, cfg: &NetworkConfig<T>) -> Result<T> {
    if s < T::zero() {
        return Err(Error::InvalidParameter(format!("transform argument must be >= 0, got {s}")));
    }
    let ch = &cfg.channel;
    let r_sq = ch.los_radius_sq();
    let eps = ch.pathloss_offset;
    let a = ch.pathloss_exponent;
    let b = T::of(2.0) / a;
    let r_pow_a = r_sq.powf(a * T::of(0.5));
    let mut log_total = T::zero();
    for z in 0..cfg.num_tiers() {
        let lambda_t = cfg.thinned_density(z);
        if lambda_t == T::zero() || s == T::zero() {
            continue;
        }
        let q_big = cfg.interferer_coef(z) * s + eps;
        let f21 = hyp2f1_1b(b, -r_pow_a / q_big, T::of(1e-9));
        log_total -= T::PI() * lambda_t * (T::one() - eps / q_big) * r_sq * f21;
    }
    Ok(log_total.exp())
}
