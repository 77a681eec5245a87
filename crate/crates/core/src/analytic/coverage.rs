//! Downlink coverage bound for a user at a fixed distance from its serving
//! BS: Alzer expansion with the same-tier interferers restricted to squared
//! distances above the serving limit.

use crate::channel::power_control;
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::num::Real;
use crate::special::binomial;

use super::detection::varpi;
use super::laplace::{interference_product, DampKind};
use super::AnalyticResult;

/// P[downlink SINR ≥ η] upper bound for a tier-k user at distance d.
///
/// s(ξ) = η ξ ϖ (ε + d^a) / (P_k(d) G²); interference factors carry the
/// thinned densities and P_z(d) G² ℓ; the serving tier integrates squared
/// distances over [d, R²], every other tier over [0, R²].
pub fn dl_coverage_prob<T: Real>(
    eta: T,
    d: T,
    tier: usize,
    cfg: &NetworkConfig<T>,
) -> Result<AnalyticResult<T>> {
    if eta < T::zero() {
        return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
    }
    let ch = &cfg.channel;
    if d > ch.los_radius {
        return Err(Error::InvalidParameter(format!(
            "serving distance {d} exceeds the LoS radius {}",
            ch.los_radius
        )));
    }
    let nu = ch.nakagami_nu;
    let w = varpi::<T>(nu);
    let g2 = ch.mainlobe_gain * ch.mainlobe_gain;
    let p_d = power_control(d, cfg.tiers[tier].power, ch);
    let s_base = eta * w * (ch.pathloss_offset + d.powf(ch.pathloss_exponent)) / (p_d * g2);
    let mut value = T::zero();
    let mut quad_err = T::zero();
    let mut truncation = 0u32;
    let mut residual = T::zero();
    for xi in 1..=nu {
        let s = s_base * T::of(xi as f64);
        let prod = interference_product(cfg, s, DampKind::Single, Some((tier, d)))?;
        quad_err = quad_err.max(prod.quad_err);
        truncation = truncation.max(prod.truncation_index);
        residual = residual.max(prod.residual_bound);
        let sign = if xi % 2 == 1 { T::one() } else { -T::one() };
        let noise = (-s * ch.noise_var).exp();
        value += sign * binomial::<T>(nu, xi) * noise * prod.value();
    }
    value = (ch.los_prob * value).max(T::zero()).min(T::one());
    Ok(AnalyticResult {
        value,
        quadrature_abs_err: quad_err,
        product_truncation_index: truncation,
        residual_bound: residual,
    })
}
