//! CFAR: false-alarm probability and detection-threshold selection.
//!
//! The closed forms hold in the omnidirectional PPP regime (φ = 2π, a = 4,
//! full power, R → ∞); outside it they serve as the design approximation the
//! thresholds are tuned with.

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::num::Real;

/// False-alarm probability of a tier-k BS at threshold θ:
/// (1 − p_L) ζ / (1 + p_L √(πθ) λ_k/λ_b).
pub fn false_alarm_prob<T: Real>(theta: T, tier: usize, cfg: &NetworkConfig<T>) -> Result<T> {
    if theta < T::zero() {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {theta}")));
    }
    let ch = &cfg.channel;
    let ceiling = (T::one() - ch.los_prob) * ch.object_prob;
    let ratio = cfg.tiers[tier].density / ch.blockage_density;
    Ok(ceiling / (T::one() + ch.los_prob * (T::PI() * theta).sqrt() * ratio))
}

/// Threshold returned by the CFAR tuning step.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdResult<T> {
    pub theta: T,
    /// The target false-alarm rate is at or above the zero-threshold ceiling
    /// (1 − p_L)ζ, so any threshold meets it; 0 is returned.
    pub trivially_met: bool,
}

/// Tier-k detection threshold for a target false-alarm rate, reference
/// form (see `invert_false_alarm` for the direct inversion of the rate):
/// θ_k = A λ_b² / (λ_k² p_L π³ R²) · (1 − (1−p_L)ζ/P_fa)².
pub fn detection_threshold<T: Real>(
    target_fa: T,
    tier: usize,
    cfg: &NetworkConfig<T>,
) -> Result<ThresholdResult<T>> {
    if !(target_fa > T::zero() && target_fa < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "target false-alarm rate must lie in (0, 1), got {target_fa}"
        )));
    }
    let ch = &cfg.channel;
    let ceiling = (T::one() - ch.los_prob) * ch.object_prob;
    if target_fa >= ceiling {
        return Ok(ThresholdResult { theta: T::zero(), trivially_met: true });
    }
    let lam_k = cfg.tiers[tier].density;
    let pi3 = T::PI() * T::PI() * T::PI();
    let frac = T::one() - ceiling / target_fa;
    let theta = ch.rcs * ch.blockage_density * ch.blockage_density
        / (lam_k * lam_k * ch.los_prob * pi3 * ch.los_radius_sq())
        * frac
        * frac;
    Ok(ThresholdResult { theta, trivially_met: false })
}

/// Direct algebraic inversion of the false-alarm closed form:
/// θ = (λ_b / (λ_k p_L √π))² · ((1−p_L)ζ/P_fa − 1)².
pub fn invert_false_alarm<T: Real>(
    target_fa: T,
    tier: usize,
    cfg: &NetworkConfig<T>,
) -> Result<ThresholdResult<T>> {
    if !(target_fa > T::zero() && target_fa < T::one()) {
        return Err(Error::InvalidParameter(format!(
            "target false-alarm rate must lie in (0, 1), got {target_fa}"
        )));
    }
    let ch = &cfg.channel;
    let ceiling = (T::one() - ch.los_prob) * ch.object_prob;
    if target_fa >= ceiling {
        return Ok(ThresholdResult { theta: T::zero(), trivially_met: true });
    }
    let base = ch.blockage_density / (cfg.tiers[tier].density * ch.los_prob * T::PI().sqrt());
    let frac = ceiling / target_fa - T::one();
    Ok(ThresholdResult { theta: base * base * frac * frac, trivially_met: false })
}
