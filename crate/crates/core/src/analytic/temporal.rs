//! Two-slot joint detection, the conditional detection probability and the
//! temporal correlation ratio.

use crate::config::{EvalOptions, NetworkConfig};
use crate::error::{Error, Result};
use crate::num::Real;

use super::detection::{comrd_detection_prob, SlotMode};
use super::AnalyticResult;

/// Joint two-slot fused detection bound: same layout and marks in both
/// slots, fresh fading, joint interference transform, squared SI and noise
/// factors.
pub fn joint_detection_prob<T: Real>(
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    cfg: &NetworkConfig<T>,
    opts: &EvalOptions,
) -> Result<AnalyticResult<T>> {
    comrd_detection_prob(thetas, kappa, varsigma, cfg, SlotMode::Joint, opts)
}

/// Detection probability on the second slot conditioned on success in the
/// first: joint / single.
pub fn conditional_detection_prob<T: Real>(
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    cfg: &NetworkConfig<T>,
    opts: &EvalOptions,
) -> Result<AnalyticResult<T>> {
    let single = comrd_detection_prob(thetas, kappa, varsigma, cfg, SlotMode::Single, opts)?;
    if single.value < T::of(1e-12) {
        return Err(Error::Domain(
            "single-slot detection probability is numerically zero; the conditional is undefined"
                .into(),
        ));
    }
    let joint = joint_detection_prob(thetas, kappa, varsigma, cfg, opts)?;
    Ok(AnalyticResult {
        value: joint.value / single.value,
        quadrature_abs_err: (joint.quadrature_abs_err + single.quadrature_abs_err) / single.value,
        product_truncation_index: joint.product_truncation_index.max(single.product_truncation_index),
        residual_bound: joint.residual_bound.max(single.residual_bound),
    })
}

/// Temporal correlation ratio ρ = joint / single²; ρ > 1 marks positively
/// correlated detection events across slots.
pub fn correlation_ratio<T: Real>(
    thetas: &[T],
    kappa: u32,
    varsigma: T,
    cfg: &NetworkConfig<T>,
    opts: &EvalOptions,
) -> Result<T> {
    let single = comrd_detection_prob(thetas, kappa, varsigma, cfg, SlotMode::Single, opts)?;
    if single.value < T::of(1e-12) {
        return Err(Error::Domain(
            "single-slot detection probability is numerically zero; the ratio is undefined".into(),
        ));
    }
    let joint = joint_detection_prob(thetas, kappa, varsigma, cfg, opts)?;
    Ok(joint.value / (single.value * single.value))
}
