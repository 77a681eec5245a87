//! Numerical evaluation of the closed-form interference transforms, CFAR
//! expressions, detection bounds, downlink coverage, and two-slot joint
//! statistics.

mod coverage;
mod detection;
mod false_alarm;
mod laplace;
mod temporal;

pub use coverage::dl_coverage_prob;
pub use detection::{
    comrd_detection_prob, comrd_detection_prob_ppp, cond_detection_prob, poisson_binomial_tail,
    varpi, SlotMode,
};
pub use false_alarm::{
    detection_threshold, false_alarm_prob, invert_false_alarm, ThresholdResult,
};
pub use laplace::{
    joint_laplace_interference, laplace_interference, laplace_interference_ppp, laplace_si,
    DampKind,
};
pub use temporal::{conditional_detection_prob, correlation_ratio, joint_detection_prob};

/// An evaluated bound or probability together with the numerical metadata
/// needed to judge it: quadrature error, product truncation depth and the
/// bound on the truncated tail.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticResult<T> {
    pub value: T,
    pub quadrature_abs_err: T,
    pub product_truncation_index: u32,
    pub residual_bound: T,
}
