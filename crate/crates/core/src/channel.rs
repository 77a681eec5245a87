//! Channel primitives: bounded path loss, Nakagami fading, LoS ball blockage,
//! cone antennas, fractional power control, residual self-interference and
//! the radar echo equation.

use rand::Rng;

use crate::num::Real;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Channel and link-budget parameters, all in linear SI units.
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams<T> {
    /// Path-loss exponent a > 2.
    pub pathloss_exponent: T,
    /// Path-loss offset ε > 0 bounding the gain at the origin.
    pub pathloss_offset: T,
    /// Nakagami shape ν ≥ 1 of every data/echo link.
    pub nakagami_nu: u32,
    /// LoS probability inside the LoS ball.
    pub los_prob: T,
    /// LoS ball radius R, m.
    pub los_radius: T,
    /// Main-lobe beamwidth φ ∈ (0, 2π].
    pub beamwidth: T,
    /// Main-lobe gain, linear.
    pub mainlobe_gain: T,
    /// Carrier frequency, Hz.
    pub carrier_freq: T,
    /// Radar cross-section of the point of interest, linear (m²-scaled).
    pub rcs: T,
    /// Thermal noise variance, W.
    pub noise_var: T,
    /// Residual self-interference Gamma shape μ ≥ 1.
    pub si_mu: u32,
    /// Mean residual self-interference power gain σ²_SI, linear.
    pub si_var: T,
    /// Power-control target ρ, W.
    pub pc_rho: T,
    /// Power-control fraction ∈ [0, 1].
    pub pc_fraction: T,
    /// Blockage density, m⁻².
    pub blockage_density: T,
    /// Probability ζ that an object is present at a point of interest.
    pub object_prob: T,
    /// Distance between a BS and its associated downlink user, m (≤ R).
    pub serving_distance: T,
}

impl<T: Real> ChannelParams<T> {
    /// ℓ = (c / 4πf)². Derived, never stored.
    pub fn ell(&self) -> T {
        let l = T::of(SPEED_OF_LIGHT) / (T::of(4.0) * T::PI() * self.carrier_freq);
        l * l
    }

    /// Squared LoS ball radius, the squared-distance integration limit.
    pub fn los_radius_sq(&self) -> T {
        self.los_radius * self.los_radius
    }
}

/// Bounded path-loss gain L(d) = 1 / (ε + d^a).
pub fn pathloss<T: Real>(dist: T, p: &ChannelParams<T>) -> T {
    debug_assert!(dist >= T::zero());
    T::one() / (p.pathloss_offset + dist.powf(p.pathloss_exponent))
}

/// Path-loss gain from a squared distance, 1 / (ε + y^{a/2}).
pub fn pathloss_sq<T: Real>(dist_sq: T, p: &ChannelParams<T>) -> T {
    debug_assert!(dist_sq >= T::zero());
    T::one() / (p.pathloss_offset + dist_sq.powf(p.pathloss_exponent * T::of(0.5)))
}

/// Nakagami fading power: Gamma(ν, 1/ν), unit mean.
pub fn sample_fading_power<T: Real, R: Rng + ?Sized>(nu: u32, rng: &mut R) -> T {
    debug_assert!(nu >= 1);
    let nu_t = T::of(nu as f64);
    T::gamma_draw(rng, nu_t, T::one() / nu_t)
}

/// Residual self-interference power gain: Gamma(μ, σ²_SI/μ), mean σ²_SI.
pub fn sample_si_power_gain<T: Real, R: Rng + ?Sized>(p: &ChannelParams<T>, rng: &mut R) -> T {
    debug_assert!(p.si_mu >= 1);
    if p.si_var == T::zero() {
        return T::zero();
    }
    let mu = T::of(p.si_mu as f64);
    T::gamma_draw(rng, mu, p.si_var / mu)
}

/// LoS ball indicator: Bernoulli(p_L) inside the ball, NLoS outside.
pub fn los_indicator<T: Real, R: Rng + ?Sized>(dist: T, p: &ChannelParams<T>, rng: &mut R) -> bool {
    dist <= p.los_radius && T::unit_draw(rng) < p.los_prob
}

/// Probability that a BS of JCAS fraction χ is an active aligned LoS
/// interferer: (φ/2π)² p_L χ.
pub fn interferer_activity_prob<T: Real>(p: &ChannelParams<T>, chi: T) -> T {
    let frac = p.beamwidth / (T::of(2.0) * T::PI());
    frac * frac * p.los_prob * chi
}

/// Fractional power control: min{ρ (ε + d^a)^{ε_pc}, P_max}.
pub fn power_control<T: Real>(d: T, tier_power: T, p: &ChannelParams<T>) -> T {
    let inv = p.pc_rho * (p.pathloss_offset + d.powf(p.pathloss_exponent)).powf(p.pc_fraction);
    inv.min(tier_power)
}

/// Radar echo power P_k G² (Aℓ/4π) h L²(r).
pub fn radar_echo_power<T: Real>(r: T, tier_power: T, fading: T, p: &ChannelParams<T>) -> T {
    debug_assert!(r >= T::zero() && fading >= T::zero());
    let g2 = p.mainlobe_gain * p.mainlobe_gain;
    let l = pathloss(r, p);
    tier_power * g2 * p.rcs * p.ell() / (T::of(4.0) * T::PI()) * fading * l * l
}

/// Echo-side coefficient P_k G² A ℓ / 4π (the echo power is this times h·L²).
pub fn radar_echo_coefficient<T: Real>(tier_power: T, p: &ChannelParams<T>) -> T {
    let g2 = p.mainlobe_gain * p.mainlobe_gain;
    tier_power * g2 * p.rcs * p.ell() / (T::of(4.0) * T::PI())
}
