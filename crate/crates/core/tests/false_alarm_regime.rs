//! The CFAR closed forms hold in the omnidirectional PPP regime; these tests
//! pin the simulator's false-alarm construction to them.

use jcas_core::analytic::{false_alarm_prob, invert_false_alarm};
use jcas_core::config::{NetworkConfig, RawNetworkConfig};
use jcas_core::montecarlo::estimate_false_alarm;

/// CFAR closed-form regime: single PPP tier, omnidirectional, a = 4, χ = 1, full
/// power (power control saturated by a large target ρ), Rayleigh fading.
fn regime_cfg(p_l: f64, zeta: f64, lambda_km2: f64, lambda_b_km2: f64) -> NetworkConfig<f64> {
    let json = format!(
        r#"{{
          "tiers": [{{"density_per_km2": {lambda_km2}, "power_dbm": 15.0, "beta": 0.0, "jcas_fraction": 1.0}}],
          "channel": {{
            "pathloss_exponent": 4.0, "pathloss_offset": 1.0, "nakagami_nu": 1,
            "los_prob": {p_l}, "los_radius_m": 400.0, "beamwidth_rad": 6.283185307179586,
            "mainlobe_gain_db": 10.0, "carrier_freq_ghz": 30.0, "rcs_db": 10.0,
            "noise_var_db": -60.0, "si_mu": 4, "si_var_db": -60.0,
            "pc_rho_db": 20.0, "pc_fraction": 0.0,
            "blockage_density_per_km2": {lambda_b_km2}, "object_prob": {zeta},
            "serving_distance_m": 50.0
          }},
          "fusion": {{"rule": "or", "varsigma": 0.0}}
        }}"#
    );
    serde_json::from_str::<RawNetworkConfig>(&json).unwrap().build().unwrap()
}

#[test]
fn false_alarm_frequency_matches_closed_form() {
    let cfg = regime_cfg(0.7, 1.0, 1.0, 100.0);
    // thresholds spanning the meaningful FA range for these densities
    for &theta in &[2e3f64, 2e4, 2e5] {
        let want = false_alarm_prob(theta, 0, &cfg).unwrap();
        let mc = estimate_false_alarm(&cfg, theta, 0, 30_000, 201).unwrap();
        assert!(
            (mc.mean - want).abs() < 3.0 * mc.std_err,
            "theta={theta}: mc {} (se {}) vs closed form {want}",
            mc.mean,
            mc.std_err
        );
    }
}

#[test]
fn inverted_threshold_achieves_target_rate() {
    // ceiling (1−p_L)ζ = 0.6 so targets 0.3 and 0.5 are genuinely below it
    let cfg = regime_cfg(0.4, 1.0, 1.0, 100.0);
    for &target in &[0.3f64, 0.5] {
        let th = invert_false_alarm(target, 0, &cfg).unwrap();
        assert!(!th.trivially_met);
        let mc = estimate_false_alarm(&cfg, th.theta, 0, 30_000, 202).unwrap();
        assert!(
            (mc.mean - target).abs() < 3.0 * mc.std_err,
            "target={target}: achieved {} (se {})",
            mc.mean,
            mc.std_err
        );
    }
}
