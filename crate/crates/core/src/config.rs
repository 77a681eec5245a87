//! Network configuration: the JSON schema uses the customary units of the
//! problem domain (BSs/km², dBm, dB, GHz, meters); everything is converted to
//! linear SI once at load time and the rest of the crate never sees a dB.

// Validation deliberately uses negated comparisons: NaN fails closed.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::num::Real;

/// Hard-decision combining rule at the fusion center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionRule {
    Or,
    Majority,
    And,
    KOutOfN,
}

/// One network tier, raw units.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTier {
    /// BS density in BSs/km².
    pub density_per_km2: f64,
    /// Maximum transmit power in dBm.
    pub power_dbm: f64,
    /// Repulsion β ∈ [0, 1]; 0 selects an exact PPP layout for the tier.
    pub beta: f64,
    /// Fraction χ of FD-JCAS-capable BSs.
    pub jcas_fraction: f64,
}

/// Channel block, raw units.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChannel {
    pub pathloss_exponent: f64,
    pub pathloss_offset: f64,
    pub nakagami_nu: u32,
    pub los_prob: f64,
    pub los_radius_m: f64,
    pub beamwidth_rad: f64,
    pub mainlobe_gain_db: f64,
    pub carrier_freq_ghz: f64,
    pub rcs_db: f64,
    pub noise_var_db: f64,
    pub si_mu: u32,
    pub si_var_db: f64,
    pub pc_rho_db: f64,
    pub pc_fraction: f64,
    /// Blockage density in blockages/km². Required: the source material
    /// assigns no default.
    pub blockage_density_per_km2: Option<f64>,
    /// Object presence probability ζ. Required, same reason.
    pub object_prob: Option<f64>,
    pub serving_distance_m: f64,
}

/// Fusion block, raw.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFusion {
    pub rule: FusionRule,
    /// Required for `k_out_of_n`; for named rules it may be omitted (it is
    /// derived) or stated, in which case it must agree.
    pub kappa: Option<u32>,
    /// Distance-quality weight fraction ς ∈ [0, 1]; 0 means equal weights.
    pub varsigma: f64,
}

/// Raw network configuration as read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNetworkConfig {
    pub tiers: Vec<RawTier>,
    pub channel: RawChannel,
    pub fusion: RawFusion,
}

/// Tier parameters in linear SI units.
#[derive(Debug, Clone, Copy)]
pub struct TierConfig<T> {
    /// Density, m⁻².
    pub density: T,
    /// Maximum transmit power, W.
    pub power: T,
    /// Repulsion β; 0 = PPP.
    pub beta: T,
    /// Fraction of FD-JCAS BSs.
    pub jcas_fraction: T,
}

/// Fusion-center parameters.
#[derive(Debug, Clone, Copy)]
pub struct FusionConfig<T> {
    pub rule: FusionRule,
    /// κ of the κ-out-of-K rule, resolved against the tier count.
    pub kappa: u32,
    pub varsigma: T,
}

/// Fully validated network configuration in linear SI units.
#[derive(Debug, Clone)]
pub struct NetworkConfig<T> {
    pub tiers: Vec<TierConfig<T>>,
    pub channel: ChannelParams<T>,
    pub fusion: FusionConfig<T>,
}

impl<T: Real> NetworkConfig<T> {
    pub fn num_tiers(&self) -> usize {
        self.tiers.len()
    }

    /// Thinned interferer density λ̃_z = λ_z (φ/2π)² p_L χ_z.
    pub fn thinned_density(&self, z: usize) -> T {
        let tier = &self.tiers[z];
        tier.density * crate::channel::interferer_activity_prob(&self.channel, tier.jcas_fraction)
    }

    /// Power-controlled downlink power P_z(d) of tier z interferers.
    pub fn dl_power(&self, z: usize) -> T {
        crate::channel::power_control(
            self.channel.serving_distance,
            self.tiers[z].power,
            &self.channel,
        )
    }

    /// Interferer amplitude coefficient c_z = P_z(d) G² ℓ.
    pub fn interferer_coef(&self, z: usize) -> T {
        let g2 = self.channel.mainlobe_gain * self.channel.mainlobe_gain;
        self.dl_power(z) * g2 * self.channel.ell()
    }

    /// A copy with every tier forced to a PPP layout (β = 0).
    pub fn as_ppp(&self) -> Self {
        let mut out = self.clone();
        for tier in &mut out.tiers {
            tier.beta = T::zero();
        }
        out
    }
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

const KM2_TO_M2: f64 = 1e-6;

impl RawNetworkConfig {
    /// Validate and convert into the internal linear-unit representation.
    /// Every violation is reported, not just the first.
    pub fn build<T: Real>(&self) -> Result<NetworkConfig<T>> {
        let mut errs: Vec<String> = Vec::new();
        let k = self.tiers.len();
        if k == 0 {
            errs.push("tiers: at least one tier is required".into());
        }
        for (i, tier) in self.tiers.iter().enumerate() {
            if !(tier.density_per_km2 >= 0.0) || !tier.density_per_km2.is_finite() {
                errs.push(format!("tiers[{i}].density_per_km2: must be finite and >= 0"));
            }
            if !(0.0..=1.0).contains(&tier.beta) {
                errs.push(format!("tiers[{i}].beta: must lie in [0, 1]"));
            }
            if !(0.0..=1.0).contains(&tier.jcas_fraction) {
                errs.push(format!("tiers[{i}].jcas_fraction: must lie in [0, 1]"));
            }
        }
        // power ordering P_k > P_i for k < i
        for w in self.tiers.windows(2) {
            if !(w[0].power_dbm > w[1].power_dbm) {
                errs.push(format!(
                    "tiers: power must be strictly decreasing across tiers ({} dBm !> {} dBm)",
                    w[0].power_dbm, w[1].power_dbm
                ));
            }
        }
        let ch = &self.channel;
        if !(ch.pathloss_exponent > 2.0) {
            errs.push("channel.pathloss_exponent: must be > 2".into());
        }
        if !(ch.pathloss_offset > 0.0) {
            errs.push("channel.pathloss_offset: must be > 0".into());
        }
        if ch.nakagami_nu < 1 {
            errs.push("channel.nakagami_nu: must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&ch.los_prob) {
            errs.push("channel.los_prob: must lie in [0, 1]".into());
        }
        if !(ch.los_radius_m > 0.0) {
            errs.push("channel.los_radius_m: must be > 0".into());
        }
        if !(ch.beamwidth_rad > 0.0 && ch.beamwidth_rad <= 2.0 * std::f64::consts::PI + 1e-12) {
            errs.push("channel.beamwidth_rad: must lie in (0, 2π]".into());
        }
        if !(ch.carrier_freq_ghz > 0.0) {
            errs.push("channel.carrier_freq_ghz: must be > 0".into());
        }
        if ch.si_mu < 1 {
            errs.push("channel.si_mu: must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&ch.pc_fraction) {
            errs.push("channel.pc_fraction: must lie in [0, 1]".into());
        }
        match ch.blockage_density_per_km2 {
            None => errs.push("channel.blockage_density_per_km2: required field is missing".into()),
            Some(b) if !(b > 0.0) => {
                errs.push("channel.blockage_density_per_km2: must be > 0".into())
            }
            _ => {}
        }
        match ch.object_prob {
            None => errs.push("channel.object_prob: required field is missing".into()),
            Some(z) if !(0.0..=1.0).contains(&z) => {
                errs.push("channel.object_prob: must lie in [0, 1]".into())
            }
            _ => {}
        }
        if !(ch.serving_distance_m >= 0.0 && ch.serving_distance_m <= ch.los_radius_m) {
            errs.push("channel.serving_distance_m: must lie in [0, los_radius_m]".into());
        }
        // noise_var_db is a dB value: any finite value maps to a positive
        // linear variance, which is what the SINR denominators require.
        if !ch.noise_var_db.is_finite() {
            errs.push("channel.noise_var_db: must be finite (zero noise is not supported)".into());
        }

        let fu = &self.fusion;
        if !(0.0..=1.0).contains(&fu.varsigma) {
            errs.push("fusion.varsigma: must lie in [0, 1]".into());
        }
        let kappa = match (fu.rule, fu.kappa) {
            (FusionRule::Or, None) => 1,
            (FusionRule::Majority, None) => (k as u32).div_ceil(2),
            (FusionRule::And, None) => k as u32,
            (FusionRule::KOutOfN, None) => {
                errs.push("fusion.kappa: required when rule is k_out_of_n".into());
                1
            }
            (rule, Some(kp)) => {
                let derived = match rule {
                    FusionRule::Or => Some(1),
                    FusionRule::Majority => Some((k as u32).div_ceil(2)),
                    FusionRule::And => Some(k as u32),
                    FusionRule::KOutOfN => None,
                };
                if let Some(d) = derived {
                    if kp != d {
                        errs.push(format!(
                            "fusion.kappa: {kp} contradicts rule (expected {d})"
                        ));
                    }
                }
                kp
            }
        };
        if k > 0 && !(1..=k as u32).contains(&kappa) {
            errs.push(format!("fusion.kappa: must lie in [1, {k}]"));
        }

        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }

        let tiers = self
            .tiers
            .iter()
            .map(|t| TierConfig {
                density: T::of(t.density_per_km2 * KM2_TO_M2),
                power: T::of(dbm_to_watts(t.power_dbm)),
                beta: T::of(t.beta),
                jcas_fraction: T::of(t.jcas_fraction),
            })
            .collect();
        let channel = ChannelParams {
            pathloss_exponent: T::of(ch.pathloss_exponent),
            pathloss_offset: T::of(ch.pathloss_offset),
            nakagami_nu: ch.nakagami_nu,
            los_prob: T::of(ch.los_prob),
            los_radius: T::of(ch.los_radius_m),
            beamwidth: T::of(ch.beamwidth_rad),
            mainlobe_gain: T::of(db_to_linear(ch.mainlobe_gain_db)),
            carrier_freq: T::of(ch.carrier_freq_ghz * 1e9),
            rcs: T::of(db_to_linear(ch.rcs_db)),
            noise_var: T::of(db_to_linear(ch.noise_var_db)),
            si_mu: ch.si_mu,
            si_var: T::of(db_to_linear(ch.si_var_db)),
            pc_rho: T::of(db_to_linear(ch.pc_rho_db)),
            pc_fraction: T::of(ch.pc_fraction),
            blockage_density: T::of(ch.blockage_density_per_km2.unwrap() * KM2_TO_M2),
            object_prob: T::of(ch.object_prob.unwrap()),
            serving_distance: T::of(ch.serving_distance_m),
        };
        Ok(NetworkConfig {
            tiers,
            channel,
            fusion: FusionConfig { rule: fu.rule, kappa, varsigma: T::of(fu.varsigma) },
        })
    }
}

/// Evaluation switches for the analytic engine.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Apply the ζ·p_L presence factor (on by default).
    pub presence_factor: bool,
    /// Un-condition with the literal per-order sum instead of the
    /// nearest-retained law (comparison mode; the result is a raw bound that
    /// may exceed 1).
    pub compat_eq20: bool,
    /// Two-slot transform compatibility variant: square the whole per-point
    /// factor instead of taking the per-point second moment of the damping.
    pub compat_eq24: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { presence_factor: true, compat_eq20: false, compat_eq24: false }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn paper_defaults_json() -> &'static str {
        r#"{
          "tiers": [
            {"density_per_km2": 1.0, "power_dbm": 15.0, "beta": 0.9, "jcas_fraction": 0.8},
            {"density_per_km2": 2.0, "power_dbm": 10.0, "beta": 0.9, "jcas_fraction": 0.8},
            {"density_per_km2": 4.0, "power_dbm": 5.0, "beta": 0.9, "jcas_fraction": 0.8}
          ],
          "channel": {
            "pathloss_exponent": 4.0, "pathloss_offset": 1.0, "nakagami_nu": 2,
            "los_prob": 0.7, "los_radius_m": 400.0, "beamwidth_rad": 0.5235987755982988,
            "mainlobe_gain_db": 10.0, "carrier_freq_ghz": 30.0, "rcs_db": 10.0,
            "noise_var_db": -60.0, "si_mu": 4, "si_var_db": -60.0,
            "pc_rho_db": -40.0, "pc_fraction": 0.9,
            "blockage_density_per_km2": 100.0, "object_prob": 1.0,
            "serving_distance_m": 50.0
          },
          "fusion": {"rule": "or", "varsigma": 0.0}
        }"#
    }

    #[test]
    fn paper_defaults_build_and_convert() {
        let raw: RawNetworkConfig = serde_json::from_str(paper_defaults_json()).unwrap();
        let cfg: NetworkConfig<f64> = raw.build().unwrap();
        assert_eq!(cfg.num_tiers(), 3);
        assert!((cfg.tiers[0].density - 1e-6).abs() < 1e-18);
        assert!((cfg.tiers[0].power - 0.0316227766).abs() < 1e-8); // 15 dBm
        assert!((cfg.channel.mainlobe_gain - 10.0).abs() < 1e-12); // 10 dB
        assert!((cfg.channel.noise_var - 1e-6).abs() < 1e-18); // -60 dB
        assert!((cfg.channel.carrier_freq - 30e9).abs() < 1.0);
        assert_eq!(cfg.fusion.kappa, 1);
        // derived ℓ at 30 GHz: (c/4πf)²
        let ell = cfg.channel.ell();
        let want = (299_792_458.0 / (4.0 * std::f64::consts::PI * 30e9)).powi(2);
        assert!((ell - want).abs() < 1e-18);
    }

    #[test]
    fn missing_blockage_density_is_named() {
        let mut v: serde_json::Value = serde_json::from_str(paper_defaults_json()).unwrap();
        v["channel"].as_object_mut().unwrap().remove("blockage_density_per_km2");
        let raw: RawNetworkConfig = serde_json::from_value(v).unwrap();
        let err = raw.build::<f64>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("blockage_density_per_km2"), "{msg}");
    }

    #[test]
    fn increasing_power_ordering_is_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(paper_defaults_json()).unwrap();
        v["tiers"][0]["power_dbm"] = serde_json::json!(5.0);
        v["tiers"][2]["power_dbm"] = serde_json::json!(15.0);
        let raw: RawNetworkConfig = serde_json::from_value(v).unwrap();
        let err = raw.build::<f64>().unwrap_err();
        assert!(err.to_string().contains("strictly decreasing"), "{err}");
    }

    #[test]
    fn violations_are_itemized() {
        let mut v: serde_json::Value = serde_json::from_str(paper_defaults_json()).unwrap();
        v["channel"]["pathloss_exponent"] = serde_json::json!(1.5);
        v["tiers"][1]["beta"] = serde_json::json!(1.5);
        v["channel"].as_object_mut().unwrap().remove("object_prob");
        let raw: RawNetworkConfig = serde_json::from_value(v).unwrap();
        match raw.build::<f64>() {
            Err(Error::Config(items)) => {
                assert!(items.len() >= 3, "{items:?}");
            }
            other => panic!("expected itemized config error, got {other:?}"),
        }
    }

    #[test]
    fn kappa_rule_consistency() {
        let mut v: serde_json::Value = serde_json::from_str(paper_defaults_json()).unwrap();
        v["fusion"]["kappa"] = serde_json::json!(2);
        let raw: RawNetworkConfig = serde_json::from_value(v).unwrap();
        assert!(raw.build::<f64>().is_err()); // or-rule demands κ = 1

        let mut v: serde_json::Value = serde_json::from_str(paper_defaults_json()).unwrap();
        v["fusion"]["rule"] = serde_json::json!("majority");
        let raw: RawNetworkConfig = serde_json::from_value(v).unwrap();
        assert_eq!(raw.build::<f64>().unwrap().fusion.kappa, 2);

        let mut v: serde_json::Value = serde_json::from_str(paper_defaults_json()).unwrap();
        v["fusion"]["rule"] = serde_json::json!("and");
        let raw: RawNetworkConfig = serde_json::from_value(v).unwrap();
        assert_eq!(raw.build::<f64>().unwrap().fusion.kappa, 3);
    }
}
