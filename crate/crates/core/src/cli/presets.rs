//! Named scenarios `fig3` to `fig9`: parameter sets for the threshold tables and the
//! storage and retrieval runs.

use std::f64::consts::PI;

use super::config::{BenchmarkMode, ScenarioConfig, SweepVar};
use crate::error::{Error, Result};
use crate::schedule::{ProtocolParams, Strategy};

pub const PRESET_NAMES: [&str; 7] = ["fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"];

/// Config for a preset; further config keys and flags are applied on top.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let mut c = ScenarioConfig {
        label: name.to_string(),
        ..ScenarioConfig::default()
    };
    let gated = |gamma: f64, t: f64| ProtocolParams {
        kappa: 4.0,
        g: 2.0,
        gamma,
        storage_time: t,
        ..ProtocolParams::default()
    };
    match name {
        "fig3" => {
            c.benchmark_mode = BenchmarkMode::Thresholds;
            // n_bar = 0.1, 0.2, ..., 50 with exact decimal grid points
            c.values = Some((1..=500).map(|i| i as f64 / 10.0).collect());
        }
        "fig4" => {
            c.benchmark_mode = BenchmarkMode::Arbitrary;
            c.values = Some((0..=100).map(|i| i as f64 / 100.0).collect());
        }
        "fig5" => {
            c.strategy = Strategy::QSwitch;
            c.params = ProtocolParams {
                kappa: 1.0,
                kappa_s: 0.1,
                storage_time: 2.0,
                ..ProtocolParams::default()
            };
        }
        "fig6" => {
            c.strategy = Strategy::CouplingGate;
            c.params = gated(0.01, 4.0);
            c.sweep = Some(SweepVar::Gamma);
            c.values = Some(vec![0.01, 0.05]);
            c.reference = vec![0.95, 0.80];
        }
        "fig7" => {
            c.strategy = Strategy::CouplingGate;
            c.params = gated(0.01, 4.0);
            c.reference = vec![0.95];
        }
        "fig8" => {
            c.strategy = Strategy::CouplingGate;
            c.params = gated(0.01, 4.0);
            c.sweep = Some(SweepVar::StorageTime);
            c.values = Some(vec![4.0, 8.0, 15.0]);
            c.reference = vec![0.95, 0.91, 0.85];
        }
        "fig9" => {
            c.strategy = Strategy::DetuningGate;
            c.params = ProtocolParams {
                kappa: 4.0,
                gamma: 0.01,
                delta_l: 27.0 * PI,
                storage_time: 4.0,
                ..ProtocolParams::default()
            };
            c.g_critical = true;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (expected one of {})",
                PRESET_NAMES.join(", ")
            )))
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap();
            assert_eq!(c.label, name);
            if !matches!(name, "fig3" | "fig4") {
                c.protocol().unwrap();
            }
        }
        assert!(preset("fig10").is_err());
    }

    #[test]
    fn threshold_grid_contains_quoted_points() {
        let c = preset("fig3").unwrap();
        let v = c.values.unwrap();
        assert!(v.contains(&1.0) && v.contains(&20.0) && v.contains(&50.0));
        assert_eq!(v[0], 0.1);
    }

    #[test]
    fn fig9_is_critically_damped() {
        let p = preset("fig9").unwrap().resolved_params();
        assert!((p.g - 1.995).abs() < 1e-12);
    }
}
