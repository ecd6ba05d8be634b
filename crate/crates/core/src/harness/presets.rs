//! Built-in scenarios reproducing the reference simulation study. The
//! same configurations ship as files under `presets/`.
//!
//! All presets share lambda = 1, beta = 1e23, constant amplitude 1, phase
//! 0.5 rad, dt = 1e-4 s, t_end = 30 s.

use super::config::{AlphaConfig, ScenarioConfig};

pub const PRESET_NAMES: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

fn base(gamma: f64, theta1: f64, theta2: f64) -> ScenarioConfig {
    ScenarioConfig {
        gamma,
        theta1,
        theta2,
        alpha: AlphaConfig::Constant { alpha_value: 1.0 },
        phase: 0.5,
        lambda: 1.0,
        beta: 1e23,
        dt: 1e-4,
        t_end: 30.0,
        decimation: 0.01,
        prescale: false,
    }
}

/// Look up a preset by figure name.
///
/// fig1/fig2/fig4/fig7 use initial condition (2, 1) with gamma = 4;
/// fig3 uses (4, 2) with gamma = 4; fig5 uses (4, 2) with the slower
/// generator gamma = 1; fig6 uses (2, 1) with gamma = 1.
pub fn preset_config(name: &str) -> Option<ScenarioConfig> {
    let cfg = match name {
        "fig1" | "fig2" | "fig4" | "fig7" => base(4.0, 2.0, 1.0),
        "fig3" => base(4.0, 4.0, 2.0),
        "fig5" => base(1.0, 4.0, 2.0),
        "fig6" => base(1.0, 2.0, 1.0),
        _ => return None,
    };
    Some(cfg)
}
