//! Oracle suite over a configured scenario: every derived identity in the
//! chain is checked against its stated bound and reported pass/fail.

use crate::generators::TruthModel;
use crate::regression::{monomials_of, residual_eq9, Eq14Bank};
use crate::Result;

use super::config::ScenarioConfig;
use super::pipeline::run_with_observer;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    /// Worst measured value of the checked quantity.
    pub measured: f64,
    /// The bound it must satisfy.
    pub bound: f64,
}

impl CheckResult {
    fn from_bound(name: &'static str, measured: f64, bound: f64) -> Self {
        Self { name, pass: measured <= bound, measured, bound }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Max of `|residual_eq9| / (1e-8 * max(1, |lhs|))` over `[0, horizon]`.
pub fn eq9_worst_ratio(model: &TruthModel, horizon: f64, dt: f64) -> f64 {
    let steps = (horizon / dt).round() as usize;
    let mut worst = 0.0f64;
    for n in 0..=steps {
        let truth = model.truth_at(n as f64 * dt);
        let scale = (truth.alpha * truth.alpha * truth.omega_d1 * truth.y_d2).abs().max(1.0);
        worst = worst.max(residual_eq9(&truth).abs() / (1e-8 * scale));
    }
    worst
}

/// Outcome of the filtered-identity decay check.
pub struct DecayCheck {
    /// Max over the checked window of residual / (C e^{-0.9t} + floor).
    pub worst_ratio: f64,
    /// Max `|residual|` for `t >= 10` against the absolute floor alone.
    pub late_worst: f64,
    pub floor: f64,
    pub fitted_c: f64,
}

/// Run the twice-filtered identity bank over `[0, horizon]`, fit the
/// transient constant on `[0, 5]` and check decay plus floor after that.
pub fn eq14_decay_check(model: &TruthModel, horizon: f64, dt: f64) -> DecayCheck {
    let mut bank = Eq14Bank::default();
    let steps = (horizon / dt).round() as usize;
    let mut fitted_c = 0.0f64;
    let mut sup_lhs = 0.0f64;
    let mut tail: Vec<(f64, f64)> = Vec::new();
    for n in 0..steps {
        let t = n as f64 * dt;
        bank.step(model, t, dt);
        let t1 = t + dt;
        let truth = model.truth_at(t1);
        let r = bank.residual(&truth).abs();
        sup_lhs = sup_lhs.max((truth.alpha * truth.alpha * truth.omega_d1 * truth.y).abs());
        if t1 <= 5.0 {
            fitted_c = fitted_c.max(r * (0.9 * t1).exp());
        } else {
            tail.push((t1, r));
        }
    }
    let floor = 1e-6 * (1.0 + sup_lhs);
    let mut worst_ratio = 0.0f64;
    let mut late_worst = 0.0f64;
    for (t, r) in tail {
        worst_ratio = worst_ratio.max(r / (fitted_c * (-0.9 * t).exp() + floor));
        if t >= 10.0 {
            late_worst = late_worst.max(r);
        }
    }
    DecayCheck { worst_ratio, late_worst, floor, fitted_c }
}

/// Statistics gathered along one pipeline run.
pub struct PipelineStats {
    pub fitted_c: f64,
    pub sup_z: f64,
    /// Max `|z - m^T Theta*|` for `t >= 10`.
    pub late_residual: f64,
    /// Max over the whole run of `|z - m^T Theta*| - C e^{-0.9 t}`.
    pub residual_over_decay: f64,
    /// Max `|Y - Omega Theta*|_inf / (1 + |Y|_inf)`.
    pub drem_gap: f64,
    /// Max `|Phi_rk4 - Phi_closed|_inf`.
    pub phi_gap: f64,
}

pub fn pipeline_stats(config: &ScenarioConfig, horizon: f64) -> Result<PipelineStats> {
    let mut cfg = config.clone();
    cfg.t_end = horizon;
    let theta_star = monomials_of(cfg.theta1, cfg.theta2)?;
    let mut fitted_c = 0.0f64;
    let mut sup_z = 0.0f64;
    let mut late: Vec<(f64, f64)> = Vec::new();
    let mut drem_gap = 0.0f64;
    let mut phi_gap = 0.0f64;
    run_with_observer(&cfg, |view| {
        let r = (view.sample.z - view.sample.m.dot(&theta_star)).abs();
        sup_z = sup_z.max(view.sample.z.abs());
        if view.t <= 5.0 {
            fitted_c = fitted_c.max(r * (0.9 * view.t).exp());
        } else {
            late.push((view.t, r));
        }
        let gap = (view.drem_y - view.drem_omega * theta_star).amax();
        drem_gap = drem_gap.max(gap / (1.0 + view.drem_y.amax()));
        phi_gap = phi_gap.max((view.phi - view.truth.phi_mat).amax());
    })?;
    let mut late_residual = 0.0f64;
    let mut residual_over_decay = 0.0f64;
    for (t, r) in late {
        residual_over_decay = residual_over_decay.max(r - fitted_c * (-0.9 * t).exp());
        if t >= 10.0 {
            late_residual = late_residual.max(r);
        }
    }
    Ok(PipelineStats { fitted_c, sup_z, late_residual, residual_over_decay, drem_gap, phi_gap })
}

/// Run the full oracle suite on a configured scenario.
pub fn validate(config: &ScenarioConfig) -> Result<ValidationReport> {
    let config = config.clone().validated()?;
    let model = config.truth_model();
    let mut checks = Vec::new();

    checks.push(CheckResult::from_bound(
        "eq9 pointwise identity (residual / 1e-8-scaled bound)",
        eq9_worst_ratio(&model, 20.0, 1e-3),
        1.0,
    ));

    let decay = eq14_decay_check(&model, 20.0, 1e-3);
    checks.push(CheckResult::from_bound(
        "eq14 filtered identity decays as C e^{-0.9 t} + floor",
        decay.worst_ratio,
        1.0,
    ));
    checks.push(CheckResult::from_bound(
        "eq14 filtered identity floor for t >= 10 s",
        decay.late_worst,
        decay.floor,
    ));

    let stats = pipeline_stats(&config, 20.0)?;
    let floor = 1e-6 * (1.0 + stats.sup_z);
    checks.push(CheckResult::from_bound(
        "regression residual |z - m^T Theta*| decay + floor",
        stats.residual_over_decay,
        floor,
    ));
    checks.push(CheckResult::from_bound(
        "regression residual floor for t >= 10 s",
        stats.late_residual,
        floor,
    ));
    checks.push(CheckResult::from_bound(
        "DREM exact-data identity |Y - Omega Theta*| / (1 + |Y|)",
        stats.drem_gap,
        1e-8,
    ));
    checks.push(CheckResult::from_bound(
        "fundamental matrix RK4 vs closed form",
        stats.phi_gap,
        1e-8,
    ));

    Ok(ValidationReport { checks })
}
