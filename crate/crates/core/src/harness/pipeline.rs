//! The single-clock simulation loop.
//!
//! Truth, fundamental matrix, q-chain, regressor channels and the DREM
//! extension advance as one coupled RK4 system so every filter sees
//! stage-consistent inputs; only the gradient identifier steps separately
//! (its coefficients `Delta`, `curly_Y` are frozen over one step, with
//! stability sub-division). One global `dt`, no interpolation anywhere.

use nalgebra::{Matrix2, Matrix5, Vector5};

use crate::drem::{mix, symmetrize, MixedRegression};
use crate::generators::{SimTruth, TruthModel};
use crate::identifier::{
    reconstruct_omega, recover_theta, FrequencyEstimate, GradientIdentifier, ValidityGate,
};
use crate::ode;
use crate::regression::{assemble_sample, channel_derivs, monomials_of, RegressionSample};
use crate::{Error, Result};

use super::config::ScenarioConfig;

// Coupled state layout.
const PHI: usize = 0; // 4 entries, row-major
const QCH: usize = 4; // 2 entries
const CHN: usize = 6; // 14 entries
const YV: usize = 20; // 5 entries
const OM: usize = 25; // 25 entries, column-major
const DIM: usize = 50;

/// Tolerance argument for [`recover_theta`] during a run.
const RECOVERY_EPSILON: f64 = 1e-6;

/// One record per decimated step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub y: f64,
    pub omega_true: f64,
    pub omega_hat: f64,
    pub theta_hat: [f64; 5],
    pub theta1_hat: f64,
    pub theta2_hat: f64,
    pub delta: f64,
    /// `z - m^T Theta*` with the scenario's true monomial vector.
    pub residual_z: f64,
    pub q1: f64,
    pub q2: f64,
}

/// Everything an observer may inspect after each step.
pub struct StepView<'a> {
    pub t: f64,
    pub truth: &'a SimTruth,
    /// RK4-integrated fundamental matrix (vs. `truth.phi_mat`, the closed form).
    pub phi: Matrix2<f64>,
    pub q1: f64,
    pub q2: f64,
    pub sample: &'a RegressionSample,
    pub drem_y: &'a Vector5<f64>,
    pub drem_omega: &'a Matrix5<f64>,
    pub mixed: &'a MixedRegression,
    pub theta_hat: &'a Vector5<f64>,
    pub estimate: &'a FrequencyEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrajectoryRecord>,
    /// Steps that needed gradient-stability sub-division.
    pub substepped: u64,
    pub final_estimate: FrequencyEstimate,
}

fn coupled_derivs(
    t: f64,
    x: &[f64; DIM],
    model: &TruthModel,
    gamma: f64,
    lambda: f64,
    scale: f64,
) -> [f64; DIM] {
    let mut d = [0.0f64; DIM];
    let phi = Matrix2::new(x[PHI], x[PHI + 1], x[PHI + 2], x[PHI + 3]);
    let y = model.measurement(t);
    let q1 = y - x[QCH];
    let q2 = q1 - x[QCH + 1];

    // Phi' = Gamma Phi with Gamma = [0 1; -gamma 0]
    d[PHI] = x[PHI + 2];
    d[PHI + 1] = x[PHI + 3];
    d[PHI + 2] = -gamma * x[PHI];
    d[PHI + 3] = -gamma * x[PHI + 1];

    d[QCH] = q1;
    d[QCH + 1] = q2;

    let ch: &[f64; 14] = x[CHN..CHN + 14].try_into().unwrap();
    let dch = channel_derivs(ch, &phi, q1, q2, y);
    d[CHN..CHN + 14].copy_from_slice(&dch);

    let sample = assemble_sample(ch, &phi, q2, gamma, t);
    let z = sample.z / scale;
    let m = sample.m / scale;
    for i in 0..5 {
        d[YV + i] = lambda * (m[i] * z - x[YV + i]);
    }
    for j in 0..5 {
        for i in 0..5 {
            d[OM + 5 * j + i] = lambda * (m[i] * m[j] - x[OM + 5 * j + i]);
        }
    }
    d
}

/// Run a scenario, invoking `observer` after every `dt` step.
///
/// Deterministic: identical configs produce bit-identical trajectories.
pub fn run_with_observer(
    config: &ScenarioConfig,
    mut observer: impl FnMut(&StepView<'_>),
) -> Result<(u64, FrequencyEstimate)> {
    let config = config.clone().validated()?;
    let model = config.truth_model();
    let gamma = config.gamma;
    let (lambda, beta, dt) = (config.lambda, config.beta, config.dt);

    let mut x = [0.0f64; DIM];
    // Phi(0) = I
    x[PHI] = 1.0;
    x[PHI + 3] = 1.0;

    let mut scale = 1.0f64;
    let mut identifier = GradientIdentifier::default();
    let mut gate = ValidityGate::default();
    let mut estimate = FrequencyEstimate::default();

    let steps = (config.t_end / dt).round() as u64;
    for n in 0..steps {
        let t = n as f64 * dt;
        x = ode::rk4_step(t, &x, dt, |t, x| coupled_derivs(t, x, &model, gamma, lambda, scale));
        let t = (n + 1) as f64 * dt;

        // symmetry re-enforcement on the Omega block
        {
            let omega = Matrix5::from_column_slice(&x[OM..OM + 25]);
            let sym = symmetrize(&omega);
            x[OM..OM + 25].copy_from_slice(sym.as_slice());
        }

        let phi = Matrix2::new(x[PHI], x[PHI + 1], x[PHI + 2], x[PHI + 3]);
        let truth = model.truth_at(t);
        let q1 = truth.y - x[QCH];
        let q2 = q1 - x[QCH + 1];
        let ch: &[f64; 14] = x[CHN..CHN + 14].try_into().unwrap();
        let mut sample = assemble_sample(ch, &phi, q2, gamma, t);
        if config.prescale {
            scale = scale.max(sample.m.amax());
            sample.z /= scale;
            sample.m /= scale;
        }
        let drem_y = Vector5::from_column_slice(&x[YV..YV + 5]);
        let drem_omega = Matrix5::from_column_slice(&x[OM..OM + 25]);
        let mixed = mix(&crate::drem::DremState { y: drem_y, omega: drem_omega });

        identifier.gradient_step(&mixed, beta, dt);
        let valid = gate.update(t, mixed.delta);
        if let Ok((t1, t2)) = recover_theta(&identifier.theta_hat, RECOVERY_EPSILON) {
            estimate.theta1_hat = t1;
            estimate.theta2_hat = t2;
        }
        estimate.omega_hat = reconstruct_omega(&phi, estimate.theta1_hat, estimate.theta2_hat);
        estimate.valid = valid;

        if !x.iter().all(|v| v.is_finite()) || !mixed.delta.is_finite() {
            return Err(Error::Diverged {
                t,
                details: format!(
                    "state norm {:e}, |Delta| = {:e}",
                    x.iter().fold(0.0f64, |acc, v| acc.max(v.abs())),
                    mixed.delta.abs()
                ),
            });
        }

        observer(&StepView {
            t,
            truth: &truth,
            phi,
            q1,
            q2,
            sample: &sample,
            drem_y: &drem_y,
            drem_omega: &drem_omega,
            mixed: &mixed,
            theta_hat: &identifier.theta_hat,
            estimate: &estimate,
        });
    }
    Ok((identifier.substepped, estimate))
}

/// Run a scenario and collect decimated trajectory records.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput> {
    let config = config.clone().validated()?;
    let theta_star = monomials_of(config.theta1, config.theta2)?;
    let stride = (config.decimation / config.dt).round().max(1.0) as u64;

    let mut records = Vec::new();
    let mut step_index = 0u64;
    let (substepped, final_estimate) = run_with_observer(&config, |view| {
        step_index += 1;
        if step_index % stride != 0 {
            return;
        }
        records.push(TrajectoryRecord {
            t: view.t,
            y: view.truth.y,
            omega_true: view.truth.omega,
            omega_hat: view.estimate.omega_hat,
            theta_hat: [
                view.theta_hat[0],
                view.theta_hat[1],
                view.theta_hat[2],
                view.theta_hat[3],
                view.theta_hat[4],
            ],
            theta1_hat: view.estimate.theta1_hat,
            theta2_hat: view.estimate.theta2_hat,
            delta: view.mixed.delta,
            residual_z: view.sample.z - view.sample.m.dot(&theta_star),
            q1: view.q1,
            q2: view.q2,
        });
    })?;
    Ok(RunOutput { records, substepped, final_estimate })
}
