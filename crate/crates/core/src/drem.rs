//! Dynamic regressor extension and mixing.
//!
//! The scalar regression `z = m^T Theta` is extended by its own regressor
//! (`Y' = -lambda Y + lambda m z`, `Omega' = -lambda Omega + lambda m m^T`)
//! and then mixed with the adjugate of `Omega`, which decouples the five
//! unknowns into scalar regressions `curly_Y_i = Delta * Theta_i` with
//! `Delta = det Omega`.

use nalgebra::{Matrix5, Vector5};

use crate::ode;
use crate::regression::RegressionSample;

/// Filtered outer-product extension pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DremState {
    pub y: Vector5<f64>,
    pub omega: Matrix5<f64>,
}

impl Default for DremState {
    fn default() -> Self {
        Self { y: Vector5::zeros(), omega: Matrix5::zeros() }
    }
}

/// Mixed (decoupled) regression: `curly_y = adj(Omega) Y`, `delta = det Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedRegression {
    pub curly_y: Vector5<f64>,
    pub delta: f64,
}

/// State derivatives of the extension filters.
#[inline]
pub fn drem_derivs(
    y: &Vector5<f64>,
    omega: &Matrix5<f64>,
    m: &Vector5<f64>,
    z: f64,
    lambda: f64,
) -> (Vector5<f64>, Matrix5<f64>) {
    (lambda * (m * z - y), lambda * (m * m.transpose() - omega))
}

/// One ZOH RK4 step of both extension ODEs; `Omega` is re-symmetrized
/// afterwards so roundoff drift cannot leave the PSD cone.
pub fn drem_step(state: &DremState, sample: &RegressionSample, lambda: f64, dt: f64) -> DremState {
    debug_assert!(lambda > 0.0 && dt > 0.0);
    let mut flat = [0.0f64; 30];
    flat[..5].copy_from_slice(state.y.as_slice());
    flat[5..].copy_from_slice(state.omega.as_slice());
    let out = ode::rk4_step(sample.t, &flat, dt, |_, s| {
        let y = Vector5::from_column_slice(&s[..5]);
        let omega = Matrix5::from_column_slice(&s[5..]);
        let (dy, domega) = drem_derivs(&y, &omega, &sample.m, sample.z, lambda);
        let mut d = [0.0f64; 30];
        d[..5].copy_from_slice(dy.as_slice());
        d[5..].copy_from_slice(domega.as_slice());
        d
    });
    let y = Vector5::from_column_slice(&out[..5]);
    let omega = Matrix5::from_column_slice(&out[5..]);
    DremState { y, omega: symmetrize(&omega) }
}

/// `(Omega + Omega^T) / 2`.
pub fn symmetrize(m: &Matrix5<f64>) -> Matrix5<f64> {
    0.5 * (m + m.transpose())
}

/// Cofactor-transpose adjugate; satisfies `M adj(M) = det(M) I` for every
/// `M`, singular included, so the mixing never needs to branch on rank.
pub fn adjugate(m: &Matrix5<f64>) -> Matrix5<f64> {
    let mut adj = Matrix5::zeros();
    for i in 0..5 {
        for j in 0..5 {
            // adj[(i, j)] is the (j, i) cofactor
            let minor = m.clone_owned().remove_row(j).remove_column(i);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(i, j)] = sign * minor.determinant();
        }
    }
    adj
}

/// Reduce the extension pair to the five decoupled scalar regressions.
pub fn mix(state: &DremState) -> MixedRegression {
    MixedRegression {
        curly_y: adjugate(&state.omega) * state.y,
        delta: state.omega.determinant(),
    }
}
