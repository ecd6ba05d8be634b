//! Measurable linear regression `z = m^T Theta` built online from `y`
//! through the q-chain and swapping-lemma product channels, plus residual
//! oracles for the differential identity it is derived from.
//!
//! For the worked example (constant amplitude, harmonic frequency
//! generator) the unknowns stack into the monomial vector
//! `Theta = (theta2/theta1, theta1^2, theta1*theta2, theta2^2,
//! theta2^3/theta1)`, the unique stacking that balances the filtered
//! identity after dividing through by `theta1`. That is why `theta1 =
//! omega(0) != 0` is a hard model assumption.

use nalgebra::{Matrix2, Vector5};

use crate::filtering::lag_deriv;
use crate::generators::{SimTruth, TruthModel};
use crate::ode;
use crate::{Error, Result};

/// Scalar regressand and 5-vector regressor at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionSample {
    pub t: f64,
    pub z: f64,
    pub m: Vector5<f64>,
}

/// Monomial re-parameterization of the generator initial condition.
pub fn monomials_of(theta1: f64, theta2: f64) -> Result<Vector5<f64>> {
    if theta1 == 0.0 {
        return Err(Error::Config(
            "monomial stacking divides by theta1; theta1 must be nonzero".into(),
        ));
    }
    Ok(Vector5::new(
        theta2 / theta1,
        theta1 * theta1,
        theta1 * theta2,
        theta2 * theta2,
        theta2 * theta2 * theta2 / theta1,
    ))
}

/// Number of lag states in the regressor channel bank.
///
/// Two single-lag channels and six double-lag channels:
/// `F1[Phi11(2q2+q1)]`, `F1[Phi12(2q2+q1)]`, `F2[Phi21(q2+q1)]`,
/// `F2[Phi22(q2+q1)]` and the four cubic channels `F2[Phi21^3 y]`,
/// `F2[3 Phi21^2 Phi22 y]`, `F2[3 Phi21 Phi22^2 y]`, `F2[Phi22^3 y]`,
/// with `F1 = 1/(p+1)` and `F2 = 1/(p+1)^2`.
pub const CHANNEL_STATES: usize = 14;

/// Inputs of the eight filter channels, in state-layout order.
#[inline]
fn channel_inputs(phi: &Matrix2<f64>, q1: f64, q2: f64, y: f64) -> [f64; 8] {
    let (p11, p12, p21, p22) = (phi[(0, 0)], phi[(0, 1)], phi[(1, 0)], phi[(1, 1)]);
    [
        p11 * (2.0 * q2 + q1),
        p12 * (2.0 * q2 + q1),
        p21 * (q2 + q1),
        p22 * (q2 + q1),
        p21 * p21 * p21 * y,
        3.0 * p21 * p21 * p22 * y,
        3.0 * p21 * p22 * p22 * y,
        p22 * p22 * p22 * y,
    ]
}

/// State derivative of the channel bank given pointwise signals.
#[inline]
pub fn channel_derivs(
    states: &[f64; CHANNEL_STATES],
    phi: &Matrix2<f64>,
    q1: f64,
    q2: f64,
    y: f64,
) -> [f64; CHANNEL_STATES] {
    let u = channel_inputs(phi, q1, q2, y);
    [
        lag_deriv(states[0], u[0]),
        lag_deriv(states[1], u[1]),
        lag_deriv(states[2], u[2]),
        lag_deriv(states[3], states[2]),
        lag_deriv(states[4], u[3]),
        lag_deriv(states[5], states[4]),
        lag_deriv(states[6], u[4]),
        lag_deriv(states[7], states[6]),
        lag_deriv(states[8], u[5]),
        lag_deriv(states[9], states[8]),
        lag_deriv(states[10], u[6]),
        lag_deriv(states[11], states[10]),
        lag_deriv(states[12], u[7]),
        lag_deriv(states[13], states[12]),
    ]
}

/// Assemble `(z, m)` from the channel states and the pointwise terms.
#[inline]
pub fn assemble_sample(
    states: &[f64; CHANNEL_STATES],
    phi: &Matrix2<f64>,
    q2: f64,
    gamma: f64,
    t: f64,
) -> RegressionSample {
    let (p21, p22) = (phi[(1, 0)], phi[(1, 1)]);
    let z = p21 * q2 + gamma * states[0] - gamma * states[3];
    let m = Vector5::new(
        -p22 * q2 - gamma * states[1] + gamma * states[5],
        -states[7],
        -states[9],
        -states[11],
        -states[13],
    );
    RegressionSample { t, z, m }
}

/// Lag states of all regressor channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressorChannels {
    pub states: [f64; CHANNEL_STATES],
}

impl Default for RegressorChannels {
    fn default() -> Self {
        Self { states: [0.0; CHANNEL_STATES] }
    }
}

impl RegressorChannels {
    /// One ZOH RK4 step of all channels; returns the sample at `t + dt`
    /// assembled from the advanced states.
    ///
    /// The simulation harness advances these states inside its coupled
    /// integrator instead, for stage-consistent channel inputs.
    pub fn regressor_step(
        &mut self,
        phi: &Matrix2<f64>,
        q1: f64,
        q2: f64,
        y: f64,
        gamma: f64,
        dt: f64,
        t: f64,
    ) -> Result<RegressionSample> {
        debug_assert!(gamma > 0.0 && dt > 0.0);
        if !(q1.is_finite() && q2.is_finite() && y.is_finite()) {
            return Err(Error::NonFinite { context: "regressor inputs", t });
        }
        self.states = ode::rk4_step(t, &self.states, dt, |_, s| channel_derivs(s, phi, q1, q2, y));
        Ok(assemble_sample(&self.states, phi, q2, gamma, t + dt))
    }

    pub fn sample(&self, phi: &Matrix2<f64>, q2: f64, gamma: f64, t: f64) -> RegressionSample {
        assemble_sample(&self.states, phi, q2, gamma, t)
    }
}

/// Pointwise residual of the unfiltered differential identity
/// `a^2 w' y'' = (a a'' w' - 2 a'^2 w' - a^2 w'^3 - a a' w'') y
///            + (2 a a' w' + a^2 w'') y'`
/// (amplitude `a`, frequency argument `w`). Identically zero along any
/// generator-produced trajectory, including zero crossings of `w'` or `a`.
pub fn residual_eq9(truth: &SimTruth) -> f64 {
    let (a, ad1, ad2) = (truth.alpha, truth.alpha_d1, truth.alpha_d2);
    let (w1, w2) = (truth.omega_d1, truth.omega_d2);
    let lhs = a * a * w1 * truth.y_d2;
    let coeff_y = a * ad2 * w1 - 2.0 * ad1 * ad1 * w1 - a * a * w1 * w1 * w1 - a * ad1 * w2;
    let coeff_yd = 2.0 * a * ad1 * w1 + a * a * w2;
    lhs - (coeff_y * truth.y + coeff_yd * truth.y_d1)
}

/// Time-varying coefficients of the twice-filtered identity.
///
/// `a = alpha^2 omega'`, with `a_dot` and `a_ddot` its derivatives, and
/// `c_y` the `y`-coefficient of the unfiltered identity.
#[derive(Debug, Clone, Copy)]
struct IdentityCoeffs {
    a: f64,
    a_dot: f64,
    a_ddot: f64,
    c_y: f64,
}

impl IdentityCoeffs {
    fn from_truth(truth: &SimTruth) -> Self {
        let (al, ad1, ad2) = (truth.alpha, truth.alpha_d1, truth.alpha_d2);
        let (w1, w2, w3) = (truth.omega_d1, truth.omega_d2, truth.omega_d3);
        Self {
            a: al * al * w1,
            a_dot: 2.0 * al * ad1 * w1 + al * al * w2,
            a_ddot: 2.0 * ad1 * ad1 * w1 + 2.0 * al * ad2 * w1 + 4.0 * al * ad1 * w2
                + al * al * w3,
            c_y: al * ad2 * w1 - 2.0 * ad1 * ad1 * w1 - al * al * w1 * w1 * w1 - al * ad1 * w2,
        }
    }
}

/// Filter bank evaluating the residual of the general twice-filtered
/// identity
/// `a q2 - 2 L[a' q2] + L^2[a'' q2]
///  = L^2[c_y y] + L[a' q1] - L^2[a'' q1]`,
/// where `L = 1/(p+1)` and all coefficient signals come from the analytic
/// truth. The residual is a pure filter transient and decays like
/// `e^{-t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eq14Bank {
    // [x1, x2] q-chain, then L[a' q2], L^2[a'' q2] (2), L^2[c_y y] (2),
    // L[a' q1], L^2[a'' q1] (2)
    states: [f64; 10],
}

impl Default for Eq14Bank {
    fn default() -> Self {
        Self { states: [0.0; 10] }
    }
}

impl Eq14Bank {
    pub fn step(&mut self, model: &TruthModel, t: f64, dt: f64) {
        self.states = ode::rk4_step(t, &self.states, dt, |t, s| {
            let truth = model.truth_at(t);
            let co = IdentityCoeffs::from_truth(&truth);
            let q1 = truth.y - s[0];
            let q2 = q1 - s[1];
            [
                q1,
                q2,
                lag_deriv(s[2], co.a_dot * q2),
                lag_deriv(s[3], co.a_ddot * q2),
                lag_deriv(s[4], s[3]),
                lag_deriv(s[5], co.c_y * truth.y),
                lag_deriv(s[6], s[5]),
                lag_deriv(s[7], co.a_dot * q1),
                lag_deriv(s[8], co.a_ddot * q1),
                lag_deriv(s[9], s[8]),
            ]
        });
    }

    /// Residual LHS - RHS at the bank's current time.
    pub fn residual(&self, truth: &SimTruth) -> f64 {
        let co = IdentityCoeffs::from_truth(truth);
        let s = &self.states;
        let q1 = truth.y - s[0];
        let q2 = q1 - s[1];
        let lhs = co.a * q2 - 2.0 * s[2] + s[4];
        let rhs = s[6] + s[7] - s[9];
        lhs - rhs
    }
}

/// Filter bank for the constant-amplitude reduction of the identity:
/// `w' q2 = L[w'' (2 q2 + q1)] - L^2[w''' (q2 + q1) + w'^3 y]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Eq19Bank {
    // [x1, x2] q-chain, then L[w''(2q2+q1)], L^2[w'''(q2+q1) + w'^3 y] (2)
    states: [f64; 5],
}

impl Eq19Bank {
    pub fn step(&mut self, model: &TruthModel, t: f64, dt: f64) {
        self.states = ode::rk4_step(t, &self.states, dt, |t, s| {
            let truth = model.truth_at(t);
            let q1 = truth.y - s[0];
            let q2 = q1 - s[1];
            let (w1, w2, w3) = (truth.omega_d1, truth.omega_d2, truth.omega_d3);
            [
                q1,
                q2,
                lag_deriv(s[2], w2 * (2.0 * q2 + q1)),
                lag_deriv(s[3], w3 * (q2 + q1) + w1 * w1 * w1 * truth.y),
                lag_deriv(s[4], s[3]),
            ]
        });
    }

    pub fn residual(&self, truth: &SimTruth) -> f64 {
        let s = &self.states;
        let q1 = truth.y - s[0];
        let q2 = q1 - s[1];
        truth.omega_d1 * q2 - s[2] + s[4]
    }
}
