//! Exosystems producing the frequency `omega(t)` and the amplitude
//! `alpha(t)`, their fundamental matrices and analytic derivative stacks,
//! and the synthesized measurement `y(t) = alpha * sin(omega + phase)`.
//!
//! Both signals are outputs of autonomous linear generators with known
//! dynamics; all the unknowns live in the initial conditions, which is
//! what makes the downstream regression possible.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::{Error, Result};

/// A linear generator `x' = G x`, signal = `h^T x`, started at `x0`.
///
/// Used for the amplitude exosystem; the frequency exosystem of the worked
/// example has its own dedicated [`HarmonicFrequencySpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub output: DVector<f64>,
    pub system: DMatrix<f64>,
    pub initial: DVector<f64>,
}

impl GeneratorSpec {
    pub fn new(output: DVector<f64>, system: DMatrix<f64>, initial: DVector<f64>) -> Result<Self> {
        let n = output.len();
        if n == 0 {
            return Err(Error::Config("generator dimension must be at least 1".into()));
        }
        if system.nrows() != n || system.ncols() != n || initial.len() != n {
            return Err(Error::Config(format!(
                "generator dimension mismatch: h is {n}, G is {}x{}, x0 is {}",
                system.nrows(),
                system.ncols(),
                initial.len()
            )));
        }
        let finite = output.iter().chain(system.iter()).chain(initial.iter());
        if finite.clone().any(|v| !v.is_finite()) {
            return Err(Error::Config("generator entries must be finite".into()));
        }
        Ok(Self { output, system, initial })
    }

    /// Harmonic generator `G = [0 1; -gamma 0]`, `h = [1 0]`, so the output
    /// starts at `value0` with slope `slope0`.
    pub fn harmonic(gamma: f64, value0: f64, slope0: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Config(format!("harmonic generator needs gamma > 0, got {gamma}")));
        }
        Self::new(
            DVector::from_vec(vec![1.0, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -gamma, 0.0]),
            DVector::from_vec(vec![value0, slope0]),
        )
    }

    /// Signal value and its first two derivatives at time `t`.
    pub fn signal_at(&self, t: f64) -> (f64, f64, f64) {
        let state = (self.system.clone() * t).exp() * &self.initial;
        let d1_state = &self.system * &state;
        let d2_state = &self.system * &d1_state;
        (
            self.output.dot(&state),
            self.output.dot(&d1_state),
            self.output.dot(&d2_state),
        )
    }
}

/// The worked example's frequency generator: `Gamma = [0 1; -gamma 0]`,
/// `h = [1 0]`, unknown initial condition `(theta1, theta2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicFrequencySpec {
    pub gamma: f64,
    pub theta1: f64,
    pub theta2: f64,
}

impl HarmonicFrequencySpec {
    pub fn new(gamma: f64, theta1: f64, theta2: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be positive and finite, got {gamma}")));
        }
        if !theta1.is_finite() || !theta2.is_finite() {
            return Err(Error::Config("theta1, theta2 must be finite".into()));
        }
        if theta1 == 0.0 {
            // The regression stacking divides by theta1 = omega(0).
            return Err(Error::Config(
                "theta1 must be nonzero: the regression parameter stacking divides by theta1"
                    .into(),
            ));
        }
        Ok(Self { gamma, theta1, theta2 })
    }

    pub fn system_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -self.gamma, 0.0)
    }
}

/// Amplitude model: either an unknown constant or the output of a linear
/// generator.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaMode {
    Constant(f64),
    Generator(GeneratorSpec),
}

impl AlphaMode {
    pub fn signal_at(&self, t: f64) -> (f64, f64, f64) {
        match self {
            AlphaMode::Constant(c) => (*c, 0.0, 0.0),
            AlphaMode::Generator(spec) => spec.signal_at(t),
        }
    }
}

/// Ground-truth signal bundle at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimTruth {
    pub t: f64,
    pub omega: f64,
    pub omega_d1: f64,
    pub omega_d2: f64,
    pub omega_d3: f64,
    pub alpha: f64,
    pub alpha_d1: f64,
    pub alpha_d2: f64,
    pub y: f64,
    pub y_d1: f64,
    pub y_d2: f64,
    /// Fundamental matrix of the frequency generator, `Phi(0) = I`.
    pub phi_mat: Matrix2<f64>,
}

/// Closed-form truth evaluator for the worked example: harmonic frequency
/// generator, amplitude constant or from its own generator.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthModel {
    pub omega_spec: HarmonicFrequencySpec,
    pub alpha: AlphaMode,
    pub phase: f64,
}

impl TruthModel {
    pub fn new(omega_spec: HarmonicFrequencySpec, alpha: AlphaMode, phase: f64) -> Self {
        Self { omega_spec, alpha, phase }
    }

    /// Measurement only; what an online consumer would see.
    pub fn measurement(&self, t: f64) -> f64 {
        self.truth_at(t).y
    }

    pub fn truth_at(&self, t: f64) -> SimTruth {
        let gamma = self.omega_spec.gamma;
        let phi_mat = closed_form_phi_harmonic(gamma, t);
        let (th1, th2) = (self.omega_spec.theta1, self.omega_spec.theta2);

        // omega = h^T Phi xi0 and the derivative stack h^T Gamma^k Phi xi0;
        // for the harmonic generator Gamma^2 = -gamma I.
        let omega = phi_mat[(0, 0)] * th1 + phi_mat[(0, 1)] * th2;
        let omega_d1 = phi_mat[(1, 0)] * th1 + phi_mat[(1, 1)] * th2;
        let omega_d2 = -gamma * omega;
        let omega_d3 = -gamma * omega_d1;

        let (alpha, alpha_d1, alpha_d2) = self.alpha.signal_at(t);

        let s = (omega + self.phase).sin();
        let c = (omega + self.phase).cos();
        let y = alpha * s;
        let y_d1 = alpha_d1 * s + alpha * omega_d1 * c;
        let y_d2 = alpha_d2 * s + 2.0 * alpha_d1 * omega_d1 * c - alpha * omega_d1 * omega_d1 * s
            + alpha * omega_d2 * c;

        SimTruth {
            t,
            omega,
            omega_d1,
            omega_d2,
            omega_d3,
            alpha,
            alpha_d1,
            alpha_d2,
            y,
            y_d1,
            y_d2,
            phi_mat,
        }
    }
}

/// One RK4 step of the fundamental-matrix ODE `Phi' = Gamma Phi`.
///
/// `Phi(0) = I` is the caller's initialization.
pub fn fundamental_matrix_step(
    phi: &DMatrix<f64>,
    gamma: &DMatrix<f64>,
    dt: f64,
) -> Result<DMatrix<f64>> {
    debug_assert!(dt > 0.0);
    let k1 = gamma * phi;
    let k2 = gamma * (phi + 0.5 * dt * &k1);
    let k3 = gamma * (phi + 0.5 * dt * &k2);
    let k4 = gamma * (phi + dt * &k3);
    let out = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "fundamental matrix integration", t: f64::NAN });
    }
    Ok(out)
}

/// Same step specialized to the 2x2 frequency generator, allocation-free.
pub fn fundamental_matrix_step_2x2(phi: &Matrix2<f64>, gamma: &Matrix2<f64>, dt: f64) -> Matrix2<f64> {
    let k1 = gamma * phi;
    let k2 = gamma * (phi + 0.5 * dt * k1);
    let k3 = gamma * (phi + 0.5 * dt * k2);
    let k4 = gamma * (phi + dt * k3);
    phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Matrix exponential of `Gamma t` for `Gamma = [0 1; -gamma 0]`:
/// `[[cos(w t), sin(w t)/w], [-w sin(w t), cos(w t)]]` with `w = sqrt(gamma)`.
///
/// Serves as the oracle for [`fundamental_matrix_step`].
pub fn closed_form_phi_harmonic(gamma: f64, t: f64) -> Matrix2<f64> {
    debug_assert!(gamma > 0.0);
    let w = gamma.sqrt();
    let (s, c) = (w * t).sin_cos();
    Matrix2::new(c, s / w, -w * s, c)
}
