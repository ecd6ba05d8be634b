//! Gradient identifier over the mixed scalar regressions, recovery of the
//! generator initial condition from the monomial estimate, and
//! reconstruction of `omega_hat(t)`.

use nalgebra::{Matrix2, Vector5};

use crate::drem::MixedRegression;
use crate::{Error, Result};

/// Largest allowed `beta * Delta^2 * dt` per RK4 substep. The update law
/// is conditionally stiff exactly when `Delta` peaks; explicit RK4 needs
/// this bound.
const STABILITY_BOUND: f64 = 0.1;

/// Monomial parameter estimate driven by `Theta_hat' = -beta Delta
/// (Delta Theta_hat - curly_Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientIdentifier {
    pub theta_hat: Vector5<f64>,
    /// Number of steps that required stability sub-division.
    pub substepped: u64,
}

impl Default for GradientIdentifier {
    fn default() -> Self {
        Self { theta_hat: Vector5::zeros(), substepped: 0 }
    }
}

impl GradientIdentifier {
    /// One step of the componentwise update ODE with `Delta` and `curly_Y`
    /// held over the step. If `beta Delta^2 dt` exceeds the stability
    /// bound the step is subdivided; the subdivision loop exits early once
    /// the iteration reaches its fixed point in floating point.
    pub fn gradient_step(&mut self, mixed: &MixedRegression, beta: f64, dt: f64) {
        debug_assert!(beta > 0.0 && dt > 0.0);
        let delta = mixed.delta;
        if delta == 0.0 {
            return;
        }
        let stiffness = beta * delta * delta * dt;
        let substeps = if stiffness > STABILITY_BOUND {
            self.substepped += 1;
            (stiffness / STABILITY_BOUND).ceil() as u64
        } else {
            1
        };
        let h = dt / substeps as f64;
        for _ in 0..substeps {
            let prev = self.theta_hat;
            // RK4 on theta' = -beta*delta*(delta*theta - y), frozen coefficients
            let f = |th: &Vector5<f64>| -beta * delta * (delta * th - mixed.curly_y);
            let k1 = f(&prev);
            let k2 = f(&(prev + 0.5 * h * k1));
            let k3 = f(&(prev + 0.5 * h * k2));
            let k4 = f(&(prev + h * k3));
            self.theta_hat = prev + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if self.theta_hat == prev {
                break; // fixed point reached; further substeps are no-ops
            }
        }
    }
}

/// Recover `(theta1, theta2)` from the monomial estimate.
///
/// The regression cannot distinguish `(theta1, theta2)` from
/// `(-theta1, -theta2)`, so the positive root is taken for `theta1` and
/// `theta2` follows from the `theta2/theta1` monomial (multiplying by a
/// bounded estimate instead of dividing by a small one).
pub fn recover_theta(theta_hat: &Vector5<f64>, epsilon: f64) -> Result<(f64, f64)> {
    if theta_hat[1] < -epsilon {
        return Err(Error::Config(format!(
            "theta1^2 estimate {} is significantly negative; estimate not yet converged",
            theta_hat[1]
        )));
    }
    let theta1 = theta_hat[1].max(0.0).sqrt();
    let theta2 = theta_hat[0] * theta1;
    Ok((theta1, theta2))
}

/// `omega_hat(t) = Phi11(t) theta1_hat + Phi12(t) theta2_hat`.
pub fn reconstruct_omega(phi: &Matrix2<f64>, theta1_hat: f64, theta2_hat: f64) -> f64 {
    phi[(0, 0)] * theta1_hat + phi[(0, 1)] * theta2_hat
}

/// Current output of the identifier stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyEstimate {
    pub theta1_hat: f64,
    pub theta2_hat: f64,
    pub omega_hat: f64,
    pub valid: bool,
}

impl Default for FrequencyEstimate {
    fn default() -> Self {
        Self { theta1_hat: 0.0, theta2_hat: 0.0, omega_hat: 0.0, valid: false }
    }
}

/// Declares estimates meaningful once `|Delta|` has stayed above
/// `1e-3 * running max |Delta|` for 0.1 s; latches once set. Suppresses
/// the startup interval where adjugate and determinant are both ~0.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidityGate {
    run_max: f64,
    above_since: Option<f64>,
    valid: bool,
}

impl ValidityGate {
    pub const RELATIVE_THRESHOLD: f64 = 1e-3;
    pub const HOLD_TIME: f64 = 0.1;

    pub fn update(&mut self, t: f64, delta: f64) -> bool {
        let mag = delta.abs();
        self.run_max = self.run_max.max(mag);
        if self.run_max > 0.0 && mag > Self::RELATIVE_THRESHOLD * self.run_max {
            let since = *self.above_since.get_or_insert(t);
            if t - since >= Self::HOLD_TIME {
                self.valid = true;
            }
        } else {
            self.above_since = None;
        }
        self.valid
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn frozen_at_zero_excitation() {
        let mut id = GradientIdentifier::default();
        id.theta_hat = Vector5::new(1.0, 2.0, 3.0, 4.0, 5.0);
        let mixed = MixedRegression { curly_y: Vector5::new(9.0, 9.0, 9.0, 9.0, 9.0), delta: 0.0 };
        id.gradient_step(&mixed, 1e23, 1e-4);
        assert_eq!(id.theta_hat, Vector5::new(1.0, 2.0, 3.0, 4.0, 5.0));
    }

    #[test]
    fn exact_data_error_is_nonincreasing() {
        let theta_star = Vector5::new(0.5, 4.0, 2.0, 1.0, 0.5);
        let mut id = GradientIdentifier::default();
        let mut prev_err: Vector5<f64> = theta_star.abs();
        for n in 0..5_000 {
            let t = n as f64 * 1e-3;
            let delta = 1e-12 * (1.0 + (0.5 * t).sin());
            let mixed = MixedRegression { curly_y: delta * theta_star, delta };
            id.gradient_step(&mixed, 1e23, 1e-3);
            let err = (id.theta_hat - theta_star).abs();
            for i in 0..5 {
                assert!(err[i] <= prev_err[i] + 1e-9, "component {i} error grew");
            }
            prev_err = err;
        }
        // and it actually converges for this excitation level
        assert!((id.theta_hat - theta_star).amax() < 1e-3);
    }

    #[test]
    fn stiff_step_is_subdivided_and_stable() {
        let theta_star = Vector5::new(0.5, 4.0, 2.0, 1.0, 0.5);
        let delta = 1e-9; // beta delta^2 dt = 1e5 * 1e-4 = 10 >> 0.1
        let mixed = MixedRegression { curly_y: delta * theta_star, delta };
        let mut id = GradientIdentifier::default();
        id.gradient_step(&mixed, 1e23, 1e-4);
        assert!(id.substepped > 0);
        for i in 0..5 {
            assert_relative_eq!(id.theta_hat[i], theta_star[i], max_relative = 1e-6);
        }
    }

    #[test]
    fn recover_theta_examples() {
        let (t1, t2) = recover_theta(&Vector5::new(0.5, 4.0, 2.0, 1.0, 0.5), 1e-6).unwrap();
        assert_relative_eq!(t1, 2.0);
        assert_relative_eq!(t2, 1.0);
        let (t1, t2) = recover_theta(&Vector5::new(0.5, 16.0, 8.0, 4.0, 2.0), 1e-6).unwrap();
        assert_relative_eq!(t1, 4.0);
        assert_relative_eq!(t2, 2.0);
        let (t1, t2) = recover_theta(&Vector5::zeros(), 1e-6).unwrap();
        assert_eq!((t1, t2), (0.0, 0.0));
        assert!(recover_theta(&Vector5::new(0.0, -1.0, 0.0, 0.0, 0.0), 1e-6).is_err());
    }

    #[test]
    fn reconstruct_at_zero_returns_theta1() {
        let phi = Matrix2::identity();
        assert_eq!(reconstruct_omega(&phi, 2.0, 1.0), 2.0);
    }

    #[test]
    fn reconstruct_quarter_period() {
        // gamma = 4 at t = pi/4: Phi11 = 0, Phi12 = 0.5
        let phi = crate::generators::closed_form_phi_harmonic(4.0, std::f64::consts::FRAC_PI_4);
        assert_relative_eq!(reconstruct_omega(&phi, 2.0, 1.0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn validity_gate_needs_sustained_activity() {
        let mut gate = ValidityGate::default();
        assert!(!gate.update(0.0, 0.0));
        assert!(!gate.update(0.01, 1.0));
        // drops below threshold: hold timer resets
        assert!(!gate.update(0.02, 1e-5));
        assert!(!gate.update(0.03, 1.0));
        assert!(!gate.update(0.12, 1.0));
        assert!(gate.update(0.14, 1.0));
        // latches even if excitation later disappears
        assert!(gate.update(1.0, 0.0));
    }
}
