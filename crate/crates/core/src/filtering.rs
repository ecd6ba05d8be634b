//! The first-order lag `1/(p+1)` and the derivative-free q-chain
//! `q1 = p/(p+1) y`, `q2 = p/(p+1) q1`.
//!
//! `p/(p+1) = 1 - 1/(p+1)`, so no signal is ever differentiated: each
//! chain link subtracts a lagged copy from its input.
//!
//! Standalone steps hold the input constant over the step (zero-order
//! hold). The simulation harness instead advances all filter states as one
//! coupled RK4 system with stage-consistent inputs; the state derivative
//! used there is [`lag_deriv`].

use crate::ode;
use crate::{Error, Result};

/// Derivative of the unit lag: `x' = -x + u`; output of the channel is `x`.
#[inline]
pub fn lag_deriv(x: f64, u: f64) -> f64 {
    u - x
}

/// State of one `1/(p+1)` channel.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LagState {
    pub x: f64,
}

impl LagState {
    pub fn output(&self) -> f64 {
        self.x
    }
}

/// One RK4 step of `x' = -x + u` with `u` held constant over the step.
pub fn lag_step(state: LagState, u: f64, dt: f64) -> Result<LagState> {
    debug_assert!(dt > 0.0);
    if !u.is_finite() {
        return Err(Error::NonFinite { context: "lag filter input", t: f64::NAN });
    }
    let x = ode::rk4_scalar(0.0, state.x, dt, |_, x| lag_deriv(x, u));
    Ok(LagState { x })
}

/// The q-chain of the regression builder.
///
/// `x1` lags `y` and `x2` lags `q1`; the outputs are `q1 = y - x1`,
/// `q2 = q1 - x2`. With constant input both outputs decay exponentially.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QChain {
    pub x1: LagState,
    pub x2: LagState,
}

impl QChain {
    pub fn outputs(&self, y: f64) -> (f64, f64) {
        let q1 = y - self.x1.x;
        let q2 = q1 - self.x2.x;
        (q1, q2)
    }
}

/// One ZOH step of both chain links; returns `(q1, q2)` after the step.
pub fn q_chain_step(chain: &mut QChain, y: f64, dt: f64) -> Result<(f64, f64)> {
    let (q1, _) = chain.outputs(y);
    chain.x1 = lag_step(chain.x1, y, dt)?;
    chain.x2 = lag_step(chain.x2, q1, dt)?;
    Ok(chain.outputs(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lag_rejects_non_finite() {
        assert!(lag_step(LagState::default(), f64::NAN, 1e-3).is_err());
    }

    #[test]
    fn lag_at_rest_stays_at_rest() {
        let s = lag_step(LagState::default(), 0.0, 1e-2).unwrap();
        assert_eq!(s.x, 0.0);
    }

    #[test]
    fn lag_unity_dc_gain() {
        let mut s = LagState::default();
        for _ in 0..20_000 {
            s = lag_step(s, 1.0, 1e-3).unwrap();
        }
        assert_relative_eq!(s.x, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn lag_free_decay_matches_exponential() {
        let dt = 1e-4;
        let mut s = LagState { x: 1.0 };
        for _ in 0..10_000 {
            s = lag_step(s, 0.0, dt).unwrap();
        }
        assert!((s.x - (-1.0f64).exp()).abs() <= 1e-10);
    }

    #[test]
    fn q_chain_zero_input() {
        let mut chain = QChain::default();
        for _ in 0..100 {
            let (q1, q2) = q_chain_step(&mut chain, 0.0, 1e-3).unwrap();
            assert_eq!((q1, q2), (0.0, 0.0));
        }
    }

    #[test]
    fn q_chain_step_response() {
        // p/(p+1) on a step of height c: q1 = c e^{-t}, q2 = c t e^{-t}
        let c = 3.0;
        let dt = 1e-4;
        let mut chain = QChain::default();
        for n in 0..20_000 {
            let (q1, q2) = q_chain_step(&mut chain, c, dt).unwrap();
            let t = (n + 1) as f64 * dt;
            assert_relative_eq!(q1, c * (-t).exp(), epsilon = 1e-9);
            assert_relative_eq!(q2, c * t * (-t).exp(), epsilon = 1e-9);
        }
    }

    #[test]
    fn q1_steady_state_amplitude_at_2_rad_s() {
        // |p/(p+1)| at 2 rad/s = 2/sqrt(5)
        let dt = 1e-4;
        let mut chain = QChain::default();
        let mut peak = 0.0f64;
        let steps = (30.0 / dt) as usize;
        for n in 0..steps {
            let t = n as f64 * dt;
            let (q1, _) = q_chain_step(&mut chain, (2.0 * t).sin(), dt).unwrap();
            if t > 20.0 {
                peak = peak.max(q1.abs());
            }
        }
        assert_relative_eq!(peak, 2.0 / 5.0f64.sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn linearity_along_trajectories() {
        let dt = 1e-3;
        let (mut a, mut b, mut sum) = (LagState::default(), LagState::default(), LagState::default());
        for n in 0..5_000 {
            let t = n as f64 * dt;
            let u = (1.3 * t).sin();
            let v = (0.7 * t).cos();
            a = lag_step(a, u, dt).unwrap();
            b = lag_step(b, v, dt).unwrap();
            sum = lag_step(sum, 2.0 * u - 0.5 * v, dt).unwrap();
            assert!((sum.x - (2.0 * a.x - 0.5 * b.x)).abs() <= 1e-10);
        }
    }

    #[test]
    fn cascade_equals_double_lag_channel() {
        // Two lag_step calls in series are exactly the 1/(p+1)^2 channel
        // realization used by the regression builder.
        let dt = 1e-3;
        let (mut first, mut second) = (LagState::default(), LagState::default());
        let (mut pair_a, mut pair_b) = (LagState::default(), LagState::default());
        for n in 0..5_000 {
            let t = n as f64 * dt;
            let u = (2.0 * t).sin() + 0.3;
            let first_out = first.x;
            first = lag_step(first, u, dt).unwrap();
            second = lag_step(second, first_out, dt).unwrap();
            let pair_a_out = pair_a.x;
            pair_a = lag_step(pair_a, u, dt).unwrap();
            pair_b = lag_step(pair_b, pair_a_out, dt).unwrap();
            assert!((second.x - pair_b.x).abs() <= 1e-12);
        }
    }

    #[test]
    fn bibo_bounded_states() {
        let dt = 1e-3;
        let bound = 2.5;
        let mut s = LagState { x: 1.0 };
        for n in 0..20_000 {
            let t = n as f64 * dt;
            let u = bound * (5.0 * t).sin();
            s = lag_step(s, u, dt).unwrap();
            assert!(s.x.abs() <= bound + 1.0 * (-t).exp() + 1e-9);
        }
    }

    #[test]
    fn swapping_lemma_residual_decays() {
        // 1/(p+1)[a u] - (a 1/(p+1)[u] - 1/(p+1)[a' 1/(p+1)[u]]) decays
        // like the filter transient. Coupled RK4 so the only residual is
        // the initial-condition transient itself; here all states start at
        // zero and a(0) u(0) cancels, so the residual stays at roundoff.
        let a = |t: f64| 1.0 + 0.5 * (0.7 * t).sin();
        let ad = |t: f64| 0.35 * (0.7 * t).cos();
        let u = |t: f64| (2.0 * t).cos() + 0.3;
        let dt = 1e-3;
        // states: [ L[a u], L[u], L[a' L[u]] ]
        let mut x = [0.0f64; 3];
        let mut max_resid = 0.0f64;
        for n in 0..20_000 {
            let t = n as f64 * dt;
            x = crate::ode::rk4_step(t, &x, dt, |t, x| {
                [
                    lag_deriv(x[0], a(t) * u(t)),
                    lag_deriv(x[1], u(t)),
                    lag_deriv(x[2], ad(t) * x[1]),
                ]
            });
            let t1 = t + dt;
            let resid = x[0] - (a(t1) * x[1] - x[2]);
            max_resid = max_resid.max(resid.abs());
        }
        assert!(max_resid <= 1e-9, "max residual {max_resid:e}");

        // With a nonzero initial state on the product channel the residual
        // is exactly that transient: bounded by C e^{-0.9 t}.
        let mut x = [0.7f64, 0.0, 0.0];
        for n in 0..20_000 {
            let t = n as f64 * dt;
            x = crate::ode::rk4_step(t, &x, dt, |t, x| {
                [
                    lag_deriv(x[0], a(t) * u(t)),
                    lag_deriv(x[1], u(t)),
                    lag_deriv(x[2], ad(t) * x[1]),
                ]
            });
            let t1 = t + dt;
            let resid = (x[0] - (a(t1) * x[1] - x[2])).abs();
            assert!(resid <= 0.7 * (-0.9 * t1).exp() + 1e-9, "t={t1}: {resid:e}");
        }
    }
}
