//! Online identification of the time-varying frequency of a sinusoidal
//! signal `y(t) = alpha(t) * sin(omega(t) + phi)` where both the amplitude
//! and the frequency are outputs of known linear generators with unknown
//! initial conditions.
//!
//! The pipeline:
//!
//! 1. [`generators`] — exosystems for `omega(t)` and `alpha(t)`, their
//!    fundamental matrices and analytic derivative stacks, and the
//!    synthesized measurement.
//! 2. [`filtering`] — the first-order lag `1/(p+1)`, the derivative-free
//!    q-chain and swapping-lemma product channels.
//! 3. [`regression`] — the measurable linear regression `z = m^T Theta`
//!    built online from `y`, plus residual oracles for the underlying
//!    differential identities.
//! 4. [`drem`] — dynamic regressor extension and mixing: filtered
//!    outer-product extension reduced to decoupled scalar regressions via
//!    the adjugate.
//! 5. [`identifier`] — gradient identifier over the mixed regressions and
//!    recovery of the generator initial condition and of `omega_hat(t)`.
//! 6. [`harness`] — scenario configuration, the single-clock simulation
//!    loop, presets and CSV output.

pub mod drem;
pub mod filtering;
pub mod generators;
pub mod harness;
pub mod identifier;
pub mod ode;
pub mod regression;

use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {context} at t = {t}")]
    NonFinite { context: &'static str, t: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("integration diverged at t = {t:.6}: {details}")]
    Diverged { t: f64, details: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
