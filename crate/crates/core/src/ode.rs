//! Fixed-step classic Runge–Kutta helpers.
//!
//! Everything in the pipeline runs on one global clock, so a plain RK4
//! step over a flat state array is all that is needed.

/// One RK4 step of `x' = f(t, x)` over a fixed-size state array.
pub fn rk4_step<const N: usize>(
    t: f64,
    x: &[f64; N],
    dt: f64,
    mut f: impl FnMut(f64, &[f64; N]) -> [f64; N],
) -> [f64; N] {
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * dt, &axpy(x, 0.5 * dt, &k1));
    let k3 = f(t + 0.5 * dt, &axpy(x, 0.5 * dt, &k2));
    let k4 = f(t + dt, &axpy(x, dt, &k3));
    let mut out = *x;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// One RK4 step of a scalar ODE.
pub fn rk4_scalar(t: f64, x: f64, dt: f64, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
    let k1 = f(t, x);
    let k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1);
    let k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2);
    let k4 = f(t + dt, x + dt * k3);
    x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn axpy<const N: usize>(x: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *x;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}
