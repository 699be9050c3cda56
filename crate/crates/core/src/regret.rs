//! Instantaneous and cumulative regret of the keep/retrain bandit under
//! oscillating noise.
//!
//! The instantaneous regret follows
//! `g' = -eta g^2 + 2 p s(t)^2 pi nu sin(2 nu t)` with
//! `s(t) = |cos(sin(pi nu t / 2))| + |sin(sin(pi nu t / 2))|`. Regret is
//! nonnegative, so `g` is projected onto `[0, inf)` after every step.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Regret at `t = 0` used by [`regret_simulate`].
pub const INITIAL_REGRET: f64 = 1.0;

/// Upper bound on `h * nu` for an integration substep.
const MAX_PHASE_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub t: Vec<f64>,
    /// Instantaneous regret `g(t)`.
    pub g: Vec<f64>,
    /// Cumulative regret `G(t) = int_0^t g`.
    pub cumulative: Vec<f64>,
}

impl RegretTrace {
    pub fn final_cumulative(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }
}

fn envelope(nu: f64, t: f64) -> f64 {
    let phase = (PI * nu * t / 2.0).sin();
    phase.cos().abs() + phase.sin().abs()
}

fn rate(eta: f64, nu: f64, p: f64, t: f64, g: f64) -> f64 {
    let s = envelope(nu, t);
    -eta * g * g + 2.0 * p * s * s * PI * nu * (2.0 * nu * t).sin()
}

/// Closed-form cumulative regret for `nu = 0`: `ln(1 + eta g0 t) / eta`.
pub fn log_reference(eta: f64, g0: f64, t: f64) -> f64 {
    (eta * g0 * t).ln_1p() / eta
}

/// RK4 over `grid` equal steps on `[0, horizon]`, starting from
/// [`INITIAL_REGRET`]. Steps are subdivided by halving until the forcing
/// phase advances by at most 0.05 rad per substep.
pub fn regret_simulate(eta: f64, nu: f64, p: f64, horizon: f64, grid: usize) -> Result<RegretTrace> {
    regret_simulate_from(eta, nu, p, horizon, grid, INITIAL_REGRET)
}

pub fn regret_simulate_from(eta: f64, nu: f64, p: f64, horizon: f64, grid: usize, g0: f64) -> Result<RegretTrace> {
    for (name, v) in [("eta", eta), ("horizon", horizon)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
        }
    }
    for (name, v) in [("nu", nu), ("p", p), ("g0", g0)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Invalid(format!("{name} must be nonnegative, got {v}")));
        }
    }
    if grid == 0 {
        return Err(Error::Invalid("grid must have at least one step".into()));
    }
    let h = horizon / grid as f64;
    let mut sub = 1usize;
    while (h / sub as f64) * nu > MAX_PHASE_STEP {
        sub *= 2;
    }
    let dt = h / sub as f64;
    let f = |t: f64, g: f64| rate(eta, nu, p, t, g);

    let mut t_out = Vec::with_capacity(grid + 1);
    let mut g_out = Vec::with_capacity(grid + 1);
    let mut big = Vec::with_capacity(grid + 1);
    let mut g = g0;
    let mut cum = 0.0;
    t_out.push(0.0);
    g_out.push(g);
    big.push(0.0);
    for i in 0..grid {
        let t0 = i as f64 * h;
        for j in 0..sub {
            let t = t0 + j as f64 * dt;
            let k1 = f(t, g);
            let k2 = f(t + dt / 2.0, g + dt / 2.0 * k1);
            let k3 = f(t + dt / 2.0, g + dt / 2.0 * k2);
            let k4 = f(t + dt, g + dt * k3);
            let next = (g + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).max(0.0);
            cum += 0.5 * dt * (g + next);
            g = next;
        }
        if !g.is_finite() {
            return Err(Error::NonFinite(format!("regret diverged at t = {}", (i + 1) as f64 * h)));
        }
        t_out.push((i + 1) as f64 * h);
        g_out.push(g);
        big.push(cum);
    }
    Ok(RegretTrace { t: t_out, g: g_out, cumulative: big })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_frequency_matches_log_reference() {
        let tr = regret_simulate(0.1, 0.0, 0.1, 100.0, 10000).unwrap();
        for (t, big) in tr.t.iter().zip(&tr.cumulative) {
            if *t >= 10.0 {
                let r = log_reference(0.1, 1.0, *t);
                assert!((big - r).abs() / r < 1e-6, "t={t} {big} vs {r}");
            }
        }
        // g decays monotonically
        assert!(tr.g.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_noise_ignores_frequency() {
        // nu = pi/0.1 at this grid takes 8 substeps per step
        let a = regret_simulate(0.5, 0.0, 0.0, 20.0, 16000).unwrap();
        let b = regret_simulate(0.5, PI / 0.1, 0.0, 20.0, 2000).unwrap();
        for (x, y) in a.cumulative.iter().step_by(8).zip(&b.cumulative) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn oscillating_noise_stays_above() {
        let base = regret_simulate(0.1, 0.0, 0.1, 100.0, 2000).unwrap();
        for nu in [PI / 0.5, PI / 0.1, PI / 0.01] {
            let tr = regret_simulate(0.1, nu, 0.1, 100.0, 2000).unwrap();
            for (a, b) in tr.cumulative.iter().zip(&base.cumulative) {
                assert!(a + 1e-9 >= *b, "nu={nu}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(regret_simulate(0.0, 0.0, 0.1, 1.0, 10).is_err());
        assert!(regret_simulate(0.1, 0.0, 0.1, -1.0, 10).is_err());
        assert!(regret_simulate(0.1, 0.0, 0.1, 1.0, 0).is_err());
        assert!(regret_simulate(0.1, f64::NAN, 0.1, 1.0, 10).is_err());
    }

    proptest! {
        #[test]
        fn cumulative_is_monotone(eta in 0.05f64..2.0, nu in 0.0f64..20.0, p in 0.0f64..0.3, horizon in 0.5f64..30.0) {
            let tr = regret_simulate(eta, nu, p, horizon, 300).unwrap();
            prop_assert_eq!(tr.cumulative[0], 0.0);
            prop_assert!(tr.g.iter().all(|g| *g >= 0.0));
            prop_assert!(tr.cumulative.windows(2).all(|w| w[1] >= w[0]));
        }
    }
}
