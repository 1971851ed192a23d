//! Propagation of the two coupled field envelopes
//!
//! ```text
//! (d/dz + 1/v1 d/dt) E1 = -i beta E2
//! (d/dz + 1/v2 d/dt) E2 = -i beta E1
//! ```
//!
//! by three independent routes: a Strang split-step integrator
//! ([`solve_numeric`]), the Bessel-kernel solution of the characteristic
//! problem ([`solve_analytic`]) and the exact two-mode rotation valid for
//! equal group velocities ([`solve_closed_form`]).

mod analytic;
mod closed_form;
mod grid;
mod numeric;
mod pulse;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::params::DerivedQuantities;
use crate::Execution;

pub use analytic::{solve_analytic, solve_analytic_with};
pub use closed_form::solve_closed_form;
pub use grid::{Frame, TimeGrid};
pub use numeric::{default_step_count, solve_numeric, solve_numeric_with};
pub use pulse::{Channel, InputPulse, PulseShape};

/// Edge amplitude, relative to the input peak, above which the time window is
/// considered too small.
pub const EDGE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    #[error("invalid input pulse: {0}")]
    InvalidPulse(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error(
        "time window too small: field amplitude {amplitude:.3e} (relative) at the grid edge at z = {z:.6e} m"
    )]
    WindowOverflow { z: f64, amplitude: f64 },
    #[error("step count too coarse: beta*dz = {rotation:.4} rad exceeds 0.5 rad")]
    StepTooCoarse { rotation: f64 },
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("position z = {z:.6e} m outside the medium [0, {length:.6e}] m")]
    PositionOutOfRange { z: f64, length: f64 },
    #[error("quadrature did not converge at t = {t:.6e} s (last change {change:.3e})")]
    QuadratureNonConvergence { t: f64, change: f64 },
    #[error("closed form needs equal group velocities, got v1 = {v1} m/s and v2 = {v2} m/s")]
    UnequalVelocities { v1: f64, v2: f64 },
}

/// Field envelopes at one propagation distance.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    /// Position in the medium (m).
    pub z: f64,
    /// Lab-frame sample times (s).
    pub times: Vec<f64>,
    pub e1: Vec<Complex64>,
    pub e2: Vec<Complex64>,
}

impl FieldState {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sample spacing (s); zero for single-sample states.
    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    /// Photon flux `integral dt (|E1|^2 + |E2|^2)` by the rectangle rule,
    /// which is exact for the band-limited periodic grid.
    pub fn flux(&self) -> f64 {
        let (i1, i2) = intensity(self);
        (i1.iter().sum::<f64>() + i2.iter().sum::<f64>()) * self.dt()
    }

    /// Largest edge amplitude of either envelope.
    pub fn edge_amplitude(&self) -> f64 {
        [&self.e1, &self.e2]
            .iter()
            .flat_map(|e| [e.first(), e.last()])
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

/// Pointwise intensities `(|E1|^2, |E2|^2)`.
pub fn intensity(state: &FieldState) -> (Vec<f64>, Vec<f64>) {
    (
        state.e1.iter().map(|v| v.norm_sqr()).collect(),
        state.e2.iter().map(|v| v.norm_sqr()).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Numeric,
    Analytic,
    ClosedForm,
}

/// Snapshots of a propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub method: Method,
    /// Ordered by `z`; the first is `z = 0`, the last `z = L`.
    pub states: Vec<FieldState>,
    /// `states[j].flux()` for every snapshot.
    pub flux: Vec<f64>,
    /// Propagation steps (numeric method only, zero otherwise).
    pub steps: usize,
    pub dz: f64,
    pub dt: f64,
}

impl PropagationResult {
    fn from_states(method: Method, states: Vec<FieldState>, steps: usize, dz: f64) -> Self {
        let flux = states.iter().map(FieldState::flux).collect();
        let dt = states.first().map_or(0.0, FieldState::dt);
        Self {
            method,
            states,
            flux,
            steps,
            dz,
            dt,
        }
    }

    pub fn output(&self) -> &FieldState {
        self.states.last().expect("result always holds z = L")
    }

    /// Largest relative deviation of the flux from its `z = 0` value.
    pub fn max_flux_deviation(&self) -> f64 {
        let reference = self.flux[0];
        self.flux
            .iter()
            .map(|f| ((f - reference) / reference).abs())
            .fold(0.0, f64::max)
    }
}

/// Sorted snapshot positions, always including `0` and `L`.
fn snapshot_positions(snapshots: &[f64], length: f64) -> Result<Vec<f64>, PropagationError> {
    let mut zs = vec![0.0, length];
    for &z in snapshots {
        if !(0.0..=length).contains(&z) {
            return Err(PropagationError::PositionOutOfRange { z, length });
        }
        zs.push(z);
    }
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    Ok(zs)
}

/// Evaluates the analytic or closed-form solution at each snapshot position
/// (plus `0` and `L`). The numeric method is dispatched to
/// [`solve_numeric_with`] using [`default_step_count`].
pub fn solve_at_snapshots(
    method: Method,
    derived: &DerivedQuantities,
    input: &InputPulse,
    grid: &TimeGrid,
    snapshots: &[f64],
    exec: Execution,
) -> Result<PropagationResult, PropagationError> {
    if method == Method::Numeric {
        let steps = default_step_count(derived);
        return solve_numeric_with(derived, input, grid, steps, snapshots, exec);
    }
    let zs = snapshot_positions(snapshots, derived.length)?;
    let states = zs
        .iter()
        .map(|&z| match method {
            Method::Analytic => solve_analytic_with(derived, input, grid, z, exec),
            _ => solve_closed_form(derived, input, grid, z),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PropagationResult::from_states(method, states, 0, 0.0))
}

/// Relative L2 distance between the envelope pairs of two states on the
/// same grid: `||a - b|| / ||b||` over both fields.
pub fn relative_l2_error(a: &FieldState, b: &FieldState) -> f64 {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (x, y) in a.e1.iter().chain(&a.e2).zip(b.e1.iter().chain(&b.e2)) {
        diff += (x - y).norm_sqr();
        norm += y.norm_sqr();
    }
    (diff / norm).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(e1: Vec<Complex64>, e2: Vec<Complex64>) -> FieldState {
        let times = (0..e1.len()).map(|k| k as f64 * 0.5).collect();
        FieldState {
            z: 0.0,
            times,
            e1,
            e2,
        }
    }

    #[test]
    fn zero_envelopes_have_zero_intensity() {
        let s = state(vec![Complex64::default(); 8], vec![Complex64::default(); 8]);
        let (i1, i2) = intensity(&s);
        assert!(i1.iter().chain(&i2).all(|&v| v == 0.0));
        assert_eq!(s.flux(), 0.0);
    }

    #[test]
    fn flux_is_sum_of_intensities() {
        let s = state(
            vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)],
            vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 0.0)],
        );
        let (i1, i2) = intensity(&s);
        assert_eq!(i1, vec![2.0, 4.0]);
        assert_eq!(i2, vec![9.0, 0.0]);
        assert_eq!(s.flux(), 15.0 * 0.5);
    }

    #[test]
    fn snapshots_always_include_both_ends() {
        assert_eq!(
            snapshot_positions(&[0.5], 1.0).unwrap(),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(
            snapshot_positions(&[1.0, 0.0], 1.0).unwrap(),
            vec![0.0, 1.0]
        );
        assert!(snapshot_positions(&[1.5], 1.0).is_err());
    }
}
