//! Evaluation of the characteristic (Riemann-function) solution
//!
//! ```text
//! E_i(z,t) = E_i(0, t - z/v_i)
//!          + int_0^z dx { E_i(0, t - z/v_i - (1/v_j - 1/v_i)(z - x)) dJ0(psi)/dz
//!                         - i beta E_j(0, t - z/v_i - (1/v_j - 1/v_i)(z - x)) J0(psi) }
//! psi = 2 beta sqrt(x (z - x))
//! ```
//!
//! Reading implemented here: `x` is the distance the photon travelled in its
//! own mode `i` and `z - x` the distance in mode `j`; `d/dz` acts at fixed
//! `x`, so `dJ0/dz = -beta J1(psi) sqrt(x / (z - x))`. This is what summing
//! the conversion paths of the coupled equations gives, and it is checked
//! against the split-step solver.
//!
//! The `1/sqrt(z - x)` endpoint singularity is removed analytically with
//! `x = z sin^2(theta)`:
//!
//! ```text
//! dx sqrt(x/(z-x)) = 2 z sin^2(theta) dtheta,   dx = z sin(2 theta) dtheta,
//! psi = beta z sin(2 theta),                    z - x = z cos^2(theta)
//! ```
//!
//! and the smooth `theta` integrals are done with composite 16-point
//! Gauss-Legendre, doubling the panel count until successive results agree.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::{FieldState, InputPulse, PropagationError, PulseShape, TimeGrid};
use crate::params::DerivedQuantities;
use crate::quadrature::GaussLegendre;
use crate::special::bessel_j0_j1;
use crate::Execution;

const RULE_POINTS: usize = 16;
const MAX_PANELS: usize = 4096;
const REL_TOL: f64 = 1e-8;

/// Evaluates the Bessel-kernel solution at position `z` with the default
/// execution policy.
pub fn solve_analytic(
    derived: &DerivedQuantities,
    input: &InputPulse,
    grid: &TimeGrid,
    z: f64,
) -> Result<FieldState, PropagationError> {
    solve_analytic_with(derived, input, grid, z, Execution::default())
}

/// Evaluates the Bessel-kernel solution at position `z`, one independent
/// quadrature per time sample.
pub fn solve_analytic_with(
    derived: &DerivedQuantities,
    input: &InputPulse,
    grid: &TimeGrid,
    z: f64,
    exec: Execution,
) -> Result<FieldState, PropagationError> {
    input.check()?;
    if !(0.0..=derived.length).contains(&z) {
        return Err(PropagationError::PositionOutOfRange {
            z,
            length: derived.length,
        });
    }
    let times = grid.lab_times(derived, z);
    let own = input.channel.index();
    let n = times.len();

    if z == 0.0 {
        let mut fields = [vec![Complex64::default(); n], vec![Complex64::default(); n]];
        for (slot, &t) in fields[own].iter_mut().zip(&times) {
            *slot = input.amplitude(t);
        }
        let [e1, e2] = fields;
        return Ok(FieldState { z, times, e1, e2 });
    }

    let (a1, a2) = derived.slowness();
    let slowness = [a1, a2];
    let other = 1 - own;
    let kernel = Kernel::new(derived.beta, z, slowness[own], slowness[other], input);
    let peak = peak_amplitude(input);

    let values = exec.try_map(n, |k| kernel.evaluate(input, times[k], peak))?;
    let mut fields = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (same, cross) in values {
        fields[own].push(same);
        fields[other].push(cross);
    }
    let [e1, e2] = fields;
    Ok(FieldState { z, times, e1, e2 })
}

fn peak_amplitude(input: &InputPulse) -> f64 {
    match &input.shape {
        PulseShape::Gaussian { amplitude, .. } => amplitude.abs(),
        PulseShape::Sampled { values, .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
    }
}

/// Quadrature tables for one panel count.
struct Level {
    /// `z cos^2(theta)` at each node.
    foreign_path: Vec<f64>,
    /// Weight of the same-mode term, `-beta J1(psi) 2 z sin^2(theta) w`.
    same: Vec<f64>,
    /// Weight of the cross-mode term without the `-i`, `beta J0(psi) z sin(2 theta) w`.
    cross: Vec<f64>,
}

struct Kernel {
    beta: f64,
    z: f64,
    /// Slowness of the mode that carries the input photon.
    own_slowness: f64,
    other_slowness: f64,
    first_panels: usize,
    rule: GaussLegendre,
    levels: Vec<OnceLock<Level>>,
}

impl Kernel {
    fn new(beta: f64, z: f64, own_slowness: f64, other_slowness: f64, input: &InputPulse) -> Self {
        // Enough panels that the node spacing resolves the pulse across the
        // whole range of delays before the doubling test is trusted.
        let delay_range = (own_slowness - other_slowness).abs() * z;
        let first_panels = ((delay_range / input.time_scale()).ceil() as usize)
            .next_power_of_two()
            .clamp(2, MAX_PANELS / 2);
        let n_levels = (MAX_PANELS / first_panels).trailing_zeros() as usize + 1;
        Self {
            beta,
            z,
            own_slowness,
            other_slowness,
            first_panels,
            rule: GaussLegendre::new(RULE_POINTS),
            levels: (0..n_levels).map(|_| OnceLock::new()).collect(),
        }
    }

    fn level(&self, index: usize) -> &Level {
        self.levels[index].get_or_init(|| {
            let panels = self.first_panels << index;
            let points = self.rule.composite_points(0.0, FRAC_PI_2, panels);
            let mut level = Level {
                foreign_path: Vec::with_capacity(points.len()),
                same: Vec::with_capacity(points.len()),
                cross: Vec::with_capacity(points.len()),
            };
            for (theta, w) in points {
                let (s, c) = theta.sin_cos();
                let sin2 = 2.0 * s * c;
                let (j0, j1) = bessel_j0_j1(self.beta * self.z * sin2);
                level.foreign_path.push(self.z * c * c);
                level.same.push(-self.beta * j1 * 2.0 * self.z * s * s * w);
                level.cross.push(self.beta * j0 * self.z * sin2 * w);
            }
            level
        })
    }

    /// Integrals at one level for lab time `t`: `(same-mode, cross-mode)`.
    fn integrate(&self, input: &InputPulse, t: f64, index: usize) -> (Complex64, Complex64) {
        let level = self.level(index);
        let mut same = Complex64::default();
        let mut cross = Complex64::default();
        let base_same = t - self.z * self.own_slowness;
        let base_cross = t - self.z * self.other_slowness;
        let d_same = self.other_slowness - self.own_slowness;
        let d_cross = -d_same;
        for k in 0..level.foreign_path.len() {
            let y = level.foreign_path[k];
            same += input.amplitude(base_same - d_same * y) * level.same[k];
            cross += input.amplitude(base_cross - d_cross * y) * level.cross[k];
        }
        (same, Complex64::new(cross.im, -cross.re))
    }

    /// Returns `(E_own, E_other)` at lab time `t`.
    fn evaluate(
        &self,
        input: &InputPulse,
        t: f64,
        peak: f64,
    ) -> Result<(Complex64, Complex64), PropagationError> {
        let direct = input.amplitude(t - self.z * self.own_slowness);
        if self.beta == 0.0 {
            return Ok((direct, Complex64::default()));
        }
        let (mut same, mut cross) = self.integrate(input, t, 0);
        let mut change = f64::INFINITY;
        for index in 1..self.levels.len() {
            let (s, c) = self.integrate(input, t, index);
            change = (s - same).norm().max((c - cross).norm());
            let scale = s.norm().max(c.norm()).max(peak);
            same = s;
            cross = c;
            if change <= REL_TOL * scale {
                return Ok((direct + same, cross));
            }
        }
        Err(PropagationError::QuadratureNonConvergence { t, change })
    }
}
