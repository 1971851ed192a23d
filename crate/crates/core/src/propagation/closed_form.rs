use num_complex::Complex64;

use super::{FieldState, InputPulse, PropagationError, TimeGrid};
use crate::params::DerivedQuantities;

/// Relative velocity mismatch below which the fields count as co-propagating.
const EQUAL_VELOCITY_TOLERANCE: f64 = 1e-12;

/// Exact solution for equal group velocities: the advected input rotated
/// between the modes, `E_i = E_i(0,tau) cos(beta z) - i E_j(0,tau) sin(beta z)`
/// with `tau = t - z / v`.
pub fn solve_closed_form(
    derived: &DerivedQuantities,
    input: &InputPulse,
    grid: &TimeGrid,
    z: f64,
) -> Result<FieldState, PropagationError> {
    input.check()?;
    let (v1, v2) = (derived.v1, derived.v2);
    if (v1 - v2).abs() > EQUAL_VELOCITY_TOLERANCE * v1.max(v2) {
        return Err(PropagationError::UnequalVelocities { v1, v2 });
    }
    if !(0.0..=derived.length).contains(&z) {
        return Err(PropagationError::PositionOutOfRange {
            z,
            length: derived.length,
        });
    }
    let (s, c) = (derived.beta * z).sin_cos();
    let cross = Complex64::new(0.0, -s);
    let times = grid.lab_times(derived, z);
    let own = input.channel.index();

    let mut fields = [
        Vec::with_capacity(times.len()),
        Vec::with_capacity(times.len()),
    ];
    for &t in &times {
        let f = input.amplitude(t - z / v1);
        fields[own].push(f * c);
        fields[1 - own].push(f * cross);
    }
    let [e1, e2] = fields;
    Ok(FieldState { z, times, e1, e2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive, PhysicalParams};
    use crate::propagation::{intensity, Channel, Frame};
    use std::f64::consts::PI;

    fn equal_velocity_setup(beta_l: f64) -> (DerivedQuantities, InputPulse, TimeGrid) {
        let mut d = derive(&PhysicalParams::rb85_reference()).unwrap();
        d.v1 = d.v2;
        d.walkoff_time = 0.0;
        d.beta = beta_l / d.length;
        let pulse = InputPulse::gaussian(2e-9, Channel::One);
        let grid = TimeGrid::for_pulse(&d, &pulse, 512, 5.0, Frame::Comoving).unwrap();
        (d, pulse, grid)
    }

    #[test]
    fn no_rotation_is_plain_advection() {
        let (d, pulse, grid) = equal_velocity_setup(0.0);
        let s = solve_closed_form(&d, &pulse, &grid, d.length).unwrap();
        for (k, &t) in s.times.iter().enumerate() {
            assert_eq!(s.e1[k], pulse.amplitude(t - d.length / d.v1));
            assert_eq!(s.e2[k].norm(), 0.0);
        }
    }

    #[test]
    fn half_cycle_flips_the_phase() {
        let (d, pulse, grid) = equal_velocity_setup(PI);
        let s = solve_closed_form(&d, &pulse, &grid, d.length).unwrap();
        for (k, &t) in s.times.iter().enumerate() {
            let f = pulse.amplitude(t - d.length / d.v1);
            assert!((s.e1[k] + f).norm() < 1e-15);
            assert!(s.e2[k].norm() < 1e-15);
        }
    }

    #[test]
    fn eighth_cycle_splits_evenly() {
        let (d, pulse, grid) = equal_velocity_setup(PI / 4.0);
        let s = solve_closed_form(&d, &pulse, &grid, d.length).unwrap();
        let (i1, i2) = intensity(&s);
        for (k, &t) in s.times.iter().enumerate() {
            let half = 0.5 * pulse.amplitude(t - d.length / d.v1).norm_sqr();
            assert!((i1[k] - half).abs() < 1e-15);
            assert!((i2[k] - half).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_unequal_velocities() {
        let d = derive(&PhysicalParams::rb85_reference()).unwrap();
        let pulse = InputPulse::gaussian(2e-9, Channel::One);
        let grid = TimeGrid::for_pulse(&d, &pulse, 64, 5.0, Frame::Comoving).unwrap();
        assert!(matches!(
            solve_closed_form(&d, &pulse, &grid, d.length),
            Err(PropagationError::UnequalVelocities { .. })
        ));
    }
}
