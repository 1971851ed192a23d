use serde::Serialize;

use super::{InputPulse, PropagationError};
use crate::params::DerivedQuantities;

/// Reference frame of the time axis the solvers work on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Lab time `t`; the window must hold the full group delay `L / v_slow`.
    Lab,
    /// Retarded time `t - z / v_fast`; the window only has to hold the input
    /// plus the walk-off.
    #[default]
    Comoving,
}

/// Uniform sampling of the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub frame: Frame,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, n_t: usize, frame: Frame) -> Result<Self, PropagationError> {
        if n_t < 2 {
            return Err(PropagationError::InvalidGrid(format!(
                "need at least 2 samples, got {n_t}"
            )));
        }
        if !(t_min.is_finite() && t_max.is_finite() && t_max > t_min) {
            return Err(PropagationError::InvalidGrid(format!(
                "window [{t_min:e}, {t_max:e}] is empty or not finite"
            )));
        }
        Ok(Self {
            t_min,
            t_max,
            n_t,
            frame,
        })
    }

    /// Window `[t0 - pad T, t0 + pad T + delay]`, where `delay` is the
    /// walk-off in the co-moving frame and `L / v_slow` in the lab frame.
    pub fn for_pulse(
        derived: &DerivedQuantities,
        input: &InputPulse,
        n_t: usize,
        padding: f64,
        frame: Frame,
    ) -> Result<Self, PropagationError> {
        let (lo, hi) = input.support();
        let pad = match input.shape {
            super::PulseShape::Gaussian { duration, .. } => (padding - 4.0).max(0.0) * duration,
            super::PulseShape::Sampled { .. } => 0.0,
        };
        let delay = max_delay(derived, frame);
        Self::new(lo - pad, hi + pad + delay, n_t, frame)
    }

    pub fn dt(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    /// Grid sample times in the solver frame.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..self.n_t).map(|k| self.t_min + k as f64 * dt).collect()
    }

    /// Offset between lab time and solver-frame time at position `z`.
    pub fn lab_offset(&self, derived: &DerivedQuantities, z: f64) -> f64 {
        match self.frame {
            Frame::Lab => 0.0,
            Frame::Comoving => z * derived.fast_slowness(),
        }
    }

    /// Lab-frame sample times at position `z`.
    pub fn lab_times(&self, derived: &DerivedQuantities, z: f64) -> Vec<f64> {
        let offset = self.lab_offset(derived, z);
        self.times().into_iter().map(|t| t + offset).collect()
    }

    /// Checks that the window contains the input support and the delay it
    /// accumulates over the medium.
    pub fn check_covers(
        &self,
        derived: &DerivedQuantities,
        input: &InputPulse,
    ) -> Result<(), PropagationError> {
        let (lo, hi) = input.support();
        let needed = hi + max_delay(derived, self.frame);
        // Relative slack so that windows built by `for_pulse` always pass.
        let slack = 1e-9 * (self.t_max - self.t_min);
        if self.t_min > lo + slack || self.t_max < needed - slack {
            return Err(PropagationError::InvalidGrid(format!(
                "window [{:e}, {:e}] s must contain [{lo:e}, {needed:e}] s",
                self.t_min, self.t_max
            )));
        }
        Ok(())
    }
}

fn max_delay(derived: &DerivedQuantities, frame: Frame) -> f64 {
    match frame {
        Frame::Comoving => derived.walkoff_time,
        Frame::Lab => derived.length / derived.v1.min(derived.v2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{derive, PhysicalParams};
    use crate::propagation::Channel;

    #[test]
    fn default_window_spans_pulse_and_walkoff() {
        let d = derive(&PhysicalParams::rb85_reference()).unwrap();
        let pulse = InputPulse::gaussian(2e-9, Channel::One);
        let grid = TimeGrid::for_pulse(&d, &pulse, 4096, 5.0, Frame::Comoving).unwrap();
        assert!((grid.t_min + 10e-9).abs() < 1e-20);
        assert!((grid.t_max - (10e-9 + d.walkoff_time)).abs() < 1e-20);
        grid.check_covers(&d, &pulse).unwrap();
        assert!((grid.dt() * 4095.0 - (grid.t_max - grid.t_min)).abs() < 1e-22);
    }

    #[test]
    fn lab_window_holds_full_delay() {
        let d = derive(&PhysicalParams::rb85_reference()).unwrap();
        let pulse = InputPulse::gaussian(2e-9, Channel::One);
        let grid = TimeGrid::for_pulse(&d, &pulse, 1024, 5.0, Frame::Lab).unwrap();
        assert!(grid.t_max > d.length / d.v1);
        let comoving = TimeGrid {
            frame: Frame::Comoving,
            ..grid
        };
        assert_eq!(comoving.lab_offset(&d, d.length), d.length / d.v2);
    }

    #[test]
    fn too_narrow_window_is_rejected() {
        let d = derive(&PhysicalParams::rb85_reference()).unwrap();
        let pulse = InputPulse::gaussian(2e-9, Channel::One);
        let grid = TimeGrid::new(-10e-9, 10e-9, 512, Frame::Comoving).unwrap();
        assert!(matches!(
            grid.check_covers(&d, &pulse),
            Err(PropagationError::InvalidGrid(_))
        ));
        assert!(TimeGrid::new(0.0, 1.0, 1, Frame::Lab).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 8, Frame::Lab).is_err());
    }
}
