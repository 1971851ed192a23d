use num_complex::Complex64;
use serde::Serialize;

use super::PropagationError;

/// Which field carries the input photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Channel {
    One,
    Two,
}

impl Channel {
    pub fn index(self) -> usize {
        match self {
            Channel::One => 0,
            Channel::Two => 1,
        }
    }
}

impl TryFrom<u8> for Channel {
    type Error = PropagationError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Channel::One),
            2 => Ok(Channel::Two),
            other => Err(PropagationError::InvalidPulse(format!(
                "channel must be 1 or 2, got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    /// `amplitude * exp(-2 (t - center)^2 / duration^2)`.
    Gaussian {
        duration: f64,
        amplitude: f64,
        center: f64,
    },
    /// Uniformly sampled complex profile starting at `start` with spacing
    /// `step`; cubic (Catmull-Rom) interpolation in between, zero outside.
    Sampled {
        start: f64,
        step: f64,
        values: Vec<Complex64>,
    },
}

/// Temporal profile of the input photon at `z = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputPulse {
    pub shape: PulseShape,
    pub channel: Channel,
}

impl InputPulse {
    pub fn gaussian(duration: f64, channel: Channel) -> Self {
        Self {
            shape: PulseShape::Gaussian {
                duration,
                amplitude: 1.0,
                center: 0.0,
            },
            channel,
        }
    }

    pub fn sampled(start: f64, step: f64, values: Vec<Complex64>, channel: Channel) -> Self {
        Self {
            shape: PulseShape::Sampled {
                start,
                step,
                values,
            },
            channel,
        }
    }

    pub fn check(&self) -> Result<(), PropagationError> {
        let bad = |msg: &str| Err(PropagationError::InvalidPulse(msg.to_owned()));
        match &self.shape {
            PulseShape::Gaussian {
                duration,
                amplitude,
                center,
            } => {
                if !(duration.is_finite() && *duration > 0.0) {
                    return bad("gaussian duration must be finite and positive");
                }
                if !(amplitude.is_finite() && center.is_finite()) {
                    return bad("gaussian amplitude and center must be finite");
                }
            }
            PulseShape::Sampled {
                start,
                step,
                values,
            } => {
                if values.len() < 2 {
                    return bad("sampled profile needs at least two samples");
                }
                if !(step.is_finite() && *step > 0.0 && start.is_finite()) {
                    return bad("sampled profile needs a finite start and positive step");
                }
                if values
                    .iter()
                    .any(|v| !(v.re.is_finite() && v.im.is_finite()))
                {
                    return bad("sampled profile must have finite L2 norm");
                }
            }
        }
        Ok(())
    }

    /// Envelope value at time `t`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        match &self.shape {
            PulseShape::Gaussian {
                duration,
                amplitude,
                center,
            } => {
                let u = (t - center) / duration;
                Complex64::new(amplitude * (-2.0 * u * u).exp(), 0.0)
            }
            PulseShape::Sampled {
                start,
                step,
                values,
            } => catmull_rom(values, (t - start) / step),
        }
    }

    /// Interval outside of which the profile is treated as zero: `+-4T`
    /// around the center for a Gaussian, the sampled span otherwise.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            PulseShape::Gaussian {
                duration, center, ..
            } => (center - 4.0 * duration, center + 4.0 * duration),
            PulseShape::Sampled {
                start,
                step,
                values,
            } => (*start, start + step * (values.len() - 1) as f64),
        }
    }

    /// Characteristic time scale: `T` for a Gaussian, the sample spacing for
    /// a sampled profile.
    pub fn time_scale(&self) -> f64 {
        match &self.shape {
            PulseShape::Gaussian { duration, .. } => *duration,
            PulseShape::Sampled { step, .. } => *step,
        }
    }

    /// Center of the support.
    pub fn center(&self) -> f64 {
        let (a, b) = self.support();
        0.5 * (a + b)
    }
}

fn catmull_rom(values: &[Complex64], s: f64) -> Complex64 {
    let last = (values.len() - 1) as f64;
    if !(0.0..=last).contains(&s) {
        return Complex64::default();
    }
    let i = (s.floor() as usize).min(values.len() - 2);
    let u = s - i as f64;
    if u == 0.0 {
        return values[i];
    }
    let at = |k: isize| -> Complex64 {
        if k < 0 || k as usize >= values.len() {
            Complex64::default()
        } else {
            values[k as usize]
        }
    };
    let i = i as isize;
    let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
    let u2 = u * u;
    let u3 = u2 * u;
    (p1 * 2.0
        + (p2 - p0) * u
        + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * u2
        + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * u3)
        * 0.5
}
