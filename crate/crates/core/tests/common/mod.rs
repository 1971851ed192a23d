//! Reference propagators shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use timebin_core::params::{derive, DerivedQuantities, PhysicalParams};
use timebin_core::propagation::{Channel, Frame, InputPulse, TimeGrid};

pub const PULSE: f64 = 2e-9;

pub fn reference() -> DerivedQuantities {
    derive(&PhysicalParams::rb85_reference()).unwrap()
}

pub fn gaussian() -> InputPulse {
    InputPulse::gaussian(PULSE, Channel::One)
}

pub fn grid(derived: &DerivedQuantities, n_t: usize) -> TimeGrid {
    TimeGrid::for_pulse(derived, &gaussian(), n_t, 5.0, Frame::Comoving).unwrap()
}

/// Reference preset with both fields at the slower velocity and the given
/// `beta L`.
pub fn co_propagating(beta_l: f64) -> DerivedQuantities {
    let mut d = reference();
    d.v2 = d.v1;
    d.walkoff_time = 0.0;
    d.with_beta(beta_l / d.length)
}

fn dft(values: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = values.len();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, sign * 2.0 * PI * m as f64 / n as f64))
        .collect();
    (0..n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * twiddle[(j * k) % n])
                .sum()
        })
        .collect()
}

/// Angular frequency of DFT bin `k`, with the Nyquist bin taken negative.
fn angular_frequency(k: usize, n: usize, dt: f64) -> f64 {
    let signed = if k < n.div_ceil(2) {
        k as f64
    } else {
        k as f64 - n as f64
    };
    2.0 * PI * signed / (n as f64 * dt)
}

/// Exact solution of the coupled equations on the periodic grid: every
/// Fourier component evolves under the 2x2 generator
/// `H = [[w d1, beta], [beta, w d2]]`, `d_i` being the group delay per unit
/// length relative to the grid frame.
pub fn exact_spectral(
    derived: &DerivedQuantities,
    input: &InputPulse,
    grid: &TimeGrid,
    z: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = grid.n_t;
    let start: Vec<Complex64> = grid.times().iter().map(|&t| input.amplitude(t)).collect();
    let spectrum = dft(&start, -1.0);
    let frame = match grid.frame {
        Frame::Lab => 0.0,
        Frame::Comoving => 1.0 / derived.v1.max(derived.v2),
    };
    let d = [1.0 / derived.v1 - frame, 1.0 / derived.v2 - frame];
    let beta = derived.beta;
    let own = input.channel.index();
    let (mut s1, mut s2) = (vec![Complex64::default(); n], vec![Complex64::default(); n]);
    for k in 0..n {
        let w = angular_frequency(k, n, grid.dt());
        let (h11, h22) = (w * d[0], w * d[1]);
        let mean = 0.5 * (h11 + h22);
        let half_gap = 0.5 * (h11 - h22);
        let kappa = (half_gap * half_gap + beta * beta).sqrt();
        let (sin_k, cos_k) = (kappa * z).sin_cos();
        let sinc = if kappa == 0.0 { z } else { sin_k / kappa };
        let i = Complex64::i();
        let global = Complex64::from_polar(1.0, -mean * z);
        // exp(-iHz) = e^{-i m z} [cos(kz) I - i sin(kz)/k (H - m I)]
        let m11 = global * (cos_k - i * sinc * half_gap);
        let m22 = global * (cos_k + i * sinc * half_gap);
        let m12 = global * (-i * sinc * beta);
        let (a, b) = if own == 0 {
            (spectrum[k], Complex64::default())
        } else {
            (Complex64::default(), spectrum[k])
        };
        s1[k] = m11 * a + m12 * b;
        s2[k] = m12 * a + m22 * b;
    }
    let scale = 1.0 / n as f64;
    let back = |s: &[Complex64]| dft(s, 1.0).into_iter().map(|v| v * scale).collect();
    (back(&s1), back(&s2))
}

pub fn relative_l2(a: (&[Complex64], &[Complex64]), b: (&[Complex64], &[Complex64])) -> f64 {
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (x, y) in a.0.iter().chain(a.1).zip(b.0.iter().chain(b.1)) {
        diff += (x - y).norm_sqr();
        norm += y.norm_sqr();
    }
    (diff / norm).sqrt()
}
