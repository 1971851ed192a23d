//! Bessel functions of the first kind, orders 0 and 1.
//!
//! Three regimes, each accurate to better than 1e-13 absolute:
//!
//! * `|x| <= 8`: ascending power series.
//! * `8 < |x| < 25`: Miller backward recurrence normalised with
//!   `J0 + 2 (J2 + J4 + ...) = 1`.
//! * `|x| >= 25`: Hankel asymptotic expansion, summed until the terms stop
//!   decreasing.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function of the first kind of order zero.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= SERIES_LIMIT {
        power_series(0, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        miller_recurrence(ax).0
    } else {
        hankel_asymptotic(0, ax)
    }
}

/// Bessel function of the first kind of order one. Odd in `x`.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= SERIES_LIMIT {
        power_series(1, ax)
    } else if ax < ASYMPTOTIC_LIMIT {
        miller_recurrence(ax).1
    } else {
        hankel_asymptotic(1, ax)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

/// Both orders at once; cheaper than two calls in the recurrence band.
pub fn bessel_j0_j1(x: f64) -> (f64, f64) {
    let ax = x.abs();
    if ax > SERIES_LIMIT && ax < ASYMPTOTIC_LIMIT {
        let (j0, j1) = miller_recurrence(ax);
        (j0, if x < 0.0 { -j1 } else { j1 })
    } else {
        (bessel_j0(x), bessel_j1(x))
    }
}

/// `sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)` for `n` in {0, 1}, `x >= 0`.
fn power_series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    for k in 1..80 {
        let k = k as f64;
        term *= -q / (k * (k + order as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > half {
            break;
        }
    }
    sum
}

/// Returns `(J0(x), J1(x))` for `x > 0` by downward recurrence from an even
/// starting order well above `x`.
fn miller_recurrence(x: f64) -> (f64, f64) {
    const RESCALE: f64 = 1e200;
    let start = 2 * ((x + 6.0 * x.cbrt() + 40.0) as usize / 2);
    let two_over_x = 2.0 / x;

    let mut above = 0.0; // J_{k+1}
    let mut current = 1e-300; // J_k, arbitrary seed
    let mut norm = 0.0; // 2 * (J_2 + J_4 + ...)
    let mut j1 = 0.0;
    let mut k = start;
    while k > 0 {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        k -= 1;
        if k == 1 {
            j1 = current;
        }
        if k.is_multiple_of(2) && k > 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE {
            current /= RESCALE;
            above /= RESCALE;
            norm /= RESCALE;
            j1 /= RESCALE;
        }
    }
    let j0 = current;
    let scale = j0 + norm;
    (j0 / scale, j1 / scale)
}

/// `J_n(x) ~ sqrt(2/(pi x)) (P cos chi - Q sin chi)`, `chi = x - (n/2 + 1/4) pi`.
fn hankel_asymptotic(order: u32, x: f64) -> f64 {
    let mu = 4.0 * (order * order) as f64;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * eight_x);
        if a.abs() >= last || a.abs() < 1e-18 {
            break;
        }
        last = a.abs();
        // P takes the even terms, Q the odd ones, with alternating signs.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let (s, c) = x.sin_cos();
    // cos/sin of chi expanded to avoid reducing a large argument minus pi/4.
    let (cos_chi, sin_chi) = if order == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(s + c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}
