use serde::Serialize;

use super::AnalysisError;
use crate::propagation::{intensity, FieldState};

/// Peak detection settings for [`decompose_bins`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakSettings {
    /// Minimum peak height relative to the global maximum of the smoothed
    /// intensity.
    pub threshold: f64,
    /// Width (samples) of the centered moving average applied before peak
    /// search. `1` disables smoothing.
    pub smoothing: usize,
}

impl Default for PeakSettings {
    fn default() -> Self {
        Self {
            threshold: 0.01,
            smoothing: 5,
        }
    }
}

/// Early/late split of the field-1 output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinDecomposition {
    /// Time separating the early and late bin (s, lab frame).
    pub boundary_time: f64,
    pub p_early: f64,
    pub p_late: f64,
    /// Fraction of the total output energy in field 2.
    pub leakage: f64,
    pub n_peaks: usize,
    /// Times of every detected field-1 peak, in time order (s).
    pub peak_times: Vec<f64>,
    /// Gap between the two dominant peaks (s); zero with fewer than two.
    pub separation: f64,
    /// `-p_e log2 p_e - p_l log2 p_l` (bits).
    pub entropy: f64,
    /// `2 sqrt(p_e p_l)`.
    pub concurrence: f64,
}

/// Binary Shannon entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(p) + h(1.0 - p)
}

fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    let n = values.len();
    (0..n)
        .map(|k| {
            let lo = k.saturating_sub(half);
            let hi = (k + half).min(n - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Splits the field-1 output into early and late bins at the intensity
/// minimum between its two dominant peaks.
///
/// With fewer than two peaks the whole pulse is one bin (`p_early = 1`) and
/// the boundary sits at the trailing -60 dB point.
pub fn decompose_bins(
    state: &FieldState,
    settings: &PeakSettings,
) -> Result<BinDecomposition, AnalysisError> {
    if settings.smoothing == 0 || !(settings.threshold >= 0.0 && settings.threshold < 1.0) {
        return Err(AnalysisError::InvalidSetting(format!(
            "threshold must be in [0, 1) and smoothing >= 1, got {} and {}",
            settings.threshold, settings.smoothing
        )));
    }
    let (i1, i2) = intensity(state);
    let energy1: f64 = i1.iter().sum();
    let energy2: f64 = i2.iter().sum();
    if !(energy1 > 0.0 && energy1.is_finite()) {
        return Err(AnalysisError::EmptyField);
    }
    let leakage = energy2 / (energy1 + energy2);

    let smooth = moving_average(&i1, settings.smoothing);
    let max = smooth.iter().cloned().fold(0.0, f64::max);
    let floor = settings.threshold * max;
    let peaks: Vec<usize> = (1..smooth.len().saturating_sub(1))
        .filter(|&k| smooth[k] > smooth[k - 1] && smooth[k] >= smooth[k + 1] && smooth[k] >= floor)
        .collect();
    let peak_times = peaks.iter().map(|&k| state.times[k]).collect();

    let (boundary, separation) = if peaks.len() >= 2 {
        let mut ranked = peaks.clone();
        ranked.sort_by(|&a, &b| smooth[b].total_cmp(&smooth[a]).then(a.cmp(&b)));
        let (first, second) = (ranked[0].min(ranked[1]), ranked[0].max(ranked[1]));
        let valley = (first..=second)
            .min_by(|&a, &b| smooth[a].total_cmp(&smooth[b]).then(a.cmp(&b)))
            .unwrap_or(first);
        (valley, state.times[second] - state.times[first])
    } else {
        let edge = 1e-6 * max;
        let last = smooth.iter().rposition(|&v| v >= edge).unwrap_or(0);
        ((last + 1).min(i1.len() - 1), 0.0)
    };

    let (p_early, p_late) = if peaks.len() >= 2 {
        let early: f64 = i1[..boundary].iter().sum();
        let late: f64 = i1[boundary..].iter().sum();
        (early / (early + late), late / (early + late))
    } else {
        (1.0, 0.0)
    };

    Ok(BinDecomposition {
        boundary_time: state.times[boundary],
        p_early,
        p_late,
        leakage,
        n_peaks: peaks.len(),
        peak_times,
        separation,
        entropy: binary_entropy(p_early),
        concurrence: 2.0 * (p_early * p_late).sqrt(),
    })
}
