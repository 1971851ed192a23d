use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::AnalysisError;
use crate::Execution;

/// Two-mode Wigner function of the split single photon with zero relative
/// phase between the bins:
/// `W = 4/pi^2 (2|a1 + a2|^2 - 1) exp(-2|a1|^2 - 2|a2|^2)`.
pub fn wigner(alpha1: Complex64, alpha2: Complex64) -> f64 {
    let envelope = (-2.0 * alpha1.norm_sqr() - 2.0 * alpha2.norm_sqr()).exp();
    4.0 / (PI * PI) * (2.0 * (alpha1 + alpha2).norm_sqr() - 1.0) * envelope
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellResult {
    pub b: f64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    /// `|b| > 2`.
    pub violated: bool,
}

/// `B = pi^2/4 [W(0,0) + W(a1,0) + W(0,a2) - W(a1,a2)]`; local theories
/// bound it to `[-2, 2]`.
pub fn bell_combination(alpha1: Complex64, alpha2: Complex64) -> BellResult {
    let zero = Complex64::default();
    let b = PI * PI / 4.0
        * (wigner(zero, zero) + wigner(alpha1, zero) + wigner(zero, alpha2)
            - wigner(alpha1, alpha2));
    BellResult {
        b,
        alpha1,
        alpha2,
        violated: b.abs() > 2.0,
    }
}

/// Uniform grid `min, min + step, ..., max` applied to every scanned
/// quadrature. With `complex` set the imaginary quadratures are scanned too,
/// otherwise the amplitudes are real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
    pub complex: bool,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self {
            min: 0.0,
            max: 1.0,
            step: 0.01,
            complex: false,
        }
    }
}

impl ScanGrid {
    pub fn check(&self) -> Result<(), AnalysisError> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.max >= self.min
            && (self.step > 0.0 && self.step.is_finite() || self.max == self.min);
        if ok {
            Ok(())
        } else {
            Err(AnalysisError::InvalidSetting(format!(
                "scan grid needs finite min <= max and step > 0, got [{}, {}] step {}",
                self.min, self.max, self.step
            )))
        }
    }

    /// Grid values along one quadrature.
    pub fn axis(&self) -> Vec<f64> {
        if self.max == self.min {
            return vec![self.min];
        }
        let n = ((self.max - self.min) / self.step).round() as usize;
        (0..=n).map(|k| self.min + k as f64 * self.step).collect()
    }

    /// Number of scan points.
    pub fn len(&self) -> usize {
        let per_axis = self.axis().len();
        per_axis.pow(if self.complex { 4 } else { 2 })
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn point(&self, axis: &[f64], index: usize) -> (Complex64, Complex64) {
        let n = axis.len();
        if self.complex {
            let (x1, rest) = (index / (n * n * n), index % (n * n * n));
            let (y1, rest) = (rest / (n * n), rest % (n * n));
            let (x2, y2) = (rest / n, rest % n);
            (
                Complex64::new(axis[x1], axis[y1]),
                Complex64::new(axis[x2], axis[y2]),
            )
        } else {
            (
                Complex64::new(axis[index / n], 0.0),
                Complex64::new(axis[index % n], 0.0),
            )
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellScan {
    /// Point of largest `|B|`.
    pub extremum: BellResult,
    /// Every grid point, ordered lexicographically by `(x1, [y1,] x2, [y2])`.
    pub table: Vec<ScanPoint>,
}

pub fn bell_scan(grid: &ScanGrid) -> Result<BellScan, AnalysisError> {
    bell_scan_with(grid, Execution::default())
}

/// Evaluates `B` over the grid. The extremum is the largest `|B|`; ties go
/// to the lexicographically first point, so the result does not depend on
/// the execution policy.
pub fn bell_scan_with(grid: &ScanGrid, exec: Execution) -> Result<BellScan, AnalysisError> {
    grid.check()?;
    let axis = grid.axis();
    let table = exec.map(grid.len(), |k| {
        let (alpha1, alpha2) = grid.point(&axis, k);
        ScanPoint {
            alpha1,
            alpha2,
            b: bell_combination(alpha1, alpha2).b,
        }
    });
    let best = table
        .iter()
        .reduce(|best, p| if p.b.abs() > best.b.abs() { p } else { best })
        .ok_or_else(|| AnalysisError::InvalidSetting("scan grid is empty".into()))?;
    let extremum = bell_combination(best.alpha1, best.alpha2);
    Ok(BellScan { extremum, table })
}
