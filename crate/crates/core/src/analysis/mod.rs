//! Output analysis: time-bin structure of the field-1 output and the
//! two-mode Wigner function / Bell combination.

mod bell;
mod bins;

pub use bell::{
    bell_combination, bell_scan, bell_scan_with, wigner, BellResult, BellScan, ScanGrid, ScanPoint,
};
pub use bins::{binary_entropy, decompose_bins, BinDecomposition, PeakSettings};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("field 1 carries no energy; nothing to decompose")]
    EmptyField,
    #[error("invalid analysis setting: {0}")]
    InvalidSetting(String),
}
