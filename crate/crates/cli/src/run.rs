//! Subcommand execution. Every command computes its complete output set in
//! memory before anything is written, so a failing run leaves no files.

use serde::Serialize;
use thiserror::Error;
use timebin_core::analysis::{
    bell_scan, decompose_bins, AnalysisError, BellResult, BinDecomposition, PeakSettings, ScanGrid,
};
use timebin_core::params::{
    derive, validate, CheckStatus, ConstraintCheck, DerivedQuantities, ParamsError, PhysicalParams,
};
use timebin_core::propagation::{
    default_step_count, intensity, solve_at_snapshots, solve_numeric, FieldState, Frame, Method,
    PropagationError, PropagationResult, TimeGrid,
};
use timebin_core::Execution;

use crate::config::{format_ratio, RunConfig};
use crate::output::{csv, json, NonFinite, OutputSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Validate,
    Propagate,
    Analyze,
    BellScan,
    Sweep,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("non-finite value in column `{column}`, row {row}")]
    NonFinite { column: String, row: usize },
    #[error("cannot encode output: {0}")]
    Encode(#[from] serde_json::Error),
}

impl From<NonFinite> for RunError {
    fn from(e: NonFinite) -> Self {
        RunError::NonFinite {
            column: e.column,
            row: e.row,
        }
    }
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Params(_) => "invalid-parameters",
            RunError::Propagation(_) => "solver",
            RunError::Analysis(_) => "analysis",
            RunError::NonFinite { .. } => "non-finite-output",
            RunError::Encode(_) => "encode",
        }
    }
}

/// Result of a successful run.
#[derive(Debug)]
pub struct Outcome {
    pub files: OutputSet,
    /// Constraint validation failed and the caller did not allow it.
    pub constraints_failed: bool,
}

#[derive(Serialize)]
struct ConstraintsFile<'a> {
    strictness: f64,
    overall: CheckStatus,
    checks: &'a [ConstraintCheck],
    params: &'a PhysicalParams,
    derived: &'a DerivedQuantities,
}

#[derive(Serialize)]
struct PropagationFile<'a> {
    method: Method,
    frame: Frame,
    n_t: usize,
    steps: usize,
    dz: f64,
    dt: f64,
    z: Vec<f64>,
    flux: &'a [f64],
    max_flux_deviation: f64,
    derived: &'a DerivedQuantities,
}

#[derive(Serialize)]
struct BinsFile<'a> {
    omega_over_gamma: f64,
    z: f64,
    peak_settings: &'a PeakSettings,
    #[serde(flatten)]
    bins: &'a BinDecomposition,
}

#[derive(Serialize)]
struct ExtremumFile<'a> {
    grid: &'a ScanGrid,
    points: usize,
    extremum: &'a BellResult,
}

/// Output of one propagation plus its decoupled reference.
struct Propagated {
    derived: DerivedQuantities,
    grid: TimeGrid,
    run: PropagationResult,
    reference: PropagationResult,
}

fn propagate(config: &RunConfig, params: &PhysicalParams) -> Result<Propagated, RunError> {
    let derived = derive(params)?;
    let derived = derived.with_beta(derived.beta * config.beta_scale);
    let solver = &config.solver;
    let grid = TimeGrid::for_pulse(
        &derived,
        &config.input,
        solver.n_t,
        solver.window_padding,
        solver.frame,
    )?;
    let solve = |d: &DerivedQuantities| -> Result<PropagationResult, PropagationError> {
        match solver.method {
            Method::Numeric => {
                let steps = solver.n_z.unwrap_or_else(|| default_step_count(d));
                solve_numeric(d, &config.input, &grid, steps, &solver.snapshots)
            }
            method => solve_at_snapshots(
                method,
                d,
                &config.input,
                &grid,
                &solver.snapshots,
                Execution::default(),
            ),
        }
    };
    let run = solve(&derived)?;
    let reference = solve(&derived.with_beta(0.0))?;
    Ok(Propagated {
        derived,
        grid,
        run,
        reference,
    })
}

fn pulse_csv(output: &FieldState, reference: &FieldState) -> Result<String, RunError> {
    let (i1, i2) = intensity(output);
    let (r1, _) = intensity(reference);
    let rows: Vec<Vec<f64>> = (0..output.len())
        .map(|k| vec![output.times[k] * 1e9, i1[k], i2[k], r1[k]])
        .collect();
    Ok(csv(&["t_ns", "I1", "I2", "I1_ref"], &rows)?)
}

fn snapshots_csv(run: &PropagationResult) -> Result<String, RunError> {
    let mut rows = Vec::new();
    for state in &run.states {
        let (i1, i2) = intensity(state);
        for k in 0..state.len() {
            rows.push(vec![state.z * 1e6, state.times[k] * 1e9, i1[k], i2[k]]);
        }
    }
    Ok(csv(&["z_um", "t_ns", "I1", "I2"], &rows)?)
}

fn propagation_json(p: &Propagated) -> Result<String, RunError> {
    Ok(json(&PropagationFile {
        method: p.run.method,
        frame: p.grid.frame,
        n_t: p.grid.n_t,
        steps: p.run.steps,
        dz: p.run.dz,
        dt: p.run.dt,
        z: p.run.states.iter().map(|s| s.z).collect(),
        flux: &p.run.flux,
        max_flux_deviation: p.run.max_flux_deviation(),
        derived: &p.derived,
    })?)
}

fn bins_json(
    bins: &BinDecomposition,
    config: &RunConfig,
    params: &PhysicalParams,
    z: f64,
) -> Result<String, RunError> {
    Ok(json(&BinsFile {
        omega_over_gamma: params.omega / params.gamma,
        z,
        peak_settings: &config.peaks,
        bins,
    })?)
}

fn check_finite_json(bins: &BinDecomposition) -> Result<(), RunError> {
    let values = [
        bins.boundary_time,
        bins.p_early,
        bins.p_late,
        bins.leakage,
        bins.separation,
        bins.entropy,
        bins.concurrence,
    ];
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(RunError::NonFinite {
            column: "bins".into(),
            row: 0,
        })
    }
}

/// Runs `command`. `allow_invalid` keeps a failing constraint report from
/// being flagged.
pub fn run(command: Command, config: &RunConfig, allow_invalid: bool) -> Result<Outcome, RunError> {
    let mut files = OutputSet::default();
    let mut constraints_failed = false;
    match command {
        Command::Validate => {
            let derived = derive(&config.params)?;
            let report = validate(&derived, &config.params, config.strictness);
            constraints_failed = report.overall == CheckStatus::Fail && !allow_invalid;
            files.add(
                "constraints.json",
                json(&ConstraintsFile {
                    strictness: report.strictness,
                    overall: report.overall,
                    checks: &report.checks,
                    params: &config.params,
                    derived: &derived,
                })?,
            );
        }
        Command::Propagate => {
            let p = propagate(config, &config.params)?;
            files.add(
                "pulse.csv",
                pulse_csv(p.run.output(), p.reference.output())?,
            );
            files.add("propagation.json", propagation_json(&p)?);
            if p.run.states.len() > 2 {
                files.add("snapshots.csv", snapshots_csv(&p.run)?);
            }
        }
        Command::Analyze => {
            let p = propagate(config, &config.params)?;
            let output = p.run.output();
            let bins = decompose_bins(output, &config.peaks)?;
            check_finite_json(&bins)?;
            files.add(
                "bins.json",
                bins_json(&bins, config, &config.params, output.z)?,
            );
        }
        Command::BellScan => {
            let scan = bell_scan(&config.scan)?;
            let (header, rows): (&[&str], Vec<Vec<f64>>) = if config.scan.complex {
                (
                    &["x1", "y1", "x2", "y2", "B"],
                    scan.table
                        .iter()
                        .map(|p| vec![p.alpha1.re, p.alpha1.im, p.alpha2.re, p.alpha2.im, p.b])
                        .collect(),
                )
            } else {
                (
                    &["x1", "x2", "B"],
                    scan.table
                        .iter()
                        .map(|p| vec![p.alpha1.re, p.alpha2.re, p.b])
                        .collect(),
                )
            };
            files.add("bell_scan.csv", csv(header, &rows)?);
            files.add(
                "bell_extremum.json",
                json(&ExtremumFile {
                    grid: &config.scan,
                    points: scan.table.len(),
                    extremum: &scan.extremum,
                })?,
            );
        }
        Command::Sweep => {
            let mut summary = Vec::with_capacity(config.sweep.len());
            for &ratio in &config.sweep {
                let params = config.params.with_omega(ratio * config.params.gamma);
                let p = propagate(config, &params)?;
                let output = p.run.output();
                let bins = decompose_bins(output, &config.peaks)?;
                check_finite_json(&bins)?;
                let tag = format_ratio(ratio);
                files.add(
                    format!("pulse_omega_{tag}.csv"),
                    pulse_csv(output, p.reference.output())?,
                );
                files.add(
                    format!("bins_omega_{tag}.json"),
                    bins_json(&bins, config, &params, output.z)?,
                );
                summary.push(vec![
                    ratio,
                    bins.entropy,
                    bins.concurrence,
                    bins.leakage,
                    bins.separation * 1e9,
                ]);
            }
            files.add(
                "sweep_summary.csv",
                csv(
                    &[
                        "omega_over_gamma",
                        "entropy",
                        "concurrence",
                        "leakage",
                        "separation_ns",
                    ],
                    &summary,
                )?,
            );
        }
    }
    Ok(Outcome {
        files,
        constraints_failed,
    })
}
