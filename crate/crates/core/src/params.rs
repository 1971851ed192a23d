//! Physical inputs, derived propagation coefficients and the operating-regime
//! validator.
//!
//! All quantities are SI. Group velocities are the canonical internal form;
//! the `g_i^2 N` coupling products are converted on construction with
//! `v_i = c Omega^2 / (g_i^2 N)`.

use serde::Serialize;
use thiserror::Error;

use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> ParamsError {
    ParamsError::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// How the group velocity of one field is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupVelocity {
    /// Velocity in m/s at the configured Rabi frequency.
    Direct(f64),
    /// Atom-field coupling product `g^2 N` in s^-2.
    Coupling(f64),
}

impl GroupVelocity {
    pub fn resolve(self, omega: f64) -> f64 {
        match self {
            GroupVelocity::Direct(v) => v,
            GroupVelocity::Coupling(g2n) => SPEED_OF_LIGHT * omega * omega / g2n,
        }
    }
}

/// Raw atomic and optical inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    /// Optical decay rate Gamma (rad/s), shared by both transitions.
    pub gamma: f64,
    /// Driving Rabi frequency Omega (rad/s).
    pub omega: f64,
    /// Group velocity of field 1 (m/s).
    pub v1: f64,
    /// Group velocity of field 2 (m/s).
    pub v2: f64,
    /// Atomic number density (m^-3).
    pub density: f64,
    /// Medium length L (m).
    pub length: f64,
    /// Resonant wavelength (m).
    pub wavelength: f64,
    /// Input pulse duration T (s).
    pub pulse_duration: f64,
}

impl PhysicalParams {
    /// Builds parameters from either representation of each group velocity.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gamma: f64,
        omega: f64,
        field1: GroupVelocity,
        field2: GroupVelocity,
        density: f64,
        length: f64,
        wavelength: f64,
        pulse_duration: f64,
    ) -> Result<Self, ParamsError> {
        for (name, gv) in [("field1", field1), ("field2", field2)] {
            let raw = match gv {
                GroupVelocity::Direct(v) | GroupVelocity::Coupling(v) => v,
            };
            if !(raw.is_finite() && raw > 0.0) {
                return Err(invalid(name, raw, "must be finite and strictly positive"));
            }
        }
        let params = Self {
            gamma,
            omega,
            v1: field1.resolve(omega),
            v2: field2.resolve(omega),
            density,
            length,
            wavelength,
            pulse_duration,
        };
        params.check()?;
        Ok(params)
    }

    /// Reference configuration for cold Rb-85: Gamma = 2pi x 3 MHz,
    /// Omega = 10 Gamma, density 1e12 cm^-3, L = 100 um, lambda = 0.8 um,
    /// T = 2 ns, v2 = 1e4 m/s, v1 = 0.3 v2.
    pub fn rb85_reference() -> Self {
        let gamma = 2.0 * std::f64::consts::PI * 3.0e6;
        Self {
            gamma,
            omega: 10.0 * gamma,
            v1: 3.0e3,
            v2: 1.0e4,
            density: 1.0e18,
            length: 1.0e-4,
            wavelength: 0.8e-6,
            pulse_duration: 2.0e-9,
        }
    }

    /// Checks the type invariants: every field finite and positive,
    /// both velocities below `c`.
    pub fn check(&self) -> Result<(), ParamsError> {
        let fields = [
            ("gamma", self.gamma),
            ("omega", self.omega),
            ("v1", self.v1),
            ("v2", self.v2),
            ("density", self.density),
            ("length", self.length),
            ("wavelength", self.wavelength),
            ("pulse_duration", self.pulse_duration),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(name, value, "must be finite and strictly positive"));
            }
        }
        for (name, v) in [("v1", self.v1), ("v2", self.v2)] {
            if v >= SPEED_OF_LIGHT {
                return Err(invalid(name, v, "group velocity must be below c"));
            }
        }
        Ok(())
    }

    /// `g_i^2 N` products (s^-2) implied by the stored velocities.
    pub fn coupling_products(&self) -> (f64, f64) {
        let num = SPEED_OF_LIGHT * self.omega * self.omega;
        (num / self.v1, num / self.v2)
    }

    /// Same medium driven at a different Rabi frequency: the coupling
    /// products are held fixed, so velocities scale as `Omega^2`.
    pub fn with_omega(&self, omega: f64) -> Self {
        let scale = (omega / self.omega).powi(2);
        Self {
            omega,
            v1: self.v1 * scale,
            v2: self.v2 * scale,
            ..*self
        }
    }
}

/// Propagation coefficients computed from [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub v1: f64,
    pub v2: f64,
    /// Parametric coupling beta = g1 g2 N / (c Omega) (1/m).
    pub beta: f64,
    /// Absorption coefficient k1 = g1^2 Gamma N / (c Omega^2) (1/m).
    pub k1: f64,
    pub k2: f64,
    /// Resonant cross-section 3 lambda^2 / (4 pi) (m^2).
    pub sigma: f64,
    /// Optical depth N sigma L.
    pub alpha: f64,
    /// EIT window (Omega^2 / Gamma) / sqrt(alpha) (rad/s).
    pub eit_width: f64,
    /// Relative group delay L |v1 - v2| / (v1 v2) (s).
    pub walkoff_time: f64,
    /// Medium length, carried along for the solvers (m).
    pub length: f64,
}

impl DerivedQuantities {
    /// Copy with a different coupling constant; `0.0` gives the decoupled
    /// reference propagation.
    pub fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..*self }
    }

    /// Inverse group velocities `(1/v1, 1/v2)` (s/m).
    pub fn slowness(&self) -> (f64, f64) {
        (1.0 / self.v1, 1.0 / self.v2)
    }

    /// Slowness of the faster field, used as the co-moving frame.
    pub fn fast_slowness(&self) -> f64 {
        1.0 / self.v1.max(self.v2)
    }
}

/// Computes every derived coefficient.
pub fn derive(params: &PhysicalParams) -> Result<DerivedQuantities, ParamsError> {
    params.check()?;
    let c = SPEED_OF_LIGHT;
    let omega2 = params.omega * params.omega;
    let (g1n, g2n) = params.coupling_products();

    let v1 = c * omega2 / g1n;
    let v2 = c * omega2 / g2n;
    let beta = (g1n * g2n).sqrt() / (c * params.omega);
    let k1 = g1n * params.gamma / (c * omega2);
    let k2 = g2n * params.gamma / (c * omega2);
    let sigma = 3.0 / (4.0 * std::f64::consts::PI) * params.wavelength * params.wavelength;
    let alpha = params.density * sigma * params.length;
    let eit_width = omega2 / params.gamma / alpha.sqrt();
    let walkoff_time = params.length * (v1 - v2).abs() / (v1 * v2);

    Ok(DerivedQuantities {
        v1,
        v2,
        beta,
        k1,
        k2,
        sigma,
        alpha,
        eit_width,
        walkoff_time,
        length: params.length,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Warn,
    Fail,
}

/// Relation a check is testing, `lhs <rel> rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">>")]
    MuchGreater,
    #[serde(rename = "<<")]
    MuchLess,
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub status: CheckStatus,
}

impl ConstraintCheck {
    fn new(name: &str, lhs: f64, rhs: f64, relation: Relation, strictness: f64) -> Self {
        let status = match relation {
            Relation::MuchGreater => graded(lhs > rhs, lhs >= strictness * rhs),
            Relation::MuchLess => graded(lhs < rhs, strictness * lhs <= rhs),
            Relation::Less => graded(lhs < rhs, true),
            Relation::AtLeast => graded(lhs >= rhs, true),
        };
        Self {
            name: name.to_owned(),
            lhs,
            rhs,
            relation,
            status,
        }
    }
}

fn graded(holds: bool, holds_strongly: bool) -> CheckStatus {
    match (holds, holds_strongly) {
        (false, _) => CheckStatus::Fail,
        (true, false) => CheckStatus::Warn,
        (true, true) => CheckStatus::Pass,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub strictness: f64,
    pub checks: Vec<ConstraintCheck>,
    pub overall: CheckStatus,
}

impl ConstraintReport {
    pub fn get(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Evaluates the regime inequalities. `strictness` is the ratio that turns a
/// "much greater/less than" into a pass; values that satisfy only the bare
/// inequality are reported as warnings.
pub fn validate(
    derived: &DerivedQuantities,
    params: &PhysicalParams,
    strictness: f64,
) -> ConstraintReport {
    let ratio = (params.omega / params.gamma).powi(2);
    let inv_sqrt_alpha = 1.0 / derived.alpha.sqrt();
    let t = params.pulse_duration;
    let l = params.length;

    let mut checks = vec![ConstraintCheck::new(
        "omega_vs_alpha",
        ratio,
        derived.alpha,
        Relation::MuchGreater,
        strictness,
    )];
    for (i, v) in [(1, derived.v1), (2, derived.v2)] {
        checks.push(ConstraintCheck::new(
            &format!("pulse_fits_window_i{i}"),
            t * v / l,
            inv_sqrt_alpha,
            Relation::MuchGreater,
            strictness,
        ));
    }
    for (i, v) in [(1, derived.v1), (2, derived.v2)] {
        checks.push(ConstraintCheck::new(
            &format!("pulse_shorter_than_medium_i{i}"),
            t * v / l,
            1.0,
            Relation::Less,
            strictness,
        ));
    }
    for (i, k) in [(1, derived.k1), (2, derived.k2)] {
        checks.push(ConstraintCheck::new(
            &format!("absorption_small_i{i}"),
            k * l,
            1.0,
            Relation::MuchLess,
            strictness,
        ));
    }
    checks.push(ConstraintCheck::new(
        "eit_bandwidth",
        derived.eit_width * t,
        1.0,
        Relation::AtLeast,
        strictness,
    ));

    let overall = checks
        .iter()
        .map(|c| c.status)
        .max()
        .unwrap_or(CheckStatus::Pass);
    ConstraintReport {
        strictness,
        checks,
        overall,
    }
}
