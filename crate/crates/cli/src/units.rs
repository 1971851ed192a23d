//! Parsing of unit-suffixed quantities such as `"2pi * 3 MHz"` or `"100 um"`.

use std::f64::consts::PI;
use std::fmt;

/// Physical dimension a configuration key expects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// s^-1: Hz, kHz, MHz, GHz, rad/s, s^-1.
    Rate,
    Time,
    Length,
    Density,
    Velocity,
    /// s^-2, used for the `g^2 N` coupling products.
    RateSquared,
}

impl Dimension {
    /// Unit names with their power-of-ten scale to SI.
    fn units(self) -> &'static [(&'static str, i32)] {
        match self {
            Dimension::Rate => &[
                ("Hz", 0),
                ("kHz", 3),
                ("MHz", 6),
                ("GHz", 9),
                ("rad/s", 0),
                ("s^-1", 0),
            ],
            Dimension::Time => &[("s", 0), ("ms", -3), ("us", -6), ("ns", -9), ("ps", -12)],
            Dimension::Length => &[("m", 0), ("mm", -3), ("um", -6), ("nm", -9)],
            Dimension::Density => &[("m^-3", 0), ("cm^-3", 6)],
            Dimension::Velocity => &[("m/s", 0)],
            Dimension::RateSquared => &[("s^-2", 0)],
        }
    }

    fn allowed(self) -> String {
        self.units()
            .iter()
            .map(|(u, _)| *u)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Rate => "rate",
            Dimension::Time => "time",
            Dimension::Length => "length",
            Dimension::Density => "density",
            Dimension::Velocity => "velocity",
            Dimension::RateSquared => "squared rate",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnitError {
    /// The text is not `[2pi *] <number> <unit>`.
    Malformed(String),
    /// The unit exists but has the wrong dimension, or is unknown.
    Mismatch {
        unit: String,
        expected: Dimension,
        allowed: String,
    },
}

impl fmt::Display for UnitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitError::Malformed(text) => {
                write!(f, "expected `[2pi *] <number> <unit>`, got `{text}`")
            }
            UnitError::Mismatch {
                unit,
                expected,
                allowed,
            } => write!(
                f,
                "unit `{unit}` is not a {expected} unit (allowed: {allowed})"
            ),
        }
    }
}

/// Multiplicative factors in front of the quantity: `2pi`, `pi` or plain
/// numbers, separated by `*`.
fn factor(token: &str) -> Option<f64> {
    match token {
        "2pi" => Some(2.0 * PI),
        "pi" => Some(PI),
        _ => token.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

/// Splits `"<factors> * <symbol>"` into the product of the factors and the
/// final term.
fn split_factors(text: &str) -> Result<(f64, &str), UnitError> {
    let malformed = || UnitError::Malformed(text.to_owned());
    let mut parts: Vec<&str> = text.split('*').map(str::trim).collect();
    let last = parts.pop().ok_or_else(malformed)?;
    let mut scale = 1.0;
    for p in parts {
        scale *= factor(p).ok_or_else(malformed)?;
    }
    Ok((scale, last))
}

/// Parses `[factor *]... <number> <unit>` into SI.
pub fn parse_quantity(text: &str, dimension: Dimension) -> Result<f64, UnitError> {
    let malformed = || UnitError::Malformed(text.to_owned());
    let (scale, term) = split_factors(text.trim())?;
    let (number, unit) = term.split_once(char::is_whitespace).ok_or_else(malformed)?;
    // Shifting the decimal exponent before parsing rounds once, so
    // "0.8 um" is the same double as 0.8e-6.
    let (mantissa, exponent) = number.split_once(['e', 'E']).unwrap_or((number, "0"));
    let exponent: i32 = exponent.parse().map_err(|_| malformed())?;
    mantissa.parse::<f64>().map_err(|_| malformed())?;
    let unit = unit.trim();
    let (_, power) = dimension
        .units()
        .iter()
        .find(|(u, _)| *u == unit)
        .ok_or_else(|| UnitError::Mismatch {
            unit: unit.to_owned(),
            expected: dimension,
            allowed: dimension.allowed(),
        })?;
    let si: f64 = format!("{mantissa}e{}", exponent + power)
        .parse()
        .map_err(|_| malformed())?;
    if !si.is_finite() {
        return Err(malformed());
    }
    Ok(scale * si)
}

/// Parses a rate that may be given relative to a named reference, e.g.
/// `"10 * gamma"`.
pub fn parse_relative_rate(text: &str, symbol: &str, reference: f64) -> Result<f64, UnitError> {
    let (scale, term) = split_factors(text.trim())?;
    if term == symbol {
        Ok(scale * reference)
    } else {
        parse_quantity(text, Dimension::Rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs()
    }

    #[test]
    fn plain_quantities() {
        assert!(close(
            parse_quantity("100 um", Dimension::Length).unwrap(),
            1e-4
        ));
        assert!(close(
            parse_quantity("0.8 um", Dimension::Length).unwrap(),
            0.8e-6
        ));
        assert!(close(
            parse_quantity("2 ns", Dimension::Time).unwrap(),
            2e-9
        ));
        assert!(close(
            parse_quantity("1e12 cm^-3", Dimension::Density).unwrap(),
            1e18
        ));
        assert!(close(
            parse_quantity("3e3 m/s", Dimension::Velocity).unwrap(),
            3e3
        ));
        assert!(close(
            parse_quantity("4.5e16 s^-2", Dimension::RateSquared).unwrap(),
            4.5e16
        ));
    }

    #[test]
    fn conversion_rounds_once() {
        assert_eq!(parse_quantity("0.8 um", Dimension::Length).unwrap(), 0.8e-6);
        assert_eq!(parse_quantity("100 um", Dimension::Length).unwrap(), 1e-4);
        assert_eq!(
            parse_quantity("1.5E2 nm", Dimension::Length).unwrap(),
            1.5e-7
        );
    }

    #[test]
    fn frequency_units_are_not_scaled_implicitly() {
        assert!(close(
            parse_quantity("3 MHz", Dimension::Rate).unwrap(),
            3e6
        ));
        let gamma = parse_quantity("2pi * 3 MHz", Dimension::Rate).unwrap();
        assert!(close(gamma, 2.0 * PI * 3e6));
        assert!(close(
            parse_quantity("1.2e8 rad/s", Dimension::Rate).unwrap(),
            1.2e8
        ));
    }

    #[test]
    fn relative_rate() {
        let gamma = 2.0 * PI * 3e6;
        let omega = parse_relative_rate("10 * gamma", "gamma", gamma).unwrap();
        assert!(close(omega, 188_495_559.215_387_58));
        assert!(close(
            parse_relative_rate("gamma", "gamma", gamma).unwrap(),
            gamma
        ));
        assert!(close(
            parse_relative_rate("2pi * 30 MHz", "gamma", gamma).unwrap(),
            2.0 * PI * 3e7
        ));
    }

    #[test]
    fn rejects_wrong_dimension() {
        let err = parse_quantity("2 ns", Dimension::Length).unwrap_err();
        assert!(matches!(err, UnitError::Mismatch { ref unit, .. } if unit == "ns"));
        assert!(err.to_string().contains("um"));
    }

    #[test]
    fn rejects_malformed_text() {
        for text in [
            "100",
            "um",
            "abc um",
            "3 * * 2 ns",
            "inf ns",
            "x * 2 ns",
            "",
        ] {
            assert!(
                matches!(
                    parse_quantity(text, Dimension::Time),
                    Err(UnitError::Malformed(_))
                ),
                "{text}"
            );
        }
    }
}
