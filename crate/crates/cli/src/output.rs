//! Byte-stable CSV/JSON emission and all-or-nothing file output.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Version string written into every JSON file.
pub const VERSION: &str = concat!("timebin-sim ", env!("CARGO_PKG_VERSION"));

/// Formats like C's `%.9g`, with `-0` printed as `0`. Returns `None` for
/// NaN and infinities.
pub fn format_g9(x: f64) -> Option<String> {
    const DIGITS: i32 = 9;
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some("0".to_owned());
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let text = if (-4..DIGITS).contains(&exponent) {
        let decimals = (DIGITS - 1 - exponent).max(0) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            strip_zeros(mantissa.to_owned()),
            exponent.abs()
        )
    };
    Some(text)
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

#[derive(Debug)]
pub struct NonFinite {
    pub column: String,
    pub row: usize,
}

/// Builds a CSV document with a header row and LF line endings.
pub fn csv(header: &[&str], rows: &[Vec<f64>]) -> Result<String, NonFinite> {
    let mut out = header.join(",");
    out.push('\n');
    for (r, row) in rows.iter().enumerate() {
        let cells = row
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                format_g9(v).ok_or_else(|| NonFinite {
                    column: header[c].to_owned(),
                    row: r + 1,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Pretty JSON with keys in sorted order, a `version` field and a trailing
/// newline.
pub fn json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut map = serde_json::Map::new();
    map.insert("version".into(), Value::String(VERSION.into()));
    match serde_json::to_value(value)? {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("data".into(), other);
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(map))?;
    text.push('\n');
    Ok(text)
}

/// Files to be written together into one directory.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, String)>,
}

impl OutputSet {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes every file; if any write fails, the files already written by
    /// this call are removed again.
    pub fn commit(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let path = dir.join(name);
            let staging = dir.join(format!(".{name}.partial"));
            let result = fs::write(&staging, contents).and_then(|()| fs::rename(&staging, &path));
            if let Err(e) = result {
                let _ = fs::remove_file(&staging);
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(e);
            }
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (-2.0, "-2"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (-0.0, "0"),
            (1e-300, "1e-300"),
            (9.999999999, "10"),
            (99999.99999, "100000"),
            (23.333333333333336, "23.3333333"),
            (6.02214076e23, "6.02214076e+23"),
        ];
        for (x, expected) in cases {
            assert_eq!(format_g9(x).unwrap(), expected, "{x:e}");
        }
        assert!(format_g9(f64::NAN).is_none());
        assert!(format_g9(f64::INFINITY).is_none());
    }

    #[test]
    fn csv_layout() {
        let text = csv(&["a", "b"], &[vec![1.0, 0.25], vec![-0.0, 3e-7]]).unwrap();
        assert_eq!(text, "a,b\n1,0.25\n0,3e-07\n");
        let err = csv(&["a", "b"], &[vec![1.0, f64::NAN]]).unwrap_err();
        assert_eq!((err.column.as_str(), err.row), ("b", 1));
    }

    #[test]
    fn json_carries_version() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        let text = json(&S { x: 1.5 }).unwrap();
        assert!(text.contains("\"version\": \"timebin-sim "));
        assert!(text.ends_with("}\n"));
        assert!(text.contains("\"x\": 1.5"));
    }

    #[test]
    fn commit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut set = OutputSet::default();
        set.add("a.txt", "A".into());
        set.add("b.txt", "B".into());
        let paths = set.commit(dir.path()).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(fs::read_to_string(dir.path().join("b.txt")).unwrap(), "B");
    }

    #[test]
    fn failed_commit_leaves_nothing_behind() {
        let dir = tempfile::tempdir().unwrap();
        // A directory in the way of the second file makes its rename fail.
        fs::create_dir(dir.path().join("b.txt")).unwrap();
        fs::write(dir.path().join("b.txt").join("keep"), "x").unwrap();
        let mut set = OutputSet::default();
        set.add("a.txt", "A".into());
        set.add("b.txt", "B".into());
        assert!(set.commit(dir.path()).is_err());
        assert!(!dir.path().join("a.txt").exists());
        assert!(!dir.path().join(".b.txt.partial").exists());
    }
}
