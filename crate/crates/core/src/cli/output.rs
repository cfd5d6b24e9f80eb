use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use super::{CliError, CliResult, EXIT_NUMERICAL};

/// Provenance record written alongside every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub duration_seconds: f64,
    pub checks: Vec<CheckOutcome>,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, elapsed: Duration, checks: Vec<CheckOutcome>) -> Self {
        RunManifest {
            tool: "tfim".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            duration_seconds: elapsed.as_secs_f64(),
            checks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Round-trip representation: 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Rounds to 15 significant digits.
pub(crate) fn sig15(x: f64) -> f64 {
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub(crate) fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub(crate) fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError {
        code: EXIT_NUMERICAL,
        message: format!("cannot write {}: {e}", path.display()),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn fifteen_digits() {
        assert_eq!(sig15(std::f64::consts::PI), 3.14159265358979);
        assert_eq!(sig15(0.270_189_823_046_234_06), 0.270189823046234);
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, "first\n").unwrap();
        write_atomic(&p, "second\n").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        assert_eq!(manifest_path(&p), dir.path().join("a.csv.manifest.json"));
    }
}
