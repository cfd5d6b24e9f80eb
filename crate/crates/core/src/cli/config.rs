use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{parse_size, CliError, CliResult, Format};
use crate::model::SystemSize;

/// Contents of a `--config` TOML file. Top-level keys apply to every subcommand;
/// the per-command tables hold that command's flags under their snake_case names.
///
/// ```toml
/// workers = 4
///
/// [sweep]
/// sizes = [41, 101, "inf"]
/// lambda_min = 0.6
/// lambda_max = 1.4
/// steps = 201
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub sweep: SweepFile,
    #[serde(default)]
    pub scaling: ScalingFile,
    #[serde(default)]
    pub collapse: CollapseFile,
    #[serde(default)]
    pub oracle_check: OracleFile,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub sizes: Option<Vec<SizeEntry>>,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    pub steps: Option<usize>,
    pub mode: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingFile {
    pub sizes: Option<Vec<usize>>,
    pub critical_sizes: Option<Vec<usize>>,
    pub a2_exponents: Option<Vec<f64>>,
    pub side: Option<String>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseFile {
    pub sizes: Option<Vec<usize>>,
    pub nu_min: Option<f64>,
    pub nu_max: Option<f64>,
    pub nu_steps: Option<usize>,
    pub center: Option<String>,
    pub half_width: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub max_n: Option<usize>,
    pub lambdas: Option<Vec<f64>>,
    pub tol: Option<f64>,
}

/// A size in a config file: an integer, or a string such as `"inf"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SizeEntry {
    Number(usize),
    Text(String),
}

impl SizeEntry {
    pub fn resolve(&self) -> CliResult<SystemSize> {
        match self {
            SizeEntry::Number(n) => parse_size(&n.to_string()),
            SizeEntry::Text(s) => parse_size(s),
        }
        .map_err(CliError::invalid)
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(serde::de::Error::custom(format!("unknown format {other:?}"))),
        }
    }
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::invalid(format!("bad config {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tables_and_sizes() {
        let cfg: FileConfig = toml::from_str(
            r#"
            workers = 3
            format = "json"
            [sweep]
            sizes = [41, "inf"]
            steps = 11
            [oracle_check]
            max_n = 8
            "#,
        )
        .unwrap();
        assert_eq!(cfg.workers, Some(3));
        assert_eq!(cfg.format, Some(Format::Json));
        let sizes: Vec<_> = cfg.sweep.sizes.unwrap().iter().map(|s| s.resolve().unwrap()).collect();
        assert_eq!(sizes, vec![SystemSize::Finite(41), SystemSize::Thermodynamic]);
        assert_eq!(cfg.oracle_check.max_n, Some(8));
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(toml::from_str::<FileConfig>("wokers = 3").is_err());
    }
}
