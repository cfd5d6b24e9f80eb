use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use super::config::FileConfig;
use super::output::{format_float, sibling_path, CheckOutcome};
use super::{resolve_common, with_pool, CliError, CliResult, CommonArgs, Finished, Format, EXIT_OK};
use crate::scaling::{
    data_collapse, tfim_collapse_curves, transform_curves, CollapseCenter, CollapseCurve, CollapseOptions,
    CollapseResult, CurveSampling,
};

/// Header of a `--input` fixture.
pub const FIXTURE_HEADER: &str = "N,lambda,lambda_m,dEv_dlambda";

#[derive(Debug, Clone, Args)]
pub struct CollapseArgs {
    /// Ring sizes whose dE_v/dλ curves are computed (ignored with --input).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    /// Precomputed curves as CSV with header `N,lambda,lambda_m,dEv_dlambda`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub nu_min: Option<f64>,
    #[arg(long)]
    pub nu_max: Option<f64>,
    #[arg(long)]
    pub nu_steps: Option<usize>,
    #[arg(long, value_enum)]
    pub center: Option<Center>,
    /// Curves span λ_m ± half_width/N.
    #[arg(long)]
    pub half_width: Option<f64>,
    /// Samples per computed curve.
    #[arg(long)]
    pub points: Option<usize>,
    /// Where to write the rescaled curves at the best ν (default `<out>.curves.csv`).
    #[arg(long)]
    pub curves_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
pub enum Center {
    LambdaM,
    LambdaC,
}

impl From<Center> for CollapseCenter {
    fn from(c: Center) -> Self {
        match c {
            Center::LambdaM => CollapseCenter::LambdaM,
            Center::LambdaC => CollapseCenter::LambdaC,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseConfig {
    pub sizes: Vec<usize>,
    pub input: Option<PathBuf>,
    pub options: CollapseOptions,
    pub sampling: CurveSampling,
    pub curves_out: Option<PathBuf>,
    pub workers: usize,
}

/// Reads fixture curves; rows of one size must share `lambda_m` and be ordered by λ.
pub fn parse_fixture(text: &str) -> CliResult<Vec<CollapseCurve>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == FIXTURE_HEADER => {}
        other => {
            return Err(CliError::invalid(format!(
                "fixture header must be {FIXTURE_HEADER:?}, got {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut groups: BTreeMap<usize, (f64, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for (k, line) in lines.enumerate() {
        let bad = || CliError::invalid(format!("fixture row {}: cannot parse {line:?}", k + 2));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad());
        }
        let n: usize = fields[0].parse().map_err(|_| bad())?;
        let vals: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<_>>()?;
        let entry = groups.entry(n).or_insert((vals[1], Vec::new(), Vec::new()));
        if entry.0 != vals[1] {
            return Err(CliError::invalid(format!("fixture: size {n} has more than one lambda_m")));
        }
        entry.1.push(vals[0]);
        entry.2.push(vals[2]);
    }
    groups
        .into_iter()
        .map(|(n, (lm, l, v))| CollapseCurve::new(n, lm, l, v).map_err(CliError::from))
        .collect()
}

pub fn render_curves(curves: &[CollapseCurve], r: &CollapseResult) -> String {
    let mut s = String::from("N,x,y\n");
    for (n, pts) in transform_curves(curves, r.nu, r.center) {
        for (x, y) in pts {
            s.push_str(&format!("{n},{},{}\n", format_float(x), format_float(y)));
        }
    }
    s
}

pub fn resolve(args: &CollapseArgs) -> CliResult<(CollapseConfig, super::Resolved)> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let common = resolve_common(&args.common, &file, Format::Json)?;
    if common.format != Format::Json {
        return Err(CliError::invalid("collapse writes JSON only; curves go to --curves-out"));
    }
    let f = &file.collapse;
    let defaults = CollapseOptions::default();
    let center = match (&args.center, &f.center) {
        (Some(c), _) => (*c).into(),
        (None, Some(s)) => Center::from_str(s, true)
            .map_err(|_| CliError::invalid(format!("unknown center {s:?}")))?
            .into(),
        (None, None) => defaults.center,
    };
    let sampling = CurveSampling {
        half_width: args.half_width.or(f.half_width).unwrap_or(CurveSampling::default().half_width),
        points: args.points.or(f.points).unwrap_or(CurveSampling::default().points),
    };
    if !(sampling.half_width > 0.0) || sampling.points < 3 {
        return Err(CliError::invalid("curve sampling needs half_width > 0 and at least 3 points"));
    }
    let cfg = CollapseConfig {
        sizes: args
            .sizes
            .clone()
            .or_else(|| f.sizes.clone())
            .unwrap_or_else(|| vec![41, 101, 251, 401, 801]),
        input: args.input.clone(),
        options: CollapseOptions {
            nu_min: args.nu_min.or(f.nu_min).unwrap_or(defaults.nu_min),
            nu_max: args.nu_max.or(f.nu_max).unwrap_or(defaults.nu_max),
            steps: args.nu_steps.or(f.nu_steps).unwrap_or(defaults.steps),
            center,
        },
        sampling,
        curves_out: args
            .curves_out
            .clone()
            .or_else(|| common.out.as_ref().map(|o| sibling_path(o, ".curves.csv"))),
        workers: common.workers,
    };
    if cfg.input.is_none() && cfg.sizes.len() < 3 {
        return Err(CliError::invalid(format!(
            "data collapse needs at least 3 sizes, got {}",
            cfg.sizes.len()
        )));
    }
    Ok((cfg, common))
}

pub(crate) fn run(args: &CollapseArgs) -> CliResult<Finished> {
    let (cfg, common) = resolve(args)?;
    let curves = match &cfg.input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
            parse_fixture(&text)?
        }
        None => with_pool(cfg.workers, || tfim_collapse_curves(&cfg.sizes, &cfg.sampling))??,
    };
    let result = data_collapse(&curves, &cfg.options)?;
    let checks = vec![CheckOutcome::new(
        "interior residual minimum",
        result.interior_minimum,
        format!("ν = {:.6}, residual {:.3e}", result.nu, result.residual),
    )];
    let extra = cfg
        .curves_out
        .iter()
        .map(|p| (p.clone(), render_curves(&curves, &result)))
        .collect();
    Ok(Finished {
        command: "collapse",
        config: serde_json::json!({ "collapse": cfg, "common": common }),
        out: common.out,
        body: serde_json::to_string_pretty(&result).expect("result serializes") + "\n",
        extra,
        checks,
        code: EXIT_OK,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_round_trip() {
        let text = "N,lambda,lambda_m,dEv_dlambda\n10,0.9,0.95,1.0\n10,0.95,0.95,2.0\n10,1.0,0.95,1.5\n20,0.96,0.97,2.1\n20,0.97,0.97,2.5\n";
        let curves = parse_fixture(text).unwrap();
        assert_eq!(curves.len(), 2);
        assert_eq!(curves[0].n, 10);
        assert_eq!(curves[0].peak_value(), 2.0);
        assert!(parse_fixture("N,lambda\n").is_err());
        assert!(parse_fixture("N,lambda,lambda_m,dEv_dlambda\n10,0.9,0.95\n").is_err());
        assert!(parse_fixture("N,lambda,lambda_m,dEv_dlambda\n10,0.9,0.95,1\n10,0.95,0.96,1\n").is_err());
    }
}
