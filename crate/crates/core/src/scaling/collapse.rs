//! Data collapse of dE_v/dλ curves under `x = N^{1/ν}(λ − λ_center)`,
//! `y = dE_v/dλ − dE_v/dλ|_{λ_m}`.
//!
//! The quality of a trial ν is the mean squared vertical distance of every point to the
//! piecewise-linear interpolant of each other curve, restricted to the x-range shared
//! by all curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::entropy_derivative;
use crate::error::{Error, Result};
use crate::model::{ModelPoint, LAMBDA_C};
use crate::scaling::lambda_m::locate_lambda_m;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseCurve {
    pub n: usize,
    pub lambda_m: f64,
    /// Strictly increasing couplings, one of which equals `lambda_m`.
    pub lambdas: Vec<f64>,
    /// dE_v/dλ at each coupling.
    pub values: Vec<f64>,
}

impl CollapseCurve {
    pub fn new(n: usize, lambda_m: f64, lambdas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if lambdas.len() != values.len() || lambdas.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "curve N = {n} needs at least two (λ, y) pairs of matching length"
            )));
        }
        if lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(format!("curve N = {n}: couplings must increase")));
        }
        let curve = CollapseCurve {
            n,
            lambda_m,
            lambdas,
            values,
        };
        curve.peak_index()?;
        Ok(curve)
    }

    fn peak_index(&self) -> Result<usize> {
        let tol = 1e-12 * self.lambda_m.abs().max(1.0);
        self.lambdas
            .iter()
            .position(|l| (l - self.lambda_m).abs() <= tol)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "curve N = {} does not contain its λ_m = {} sample",
                    self.n, self.lambda_m
                ))
            })
    }

    /// dE_v/dλ at λ_m.
    pub fn peak_value(&self) -> f64 {
        self.values[self.peak_index().expect("validated on construction")]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseCenter {
    /// Each curve centred on its own pseudo-critical point.
    LambdaM,
    /// All curves centred on λ_c = 1.
    LambdaC,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    pub nu_min: f64,
    pub nu_max: f64,
    /// Number of grid points in `[nu_min, nu_max]`.
    pub steps: usize,
    pub center: CollapseCenter,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions {
            nu_min: 0.7,
            nu_max: 1.3,
            steps: 61,
            center: CollapseCenter::LambdaM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseResult {
    pub nu: f64,
    pub residual: f64,
    /// `(nu_min, nu_max, steps)` of the scan.
    pub nu_grid: (f64, f64, usize),
    pub curves_used: Vec<usize>,
    /// Residual at every grid point.
    pub scan: Vec<(f64, f64)>,
    /// True when the grid minimum is not at either end of the scan.
    pub interior_minimum: bool,
    pub center: CollapseCenter,
}

fn center_of(curve: &CollapseCurve, center: CollapseCenter) -> f64 {
    match center {
        CollapseCenter::LambdaM => curve.lambda_m,
        CollapseCenter::LambdaC => LAMBDA_C,
    }
}

/// Rescaled `(x, y)` points of every curve for a trial ν.
pub fn transform_curves(curves: &[CollapseCurve], nu: f64, center: CollapseCenter) -> Vec<(usize, Vec<(f64, f64)>)> {
    curves
        .iter()
        .map(|c| {
            let scale = (c.n as f64).powf(1.0 / nu);
            let x0 = center_of(c, center);
            let y0 = c.peak_value();
            let pts = c
                .lambdas
                .iter()
                .zip(&c.values)
                .map(|(l, v)| (scale * (l - x0), v - y0))
                .collect();
            (c.n, pts)
        })
        .collect()
}

fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    let k = pts.partition_point(|p| p.0 < x);
    if k == 0 {
        return pts[0].1;
    }
    if k == pts.len() {
        return pts[pts.len() - 1].1;
    }
    let (x0, y0) = pts[k - 1];
    let (x1, y1) = pts[k];
    if x1 == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Collapse residual for one trial ν.
pub fn collapse_residual(curves: &[CollapseCurve], nu: f64, center: CollapseCenter) -> Result<f64> {
    let tr = transform_curves(curves, nu, center);
    let lo = tr.iter().map(|(_, p)| p[0].0).fold(f64::NEG_INFINITY, f64::max);
    let hi = tr.iter().map(|(_, p)| p[p.len() - 1].0).fold(f64::INFINITY, f64::min);
    if !(lo < hi) {
        return Err(Error::Collapse(format!("curves share no x-range at ν = {nu}")));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (i, (_, pts)) in tr.iter().enumerate() {
        for &(x, y) in pts.iter().filter(|p| p.0 >= lo && p.0 <= hi) {
            for (j, (_, other)) in tr.iter().enumerate() {
                if i != j {
                    let d = y - interpolate(other, x);
                    total += d * d;
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::Collapse(format!("no samples inside the shared x-range at ν = {nu}")));
    }
    Ok(total / count as f64)
}

/// Scan ν over a uniform grid, then refine the grid minimum with one parabolic step.
pub fn data_collapse(curves: &[CollapseCurve], opts: &CollapseOptions) -> Result<CollapseResult> {
    if curves.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "data collapse needs at least 3 system sizes, got {}",
            curves.len()
        )));
    }
    if !(opts.nu_min > 0.0 && opts.nu_max > opts.nu_min && opts.steps >= 3) {
        return Err(Error::InvalidArgument(format!(
            "ν grid needs 0 < nu_min < nu_max and at least 3 steps, got {opts:?}"
        )));
    }
    let step = (opts.nu_max - opts.nu_min) / (opts.steps - 1) as f64;
    let scan = (0..opts.steps)
        .map(|k| {
            let nu = opts.nu_min + step * k as f64;
            Ok((nu, collapse_residual(curves, nu, opts.center)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = (0..scan.len())
        .min_by(|&a, &b| scan[a].1.total_cmp(&scan[b].1))
        .expect("non-empty scan");
    let interior = best > 0 && best + 1 < scan.len();
    let (mut nu, mut residual) = scan[best];
    if interior {
        let (x0, y0) = scan[best - 1];
        let (x1, y1) = scan[best];
        let (x2, y2) = scan[best + 1];
        let denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        if denom != 0.0 {
            let vertex = x1 - 0.5 * ((x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0)) / denom;
            if vertex > x0 && vertex < x2 {
                let r = collapse_residual(curves, vertex, opts.center)?;
                if r < residual {
                    nu = vertex;
                    residual = r;
                }
            }
        }
    }
    Ok(CollapseResult {
        nu,
        residual,
        nu_grid: (opts.nu_min, opts.nu_max, opts.steps),
        curves_used: curves.iter().map(|c| c.n).collect(),
        scan,
        interior_minimum: interior,
        center: opts.center,
    })
}

/// How TFIM curves are sampled around their pseudo-critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSampling {
    /// Curves cover `λ_m ± half_width / N`.
    pub half_width: f64,
    /// Samples per curve; forced odd so that λ_m itself is one of them.
    pub points: usize,
}

impl Default for CurveSampling {
    fn default() -> Self {
        CurveSampling {
            half_width: 20.0,
            points: 401,
        }
    }
}

/// dE_v/dλ curves for each size, sampled uniformly in `N(λ − λ_m)`.
pub fn tfim_collapse_curves(sizes: &[usize], sampling: &CurveSampling) -> Result<Vec<CollapseCurve>> {
    let points = sampling.points.max(3) | 1;
    let half = (points / 2) as f64;
    sizes
        .par_iter()
        .map(|&n| {
            let peak = locate_lambda_m(n)?;
            let lambdas: Vec<f64> = (0..points)
                .map(|k| {
                    let u = sampling.half_width * (k as f64 - half) / half;
                    peak.lambda_m + u / n as f64
                })
                .collect();
            let values = lambdas
                .iter()
                .map(|&l| entropy_derivative(&ModelPoint::finite(l, n)?))
                .collect::<Result<Vec<_>>>()?;
            CollapseCurve::new(n, peak.lambda_m, lambdas, values)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(nu: f64, sizes: &[usize]) -> Vec<CollapseCurve> {
        sizes
            .iter()
            .map(|&n| {
                let lm = 1.0 - 0.5 / n as f64;
                let lambdas: Vec<f64> = (0..201).map(|k| lm + 0.002 * (k as f64 - 100.0)).collect();
                let values = lambdas
                    .iter()
                    .map(|l| {
                        let x = (n as f64).powf(1.0 / nu) * (l - lm);
                        (1.0 + x * x).ln() + 3.0
                    })
                    .collect();
                CollapseCurve::new(n, lm, lambdas, values).unwrap()
            })
            .collect()
    }

    #[test]
    fn recovers_synthetic_exponent() {
        let curves = synthetic(0.95, &[20, 40, 80, 160]);
        let opts = CollapseOptions {
            nu_min: 0.8,
            nu_max: 1.2,
            steps: 41,
            ..Default::default()
        };
        let r = data_collapse(&curves, &opts).unwrap();
        assert!((r.nu - 0.95).abs() <= 0.01, "{}", r.nu);
        assert!(r.interior_minimum);
        assert!(r.residual < collapse_residual(&curves, 0.8, opts.center).unwrap());
        assert!(r.residual < collapse_residual(&curves, 1.2, opts.center).unwrap());
        assert_eq!(r.curves_used, vec![20, 40, 80, 160]);
    }

    #[test]
    fn residual_vanishes_at_exact_collapse() {
        let curves = synthetic(1.0, &[20, 40, 80]);
        assert!(collapse_residual(&curves, 1.0, CollapseCenter::LambdaM).unwrap() < 1e-6);
    }

    #[test]
    fn rejects_too_few_curves_and_missing_peak() {
        let curves = synthetic(1.0, &[20, 40]);
        assert!(data_collapse(&curves, &CollapseOptions::default()).is_err());
        assert!(CollapseCurve::new(10, 0.95, vec![0.9, 1.0], vec![1.0, 2.0]).is_err());
        assert!(CollapseCurve::new(10, 0.95, vec![0.95, 0.9], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn disjoint_ranges_are_reported() {
        let mk = |n: usize, lm: f64| {
            CollapseCurve::new(n, lm, vec![lm, lm + 0.01], vec![0.0, 1.0]).unwrap()
        };
        // every curve lies entirely to the right of its own λ_m, shifted apart under λ_c centring
        let curves = vec![mk(10, 0.5), mk(20, 0.6), mk(40, 0.7)];
        assert!(matches!(
            collapse_residual(&curves, 1.0, CollapseCenter::LambdaC),
            Err(Error::Collapse(_))
        ));
    }
}
