use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitLaw {
    /// `y = A·N^p`, fitted as a line in `(ln N, ln y)`.
    PowerLaw,
    /// `y = A·ln N + b`.
    LogInN,
    /// `y = A·ln|λ − λ_c| + b`.
    LogInLambda,
}

/// Data range a fit was made on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub description: String,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

/// Least-squares line in the transformed coordinates of `law`.
///
/// `amplitude` is the prefactor `e^intercept` for a power law and the coefficient of
/// the logarithm (equal to `slope`) for the two logarithmic laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub law: FitLaw,
    pub slope: f64,
    pub intercept: f64,
    pub amplitude: f64,
    pub r_squared: f64,
    pub window: FitWindow,
}

impl ScalingFit {
    /// Power-law exponent (the slope on log-log axes).
    pub fn exponent(&self) -> f64 {
        self.slope
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r2 = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    (slope, intercept, r2)
}

fn check_points(points: &[(f64, f64)]) -> Result<()> {
    if points.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "need at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("non-finite data point".into()));
    }
    let first = points[0].0;
    if points.iter().all(|p| p.0 == first) {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    Ok(())
}

fn window(description: String, xs: impl Iterator<Item = f64> + Clone, points: usize) -> FitWindow {
    FitWindow {
        description,
        x_min: xs.clone().fold(f64::INFINITY, f64::min),
        x_max: xs.fold(f64::NEG_INFINITY, f64::max),
        points,
    }
}

/// Fits `y = A·N^p` to `(N, y)` pairs.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    check_points(points)?;
    if let Some(p) = points.iter().find(|p| p.0 <= 0.0 || p.1 <= 0.0) {
        return Err(Error::Fit(format!("power law needs positive data, got ({}, {})", p.0, p.1)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(ScalingFit {
        law: FitLaw::PowerLaw,
        slope,
        intercept,
        amplitude: intercept.exp(),
        r_squared,
        window: window("N".into(), points.iter().map(|p| p.0), points.len()),
    })
}

/// Fits `y = A·ln N + b` to `(N, y)` pairs.
pub fn fit_log_in_n(points: &[(f64, f64)]) -> Result<ScalingFit> {
    check_points(points)?;
    if let Some(p) = points.iter().find(|p| p.0 <= 0.0) {
        return Err(Error::Fit(format!("system size must be positive, got {}", p.0)));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(ScalingFit {
        law: FitLaw::LogInN,
        slope,
        intercept,
        amplitude: slope,
        r_squared,
        window: window("N".into(), points.iter().map(|p| p.0), points.len()),
    })
}

/// Fits `y = A·ln|λ − λ_c| + b`; every λ must lie strictly on one side of `lambda_c`.
pub fn fit_log_in_lambda(samples: &[(f64, f64)], lambda_c: f64) -> Result<ScalingFit> {
    check_points(samples)?;
    let below = samples.iter().all(|p| p.0 < lambda_c);
    let above = samples.iter().all(|p| p.0 > lambda_c);
    if !below && !above {
        return Err(Error::Fit(format!(
            "couplings must all lie on one side of λ_c = {lambda_c}"
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|p| (p.0 - lambda_c).abs().ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|p| p.1).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    let side = if below { "below" } else { "above" };
    Ok(ScalingFit {
        law: FitLaw::LogInLambda,
        slope,
        intercept,
        amplitude: slope,
        r_squared,
        window: window(
            format!("|λ − λ_c| {side} λ_c = {lambda_c}"),
            samples.iter().map(|p| (p.0 - lambda_c).abs()),
            samples.len(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [50.0, 100.0, 200.0, 400.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n.powf(-1.5)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.exponent() + 1.5).abs() < 1e-12);
        assert!((f.amplitude - 3.0).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.window.points, 4);
    }

    #[test]
    fn exact_log_laws() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1e3, 1e4, 1e5]
            .iter()
            .map(|&n: &f64| (n, 0.5 * n.ln() + 2.0))
            .collect();
        let f = fit_log_in_n(&pts).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12 && (f.intercept - 2.0).abs() < 1e-10);

        let samples: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&d: &f64| (1.0 - d, 0.35 * d.ln() + 1.0))
            .collect();
        let f = fit_log_in_lambda(&samples, 1.0).unwrap();
        assert!((f.slope - 0.35).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-10);
        assert!(f.window.description.contains("below"));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(fit_power_law(&[(10.0, 1.0)]), Err(Error::Fit(_))));
        let neg = [(1.0, 1.0), (2.0, -1.0), (3.0, 1.0), (4.0, 1.0)];
        assert!(fit_power_law(&neg).is_err());
        let mixed = [(0.9, 1.0), (0.99, 2.0), (1.01, 2.0), (1.1, 1.0)];
        assert!(fit_log_in_lambda(&mixed, 1.0).is_err());
        let same = [(5.0, 1.0); 4];
        assert!(fit_log_in_n(&same).is_err());
    }
}
