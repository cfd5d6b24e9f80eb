//! Finite-size scaling around the critical point.

mod collapse;
mod fit;
mod lambda_m;

pub use collapse::{
    collapse_residual, data_collapse, tfim_collapse_curves, transform_curves, CollapseCenter, CollapseCurve,
    CollapseOptions, CollapseResult, CurveSampling,
};
pub use fit::{fit_log_in_lambda, fit_log_in_n, fit_power_law, FitLaw, FitWindow, ScalingFit};
pub use lambda_m::{default_tol, locate_lambda_m, locate_lambda_m_with, LambdaMResult, COARSE_POINTS};
