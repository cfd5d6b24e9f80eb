//! Richardson-extrapolated finite differences.
//!
//! These back the analytic derivatives where the chain rule is ill-conditioned and
//! serve as independent oracles in the test suites.

/// Fourth-order estimate `(4·D(h/2) − D(h)) / 3` built from central differences.
pub fn richardson_central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// One-sided variant for points next to a domain boundary (only samples `x, x+h, x+2h`).
pub fn richardson_forward(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let f0 = f(x);
    let d = |h: f64| (-3.0 * f0 + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Central Richardson derivative for a fallible function.
pub(crate) fn try_richardson_central<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    x: f64,
    h: f64,
) -> Result<f64, E> {
    let d = |h: f64| -> Result<f64, E> { Ok((f(x + h)? - f(x - h)?) / (2.0 * h)) };
    Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
}

pub(crate) fn try_richardson_forward<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    x: f64,
    h: f64,
) -> Result<f64, E> {
    let f0 = f(x)?;
    let d = |h: f64| -> Result<f64, E> { Ok((-3.0 * f0 + 4.0 * f(x + h)? - f(x + 2.0 * h)?) / (2.0 * h)) };
    Ok((4.0 * d(0.5 * h)? - d(h)?) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_quartics() {
        let f = |x: f64| x.powi(4) - 2.0 * x.powi(3) + x;
        let df = |x: f64| 4.0 * x.powi(3) - 6.0 * x * x + 1.0;
        assert!((richardson_central(f, 0.7, 1e-2) - df(0.7)).abs() < 1e-11);
        assert!((richardson_forward(f, 0.7, 1e-3) - df(0.7)).abs() < 1e-7);
    }

    #[test]
    fn fallible_variants_agree() {
        let ok = |x: f64| -> Result<f64, ()> { Ok(x.sin()) };
        let a = try_richardson_central(ok, 0.3, 1e-3).unwrap();
        assert!((a - 0.3f64.cos()).abs() < 1e-12);
        let b = try_richardson_forward(ok, 0.3, 1e-4).unwrap();
        assert!((b - 0.3f64.cos()).abs() < 1e-9);
    }
}
