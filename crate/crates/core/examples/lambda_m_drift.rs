//! Pseudo-critical point λ_m, where dE_v/dλ peaks, and its approach to λ = 1.

use tfim_entanglement::scaling::{fit_power_law, locate_lambda_m};
use tfim_entanglement::Result;

fn main() -> Result<()> {
    let mut pts = Vec::new();
    for n in [50, 100, 200, 400, 800, 1600, 3200] {
        let r = locate_lambda_m(n)?;
        println!(
            "N = {n:>5}: λ_m = {:.10}, 1 - λ_m = {:.4e}, peak dE_v/dλ = {:.6}",
            r.lambda_m,
            1.0 - r.lambda_m,
            r.derivative_at_max
        );
        pts.push((n as f64, 1.0 - r.lambda_m));
    }
    let fit = fit_power_law(&pts)?;
    println!("1 - λ_m ≈ {:.4} · N^{:.4}   (r² = {:.6})", fit.amplitude, fit.exponent(), fit.r_squared);

    // local exponents between neighbouring sizes
    for w in pts.windows(2) {
        let p = (w[1].1 / w[0].1).ln() / (w[1].0 / w[0].0).ln();
        println!("  N {:>5} → {:>5}: local exponent {p:.4}", w[0].0, w[1].0);
    }
    Ok(())
}
