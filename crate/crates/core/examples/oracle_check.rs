//! Exact diagonalization against the free-fermion solution on small rings.

use tfim_entanglement::correlators::{correlators, ground_energy};
use tfim_entanglement::ed::{correlators_from_rdm, ground_state, two_site_rdm};
use tfim_entanglement::entanglement::entropy;
use tfim_entanglement::ed::oracle_entropy;
use tfim_entanglement::{ModelPoint, Result};

fn main() -> Result<()> {
    for n in [4, 6, 8, 10, 12] {
        for lambda in [0.2, 1.0, 3.0] {
            let p = ModelPoint::finite(lambda, n)?;
            let g = ground_state(lambda, n)?;
            let ed = correlators_from_rdm(&two_site_rdm(&g, (0, 1))?);
            let ff = correlators(&p)?;
            let dc = [ff.sz - ed.sz, ff.xx - ed.xx, ff.yy - ed.yy, ff.zz - ed.zz]
                .iter()
                .fold(0.0_f64, |m, d| m.max(d.abs()));
            println!(
                "N = {n:>2}, λ = {lambda}: ΔE0 = {:9.2e}, max Δcorrelator = {dc:9.2e}, ΔE_v = {:9.2e}, parity {:?}, Lanczos residual {:.1e}",
                ground_energy(&p)? - g.energy,
                entropy(&p)? - oracle_entropy(lambda, n)?,
                g.parity,
                g.residual,
            );
        }
    }
    Ok(())
}
