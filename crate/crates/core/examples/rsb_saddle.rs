//! A replica-symmetry-breaking saddle: the Parisi measure has several atoms.

use elastic_manifold::correlation::ExpMixture;
use elastic_manifold::functional::EuclideanParams;
use elastic_manifold::lattice::Lattice;
use elastic_manifold::phase::rs_criterion;
use elastic_manifold::saddle::{outer_maximize, psi, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = EuclideanParams::new(8.0, 5.0, 0.0, Lattice::single_site(), ExpMixture::two_scale_example())?;
    let point = rs_criterion(&p)?;
    println!("is_rs = {} (sup of g at s = {:.6})", point.is_rs, point.argmax_s);

    let opts = SolverOptions::default();
    let res = outer_maximize(&p, &opts)?;
    println!("F = {:.12}, q_c = {:.12}, converged = {}", res.free_energy, res.q_c, res.converged);
    for atom in res.zeta_c.atoms() {
        println!("  atom at {:.8} with mass {:.8}", atom.location, atom.mass);
    }
    println!("stationarity gap {:.2e}", res.residuals.stationarity_gap);

    // ψ is concave in q with its maximum at q_c.
    for f in [0.9, 1.0, 1.1] {
        println!("psi({:.6}) = {:.12}", f * res.q_c, psi(&p, f * res.q_c, &opts)?);
    }
    Ok(())
}
