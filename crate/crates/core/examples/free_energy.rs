//! Quenched and annealed free energies along a line of masses, switching
//! between the closed-form RS saddle and the full solver.

use elastic_manifold::correlation::ExpMixture;
use elastic_manifold::functional::{annealed_free_energy, EuclideanParams};
use elastic_manifold::lattice::{Lattice, LatticeSpec};
use elastic_manifold::phase::rs_criterion;
use elastic_manifold::saddle::{outer_maximize, solve_rs, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lat = Lattice::new(LatticeSpec::new(4, 1, 1.0)?)?;
    let base = EuclideanParams::new(4.0, 1.0, 0.0, lat, ExpMixture::two_scale_example())?;
    let opts = SolverOptions::default();

    println!("{:>6} {:>5} {:>14} {:>14} {:>12}", "mu", "phase", "quenched", "annealed", "q_c");
    for mu in [1.0, 3.0, 6.0, 10.0, 20.0] {
        let p = base.with_mu(mu)?;
        let rs = rs_criterion(&p)?.is_rs;
        let res = if rs { solve_rs(&p)? } else { outer_maximize(&p, &opts)? };
        println!(
            "{mu:>6} {:>5} {:>14.9} {:>14.9} {:>12.8}",
            if rs { "RS" } else { "RSB" },
            res.free_energy,
            annealed_free_energy(&p),
            res.q_c
        );
    }
    Ok(())
}
