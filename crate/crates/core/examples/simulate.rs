//! Langevin Monte Carlo of the finite-N model against the RS prediction.

use elastic_manifold::correlation::ExpMixture;
use elastic_manifold::functional::EuclideanParams;
use elastic_manifold::lattice::{Lattice, LatticeSpec};
use elastic_manifold::saddle::{observables, solve_rs};
use elastic_manifold::simulate::{run_chains, summarize, ChainOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Free field on a ring of two sites: the squared radius is R_1(μ)/β.
    let lat = Lattice::new(LatticeSpec::new(2, 1, 1.0)?)?;
    let free = EuclideanParams::new(1.0, 2.0, 0.0, lat, ExpMixture::zero())?;
    let s = summarize(&run_chains(&free, &ChainOptions::new(48, 1, 20_000, 2, 1))?, 20);
    println!("free field: radius {:.5} +- {:.5}, exact {:.5}", s.radius_mean, s.radius_se, free.r1() / free.beta);

    // Deep in the RS phase with disorder.
    let p = EuclideanParams::new(1.0, 20.0, 0.0, Lattice::single_site(), ExpMixture::two_scale_example())?;
    let out = run_chains(&p, &ChainOptions::new(48, 1024, 8_000, 2, 7))?;
    let s = summarize(&out, 20);
    let rs = solve_rs(&p)?;
    let (radius, overlap) = observables(&rs, &p)?;
    println!("disordered: radius {:.5} +- {:.5} (theory {radius:.5})", s.radius_mean, s.radius_se);
    println!("            overlap {:.5} +- {:.5} (theory {:.5})", s.overlap_mean, s.overlap_se, overlap.q_star());
    println!("acceptance {:.3?}", out.acceptance);
    Ok(())
}
