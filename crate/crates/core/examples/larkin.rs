//! Larkin masses at zero and positive temperature, and β_DW.

use elastic_manifold::correlation::ExpMixture;
use elastic_manifold::lattice::{Lattice, LatticeSpec};
use elastic_manifold::phase::{beta_dw, larkin_mass_finite_t, larkin_mass_zero_t, larkin_roots};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let b = ExpMixture::two_scale_example();
    let one = Lattice::single_site();
    println!("single site: mu_Lar = {:.12} (sqrt 260 = {:.12})", larkin_mass_zero_t(&b, &one)?, 260f64.sqrt());
    println!("beta_DW = {:.10}", beta_dw(&b, &one)?);
    for beta in [1.0, 1.5, 3.0, 100.0] {
        let mu = larkin_mass_finite_t(&b, &one, beta)?;
        println!("  beta {beta:>6}: mu_Lar = {mu:?}, roots {:?}", larkin_roots(&b, &one, beta)?);
    }

    let chain = Lattice::new(LatticeSpec::new(16, 1, 1.0)?)?;
    println!("L = 16, d = 1: mu_Lar = {:.10}", larkin_mass_zero_t(&b, &chain)?);
    Ok(())
}
