//! Laplacian spectrum of a periodic lattice, the resolvent moments and the
//! inverse `K` of `R_1`.

use elastic_manifold::lattice::{Lattice, LatticeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lat = Lattice::new(LatticeSpec::new(8, 2, 1.0)?)?;
    println!("distinct eigenvalues: {}", lat.spectrum().entries().len());
    for (lambda, mult) in lat.spectrum().entries().iter().take(5) {
        println!("  lambda = {lambda:.6}  x{mult}");
    }

    println!("{:>8} {:>14} {:>14} {:>14}", "mu", "R_1", "R_2", "K(R_1)");
    for mu in [0.1, 1.0, 10.0] {
        let r1 = lat.resolvent_moment(1, mu)?;
        let r2 = lat.resolvent_moment(2, mu)?;
        println!("{mu:>8} {r1:>14.8} {r2:>14.8} {:>14.10}", lat.k_inverse(r1)?);
    }
    println!("Lambda(0.5) = {:.12}", lat.lambda_value(0.5)?);
    Ok(())
}
