//! The replica-symmetric saddle of the single-site model and its observables.

use elastic_manifold::correlation::ExpMixture;
use elastic_manifold::functional::{stationarity_euclidean, EuclideanParams};
use elastic_manifold::lattice::Lattice;
use elastic_manifold::phase::rs_criterion;
use elastic_manifold::saddle::{observables, outer_maximize, solve_rs, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = EuclideanParams::new(1.0, 20.0, 0.3, Lattice::single_site(), ExpMixture::two_scale_example())?;
    let point = rs_criterion(&p)?;
    println!("is_rs = {}, criterion gap = {:.3e}", point.is_rs, point.criterion_gap);

    let rs = solve_rs(&p)?;
    let q_l = rs.zeta_c.q_star();
    println!("q_c = {:.12}, q_L = {:.12}, F = {:.12}", rs.q_c, q_l, rs.free_energy);

    let st = stationarity_euclidean(&p, rs.q_c, &rs.zeta_c)?;
    println!("F(q_L) = {:.3e}", st.f_prime(q_l)?);

    // The general solver lands on the same point.
    let full = outer_maximize(&p, &SolverOptions::default())?;
    println!("full solver: q_c = {:.12}, F = {:.12}", full.q_c, full.free_energy);

    let (radius, overlap) = observables(&rs, &p)?;
    println!("squared radius {radius:.10}, overlap {:.10}", overlap.q_star());
    Ok(())
}
