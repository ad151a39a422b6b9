//! The spherical model, and the restriction of the Euclidean field to a sphere.

use elastic_manifold::correlation::{sphere_restriction_mixing, ExpMixture, PolyMixing};
use elastic_manifold::functional::{parisi_euclidean, parisi_spherical, EuclideanParams, SphericalParams};
use elastic_manifold::lattice::{Lattice, LatticeSpec};
use elastic_manifold::measure::StepMeasure;
use elastic_manifold::phase::spherical_rs_criterion;
use elastic_manifold::saddle::{solve_spherical, SolverOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = SolverOptions::default();
    // Pure 3-spin mixing: RS at high temperature, RSB at low.
    for beta in [1.0, 3.0] {
        let p = SphericalParams::new(beta, 0.0, Lattice::single_site(), PolyMixing::unit(vec![0.0, 0.0, 0.0, 1.0])?)?;
        let class = spherical_rs_criterion(&p)?;
        let res = solve_spherical(&p, &opts)?;
        println!("beta {beta}: is_rs = {}, B = {:.12}, atoms = {}", class.is_rs, res.free_energy, res.zeta_c.len());
    }

    // On the sphere of squared radius q the Euclidean functional is the
    // spherical one with mixing r -> B(2q(1 - r)) and elasticity t q, up to
    // the constant (log q - β μ q) / 2.
    let (q, t) = (0.4, 0.8);
    let lat = Lattice::new(LatticeSpec::new(4, 1, t)?)?;
    let e = EuclideanParams::new(2.0, 3.0, 0.0, lat.clone(), ExpMixture::two_scale_example())?;
    let mixing = sphere_restriction_mixing(&e.disorder, q, 1e-14)?.to_unit_scale();
    let s = SphericalParams::new(e.beta, 0.0, lat.with_coupling(t * q)?, mixing)?;
    println!("expected difference {:.12}", 0.5 * (q.ln() - e.beta * e.mu * q));
    for atoms in [vec![(0.1, 1.0)], vec![(0.0, 0.3), (0.6, 0.7)], vec![(0.2, 0.5), (0.5, 0.25), (0.9, 0.25)]] {
        let zeta = StepMeasure::new(q, atoms.iter().map(|&(r, m)| (r * q, m)))?;
        let diff = parisi_euclidean(&e, q, &zeta)? - parisi_spherical(&s, &zeta.push_scale(1.0 / q)?)?;
        println!("P - B = {diff:.12}");
    }
    Ok(())
}
