//! The two-scale single-site phase diagram, written as CSV and SVG.
//!
//! `cargo run --release --example phase_diagram -- out/`

use std::path::PathBuf;

use elastic_manifold::correlation::ExpMixture;
use elastic_manifold::lattice::Lattice;
use elastic_manifold::phase::{phase_diagram, rsb_intervals, two_scale_grids};
use elastic_manifold::report::{phase_csv, phase_svg, write_file};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "phase_diagram".into()));
    let (betas, mus) = two_scale_grids();
    let d = phase_diagram(&ExpMixture::two_scale_example(), &Lattice::single_site(), &betas, &mus)?;

    let rsb = d.grid.iter().filter(|p| !p.is_rs).count();
    println!("{} points, {rsb} RSB", d.grid.len());
    println!("beta_DW = {:?}, mu_Lar(inf) = {:.6}", d.beta_dw, d.mu_larkin_zero_t);
    let reentrant: Vec<f64> = betas.iter().copied().filter(|&b| rsb_intervals(&d, b) >= 2).collect();
    println!("betas with two RSB intervals: {reentrant:.4?}");

    write_file(&dir.join("phase_diagram.csv"), &phase_csv(&d))?;
    write_file(&dir.join("phase_diagram.svg"), &phase_svg(&d))?;
    println!("wrote {}", dir.display());
    Ok(())
}
