//! Finite-N Monte Carlo of the disordered elastic manifold.
//!
//! A configuration is `u: Ω → R^N`, stored site-major as `L^d · N` reals. The
//! Hamiltonian is
//! `H(u) = ½ Σ_x (μ |u(x)|² + t ⟨u(x), (-Δu)(x)⟩) + Σ_x V_x(u(x)) + √N h Σ_x u_1(x)`
//! with `(-Δu)(x) = Σ_j (2u(x) - u(x + e_j) - u(x - e_j))` on the periodic lattice.

mod chain;
mod field;

pub use chain::{run_chains, summarize, ChainOptions, Record, SimOutput, SimSummary};
pub use field::FieldSampler;

use crate::error::{ensure, Result};
use crate::functional::EuclideanParams;
use crate::lattice::LatticeSpec;

/// Largest `L^d · N` accepted by the simulator.
pub const MAX_DEGREES_OF_FREEDOM: usize = 4_000_000;

/// The Hamiltonian of one disorder realization.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: EuclideanParams,
    pub field: FieldSampler,
    neighbours: Vec<Vec<(usize, usize)>>,
}

impl Model {
    /// Builds the model with `M` features per site and term, drawn from `seed`.
    pub fn new(params: EuclideanParams, n: usize, m: usize, seed: u64) -> Result<Self> {
        let spec = *params.lattice.spec();
        let sites = usize::try_from(spec.sites()?).unwrap_or(usize::MAX);
        ensure!(
            sites.saturating_mul(n) <= MAX_DEGREES_OF_FREEDOM,
            Config,
            "simulation needs {sites} x {n} coordinates, above the limit {MAX_DEGREES_OF_FREEDOM}"
        );
        let field = FieldSampler::new(&params.disorder, n, m, sites, seed)?;
        Ok(Self { neighbours: neighbour_table(&spec, sites), params, field })
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn sites(&self) -> usize {
        self.field.sites()
    }

    /// `(-Δu)(x)` written into `out`.
    pub fn neg_laplacian(&self, u: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for (x, nb) in self.neighbours.iter().enumerate() {
            let ux = &u[x * n..(x + 1) * n];
            let o = &mut out[x * n..(x + 1) * n];
            o.fill(0.0);
            for &(plus, minus) in nb {
                let (up, um) = (&u[plus * n..(plus + 1) * n], &u[minus * n..(minus + 1) * n]);
                for k in 0..n {
                    o[k] += 2.0 * ux[k] - up[k] - um[k];
                }
            }
        }
    }

    /// `½ Σ_{x,y} (μI - tΔ)_{xy} (u(x), u(y))`.
    pub fn quadratic_energy(&self, u: &[f64]) -> f64 {
        let mut lap = vec![0.0; u.len()];
        self.neg_laplacian(u, &mut lap);
        let p = &self.params;
        0.5 * u.iter().zip(&lap).map(|(a, l)| p.mu * a * a + p.lattice.coupling() * a * l).sum::<f64>()
    }

    /// `√N h Σ_x u_1(x)`.
    pub fn field_energy(&self, u: &[f64]) -> f64 {
        let n = self.dim();
        let s: f64 = (0..self.sites()).map(|x| u[x * n]).sum();
        (n as f64).sqrt() * self.params.h * s
    }

    /// `N h² L^d / (2μ)`: with `c = (√N h / μ) e_1` at every site,
    /// `quadratic(u) + field(u) = quadratic(u + c) - shift_constant()`.
    pub fn shift_constant(&self) -> f64 {
        let p = &self.params;
        self.dim() as f64 * p.h * p.h * self.sites() as f64 / (2.0 * p.mu)
    }

    /// The constant configuration `(√N h / μ) e_1`.
    pub fn shift_vector(&self) -> Vec<f64> {
        let n = self.dim();
        let mut c = vec![0.0; n * self.sites()];
        for x in 0..self.sites() {
            c[x * n] = (n as f64).sqrt() * self.params.h / self.params.mu;
        }
        c
    }

    pub fn hamiltonian(&self, u: &[f64]) -> f64 {
        let n = self.dim();
        let disorder: f64 = (0..self.sites()).map(|x| self.field.value(x, &u[x * n..(x + 1) * n])).sum();
        self.quadratic_energy(u) + self.field_energy(u) + disorder
    }

    /// `H(u)`, with `∇H(u)` written into `grad`.
    pub fn energy_and_gradient(&self, u: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.dim();
        let p = &self.params;
        let t = p.lattice.coupling();
        self.neg_laplacian(u, grad);
        let mut quad = 0.0;
        for (g, a) in grad.iter_mut().zip(u) {
            quad += p.mu * a * a + t * a * *g;
            *g = p.mu * a + t * *g;
        }
        let mut energy = 0.5 * quad + self.field_energy(u);
        let hn = (n as f64).sqrt() * p.h;
        for x in 0..self.sites() {
            grad[x * n] += hn;
            energy += self.field.value_and_gradient(x, &u[x * n..(x + 1) * n], &mut grad[x * n..(x + 1) * n]);
        }
        energy
    }
}

// (x + e_j, x - e_j) for every site and direction.
fn neighbour_table(spec: &LatticeSpec, sites: usize) -> Vec<Vec<(usize, usize)>> {
    let l = spec.side as usize;
    let d = spec.dim as usize;
    (0..sites)
        .map(|x| {
            (0..d)
                .map(|j| {
                    let stride = l.pow(j as u32);
                    let coord = (x / stride) % l;
                    let base = x - coord * stride;
                    let plus = base + ((coord + 1) % l) * stride;
                    let minus = base + ((coord + l - 1) % l) * stride;
                    (plus, minus)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::ExpMixture;
    use crate::lattice::Lattice;

    fn model(h: f64, b: ExpMixture) -> Model {
        let lat = Lattice::new(LatticeSpec::new(3, 2, 0.8).unwrap()).unwrap();
        let p = EuclideanParams::new(1.5, 2.0, h, lat, b).unwrap();
        Model::new(p, 4, 16, 11).unwrap()
    }

    fn config(len: usize) -> Vec<f64> {
        (0..len).map(|i| ((i * 7919) % 13) as f64 / 13.0 - 0.4).collect()
    }

    #[test]
    fn quadratic_form_uses_the_spectrum() {
        // A Fourier mode is an eigenvector of -Δ with eigenvalue 2(1 - cos(2π/3)) = 3.
        let m = model(0.0, ExpMixture::zero());
        let n = m.dim();
        let mut u = vec![0.0; 9 * n];
        for x in 0..9 {
            u[x * n] = (2.0 * std::f64::consts::PI * (x % 3) as f64 / 3.0).cos();
        }
        let norm: f64 = u.iter().map(|a| a * a).sum();
        let expected = 0.5 * (2.0 + 0.8 * 3.0) * norm;
        assert!((m.quadratic_energy(&u) - expected).abs() < 1e-12);
        assert!((m.hamiltonian(&u) - expected).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_differences() {
        let m = model(0.7, ExpMixture::two_scale_example());
        let u = config(9 * m.dim());
        let mut g = vec![0.0; u.len()];
        let e = m.energy_and_gradient(&u, &mut g);
        assert!((e - m.hamiltonian(&u)).abs() < 1e-10);
        for j in [0, 5, 17, 30] {
            let h = 1e-6;
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let fd = (m.hamiltonian(&up) - m.hamiltonian(&dn)) / (2.0 * h);
            assert!((fd - g[j]).abs() <= 1e-5 * (1.0 + g[j].abs()), "{j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn field_shift_identity() {
        let m = model(0.9, ExpMixture::zero());
        let u = config(9 * m.dim());
        let shifted: Vec<f64> = u.iter().zip(m.shift_vector()).map(|(a, c)| a + c).collect();
        let lhs = m.quadratic_energy(&u) + m.field_energy(&u);
        let rhs = m.quadratic_energy(&shifted) - m.shift_constant();
        assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
    }
}
