//! Random-feature realization of the site-wise disorder field.
//!
//! For `B(x) = Σ_i c_i e^{-a_i x}` the field at one site is
//! `V(u) = √N Σ_i √c_i √(2/M) Σ_m g_{im} cos(w_{im}·u + b_{im})` with
//! `w_{im} ~ N(0, 2a_i/N · I)`, `b_{im}` uniform on `[0, 2π)` and `g_{im}`
//! standard normal. Averaged over the features its covariance is exactly
//! `N B(‖u - v‖²_N)`; at fixed features the error is `O(M^{-1/2})`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::correlation::ExpMixture;
use crate::error::{ensure, Result};

/// RNG stream reserved for the disorder; chains use the streams after it.
pub(crate) const DISORDER_STREAM: u64 = 0;

#[derive(Debug, Clone)]
struct Bank {
    scale: f64,
    freqs: Vec<f64>,
    phases: Vec<f64>,
    amps: Vec<f64>,
}

/// Independent feature banks for every lattice site and mixture term.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    n: usize,
    m: usize,
    sites: usize,
    seed: u64,
    // Indexed by site * terms + term.
    banks: Vec<Bank>,
    terms: usize,
}

impl FieldSampler {
    pub fn new(b: &ExpMixture, n: usize, m: usize, sites: usize, seed: u64) -> Result<Self> {
        ensure!(n >= 1, Config, "field dimension N must be positive");
        ensure!(m >= 1, Config, "feature count M must be positive");
        ensure!(sites >= 1, Config, "at least one site is needed");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(DISORDER_STREAM);
        let terms = b.terms().len();
        let mut banks = Vec::with_capacity(sites * terms);
        for _ in 0..sites {
            for t in b.terms() {
                let sd = (2.0 * t.rate / n as f64).sqrt();
                let freqs = (0..m * n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
                let phases = (0..m).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
                let amps = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let scale = (n as f64).sqrt() * t.weight.sqrt() * (2.0 / m as f64).sqrt();
                banks.push(Bank { scale, freqs, phases, amps });
            }
        }
        Ok(Self { n, m, sites, seed, banks, terms })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn features(&self) -> usize {
        self.m
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `V_x(u)` for one site.
    pub fn value(&self, site: usize, u: &[f64]) -> f64 {
        self.site_banks(site)
            .map(|bank| {
                let mut acc = 0.0;
                for k in 0..self.m {
                    let w = &bank.freqs[k * self.n..(k + 1) * self.n];
                    acc += bank.amps[k] * (dot(w, u) + bank.phases[k]).cos();
                }
                bank.scale * acc
            })
            .sum()
    }

    /// `V_x(u)`, adding `∇V_x(u)` into `grad`.
    pub fn value_and_gradient(&self, site: usize, u: &[f64], grad: &mut [f64]) -> f64 {
        let mut value = 0.0;
        for bank in self.site_banks(site) {
            let mut acc = 0.0;
            for k in 0..self.m {
                let w = &bank.freqs[k * self.n..(k + 1) * self.n];
                let (s, c) = (dot(w, u) + bank.phases[k]).sin_cos();
                acc += bank.amps[k] * c;
                let coef = -bank.scale * bank.amps[k] * s;
                for (g, wj) in grad.iter_mut().zip(w) {
                    *g += coef * wj;
                }
            }
            value += bank.scale * acc;
        }
        value
    }

    fn site_banks(&self, site: usize) -> impl Iterator<Item = &Bank> {
        self.banks[site * self.terms..(site + 1) * self.terms].iter()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
