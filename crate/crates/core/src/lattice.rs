//! Spectrum of the periodic lattice Laplacian and the scalar functions built
//! on it.
//!
//! For the torus `[[1, L]]^d` with coupling `t` everything the free-energy
//! formulas need is a function of the spectrum of `-Δ`:
//!
//! * `R_i(μ) = L^{-d} Σ_k (μ + t λ_k)^{-i}`, the normalized resolvent moments;
//! * `L^{-d} log det(u I - t Δ)`;
//! * `K`, the inverse function of `R_1`, with `K'(u) = -1 / R_2(K(u))`;
//! * `Λ(u) = u K(u) - L^{-d} log det(K(u) I - t Δ)`, whose derivative is `K`.
//!
//! The matrix itself is never formed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Largest number of lattice sites accepted.
pub const MAX_SITES: u64 = 10_000_000;

/// Periodic lattice `[[1, L]]^d` with elastic coupling `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    #[serde(rename = "L")]
    pub side: u32,
    #[serde(rename = "d")]
    pub dim: u32,
    #[serde(rename = "t")]
    pub coupling: f64,
}

impl LatticeSpec {
    pub fn new(side: u32, dim: u32, coupling: f64) -> Result<Self> {
        let spec = Self { side, dim, coupling };
        spec.validate()?;
        Ok(spec)
    }

    /// A single site; every spectral function reduces to a closed form.
    pub fn single_site() -> Self {
        Self { side: 1, dim: 0, coupling: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.side >= 1, Config, "lattice side L must be at least 1");
        ensure!(
            self.coupling.is_finite() && self.coupling > 0.0,
            Config,
            "coupling t must be positive, got {}",
            self.coupling
        );
        self.sites().map(|_| ())
    }

    /// Number of sites `L^d`, rejected above [`MAX_SITES`].
    pub fn sites(&self) -> Result<u64> {
        (self.side as u64)
            .checked_pow(self.dim)
            .filter(|&n| n <= MAX_SITES)
            .ok_or_else(|| {
                Error::Config(format!(
                    "lattice with L={} d={} exceeds the site budget of {MAX_SITES}",
                    self.side, self.dim
                ))
            })
    }
}

/// Distinct eigenvalues of `-Δ` with multiplicities, in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCache {
    entries: Vec<(f64, u64)>,
}

impl SpectralCache {
    pub fn entries(&self) -> &[(f64, u64)] {
        &self.entries
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.0)
    }
}

fn merge_sorted(mut values: Vec<(f64, u64)>) -> Vec<(f64, u64)> {
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, u64)> = Vec::with_capacity(values.len());
    for (v, m) in values {
        match out.last_mut() {
            Some(last) if (v - last.0).abs() <= 1e-12 * (1.0 + v.abs()) => last.1 += m,
            _ => out.push((v, m)),
        }
    }
    out
}

/// Fourier spectrum of `-Δ` on the periodic lattice:
/// `{Σ_j 2(1 - cos(2π k_j / L)) : k ∈ {0, …, L-1}^d}`, equal values merged.
pub fn laplacian_spectrum(spec: &LatticeSpec) -> Result<SpectralCache> {
    spec.validate()?;
    let l = spec.side as usize;
    let one_dim = merge_sorted(
        (0..l)
            .map(|k| {
                let s = (std::f64::consts::PI * k as f64 / l as f64).sin();
                (4.0 * s * s, 1)
            })
            .collect(),
    );
    let mut acc = vec![(0.0, 1u64)];
    for _ in 0..spec.dim {
        let mut next = Vec::with_capacity(acc.len() * one_dim.len());
        for &(a, ma) in &acc {
            for &(b, mb) in &one_dim {
                next.push((a + b, ma * mb));
            }
        }
        acc = merge_sorted(next);
    }
    Ok(SpectralCache { entries: acc })
}

/// A lattice together with its cached spectrum.
///
/// Cloning is cheap; the spectrum is shared.
#[derive(Debug, Clone)]
pub struct Lattice {
    spec: LatticeSpec,
    spectrum: Arc<SpectralCache>,
    sites: f64,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Lattice {
    pub fn new(spec: LatticeSpec) -> Result<Self> {
        let spectrum = laplacian_spectrum(&spec)?;
        let sites = spec.sites()? as f64;
        Ok(Self { spec, spectrum: Arc::new(spectrum), sites })
    }

    pub fn single_site() -> Self {
        Self::new(LatticeSpec::single_site()).expect("single site lattice is valid")
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn coupling(&self) -> f64 {
        self.spec.coupling
    }

    pub fn spectrum(&self) -> &SpectralCache {
        &self.spectrum
    }

    pub fn sites(&self) -> f64 {
        self.sites
    }

    /// Same lattice geometry with a different coupling `t`.
    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        ensure!(coupling.is_finite() && coupling > 0.0, Config, "coupling must be positive");
        Ok(Self {
            spec: LatticeSpec { coupling, ..self.spec },
            spectrum: Arc::clone(&self.spectrum),
            sites: self.sites,
        })
    }

    fn shifted(&self, u: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let t = self.spec.coupling;
        self.spectrum
            .entries
            .iter()
            .map(move |&(lambda, mult)| (u + t * lambda, mult as f64))
    }

    // (R_1(v), R_2(v)) in one pass, Neumaier-compensated.
    fn first_two_moments(&self, v: f64) -> (f64, f64) {
        let mut s1 = Neumaier::default();
        let mut s2 = Neumaier::default();
        for (x, m) in self.shifted(v) {
            let inv = 1.0 / x;
            s1.add(m * inv);
            s2.add(m * inv * inv);
        }
        (s1.total() / self.sites, s2.total() / self.sites)
    }

    /// `R_i(μ) = L^{-d} tr (μ I - t Δ)^{-i}`.
    pub fn resolvent_moment(&self, order: u32, mu: f64) -> Result<f64> {
        ensure!(mu > 0.0 && mu.is_finite(), Domain, "resolvent needs mu > 0, got {mu}");
        ensure!(order >= 1, Domain, "resolvent order must be positive");
        Ok(self.resolvent_unchecked(order, mu))
    }

    pub(crate) fn resolvent_unchecked(&self, order: u32, mu: f64) -> f64 {
        let mut s = Neumaier::default();
        for (x, m) in self.shifted(mu) {
            s.add(m * x.powi(-(order as i32)));
        }
        s.total() / self.sites
    }

    /// `L^{-d} log det(u I - t Δ)`.
    pub fn log_det_normalized(&self, u: f64) -> Result<f64> {
        ensure!(u > 0.0 && u.is_finite(), Domain, "log-determinant needs u > 0, got {u}");
        Ok(self.log_det_unchecked(u))
    }

    pub(crate) fn log_det_unchecked(&self, u: f64) -> f64 {
        let mut s = Neumaier::default();
        for (x, m) in self.shifted(u) {
            s.add(m * x.ln());
        }
        s.total() / self.sites
    }

    /// `K(u)`: the unique `v > 0` with `R_1(v) = u`.
    ///
    /// The root is bracketed by `[1/u - t λ_max, 1/u]`; bisection (geometric
    /// while the bracket spans decades) narrows it to a relative width of
    /// `1e-3` and safeguarded Newton steps with `R_1' = -R_2` finish.
    pub fn k_inverse(&self, u: f64) -> Result<f64> {
        ensure!(u > 0.0 && u.is_finite(), Domain, "K needs u > 0, got {u}");
        let hi0 = 1.0 / u;
        let lo0 = (hi0 - self.spec.coupling * self.spectrum.max_eigenvalue()).max(1e-300);
        if lo0 >= hi0 {
            return Ok(hi0);
        }
        let (mut lo, mut hi) = (lo0, hi0);
        // R_1 is decreasing: residual > 0 means the root lies to the right.
        let residual = |v: f64| self.first_two_moments(v);
        let mut iterations = 0;
        while hi - lo > 1e-3 * hi {
            let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if residual(mid).0 > u {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
            if iterations > 4000 {
                return Err(Error::Numerical(format!("K({u}): bisection did not converge")));
            }
        }
        let mut v = 0.5 * (lo + hi);
        for _ in 0..100 {
            let (r1, r2) = residual(v);
            let f = r1 - u;
            if f == 0.0 {
                return Ok(v);
            }
            if f > 0.0 {
                lo = lo.max(v);
            } else {
                hi = hi.min(v);
            }
            let mut next = v + f / r2;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - v).abs();
            v = next;
            if step <= 4.0 * f64::EPSILON * v || hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(v);
            }
        }
        Err(Error::Numerical(format!(
            "K({u}): Newton iteration did not converge (bracket [{lo}, {hi}])"
        )))
    }

    /// `K'(u) = -1 / R_2(K(u))`.
    pub fn k_derivative(&self, u: f64) -> Result<f64> {
        let k = self.k_inverse(u)?;
        Ok(-1.0 / self.resolvent_unchecked(2, k))
    }

    /// `Λ(u) = u K(u) - L^{-d} log det(K(u) I - t Δ)`; `Λ' = K`.
    pub fn lambda_value(&self, u: f64) -> Result<f64> {
        let k = self.k_inverse(u)?;
        Ok(u * k - self.log_det_unchecked(k))
    }

    /// `(K(u), Λ(u))` from a single inversion.
    pub(crate) fn k_and_lambda(&self, u: f64) -> Result<(f64, f64)> {
        let k = self.k_inverse(u)?;
        Ok((k, u * k - self.log_det_unchecked(k)))
    }
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}
