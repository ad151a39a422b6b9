//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls the library's numerics: the spectrum is enumerated mode
//! by mode, `K` is found by plain bisection, and integrals use adaptive Simpson.

#![allow(dead_code)]

use std::f64::consts::PI;

/// All eigenvalues of `-Δ` on the periodic lattice `[[1, L]]^d`, with repetition.
pub fn eigenvalues(l: u32, d: u32) -> Vec<f64> {
    let mut out = vec![0.0];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * l as usize);
        for &base in &out {
            for k in 0..l {
                next.push(base + 2.0 * (1.0 - (2.0 * PI * k as f64 / l as f64).cos()));
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub t: f64,
    pub eig: Vec<f64>,
}

impl Spectrum {
    pub fn new(l: u32, d: u32, t: f64) -> Self {
        Self { t, eig: eigenvalues(l, d) }
    }

    pub fn r(&self, order: i32, mu: f64) -> f64 {
        self.eig.iter().map(|&x| (mu + self.t * x).powi(-order)).sum::<f64>() / self.eig.len() as f64
    }

    pub fn log_det(&self, mu: f64) -> f64 {
        self.eig.iter().map(|&x| (mu + self.t * x).ln()).sum::<f64>() / self.eig.len() as f64
    }

    /// `K(u)` by bisection on the decreasing map `v ↦ R_1(v)`.
    pub fn k(&self, u: f64) -> f64 {
        let lmax = self.eig.iter().copied().fold(0.0, f64::max);
        let mut hi = 1.0 / u;
        let mut lo = (hi - self.t * lmax).max(0.0);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.r(1, mid) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `Λ(u) = u K(u) - L^{-d} log det(K(u) - tΔ)`.
    pub fn lambda(&self, u: f64) -> f64 {
        let k = self.k(u);
        u * k - self.log_det(k)
    }
}

/// `B(x) = Σ c e^{-a x}` and its first derivative.
pub fn b_value(terms: &[(f64, f64)], x: f64) -> f64 {
    terms.iter().map(|&(c, a)| c * (-a * x).exp()).sum()
}

pub fn b_prime(terms: &[(f64, f64)], x: f64) -> f64 {
    terms.iter().map(|&(c, a)| -a * c * (-a * x).exp()).sum()
}

pub fn b_second(terms: &[(f64, f64)], x: f64) -> f64 {
    terms.iter().map(|&(c, a)| a * a * c * (-a * x).exp()).sum()
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// A step measure given by sorted `(location, mass)` atoms on `[0, q)`.
#[derive(Debug, Clone)]
pub struct Atoms {
    pub q: f64,
    pub atoms: Vec<(f64, f64)>,
}

impl Atoms {
    pub fn cdf(&self, u: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= u).map(|a| a.1).sum()
    }

    /// `δ(s) = ∫_s^q ζ([0, u]) du`, exact for a step function.
    pub fn delta(&self, s: f64) -> f64 {
        let mut total = 0.0;
        let mut acc = 0.0;
        let mut prev = s;
        for &(x, m) in &self.atoms {
            if x > s {
                total += acc * (x - prev);
                prev = x;
            }
            acc += m;
        }
        total + acc * (self.q - prev)
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = vec![a];
        pts.extend(self.atoms.iter().map(|x| x.0).filter(|&x| x > a && x < b));
        pts.push(b);
        pts
    }

    /// `∫_a^b f` with the range cut at every atom.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64, tol: f64) -> f64 {
        self.breakpoints(a, b).windows(2).map(|w| simpson(&f, w[0], w[1], tol)).sum()
    }

    pub fn q_star(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).fold(0.0, f64::max)
    }
}

/// The Euclidean functional from its definition, with the split at `split`.
#[allow(clippy::too_many_arguments)]
pub fn parisi_euclidean_oracle(sp: &Spectrum, terms: &[(f64, f64)], beta: f64, mu: f64, h: f64, zeta: &Atoms, split: f64) -> f64 {
    let q = zeta.q;
    let tail = sp.lambda(beta * (q - split));
    let entropy = zeta.integrate(|u| beta * sp.k(beta * zeta.delta(u)), 0.0, split, 1e-13);
    let disorder = zeta.integrate(|u| zeta.cdf(u) * b_prime(terms, 2.0 * (q - u)), 0.0, q, 1e-13);
    0.5 * ((2.0 * PI / beta).ln() + beta * h * h / mu - beta * mu * q + tail + entropy - 2.0 * beta * beta * disorder)
}

/// `ξ(x) = Σ c_p x^p`.
pub fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn poly_prime(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (p, c)| acc * x + p as f64 * c)
}

/// The spherical functional from its definition.
pub fn parisi_spherical_oracle(sp: &Spectrum, coeffs: &[f64], beta: f64, h: f64, zeta: &Atoms, split: f64) -> f64 {
    let field = if h == 0.0 { 0.0 } else { beta * h * h / sp.k(beta * zeta.delta(0.0)) };
    let tail = sp.lambda(beta * (1.0 - split));
    let entropy = zeta.integrate(|u| beta * sp.k(beta * zeta.delta(u)), 0.0, split, 1e-13);
    let mixing = zeta.integrate(|u| zeta.cdf(u) * poly_prime(coeffs, u), 0.0, 1.0, 1e-13);
    0.5 * ((2.0 * PI / beta).ln() + field + tail + entropy + beta * beta * mixing)
}

/// `(1/2)(log(2π/β) - L^{-d} log det(μ - tΔ)) + β h² / (2μ)`, the free energy without disorder.
pub fn gaussian_free_energy(sp: &Spectrum, beta: f64, mu: f64, h: f64) -> f64 {
    0.5 * ((2.0 * PI / beta).ln() - sp.log_det(mu)) + beta * h * h / (2.0 * mu)
}

/// Relative difference with a floor of one.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
