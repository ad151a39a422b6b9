//! The Euclidean Parisi functional `P_{β,q}(ζ)`, the spherical functional
//! `B_β(ζ)`, their values on Dirac masses, the first-variation functions
//! `F = f'` and `f`, and the annealed free energy.
//!
//! Sign conventions: the log-determinant enters every free energy with a
//! minus sign, `-(1/L^d) log det(μ I - t Δ)`. This is what direct Gaussian
//! integration gives for `B ≡ 0`, and it is the value `P` takes at its
//! replica-symmetric saddle.

use std::f64::consts::PI;

use crate::correlation::{ExpMixture, PolyMixing};
use crate::error::{ensure, Result};
use crate::lattice::Lattice;
use crate::measure::{integrate_k_piece, Segment, StepMeasure};
use crate::numeric::gauss_legendre;

/// Parameters of the Euclidean elastic manifold.
#[derive(Debug, Clone)]
pub struct EuclideanParams {
    pub beta: f64,
    pub mu: f64,
    pub h: f64,
    pub lattice: Lattice,
    pub disorder: ExpMixture,
}

impl EuclideanParams {
    pub fn new(beta: f64, mu: f64, h: f64, lattice: Lattice, disorder: ExpMixture) -> Result<Self> {
        ensure!(beta.is_finite() && beta > 0.0, Domain, "beta must be positive, got {beta}");
        ensure!(mu.is_finite() && mu > 0.0, Domain, "mu must be positive, got {mu}");
        ensure!(h.is_finite(), Domain, "external field must be finite");
        Ok(Self { beta, mu, h, lattice, disorder })
    }

    /// `R_1(μ; t)`.
    pub fn r1(&self) -> f64 {
        self.lattice.resolvent_unchecked(1, self.mu)
    }

    /// `R_2(μ; t)`.
    pub fn r2(&self) -> f64 {
        self.lattice.resolvent_unchecked(2, self.mu)
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.beta, mu, self.h, self.lattice.clone(), self.disorder.clone())
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(beta, self.mu, self.h, self.lattice.clone(), self.disorder.clone())
    }
}

/// Parameters of the spherical model; the mixing function lives on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct SphericalParams {
    pub beta: f64,
    pub h: f64,
    pub lattice: Lattice,
    pub mixing: PolyMixing,
}

impl SphericalParams {
    pub fn new(beta: f64, h: f64, lattice: Lattice, mixing: PolyMixing) -> Result<Self> {
        ensure!(beta.is_finite() && beta > 0.0, Domain, "beta must be positive, got {beta}");
        ensure!(h.is_finite(), Domain, "external field must be finite");
        ensure!(
            (mixing.scale() - 1.0).abs() < 1e-12,
            Domain,
            "spherical mixing must be defined on [-1, 1], got scale {}",
            mixing.scale()
        );
        Ok(Self { beta, h, lattice, mixing })
    }
}

fn check_carrier(zeta: &StepMeasure, q: f64) -> Result<()> {
    ensure!(q.is_finite() && q > 0.0, Domain, "q must be positive, got {q}");
    ensure!(
        (zeta.q_max() - q).abs() <= 1e-12 * q,
        Domain,
        "measure lives on [0, {}) but the functional needs [0, {q})",
        zeta.q_max()
    );
    Ok(())
}

fn check_split(zeta: &StepMeasure, split: f64) -> Result<()> {
    ensure!(
        split >= zeta.q_star() && split < zeta.q_max(),
        Domain,
        "split point {split} must lie in [{}, {})",
        zeta.q_star(),
        zeta.q_max()
    );
    Ok(())
}

// Λ(β δ(split)) + β ∫_0^split K(β δ(u)) du, the part shared by both functionals.
fn entropy_part(lattice: &Lattice, beta: f64, zeta: &StepMeasure, split: f64) -> Result<f64> {
    let lambda = lattice.lambda_value(beta * zeta.delta(split))?;
    let mut integral = 0.0;
    for seg in zeta.segments_between(0.0, split) {
        integral += integrate_k_piece(lattice, beta, &seg)?;
    }
    Ok(lambda + beta * integral)
}

/// `P_{β,q}(ζ)` with the split point at the largest atom.
pub fn parisi_euclidean(p: &EuclideanParams, q: f64, zeta: &StepMeasure) -> Result<f64> {
    parisi_euclidean_split(p, q, zeta, zeta.q_star())
}

/// `P_{β,q}(ζ)` evaluated with an explicit split point `split ∈ [q_*, q)`.
///
/// The value does not depend on the split; this entry point exists so that
/// the independence can be checked.
pub fn parisi_euclidean_split(p: &EuclideanParams, q: f64, zeta: &StepMeasure, split: f64) -> Result<f64> {
    check_carrier(zeta, q)?;
    check_split(zeta, split)?;
    let beta = p.beta;
    // ∫_0^q ζ([0,u]) B'(2(q-u)) du, exact per constant-CDF piece.
    let disorder: f64 = zeta
        .segments()
        .iter()
        .filter(|s| s.cdf > 0.0)
        .map(|s| s.cdf * 0.5 * (p.disorder.value(2.0 * (q - s.lo)) - p.disorder.value(2.0 * (q - s.hi))))
        .sum();
    let entropy = entropy_part(&p.lattice, beta, zeta, split)?;
    Ok(0.5
        * ((2.0 * PI / beta).ln() + beta * p.h * p.h / p.mu - beta * p.mu * q + entropy
            - 2.0 * beta * beta * disorder))
}

/// `B_β(ζ)` with the split point at the largest atom.
pub fn parisi_spherical(p: &SphericalParams, zeta: &StepMeasure) -> Result<f64> {
    parisi_spherical_split(p, zeta, zeta.q_star())
}

pub fn parisi_spherical_split(p: &SphericalParams, zeta: &StepMeasure, split: f64) -> Result<f64> {
    check_carrier(zeta, 1.0)?;
    check_split(zeta, split)?;
    let beta = p.beta;
    let field = if p.h == 0.0 {
        0.0
    } else {
        beta * p.h * p.h / p.lattice.k_inverse(beta * zeta.delta(0.0))?
    };
    let mixing: f64 = zeta
        .segments()
        .iter()
        .map(|s| s.cdf * (p.mixing.value(s.hi) - p.mixing.value(s.lo)))
        .sum();
    let entropy = entropy_part(&p.lattice, beta, zeta, split)?;
    Ok(0.5 * ((2.0 * PI / beta).ln() + field + entropy + beta * beta * mixing))
}

/// `P_{β,q}(δ_{q_*})` in closed form.
pub fn dirac_eval_euclidean(p: &EuclideanParams, q: f64, q_star: f64) -> Result<f64> {
    ensure!(
        q > 0.0 && (0.0..q).contains(&q_star),
        Domain,
        "Dirac location {q_star} outside [0, {q})"
    );
    let beta = p.beta;
    let k = p.lattice.k_inverse(beta * (q - q_star))?;
    Ok(0.5
        * ((2.0 * PI / beta).ln() + beta * p.h * p.h / p.mu + beta * q * (k - p.mu)
            - p.lattice.log_det_unchecked(k)
            + beta * beta * (p.disorder.value(0.0) - p.disorder.value(2.0 * (q - q_star)))))
}

/// `B_β(δ_{q_*})` in closed form.
pub fn dirac_eval_spherical(p: &SphericalParams, q_star: f64) -> Result<f64> {
    ensure!((0.0..1.0).contains(&q_star), Domain, "Dirac location {q_star} outside [0, 1)");
    let beta = p.beta;
    let k = p.lattice.k_inverse(beta * (1.0 - q_star))?;
    Ok(0.5
        * ((2.0 * PI / beta).ln() + beta * p.h * p.h / k + beta * k - p.lattice.log_det_unchecked(k)
            + beta * beta * (p.mixing.value(1.0) - p.mixing.value(q_star))))
}

/// `N^{-1} L^{-d} log E Z`.
pub fn annealed_free_energy(p: &EuclideanParams) -> f64 {
    0.5 * ((2.0 * PI / p.beta).ln() - p.lattice.log_det_unchecked(p.mu)
        + p.beta * p.beta * p.disorder.value(0.0))
        + p.beta * p.h * p.h / (2.0 * p.mu)
}

#[derive(Debug, Clone)]
enum Outer {
    Euclidean { disorder: ExpMixture, q: f64 },
    Spherical { mixing: PolyMixing, field: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    seg: Segment,
    k_lo: f64,
    lambda_lo: f64,
    k_prime_lo: f64,
    // ∫_lo^hi K'(β δ(u)) du and ∫_lo^hi (hi - u) K'(β δ(u)) du.
    j1: f64,
    m: f64,
}

/// The first-variation functions of a functional at a fixed measure.
///
/// `f_prime(s) = F(s)` and `f(s) = ∫_0^s F`. For the Euclidean functional
/// `F(s) = -2 B'(2(q - s)) + ∫_0^s K'(β δ(u)) du`; for the spherical one
/// `F(s) = -h² K(β δ(0))^{-2} K'(β δ(0)) + ξ'(s) + ∫_0^s K'(β δ(u)) du`.
/// A measure is the minimizer exactly when it is carried by the set where
/// `f` attains its supremum over `(0, q)`.
#[derive(Debug, Clone)]
pub struct Stationarity {
    lattice: Lattice,
    beta: f64,
    q_max: f64,
    pieces: Vec<Piece>,
    outer: Outer,
}

/// Stationarity functions of `P_{β,q}` at `ζ`.
pub fn stationarity_euclidean(p: &EuclideanParams, q: f64, zeta: &StepMeasure) -> Result<Stationarity> {
    check_carrier(zeta, q)?;
    Stationarity::build(
        &p.lattice,
        p.beta,
        zeta,
        Outer::Euclidean { disorder: p.disorder.clone(), q },
    )
}

/// Stationarity functions of `B_β` at `ζ`.
pub fn stationarity_spherical(p: &SphericalParams, zeta: &StepMeasure) -> Result<Stationarity> {
    check_carrier(zeta, 1.0)?;
    let field = if p.h == 0.0 {
        0.0
    } else {
        let w0 = p.beta * zeta.delta(0.0);
        let k0 = p.lattice.k_inverse(w0)?;
        let kp0 = -1.0 / p.lattice.resolvent_unchecked(2, k0);
        -p.h * p.h * kp0 / (k0 * k0)
    };
    Stationarity::build(&p.lattice, p.beta, zeta, Outer::Spherical { mixing: p.mixing.clone(), field })
}

impl Stationarity {
    fn build(lattice: &Lattice, beta: f64, zeta: &StepMeasure, outer: Outer) -> Result<Self> {
        let mut pieces = Vec::new();
        let segments = zeta.segments();
        let last = segments.len() - 1;
        for (i, seg) in segments.into_iter().enumerate() {
            let w_lo = beta * seg.delta_lo;
            let (k_lo, lambda_lo) = lattice.k_and_lambda(w_lo)?;
            let k_prime_lo = -1.0 / lattice.resolvent_unchecked(2, k_lo);
            let mut piece = Piece { seg, k_lo, lambda_lo, k_prime_lo, j1: 0.0, m: 0.0 };
            if i < last {
                let (j1, m) = partial_integrals(lattice, beta, &piece, seg.hi)?;
                piece.j1 = j1;
                piece.m = m;
            }
            pieces.push(piece);
        }
        Ok(Self { lattice: lattice.clone(), beta, q_max: zeta.q_max(), pieces, outer })
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    fn locate(&self, s: f64) -> Result<usize> {
        ensure!(
            (0.0..self.q_max).contains(&s),
            Domain,
            "stationarity functions are defined on [0, {}), got {s}",
            self.q_max
        );
        Ok(self.pieces.iter().rposition(|p| p.seg.lo <= s).unwrap_or(0))
    }

    fn outer_f_prime(&self, s: f64) -> f64 {
        match &self.outer {
            Outer::Euclidean { disorder, q } => -2.0 * disorder.d1(2.0 * (q - s)),
            Outer::Spherical { mixing, field } => field + mixing.d1(s),
        }
    }

    fn outer_f(&self, s: f64) -> f64 {
        match &self.outer {
            Outer::Euclidean { disorder, q } => disorder.value(2.0 * (q - s)) - disorder.value(2.0 * q),
            Outer::Spherical { mixing, field } => field * s + mixing.value(s) - mixing.value(0.0),
        }
    }

    /// `F(s)`.
    pub fn f_prime(&self, s: f64) -> Result<f64> {
        let idx = self.locate(s)?;
        let before: f64 = self.pieces[..idx].iter().map(|p| p.j1).sum();
        let (j1, _) = partial_integrals(&self.lattice, self.beta, &self.pieces[idx], s)?;
        Ok(self.outer_f_prime(s) + before + j1)
    }

    /// `f(s) = ∫_0^s F(u) du`.
    pub fn f(&self, s: f64) -> Result<f64> {
        let idx = self.locate(s)?;
        let before: f64 = self.pieces[..idx]
            .iter()
            .map(|p| (s - p.seg.hi) * p.j1 + p.m)
            .sum();
        let (_, m) = partial_integrals(&self.lattice, self.beta, &self.pieces[idx], s)?;
        Ok(self.outer_f(s) + before + m)
    }

    /// `(F(s), f(s))` together.
    pub fn both(&self, s: f64) -> Result<(f64, f64)> {
        let idx = self.locate(s)?;
        let (j1, m) = partial_integrals(&self.lattice, self.beta, &self.pieces[idx], s)?;
        let mut big = self.outer_f_prime(s) + j1;
        let mut small = self.outer_f(s) + m;
        for p in &self.pieces[..idx] {
            big += p.j1;
            small += (s - p.seg.hi) * p.j1 + p.m;
        }
        Ok((big, small))
    }
}

// (∫_lo^s K'(β δ(u)) du, ∫_lo^s (s - u) K'(β δ(u)) du) within one piece.
fn partial_integrals(lattice: &Lattice, beta: f64, piece: &Piece, s: f64) -> Result<(f64, f64)> {
    let seg = &piece.seg;
    let len = s - seg.lo;
    if len <= 0.0 {
        return Ok((0.0, 0.0));
    }
    if seg.cdf == 0.0 {
        return Ok((piece.k_prime_lo * len, 0.5 * piece.k_prime_lo * len * len));
    }
    let w_lo = beta * seg.delta_lo;
    let w_s = beta * (seg.delta_lo - seg.cdf * len);
    ensure!(w_s > 0.0, Invariant, "δ vanished inside the carrier");
    let bx = beta * seg.cdf;
    if w_lo - w_s < 0.05 * w_lo {
        let mut err = None;
        let mut k_prime = |u: f64| -> f64 {
            let w = beta * (seg.delta_lo - seg.cdf * (u - seg.lo));
            match lattice.k_inverse(w) {
                Ok(k) => -1.0 / lattice.resolvent_unchecked(2, k),
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            }
        };
        let j1 = gauss_legendre(&mut k_prime, seg.lo, s);
        let m = gauss_legendre(|u| (s - u) * k_prime(u), seg.lo, s);
        return err.map_or(Ok((j1, m)), Err);
    }
    let (k_s, lambda_s) = lattice.k_and_lambda(w_s)?;
    let j1 = (piece.k_lo - k_s) / bx;
    let m = len * piece.k_lo / bx - (piece.lambda_lo - lambda_s) / (bx * bx);
    Ok((j1, m))
}
