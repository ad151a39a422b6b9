//! Disorder correlation `B(x) = Σ_i c_i e^{-a_i x}` and spherical mixing
//! functions `ξ(x) = Σ_p β_p² x^p`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numeric::ln_factorial;

/// Highest derivative order supported by [`ExpMixture::eval`].
pub const MAX_DERIVATIVE_ORDER: u32 = 8;

/// Default relative tail for [`sphere_restriction_mixing`].
pub const DEFAULT_REL_TAIL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

/// A finite exponential mixture `B(x) = Σ_i c_i e^{-a_i x}`.
///
/// Completely monotone on `[0, ∞)`. The empty mixture ([`ExpMixture::zero`])
/// stands for `B ≡ 0` and is only meaningful to the functional evaluators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ExpMixture {
    terms: Vec<ExpTerm>,
}

impl ExpMixture {
    pub fn new(terms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let terms: Vec<ExpTerm> = terms
            .into_iter()
            .map(|(weight, rate)| ExpTerm { weight, rate })
            .collect();
        ensure!(!terms.is_empty(), Config, "correlation function needs at least one term");
        for t in &terms {
            ensure!(
                t.weight.is_finite() && t.weight > 0.0 && t.rate.is_finite() && t.rate > 0.0,
                Config,
                "mixture weights and rates must be positive, got ({}, {})",
                t.weight,
                t.rate
            );
        }
        Ok(Self { terms })
    }

    /// `B ≡ 0`.
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `B(x) = e^{-x} + e^{-8x}`.
    pub fn two_scale_example() -> Self {
        Self::new([(1.0, 1.0), (1.0, 8.0)]).expect("valid mixture")
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// `B^{(order)}(x) = Σ_i c_i (-a_i)^order e^{-a_i x}`.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64> {
        ensure!(
            order <= MAX_DERIVATIVE_ORDER,
            Domain,
            "derivative order {order} exceeds the supported maximum {MAX_DERIVATIVE_ORDER}"
        );
        Ok(self.derivative(x, order))
    }

    pub(crate) fn derivative(&self, x: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * (-t.rate).powi(order as i32) * (-t.rate * x).exp())
            .sum()
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivative(x, 0)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.derivative(x, 1)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.derivative(x, 2)
    }

    pub fn d3(&self, x: f64) -> f64 {
        self.derivative(x, 3)
    }
}

impl TryFrom<Vec<[f64; 2]>> for ExpMixture {
    type Error = Error;

    fn try_from(pairs: Vec<[f64; 2]>) -> Result<Self> {
        if pairs.is_empty() {
            return Ok(Self::zero());
        }
        Self::new(pairs.into_iter().map(|[c, a]| (c, a)))
    }
}

impl From<ExpMixture> for Vec<[f64; 2]> {
    fn from(b: ExpMixture) -> Self {
        b.terms.iter().map(|t| [t.weight, t.rate]).collect()
    }
}

/// Power-series mixing function `ξ(x) = Σ_p coeffs[p] x^p` on `[-scale, scale]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyMixing {
    coeffs: Vec<f64>,
    scale: f64,
}

impl PolyMixing {
    pub fn new(coeffs: Vec<f64>, scale: f64) -> Result<Self> {
        ensure!(scale.is_finite() && scale > 0.0, Config, "overlap scale must be positive");
        ensure!(
            coeffs.iter().all(|c| c.is_finite() && *c >= 0.0),
            Config,
            "mixing coefficients must be finite and non-negative"
        );
        let m = Self { coeffs, scale };
        ensure!(m.horner(scale, 0).is_finite(), Config, "mixing function is not finite at the scale");
        Ok(m)
    }

    /// Mixing function on the unit sphere (`scale = 1`).
    pub fn unit(coeffs: Vec<f64>) -> Result<Self> {
        Self::new(coeffs, 1.0)
    }

    /// `ξ ≡ 0`.
    pub fn zero() -> Self {
        Self { coeffs: Vec::new(), scale: 1.0 }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, x: f64, order: u32) -> Result<f64> {
        ensure!(
            x.abs() <= self.scale * (1.0 + 1e-12),
            Domain,
            "mixing argument {x} outside [-{s}, {s}]",
            s = self.scale
        );
        Ok(self.horner(x, order))
    }

    pub(crate) fn horner(&self, x: f64, order: u32) -> f64 {
        let order = order as usize;
        if order >= self.coeffs.len() {
            return 0.0;
        }
        let mut acc = 0.0;
        for p in (order..self.coeffs.len()).rev() {
            let falling: f64 = (0..order).map(|j| (p - j) as f64).product();
            acc = acc * x + self.coeffs[p] * falling;
        }
        acc
    }

    pub fn value(&self, x: f64) -> f64 {
        self.horner(x, 0)
    }

    pub fn d1(&self, x: f64) -> f64 {
        self.horner(x, 1)
    }

    pub fn d2(&self, x: f64) -> f64 {
        self.horner(x, 2)
    }

    /// The same function of the rescaled argument, `x ↦ ξ(scale · x)` on `[-1, 1]`.
    pub fn to_unit_scale(&self) -> PolyMixing {
        let mut power = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * power;
                power *= self.scale;
                v
            })
            .collect();
        PolyMixing { coeffs, scale: 1.0 }
    }
}

// P(Poisson(lambda) > n), summed upward from n + 1 in log space.
fn poisson_upper_tail(lambda: f64, n: usize) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    let mut k = n + 1;
    let mut log_term = k as f64 * lambda.ln() - lambda - ln_factorial(k);
    let mut total = 0.0;
    loop {
        let term = log_term.exp();
        total += term;
        k += 1;
        log_term += lambda.ln() - (k as f64).ln();
        if k as f64 > lambda && log_term.exp() < 1e-18 * total.max(1e-300) {
            break;
        }
        if k > n + 100_000 {
            break;
        }
    }
    total
}

/// Mixing function of the restriction of the field with correlation `B` to
/// the sphere of squared radius `q`.
///
/// The coefficients are `γ_p(2q)² = ((-2)^p / p!) B^{(p)}(2q)`, so that
/// `B(2(q - s)) = Σ_p γ_p(2q)² s^p` for overlaps `s ∈ [-q, q]`. The series is
/// truncated at the first degree whose remaining tail at `s = q` falls below
/// `rel_tail · B(0)`; for an exponential mixture that tail is a weighted sum
/// of Poisson upper tails.
pub fn sphere_restriction_mixing(b: &ExpMixture, q: f64, rel_tail: f64) -> Result<PolyMixing> {
    ensure!(q.is_finite() && q > 0.0, Domain, "sphere radius q must be positive");
    ensure!(rel_tail > 0.0 && rel_tail < 1.0, Domain, "rel_tail must lie in (0, 1)");
    if b.is_zero() {
        return Ok(PolyMixing { coeffs: Vec::new(), scale: q });
    }
    let b0 = b.value(0.0);
    let mut coeffs = Vec::new();
    let mut p = 0usize;
    loop {
        let lf = ln_factorial(p);
        let c: f64 = b
            .terms()
            .iter()
            .map(|t| t.weight * (p as f64 * (2.0 * t.rate).ln() - lf - 2.0 * t.rate * q).exp())
            .sum();
        coeffs.push(c);
        let tail: f64 = b
            .terms()
            .iter()
            .map(|t| t.weight * poisson_upper_tail(2.0 * t.rate * q, p))
            .sum();
        if tail < rel_tail * b0 {
            break;
        }
        p += 1;
        ensure!(p < 100_000, Numerical, "sphere restriction series did not truncate");
    }
    PolyMixing::new(coeffs, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_examples() {
        let b = ExpMixture::two_scale_example();
        assert_eq!(b.eval(0.0, 0).unwrap(), 2.0);
        assert_eq!(b.eval(0.0, 2).unwrap(), 65.0);
        let v = b.eval(0.1, 0).unwrap();
        assert!((v - ((-0.1f64).exp() + (-0.8f64).exp())).abs() < 1e-15);
        assert!((v - 1.354166).abs() < 1e-6);
        assert!(matches!(b.eval(0.0, 9), Err(Error::Domain(_))));
    }

    #[test]
    fn b_rejects_bad_terms() {
        assert!(ExpMixture::new([]).is_err());
        assert!(ExpMixture::new([(0.0, 1.0)]).is_err());
        assert!(ExpMixture::new([(1.0, -1.0)]).is_err());
        assert!(ExpMixture::zero().is_zero());
        assert_eq!(ExpMixture::zero().value(0.3), 0.0);
    }

    #[test]
    fn complete_monotonicity_on_grid() {
        let b = ExpMixture::new([(0.3, 0.5), (1.2, 2.0), (0.1, 9.0)]).unwrap();
        for i in 0..=100 {
            let x = 0.1 * i as f64;
            for p in 0..=4 {
                let v = b.eval(x, p).unwrap() * if p % 2 == 0 { 1.0 } else { -1.0 };
                assert!(v > 0.0, "x={x} p={p}");
            }
        }
    }

    #[test]
    fn xi_examples() {
        let sq = PolyMixing::unit(vec![0.0, 0.0, 1.0]).unwrap();
        assert_eq!(sq.eval(0.5, 0).unwrap(), 0.25);
        assert_eq!(sq.eval(0.5, 1).unwrap(), 1.0);
        assert_eq!(sq.eval(0.5, 2).unwrap(), 2.0);
        assert_eq!(sq.eval(0.5, 3).unwrap(), 0.0);
        let cubic = PolyMixing::unit(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(cubic.eval(1.0, 0).unwrap(), 2.0);
        assert!(matches!(cubic.eval(1.5, 0), Err(Error::Domain(_))));
        assert!(PolyMixing::unit(vec![-1.0]).is_err());
    }

    #[test]
    fn restriction_of_single_exponential() {
        let b = ExpMixture::new([(1.0, 1.0)]).unwrap();
        let xi = sphere_restriction_mixing(&b, 0.5, DEFAULT_REL_TAIL).unwrap();
        let mut expected = (-1.0f64).exp();
        for (p, c) in xi.coeffs().iter().enumerate() {
            assert!((c - expected).abs() <= 1e-13 * expected, "p={p}");
            expected *= 2.0 / (p + 1) as f64;
        }
        let total = xi.value(0.5);
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn restriction_constant_term_and_positivity() {
        let b = ExpMixture::two_scale_example();
        let xi = sphere_restriction_mixing(&b, 1.0, DEFAULT_REL_TAIL).unwrap();
        let expected = (-2.0f64).exp() + (-16.0f64).exp();
        assert!((xi.coeffs()[0] - expected).abs() < 1e-15);
        assert!((xi.coeffs()[0] - 0.135335).abs() < 1e-6);
        assert!(xi.coeffs().iter().skip(1).all(|&c| c > 0.0));
        assert!((xi.value(1.0) - b.value(0.0)).abs() < 1e-13 * b.value(0.0));
    }

    #[test]
    fn unit_rescaling() {
        let b = ExpMixture::two_scale_example();
        let q = 0.7;
        let xi = sphere_restriction_mixing(&b, q, DEFAULT_REL_TAIL).unwrap();
        let unit = xi.to_unit_scale();
        for &r in &[-1.0, -0.3, 0.0, 0.4, 1.0] {
            let want = b.value(2.0 * q * (1.0 - r));
            assert!((unit.value(r) - want).abs() < 1e-12, "r={r}");
        }
    }
}
