//! Replica-symmetry classification, Larkin masses, `β_DW`, AT-lines and
//! phase-diagram scans.
//!
//! The Euclidean criterion compares `g_β(s) = β² B(2s/β) + Λ(s) - s (2β B'(2R_1/β) + μ)`
//! on `(0, R_1(μ)]` with its endpoint value. Since `Λ(s) = s K(s) - L^{-d} log det(K(s) I - tΔ)`,
//! one has `g_β'(R_1) = 0` and `g_β''(R_1) = 4 B''(2R_1/β) - 1/R_2(μ)`. A point is
//! RS when no interior value exceeds `g_β(R_1)` and the endpoint is not a local
//! minimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::ExpMixture;
use crate::error::{ensure, Error, Result};
use crate::functional::{dirac_eval_spherical, EuclideanParams, SphericalParams};
use crate::lattice::Lattice;
use crate::numeric::{bisect, golden_max, golden_min, log_space};

const CRITERION_GRID: usize = 1024;
const LARKIN_GRID: usize = 2048;
/// Width in `μ` to which AT-line boundaries are bisected.
pub const AT_LINE_TOL: f64 = 1e-8;
/// Width in `β` to which `β_DW` is bisected.
pub const BETA_DW_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePoint {
    pub beta: f64,
    pub mu: f64,
    pub is_rs: bool,
    /// `sup_{(0, R_1)} g_β - g_β(R_1)`.
    pub criterion_gap: f64,
    pub argmax_s: f64,
}

/// Classification of a spherical model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphericalPhasePoint {
    pub beta: f64,
    /// Minimizer of the functional over Dirac masses.
    pub q_star: f64,
    pub is_rs: bool,
    /// `sup_{(q_*, 1)} g_β - g_β(q_*)`.
    pub criterion_gap: f64,
    pub argmax_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagram {
    pub grid: Vec<PhasePoint>,
    /// `(β, μ)` boundary points between RS and RSB.
    pub at_line: Vec<(f64, f64)>,
    /// Every root `(β, μ)` of the positive-temperature Larkin equation.
    pub larkin_curve: Vec<(f64, f64)>,
    pub beta_dw: Option<f64>,
    pub mu_larkin_zero_t: f64,
}

/// `g_β` and its endpoint data for one parameter point.
struct Criterion<'a> {
    lattice: &'a Lattice,
    disorder: &'a ExpMixture,
    beta: f64,
    slope: f64,
    r1: f64,
}

impl<'a> Criterion<'a> {
    fn new(p: &'a EuclideanParams) -> Self {
        let r1 = p.r1();
        let slope = 2.0 * p.beta * p.disorder.d1(2.0 * r1 / p.beta) + p.mu;
        Self { lattice: &p.lattice, disorder: &p.disorder, beta: p.beta, slope, r1 }
    }

    fn g(&self, s: f64) -> Result<f64> {
        let (_, lambda) = self.lattice.k_and_lambda(s)?;
        Ok(self.beta * self.beta * self.disorder.value(2.0 * s / self.beta) + lambda - s * self.slope)
    }
}

/// `g_β''(R_1(μ)) = 4 B''(2R_1/β) - 1/R_2(μ)`.
pub fn criterion_curvature(p: &EuclideanParams) -> f64 {
    4.0 * p.disorder.d2(2.0 * p.r1() / p.beta) - 1.0 / p.r2()
}

/// The function `g_β` of the replica-symmetry criterion.
pub fn criterion_function(p: &EuclideanParams, s: f64) -> Result<f64> {
    ensure!(s > 0.0, Domain, "criterion argument must be positive, got {s}");
    Criterion::new(p).g(s)
}

// Grid scan plus golden refinement of the three best local maxima of `g` on
// `(lo, hi)`, with the grid running from `lo` (excluded) to `hi` (included).
fn interior_sup<G: FnMut(f64) -> Result<f64>>(mut g: G, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let n = CRITERION_GRID;
    let xs: Vec<f64> = (1..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect();
    let ys = xs.iter().map(|&s| g(s)).collect::<Result<Vec<f64>>>()?;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| (j == 0 || ys[j] >= ys[j - 1]) && (j + 1 == n || ys[j] >= ys[j + 1]))
        .collect();
    peaks.sort_by(|&a, &b| ys[b].total_cmp(&ys[a]));
    let mut failure: Option<Error> = None;
    let mut eval = |s: f64| match g(s) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let mut best = (xs[n - 1], ys[n - 1]);
    for &j in peaks.iter().take(3) {
        let a = if j == 0 { lo + 0.5 * (xs[0] - lo) } else { xs[j - 1] };
        let b = if j + 1 == n { hi } else { xs[j + 1] };
        let (x, v) = golden_max(&mut eval, a, b, 1e-14 * hi);
        if v > best.1 {
            best = (x, v);
        }
        if ys[j] > best.1 {
            best = (xs[j], ys[j]);
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

fn rs_tolerance(endpoint: f64) -> f64 {
    1e-9 * endpoint.abs().max(1.0)
}

/// Classifies `(β, μ)` as RS or RSB.
///
/// The point is RS when `sup g_β ≤ g_β(R_1) + 1e-9 max(1, |g_β(R_1)|)` and
/// `g_β''(R_1) ≤ 0`. The second condition decides exactly at the Larkin line,
/// where the first one is only resolved to the tolerance.
pub fn rs_criterion(p: &EuclideanParams) -> Result<PhasePoint> {
    let c = Criterion::new(p);
    let endpoint = c.g(c.r1)?;
    let k_end = p.lattice.k_inverse(c.r1)?;
    ensure!(
        (k_end - p.mu).abs() <= 1e-8 * p.mu.max(1.0),
        Invariant,
        "criterion slope at R_1 is {} instead of 0",
        k_end - p.mu
    );
    let (argmax_s, sup) = interior_sup(|s| c.g(s), 0.0, c.r1)?;
    let criterion_gap = sup - endpoint;
    let is_rs = criterion_gap <= rs_tolerance(endpoint) && criterion_curvature(p) <= 0.0;
    Ok(PhasePoint { beta: p.beta, mu: p.mu, is_rs, criterion_gap, argmax_s })
}

fn disorder_params(b: &ExpMixture, lattice: &Lattice, beta: f64, mu: f64) -> Result<EuclideanParams> {
    EuclideanParams::new(beta, mu, 0.0, lattice.clone(), b.clone())
}

/// Zero-temperature Larkin mass, the root of `4 B''(0) R_2(μ) = 1`.
pub fn larkin_mass_zero_t(b: &ExpMixture, lattice: &Lattice) -> Result<f64> {
    ensure!(!b.is_zero(), Domain, "the Larkin mass is undefined without disorder");
    let b2 = b.d2(0.0);
    let h = |mu: f64| 4.0 * b2 * lattice.resolvent_unchecked(2, mu) - 1.0;
    let (mut lo, mut hi) = (1.0, 1.0);
    while h(lo) <= 0.0 {
        lo *= 0.5;
    }
    while h(hi) >= 0.0 {
        hi *= 2.0;
    }
    let root = bisect(h, lo, hi, 1e-13 * hi);
    Ok(root)
}

fn larkin_fn(b: &ExpMixture, lattice: &Lattice, beta: f64, mu: f64) -> f64 {
    let r1 = lattice.resolvent_unchecked(1, mu);
    4.0 * b.d2(2.0 * r1 / beta) * lattice.resolvent_unchecked(2, mu) - 1.0
}

/// All roots of `4 B''(2R_1(μ)/β) R_2(μ) = 1` for `μ ∈ [1e-4, 10 μ_Lar(∞)]`, ascending.
///
/// Sign changes on a log grid are bisected; grid extrema that stay on one side
/// are refined, so that a pair of nearby roots is not missed.
pub fn larkin_roots(b: &ExpMixture, lattice: &Lattice, beta: f64) -> Result<Vec<f64>> {
    ensure!(beta.is_finite() && beta > 0.0, Domain, "beta must be positive, got {beta}");
    if b.is_zero() {
        return Ok(Vec::new());
    }
    let top = 10.0 * larkin_mass_zero_t(b, lattice)?;
    let mus = log_space(1e-4, top, LARKIN_GRID);
    let h = |mu: f64| larkin_fn(b, lattice, beta, mu);
    let hs: Vec<f64> = mus.iter().map(|&m| h(m)).collect();
    let mut roots = Vec::new();
    let tol = |x: f64| 1e-13 * x;
    for j in 0..mus.len() - 1 {
        if (hs[j] > 0.0) != (hs[j + 1] > 0.0) {
            roots.push(bisect(h, mus[j], mus[j + 1], tol(mus[j + 1])));
        }
        if j == 0 {
            continue;
        }
        let is_max = hs[j] >= hs[j - 1] && hs[j] >= hs[j + 1] && hs[j] < 0.0;
        let is_min = hs[j] <= hs[j - 1] && hs[j] <= hs[j + 1] && hs[j] > 0.0;
        if is_max || is_min {
            let sign = if is_max { 1.0 } else { -1.0 };
            let (lx, v) = golden_max(|x| sign * h(x.exp()), mus[j - 1].ln(), mus[j + 1].ln(), 1e-13);
            if v > 0.0 {
                let x = lx.exp();
                roots.push(bisect(h, mus[j - 1], x, tol(x)));
                roots.push(bisect(h, x, mus[j + 1], tol(mus[j + 1])));
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Positive-temperature Larkin mass: the largest root, if any.
pub fn larkin_mass_finite_t(b: &ExpMixture, lattice: &Lattice, beta: f64) -> Result<Option<f64>> {
    Ok(larkin_roots(b, lattice, beta)?.last().copied())
}

/// `β_DW`: the inverse temperature below which the Larkin equation has no root.
///
/// Returns 0 when roots exist for every `β ≥ 1e-8`.
pub fn beta_dw(b: &ExpMixture, lattice: &Lattice) -> Result<f64> {
    ensure!(!b.is_zero(), Domain, "β_DW is undefined without disorder");
    let exists = |beta: f64| -> Result<bool> { Ok(!larkin_roots(b, lattice, beta)?.is_empty()) };
    let mut hi = 1.0;
    let mut doublings = 0;
    while !exists(hi)? {
        ensure!(doublings < 80, Numerical, "no Larkin root found up to β = {hi}");
        hi *= 2.0;
        doublings += 1;
    }
    let mut lo = hi;
    loop {
        lo *= 0.5;
        if lo < 1e-8 {
            return Ok(0.0);
        }
        if !exists(lo)? {
            break;
        }
        hi = lo;
    }
    while hi - lo > BETA_DW_TOL {
        let mid = 0.5 * (lo + hi);
        if exists(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn boundaries(b: &ExpMixture, lattice: &Lattice, beta: f64, mus: &[f64], flags: &[bool]) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for j in 0..mus.len().saturating_sub(1) {
        if flags[j] == flags[j + 1] {
            continue;
        }
        let (mut lo, mut hi) = (mus[j], mus[j + 1]);
        let lo_rs = flags[j];
        while hi - lo > AT_LINE_TOL {
            let mid = 0.5 * (lo + hi);
            if rs_criterion(&disorder_params(b, lattice, beta, mid)?)?.is_rs == lo_rs {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

/// RS/RSB boundaries along the slice `β = const`, seeded from `n_seed`
/// log-spaced masses in `mu_range`.
pub fn at_line(b: &ExpMixture, lattice: &Lattice, beta: f64, mu_range: (f64, f64), n_seed: usize) -> Result<Vec<f64>> {
    let (lo, hi) = mu_range;
    ensure!(lo > 0.0 && hi > lo && hi.is_finite(), Domain, "mass range must be a positive interval");
    ensure!(n_seed >= 2, Domain, "at least two seeds are needed");
    let mus = log_space(lo, hi, n_seed);
    let flags = mus
        .iter()
        .map(|&mu| Ok(rs_criterion(&disorder_params(b, lattice, beta, mu)?)?.is_rs))
        .collect::<Result<Vec<bool>>>()?;
    boundaries(b, lattice, beta, &mus, &flags)
}

// g of the spherical criterion, from the minimizing Dirac location q_*.
struct SphericalCriterion<'a> {
    p: &'a SphericalParams,
    slope: f64,
}

impl SphericalCriterion<'_> {
    fn g(&self, s: f64) -> Result<f64> {
        let beta = self.p.beta;
        let (_, lambda) = self.p.lattice.k_and_lambda(beta * (1.0 - s))?;
        Ok(beta * beta * self.p.mixing.value(s) + lambda - s * self.slope)
    }
}

/// Minimizer of the spherical functional over Dirac masses.
pub fn spherical_dirac_minimizer(p: &SphericalParams) -> Result<f64> {
    let n = CRITERION_GRID;
    let xs: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
    let ys = xs.iter().map(|&s| dirac_eval_spherical(p, s)).collect::<Result<Vec<f64>>>()?;
    let j = (0..n).min_by(|&a, &b| ys[a].total_cmp(&ys[b])).unwrap_or(0);
    let lo = if j == 0 { 0.0 } else { xs[j - 1] };
    let hi = if j + 1 == n { 0.5 * (xs[j] + 1.0) } else { xs[j + 1] };
    let (x, v) = golden_min(|s| dirac_eval_spherical(p, s).unwrap_or(f64::INFINITY), lo, hi, 1e-14);
    Ok(if ys[0] <= v { 0.0 } else { x })
}

/// Classifies a spherical model, testing `g_β` on `[q_*, 1)`.
pub fn spherical_rs_criterion(p: &SphericalParams) -> Result<SphericalPhasePoint> {
    let beta = p.beta;
    let q_star = spherical_dirac_minimizer(p)?;
    let k_star = p.lattice.k_inverse(beta * (1.0 - q_star))?;
    let slope = beta * beta * p.mixing.d1(q_star) - beta * k_star;
    let c = SphericalCriterion { p, slope };
    let endpoint = c.g(q_star)?;
    // Search on (q_*, 1) with the far end mapped away from the singularity at 1.
    let hi = 1.0 - 1e-12;
    let (argmax_s, sup) = interior_sup(|s| c.g(s), q_star, hi)?;
    let (argmax_s, sup) = if argmax_s >= hi { (q_star, endpoint) } else { (argmax_s, sup) };
    let criterion_gap = sup - endpoint;
    let kp = -1.0 / p.lattice.resolvent_unchecked(2, k_star);
    let curvature = beta * beta * p.mixing.d2(q_star) + beta * beta * kp;
    let is_rs = criterion_gap <= rs_tolerance(endpoint) && curvature <= 0.0;
    Ok(SphericalPhasePoint { beta, q_star, is_rs, criterion_gap, argmax_s })
}

/// Classifies every grid point and traces the AT-line and Larkin curve.
///
/// Points are ordered β-major, matching the order of `beta_grid`.
pub fn phase_diagram(b: &ExpMixture, lattice: &Lattice, beta_grid: &[f64], mu_grid: &[f64]) -> Result<PhaseDiagram> {
    ensure!(!beta_grid.is_empty() && !mu_grid.is_empty(), Config, "phase-diagram grids must be non-empty");
    ensure!(
        beta_grid.iter().chain(mu_grid).all(|x| x.is_finite() && *x > 0.0),
        Config,
        "phase-diagram grids must be positive"
    );
    let mut mus = mu_grid.to_vec();
    mus.sort_by(f64::total_cmp);
    let rows = beta_grid
        .par_iter()
        .map(|&beta| -> Result<(Vec<PhasePoint>, Vec<f64>, Vec<f64>)> {
            let points = mus
                .par_iter()
                .map(|&mu| rs_criterion(&disorder_params(b, lattice, beta, mu)?))
                .collect::<Result<Vec<_>>>()?;
            let flags: Vec<bool> = points.iter().map(|p| p.is_rs).collect();
            let at = boundaries(b, lattice, beta, &mus, &flags)?;
            let lark = larkin_roots(b, lattice, beta)?;
            Ok((points, at, lark))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut diagram = PhaseDiagram {
        grid: Vec::with_capacity(beta_grid.len() * mus.len()),
        at_line: Vec::new(),
        larkin_curve: Vec::new(),
        beta_dw: if b.is_zero() { None } else { Some(beta_dw(b, lattice)?) },
        mu_larkin_zero_t: if b.is_zero() { 0.0 } else { larkin_mass_zero_t(b, lattice)? },
    };
    for (&beta, (points, at, lark)) in beta_grid.iter().zip(rows) {
        diagram.grid.extend(points);
        diagram.at_line.extend(at.into_iter().map(|mu| (beta, mu)));
        diagram.larkin_curve.extend(lark.into_iter().map(|mu| (beta, mu)));
    }
    Ok(diagram)
}

/// Number of maximal runs of RSB points along one `β` row of a diagram.
pub fn rsb_intervals(diagram: &PhaseDiagram, beta: f64) -> usize {
    let row: Vec<bool> = diagram.grid.iter().filter(|p| p.beta == beta).map(|p| p.is_rs).collect();
    let mut runs = 0;
    let mut inside = false;
    for rs in row {
        if !rs && !inside {
            runs += 1;
        }
        inside = !rs;
    }
    runs
}

/// Grids for the single-site two-scale diagram: 64 log-spaced inverse
/// temperatures in `[0.8, 8]` and 128 log-spaced masses in `[0.2, 20]`.
pub fn two_scale_grids() -> (Vec<f64>, Vec<f64>) {
    (log_space(0.8, 8.0, 64), log_space(0.2, 20.0, 128))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::PolyMixing;
    use crate::lattice::LatticeSpec;

    fn single(beta: f64, mu: f64) -> EuclideanParams {
        EuclideanParams::new(beta, mu, 0.0, Lattice::single_site(), ExpMixture::two_scale_example()).unwrap()
    }

    #[test]
    fn zero_temperature_larkin_closed_forms() {
        let lat = Lattice::single_site();
        let m = larkin_mass_zero_t(&ExpMixture::two_scale_example(), &lat).unwrap();
        assert!((m - 260f64.sqrt()).abs() < 1e-9);
        let single = ExpMixture::new([(1.0, 1.0)]).unwrap();
        assert!((larkin_mass_zero_t(&single, &lat).unwrap() - 2.0).abs() < 1e-10);
        assert!(larkin_mass_zero_t(&ExpMixture::zero(), &lat).is_err());
    }

    #[test]
    fn larkin_on_two_sites_matches_grid() {
        let lat = Lattice::new(LatticeSpec::new(2, 1, 1.0).unwrap()).unwrap();
        let b = ExpMixture::new([(1.0, 1.0)]).unwrap();
        let m = larkin_mass_zero_t(&b, &lat).unwrap();
        let h = |mu: f64| 2.0 * (mu.powi(-2) + (mu + 4.0).powi(-2)) - 1.0;
        let grid = (0..200_000).map(|i| 1.0 + 4.0 * i as f64 / 200_000.0);
        let oracle = grid.min_by(|a, b| h(*a).abs().total_cmp(&h(*b).abs())).unwrap();
        assert!((m - oracle).abs() < 1e-4);
        assert!(h(m).abs() < 1e-10);
    }

    #[test]
    fn large_mass_is_rs() {
        for beta in [0.5, 1.0, 10.0, 100.0] {
            assert!(rs_criterion(&single(beta, 17.0)).unwrap().is_rs, "beta {beta}");
        }
    }

    #[test]
    fn small_mass_low_temperature_is_rsb() {
        assert!(!rs_criterion(&single(64.0, 5.0)).unwrap().is_rs);
    }

    #[test]
    fn no_disorder_is_rs() {
        let lat = Lattice::new(LatticeSpec::new(4, 2, 1.0).unwrap()).unwrap();
        let p = EuclideanParams::new(3.0, 0.5, 0.0, lat, ExpMixture::zero()).unwrap();
        let pt = rs_criterion(&p).unwrap();
        assert!(pt.is_rs);
        assert!(pt.criterion_gap <= 1e-12);
    }

    #[test]
    fn larkin_is_largest_root() {
        let b = ExpMixture::two_scale_example();
        let lat = Lattice::single_site();
        let roots = larkin_roots(&b, &lat, 50.0).unwrap();
        assert!(!roots.is_empty());
        for &r in &roots {
            assert!(larkin_fn(&b, &lat, 50.0, r).abs() < 1e-8, "{r}: {}", larkin_fn(&b, &lat, 50.0, r));
        }
    }

    #[test]
    fn spherical_without_mixing_is_rs() {
        let p = SphericalParams::new(2.0, 0.0, Lattice::single_site(), PolyMixing::zero()).unwrap();
        let pt = spherical_rs_criterion(&p).unwrap();
        assert!(pt.is_rs);
        assert_eq!(pt.q_star, 0.0);
    }
}
