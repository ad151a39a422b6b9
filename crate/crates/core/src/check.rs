//! Self-test suite of analytic identities, run by the `check` command.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::correlation::ExpMixture;
use crate::error::Result;
use crate::functional::{
    annealed_free_energy, dirac_eval_euclidean, parisi_euclidean, parisi_euclidean_split, stationarity_euclidean,
    EuclideanParams,
};
use crate::lattice::{Lattice, LatticeSpec};
use crate::measure::StepMeasure;
use crate::numeric::log_space;
use crate::phase::{criterion_curvature, criterion_function, larkin_mass_zero_t, rs_criterion};
use crate::saddle::{rs_pair, solve_rs};
use crate::simulate::Model;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Largest observed error.
    pub error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn outcome(name: &str, error: Result<f64>, tolerance: f64) -> CheckOutcome {
    let error = error.unwrap_or(f64::INFINITY);
    CheckOutcome { name: name.into(), passed: error <= tolerance, error, tolerance }
}

fn lattices() -> Result<Vec<Lattice>> {
    Ok(vec![
        Lattice::single_site(),
        Lattice::new(LatticeSpec::new(2, 1, 1.0)?)?,
        Lattice::new(LatticeSpec::new(8, 2, 1.0)?)?,
    ])
}

/// `|K(R_1(μ)) - μ| / μ` over 50 log-spaced masses on three lattices.
pub fn k_round_trip() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for lat in lattices()? {
        for mu in log_space(1e-2, 1e2, 50) {
            let k = lat.k_inverse(lat.resolvent_moment(1, mu)?)?;
            worst = worst.max((k - mu).abs() / mu);
        }
    }
    Ok(worst)
}

/// Central differences of `Λ` against `K`, relative.
pub fn lambda_derivative() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for lat in lattices()? {
        for u in log_space(0.05, 5.0, 12) {
            let h = 1e-5 * u;
            let fd = (lat.lambda_value(u + h)? - lat.lambda_value(u - h)?) / (2.0 * h);
            let k = lat.k_inverse(u)?;
            worst = worst.max((fd - k).abs() / k.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Central differences of `K` against `-1/R_2(K)`, relative.
pub fn k_derivative() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for lat in lattices()? {
        for u in log_space(0.05, 5.0, 12) {
            let h = 1e-5 * u;
            let fd = (lat.k_inverse(u + h)? - lat.k_inverse(u - h)?) / (2.0 * h);
            let exact = lat.k_derivative(u)?;
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// `R_1 = 1/μ`, `R_2 = 1/μ²`, `K(u) = 1/u` and `Λ(u) = 1 + log u` on one site.
pub fn single_site_closed_forms() -> Result<f64> {
    let lat = Lattice::single_site();
    let mut worst: f64 = 0.0;
    for x in log_space(0.01, 100.0, 41) {
        let errs = [
            (lat.resolvent_moment(1, x)? - 1.0 / x) * x,
            (lat.resolvent_moment(2, x)? - 1.0 / (x * x)) * x * x,
            (lat.k_inverse(x)? - 1.0 / x) * x,
            lat.lambda_value(x)? - (1.0 + x.ln()),
        ];
        worst = errs.iter().fold(worst, |w, e| w.max(e.abs()));
    }
    Ok(worst)
}

fn sample_params() -> Result<Vec<EuclideanParams>> {
    let b = ExpMixture::two_scale_example();
    Ok(vec![
        EuclideanParams::new(1.3, 4.0, 0.0, Lattice::single_site(), b.clone())?,
        EuclideanParams::new(0.7, 2.5, 0.4, Lattice::new(LatticeSpec::new(2, 1, 1.0)?)?, b.clone())?,
        EuclideanParams::new(2.0, 9.0, 0.1, Lattice::new(LatticeSpec::new(8, 2, 0.5)?)?, b)?,
    ])
}

fn sample_measures(q: f64) -> Result<Vec<StepMeasure>> {
    Ok(vec![
        StepMeasure::dirac(q, 0.3 * q)?,
        StepMeasure::new(q, [(0.1 * q, 0.4), (0.5 * q, 0.6)])?,
        StepMeasure::new(q, [(0.0, 0.2), (0.35 * q, 0.3), (0.7 * q, 0.5)])?,
    ])
}

/// Spread of the functional over split points in `[q_*, q)`.
pub fn split_independence() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample_params()? {
        let q = 0.9 * p.r1() / p.beta + 0.05;
        for zeta in sample_measures(q)? {
            let base = parisi_euclidean(&p, q, &zeta)?;
            for t in [0.25, 0.5, 0.9] {
                let split = zeta.q_star() + t * (q - zeta.q_star());
                let v = parisi_euclidean_split(&p, q, &zeta, split)?;
                worst = worst.max((v - base).abs() / base.abs().max(1.0));
            }
        }
    }
    Ok(worst)
}

/// The functional on Dirac measures against the closed form.
pub fn dirac_oracle() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample_params()? {
        let q = 0.9 * p.r1() / p.beta + 0.05;
        for t in [0.0, 0.2, 0.6, 0.95] {
            let zeta = StepMeasure::dirac(q, t * q)?;
            let v = parisi_euclidean(&p, q, &zeta)?;
            let exact = dirac_eval_euclidean(&p, q, t * q)?;
            worst = worst.max((v - exact).abs() / exact.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Without disorder the free energy is the Gaussian integral over the spectrum.
pub fn gaussian_limit() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample_params()? {
        let p = EuclideanParams { disorder: ExpMixture::zero(), ..p };
        let f = solve_rs(&p)?.free_energy;
        let spectrum = p.lattice.spectrum();
        let sites = spectrum.total_multiplicity() as f64;
        let log_det: f64 = spectrum
            .entries()
            .iter()
            .map(|&(l, m)| m as f64 * (p.mu + p.lattice.coupling() * l).ln())
            .sum::<f64>()
            / sites;
        let exact = 0.5 * ((2.0 * PI / p.beta).ln() - log_det) + p.beta * p.h * p.h / (2.0 * p.mu);
        worst = worst.max((f - exact).abs());
    }
    Ok(worst)
}

/// Annealed minus quenched against `(β²/2) B(2R_1/β)` at replica-symmetric points.
pub fn jensen_gap() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample_params()? {
        for mu in [17.0, 25.0] {
            let p = p.with_mu(mu)?;
            if !rs_criterion(&p)?.is_rs {
                continue;
            }
            let gap = annealed_free_energy(&p) - solve_rs(&p)?.free_energy;
            let exact = 0.5 * p.beta * p.beta * p.disorder.value(2.0 * p.r1() / p.beta);
            worst = worst.max((gap - exact).abs());
        }
    }
    Ok(worst)
}

/// `F(q_L) = 0` at the replica-symmetric pair.
pub fn rs_stationarity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample_params()? {
        let (q_l, q_c) = rs_pair(&p);
        let st = stationarity_euclidean(&p, q_c, &StepMeasure::dirac(q_c, q_l)?)?;
        worst = worst.max(st.f_prime(q_l)?.abs());
    }
    Ok(worst)
}

/// One site with `B = e^{-x} + e^{-8x}`: the zero-temperature Larkin mass is `√260`.
pub fn larkin_single_site() -> Result<f64> {
    let m = larkin_mass_zero_t(&ExpMixture::two_scale_example(), &Lattice::single_site())?;
    Ok((m - 260f64.sqrt()).abs())
}

/// Five-point second difference of `g_β` at `R_1` against `4B''(2R_1/β) - 1/R_2`, relative.
pub fn criterion_curvature_identity() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in sample_params()? {
        let r1 = p.r1();
        let h = 2e-3 * r1;
        let g = |s: f64| criterion_function(&p, s);
        let fd = (-g(r1 + 2.0 * h)? + 16.0 * g(r1 + h)? - 30.0 * g(r1)? + 16.0 * g(r1 - h)? - g(r1 - 2.0 * h)?)
            / (12.0 * h * h);
        let exact = criterion_curvature(&p);
        worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
    }
    Ok(worst)
}

/// The external field is absorbed by a constant shift of the configuration.
pub fn field_shift() -> Result<f64> {
    let lat = Lattice::new(LatticeSpec::new(3, 2, 0.7)?)?;
    let p = EuclideanParams::new(1.0, 1.5, 0.8, lat, ExpMixture::zero())?;
    let m = Model::new(p, 6, 1, 1)?;
    let u: Vec<f64> = (0..m.sites() * m.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
    let shifted: Vec<f64> = u.iter().zip(m.shift_vector()).map(|(a, c)| a + c).collect();
    let lhs = m.quadratic_energy(&u) + m.field_energy(&u);
    let rhs = m.quadratic_energy(&shifted) - m.shift_constant();
    Ok((lhs - rhs).abs() / lhs.abs().max(1.0))
}

pub fn run_all() -> CheckReport {
    let checks = vec![
        outcome("k_round_trip", k_round_trip(), 1e-10),
        outcome("lambda_derivative", lambda_derivative(), 1e-5),
        outcome("k_derivative", k_derivative(), 1e-5),
        outcome("single_site_closed_forms", single_site_closed_forms(), 1e-12),
        outcome("split_independence", split_independence(), 1e-12),
        outcome("dirac_oracle", dirac_oracle(), 1e-12),
        outcome("gaussian_limit", gaussian_limit(), 1e-10),
        outcome("jensen_gap", jensen_gap(), 1e-8),
        outcome("rs_stationarity", rs_stationarity(), 1e-8),
        outcome("larkin_single_site", larkin_single_site(), 1e-6),
        outcome("criterion_curvature", criterion_curvature_identity(), 1e-6),
        outcome("field_shift", field_shift(), 1e-12),
    ];
    CheckReport { checks }
}
