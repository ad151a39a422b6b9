//! Saddle-point solvers: the replica-symmetric closed form, the convex inner
//! minimization over step measures, the concave outer maximization over `q`,
//! the spherical minimizer and the map to observables.
//!
//! The inner solver works on a `k`-atom measure `Σ m_i δ_{s_i}`. Writing `c`
//! for `β²/2`, the reduced objective has the exact gradient
//! `∂/∂s_i = -c m_i F(s_i)` and `∂/∂m_i = -c (f(s_i) - f(s_k))` (with
//! `m_k = 1 - Σ_{i<k} m_i`), so atoms are polished by a damped Newton method
//! with a finite-difference Hessian of that gradient. Optimality over all
//! measures is then certified by the support condition `f(s_i) = sup f`; when
//! it fails, an atom is inserted at the argmax of `f` with an exact line
//! search, which is a Frank-Wolfe step for the convex problem.
//!
//! The outer problem uses the envelope identity
//! `ψ'(q) = (β/2)(K(β δ_q(0)) - μ)`, where `δ_q` belongs to the inner
//! minimizer at `q`. Concavity makes `β δ_q(0) - R_1(μ)` increasing in `q`,
//! and its root is the maximizer.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::functional::{
    dirac_eval_euclidean, dirac_eval_spherical, parisi_euclidean, parisi_spherical, stationarity_euclidean,
    stationarity_spherical, EuclideanParams, SphericalParams, Stationarity,
};
use crate::measure::StepMeasure;
use crate::numeric::{golden_max, golden_min};

/// Tolerances and budgets of the saddle solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Maximum number of atoms of the step measure.
    pub k_budget: usize,
    /// Tolerance on functional values and on the outer constraint.
    pub tol: f64,
    /// Tolerance on the support condition `sup f - min_{supp ζ} f`.
    pub tol_f: f64,
    /// Grid size used to locate `sup f`.
    pub grid: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { k_budget: 8, tol: 1e-10, tol_f: 1e-8, grid: 512 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.k_budget >= 1, Config, "k_budget must be at least 1");
        ensure!(self.tol.is_finite() && self.tol > 0.0, Config, "tol must be positive");
        ensure!(self.tol_f.is_finite() && self.tol_f > 0.0, Config, "tol_f must be positive");
        ensure!(self.grid >= 8, Config, "grid must have at least 8 points");
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Rs,
    Rsb { atoms: usize },
}

impl Phase {
    fn of(zeta: &StepMeasure) -> Self {
        match zeta.len() {
            1 => Phase::Rs,
            k => Phase::Rsb { atoms: k },
        }
    }

    pub fn is_rs(&self) -> bool {
        matches!(self, Phase::Rs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Residuals {
    /// `|β δ(0) - R_1(μ)|`; zero for the spherical problem, which has no constraint.
    pub constraint_residual: f64,
    /// `sup f - min_{supp ζ} f`.
    pub stationarity_gap: f64,
}

/// A saddle pair together with its value and certificates.
///
/// For the spherical problem `q_c = 1` and `zeta_c` lives on `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SaddleRepr", into = "SaddleRepr")]
pub struct SaddleResult {
    pub q_c: f64,
    pub zeta_c: StepMeasure,
    pub free_energy: f64,
    pub phase: Phase,
    pub residuals: Residuals,
    pub converged: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SaddleRepr {
    q_c: f64,
    free_energy: f64,
    phase: String,
    atoms: Vec<[f64; 2]>,
    residuals: Residuals,
    converged: bool,
}

impl From<SaddleResult> for SaddleRepr {
    fn from(r: SaddleResult) -> Self {
        SaddleRepr {
            q_c: r.q_c,
            free_energy: r.free_energy,
            phase: if r.phase.is_rs() { "RS" } else { "RSB" }.to_string(),
            atoms: r.zeta_c.atoms().iter().map(|a| [a.location, a.mass]).collect(),
            residuals: r.residuals,
            converged: r.converged,
        }
    }
}

impl TryFrom<SaddleRepr> for SaddleResult {
    type Error = Error;

    fn try_from(r: SaddleRepr) -> Result<Self> {
        let zeta_c = StepMeasure::new(r.q_c, r.atoms.iter().map(|[s, m]| (*s, *m)))?;
        let phase = Phase::of(&zeta_c);
        let expected = if phase.is_rs() { "RS" } else { "RSB" };
        ensure!(r.phase == expected, Domain, "phase tag {:?} does not match {} atoms", r.phase, zeta_c.len());
        Ok(SaddleResult {
            q_c: r.q_c,
            zeta_c,
            free_energy: r.free_energy,
            phase,
            residuals: r.residuals,
            converged: r.converged,
        })
    }
}

/// The minimizer of the functional at one carrier.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub zeta: StepMeasure,
    pub value: f64,
    pub stationarity_gap: f64,
    pub converged: bool,
}

trait Objective {
    fn carrier(&self) -> f64;
    fn weight(&self) -> f64;
    fn value(&self, zeta: &StepMeasure) -> Result<f64>;
    fn dirac(&self, s: f64) -> Result<f64>;
    fn stationarity(&self, zeta: &StepMeasure) -> Result<Stationarity>;
}

struct EuclideanInner<'a> {
    p: &'a EuclideanParams,
    q: f64,
}

impl Objective for EuclideanInner<'_> {
    fn carrier(&self) -> f64 {
        self.q
    }
    fn weight(&self) -> f64 {
        0.5 * self.p.beta * self.p.beta
    }
    fn value(&self, zeta: &StepMeasure) -> Result<f64> {
        parisi_euclidean(self.p, self.q, zeta)
    }
    fn dirac(&self, s: f64) -> Result<f64> {
        dirac_eval_euclidean(self.p, self.q, s)
    }
    fn stationarity(&self, zeta: &StepMeasure) -> Result<Stationarity> {
        stationarity_euclidean(self.p, self.q, zeta)
    }
}

struct SphericalInner<'a> {
    p: &'a SphericalParams,
}

impl Objective for SphericalInner<'_> {
    fn carrier(&self) -> f64 {
        1.0
    }
    fn weight(&self) -> f64 {
        0.5 * self.p.beta * self.p.beta
    }
    fn value(&self, zeta: &StepMeasure) -> Result<f64> {
        parisi_spherical(self.p, zeta)
    }
    fn dirac(&self, s: f64) -> Result<f64> {
        dirac_eval_spherical(self.p, s)
    }
    fn stationarity(&self, zeta: &StepMeasure) -> Result<Stationarity> {
        stationarity_spherical(self.p, zeta)
    }
}

type Atoms = Vec<(f64, f64)>;

fn to_measure(q: f64, atoms: &Atoms) -> Result<StepMeasure> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    StepMeasure::new(q, atoms.iter().map(|&(s, m)| (s, m / total)))
}

fn from_measure(zeta: &StepMeasure) -> Atoms {
    zeta.atoms().iter().map(|a| (a.location, a.mass)).collect()
}

// Closest two atoms may get before they are merged, relative to q.
const MERGE: f64 = 1e-9;
const MIN_MASS: f64 = 1e-13;

fn tidy(atoms: &mut Atoms, q: f64) {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Atoms = Vec::with_capacity(atoms.len());
    for &(s, m) in atoms.iter() {
        if m < MIN_MASS {
            continue;
        }
        match out.last_mut() {
            Some(last) if s - last.0 < MERGE * q => {
                let total = last.1 + m;
                last.0 = (last.0 * last.1 + s * m) / total;
                last.1 = total;
            }
            _ => out.push((s.max(0.0), m)),
        }
    }
    if out.is_empty() {
        // Every mass vanished numerically; keep the heaviest atom.
        let best = atoms.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
        out.push((best.0.max(0.0), 1.0));
    }
    let total: f64 = out.iter().map(|a| a.1).sum();
    for a in &mut out {
        a.1 /= total;
    }
    *atoms = out;
}

// Variables are the free locations followed by all masses but the last.
struct Layout {
    k: usize,
    pinned: bool,
}

impl Layout {
    fn first_s(&self) -> usize {
        usize::from(self.pinned)
    }
    fn n_s(&self) -> usize {
        self.k - self.first_s()
    }
    fn dim(&self) -> usize {
        self.n_s() + self.k - 1
    }

    fn pack(&self, atoms: &Atoms) -> DVector<f64> {
        let mut y = DVector::zeros(self.dim());
        for i in self.first_s()..self.k {
            y[i - self.first_s()] = atoms[i].0;
        }
        for i in 0..self.k - 1 {
            y[self.n_s() + i] = atoms[i].1;
        }
        y
    }

    fn unpack(&self, y: &DVector<f64>, base: &Atoms) -> Atoms {
        let mut atoms = base.clone();
        for i in self.first_s()..self.k {
            atoms[i].0 = y[i - self.first_s()];
        }
        let mut used = 0.0;
        for i in 0..self.k - 1 {
            atoms[i].1 = y[self.n_s() + i];
            used += atoms[i].1;
        }
        atoms[self.k - 1].1 = 1.0 - used;
        atoms
    }
}

fn gradient<O: Objective>(obj: &O, layout: &Layout, atoms: &Atoms) -> Result<DVector<f64>> {
    let st = obj.stationarity(&raw_measure(obj.carrier(), atoms)?)?;
    let c = obj.weight();
    let mut big = Vec::with_capacity(atoms.len());
    let mut small = Vec::with_capacity(atoms.len());
    for &(s, _) in atoms {
        let (fp, f) = st.both(s)?;
        big.push(fp);
        small.push(f);
    }
    let mut g = DVector::zeros(layout.dim());
    for i in layout.first_s()..layout.k {
        g[i - layout.first_s()] = -c * atoms[i].1 * big[i];
    }
    let last = small[layout.k - 1];
    for i in 0..layout.k - 1 {
        g[layout.n_s() + i] = -c * (small[i] - last);
    }
    Ok(g)
}

// Builds the measure without merging, so that finite-difference probes of
// nearby atoms stay distinct.
fn raw_measure(q: f64, atoms: &Atoms) -> Result<StepMeasure> {
    ensure!(
        atoms.iter().all(|a| a.1 > 0.0 && a.0 >= 0.0 && a.0 < q)
            && atoms.windows(2).all(|w| w[0].0 < w[1].0),
        Numerical,
        "inner iterate left the feasible set"
    );
    to_measure(q, atoms)
}

fn objective_value<O: Objective>(obj: &O, atoms: &Atoms) -> Result<f64> {
    obj.value(&raw_measure(obj.carrier(), atoms)?)
}

fn hessian<O: Objective>(obj: &O, layout: &Layout, atoms: &Atoms) -> Result<DMatrix<f64>> {
    let q = obj.carrier();
    let n = layout.dim();
    let y = layout.pack(atoms);
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        let step = if j < layout.n_s() {
            let i = j + layout.first_s();
            let lo = if i == 0 { atoms[0].0 } else { atoms[i].0 - atoms[i - 1].0 };
            let lo = if i == 0 && lo == 0.0 { f64::INFINITY } else { lo };
            let hi = if i + 1 < layout.k { atoms[i + 1].0 - atoms[i].0 } else { q - atoms[i].0 };
            (1e-6 * q).min(0.25 * lo).min(0.25 * hi)
        } else {
            let i = j - layout.n_s();
            1e-6f64.min(0.25 * atoms[i].1).min(0.25 * atoms[layout.k - 1].1)
        };
        let mut yp = y.clone();
        let mut ym = y.clone();
        yp[j] += step;
        ym[j] -= step;
        // A location pinned against zero is differenced one-sidedly.
        let one_sided = j < layout.n_s() && j + layout.first_s() == 0 && atoms[0].0 - step < 0.0;
        let gp = gradient(obj, layout, &layout.unpack(&yp, atoms))?;
        let col = if one_sided {
            let g0 = gradient(obj, layout, atoms)?;
            (gp - g0) / step
        } else {
            let gm = gradient(obj, layout, &layout.unpack(&ym, atoms))?;
            (gp - gm) / (2.0 * step)
        };
        h.set_column(j, &col);
    }
    Ok((&h + h.transpose()) * 0.5)
}

fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let scale = h.diagonal().iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
    let mut tau = 0.0;
    for _ in 0..40 {
        let shifted = h + DMatrix::identity(h.nrows(), h.ncols()) * tau;
        if let Some(ch) = shifted.cholesky() {
            return -ch.solve(g);
        }
        tau = if tau == 0.0 { 1e-10 * scale } else { tau * 10.0 };
    }
    -g / scale
}

// Largest step along d that keeps the iterate feasible, and whether taking it
// exactly should snap a constraint (mass to zero, location to zero, or two
// locations together).
fn max_step(layout: &Layout, atoms: &Atoms, d: &DVector<f64>, q: f64) -> (f64, Option<Snap>) {
    let mut best = (1.0, None);
    let mut consider = |alpha: f64, snap: Option<Snap>| {
        if alpha >= 0.0 && alpha < best.0 {
            best = (alpha, snap);
        }
    };
    let ds = |i: usize| -> f64 {
        if i < layout.first_s() {
            0.0
        } else {
            d[i - layout.first_s()]
        }
    };
    for i in 0..layout.k {
        let v = ds(i);
        if i == 0 && v < 0.0 {
            consider(-atoms[0].0 / v, Some(Snap::Zero));
        }
        if i + 1 < layout.k {
            let rel = ds(i + 1) - v;
            if rel < 0.0 {
                consider(-(atoms[i + 1].0 - atoms[i].0) / rel, Some(Snap::Merge(i)));
            }
        } else if v > 0.0 {
            consider(0.5 * (q - atoms[i].0) / v, None);
        }
    }
    let mut last = 0.0;
    for i in 0..layout.k - 1 {
        let v = d[layout.n_s() + i];
        last -= v;
        if v < 0.0 {
            consider(-atoms[i].1 / v, Some(Snap::Drop(i)));
        }
    }
    if last < 0.0 {
        consider(-atoms[layout.k - 1].1 / last, Some(Snap::Drop(layout.k - 1)));
    }
    best
}

#[derive(Debug, Clone, Copy)]
enum Snap {
    Zero,
    Merge(usize),
    Drop(usize),
}

fn apply_snap(atoms: &mut Atoms, snap: Snap) {
    match snap {
        Snap::Zero => atoms[0].0 = 0.0,
        Snap::Merge(i) => {
            let (a, b) = (atoms[i], atoms[i + 1]);
            let m = a.1 + b.1;
            atoms[i] = ((a.0 * a.1 + b.0 * b.1) / m, m);
            atoms.remove(i + 1);
        }
        Snap::Drop(i) => {
            atoms.remove(i);
        }
    }
}

fn clamp_feasible(atoms: &mut Atoms) {
    for a in atoms.iter_mut() {
        a.0 = a.0.max(0.0);
        a.1 = a.1.max(0.0);
    }
}

/// Damped Newton on locations and masses at a fixed number of atoms.
fn polish<O: Objective>(obj: &O, atoms: &mut Atoms) -> Result<f64> {
    let q = obj.carrier();
    tidy(atoms, q);
    let mut value = objective_value(obj, atoms)?;
    for _ in 0..200 {
        let st = obj.stationarity(&raw_measure(q, atoms)?)?;
        let pinned = atoms[0].0 == 0.0 && st.f_prime(0.0)? <= 0.0;
        let layout = Layout { k: atoms.len(), pinned };
        if layout.dim() == 0 {
            break;
        }
        let g = gradient(obj, &layout, atoms)?;
        let h = hessian(obj, &layout, atoms)?;
        let d = newton_direction(&h, &g);
        let slope = g.dot(&d);
        let small_step = (0..layout.dim()).all(|j| {
            let size = if j < layout.n_s() { q } else { 1.0 };
            d[j].abs() <= 1e-14 * size
        });
        if small_step || slope >= 0.0 || -slope < 1e-28 {
            break;
        }
        let (alpha_max, snap) = max_step(&layout, atoms, &d, q);
        let y = layout.pack(atoms);
        let mut accepted = false;
        let mut alpha = alpha_max;
        for attempt in 0..60 {
            let mut trial = layout.unpack(&(&y + &d * alpha), atoms);
            clamp_feasible(&mut trial);
            if attempt == 0 {
                if let Some(sn) = snap {
                    apply_snap(&mut trial, sn);
                }
            }
            tidy(&mut trial, q);
            if let Ok(v) = objective_value(obj, &trial) {
                if v <= value + 1e-4 * alpha * slope || (attempt == 0 && snap.is_some() && v <= value) {
                    *atoms = trial;
                    value = v;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(value)
}

/// `(argmax, max)` of `f` over `[0, q)`: grid scan plus golden-section
/// refinement of the best local maxima.
fn sup_f(st: &Stationarity, q: f64, grid: usize, atoms: &Atoms) -> Result<(f64, f64)> {
    let mut failure: Option<Error> = None;
    let mut eval = |s: f64| -> f64 {
        match st.f(s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        }
    };
    let xs: Vec<f64> = (0..grid).map(|j| q * j as f64 / grid as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&s| eval(s)).collect();
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&j| (j == 0 || ys[j] >= ys[j - 1]) && (j + 1 == grid || ys[j] >= ys[j + 1]))
        .collect();
    peaks.sort_by(|&a, &b| ys[b].total_cmp(&ys[a]));
    let mut best = (0.0, eval(0.0));
    for &j in peaks.iter().take(3) {
        let lo = if j == 0 { 0.0 } else { xs[j - 1] };
        let hi = if j + 1 == grid { 0.5 * (xs[j] + q) } else { xs[j + 1] };
        let cand = golden_max(&mut eval, lo, hi, 1e-13 * q);
        if cand.1 > best.1 {
            best = cand;
        }
    }
    for &(s, _) in atoms {
        let v = eval(s);
        if v > best.1 {
            best = (s, v);
        }
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

fn best_dirac<O: Objective>(obj: &O, grid: usize) -> Result<f64> {
    let q = obj.carrier();
    let mut failure: Option<Error> = None;
    let mut eval = |s: f64| -> f64 {
        match obj.dirac(s) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        }
    };
    let xs: Vec<f64> = (0..grid).map(|j| q * j as f64 / grid as f64).collect();
    let (j, _) = xs
        .iter()
        .map(|&s| eval(s))
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc });
    let lo = if j == 0 { 0.0 } else { xs[j - 1] };
    let hi = if j + 1 == grid { 0.5 * (xs[j] + q) } else { xs[j + 1] };
    let (s, v) = golden_min(&mut eval, lo, hi, 1e-13 * q);
    let at_zero = eval(0.0);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(if at_zero <= v { 0.0 } else { s })
}

fn minimize<O: Objective>(obj: &O, init: Option<&StepMeasure>, opts: &SolverOptions) -> Result<InnerSolution> {
    opts.validate()?;
    let q = obj.carrier();
    let mut atoms = match init {
        Some(z) => {
            ensure!(
                (z.q_max() - q).abs() <= 1e-12 * q,
                Domain,
                "initial measure lives on [0, {}) instead of [0, {q})",
                z.q_max()
            );
            from_measure(z)
        }
        None => vec![(best_dirac(obj, opts.grid)?, 1.0)],
    };
    let mut value = polish(obj, &mut atoms)?;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    for _ in 0..(3 * opts.k_budget + 5) {
        let st = obj.stationarity(&raw_measure(q, &atoms)?)?;
        let (s_star, f_star) = sup_f(&st, q, opts.grid, &atoms)?;
        let mut worst = f64::INFINITY;
        for &(s, _) in &atoms {
            worst = worst.min(st.f(s)?);
        }
        gap = f_star - worst;
        // Frank-Wolfe step towards δ_{s*}.
        let current = raw_measure(q, &atoms)?;
        let target = StepMeasure::dirac(q, s_star)?;
        let (lambda, mixed) = golden_min(
            |l| {
                StepMeasure::mix(l, &target, &current)
                    .and_then(|z| obj.value(&z))
                    .unwrap_or(f64::INFINITY)
            },
            0.0,
            1.0,
            1e-12,
        );
        let gain = value - mixed;
        if gap <= opts.tol_f && gain < opts.tol {
            converged = true;
            break;
        }
        if gain <= 0.0 || lambda <= 0.0 {
            break;
        }
        let mut next = from_measure(&StepMeasure::mix(lambda, &target, &current)?);
        if next.len() > opts.k_budget {
            break;
        }
        let v = polish(obj, &mut next)?;
        if v > value {
            break;
        }
        atoms = next;
        value = v;
    }
    let zeta = to_measure(q, &atoms)?;
    Ok(InnerSolution { zeta, value, stationarity_gap: gap.max(0.0), converged })
}

/// Minimizes `ζ ↦ P_{β,q}(ζ)` starting from the best Dirac mass.
pub fn inner_minimize(p: &EuclideanParams, q: f64, opts: &SolverOptions) -> Result<InnerSolution> {
    ensure!(q.is_finite() && q > 0.0, Domain, "q must be positive, got {q}");
    minimize(&EuclideanInner { p, q }, None, opts)
}

/// Minimizes `ζ ↦ P_{β,q}(ζ)` starting from `init`, which must live on `[0, q)`.
pub fn inner_minimize_from(
    p: &EuclideanParams,
    q: f64,
    init: &StepMeasure,
    opts: &SolverOptions,
) -> Result<InnerSolution> {
    ensure!(q.is_finite() && q > 0.0, Domain, "q must be positive, got {q}");
    minimize(&EuclideanInner { p, q }, Some(init), opts)
}

/// `ψ(q) = min_ζ P_{β,q}(ζ)`.
pub fn psi(p: &EuclideanParams, q: f64, opts: &SolverOptions) -> Result<f64> {
    Ok(inner_minimize(p, q, opts)?.value)
}

/// `(q_L, q_c)` of the replica-symmetric solution.
pub fn rs_pair(p: &EuclideanParams) -> (f64, f64) {
    let r1 = p.r1();
    let q_l = -2.0 * p.disorder.d1(2.0 * r1 / p.beta) * p.r2();
    (q_l, q_l + r1 / p.beta)
}

fn stationarity_gap<O: Objective>(obj: &O, zeta: &StepMeasure, grid: usize) -> Result<f64> {
    let st = obj.stationarity(zeta)?;
    let atoms = from_measure(zeta);
    let (_, sup) = sup_f(&st, obj.carrier(), grid, &atoms)?;
    let mut worst = f64::INFINITY;
    for &(s, _) in &atoms {
        worst = worst.min(st.f(s)?);
    }
    Ok((sup - worst).max(0.0))
}

/// The replica-symmetric saddle in closed form.
///
/// Residuals are computed, but whether the point is actually replica
/// symmetric is left to the phase criterion.
pub fn solve_rs(p: &EuclideanParams) -> Result<SaddleResult> {
    let opts = SolverOptions::default();
    let (q_l, q_c) = rs_pair(p);
    let zeta_c = StepMeasure::dirac(q_c, q_l)?;
    let free_energy = dirac_eval_euclidean(p, q_c, q_l)?;
    let constraint_residual = (p.beta * zeta_c.delta(0.0) - p.r1()).abs();
    let gap = stationarity_gap(&EuclideanInner { p, q: q_c }, &zeta_c, opts.grid)?;
    Ok(SaddleResult {
        q_c,
        zeta_c,
        free_energy,
        phase: Phase::Rs,
        residuals: Residuals { constraint_residual, stationarity_gap: gap },
        converged: constraint_residual <= opts.tol && gap <= opts.tol_f,
    })
}

/// Full saddle point: maximizes `ψ(q)` over `q > 0`.
///
/// The bracket is grown geometrically from the replica-symmetric `q_c`, and
/// the root of `β δ_q(0) - R_1(μ)` is located by the Illinois variant of
/// regula falsi, warm-starting each inner solve from its nearest neighbour.
pub fn outer_maximize(p: &EuclideanParams, opts: &SolverOptions) -> Result<SaddleResult> {
    opts.validate()?;
    let r1 = p.r1();
    let (_, q0) = rs_pair(p);
    let mut memo: Vec<(f64, InnerSolution)> = Vec::new();
    let eval = |q: f64, memo: &mut Vec<(f64, InnerSolution)>| -> Result<f64> {
        let warm = memo
            .iter()
            .min_by(|a, b| (a.0 - q).abs().total_cmp(&(b.0 - q).abs()))
            .map(|(q_old, sol)| sol.zeta.push_scale(q / q_old))
            .transpose()?;
        let sol = match warm {
            Some(init) => inner_minimize_from(p, q, &init, opts)?,
            None => inner_minimize(p, q, opts)?,
        };
        let c = p.beta * sol.zeta.delta(0.0) - r1;
        memo.push((q, sol));
        Ok(c)
    };
    let c0 = eval(q0, &mut memo)?;
    let (mut lo, mut hi, mut c_lo, mut c_hi) = (q0, q0, c0, c0);
    let mut expansions = 0;
    while c_lo > 0.0 || c_hi < 0.0 {
        ensure!(
            expansions < 34,
            Numerical,
            "could not bracket the outer maximum within 10 decades of q = {q0}"
        );
        expansions += 1;
        if c_hi < 0.0 {
            lo = hi;
            c_lo = c_hi;
            hi *= 2.0;
            c_hi = eval(hi, &mut memo)?;
        } else {
            hi = lo;
            c_hi = c_lo;
            lo *= 0.5;
            c_lo = eval(lo, &mut memo)?;
        }
    }
    let target = 0.01 * opts.tol;
    let mut q_best = if c_lo.abs() < c_hi.abs() { lo } else { hi };
    let mut c_best = c_lo.abs().min(c_hi.abs());
    let mut side = 0i8;
    for _ in 0..200 {
        if c_best <= target || hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mut q = (lo * c_hi - hi * c_lo) / (c_hi - c_lo);
        if !(q > lo && q < hi) {
            q = 0.5 * (lo + hi);
        }
        let c = eval(q, &mut memo)?;
        if c.abs() < c_best {
            c_best = c.abs();
            q_best = q;
        }
        if c == 0.0 {
            break;
        }
        if c < 0.0 {
            lo = q;
            c_lo = c;
            if side == -1 {
                c_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = q;
            c_hi = c;
            if side == 1 {
                c_lo *= 0.5;
            }
            side = 1;
        }
    }
    let (q_c, sol) = memo
        .into_iter()
        .find(|(q, _)| *q == q_best)
        .ok_or_else(|| Error::Invariant("outer iterate lost".into()))?;
    let constraint_residual = (p.beta * sol.zeta.delta(0.0) - r1).abs();
    Ok(SaddleResult {
        q_c,
        phase: Phase::of(&sol.zeta),
        free_energy: sol.value,
        residuals: Residuals { constraint_residual, stationarity_gap: sol.stationarity_gap },
        converged: sol.converged && constraint_residual <= opts.tol,
        zeta_c: sol.zeta,
    })
}

/// Minimizes the spherical functional over step measures on `[0, 1)`.
pub fn solve_spherical(p: &SphericalParams, opts: &SolverOptions) -> Result<SaddleResult> {
    spherical_result(minimize(&SphericalInner { p }, None, opts)?)
}

/// As [`solve_spherical`], starting from `init`.
pub fn solve_spherical_from(p: &SphericalParams, init: &StepMeasure, opts: &SolverOptions) -> Result<SaddleResult> {
    spherical_result(minimize(&SphericalInner { p }, Some(init), opts)?)
}

fn spherical_result(sol: InnerSolution) -> Result<SaddleResult> {
    Ok(SaddleResult {
        q_c: 1.0,
        phase: Phase::of(&sol.zeta),
        free_energy: sol.value,
        residuals: Residuals { constraint_residual: 0.0, stationarity_gap: sol.stationarity_gap },
        converged: sol.converged,
        zeta_c: sol.zeta,
    })
}

/// Squared radius `q_c + h²/μ²` and the overlap law, which is `ζ_c` shifted by `h²/μ²`.
pub fn observables(res: &SaddleResult, p: &EuclideanParams) -> Result<(f64, StepMeasure)> {
    let shift = p.h * p.h / (p.mu * p.mu);
    Ok((res.q_c + shift, res.zeta_c.translate(shift)?))
}
