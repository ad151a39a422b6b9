//! Finite-atom probability measures on `[0, q)` and the exact segment
//! integrals the functionals are built from.
//!
//! For a step measure `ζ` the function `δ(s) = ∫_s^q ζ([0, u]) du` is
//! piecewise linear, with slope `-ζ([0, u])` between consecutive atoms. On a
//! piece where the CDF equals `x > 0` the substitution `w = β δ(u)` turns
//! `∫ K(β δ(u)) du` into `(Λ(w_lo) - Λ(w_hi)) / (β x)`, which is how every
//! integral of `K` or `K'` below is evaluated. Pieces that are short compared
//! to the scale of `w` use a 10-point Gauss-Legendre rule instead, which
//! avoids the cancellation in the closed form.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::lattice::Lattice;
use crate::numeric::gauss_legendre;

/// Atoms closer than this fraction of `q_max` are merged.
pub const MERGE_TOLERANCE: f64 = 1e-10;

// Below this relative change of β δ across a piece, quadrature replaces the
// closed-form antiderivative.
const THIN_PIECE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// A probability measure with finitely many atoms in `[0, q_max)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct StepMeasure {
    q_max: f64,
    atoms: Vec<Atom>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureRepr {
    q_max: f64,
    atoms: Vec<[f64; 2]>,
}

impl TryFrom<MeasureRepr> for StepMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        StepMeasure::new(r.q_max, r.atoms.into_iter().map(|[s, m]| (s, m)))
    }
}

impl From<StepMeasure> for MeasureRepr {
    fn from(m: StepMeasure) -> Self {
        MeasureRepr {
            q_max: m.q_max,
            atoms: m.atoms.iter().map(|a| [a.location, a.mass]).collect(),
        }
    }
}

/// A maximal interval on which the CDF is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub cdf: f64,
    pub delta_lo: f64,
    pub delta_hi: f64,
}

impl StepMeasure {
    /// Builds a measure from `(location, mass)` pairs.
    ///
    /// Zero masses are dropped, atoms within [`MERGE_TOLERANCE`]` · q_max` are
    /// merged and the total mass (which must be 1 to within `1e-9`) is
    /// renormalized exactly.
    pub fn new(q_max: f64, atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        ensure!(q_max.is_finite() && q_max > 0.0, Domain, "carrier endpoint must be positive, got {q_max}");
        let mut raw: Vec<Atom> = Vec::new();
        for (location, mass) in atoms {
            ensure!(
                location.is_finite() && (0.0..q_max).contains(&location),
                Domain,
                "atom location {location} outside [0, {q_max})"
            );
            ensure!(mass.is_finite() && mass >= 0.0, Domain, "atom mass {mass} is negative");
            if mass > 0.0 {
                raw.push(Atom { location, mass });
            }
        }
        ensure!(!raw.is_empty(), Domain, "measure has no atoms");
        raw.sort_by(|a, b| a.location.total_cmp(&b.location));
        let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
        for a in raw {
            match merged.last_mut() {
                Some(last) if a.location - last.location < MERGE_TOLERANCE * q_max => {
                    let m = last.mass + a.mass;
                    last.location = (last.location * last.mass + a.location * a.mass) / m;
                    last.mass = m;
                }
                _ => merged.push(a),
            }
        }
        let total: f64 = merged.iter().map(|a| a.mass).sum();
        ensure!((total - 1.0).abs() <= 1e-9, Domain, "masses sum to {total}, not 1");
        for a in &mut merged {
            a.mass /= total;
        }
        Ok(Self { q_max, atoms: merged })
    }

    pub fn dirac(q_max: f64, location: f64) -> Result<Self> {
        Self::new(q_max, [(location, 1.0)])
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest atom location; the split point used by the functionals.
    pub fn q_star(&self) -> f64 {
        self.atoms.last().map_or(0.0, |a| a.location)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.location * a.mass).sum()
    }

    /// `ζ([0, s])`.
    pub fn cdf(&self, s: f64) -> f64 {
        let c: f64 = self.atoms.iter().take_while(|a| a.location <= s).map(|a| a.mass).sum();
        if self.atoms.last().is_some_and(|a| a.location <= s) {
            1.0
        } else {
            c
        }
    }

    /// `δ(s) = ∫_s^{q_max} ζ([0, u]) du = Σ_i m_i (q_max - max(s, s_i))`.
    pub fn delta(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.q_max);
        self.atoms
            .iter()
            .map(|a| a.mass * (self.q_max - s.max(a.location)))
            .sum()
    }

    /// Same masses, locations and carrier multiplied by `factor`.
    pub fn push_scale(&self, factor: f64) -> Result<Self> {
        ensure!(factor.is_finite() && factor > 0.0, Domain, "scale factor must be positive");
        Ok(Self {
            q_max: self.q_max * factor,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { location: a.location * factor, mass: a.mass })
                .collect(),
        })
    }

    /// Locations and carrier shifted by `offset ≥ 0`.
    pub fn translate(&self, offset: f64) -> Result<Self> {
        ensure!(offset.is_finite() && offset >= 0.0, Domain, "shift must be non-negative");
        Ok(Self {
            q_max: self.q_max + offset,
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom { location: a.location + offset, mass: a.mass })
                .collect(),
        })
    }

    /// `λ a + (1 - λ) b` for measures on the same carrier.
    pub fn mix(lambda: f64, a: &StepMeasure, b: &StepMeasure) -> Result<Self> {
        ensure!((0.0..=1.0).contains(&lambda), Domain, "mixing weight {lambda} outside [0, 1]");
        ensure!(
            (a.q_max - b.q_max).abs() <= 1e-12 * a.q_max,
            Domain,
            "measures live on different carriers"
        );
        let atoms = a
            .atoms
            .iter()
            .map(|x| (x.location, lambda * x.mass))
            .chain(b.atoms.iter().map(|x| (x.location, (1.0 - lambda) * x.mass)));
        Self::new(a.q_max, atoms)
    }

    /// Constant-CDF pieces covering `[0, q_max]`.
    pub(crate) fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.atoms.len() + 1);
        let mut lo = 0.0;
        let mut cdf = 0.0;
        for a in &self.atoms {
            if a.location > lo {
                out.push(Segment {
                    lo,
                    hi: a.location,
                    cdf,
                    delta_lo: self.delta(lo),
                    delta_hi: self.delta(a.location),
                });
            }
            lo = a.location;
            cdf += a.mass;
        }
        out.push(Segment { lo, hi: self.q_max, cdf: 1.0, delta_lo: self.delta(lo), delta_hi: 0.0 });
        out
    }

    pub(crate) fn segments_between(&self, a: f64, b: f64) -> impl Iterator<Item = Segment> + '_ {
        self.segments().into_iter().filter_map(move |seg| {
            let lo = seg.lo.max(a);
            let hi = seg.hi.min(b);
            (hi > lo).then_some(Segment {
                lo,
                hi,
                cdf: seg.cdf,
                delta_lo: seg.delta_lo - seg.cdf * (lo - seg.lo),
                delta_hi: seg.delta_lo - seg.cdf * (hi - seg.lo),
            })
        })
    }
}

/// `∫_lo^hi K(β δ(u)) du` over a piece where δ is linear with slope `-cdf`.
pub(crate) fn integrate_k_piece(lattice: &Lattice, beta: f64, seg: &Segment) -> Result<f64> {
    let len = seg.hi - seg.lo;
    let w_lo = beta * seg.delta_lo;
    let w_hi = beta * seg.delta_hi;
    if seg.cdf == 0.0 {
        return Ok(lattice.k_inverse(w_lo)? * len);
    }
    ensure!(
        w_hi > 0.0,
        Invariant,
        "δ vanishes on a piece with positive CDF; the integral of K diverges"
    );
    if w_lo - w_hi < THIN_PIECE * w_lo {
        let mut err = None;
        let v = gauss_legendre(
            |u| {
                let w = beta * (seg.delta_lo - seg.cdf * (u - seg.lo));
                lattice.k_inverse(w).unwrap_or_else(|e| {
                    err = Some(e);
                    f64::NAN
                })
            },
            seg.lo,
            seg.hi,
        );
        return err.map_or(Ok(v), Err);
    }
    let lam_lo = lattice.lambda_value(w_lo)?;
    let lam_hi = lattice.lambda_value(w_hi)?;
    Ok((lam_lo - lam_hi) / (beta * seg.cdf))
}

/// `∫_a^b K(β δ(u); t) du`, exact per linear piece of δ.
pub fn segment_integral_k(zeta: &StepMeasure, lattice: &Lattice, beta: f64, a: f64, b: f64) -> Result<f64> {
    ensure!(beta > 0.0, Domain, "beta must be positive");
    ensure!(
        0.0 <= a && a <= b && b <= zeta.q_max,
        Domain,
        "integration range [{a}, {b}] not inside [0, {}]",
        zeta.q_max
    );
    let mut total = 0.0;
    for seg in zeta.segments_between(a, b) {
        total += integrate_k_piece(lattice, beta, &seg)?;
    }
    Ok(total)
}
