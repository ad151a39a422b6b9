//! Metropolis-adjusted Langevin chains, one per replica, all sharing one
//! disorder realization, with an optional per-replica temperature ladder.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::DISORDER_STREAM;
use super::Model;
use crate::error::{ensure, Result};
use crate::functional::EuclideanParams;

const TARGET_ACCEPTANCE: f64 = 0.574;
const ADAPT_WINDOW: u64 = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainOptions {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub steps: u64,
    pub replicas: usize,
    pub seed: u64,
    /// Record every `thin`-th step after burn-in.
    #[serde(default = "default_thin")]
    pub thin: u64,
    /// Extra inverse temperatures, each below `β`, simulated alongside every replica.
    #[serde(default)]
    pub ladder: Vec<f64>,
    #[serde(default = "default_swap_every")]
    pub swap_every: u64,
}

fn default_thin() -> u64 {
    10
}

fn default_swap_every() -> u64 {
    10
}

impl ChainOptions {
    pub fn new(n: usize, m: usize, steps: u64, replicas: usize, seed: u64) -> Self {
        Self { n, m, steps, replicas, seed, thin: default_thin(), ladder: Vec::new(), swap_every: default_swap_every() }
    }

    pub fn burn_in(&self) -> u64 {
        self.steps / 4
    }

    pub fn validate(&self, beta: f64) -> Result<()> {
        ensure!(self.n >= 1 && self.m >= 1, Config, "N and M must be positive");
        ensure!(self.replicas >= 2, Config, "overlaps need at least two replicas");
        ensure!(self.thin >= 1 && self.swap_every >= 1, Config, "thin and swap_every must be positive");
        ensure!(
            self.steps >= 4 * ADAPT_WINDOW && self.steps - self.burn_in() >= self.thin,
            Config,
            "too few steps ({}) to burn in and record",
            self.steps
        );
        ensure!(
            self.ladder.iter().all(|b| b.is_finite() && *b > 0.0 && *b < beta),
            Config,
            "ladder temperatures must be positive and below beta"
        );
        Ok(())
    }
}

/// One row of the observable stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub step: u64,
    pub site: usize,
    /// `‖u(x)‖²_N` averaged over replicas.
    pub radius_sq: f64,
    /// `(u(x), u'(x))_N` averaged over replica pairs.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub records: Vec<Record>,
    /// Post-burn-in acceptance rate of every replica at the target temperature.
    pub acceptance: Vec<f64>,
    pub step_sizes: Vec<f64>,
    /// Fraction of accepted ladder swaps, when a ladder is used.
    pub swap_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSummary {
    pub radius_mean: f64,
    pub radius_se: f64,
    pub overlap_mean: f64,
    pub overlap_se: f64,
    pub acceptance: Vec<f64>,
    pub samples: usize,
}

struct Rung {
    beta: f64,
    u: Vec<f64>,
    energy: f64,
    grad: Vec<f64>,
    tau: f64,
    log_tau_sum: f64,
    log_tau_count: u64,
    accepts: u64,
    tries: u64,
}

struct ReplicaRun {
    snapshots: Vec<Vec<f64>>,
    acceptance: Vec<f64>,
    tau: f64,
    swaps: (u64, u64),
}

fn mala_step(model: &Model, rung: &mut Rung, rng: &mut ChaCha8Rng, scratch: &mut Vec<f64>) -> bool {
    let (b, tau) = (rung.beta, rung.tau);
    let noise = (2.0 * tau).sqrt();
    let proposal: Vec<f64> = rung
        .u
        .iter()
        .zip(&rung.grad)
        .map(|(x, g)| x - tau * b * g + noise * rng.sample::<f64, _>(StandardNormal))
        .collect();
    scratch.resize(proposal.len(), 0.0);
    let e_new = model.energy_and_gradient(&proposal, scratch);
    let mut forward = 0.0;
    let mut backward = 0.0;
    for i in 0..proposal.len() {
        let f = proposal[i] - rung.u[i] + tau * b * rung.grad[i];
        let r = rung.u[i] - proposal[i] + tau * b * scratch[i];
        forward += f * f;
        backward += r * r;
    }
    let log_alpha = -b * (e_new - rung.energy) - (backward - forward) / (4.0 * tau);
    let accept = log_alpha >= 0.0 || rng.gen::<f64>() < log_alpha.exp();
    if accept {
        rung.u = proposal;
        rung.energy = e_new;
        std::mem::swap(&mut rung.grad, scratch);
    }
    accept
}

fn run_replica(model: &Model, opts: &ChainOptions, replica: usize) -> ReplicaRun {
    let p = &model.params;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(DISORDER_STREAM + 1 + replica as u64);
    let len = model.dim() * model.sites();
    let stiffness = p.mu + 4.0 * p.lattice.spec().dim as f64 * p.lattice.coupling()
        + p.disorder.terms().iter().map(|t| 2.0 * t.weight * t.rate).sum::<f64>();
    let mut rungs: Vec<Rung> = std::iter::once(p.beta)
        .chain(opts.ladder.iter().copied())
        .map(|beta| {
            let sd = 1.0 / (beta * p.mu).sqrt();
            let u: Vec<f64> = (0..len).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect();
            let mut grad = vec![0.0; len];
            let energy = model.energy_and_gradient(&u, &mut grad);
            let tau = 0.5 / (beta * stiffness * (len as f64).powf(1.0 / 3.0));
            Rung { beta, u, energy, grad, tau, log_tau_sum: 0.0, log_tau_count: 0, accepts: 0, tries: 0 }
        })
        .collect();
    let burn_in = opts.burn_in();
    let mut scratch = Vec::new();
    let mut snapshots = Vec::new();
    let mut swaps = (0u64, 0u64);
    for step in 0..opts.steps {
        for rung in rungs.iter_mut() {
            let ok = mala_step(model, rung, &mut rng, &mut scratch);
            if step < burn_in {
                // Robbins-Monro on log τ; the second half of burn-in is averaged.
                let gain = 0.2 * (1.0 + step as f64 / ADAPT_WINDOW as f64).powf(-0.6);
                rung.tau *= (gain * (f64::from(u8::from(ok)) - TARGET_ACCEPTANCE)).exp();
                if 2 * step >= burn_in {
                    rung.log_tau_sum += rung.tau.ln();
                    rung.log_tau_count += 1;
                }
                if step + 1 == burn_in && rung.log_tau_count > 0 {
                    rung.tau = (rung.log_tau_sum / rung.log_tau_count as f64).exp();
                }
            } else {
                rung.accepts += u64::from(ok);
                rung.tries += 1;
            }
        }
        if rungs.len() > 1 && step % opts.swap_every == 0 {
            for k in 0..rungs.len() - 1 {
                let log_a = (rungs[k].beta - rungs[k + 1].beta) * (rungs[k].energy - rungs[k + 1].energy);
                swaps.1 += 1;
                if log_a >= 0.0 || rng.gen::<f64>() < log_a.exp() {
                    swaps.0 += 1;
                    let (a, b) = rungs.split_at_mut(k + 1);
                    std::mem::swap(&mut a[k].u, &mut b[0].u);
                    std::mem::swap(&mut a[k].energy, &mut b[0].energy);
                    std::mem::swap(&mut a[k].grad, &mut b[0].grad);
                }
            }
        }
        if step >= burn_in && (step - burn_in).is_multiple_of(opts.thin) {
            snapshots.push(rungs[0].u.clone());
        }
    }
    ReplicaRun {
        snapshots,
        acceptance: rungs.iter().map(|r| r.accepts as f64 / r.tries.max(1) as f64).collect(),
        tau: rungs[0].tau,
        swaps,
    }
}

/// Runs the replicas in parallel on one disorder realization drawn from `opts.seed`.
///
/// Replica `r` uses RNG stream `r + 1` of the same seed, so the output does
/// not depend on the thread count.
pub fn run_chains(p: &EuclideanParams, opts: &ChainOptions) -> Result<SimOutput> {
    opts.validate(p.beta)?;
    let model = Model::new(p.clone(), opts.n, opts.m, opts.seed)?;
    let runs: Vec<ReplicaRun> = (0..opts.replicas).into_par_iter().map(|r| run_replica(&model, opts, r)).collect();
    for (r, run) in runs.iter().enumerate() {
        for &rate in &run.acceptance {
            ensure!(
                (0.05..=0.95).contains(&rate),
                Numerical,
                "replica {r} acceptance {rate:.3} outside [0.05, 0.95] after adaptation"
            );
        }
    }
    let n = model.dim();
    let nf = n as f64;
    let records_per_replica = runs[0].snapshots.len();
    let pairs = (opts.replicas * (opts.replicas - 1) / 2) as f64;
    let mut records = Vec::with_capacity(records_per_replica * model.sites());
    for t in 0..records_per_replica {
        let step = opts.burn_in() + t as u64 * opts.thin;
        for x in 0..model.sites() {
            let slice = |r: usize| &runs[r].snapshots[t][x * n..(x + 1) * n];
            let mut radius = 0.0;
            let mut overlap = 0.0;
            for a in 0..opts.replicas {
                let ua = slice(a);
                radius += ua.iter().map(|v| v * v).sum::<f64>() / nf;
                for b in a + 1..opts.replicas {
                    overlap += ua.iter().zip(slice(b)).map(|(v, w)| v * w).sum::<f64>() / nf;
                }
            }
            records.push(Record {
                step,
                site: x,
                radius_sq: radius / opts.replicas as f64,
                overlap: overlap / pairs,
            });
        }
    }
    let (acc, tot) = runs.iter().fold((0, 0), |s, r| (s.0 + r.swaps.0, s.1 + r.swaps.1));
    Ok(SimOutput {
        records,
        acceptance: runs.iter().map(|r| r.acceptance[0]).collect(),
        step_sizes: runs.iter().map(|r| r.tau).collect(),
        swap_rate: (tot > 0).then(|| acc as f64 / tot as f64),
    })
}

// Mean and batch-means standard error of a correlated series.
fn batch_means(series: &[f64], batches: usize) -> (f64, f64) {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let size = series.len() / batches;
    if size == 0 || batches < 2 {
        return (mean, f64::NAN);
    }
    let offset = series.len() - size * batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| series[offset + b * size..offset + (b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - bm) * (m - bm)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var / batches as f64).sqrt())
}

/// Site-averaged means with batch-means standard errors over `batches` batches.
pub fn summarize(out: &SimOutput, batches: usize) -> SimSummary {
    let mut radius: Vec<f64> = Vec::new();
    let mut overlap: Vec<f64> = Vec::new();
    let mut i = 0;
    while i < out.records.len() {
        let step = out.records[i].step;
        let (mut r, mut o, mut c) = (0.0, 0.0, 0.0);
        while i < out.records.len() && out.records[i].step == step {
            r += out.records[i].radius_sq;
            o += out.records[i].overlap;
            c += 1.0;
            i += 1;
        }
        radius.push(r / c);
        overlap.push(o / c);
    }
    let (radius_mean, radius_se) = batch_means(&radius, batches);
    let (overlap_mean, overlap_se) = batch_means(&overlap, batches);
    SimSummary {
        radius_mean,
        radius_se,
        overlap_mean,
        overlap_se,
        acceptance: out.acceptance.clone(),
        samples: radius.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::ExpMixture;
    use crate::lattice::Lattice;

    #[test]
    fn chains_are_deterministic() {
        let p = EuclideanParams::new(1.0, 3.0, 0.0, Lattice::single_site(), ExpMixture::two_scale_example()).unwrap();
        let opts = ChainOptions::new(4, 16, 200, 2, 5);
        let a = run_chains(&p, &opts).unwrap();
        let b = run_chains(&p, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn batch_means_of_constant_series() {
        let (m, se) = batch_means(&[2.0; 100], 10);
        assert_eq!(m, 2.0);
        assert_eq!(se, 0.0);
    }
}
