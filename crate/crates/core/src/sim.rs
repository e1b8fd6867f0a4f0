//! Seeded Monte Carlo estimates of hitting and occupation times.
//!
//! Trajectory `i` of a run with seed `s` draws from the ChaCha8 stream
//! `(s, i)`, so estimates do not depend on how trajectories are scheduled
//! across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Chain, StateSet};
use crate::error::{Error, Result};

/// Default cap on the total number of steps in one run.
pub const DEFAULT_STEP_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl SimEstimate {
    /// `|exact - mean|` in units of the standard error.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = (exact - self.mean).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.std_error
        }
    }
}

/// Inverse-CDF sampler with cumulative row sums computed once per chain.
pub struct Sampler {
    cdf: Vec<Vec<f64>>,
    last: Vec<usize>,
}

fn cumulative(weights: &[f64]) -> (Vec<f64>, usize) {
    let mut acc = 0.0;
    let cdf = weights
        .iter()
        .map(|&w| {
            acc += w;
            acc
        })
        .collect();
    let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    (cdf, last)
}

fn draw(cdf: &[f64], last: usize, u: f64) -> usize {
    // The last positive-weight state absorbs any rounding shortfall in the
    // final cumulative sum.
    cdf.partition_point(|&c| c <= u).min(last)
}

impl Sampler {
    pub fn new(chain: &Chain) -> Self {
        let (cdf, last) = (0..chain.n()).map(|x| cumulative(chain.row(x))).unzip();
        Sampler { cdf, last }
    }

    pub fn step<R: Rng + ?Sized>(&self, x: usize, rng: &mut R) -> usize {
        draw(&self.cdf[x], self.last[x], rng.gen::<f64>())
    }
}

fn stream(seed: u64, trajectory: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng
}

/// Runs `n_samples` trajectories; each returns `(observation, steps)` or
/// `None` once it passes `step_cap` steps on its own. The cap is enforced on
/// the running total in trajectory order.
fn run<F>(n_samples: u64, seed: u64, step_cap: u64, trajectory: F) -> Result<SimEstimate>
where
    F: Fn(&mut ChaCha8Rng, u64) -> Option<(f64, u64)> + Sync,
{
    if n_samples == 0 {
        return Err(Error::ParameterOutOfRange("n_samples must be positive".into()));
    }
    if step_cap == 0 {
        return Err(Error::ParameterOutOfRange("step_cap must be positive".into()));
    }
    let outcomes: Vec<Option<(f64, u64)>> = (0..n_samples)
        .into_par_iter()
        .map(|i| trajectory(&mut stream(seed, i), step_cap))
        .collect();
    let mut total_steps = 0u64;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let Some((value, steps)) = outcome else {
            return Err(Error::StepCapExceeded { trajectory: i as u64 });
        };
        total_steps += steps;
        if total_steps > step_cap {
            return Err(Error::StepCapExceeded { trajectory: i as u64 });
        }
        sum += value;
        sum_sq += value * value;
    }
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = if n_samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(SimEstimate { mean, std_error: (variance / n).sqrt(), n_samples, seed })
}

/// Estimates `E_start[τ_target]`.
pub fn simulate_hitting(
    chain: &Chain,
    start: usize,
    target: &StateSet,
    n_samples: u64,
    seed: u64,
    step_cap: u64,
) -> Result<SimEstimate> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    if start >= chain.n() {
        return Err(Error::StateOutOfRange { state: start, n: chain.n() });
    }
    let sampler = Sampler::new(chain);
    run(n_samples, seed, step_cap, |rng, cap| {
        let mut x = start;
        let mut steps = 0u64;
        while !target.contains(x) {
            if steps == cap {
                return None;
            }
            x = sampler.step(x, rng);
            steps += 1;
        }
        Some((steps as f64, steps))
    })
}

/// Estimates the expected number of steps `t < τ_avoid` with `X_t ∈ count`
/// for `X_0 ~ start`.
pub fn simulate_occupation(
    chain: &Chain,
    start: &[f64],
    avoid: &StateSet,
    count: &StateSet,
    n_samples: u64,
    seed: u64,
    step_cap: u64,
) -> Result<SimEstimate> {
    if avoid.is_empty() {
        return Err(Error::EmptyTarget);
    }
    if start.len() != chain.n() {
        return Err(Error::LengthMismatch { left: start.len(), right: chain.n() });
    }
    let sampler = Sampler::new(chain);
    let (start_cdf, start_last) = cumulative(start);
    run(n_samples, seed, step_cap, |rng, cap| {
        let mut x = draw(&start_cdf, start_last, rng.gen::<f64>());
        let mut steps = 0u64;
        let mut visits = 0u64;
        while !avoid.contains(x) {
            if count.contains(x) {
                visits += 1;
            }
            if steps == cap {
                return None;
            }
            x = sampler.step(x, rng);
            steps += 1;
        }
        Some((visits as f64, steps))
    })
}
