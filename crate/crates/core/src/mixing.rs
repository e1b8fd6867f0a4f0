//! Total-variation distance, mixing time and Cèsaro mixing time.

use serde::Serialize;

use crate::chain::Chain;
use crate::error::{Error, Result};

/// Default horizon for the mixing-time scans.
pub const DEFAULT_CAP: u64 = 1_000_000;

/// Distance threshold in both mixing-time definitions.
pub const THRESHOLD: f64 = 0.25;

// Absorbs roundoff when a distance sits exactly on the threshold.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Result of a capped scan over `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Reached(u64),
    NotReached { cap: u64 },
}

impl Horizon {
    pub fn value(self) -> Option<u64> {
        match self {
            Horizon::Reached(t) => Some(t),
            Horizon::NotReached { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub t_mix: Horizon,
    pub t_ces: Horizon,
    /// `(t, max_x TV(P^t(x,·), π))` for every scanned `t`.
    pub worst_tv_at_t: Vec<(u64, f64)>,
}

/// `max_A |μ(A) - ν(A)|`, computed as half the L1 distance.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::LengthMismatch { left: mu.len(), right: nu.len() });
    }
    let d = 0.5 * mu.iter().zip(nu).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(d.min(1.0))
}

fn worst_row_tv(rows: &[Vec<f64>], pi: &[f64], scale: f64) -> f64 {
    rows.iter()
        .map(|r| 0.5 * r.iter().zip(pi).map(|(a, b)| (a * scale - b).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Multiplies `rows` by `P` on the right and renormalizes each row.
fn advance(rows: &mut [Vec<f64>], chain: &Chain, scratch: &mut Vec<f64>) {
    let n = chain.n();
    for row in rows.iter_mut() {
        scratch.clear();
        scratch.resize(n, 0.0);
        for (z, &w) in row.iter().enumerate() {
            if w != 0.0 {
                for (acc, &p) in scratch.iter_mut().zip(chain.row(z)) {
                    *acc += w * p;
                }
            }
        }
        let total: f64 = scratch.iter().sum();
        for (dst, &v) in row.iter_mut().zip(scratch.iter()) {
            *dst = v / total;
        }
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|x| (0..n).map(|y| if x == y { 1.0 } else { 0.0 }).collect()).collect()
}

/// Scans `t = 0, 1, ..., cap` for the first `t` with
/// `max_x TV(P^t(x,·), π) ≤ 1/4`, returning the horizon and the table of
/// distances seen.
pub fn mixing_scan(chain: &Chain, cap: u64) -> (Horizon, Vec<(u64, f64)>) {
    let pi = chain.pi();
    let mut rows = identity(chain.n());
    let mut scratch = Vec::new();
    let mut table = Vec::new();
    for t in 0..=cap {
        if t > 0 {
            advance(&mut rows, chain, &mut scratch);
        }
        let d = worst_row_tv(&rows, pi, 1.0);
        table.push((t, d));
        if d <= THRESHOLD + THRESHOLD_SLACK {
            return (Horizon::Reached(t), table);
        }
    }
    (Horizon::NotReached { cap }, table)
}

pub fn mixing_time(chain: &Chain, cap: u64) -> Horizon {
    mixing_scan(chain, cap).0
}

/// First `t ≥ 1` with every row of `(1/t) Σ_{s<t} P^s` within 1/4 of `π`.
/// Every `t` up to the cap is examined; the averaged distance is not
/// assumed to be monotone.
pub fn cesaro_mixing_time(chain: &Chain, cap: u64) -> Horizon {
    let n = chain.n();
    let pi = chain.pi();
    let mut power = identity(n);
    let mut sum = vec![vec![0.0; n]; n];
    let mut scratch = Vec::new();
    for t in 1..=cap {
        // sum holds Σ_{s<t} P^s after adding P^{t-1}
        for (acc, row) in sum.iter_mut().zip(&power) {
            acc.iter_mut().zip(row).for_each(|(a, v)| *a += v);
        }
        if worst_row_tv(&sum, pi, 1.0 / t as f64) <= THRESHOLD + THRESHOLD_SLACK {
            return Horizon::Reached(t);
        }
        advance(&mut power, chain, &mut scratch);
    }
    Horizon::NotReached { cap }
}

pub fn mixing_report(chain: &Chain, cap: u64) -> MixingReport {
    let (t_mix, worst_tv_at_t) = mixing_scan(chain, cap);
    MixingReport { t_mix, t_ces: cesaro_mixing_time(chain, cap), worst_tv_at_t }
}
