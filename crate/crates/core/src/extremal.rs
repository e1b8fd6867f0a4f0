//! Extremal hitting times `T(α)`, the profile `α ↦ T(α)` and `t_prod`, by
//! exhaustive enumeration of state subsets.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Chain, StateSet};
use crate::error::{Error, Result};
use crate::format::format_g17;
use crate::hitting::expected_hitting_times;

/// Subset enumeration is refused beyond this many states.
pub const MAX_ENUM_STATES: usize = 24;

/// Slack in the admissibility test `π(A) ≥ α`.
pub const MEASURE_SLACK: f64 = 1e-12;

/// A maximizing configuration for `T(α)`.
#[derive(Debug, Clone)]
pub struct ExtremalWitness {
    pub alpha: f64,
    pub set: StateSet,
    pub start: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakpoint {
    pub measure: f64,
    pub value: f64,
}

/// The decreasing step function `α ↦ T(α)`.
///
/// One breakpoint per distinct subset measure, sorted by measure, with
/// values already suffix-maximized: `T(α)` is the value of the first
/// breakpoint whose measure is at least `α - MEASURE_SLACK`.
#[derive(Debug, Clone, Serialize)]
pub struct HittingProfile {
    breakpoints: Vec<Breakpoint>,
}

impl HittingProfile {
    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn evaluate(&self, alpha: f64) -> f64 {
        let i = self.breakpoints.partition_point(|b| b.measure < alpha - MEASURE_SLACK);
        self.breakpoints.get(i).map_or(0.0, |b| b.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha_threshold,value\n");
        for b in &self.breakpoints {
            out.push_str(&format_g17(b.measure));
            out.push(',');
            out.push_str(&format_g17(b.value));
            out.push('\n');
        }
        out
    }
}

/// `π(A)` for a bitmask, summed in increasing state order; exactly 1 for
/// the full set. Matches [`StateSet::measure`].
pub(crate) fn mask_measure(pi: &[f64], mask: u64) -> f64 {
    let n = pi.len();
    let full = full_mask(n);
    if mask & full == full {
        return 1.0;
    }
    (0..n).filter(|&s| mask >> s & 1 == 1).map(|s| pi[s]).sum()
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_cap(chain: &Chain) -> Result<()> {
    if chain.n() > MAX_ENUM_STATES {
        return Err(Error::StateCountCap { n: chain.n(), cap: MAX_ENUM_STATES });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    Ok(())
}

/// Per-subset summary: `(π(A), max_x E_x[τ_A], argmax)`.
#[derive(Debug, Clone, Copy)]
struct Record {
    mask: u64,
    measure: f64,
    value: f64,
    start: usize,
}

fn record(chain: &Chain, mask: u64) -> Result<Record> {
    let set = chain.set_from_mask(mask);
    let h = expected_hitting_times(chain, &set)?;
    let start = h.argmax();
    Ok(Record { mask, measure: set.measure(), value: h.h[start], start })
}

// Larger value first, then smaller mask, then smaller start.
fn better(a: Record, b: Record) -> Record {
    match a.value.total_cmp(&b.value) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if (a.mask, a.start) <= (b.mask, b.start) {
                a
            } else {
                b
            }
        }
    }
}

fn reduce_best(records: impl ParallelIterator<Item = Result<Record>>) -> Result<Option<Record>> {
    records
        .map(|r| r.map(Some))
        .try_reduce(|| None, |a, b| {
            Ok(match (a, b) {
                (Some(a), Some(b)) => Some(better(a, b)),
                (a, None) => a,
                (None, b) => b,
            })
        })
}

fn witness(chain: &Chain, alpha: f64, r: Record) -> ExtremalWitness {
    ExtremalWitness { alpha, set: chain.set_from_mask(r.mask), start: r.start, value: r.value }
}

/// `T(α)`: the largest `E_x[τ_A]` over states `x` and sets with
/// `π(A) ≥ α`.
///
/// Only inclusion-minimal admissible sets are solved; enlarging a target
/// never increases a hitting time.
pub fn t_alpha(chain: &Chain, alpha: f64) -> Result<ExtremalWitness> {
    check_cap(chain)?;
    check_alpha(alpha)?;
    let pi = chain.pi();
    let n = chain.n();
    let threshold = alpha - MEASURE_SLACK;
    let admissible = |mask: u64| mask != 0 && mask_measure(pi, mask) >= threshold;
    let best = reduce_best(
        (1..=full_mask(n))
            .into_par_iter()
            .filter(|&mask| {
                admissible(mask)
                    && (0..n).all(|s| mask >> s & 1 == 0 || !admissible(mask & !(1 << s)))
            })
            .map(|mask| record(chain, mask)),
    )?;
    Ok(witness(chain, alpha, best.expect("the full set is always admissible")))
}

/// `T(α)` over every admissible set, without minimality pruning.
pub fn t_alpha_exhaustive(chain: &Chain, alpha: f64) -> Result<ExtremalWitness> {
    check_cap(chain)?;
    check_alpha(alpha)?;
    let pi = chain.pi();
    let best = reduce_best(
        (1..=full_mask(chain.n()))
            .into_par_iter()
            .filter(|&mask| mask_measure(pi, mask) >= alpha - MEASURE_SLACK)
            .map(|mask| record(chain, mask)),
    )?;
    Ok(witness(chain, alpha, best.expect("the full set is always admissible")))
}

/// Hitting summaries for every nonempty subset; the basis for the profile
/// and for `t_prod`.
#[derive(Debug, Clone)]
pub struct SubsetTable {
    records: Vec<Record>,
}

impl SubsetTable {
    pub fn build(chain: &Chain) -> Result<Self> {
        check_cap(chain)?;
        let records = (1..=full_mask(chain.n()))
            .into_par_iter()
            .map(|mask| record(chain, mask))
            .collect::<Result<Vec<_>>>()?;
        Ok(SubsetTable { records })
    }

    /// `(π(A), max_x E_x[τ_A])` for the set with bitmask `mask`.
    pub fn get(&self, mask: u64) -> (f64, f64) {
        let r = self.records[mask as usize - 1];
        (r.measure, r.value)
    }

    pub fn profile(&self) -> HittingProfile {
        let mut pairs: Vec<(f64, f64)> = self.records.iter().map(|r| (r.measure, r.value)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints: Vec<Breakpoint> = Vec::new();
        let mut running = f64::NEG_INFINITY;
        for &(measure, value) in pairs.iter().rev() {
            running = running.max(value);
            match breakpoints.last_mut() {
                Some(last) if last.measure == measure => last.value = running,
                _ => breakpoints.push(Breakpoint { measure, value: running }),
            }
        }
        breakpoints.reverse();
        HittingProfile { breakpoints }
    }

    /// `max π(A)·E_x[τ_A]` over nonempty proper subsets, with the
    /// maximizing set and start.
    pub fn t_prod(&self) -> (f64, u64, usize) {
        let full = self.records.len() as u64;
        self.records
            .iter()
            .filter(|r| r.mask != full)
            .map(|r| (r.measure * r.value, r.mask, r.start))
            .fold((f64::NEG_INFINITY, 0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
    }
}

pub fn t_profile(chain: &Chain) -> Result<HittingProfile> {
    Ok(SubsetTable::build(chain)?.profile())
}

/// `t_prod = max{π(A)·E_x[τ_A] : x ∈ Ω, ∅ ≠ A ⊊ Ω}`.
pub fn t_prod(chain: &Chain) -> Result<f64> {
    Ok(SubsetTable::build(chain)?.t_prod().0)
}
