//! Expected hitting times, hitting distributions and occupation times.
//!
//! Every quantity here is a solve against `I - P` restricted to the states
//! outside some nonempty set. [`TargetSolver`] factorizes that matrix once
//! and reuses the factorization for every right-hand side.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use serde::Serialize;

use crate::chain::{Chain, StateSet};
use crate::error::{Error, Result};

/// Largest chain accepted by the single-set solvers.
pub const MAX_STATES: usize = 2000;

/// `h[x] = E_x[τ_target]`, with `τ` counted from time 0.
#[derive(Debug, Clone)]
pub struct HittingVector {
    pub target: StateSet,
    pub h: Vec<f64>,
}

impl HittingVector {
    /// Largest violation of `h[x] = 1 + Σ_y P_xy h[y]` over non-target `x`.
    pub fn residual(&self, chain: &Chain) -> f64 {
        (0..chain.n())
            .filter(|&x| !self.target.contains(x))
            .map(|x| {
                let step: f64 = chain.row(x).iter().zip(&self.h).map(|(p, h)| p * h).sum();
                (self.h[x] - 1.0 - step).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.h.iter().copied().fold(0.0, f64::max)
    }

    /// Maximizing start state; the smallest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (x, &v) in self.h.iter().enumerate() {
            if v > self.h[best] {
                best = x;
            }
        }
        best
    }

    /// `E_μ[τ]` for a start distribution `mu`.
    pub fn average(&self, mu: &[f64]) -> f64 {
        mu.iter().zip(&self.h).map(|(m, h)| m * h).sum()
    }
}

/// Entry `(x, j)` is the probability that the chain started at `x` first
/// enters the target at `columns[j]`.
#[derive(Debug, Clone, Serialize)]
pub struct HittingDistributionMatrix {
    #[serde(skip)]
    pub target: StateSet,
    pub columns: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl HittingDistributionMatrix {
    /// Pushes a start distribution forward to the law of `X_{τ_target}`,
    /// returned as a vector over all states.
    pub fn push_forward(&self, start: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; start.len()];
        for (x, &w) in start.iter().enumerate() {
            if w != 0.0 {
                for (j, &s) in self.columns.iter().enumerate() {
                    out[s] += w * self.rows[x][j];
                }
            }
        }
        out
    }
}

/// Factorization of `I - P` on the complement of a nonempty set.
pub struct TargetSolver<'a> {
    chain: &'a Chain,
    target: StateSet,
    free: Vec<usize>,
    lu: Option<LU<f64, Dyn, Dyn>>,
}

impl<'a> TargetSolver<'a> {
    pub fn new(chain: &'a Chain, target: &StateSet) -> Result<Self> {
        if target.is_empty() {
            return Err(Error::EmptyTarget);
        }
        if chain.n() > MAX_STATES {
            return Err(Error::StateCountCap { n: chain.n(), cap: MAX_STATES });
        }
        let free: Vec<usize> = (0..chain.n()).filter(|&x| !target.contains(x)).collect();
        let lu = if free.is_empty() {
            None
        } else {
            let m = free.len();
            let mut a = DMatrix::<f64>::zeros(m, m);
            for (i, &x) in free.iter().enumerate() {
                let row = chain.row(x);
                // 1 - P_xx written as the off-diagonal mass of the row
                let off: f64 = row.iter().enumerate().filter(|&(y, _)| y != x).map(|(_, v)| v).sum();
                for (j, &y) in free.iter().enumerate() {
                    a[(i, j)] = if i == j { off } else { -row[y] };
                }
            }
            Some(a.lu())
        };
        Ok(TargetSolver { chain, target: target.clone(), free, lu })
    }

    pub fn target(&self) -> &StateSet {
        &self.target
    }

    /// Solves `(I - P_FF) u = rhs` on the free states and scatters `u` into
    /// a full-length vector that is zero on the target.
    fn solve_scattered(&self, rhs: impl Fn(usize) -> f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.chain.n()];
        if let Some(lu) = &self.lu {
            let b = DVector::from_iterator(self.free.len(), self.free.iter().map(|&x| rhs(x)));
            let u = lu.solve(&b).ok_or(Error::Singular)?;
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::Singular);
            }
            for (&x, &v) in self.free.iter().zip(u.iter()) {
                out[x] = v;
            }
        }
        Ok(out)
    }

    pub fn hitting_times(&self) -> Result<HittingVector> {
        let mut h = self.solve_scattered(|_| 1.0)?;
        // tiny negative roundoff is impossible for an M-matrix solve but clamp anyway
        h.iter_mut().for_each(|v| *v = v.max(0.0));
        Ok(HittingVector { target: self.target.clone(), h })
    }

    pub fn distribution(&self) -> Result<HittingDistributionMatrix> {
        let columns = self.target.states();
        let n = self.chain.n();
        let mut rows = vec![vec![0.0; columns.len()]; n];
        for (j, &s) in columns.iter().enumerate() {
            let u = self.solve_scattered(|x| self.chain.p(x, s))?;
            for x in 0..n {
                rows[x][j] = if self.target.contains(x) {
                    if x == s { 1.0 } else { 0.0 }
                } else {
                    u[x].clamp(0.0, 1.0)
                };
            }
        }
        Ok(HittingDistributionMatrix { target: self.target.clone(), columns, rows })
    }

    /// Expected number of times `t < τ_target` with `X_t ∈ count`, from each
    /// start state.
    pub fn occupation_vector(&self, count: &StateSet) -> Result<Vec<f64>> {
        self.solve_scattered(|x| if count.contains(x) { 1.0 } else { 0.0 })
    }
}

pub fn expected_hitting_times(chain: &Chain, target: &StateSet) -> Result<HittingVector> {
    TargetSolver::new(chain, target)?.hitting_times()
}

/// `d⁺(A, B) = max_{x∈A} E_x[τ_B]`.
pub fn d_plus(chain: &Chain, from_set: &StateSet, to_set: &StateSet) -> Result<f64> {
    if from_set.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let h = expected_hitting_times(chain, to_set)?;
    Ok(from_set.iter().map(|x| h.h[x]).fold(f64::NEG_INFINITY, f64::max))
}

/// `d⁻(A, B) = min_{x∈A} E_x[τ_B]`.
pub fn d_minus(chain: &Chain, from_set: &StateSet, to_set: &StateSet) -> Result<f64> {
    if from_set.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let h = expected_hitting_times(chain, to_set)?;
    Ok(from_set.iter().map(|x| h.h[x]).fold(f64::INFINITY, f64::min))
}

pub fn hitting_distribution(chain: &Chain, target: &StateSet) -> Result<HittingDistributionMatrix> {
    TargetSolver::new(chain, target)?.distribution()
}

/// Expected number of steps `t < τ_avoid` with `X_t ∈ count`, for the chain
/// started from the distribution `start`.
pub fn expected_occupation(
    chain: &Chain,
    avoid: &StateSet,
    count: &StateSet,
    start: &[f64],
) -> Result<f64> {
    if start.len() != chain.n() {
        return Err(Error::LengthMismatch { left: start.len(), right: chain.n() });
    }
    let g = TargetSolver::new(chain, avoid)?.occupation_vector(count)?;
    Ok(start.iter().zip(&g).map(|(s, v)| s * v).sum())
}
