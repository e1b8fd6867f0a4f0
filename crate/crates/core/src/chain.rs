//! Finite Markov chains: validation, irreducibility and the stationary law.

use std::fmt;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows may deviate from 1 by at most this much before being rejected.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Largest accepted residual `max_y |(πP)_y - π_y|`.
pub const STATIONARY_RESIDUAL: f64 = 1e-10;

const POWER_TOLERANCE: f64 = 1e-13;
const POWER_MAX_ITERATIONS: usize = 10_000_000;

/// Checks that `raw` is a square row-stochastic matrix with at least two
/// states. Rows within [`ROW_SUM_TOLERANCE`] of 1 are renormalized so that
/// they sum to 1.
pub fn validate_stochastic(raw: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = raw.len();
    if n < 2 || raw.iter().any(|row| row.len() != n) {
        return Err(Error::Shape { rows: n });
    }
    let mut out = Vec::with_capacity(n);
    for (x, row) in raw.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row: x, col: y });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry { row: x, col: y, value: v });
            }
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::RowSumError { row: x, sum });
        }
        if sum == 1.0 {
            out.push(row.clone());
        } else {
            out.push(row.iter().map(|v| v / sum).collect());
        }
    }
    Ok(out)
}

/// True iff the digraph with an edge `x -> y` whenever `P[x][y] > 0` is
/// strongly connected.
pub fn check_irreducible(p: &[Vec<f64>]) -> bool {
    let n = p.len();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for (x, row) in p.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            if v > 0.0 {
                graph.add_edge(nodes[x], nodes[y], ());
            }
        }
    }
    kosaraju_scc(&graph).len() == 1
}

/// Stationary distribution of an irreducible stochastic matrix.
///
/// Solves `π(P - I) = 0` with the last equation replaced by `Σπ = 1`. The
/// diagonal of `P - I` is taken as minus the off-diagonal row mass, which is
/// exact for stochastic rows and avoids cancellation when `P_xx` is close
/// to one. If the factorization is singular, or the result fails the residual
/// check, falls back to power iteration on the lazy chain `(I + P) / 2`.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    if let Some(pi) = stationary_direct(p) {
        if stationary_residual(p, &pi) <= STATIONARY_RESIDUAL {
            return Ok(pi);
        }
    }
    stationary_power(p)
}

fn stationary_direct(p: &[Vec<f64>]) -> Option<Vec<f64>> {
    let n = p.len();
    // Row y of the system holds column y of (P - I).
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (x, row) in p.iter().enumerate() {
        let mut off = 0.0;
        for (y, &v) in row.iter().enumerate() {
            if y != x {
                a[(y, x)] = v;
                off += v;
            }
        }
        a[(x, x)] = -off;
    }
    for x in 0..n {
        a[(n - 1, x)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a.lu().solve(&b)?;
    if pi.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return None;
    }
    let total: f64 = pi.iter().sum();
    Some(pi.iter().map(|v| v / total).collect())
}

fn stationary_power(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = p.len();
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_ITERATIONS {
        next.iter_mut().zip(&pi).for_each(|(nx, &v)| *nx = 0.5 * v);
        for (x, row) in p.iter().enumerate() {
            let w = 0.5 * pi[x];
            for (nx, &v) in next.iter_mut().zip(row) {
                *nx += w * v;
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let delta = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if delta <= POWER_TOLERANCE {
            return Ok(pi);
        }
    }
    Err(Error::ConvergenceFailure { iterations: POWER_MAX_ITERATIONS })
}

/// `max_y |(πP)_y - π_y|`.
pub fn stationary_residual(p: &[Vec<f64>], pi: &[f64]) -> f64 {
    let n = p.len();
    let mut pp = vec![0.0; n];
    for (x, row) in p.iter().enumerate() {
        for (acc, &v) in pp.iter_mut().zip(row) {
            *acc += pi[x] * v;
        }
    }
    pp.iter()
        .zip(pi)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// On-disk chain format: `{"labels": [...], "P": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

/// An irreducible finite Markov chain together with its stationary
/// distribution. Immutable once built.
#[derive(Debug, Clone)]
pub struct Chain {
    p: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    pi: Vec<f64>,
}

impl Chain {
    pub fn new(raw: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(raw, None)
    }

    pub fn with_labels(raw: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        Self::build(raw, Some(labels))
    }

    fn build(raw: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let p = validate_stochastic(&raw)?;
        if let Some(l) = &labels {
            if l.len() != p.len() {
                return Err(Error::LengthMismatch { left: l.len(), right: p.len() });
            }
        }
        if !check_irreducible(&p) {
            return Err(Error::Reducible);
        }
        let pi = stationary_distribution(&p)?;
        Ok(Chain { p, labels, pi })
    }

    pub fn from_file(file: ChainFile) -> Result<Self> {
        Self::build(file.p, file.labels)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_json(&text))
    }

    pub fn to_file(&self) -> ChainFile {
        ChainFile { labels: self.labels.clone(), p: self.p.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("chain serializes")
    }

    pub fn n(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self, x: usize, y: usize) -> f64 {
        self.p[x][y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.p[x]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.p
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of state `x`: its label if present, else the index.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    /// Resolves a state by label or, failing that, by decimal index.
    pub fn state_index(&self, name: &str) -> Result<usize> {
        if let Some(l) = &self.labels {
            if let Some(i) = l.iter().position(|s| s == name) {
                return Ok(i);
            }
        }
        match name.trim().parse::<usize>() {
            Ok(i) if i < self.n() => Ok(i),
            Ok(i) => Err(Error::StateOutOfRange { state: i, n: self.n() }),
            Err(_) => Err(Error::UnknownLabel(name.to_string())),
        }
    }

    pub fn residual(&self) -> f64 {
        stationary_residual(&self.p, &self.pi)
    }

    /// The lazy version `(I + P) / 2`, which shares the stationary law.
    pub fn lazy(&self) -> Chain {
        let n = self.n();
        let p = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| 0.5 * self.p[x][y] + if x == y { 0.5 } else { 0.0 })
                    .collect()
            })
            .collect();
        Chain::build(p, self.labels.clone()).expect("lazy version of an irreducible chain")
    }

    pub fn set(&self, states: &[usize]) -> Result<StateSet> {
        StateSet::from_states(self, states.iter().copied())
    }

    pub fn set_from_mask(&self, mask: u64) -> StateSet {
        StateSet::from_mask(self, mask)
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::from_states(self, 0..self.n()).expect("indices in range")
    }
}

/// A subset of states with its cached stationary measure.
#[derive(Clone, PartialEq)]
pub struct StateSet {
    words: Vec<u64>,
    n: usize,
    measure: f64,
}

impl StateSet {
    pub fn from_states(chain: &Chain, states: impl IntoIterator<Item = usize>) -> Result<Self> {
        let n = chain.n();
        let mut words = vec![0u64; n.div_ceil(64)];
        for s in states {
            if s >= n {
                return Err(Error::StateOutOfRange { state: s, n });
            }
            words[s / 64] |= 1 << (s % 64);
        }
        Ok(Self::finish(chain, words))
    }

    /// Builds a set from the low `n` bits of `mask`. Bits at or above `n`
    /// are ignored.
    pub fn from_mask(chain: &Chain, mask: u64) -> Self {
        let n = chain.n();
        let mut words = vec![0u64; n.div_ceil(64)];
        words[0] = if n >= 64 { mask } else { mask & ((1u64 << n) - 1) };
        Self::finish(chain, words)
    }

    fn finish(chain: &Chain, words: Vec<u64>) -> Self {
        let n = chain.n();
        let mut set = StateSet { words, n, measure: 0.0 };
        set.measure = if set.len() == n {
            1.0
        } else {
            set.iter().map(|s| chain.pi()[s]).sum()
        };
        set
    }

    pub fn contains(&self, s: usize) -> bool {
        s < self.n && self.words[s / 64] >> (s % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    /// Stationary measure `π(A)`.
    pub fn measure(&self) -> f64 {
        self.measure
    }

    /// Number of states in the underlying chain.
    pub fn universe(&self) -> usize {
        self.n
    }

    /// The bitmask, when the chain has at most 64 states.
    pub fn mask(&self) -> Option<u64> {
        (self.words.len() == 1).then(|| self.words[0])
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&s| self.contains(s))
    }

    pub fn states(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self, chain: &Chain) -> StateSet {
        StateSet::from_states(chain, (0..self.n).filter(|&s| !self.contains(s)))
            .expect("indices in range")
    }

    pub fn union(&self, other: &StateSet, chain: &Chain) -> StateSet {
        StateSet::from_states(chain, (0..self.n).filter(|&s| self.contains(s) || other.contains(s)))
            .expect("indices in range")
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
