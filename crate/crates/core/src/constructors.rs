//! Example chains: the tight three-state chain, the two-state chain for
//! `β > 1/2`, and L-shaped chains realizing hittable step functions.
//!
//! L-shaped chains live on `v_{-1}, v_0, v_1, ..., v_k`, stored at indices
//! `0, 1, ..., k + 1`. Apart from jumps into `v_0`, every transition moves
//! to a neighbour in that sequence.

use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::extremal::MEASURE_SLACK;
use crate::hitting::expected_hitting_times;

/// Slack allowed in the hittability inequalities.
pub const HITTABILITY_SLACK: f64 = 1e-12;

/// Relative tolerance for the construction conditions on L-shaped chains.
pub const CONDITION_TOLERANCE: f64 = 1e-9;

/// The tight example for `T(α) ≤ T(β)/α`: stationary law
/// `(ε, 1 - α - ε, α)`, `T(β) = 1` and `T(α) = 1/α` whenever
/// `α + ε < β ≤ 1/2`.
pub fn three_state_tight(alpha: f64, epsilon: f64) -> Result<Chain> {
    if !(alpha > 0.0 && epsilon > 0.0 && alpha + epsilon < 0.5) {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 < alpha, 0 < eps and alpha + eps < 1/2 (alpha = {alpha}, eps = {epsilon})"
        )));
    }
    let mid = 1.0 - alpha - epsilon;
    let p = vec![
        vec![0.0, 1.0, 0.0],
        vec![epsilon / mid, 1.0 - (alpha + epsilon) / mid, alpha / mid],
        vec![0.0, 1.0, 0.0],
    ];
    Chain::with_labels(p, vec!["v_1".into(), "v_2".into(), "v_3".into()])
}

/// Two states with stationary law `(γ, 1 - γ)`: `T(β) = 0` for `β > γ`
/// while `T(α) = (1 - γ)N` for `1 - γ < α ≤ γ`.
pub fn two_state_counterexample(gamma: f64, big_n: f64) -> Result<Chain> {
    if !(gamma > 0.5 && gamma < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("gamma = {gamma} must lie in (1/2, 1)")));
    }
    if !(big_n.is_finite() && big_n * (1.0 - gamma) >= 1.0) {
        return Err(Error::ParameterOutOfRange(format!(
            "N = {big_n} too small: need N >= 1/(1 - gamma) = {}",
            1.0 / (1.0 - gamma)
        )));
    }
    let a = 1.0 / (gamma * big_n);
    let b = 1.0 / ((1.0 - gamma) * big_n);
    Chain::new(vec![vec![1.0 - a, a], vec![b, 1.0 - b]])
}

/// Data of the hittable step function `1 + Σ λ_i 1{α ≤ α_i}` plus the
/// realization parameters `ε` and `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittableStepSpec {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub big_n: f64,
}

impl HittableStepSpec {
    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    /// `α_i` for `i` in `1..=k`, with `α_0 = 0` as a convention for the
    /// error set and `α_{k+1} = 0` in the construction formulas.
    fn alpha(&self, i: usize) -> f64 {
        if i == 0 || i > self.k() {
            0.0
        } else {
            self.alphas[i - 1]
        }
    }

    fn lambda(&self, i: usize) -> f64 {
        self.lambdas[i - 1]
    }

    /// `Σ_{j ≤ i} λ_j`.
    fn lambda_sum(&self, i: usize) -> f64 {
        self.lambdas[..i].iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.len() != self.lambdas.len() {
            return Err(Error::SpecViolation(format!(
                "{} alphas but {} lambdas",
                self.alphas.len(),
                self.lambdas.len()
            )));
        }
        for (i, &a) in self.alphas.iter().enumerate() {
            if !(a > 0.0 && a < 0.5) {
                return Err(Error::SpecViolation(format!("alpha_{} = {a} outside (0, 1/2)", i + 1)));
            }
            if i > 0 && a >= self.alphas[i - 1] {
                return Err(Error::SpecViolation("alphas must be strictly decreasing".into()));
            }
        }
        if let Some((i, l)) = self.lambdas.iter().enumerate().find(|(_, l)| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::SpecViolation(format!("lambda_{} = {l} must be positive", i + 1)));
        }
        let a1 = self.alpha(1);
        if !(self.epsilon > 0.0 && self.epsilon < 0.5 - a1) {
            return Err(Error::SpecViolation(format!(
                "epsilon = {} outside (0, {})",
                self.epsilon,
                0.5 - a1
            )));
        }
        if !(self.big_n > 0.0 && self.big_n.is_finite()) {
            return Err(Error::SpecViolation(format!("N = {} must be positive", self.big_n)));
        }
        for i in 1..=self.k() {
            let bound = 1.0 / self.alpha(i) - 1.0;
            if self.lambda_sum(i) > bound + HITTABILITY_SLACK {
                return Err(Error::SpecViolation(format!(
                    "not hittable at i = {i}: sum of lambdas {} > 1/alpha_i - 1 = {bound}",
                    self.lambda_sum(i)
                )));
            }
        }
        Ok(())
    }

    /// The step function `1 + Σ_{j : α ≤ α_j} λ_j`.
    pub fn step_value(&self, alpha: f64) -> f64 {
        1.0 + self
            .alphas
            .iter()
            .zip(&self.lambdas)
            .filter(|(a, _)| alpha <= **a)
            .map(|(_, l)| l)
            .sum::<f64>()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Union of the closed intervals `[α_i, α_i + ε]`, `i = 0..=k`, `α_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorSet {
    pub intervals: Vec<(f64, f64)>,
}

impl ErrorSet {
    pub fn contains(&self, alpha: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= alpha && alpha <= hi)
    }

    /// Distance from `alpha` to the set (0 inside it).
    pub fn distance(&self, alpha: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| if alpha < lo { lo - alpha } else if alpha > hi { alpha - hi } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn error_set(spec: &HittableStepSpec) -> ErrorSet {
    let intervals = (0..=spec.k())
        .map(|i| {
            let a = spec.alpha(i);
            (a, a + spec.epsilon)
        })
        .collect();
    ErrorSet { intervals }
}

/// An L-shaped chain built from a hittable step spec.
#[derive(Debug, Clone)]
pub struct LShapedChain {
    pub chain: Chain,
    pub spec: HittableStepSpec,
}

/// Worst relative deviations from the three construction conditions.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionReport {
    /// (i): stationary masses of `v_{-1}`, `v_0` and each tail `{v_i..v_k}`.
    pub stationary: f64,
    /// (ii): largest `E_{v_i}[τ_{v_0}] / N - 1`, clamped below at 0.
    pub return_excess: f64,
    /// (ii): `|E_{v_{-1}}[τ_{v_0}] / N - 1|`.
    pub return_at_start: f64,
    /// (iii): worst `|E_{v_{i-1}}[τ_{v_i}] / (λ_i N) - 1|`.
    pub steps: f64,
}

impl ConditionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.stationary <= tol && self.return_excess <= tol && self.return_at_start <= tol && self.steps <= tol
    }
}

fn rel(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs()
}

impl LShapedChain {
    /// Matrix index of `v_i`, `i ≥ -1`.
    pub fn index(i: isize) -> usize {
        (i + 1) as usize
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    /// `π({v_i, ..., v_k})` for `i ≥ 0`, from the computed stationary law.
    pub fn tail_measure(&self, i: usize) -> f64 {
        self.chain.pi()[Self::index(i as isize)..].iter().sum()
    }

    /// `E_{v_from}[τ_{v_to}]`.
    pub fn hitting(&self, from: isize, to: isize) -> Result<f64> {
        let target = self.chain.set(&[Self::index(to)])?;
        Ok(expected_hitting_times(&self.chain, &target)?.h[Self::index(from)])
    }

    pub fn check_conditions(&self) -> Result<ConditionReport> {
        let spec = &self.spec;
        let pi = self.chain.pi();
        let mut stationary = rel(pi[0], spec.epsilon).max(rel(pi[1], 1.0 - spec.alpha(1) - spec.epsilon));
        for i in 1..=self.k() {
            stationary = stationary.max(rel(self.tail_measure(i), spec.alpha(i)));
        }
        let to_v0 = expected_hitting_times(&self.chain, &self.chain.set(&[Self::index(0)])?)?;
        let return_excess = to_v0.h.iter().map(|h| h / spec.big_n - 1.0).fold(0.0, f64::max);
        let return_at_start = rel(to_v0.h[0], spec.big_n);
        let mut steps: f64 = 0.0;
        for i in 1..=self.k() {
            let h = self.hitting(i as isize - 1, i as isize)?;
            steps = steps.max(rel(h, spec.lambda(i) * spec.big_n));
        }
        Ok(ConditionReport { stationary, return_excess, return_at_start, steps })
    }
}

fn state_name(i: isize) -> String {
    format!("v_{i}")
}

/// Builds the L-shaped chain for `spec` from the explicit transition
/// probabilities. Fails with [`Error::EntryOutOfRange`] when `N` is too
/// small for every entry to land in `[0, 1]`.
pub fn l_shaped_from_spec(spec: &HittableStepSpec) -> Result<LShapedChain> {
    spec.validate()?;
    let k = spec.k();
    let n = k + 2;
    let big_n = spec.big_n;
    let eps = spec.epsilon;
    let a = |i: usize| spec.alpha(i);
    let l = |i: usize| spec.lambda(i);
    let idx = |i: isize| LShapedChain::index(i);

    let mut p = vec![vec![0.0; n]; n];
    p[idx(-1)][idx(0)] = 1.0 / big_n;
    p[idx(0)][idx(-1)] = eps / ((1.0 - a(1) - eps) * big_n);
    if k >= 1 {
        p[idx(0)][idx(1)] = (1.0 - a(1)) / ((1.0 - a(1) - eps) * l(1) * big_n);
        p[idx(1)][idx(0)] = (1.0 - a(1) - l(1) * a(2)) / ((a(1) - a(2)) * l(1) * big_n);
    }
    for i in 2..=k {
        let ii = i as isize;
        p[idx(ii - 1)][idx(ii)] =
            (1.0 - a(i) * (1.0 + spec.lambda_sum(i - 1))) / ((a(i - 1) - a(i)) * l(i) * big_n);
        p[idx(ii)][idx(ii - 1)] =
            (1.0 - a(i) * (1.0 + spec.lambda_sum(i))) / ((a(i) - a(i + 1)) * l(i) * big_n);
        p[idx(ii)][idx(0)] = 1.0 / big_n;
    }
    // Diagonals take up the remaining mass of each row.
    for x in 0..n {
        let off: f64 = (0..n).filter(|&y| y != x).map(|y| p[x][y]).sum();
        p[x][x] = 1.0 - off;
    }
    for (x, row) in p.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::EntryOutOfRange {
                    row: state_name(x as isize - 1),
                    col: state_name(y as isize - 1),
                    value: v,
                });
            }
        }
    }
    let labels = (0..n).map(|x| state_name(x as isize - 1)).collect();
    let chain = Chain::with_labels(p, labels)?;
    Ok(LShapedChain { chain, spec: spec.clone() })
}

/// Retries [`l_shaped_from_spec`] with `N` doubled after each
/// [`Error::EntryOutOfRange`], at most `max_doublings` times.
pub fn l_shaped_doubling_n(spec: &HittableStepSpec, max_doublings: u32) -> Result<LShapedChain> {
    let mut spec = spec.clone();
    let mut attempt = 0;
    loop {
        match l_shaped_from_spec(&spec) {
            Err(Error::EntryOutOfRange { .. }) if attempt < max_doublings => {
                spec.big_n *= 2.0;
                attempt += 1;
            }
            other => return other,
        }
    }
}

/// The window index `i ∈ {0..k}` with
/// `π({v_{i+1}..v_k}) + π(v_{-1}) < α ≤ π({v_i..v_k})`, if any.
pub fn window_index(lc: &LShapedChain, alpha: f64) -> Option<usize> {
    let eps_mass = lc.chain.pi()[0];
    (0..=lc.k()).find(|&i| {
        let upper = lc.tail_measure(i);
        let lower = if i == lc.k() { 0.0 } else { lc.tail_measure(i + 1) };
        lower + eps_mass < alpha && alpha <= upper + MEASURE_SLACK
    })
}

/// `T(α) = E_{v_{-1}}[τ_{v_i}]` for the window index `i` of `α`.
pub fn l_shaped_t_formula(lc: &LShapedChain, alpha: f64) -> Result<f64> {
    let i = window_index(lc, alpha).ok_or(Error::WindowViolation { alpha })?;
    lc.hitting(-1, i as isize)
}

/// Dyadic step approximation of a decreasing `f` on `(0, 1/2]` with
/// `f(1/2) = 1`: `α_i = 1/2 - i 2^{-n}`, `λ_i = f(α_i) - f(α_{i-1})` for
/// `i = 1..2^{n-1} - 1`, and `ε = 2^{-2n}`. Steps with zero jump are
/// dropped.
pub fn dyadic_discretize(f: impl Fn(f64) -> f64, n: u32, big_n: f64) -> Result<HittableStepSpec> {
    if !(1..=26).contains(&n) {
        return Err(Error::ParameterOutOfRange(format!("n = {n} must lie in 1..=26")));
    }
    let half = f(0.5);
    if (half - 1.0).abs() > 1e-12 {
        return Err(Error::NormalizationError { value: half });
    }
    let h = 0.5f64.powi(n as i32);
    let steps = (1usize << (n - 1)) - 1;
    let mut alphas = Vec::new();
    let mut lambdas = Vec::new();
    let mut previous = (0.5, half);
    for i in 1..=steps {
        let alpha = 0.5 - i as f64 * h;
        let value = f(alpha);
        let jump = value - previous.1;
        if jump < -1e-12 {
            return Err(Error::NotDecreasing { left: alpha, right: previous.0 });
        }
        if jump > 1e-12 {
            alphas.push(alpha);
            lambdas.push(jump);
        }
        previous = (alpha, value);
    }
    let spec = HittableStepSpec { alphas, lambdas, epsilon: h * h, big_n };
    spec.validate()?;
    Ok(spec)
}
