//! Numerical checks of the hitting-time inequalities.
//!
//! Every check produces an [`InequalityReport`] of the form `lhs ≤ rhs`.
//! Checks with hypotheses report `applicable = false` (and hold vacuously)
//! when a hypothesis fails.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::chain::{stationary_distribution, Chain, StateSet};
use crate::error::{Error, Result};
use crate::extremal::{t_alpha, HittingProfile, SubsetTable};
use crate::hitting::{d_minus, d_plus, expected_hitting_times, expected_occupation, TargetSolver};

/// Relative slack allowed before an inequality counts as violated.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;

/// Relative residual allowed in the occupation identity.
pub const OCCUPATION_TOLERANCE: f64 = 1e-7;

/// Relative tolerance for the equality hypothesis `T(0.01) = 99.9 T(0.02)`.
pub const RATIO_EQUALITY_TOLERANCE: f64 = 1e-6;

fn is_true(b: &bool) -> bool {
    *b
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub witness: Option<String>,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub applicable: bool,
}

impl InequalityReport {
    /// `lhs ≤ rhs` up to `INEQUALITY_TOLERANCE · (1 + |rhs|)`.
    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            holds: slack >= -INEQUALITY_TOLERANCE * (1.0 + rhs.abs()),
            witness: None,
            applicable: true,
        }
    }

    /// `lhs = rhs` up to `tol · (1 + |rhs|)`.
    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        InequalityReport {
            name: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            holds: (rhs - lhs).abs() <= tol * (1.0 + rhs.abs()),
            witness: None,
            applicable: true,
        }
    }

    pub fn not_applicable(name: impl Into<String>, reason: String) -> Self {
        InequalityReport {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            slack: f64::NAN,
            holds: true,
            witness: Some(format!("not applicable: {reason}")),
            applicable: false,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    /// Attaches `witness` only when the inequality fails.
    fn witness_if_violated(self, witness: impl FnOnce() -> String) -> Self {
        if self.holds {
            self
        } else {
            self.with_witness(witness())
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn set_name(chain: &Chain, set: &StateSet) -> String {
    let names: Vec<String> = set.iter().map(|s| chain.label(s)).collect();
    format!("{{{}}}", names.join(","))
}

/// The three values entering the two-sided bound on `T(α)`.
#[derive(Debug, Clone, Serialize)]
pub struct StarReport {
    pub alpha: f64,
    pub beta: f64,
    pub t_alpha: f64,
    pub t_beta: f64,
    pub t_one_minus_beta: f64,
    /// `T(α) ≤ T(β) + (1/α - 1) T(1 - β)`
    pub middle: InequalityReport,
    /// `T(β) + (1/α - 1) T(1 - β) ≤ T(β)/α`
    pub right: InequalityReport,
    /// `T(α) ≤ T(β)/α`
    pub chained: InequalityReport,
}

impl StarReport {
    pub fn holds(&self) -> bool {
        self.middle.holds && self.right.holds && self.chained.holds
    }

    pub fn reports(&self) -> [&InequalityReport; 3] {
        [&self.middle, &self.right, &self.chained]
    }
}

fn check_star_params(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < beta && beta <= 0.5) {
        return Err(Error::ParameterOutOfRange(format!(
            "need 0 < alpha < beta <= 1/2 (alpha = {alpha}, beta = {beta})"
        )));
    }
    Ok(())
}

/// Star check from a precomputed profile, for sweeps over `(α, β)`.
pub fn check_star_profile(profile: &HittingProfile, alpha: f64, beta: f64) -> Result<StarReport> {
    check_star_params(alpha, beta)?;
    let ta = profile.evaluate(alpha);
    let tb = profile.evaluate(beta);
    let tc = profile.evaluate(1.0 - beta);
    let middle_value = tb + (1.0 / alpha - 1.0) * tc;
    let tag = format!("alpha={alpha},beta={beta}");
    Ok(StarReport {
        alpha,
        beta,
        t_alpha: ta,
        t_beta: tb,
        t_one_minus_beta: tc,
        middle: InequalityReport::le("star_middle", ta, middle_value).witness_if_violated(|| tag.clone()),
        right: InequalityReport::le("star_right", middle_value, tb / alpha).witness_if_violated(|| tag.clone()),
        chained: InequalityReport::le("star_chained", ta, tb / alpha).witness_if_violated(|| tag.clone()),
    })
}

/// `T(α) ≤ T(β) + (1/α - 1) T(1-β) ≤ T(β)/α` for `0 < α < β ≤ 1/2`.
pub fn check_star(chain: &Chain, alpha: f64, beta: f64) -> Result<StarReport> {
    check_star_params(alpha, beta)?;
    let ta = t_alpha(chain, alpha)?;
    let tb = t_alpha(chain, beta)?.value;
    let tc = t_alpha(chain, 1.0 - beta)?.value;
    let middle_value = tb + (1.0 / alpha - 1.0) * tc;
    let witness = || {
        format!(
            "alpha={alpha},beta={beta},start={},set={}",
            chain.label(ta.start),
            set_name(chain, &ta.set)
        )
    };
    Ok(StarReport {
        alpha,
        beta,
        t_alpha: ta.value,
        t_beta: tb,
        t_one_minus_beta: tc,
        middle: InequalityReport::le("star_middle", ta.value, middle_value).witness_if_violated(witness),
        right: InequalityReport::le("star_right", middle_value, tb / alpha).witness_if_violated(witness),
        chained: InequalityReport::le("star_chained", ta.value, tb / alpha).witness_if_violated(witness),
    })
}

/// `π(A) ≤ d⁺(A,C) / (d⁺(A,C) + d⁻(C,A))`. With both distances zero the
/// bound degenerates to `π(A) ≤ 1`.
pub fn check_ratio_bound(chain: &Chain, a_set: &StateSet, c_set: &StateSet) -> Result<InequalityReport> {
    let dp = d_plus(chain, a_set, c_set)?;
    let dm = d_minus(chain, c_set, a_set)?;
    Ok(ratio_report(chain, a_set, c_set, dp, dm))
}

fn ratio_report(chain: &Chain, a_set: &StateSet, c_set: &StateSet, dp: f64, dm: f64) -> InequalityReport {
    let denominator = dp + dm;
    let rhs = if denominator == 0.0 { 1.0 } else { dp / denominator };
    InequalityReport::le("ratio_bound", a_set.measure(), rhs)
        .witness_if_violated(|| format!("A={},C={}", set_name(chain, a_set), set_name(chain, c_set)))
}

/// Hitting vectors for every nonempty subset of a small chain, for
/// exhaustive pair sweeps.
pub struct AllHittingVectors {
    vectors: Vec<Vec<f64>>,
}

impl AllHittingVectors {
    /// Cap on the state count (2^n vectors are stored).
    pub const MAX_STATES: usize = 16;

    pub fn build(chain: &Chain) -> Result<Self> {
        use rayon::prelude::*;
        if chain.n() > Self::MAX_STATES {
            return Err(Error::StateCountCap { n: chain.n(), cap: Self::MAX_STATES });
        }
        let full = (1u64 << chain.n()) - 1;
        let vectors = (1..=full)
            .into_par_iter()
            .map(|m| expected_hitting_times(chain, &chain.set_from_mask(m)).map(|h| h.h))
            .collect::<Result<Vec<_>>>()?;
        Ok(AllHittingVectors { vectors })
    }

    /// `E_x[τ_A]` for all `x`, `A` given by `mask`.
    pub fn get(&self, mask: u64) -> &[f64] {
        &self.vectors[mask as usize - 1]
    }

    pub fn d_plus(&self, from: u64, to: u64) -> f64 {
        let h = self.get(to);
        (0..h.len()).filter(|&x| from >> x & 1 == 1).map(|x| h[x]).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn d_minus(&self, from: u64, to: u64) -> f64 {
        let h = self.get(to);
        (0..h.len()).filter(|&x| from >> x & 1 == 1).map(|x| h[x]).fold(f64::INFINITY, f64::min)
    }
}

/// Ratio bound for every ordered pair of nonempty subsets; returns the
/// violating reports (empty when the bound holds everywhere) and the number
/// of pairs checked.
pub fn check_ratio_bound_all_pairs(chain: &Chain, table: &AllHittingVectors) -> (Vec<InequalityReport>, usize) {
    let full = (1u64 << chain.n()) - 1;
    let mut violations = Vec::new();
    let mut checked = 0;
    for a in 1..=full {
        let a_set = chain.set_from_mask(a);
        for c in 1..=full {
            let dp = table.d_plus(a, c);
            let dm = table.d_minus(c, a);
            let report = ratio_report(chain, &a_set, &chain.set_from_mask(c), dp, dm);
            checked += 1;
            if !report.holds {
                violations.push(report);
            }
        }
    }
    (violations, checked)
}

/// The cycle structure `A → C → A` behind the ratio bound.
#[derive(Debug, Clone, Serialize)]
pub struct AuxiliaryDecomposition {
    #[serde(skip)]
    pub a_set: StateSet,
    #[serde(skip)]
    pub c_set: StateSet,
    pub a_states: Vec<usize>,
    pub c_states: Vec<usize>,
    /// `q[i][j]`: from `a_states[i]`, probability that the first `A`-state
    /// hit after `τ_C` is `a_states[j]`.
    pub q: Vec<Vec<f64>>,
    /// Stationary law of `q`, as a vector over all states.
    pub mu: Vec<f64>,
    /// Law of `X_{τ_C}` started from `mu`, over all states.
    pub nu: Vec<f64>,
    /// `E_μ[τ_C]`
    pub mu_to_c: f64,
    /// `E_ν[τ_A]`
    pub nu_to_a: f64,
}

impl AuxiliaryDecomposition {
    /// `E_μ[τ] = E_μ[τ_C] + E_ν[τ_A]` for the cycle time `τ`.
    pub fn cycle_time(&self) -> f64 {
        self.mu_to_c + self.nu_to_a
    }

    pub fn q_row_error(&self) -> f64 {
        self.q.iter().map(|r| (r.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_j |(μQ)_j - μ_j|`.
    pub fn mu_residual(&self) -> f64 {
        let m = self.a_states.len();
        (0..m)
            .map(|j| {
                let mq: f64 = (0..m).map(|i| self.mu[self.a_states[i]] * self.q[i][j]).sum();
                (mq - self.mu[self.a_states[j]]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Stationary law of a stochastic matrix that may be reducible: the law of
/// the closed class containing the lowest-index recurrent state.
fn stationary_of_closed_class(q: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = q.len();
    if m == 1 {
        return Ok(vec![1.0]);
    }
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..m).map(|_| graph.add_node(())).collect();
    for (i, row) in q.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let components = kosaraju_scc(&graph);
    let mut class_of = vec![0; m];
    for (c, comp) in components.iter().enumerate() {
        for node in comp {
            class_of[node.index()] = c;
        }
    }
    let closed = |c: usize| {
        components[c]
            .iter()
            .all(|node| q[node.index()].iter().enumerate().all(|(j, &v)| v == 0.0 || class_of[j] == c))
    };
    let state = (0..m).find(|&i| closed(class_of[i])).expect("a finite chain has a closed class");
    let mut members: Vec<usize> = components[class_of[state]].iter().map(|n| n.index()).collect();
    members.sort_unstable();
    let mut out = vec![0.0; m];
    if members.len() == 1 {
        out[members[0]] = 1.0;
        return Ok(out);
    }
    let sub: Vec<Vec<f64>> = members
        .iter()
        .map(|&i| {
            let row: Vec<f64> = members.iter().map(|&j| q[i][j]).collect();
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();
    let pi = stationary_distribution(&sub)?;
    for (&i, v) in members.iter().zip(pi) {
        out[i] = v;
    }
    Ok(out)
}

/// Builds `Q`, its stationary law `μ` and the entrance law `ν` on `C`
/// for disjoint nonempty `A` and `C`.
pub fn auxiliary_decomposition(
    chain: &Chain,
    a_set: &StateSet,
    c_set: &StateSet,
) -> Result<AuxiliaryDecomposition> {
    if a_set.is_empty() || c_set.is_empty() {
        return Err(Error::EmptyTarget);
    }
    if !a_set.is_disjoint(c_set) {
        return Err(Error::SetsOverlap);
    }
    let to_c = TargetSolver::new(chain, c_set)?;
    let to_a = TargetSolver::new(chain, a_set)?;
    let enter_c = to_c.distribution()?;
    let enter_a = to_a.distribution()?;
    let a_states = a_set.states();
    let c_states = c_set.states();

    // Q = (A→C entrance law restricted to rows in A) · (C→A entrance law
    // restricted to rows in C)
    let q: Vec<Vec<f64>> = a_states
        .iter()
        .map(|&x| {
            let mut row = vec![0.0; a_states.len()];
            for (jc, &c) in enter_c.columns.iter().enumerate() {
                let w = enter_c.rows[x][jc];
                for (ja, r) in row.iter_mut().enumerate() {
                    *r += w * enter_a.rows[c][ja];
                }
            }
            let s: f64 = row.iter().sum();
            row.into_iter().map(|v| v / s).collect()
        })
        .collect();

    let mu_on_a = stationary_of_closed_class(&q)?;
    let mut mu = vec![0.0; chain.n()];
    for (&x, &v) in a_states.iter().zip(&mu_on_a) {
        mu[x] = v;
    }
    let nu = enter_c.push_forward(&mu);
    let mu_to_c = to_c.hitting_times()?.average(&mu);
    let nu_to_a = to_a.hitting_times()?.average(&nu);
    Ok(AuxiliaryDecomposition {
        a_set: a_set.clone(),
        c_set: c_set.clone(),
        a_states,
        c_states,
        q,
        mu,
        nu,
        mu_to_c,
        nu_to_a,
    })
}

/// `π(A) E_ν[τ_A] ≤ (1 - π(A)) E_μ[τ_C]`.
pub fn check_dist_inequality(chain: &Chain, decomp: &AuxiliaryDecomposition) -> InequalityReport {
    let pa = decomp.a_set.measure();
    InequalityReport::le("dist", pa * decomp.nu_to_a, (1.0 - pa) * decomp.mu_to_c).witness_if_violated(|| {
        format!("A={},C={}", set_name(chain, &decomp.a_set), set_name(chain, &decomp.c_set))
    })
}

/// The two inequalities obtained by rearranging the `dist` bound:
/// `π(A) ≤ E_μ[τ_C]/(E_μ[τ_C] + E_ν[τ_A])` and that ratio
/// `≤ d⁺(A,C)/(d⁺(A,C) + d⁻(C,A))`.
pub fn check_ratio_chain(chain: &Chain, decomp: &AuxiliaryDecomposition) -> Result<[InequalityReport; 2]> {
    let ratio = decomp.mu_to_c / decomp.cycle_time();
    let dp = d_plus(chain, &decomp.a_set, &decomp.c_set)?;
    let dm = d_minus(chain, &decomp.c_set, &decomp.a_set)?;
    Ok([
        InequalityReport::le("cycle_ratio", decomp.a_set.measure(), ratio),
        InequalityReport::le("cycle_ratio_vs_distances", ratio, dp / (dp + dm)),
    ])
}

/// Expected time spent in `S` during one cycle `A → C → A` started from
/// `μ` equals `π(S) E_μ[τ]`.
pub fn check_occupation_identity(
    chain: &Chain,
    decomp: &AuxiliaryDecomposition,
    s_set: &StateSet,
) -> Result<InequalityReport> {
    let before_c = expected_occupation(chain, &decomp.c_set, s_set, &decomp.mu)?;
    let back_to_a = expected_occupation(chain, &decomp.a_set, s_set, &decomp.nu)?;
    let report = InequalityReport::eq(
        "occupation",
        before_c + back_to_a,
        s_set.measure() * decomp.cycle_time(),
        OCCUPATION_TOLERANCE,
    );
    Ok(report.witness_if_violated(|| {
        format!(
            "A={},C={},S={}",
            set_name(chain, &decomp.a_set),
            set_name(chain, &decomp.c_set),
            set_name(chain, s_set)
        )
    }))
}

fn hypothesis(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + INEQUALITY_TOLERANCE * (1.0 + rhs.abs())
}

/// If `d⁺(Ω,B) ≤ T`, `d⁺(Ω,A∪C) ≤ T`, `d⁺(Ω,A) ≤ 99.9T` and
/// `d⁻(B,A) ≥ 98.9T`, then `d⁺(B,C) < 14T`. Hypotheses are evaluated with
/// the same relative slack as the conclusion.
pub fn check_lemma_4_2(
    chain: &Chain,
    a: &StateSet,
    b: &StateSet,
    c: &StateSet,
    t_scale: f64,
) -> Result<InequalityReport> {
    const NAME: &str = "lemma42";
    let omega = chain.full_set();
    let to_b = d_plus(chain, &omega, b)?;
    let to_ac = d_plus(chain, &omega, &a.union(c, chain))?;
    let to_a = d_plus(chain, &omega, a)?;
    let b_to_a = d_minus(chain, b, a)?;
    let failed = if !hypothesis(to_b, t_scale) {
        Some(format!("d+(Omega,B) = {to_b} > T"))
    } else if !hypothesis(to_ac, t_scale) {
        Some(format!("d+(Omega,A u C) = {to_ac} > T"))
    } else if !hypothesis(to_a, 99.9 * t_scale) {
        Some(format!("d+(Omega,A) = {to_a} > 99.9T"))
    } else if !hypothesis(98.9 * t_scale, b_to_a) {
        Some(format!("d-(B,A) = {b_to_a} < 98.9T"))
    } else {
        None
    };
    if let Some(reason) = failed {
        return Ok(InequalityReport::not_applicable(NAME, reason));
    }
    let b_to_c = d_plus(chain, b, c)?;
    Ok(InequalityReport::le(NAME, b_to_c, 14.0 * t_scale).witness_if_violated(|| {
        format!(
            "A={},B={},C={},T={t_scale}",
            set_name(chain, a),
            set_name(chain, b),
            set_name(chain, c)
        )
    }))
}

/// If `T(0.01) = 99.9 T(0.02)` (within [`RATIO_EQUALITY_TOLERANCE`]), then
/// `T(0.99) ≥ 0.1 T(0.02)`.
pub fn check_prop_4_1(chain: &Chain) -> Result<InequalityReport> {
    let table = SubsetTable::build(chain)?;
    Ok(prop_4_1_from_profile(&table.profile()))
}

pub fn prop_4_1_from_profile(profile: &HittingProfile) -> InequalityReport {
    const NAME: &str = "prop41";
    let t1 = profile.evaluate(0.01);
    let t2 = profile.evaluate(0.02);
    let t99 = profile.evaluate(0.99);
    if (t1 - 99.9 * t2).abs() > RATIO_EQUALITY_TOLERANCE * t2 {
        let ratio = t1 / t2;
        return InequalityReport::not_applicable(NAME, format!("T(0.01)/T(0.02) = {ratio}"));
    }
    InequalityReport::le(NAME, 0.1 * t2, t99).with_witness(format!("T(0.01)={t1},T(0.02)={t2},T(0.99)={t99}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::three_state_tight;
    use crate::random::random_chain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn symmetric() -> Chain {
        Chain::new(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap()
    }

    #[test]
    fn report_tolerance() {
        assert!(InequalityReport::le("x", 1.0 + 1e-10, 1.0).holds);
        assert!(!InequalityReport::le("x", 1.0 + 1e-8, 1.0).holds);
        let r = InequalityReport::not_applicable("x", "because".into());
        assert!(r.holds && !r.applicable);
        let line = InequalityReport::le("x", 1.0, 2.0).to_json_line();
        assert_eq!(line, r#"{"name":"x","lhs":1.0,"rhs":2.0,"slack":1.0,"holds":true,"witness":null}"#);
    }

    #[test]
    fn star_on_tight_chain_is_equality() {
        let c = three_state_tight(0.25, 0.05).unwrap();
        let r = check_star(&c, 0.25, 0.4).unwrap();
        assert!(r.holds());
        assert!((r.t_alpha - 4.0).abs() < 1e-9);
        assert!((r.middle.rhs - 4.0).abs() < 1e-9);
        assert!((r.right.rhs - 4.0).abs() < 1e-9);
        assert!(check_star(&c, 0.4, 0.25).is_err());
        assert!(check_star(&c, 0.2, 0.6).is_err());
    }

    #[test]
    fn star_symmetric_two_state() {
        let r = check_star(&symmetric(), 0.3, 0.5).unwrap();
        assert!((r.t_alpha - 2.0).abs() < 1e-12);
        assert!((r.middle.rhs - (2.0 + 14.0 / 3.0)).abs() < 1e-9);
        assert!(r.holds());
    }

    #[test]
    fn ratio_bound_examples() {
        let c = symmetric();
        let (a, b) = (c.set(&[0]).unwrap(), c.set(&[1]).unwrap());
        let r = check_ratio_bound(&c, &a, &b).unwrap();
        assert!(r.holds);
        assert!((r.rhs - 0.5).abs() < 1e-12 && r.slack.abs() < 1e-12);
        let r = check_ratio_bound(&c, &a, &a).unwrap();
        assert_eq!(r.rhs, 1.0);
        assert!(r.holds);
    }

    #[test]
    fn decomposition_of_singletons() {
        let c = symmetric();
        let d = auxiliary_decomposition(&c, &c.set(&[0]).unwrap(), &c.set(&[1]).unwrap()).unwrap();
        assert_eq!(d.q, vec![vec![1.0]]);
        assert_eq!(d.mu, vec![1.0, 0.0]);
        assert_eq!(d.nu, vec![0.0, 1.0]);
        let r = check_dist_inequality(&c, &d);
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12 && r.holds);
        let occ = check_occupation_identity(&c, &d, &c.set(&[0]).unwrap()).unwrap();
        assert!((occ.lhs - 2.0).abs() < 1e-12 && (occ.rhs - 2.0).abs() < 1e-12 && occ.holds);
        let occ = check_occupation_identity(&c, &d, &c.full_set()).unwrap();
        assert!((occ.lhs - d.cycle_time()).abs() < 1e-12);
        assert!(matches!(
            auxiliary_decomposition(&c, &c.set(&[0]).unwrap(), &c.full_set()),
            Err(Error::SetsOverlap)
        ));
    }

    #[test]
    fn decomposition_on_random_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let c = random_chain(&mut rng, 6);
        let (a, cc) = (c.set(&[0, 3]).unwrap(), c.set(&[1, 5]).unwrap());
        let d = auxiliary_decomposition(&c, &a, &cc).unwrap();
        assert!(d.q_row_error() <= 1e-10);
        assert!(d.mu_residual() <= 1e-10);
        assert!((d.nu.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        assert!(d.nu.iter().enumerate().all(|(x, &v)| v == 0.0 || cc.contains(x)));
        assert!(check_dist_inequality(&c, &d).holds);
        for r in check_ratio_chain(&c, &d).unwrap() {
            assert!(r.holds, "{r:?}");
        }
        let occ = check_occupation_identity(&c, &d, &a).unwrap();
        assert!(occ.holds);
        // occupation of A alone bounds the cycle: E_μ[τ] π(A) ≤ E_μ[τ_C]
        assert!(occ.rhs <= d.mu_to_c * (1.0 + 1e-12));
    }

    #[test]
    fn tight_chain_dist_has_positive_slack() {
        let c = three_state_tight(0.25, 0.05).unwrap();
        let d = auxiliary_decomposition(&c, &c.set(&[2]).unwrap(), &c.set(&[0]).unwrap()).unwrap();
        let r = check_dist_inequality(&c, &d);
        assert!(r.holds && r.slack > 0.0);
    }

    #[test]
    fn reducible_q_uses_a_closed_class() {
        let q = vec![vec![0.5, 0.5, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(stationary_of_closed_class(&q).unwrap(), vec![0.0, 1.0, 0.0]);
        let q = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let mu = stationary_of_closed_class(&q).unwrap();
        assert!((mu[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn distance_lemma_vacuous_and_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_chain(&mut rng, 5);
        let (a, b, cc) = (c.set(&[0]).unwrap(), c.set(&[1]).unwrap(), c.set(&[2]).unwrap());
        let r = check_lemma_4_2(&c, &a, &b, &cc, 1.0).unwrap();
        assert!(!r.applicable && r.holds);
    }

    #[test]
    fn ratio_conditional_vacuous_on_generic_chain() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = random_chain(&mut rng, 5);
        let r = check_prop_4_1(&c).unwrap();
        assert!(!r.applicable && r.holds);
        assert!(r.witness.unwrap().contains("T(0.01)/T(0.02)"));
    }
}
