use std::fmt::Write as _;
use std::io::Read;

use hitset::constructors::{
    dyadic_discretize, l_shaped_doubling_n, three_state_tight, two_state_counterexample,
};
use hitset::extremal::{t_alpha, SubsetTable};
use hitset::format::format_g17;
use hitset::hitting::expected_occupation;
use hitset::mixing::{cesaro_mixing_time, mixing_report};
use hitset::sim::{simulate_hitting, simulate_occupation};
use hitset::verifiers::{
    auxiliary_decomposition, check_dist_inequality, check_lemma_4_2, check_occupation_identity,
    check_prop_4_1, check_ratio_bound, check_ratio_bound_all_pairs, check_ratio_chain, check_star,
    AllHittingVectors,
};
use hitset::{Chain, HittableStepSpec, InequalityReport, StateSet};
use serde_json::json;

use crate::{Check, Cli, Command, Construct, Failure, Format, Shape, SimulateArgs};

type Outcome = Result<(), Failure>;

/// Collects output and tracks whether any check failed.
pub struct Printer<'a> {
    pub format: Format,
    pub out: &'a mut String,
    csv_header: bool,
    pub violated: bool,
}

impl<'a> Printer<'a> {
    pub fn new(format: Format, out: &'a mut String) -> Self {
        Printer { format, out, csv_header: false, violated: false }
    }

    pub fn json(&mut self, value: &serde_json::Value) {
        self.out.push_str(&value.to_string());
        self.out.push('\n');
    }

    pub fn line(&mut self, text: &str) {
        self.out.push_str(text);
        self.out.push('\n');
    }

    pub fn report(&mut self, r: &InequalityReport) {
        self.violated |= !r.holds;
        match self.format {
            Format::Json => self.line(&r.to_json_line()),
            Format::Csv => {
                if !self.csv_header {
                    self.line("name,lhs,rhs,slack,holds,witness");
                    self.csv_header = true;
                }
                let witness = r.witness.as_deref().unwrap_or("").replace('"', "\"\"");
                let _ = writeln!(
                    self.out,
                    "{},{},{},{},{},\"{}\"",
                    r.name,
                    format_g17(r.lhs),
                    format_g17(r.rhs),
                    format_g17(r.slack),
                    r.holds,
                    witness
                );
            }
        }
    }

    fn finish(&self) -> Outcome {
        if self.violated {
            Err(Failure::Violated)
        } else {
            Ok(())
        }
    }
}

pub fn run(cli: &Cli, out: &mut String) -> Outcome {
    let mut p = Printer::new(cli.format, out);
    match &cli.command {
        Command::Construct(c) => {
            if cli.chain.is_some() {
                return Err(Failure::Input("construct does not take --chain".into()));
            }
            let chain = construct(c)?;
            p.line(&chain.to_json());
            Ok(())
        }
        Command::Check(crate::Check::All(args)) if args.random.is_some() => {
            if cli.chain.is_some() {
                return Err(Failure::Input("pass either --chain or --random, not both".into()));
            }
            crate::sweep::random_sweep(&mut p, args)?;
            p.finish()
        }
        command => {
            let chain = load_chain(cli)?;
            run_on_chain(&mut p, &chain, command)?;
            p.finish()
        }
    }
}

fn load_chain(cli: &Cli) -> Result<Chain, Failure> {
    let text = match &cli.chain {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?,
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Input(format!("cannot read standard input: {e}")))?;
            text
        }
    };
    if text.trim().is_empty() {
        return Err(Failure::Input("no chain given: pass --chain or pipe chain JSON in".into()));
    }
    Ok(Chain::from_json(&text)?)
}

/// Parses `"0,2"` or `"v_1,v_2"` into a set.
pub fn parse_set(chain: &Chain, text: &str) -> Result<StateSet, Failure> {
    let states = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| chain.state_index(s))
        .collect::<hitset::Result<Vec<_>>>()?;
    if states.is_empty() {
        return Err(Failure::Input(format!("empty state set {text:?}")));
    }
    Ok(StateSet::from_states(chain, states)?)
}

fn set_labels(chain: &Chain, set: &StateSet) -> Vec<String> {
    set.iter().map(|s| chain.label(s)).collect()
}

fn construct(c: &Construct) -> Result<Chain, Failure> {
    Ok(match c {
        Construct::ThreeState { alpha, eps } => three_state_tight(*alpha, *eps)?,
        Construct::TwoState { gamma, big_n } => two_state_counterexample(*gamma, *big_n)?,
        Construct::Lshaped { spec, doublings } => {
            let text = std::fs::read_to_string(spec)
                .map_err(|e| Failure::Input(format!("cannot read {}: {e}", spec.display())))?;
            let spec = HittableStepSpec::from_json(&text)?;
            l_shaped_doubling_n(&spec, *doublings)?.chain
        }
        Construct::Dyadic { n, big_n, shape, cap, exponent, doublings } => {
            let spec = match shape {
                Shape::CappedInverse => {
                    if !(*cap >= 1.0) {
                        return Err(Failure::Input(format!("cap = {cap} must be at least 1")));
                    }
                    let shift = cap.min(2.0) - 1.0;
                    dyadic_discretize(|a| (1.0 / a).min(*cap) - shift, *n, *big_n)?
                }
                Shape::Power => {
                    if !(*exponent > 0.0 && *exponent <= 1.0) {
                        return Err(Failure::Input(format!("exponent = {exponent} must lie in (0, 1]")));
                    }
                    dyadic_discretize(|a| (2.0 * a).powf(-exponent), *n, *big_n)?
                }
            };
            l_shaped_doubling_n(&spec, *doublings)?.chain
        }
    })
}

fn run_on_chain(p: &mut Printer, chain: &Chain, command: &Command) -> Outcome {
    match command {
        Command::Stationary => {
            let pi = chain.pi();
            match p.format {
                Format::Json => p.json(&json!({ "pi": pi, "residual": chain.residual() })),
                Format::Csv => {
                    p.line("state,pi");
                    for (x, v) in pi.iter().enumerate() {
                        p.line(&format!("{},{}", chain.label(x), format_g17(*v)));
                    }
                }
            }
        }
        Command::Hit { target } => {
            let set = parse_set(chain, target)?;
            let h = hitset::hitting::expected_hitting_times(chain, &set)?;
            match p.format {
                Format::Json => p.json(&json!({
                    "target": set_labels(chain, &set),
                    "h": h.h,
                    "max": h.max(),
                    "argmax": chain.label(h.argmax()),
                    "residual": h.residual(chain),
                })),
                Format::Csv => {
                    p.line("state,h");
                    for (x, v) in h.h.iter().enumerate() {
                        p.line(&format!("{},{}", chain.label(x), format_g17(*v)));
                    }
                }
            }
        }
        Command::Profile => {
            let profile = SubsetTable::build(chain)?.profile();
            match p.format {
                Format::Json => p.json(&json!({ "breakpoints": profile.breakpoints() })),
                Format::Csv => p.out.push_str(&profile.to_csv()),
            }
        }
        Command::Talpha { alpha } => {
            let w = t_alpha(chain, *alpha)?;
            match p.format {
                Format::Json => p.json(&json!({
                    "alpha": w.alpha,
                    "value": w.value,
                    "set": set_labels(chain, &w.set),
                    "start": chain.label(w.start),
                })),
                Format::Csv => {
                    p.line("alpha,value");
                    p.line(&format!("{},{}", format_g17(w.alpha), format_g17(w.value)));
                }
            }
        }
        Command::Tprod => {
            let table = SubsetTable::build(chain)?;
            let (value, mask, start) = table.t_prod();
            let t_half = table.profile().evaluate(0.5);
            match p.format {
                Format::Json => p.json(&json!({
                    "t_prod": value,
                    "set": set_labels(chain, &chain.set_from_mask(mask)),
                    "start": chain.label(start),
                    "t_half": t_half,
                })),
                Format::Csv => {
                    p.line("t_prod,t_half");
                    p.line(&format!("{},{}", format_g17(value), format_g17(t_half)));
                }
            }
        }
        Command::Mix { cap } => {
            let report = mixing_report(chain, *cap);
            match p.format {
                Format::Json => p.json(&serde_json::to_value(&report).expect("report serializes")),
                Format::Csv => {
                    p.line("t,worst_tv");
                    for (t, d) in &report.worst_tv_at_t {
                        p.line(&format!("{t},{}", format_g17(*d)));
                    }
                }
            }
        }
        Command::Ces { cap } => {
            let t_ces = cesaro_mixing_time(chain, *cap);
            match p.format {
                Format::Json => p.json(&json!({ "t_ces": t_ces })),
                Format::Csv => {
                    p.line("t_ces");
                    p.line(&t_ces.value().map_or_else(|| "NA".to_string(), |t| t.to_string()));
                }
            }
        }
        Command::Check(check) => run_check(p, chain, check)?,
        Command::Simulate(args) => simulate(p, chain, args)?,
        Command::Construct(_) => unreachable!("handled before loading a chain"),
    }
    Ok(())
}

fn run_check(p: &mut Printer, chain: &Chain, check: &Check) -> Outcome {
    match check {
        Check::Star { alpha, beta } => {
            let star = check_star(chain, *alpha, *beta)?;
            for r in star.reports() {
                p.report(r);
            }
        }
        Check::Ratio { a: Some(a), c: Some(c) } => {
            let r = check_ratio_bound(chain, &parse_set(chain, a)?, &parse_set(chain, c)?)?;
            p.report(&r);
        }
        Check::Ratio { a: None, c: None } => {
            let table = AllHittingVectors::build(chain)?;
            let (violations, checked) = check_ratio_bound_all_pairs(chain, &table);
            for r in &violations {
                p.report(r);
            }
            summary(p, "ratio", checked, violations.len());
        }
        Check::Ratio { .. } => return Err(Failure::Input("give both --a and --c, or neither".into())),
        Check::Dist { a, c } => {
            let decomp = auxiliary_decomposition(chain, &parse_set(chain, a)?, &parse_set(chain, c)?)?;
            p.report(&check_dist_inequality(chain, &decomp));
            for r in &check_ratio_chain(chain, &decomp)? {
                p.report(r);
            }
        }
        Check::Occupation { a, c, s } => {
            let decomp = auxiliary_decomposition(chain, &parse_set(chain, a)?, &parse_set(chain, c)?)?;
            let sets = match s {
                Some(s) => vec![parse_set(chain, s)?],
                None => counted_sets(chain)?,
            };
            for s in &sets {
                let r = check_occupation_identity(chain, &decomp, s)?;
                let tag = format!("S={{{}}}", set_labels(chain, s).join(","));
                p.report(&if r.witness.is_none() { r.with_witness(tag) } else { r });
            }
        }
        Check::Lemma42 { a, b, c, t } => {
            let (a, b, c) = (parse_set(chain, a)?, parse_set(chain, b)?, parse_set(chain, c)?);
            p.report(&check_lemma_4_2(chain, &a, &b, &c, *t)?);
        }
        Check::Prop41 => p.report(&check_prop_4_1(chain)?),
        Check::All(_) => crate::sweep::check_chain(p, chain, 0)?,
    }
    Ok(())
}

/// Every singleton and the full state space.
pub fn counted_sets(chain: &Chain) -> hitset::Result<Vec<StateSet>> {
    let mut sets = (0..chain.n()).map(|x| StateSet::from_states(chain, [x])).collect::<hitset::Result<Vec<_>>>()?;
    sets.push(chain.full_set());
    Ok(sets)
}

pub fn summary(p: &mut Printer, check: &str, checked: usize, violations: usize) {
    if p.format == Format::Json {
        p.json(&json!({ "check": check, "checked": checked, "violations": violations }));
    }
}

fn simulate(p: &mut Printer, chain: &Chain, args: &SimulateArgs) -> Outcome {
    let (estimate, exact) = match (&args.target, &args.avoid, &args.count) {
        (Some(target), None, None) => {
            let start = args
                .start
                .as_deref()
                .ok_or_else(|| Failure::Input("hitting mode needs --start".into()))?;
            let start = chain.state_index(start)?;
            let target = parse_set(chain, target)?;
            let exact = hitset::hitting::expected_hitting_times(chain, &target)?.h[start];
            (simulate_hitting(chain, start, &target, args.samples, args.seed, args.step_cap)?, exact)
        }
        (None, Some(avoid), Some(count)) => {
            let (avoid, count) = (parse_set(chain, avoid)?, parse_set(chain, count)?);
            let start = match &args.start {
                Some(s) => {
                    let mut point = vec![0.0; chain.n()];
                    point[chain.state_index(s)?] = 1.0;
                    point
                }
                None => chain.pi().to_vec(),
            };
            let exact = expected_occupation(chain, &avoid, &count, &start)?;
            let estimate =
                simulate_occupation(chain, &start, &avoid, &count, args.samples, args.seed, args.step_cap)?;
            (estimate, exact)
        }
        _ => return Err(Failure::Input("give --target, or both --avoid and --count".into())),
    };
    match p.format {
        Format::Json => p.json(&json!({
            "mean": estimate.mean,
            "std_error": estimate.std_error,
            "n_samples": estimate.n_samples,
            "seed": estimate.seed,
            "exact": exact,
            "z_score": estimate.z_score(exact),
        })),
        Format::Csv => {
            p.line("mean,std_error,n_samples,seed,exact");
            p.line(&format!(
                "{},{},{},{},{}",
                format_g17(estimate.mean),
                format_g17(estimate.std_error),
                estimate.n_samples,
                estimate.seed,
                format_g17(exact)
            ));
        }
    }
    Ok(())
}
