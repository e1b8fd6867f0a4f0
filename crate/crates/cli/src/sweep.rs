//! `check all`: every verifier over one chain or a seeded batch.

use hitset::extremal::SubsetTable;
use hitset::random::random_chain;
use hitset::verifiers::{
    auxiliary_decomposition, check_dist_inequality, check_occupation_identity, check_ratio_bound_all_pairs,
    check_ratio_chain, check_star_profile, prop_4_1_from_profile, AllHittingVectors,
};
use hitset::{Chain, InequalityReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::commands::{counted_sets, summary, Printer};
use crate::{AllArgs, Failure};

/// Grid points `0.05, 0.10, ..., 0.50` for `α < β`.
const STAR_GRID: usize = 10;

#[derive(Default)]
pub struct Tally {
    star: (usize, usize),
    ratio: (usize, usize),
    dist: (usize, usize),
    occupation: (usize, usize),
    prop41: (usize, usize),
}

fn record(p: &mut Printer, counter: &mut (usize, usize), r: InequalityReport, chain_index: u64) {
    counter.0 += 1;
    if !r.holds {
        counter.1 += 1;
        let witness = format!("chain={chain_index},{}", r.witness.as_deref().unwrap_or(""));
        p.report(&r.with_witness(witness));
    }
}

fn tally_chain(p: &mut Printer, tally: &mut Tally, chain: &Chain, chain_index: u64) -> Result<(), Failure> {
    let table = SubsetTable::build(chain)?;
    let profile = table.profile();
    for i in 1..=STAR_GRID {
        for j in i + 1..=STAR_GRID {
            let (alpha, beta) = (i as f64 / 20.0, j as f64 / 20.0);
            let star = check_star_profile(&profile, alpha, beta)?;
            for r in star.reports() {
                record(p, &mut tally.star, r.clone(), chain_index);
            }
        }
    }

    let vectors = AllHittingVectors::build(chain)?;
    let (violations, checked) = check_ratio_bound_all_pairs(chain, &vectors);
    tally.ratio.0 += checked;
    tally.ratio.1 += violations.len();
    for r in violations {
        let witness = format!("chain={chain_index},{}", r.witness.as_deref().unwrap_or(""));
        p.report(&r.with_witness(witness));
    }

    let full = (1u64 << chain.n()) - 1;
    let counted = counted_sets(chain)?;
    for a in 1..full {
        let rest = full & !a;
        // nonempty submasks of the complement of A
        let mut c = rest;
        while c != 0 {
            let decomp = auxiliary_decomposition(chain, &chain.set_from_mask(a), &chain.set_from_mask(c))?;
            record(p, &mut tally.dist, check_dist_inequality(chain, &decomp), chain_index);
            for r in check_ratio_chain(chain, &decomp)? {
                record(p, &mut tally.dist, r, chain_index);
            }
            for s in &counted {
                record(p, &mut tally.occupation, check_occupation_identity(chain, &decomp, s)?, chain_index);
            }
            c = (c - 1) & rest;
        }
    }

    record(p, &mut tally.prop41, prop_4_1_from_profile(&profile), chain_index);
    Ok(())
}

fn print_tally(p: &mut Printer, tally: &Tally) {
    for (name, (checked, violations)) in [
        ("star", tally.star),
        ("ratio", tally.ratio),
        ("dist", tally.dist),
        ("occupation", tally.occupation),
        ("prop41", tally.prop41),
    ] {
        summary(p, name, checked, violations);
    }
}

pub fn check_chain(p: &mut Printer, chain: &Chain, chain_index: u64) -> Result<(), Failure> {
    let mut tally = Tally::default();
    tally_chain(p, &mut tally, chain, chain_index)?;
    print_tally(p, &tally);
    Ok(())
}

/// Chains are drawn one after another from a single ChaCha8 stream seeded
/// with `seed`; every entry is uniform on (0, 1] before row normalization.
pub fn random_sweep(p: &mut Printer, args: &AllArgs) -> Result<(), Failure> {
    if !(2..=AllHittingVectors::MAX_STATES).contains(&args.states) {
        return Err(Failure::Input(format!(
            "--states {} must lie in 2..={}",
            args.states,
            AllHittingVectors::MAX_STATES
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut tally = Tally::default();
    for i in 0..args.random.unwrap_or(0) {
        let chain = random_chain(&mut rng, args.states);
        tally_chain(p, &mut tally, &chain, i)?;
    }
    print_tally(p, &tally);
    Ok(())
}
