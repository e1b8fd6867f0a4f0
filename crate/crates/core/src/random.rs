//! Reproducible random chains for sweeps.
//!
//! Dense chains draw every entry uniformly from (0, 1] and normalize each
//! row, so all entries are strictly positive and the chain is irreducible.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chain::Chain;

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            // 1 - U lies in (0, 1]
            let row: Vec<f64> = (0..n).map(|_| 1.0 - rng.gen::<f64>()).collect();
            let sum: f64 = row.iter().sum();
            row.into_iter().map(|v| v / sum).collect()
        })
        .collect()
}

pub fn random_chain<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Chain {
    Chain::new(random_matrix(rng, n)).expect("positive matrix is irreducible")
}

/// Dense random chain averaged with the identity, so every diagonal entry
/// is at least 1/2.
pub fn random_lazy_chain<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Chain {
    random_chain(rng, n).lazy()
}

/// Sparse irreducible chain: a random Hamiltonian cycle plus each other
/// edge kept with probability `density`. Weights are uniform before row
/// normalization, so hitting times spread over a much wider range than in
/// the dense case.
pub fn random_sparse_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, density: f64) -> Chain {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        let (x, y) = (order[i], order[(i + 1) % n]);
        p[x][y] = 1.0 - rng.gen::<f64>();
    }
    for row in p.iter_mut() {
        for v in row.iter_mut() {
            if *v == 0.0 && rng.gen_bool(density) {
                *v = 1.0 - rng.gen::<f64>();
            }
        }
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Chain::new(p).expect("cycle keeps the chain irreducible")
}
