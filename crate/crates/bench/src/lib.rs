//! Fixed inputs shared by the benchmarks.

use hitset::random::random_chain;
use hitset::Chain;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A dense random chain on `n` states, identical across runs.
pub fn fixture(n: usize) -> Chain {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    random_chain(&mut rng, n)
}

/// A ring of `n` states with holding probability 1/2: slow to hit, so
/// simulated trajectories are long.
pub fn lazy_ring(n: usize) -> Chain {
    let p = (0..n)
        .map(|x| {
            let mut row = vec![0.0; n];
            row[x] += 0.5;
            row[(x + 1) % n] += 0.25;
            row[(x + n - 1) % n] += 0.25;
            row
        })
        .collect();
    Chain::new(p).expect("ring is irreducible")
}
