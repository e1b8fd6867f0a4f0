//! Extremal set hitting times for finite irreducible Markov chains.
//!
//! For `α ∈ (0, 1)`, `T(α)` is the largest expected hitting time
//! `E_x[τ_A]` over start states `x` and sets `A` with `π(A) ≥ α`. This
//! crate computes `T(α)` and its whole profile by subset enumeration,
//! related quantities (`t_prod`, mixing and Cèsaro mixing times), builds
//! chains that make the two-sided bound
//!
//! ```text
//! T(α) ≤ T(β) + (1/α - 1) T(1 - β) ≤ T(β) / α,   0 < α < β ≤ 1/2
//! ```
//!
//! tight, and checks that bound and its supporting inequalities
//! numerically. A seeded Monte Carlo simulator provides an independent
//! cross-check of the linear-algebra results.
//!
//! ```
//! use hitset::{constructors::three_state_tight, extremal::t_alpha};
//!
//! let chain = three_state_tight(0.25, 0.05).unwrap();
//! let t = t_alpha(&chain, 0.25).unwrap();
//! assert!((t.value - 4.0).abs() < 1e-9);
//! ```

pub mod chain;
pub mod constructors;
pub mod error;
pub mod extremal;
pub mod format;
pub mod hitting;
pub mod mixing;
pub mod random;
pub mod sim;
pub mod verifiers;

pub use chain::{Chain, ChainFile, StateSet};
pub use constructors::{ErrorSet, HittableStepSpec, LShapedChain};
pub use error::{Error, Result};
pub use extremal::{ExtremalWitness, HittingProfile, SubsetTable};
pub use hitting::{HittingDistributionMatrix, HittingVector};
pub use mixing::{Horizon, MixingReport};
pub use sim::SimEstimate;
pub use verifiers::{AuxiliaryDecomposition, InequalityReport};
