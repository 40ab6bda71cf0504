//! Concrete Lawvere theories on finite carriers.
//!
//! Every theory here is materialized as a clone: for each arity `n` the set of
//! its `n`-ary operations is stored as flat tables `Aⁿ → A`. On top of that
//! substrate the crate computes commutants and double commutants by
//! constraint-propagated enumeration, decides commutativity, balance and
//! saturation on bounded arities, and builds the functional distribution
//! monad `D(V)` of a functional-analytic context for finite sets `V`.
//!
//! Module map:
//!
//! - [`finset`]: tuple encoding, operation tables, superposition and the
//!   enumeration kernel.
//! - [`rig`]: finite rigs, opposites, sub-rigs, matrices and the registry.
//! - [`theory`]: concrete theories (full, initial, matrix, affine core,
//!   pointed modules, clone closures, commutants).
//! - [`commutant`]: homomorphism checks, commutation and the
//!   commutative/balanced/saturated verdicts.
//! - [`distribution`]: contexts, `D(V)`, unit/multiplication/functorial
//!   action, monad laws, theorem checks and filter classification.

pub mod commutant;
pub mod distribution;
mod error;
pub mod finset;
pub mod rig;
pub mod theory;

pub use error::{Error, Result};

/// Size guards applied to every enumeration and slice materialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest naive candidate count `A^(Aⁿ)` searched without a unary or
    /// binary generator available to seed propagation.
    pub max_candidates: u128,
    /// Largest table length `Aⁿ` the enumerator accepts.
    pub max_table_len: usize,
    /// Largest number of compiled constraint instances.
    pub max_instances: usize,
    /// Largest slice (number of operations of one arity) materialized.
    pub max_slice: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_candidates: 1u128 << 32,
            max_table_len: 1 << 16,
            max_instances: 1 << 26,
            max_slice: 1 << 20,
        }
    }
}

/// Default arity bound for a carrier: 3 up to size 3, 2 for size 4, 1 beyond.
pub fn default_max_arity(carrier: usize) -> usize {
    match carrier {
        0..=3 => 3,
        4 => 2,
        _ => 1,
    }
}
