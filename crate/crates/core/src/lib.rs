//! Finite-state transducers as rational homeomorphisms of Cantor space.
//!
//! The crate implements the calculus behind the groups `O_n`, `TO_n`, `L_n`
//! and `O_n^x` of minimal, core, strongly synchronizing transducers: word
//! and cone arithmetic, minimization, synchronization and cores, the group
//! product and inverse, membership predicates, the invariants `m`, `s` and
//! `Π`, explicit generator families, the marker embedding into `O_2`, and a
//! bounded enumeration of small machines.

pub mod cantor;
pub mod enumeration;
pub mod error;
pub mod families;
pub mod format;
pub mod group;
pub mod invariants;
pub mod marker;
pub mod minimize;
pub mod random;
pub mod suites;
pub mod sync;
pub mod transducer;
pub mod words;

pub use error::{Error, Result};
pub use group::GroupElement;
pub use transducer::{InitialTransducer, StateId, Transducer};
pub use words::{EpWord, Letter, Word};

/// Global depth cap from `THN_MAX_DEPTH`, when set to a positive integer.
pub fn max_depth_override() -> Option<usize> {
    std::env::var("THN_MAX_DEPTH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
}
