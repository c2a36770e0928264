//! Generalized Grover search where both the Grover reflection and the oracle
//! invert the phase of several states.
//!
//! The Hamiltonian `H = P_S + P_T` of a source subspace `S` (spanned by `N`
//! orthonormal vectors) and a target set `T` (`M` basis states) splits into
//! 2×2 blocks with energies `1 ± c_n`, where the `c_n` are the cosines of the
//! principal angles between the two subspaces. This crate computes that
//! structure directly, evolves states under it, runs the gate-based Grover
//! iteration, and simulates the phase-estimation search that reaches the
//! target space without Grover iteration.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod generate;
pub mod instance;
pub mod numerics;
pub mod qpe;
pub mod report;
pub mod seed;
pub mod state;
pub mod structure;

pub use error::{Error, Result};
pub use generate::{Family, InstanceRecipe};
pub use instance::{make_instance, SearchInstance};
pub use num_complex::Complex64;
pub use state::StateVector;
pub use structure::{pair_spectrum, PairMode, PairSpectrum};
