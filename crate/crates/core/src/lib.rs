//! Numerics for the one-parameter family of `d ⊗ d` states that commute with
//! every `U ⊗ U`, their partial transposes, and the search for Schmidt-rank-2
//! vectors that witness distillability of many copies.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! anything that touches the filesystem live in the `nppt` companion crate.
//!
//! Index convention used by every tensor operation: for a single pair the
//! basis vector `|i⟩_A ⊗ |j⟩_B` has index `i * d_B + j`; for `N` copies the
//! pair of copy 1 is the slowest-varying index group. See [`BipartiteDims`].
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod math;

pub mod bipartite;
pub mod distill;
pub mod eigen;
pub mod linalg;
pub mod random;
pub mod twirl;
pub mod werner;

pub use bipartite::{compress, partial_transpose, BipartiteDims, HermitianOperator, Isometry, Side};
pub use eigen::{hermitian_spectrum, EigenConfig, HermitianSpectrum};
pub use error::{Error, Result};
pub use linalg::{kron, tensor_power, ComplexMatrix, C64};
pub use random::{haar_unitary, SeededRng};
pub use werner::{ProjectorSet, Region, StandardState};
