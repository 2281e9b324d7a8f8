//! Truncated single-mode Fock space: states, canonical operators and
//! Hermitian eigendecomposition.

pub mod eigen;
pub mod operator;
pub mod state;
pub mod tridiagonal;

pub use eigen::{eigh, EigenDecomposition};
pub use operator::{op_annihilate, op_number, op_x, op_y, FockOperator};
pub use state::{default_coherent_dim, expectation, make_coherent, make_vacuum, FockState, COHERENT_TAIL_TOL};
pub use tridiagonal::SymTridiagonal;
