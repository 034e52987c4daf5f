//! Dense complex linear algebra.

mod assignment;
mod eig;
mod expm;
mod lu;
mod matrix;

pub use assignment::min_cost_assignment;
pub use eig::{compare_complex, eig, eigvals, SpectralDecomposition};
pub use expm::{exp_general, expm};
pub(crate) use expm::{apply_exp, Workspace};
pub use lu::{condition_one_norm, determinant, inverse, Lu};
pub use matrix::{ComplexMatrix, C64, I, ONE, ZERO};
