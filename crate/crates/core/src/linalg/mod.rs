//! Exact linear algebra over the integers and the rationals.

pub mod qmat;
pub mod sparse;
pub mod zmat;

pub use qmat::QMatrix;
pub use sparse::{kernel_of, rank_of, Echelon, SparseQ};
pub use zmat::{smith_invariants, ZSparse};
