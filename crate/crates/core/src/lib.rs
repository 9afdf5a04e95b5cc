//! Onset-of-interaction response of Rényi entropies and n-coherent information.
//!
//! Start with [`onset`] for durability, exposure and the perturbative second
//! derivatives; [`channels`] holds the exact evolutions they are checked
//! against.
// `!(x > y)` rejects NaN along with the failing comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod onset;
pub mod qmat;
pub mod random;
pub mod renyi;
pub mod statespace;
pub mod verify;

pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, ComplexVector, DensityMatrix, HermitianOperator};
pub use renyi::RenyiIndex;
