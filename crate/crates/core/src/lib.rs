//! Exact counts of invertible 3×3 matrices over `Z/n` grouped by permanent
//! residue, together with the exhaustive enumerators that check them.

pub mod closed_form;
pub mod error;
pub mod matrices;
pub mod modring;
pub mod oracle;
pub mod structure_maps;
pub mod verify;

pub use error::{Error, Result};
pub use matrices::{ClassLabel, Mat2, Mat3};
pub use modring::{Modulus, Residue};
