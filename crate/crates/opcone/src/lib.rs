//! Numerical tools for the operator-system structure of a unital Hilbert space.
//!
//! A Hilbert space `H` with a distinguished unit vector `e` carries the cone
//! `𝔠 = {ζ = ζ*: ‖ζ₀‖ ≤ (ζ, e)}`. This crate builds the matrix levels over it,
//! tests membership in the classical quantizations, and works with positive maps
//! between such spaces and `C(X)`.

pub mod error;
pub mod finite;
pub mod function;
pub mod hilbert;
pub mod json;
pub mod linalg;
pub mod matrix;
pub mod pietsch;
pub mod states;
pub mod supports;

pub use error::{Error, Result};
pub use hilbert::{HVector, StatePoint, UnitalSpace};
pub use matrix::{HMatrix, Kind, MaxCertificate, MembershipVerdict, QuantumCone, Witness};

#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/cone.md")]
    pub mod cone {}
    #[doc = include_str!("../../../book/src/matrix_levels.md")]
    pub mod matrix_levels {}
    #[doc = include_str!("../../../book/src/function_spaces.md")]
    pub mod function_spaces {}
    #[doc = include_str!("../../../book/src/supports.md")]
    pub mod supports {}
    #[doc = include_str!("../../../book/src/pietsch.md")]
    pub mod pietsch {}
    #[doc = include_str!("../../../book/src/finite.md")]
    pub mod finite {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod states {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
