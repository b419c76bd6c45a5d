//! Exact spectra, free-fermion analytics, driven dynamics and disorder
//! spectroscopy for a laser-driven Rydberg gas on a ring lattice.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod disorder;
pub mod dynamics;
pub mod error;
pub mod fermion;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod params;
pub mod spin;
pub mod symmetry;

pub use basis::{Frame, StateVector};
pub use error::{Error, Result};
pub use operator::OperatorMatrix;
pub use params::SystemParams;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/symmetric-sector.md")]
    mod symmetric_sector {}
    #[doc = include_str!("../../../book/src/fermions.md")]
    mod fermions {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/disorder.md")]
    mod disorder {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
