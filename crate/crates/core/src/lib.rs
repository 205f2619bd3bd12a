//! Input-output maps for a light pulse crossing a spin-polarized atomic
//! sample: closed-form kernels, a lattice oracle for the full coupled
//! equations, Laplace-mode analysis, and SQL-normalized variances for the
//! readout and memory protocols.

pub mod config;
pub mod error;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod records;
pub mod run;
pub mod special;
pub mod spectral;
pub mod transfer;
pub mod variance;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/dispersion.md")]
    mod dispersion {}
    #[doc = include_str!("../../../book/src/variances.md")]
    mod variances {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
