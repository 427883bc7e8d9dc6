//! Computational core: root systems, Levi representation theory, cohomology
//! of homogeneous bundles on flag varieties, Legendre-moduli invariants and
//! the holonomy screener.

pub mod error;
pub mod homog;
pub mod legendre;
mod linalg;
pub mod notation;
pub mod repthy;
pub mod rootsys;
pub mod screener;
pub mod serde_int;

pub use error::{Error, Result};
pub use rootsys::{Chamber, RootSystem, Series, SimpleType, Weight};

/// Exact dimensions.
pub type Dim = num_bigint::BigInt;

/// Version string mixed into cache keys; bump when results may change.
pub const ENGINE_VERSION: &str = concat!("hololab-engine/", env!("CARGO_PKG_VERSION"), "/1");
