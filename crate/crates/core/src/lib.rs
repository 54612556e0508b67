//! Simulation and exact numerics for geometric last passage percolation,
//! discrete-time parallel TASEP and the multi-layer discrete PNG ensemble.
//!
//! Module map:
//! - [`weights`]: pure, seeded geometric weight fields.
//! - [`lattice`]: scaling constants, down-right paths, limit shapes and
//!   hypothesis validators.
//! - [`lpp`]: dynamic-programming engines for every LPP variant.
//! - [`tasep`]: height-function TASEP and its coupling to LPP.
//! - [`png`]: the PNG line ensemble, its heat-bath sampler and bridge estimates.
//! - [`exact`]: Toeplitz CDFs, the Airy function, Tracy-Widom laws and the
//!   extended Airy kernel.
//! - [`stats`]: empirical distributions and theorem-level estimators.
//! - [`experiments`]: the named experiment catalog used by the CLI.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod lattice;
pub mod lpp;
pub mod png;
pub mod rng;
pub mod stats;
pub mod tasep;
pub mod weights;

pub use error::{Error, Result};
