//! Algebraic Bethe ansatz for the inhomogeneous arbitrary-spin XXZ chain with a
//! quasiperiodic twist, including the root-of-unity construction of degenerate
//! transfer-matrix eigenvectors, with exact-diagonalization cross-checks at desk
//! scale.

pub mod bethe;
pub mod chain;
pub mod config;
pub mod error;
pub mod mat;
pub mod oracle;
pub mod poly;
pub mod qalgebra;
pub mod report;
pub mod roots_of_unity;
pub mod run;
pub mod scalar;

pub use chain::{ChainSpec, Site, DEFAULT_DIM_CAP};
pub use error::{Error, Result};
pub use scalar::{GammaCtx, Jet1, JetGammaCtx, QContext, C64};
