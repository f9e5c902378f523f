//! Exact computations on Hilbert schemes of points of the node `xy = 0`:
//! ideals of the truncated node ring, their classification, local charts and
//! singularity models, flag Hilbert schemes, the universal relative family,
//! a brute-force finite-field oracle and the combinatorial models.

pub mod charts;
pub mod coeffs;
pub mod combin;
pub mod error;
pub mod flags;
pub mod ideals;
pub mod linalg;
pub mod node_ring;
pub mod oracle;
pub mod par;
pub mod parse;
pub mod poly;
pub mod suites;
pub mod universal;

pub use coeffs::{ArtinScalar, CoeffRing, Field, RatFn, Scalar};
pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
