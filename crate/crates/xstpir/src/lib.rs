//! X-secure T-private information retrieval built from evaluation codes on
//! rational and Hermitian curves.
//!
//! The crate splits into layers:
//!
//! - [`gf`], [`poly`], [`linalg`]: exact finite-field scalars, univariate
//!   polynomials, and Gaussian elimination.
//! - [`curve`]: points and function evaluation on the rational and Hermitian
//!   curves, with one-point pole-order bases.
//! - [`scheme`]: full scheme construction for both curves, the closed-form
//!   maximum-rate calculators, and canonical serialization.
//! - [`protocol`]: the storage/query/answer/decode runtime.
//! - [`verify`]: computational checks of every decodability, security, and
//!   privacy condition a built scheme must satisfy.

pub mod curve;
pub mod gf;
pub mod linalg;
pub mod poly;
pub mod protocol;
pub mod scheme;
pub mod verify;
