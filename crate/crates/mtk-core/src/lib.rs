//! Executable multitensor calculus over finite data.
//!
//! The crate builds multitensors from finite multicategories, evaluates the
//! Gamma monad on enriched graphs over a fixed object set, computes
//! coequalisers of monad algebras by the sequential construction (checked
//! against a congruence-closure oracle), lifts multitensors to functor operads
//! on algebras of their unary part by two routes, and compares the lift with
//! convolution on copresheaves.

pub mod base;
pub mod monad;
pub mod multicat;
pub mod multitensor;
pub mod error;
pub mod lifting;
pub mod convolution;
pub mod suites;

pub use error::{MtkError, Result};
