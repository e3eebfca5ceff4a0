//! Exact desk-scale computations connecting minimum-degree matching
//! thresholds in k-uniform hypergraphs with tail bounds for sums of
//! i.i.d. mean-1 nonnegative random variables.
//!
//! Everything is computed in exact rational arithmetic: integer and
//! fractional matchings, LP duality certificates, closed-form threshold
//! constants, convolution tails, and both directions of the reduction
//! between fractional covers and discrete distributions.

pub mod bridge;
pub mod error;
pub mod feige;
pub mod fraclp;
pub mod hypergraph;
pub mod rat;
pub mod thresholds;
pub mod verify;

pub use error::Error;
pub use rat::Rat;

pub type Result<T> = std::result::Result<T, Error>;
