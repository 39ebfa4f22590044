//! Exact exponential sums, special-function kernels and numerical identity
//! checks around the Kitaoka summation formula for degree-two Siegel cusp
//! forms of full level.
//!
//! High-precision values use [`rug::Float`] and [`rug::Complex`]; heavy
//! quadrature kernels run in `f64` with explicit error estimates.

pub mod arith;
pub mod expsums;
pub mod kitaoka;
pub mod lfunc;
pub mod moment;
pub mod report;
pub mod siegel;
pub mod special;
pub mod verify;

/// Arbitrary-precision real number.
pub type HpReal = rug::Float;
/// Arbitrary-precision complex number.
pub type HpComplex = rug::Complex;

/// Default mantissa size in bits.
pub const DEFAULT_PREC: u32 = 128;
