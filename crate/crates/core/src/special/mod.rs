//! Special functions and oscillatory kernels.

pub mod analysis;
pub mod bessel;
pub mod gamma;
pub mod kernels;
pub mod quad;

pub use bessel::{bessel_j, bessel_j_f64, bessel_split, olver_phase};
pub use kernels::{afe_weight, bessel_product_check, cal_j, e_function};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("requested accuracy not reachable at {0} bits")]
    PrecisionUnreachable(u32),
    #[error("argument {x} below the admissible minimum {min}")]
    DomainTooSmall { x: f64, min: f64 },
    #[error("quadratic form is singular")]
    SingularQuadraticForm,
    #[error("order must be a positive half-integer, got {0}")]
    BadOrder(f64),
    #[error("matrix does not have positive real eigenvalues")]
    NotPositive,
    #[error("domain error: {0}")]
    Domain(String),
}

/// A positive half-integer order `ℓ`, stored as the odd integer `2ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BesselOrder {
    twice: u32,
}

impl BesselOrder {
    pub fn new(ell: f64) -> Result<Self, SpecialError> {
        let t = 2.0 * ell;
        if !(ell > 0.0) || (t - t.round()).abs() > 1e-12 || (t.round() as i64) % 2 == 0 {
            return Err(SpecialError::BadOrder(ell));
        }
        Ok(Self { twice: t.round() as u32 })
    }

    /// The order `k − 3/2` attached to an even weight `k`.
    pub fn from_weight(k: u32) -> Result<Self, SpecialError> {
        if k < 2 {
            return Err(SpecialError::BadOrder(k as f64 - 1.5));
        }
        Ok(Self { twice: 2 * k - 3 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    /// The integer `n` with `ℓ = n + 1/2`.
    pub fn n(self) -> u32 {
        (self.twice - 1) / 2
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

/// Square roots `s1 <= s2` of the eigenvalues of a 2×2 real matrix with
/// positive spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPair {
    pub s1: f64,
    pub s2: f64,
}

impl SpectralPair {
    pub fn new(s1: f64, s2: f64) -> Result<Self, SpecialError> {
        if !(s1 > 0.0 && s2 > 0.0) {
            return Err(SpecialError::NotPositive);
        }
        Ok(Self { s1: s1.min(s2), s2: s1.max(s2) })
    }

    /// From a matrix `[[a, b], [c, d]]` through its trace and determinant.
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Result<Self, SpecialError> {
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = tr * tr - 4.0 * det;
        // small negative discriminants are rounding noise around a double eigenvalue
        if disc < -1e-12 * tr * tr || det <= 0.0 || tr <= 0.0 {
            return Err(SpecialError::NotPositive);
        }
        let r = disc.max(0.0).sqrt();
        let big = 0.5 * (tr + r);
        let small = det / big;
        Self::new(small.sqrt(), big.sqrt())
    }
}
