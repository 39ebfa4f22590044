//! Numerical checks of two analytic tools: the non-stationary phase bound
//! for `∫ w(t) e^{ih(t)} dt` and the quadratic-phase Parseval identity in two
//! variables.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::quad::{adaptive, gauss_legendre};
use super::SpecialError;

// ---------------------------------------------------------------------------
// Non-stationary phase
// ---------------------------------------------------------------------------

/// Smooth weights supported on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightProfile {
    /// `exp(1 − 1/(1 − s²))` with `s` the affine image of `t` in `(−1, 1)`.
    Bump { lo: f64, hi: f64 },
    /// A bump multiplied by `cos(κ t)`.
    ModulatedBump { lo: f64, hi: f64, kappa: f64 },
    /// A bump multiplied by `1 + t²`.
    PolynomialBump { lo: f64, hi: f64 },
    /// A bump raised to the power `q`.
    PoweredBump { lo: f64, hi: f64, q: f64 },
}

impl WeightProfile {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Bump { lo, hi }
            | Self::ModulatedBump { lo, hi, .. }
            | Self::PolynomialBump { lo, hi }
            | Self::PoweredBump { lo, hi, .. } => (lo, hi),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        let s = (2.0 * t - lo - hi) / (hi - lo);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let b = (1.0 - 1.0 / (1.0 - s * s)).exp();
        match *self {
            Self::Bump { .. } => b,
            Self::ModulatedBump { kappa, .. } => b * (kappa * t).cos(),
            Self::PolynomialBump { .. } => b * (1.0 + t * t),
            Self::PoweredBump { q, .. } => b.powf(q),
        }
    }
}

/// Phase functions `h(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseProfile {
    /// `R t`
    Linear { r: f64 },
    /// `R t + c t²`
    Quadratic { r: f64, c: f64 },
    /// `R t + sin t`
    Sine { r: f64 },
    /// `R (t + t³/3)`
    Cubic { r: f64 },
    /// `R t + log t`, for supports in `t > 0`
    Log { r: f64 },
}

impl PhaseProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Linear { r } => r * t,
            Self::Quadratic { r, c } => r * t + c * t * t,
            Self::Sine { r } => r * t + t.sin(),
            Self::Cubic { r } => r * (t + t * t * t / 3.0),
            Self::Log { r } => r * t + t.ln(),
        }
    }

    /// The derivative `h^{(j)}(t)` for `j` in `1..=3`.
    pub fn derivative(&self, j: u32, t: f64) -> f64 {
        match (*self, j) {
            (Self::Linear { r }, 1) => r,
            (Self::Linear { .. }, _) => 0.0,
            (Self::Quadratic { r, c }, 1) => r + 2.0 * c * t,
            (Self::Quadratic { c, .. }, 2) => 2.0 * c,
            (Self::Quadratic { .. }, _) => 0.0,
            (Self::Sine { r }, 1) => r + t.cos(),
            (Self::Sine { .. }, 2) => -t.sin(),
            (Self::Sine { .. }, _) => -t.cos(),
            (Self::Cubic { r }, 1) => r * (1.0 + t * t),
            (Self::Cubic { r }, 2) => 2.0 * r * t,
            (Self::Cubic { r }, _) => 2.0 * r,
            (Self::Log { r }, 1) => r + 1.0 / t,
            (Self::Log { .. }, 2) => -1.0 / (t * t),
            (Self::Log { .. }, _) => 2.0 / (t * t * t),
        }
    }
}

/// Everything the bound check computed, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatoryCheck {
    pub integral: f64,
    pub bound: f64,
    pub x: f64,
    pub u: f64,
    pub r: f64,
    pub q: f64,
    pub y: f64,
    pub holds: bool,
}

pub const OSCILLATORY_SAFETY: f64 = 10.0;
pub const OSCILLATORY_EXPONENT: i32 = 2;

fn sup_on_grid(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let n = 4000;
    (0..=n).map(|i| f(lo + (hi - lo) * i as f64 / n as f64).abs()).fold(0.0, f64::max)
}

/// Derivatives of the weight by central differences on a fine grid.
fn weight_derivative_sup(w: &WeightProfile, j: u32) -> f64 {
    let (lo, hi) = w.support();
    let h = (hi - lo) * 1e-3;
    let d = |t: f64| match j {
        0 => w.eval(t),
        1 => (w.eval(t + h) - w.eval(t - h)) / (2.0 * h),
        _ => (w.eval(t + h) - 2.0 * w.eval(t) + w.eval(t - h)) / (h * h),
    };
    sup_on_grid(d, lo, hi)
}

/// Evaluates `|∫ w e^{ih}|` and the bound
/// `(β−α) X [(QR/√Y)^{−A} + (RU)^{−A}]` at `A = 2`, times a safety factor 10.
///
/// The constants are read off the profiles: `X = sup|w|`,
/// `U = min_{j=1,2} (X / sup|w^{(j)}|)^{1/j}`, `R = inf|h'|`, `Q = β − α` and
/// `Y = max(1, max_{j=2,3} sup|h^{(j)}| Q^j)`.
pub fn oscillatory_integral_bound_check(w: &WeightProfile, h: &PhaseProfile) -> Result<OscillatoryCheck, SpecialError> {
    let (lo, hi) = w.support();
    let x = weight_derivative_sup(w, 0);
    let u = (1..=2u32)
        .map(|j| (x / weight_derivative_sup(w, j)).powf(1.0 / j as f64))
        .fold(f64::INFINITY, f64::min);
    let r = {
        let n = 4000;
        (0..=n)
            .map(|i| h.derivative(1, lo + (hi - lo) * i as f64 / n as f64).abs())
            .fold(f64::INFINITY, f64::min)
    };
    if !(r > 0.0) {
        return Err(SpecialError::Domain("phase has a stationary point".into()));
    }
    let q = hi - lo;
    let y = (2..=3u32)
        .map(|j| sup_on_grid(|t| h.derivative(j, t), lo, hi) * q.powi(j as i32))
        .fold(1.0, f64::max);
    let max_slope = sup_on_grid(|t| h.derivative(1, t), lo, hi);
    let pieces = ((hi - lo) * max_slope / PI).ceil() as usize + 8;
    let est = adaptive(|t: f64| Complex64::from_polar(w.eval(t), h.eval(t)), lo, hi, 1e-14, pieces, 200_000);
    let integral = est.value.norm();
    let a = OSCILLATORY_EXPONENT;
    let bound = OSCILLATORY_SAFETY * (hi - lo) * x * ((q * r / y.sqrt()).powi(-a) + (r * u).powi(-a));
    Ok(OscillatoryCheck { integral, bound, x, u, r, q, y, holds: integral + est.error <= bound })
}

/// The fixed catalogue of twenty (weight, phase) pairs.
pub fn oscillatory_catalogue() -> Vec<(WeightProfile, PhaseProfile)> {
    let weights = [
        WeightProfile::Bump { lo: 1.0, hi: 2.0 },
        WeightProfile::ModulatedBump { lo: 1.0, hi: 3.0, kappa: 3.0 },
        WeightProfile::PolynomialBump { lo: 0.5, hi: 2.5 },
        WeightProfile::PoweredBump { lo: 1.0, hi: 4.0, q: 0.5 },
    ];
    let phases = [
        PhaseProfile::Linear { r: 60.0 },
        PhaseProfile::Quadratic { r: 80.0, c: 1.0 },
        PhaseProfile::Sine { r: 50.0 },
        PhaseProfile::Cubic { r: 40.0 },
        PhaseProfile::Log { r: 70.0 },
    ];
    weights.iter().flat_map(|w| phases.iter().map(move |h| (*w, *h))).collect()
}

// ---------------------------------------------------------------------------
// Parseval with a quadratic phase
// ---------------------------------------------------------------------------

/// One-dimensional Hermite functions `h_n(x) = H_n(√(2π)x) e^{−πx²}` up to
/// normalisation, for `n` in `0..=2`. They satisfy `ĥ_n = (−i)^n h_n` for
/// `f̂(ξ) = ∫ f(x) e(−xξ) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteProfile {
    pub n1: u8,
    pub n2: u8,
}

fn hermite_1d(n: u8, x: f64) -> f64 {
    let g = (-PI * x * x).exp();
    match n {
        0 => g,
        1 => x * g,
        _ => (8.0 * PI * x * x - 2.0) * g,
    }
}

impl HermiteProfile {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        hermite_1d(self.n1, x) * hermite_1d(self.n2, y)
    }

    /// `f̂(ξ) = ∫ f(x) e(−x·ξ) dx`.
    pub fn transform(&self, s: f64, t: f64) -> Complex64 {
        let m = Complex64::new(0.0, -1.0).powi((self.n1 + self.n2) as i32);
        m * self.eval(s, t)
    }

    /// `Σ_{|a|<=2} ‖∂^a f‖²_{L²}` computed in frequency space:
    /// `∫ (1 + 4π²|ξ|² + 16π⁴(ξ₁⁴ + ξ₁²ξ₂² + ξ₂⁴)) |f̂|²`.
    pub fn sobolev_norm_sq(&self) -> f64 {
        let w = |s: f64, t: f64| {
            let (a, b) = (s * s, t * t);
            let p = 1.0 + 4.0 * PI * PI * (a + b) + 16.0 * PI.powi(4) * (a * a + a * b + b * b);
            p * self.eval(s, t).powi(2)
        };
        tensor_gl(&mut |s, t| Complex64::new(w(s, t), 0.0), 5.0, 40, 12).re
    }
}

/// Product Gauss–Legendre on `[−r, r]²` with `panels` panels per axis.
fn tensor_gl(f: &mut impl FnMut(f64, f64) -> Complex64, r: f64, panels: usize, order: usize) -> Complex64 {
    let (x, w) = gauss_legendre(order);
    let h = 2.0 * r / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = -r + h * (p as f64 + 0.5);
        for (xi, wi) in x.iter().zip(w) {
            nodes.push((mid + 0.5 * h * xi, 0.5 * h * wi));
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, wa) in &nodes {
        let mut row = Complex64::new(0.0, 0.0);
        for &(b, wb) in &nodes {
            row += f(a, b) * wb;
        }
        acc += row * wa;
    }
    acc
}

/// Both sides of the quadratic-phase Parseval identity and the Sobolev bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// `|lhs| / (‖f‖_{2,2} |det A|^{−1/2})`; the Cauchy–Schwarz argument
    /// bounds it by `√π / 2`.
    pub bound_ratio: f64,
}

/// Constant `√π/2` in `|∫ e(xᵀAx + xᵀb) f(x/X) dx| <= (√π/2) ‖f‖_{2,2} |det A|^{−1/2}`.
pub const PARSEVAL_BOUND_CONSTANT: f64 = 0.886_226_925_452_758;
pub const PARSEVAL_SAFETY: f64 = 10.0;

/// Signature of a symmetric 2×2 matrix.
pub fn signature(a: [[f64; 2]; 2]) -> i32 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det < 0.0 {
        0
    } else if a[0][0] + a[1][1] > 0.0 {
        2
    } else {
        -2
    }
}

/// `∫_{ℝ²} e(xᵀAx + xᵀb) f(x/X) dx` against
/// `e(sig A / 8) / (2 |det A|^{1/2}) X₁X₂ ∫ e(−¼(b−t)ᵀA⁻¹(b−t)) f̌(t₁X₁, t₂X₂) dt`
/// where `f̌(ξ) = ∫ f(x) e(x·ξ) dx`.
pub fn parseval_identity_check(a: [[f64; 2]; 2], b: [f64; 2], scale: [f64; 2], f: HermiteProfile) -> Result<ParsevalCheck, SpecialError> {
    if (a[0][1] - a[1][0]).abs() > 1e-14 {
        return Err(SpecialError::Domain("A must be symmetric".into()));
    }
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() < 1e-12 {
        return Err(SpecialError::SingularQuadraticForm);
    }
    let inv = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
    let norm_a = a.iter().flatten().map(|v| v.abs()).sum::<f64>();
    // f(x/X) is below 1e-30 outside |x_j| <= 5 X_j, up to the polynomial factor
    let r = 5.0 * scale[0].max(scale[1]);
    let freq = TAU * (2.0 * norm_a * r * 2f64.sqrt() + b[0].abs() + b[1].abs());
    let panels = ((2.0 * r) * freq / (PI / 2.0)).ceil() as usize;
    let mut lhs_f = |x: f64, y: f64| {
        let ph = a[0][0] * x * x + 2.0 * a[0][1] * x * y + a[1][1] * y * y + b[0] * x + b[1] * y;
        Complex64::from_polar(f.eval(x / scale[0], y / scale[1]), TAU * ph)
    };
    let lhs = tensor_gl(&mut lhs_f, r, panels, 8);

    let norm_inv = inv.iter().flatten().map(|v| v.abs()).sum::<f64>();
    let rt = 5.0 / scale[0].min(scale[1]);
    let dual_r = rt;
    let freq_t = TAU * 0.5 * norm_inv * (dual_r * 2f64.sqrt() + b[0].abs() + b[1].abs());
    let panels_t = ((2.0 * dual_r) * freq_t / (PI / 2.0)).ceil().max(40.0) as usize;
    let mut rhs_f = |s: f64, t: f64| {
        let (u, v) = (b[0] - s, b[1] - t);
        let q = inv[0][0] * u * u + 2.0 * inv[0][1] * u * v + inv[1][1] * v * v;
        // f̌(ξ) = f̂(−ξ)
        f.transform(-s * scale[0], -t * scale[1]) * Complex64::from_polar(1.0, -TAU * 0.25 * q)
    };
    let integral = tensor_gl(&mut rhs_f, dual_r, panels_t, 8);
    let phase = Complex64::from_polar(1.0, TAU * signature(a) as f64 / 8.0);
    let rhs = phase / (2.0 * det.abs().sqrt()) * scale[0] * scale[1] * integral;
    let sob = f.sobolev_norm_sq().sqrt();
    Ok(ParsevalCheck { lhs, rhs, residual: (lhs - rhs).norm(), bound_ratio: lhs.norm() * det.abs().sqrt() / sob })
}
