//! The diagonal contribution to the first moment of `D(1/2, F)`:
//!
//! `S(k) = 2 Σ_{r,s>=1} χ₋₄(s) r^{-1} s^{-3/2} W(r² s / k²)`,
//!
//! which behaves like `2 L(3/2, χ₋₄) log k + c₀ + O(1/k)`.
//!
//! Two independent evaluations are provided. [`diagonal_moment_sum`] sums the
//! lattice directly, reading `W` from an interpolation table in `log x`.
//! [`contour_moment_sum`] writes `S(k)` as a contour integral of
//! `ζ(1 + 2u) L(3/2 + u, χ₋₄)` against the weight kernel, takes the exact
//! residue at the double pole `u = 0` and integrates the remainder on
//! `Re u = −3/4`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rug::float::Constant;
use rug::Float;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{dirichlet_beta, ArithError};
use crate::special::kernels::{gamma_factor_ratio, AfeWeight};
use crate::special::quad::Estimate;
use crate::special::SpecialError;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("weight {0} must be even and at least 6")]
    UnsupportedWeight(u32),
    #[error("tail certificate {bound:e} exceeds tolerance {tolerance:e} for every admissible cut-off")]
    TailNotCertified { bound: f64, tolerance: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn check_weight(k: u32) -> Result<(), MomentError> {
    if k < 6 || k % 2 == 1 {
        return Err(MomentError::UnsupportedWeight(k));
    }
    Ok(())
}

fn float_string<S: Serializer>(x: &Float, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{:.30e}", x))
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// `ψ(1/4)` in closed form, `−γ − π/2 − 3 log 2`.
pub fn digamma_quarter_closed_form(prec: u32) -> Float {
    let gamma = Float::with_val(prec, Constant::Euler);
    let pi = Float::with_val(prec, Constant::Pi);
    let log2 = Float::with_val(prec, Constant::Log2);
    -gamma - pi / 2u32 - log2 * 3u32
}

/// `c₀ = L(3/2, χ₋₄)(3γ/2 − π/4 − (7/2) log 2 − (5/2) log π) + L'(3/2, χ₋₄)`.
pub fn c0_constant(prec: u32) -> Result<Float, MomentError> {
    let wp = prec + 32;
    let l = dirichlet_beta(1.5, 0, wp)?;
    let dl = dirichlet_beta(1.5, 1, wp)?;
    let gamma = Float::with_val(wp, Constant::Euler);
    let pi = Float::with_val(wp, Constant::Pi);
    let log2 = Float::with_val(wp, Constant::Log2);
    let logpi = Float::with_val(wp, pi.ln_ref());
    let bracket = gamma * 3u32 / 2u32 - pi / 4u32 - log2 * 7u32 / 2u32 - logpi * 5u32 / 2u32;
    Ok(Float::with_val(prec, l * bracket + dl))
}

/// `2 L(3/2, χ₋₄) log k + c₀`.
pub fn main_term(k: u32, prec: u32) -> Result<Float, MomentError> {
    let wp = prec + 32;
    let l = dirichlet_beta(1.5, 0, wp)?;
    let logk = Float::with_val(wp, k).ln();
    Ok(Float::with_val(prec, l * logk * 2u32 + c0_constant(wp)?))
}

// ---------------------------------------------------------------------------
// Contour route
// ---------------------------------------------------------------------------

/// Line used for the shifted integral.
pub const SHIFTED_LINE: f64 = -0.75;

// B_{2j} for j = 1..=12
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta `ζ(s, a)` for complex `s ≠ 1`, `a > 0`, `|s| <= 40`, by
/// Euler–Maclaurin summation from `N = 40`.
fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    const N: usize = 40;
    let one = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..N {
        acc += (-s * (n as f64 + a).ln()).exp();
    }
    let b = N as f64 + a;
    let lb = b.ln();
    let b_s = (-s * lb).exp();
    acc += b_s * b / (s - one) + b_s * 0.5;
    // rising product s(s+1)...(s+2j-2) / (2j)! times b^{-s-2j+1}
    let mut coef = s / b;
    let mut fact = 2.0;
    for (j, bj) in BERNOULLI_EVEN.iter().enumerate() {
        acc += b_s * coef * (*bj / fact);
        let m = 2.0 * j as f64;
        coef *= (s + m + 1.0) * (s + m + 2.0) / (b * b);
        fact *= (m + 3.0) * (m + 4.0);
    }
    acc
}

fn riemann_zeta(s: Complex64) -> Complex64 {
    hurwitz_zeta(s, 1.0)
}

/// `L(s, χ₋₄) = 4^{−s}(ζ(s, 1/4) − ζ(s, 3/4))`.
fn l_chi4(s: Complex64) -> Complex64 {
    (-s * 4f64.ln()).exp() * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75))
}

/// The kernel `g(u) = G(u) e^{u²} (1 − 4u²)/u`.
fn kernel(u: Complex64, k: u32) -> Complex64 {
    gamma_factor_ratio(u, k) * (u * u).exp() * (1.0 - 4.0 * u * u) / u
}

/// Residue of `2 ζ(1 + 2u) L(3/2 + u) g(u)` at `u = 0`:
/// `2γL + L' + L·(log G)'(0)` with the exact digamma values at `k − 3/2`, `k − 1/2`.
pub fn double_pole_residue(k: u32, prec: u32) -> Result<Float, MomentError> {
    check_weight(k)?;
    let wp = prec + 32;
    let l = dirichlet_beta(1.5, 0, wp)?;
    let dl = dirichlet_beta(1.5, 1, wp)?;
    let gamma = Float::with_val(wp, Constant::Euler);
    let pi = Float::with_val(wp, Constant::Pi);
    let log2 = Float::with_val(wp, Constant::Log2);
    let logpi = Float::with_val(wp, pi.ln_ref());
    let psi_q = Float::with_val(wp, 0.25).digamma();
    let psi_a = Float::with_val(wp, k as f64 - 1.5).digamma();
    let psi_b = Float::with_val(wp, k as f64 - 0.5).digamma();
    let dlog_g = -log2 * 2u32 - logpi * 5u32 / 2u32 + psi_q / 2u32 + psi_a + psi_b;
    Ok(Float::with_val(prec, gamma * &l * 2u32 + dl + l * dlog_g))
}

/// `2 ∫_{(−3/4)} ζ(1 + 2u) L(3/2 + u, χ₋₄) g(u) du/(2πi)` by the trapezoidal rule.
pub fn shifted_integral(k: u32) -> Result<Estimate<f64>, MomentError> {
    check_weight(k)?;
    let h: f64 = 0.025;
    let t_max: f64 = 12.0;
    let n = (t_max / h).round() as i64;
    let f = |t: f64| {
        let u = Complex64::new(SHIFTED_LINE, t);
        riemann_zeta(1.0 + 2.0 * u) * l_chi4(1.5 + u) * kernel(u, k)
    };
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    for j in -n..=n {
        let v = f(j as f64 * h);
        fine += v;
        if j % 2 == 0 {
            coarse += v;
        }
    }
    let fine = fine * h / TAU * 2.0;
    let coarse = coarse * (2.0 * h) / TAU * 2.0;
    let edge = (f(t_max).norm() + f(-t_max).norm()) / TAU * 2.0;
    Ok(Estimate { value: fine.re, error: (fine - coarse).norm() + edge + 1e-16 * fine.norm() })
}

/// `S(k)` as residue plus shifted integral.
#[derive(Debug, Clone, Serialize)]
pub struct ContourEvaluation {
    pub k: u32,
    #[serde(serialize_with = "float_string")]
    pub residue: Float,
    pub shifted: f64,
    pub error: f64,
}

impl ContourEvaluation {
    pub fn value(&self) -> Float {
        Float::with_val(self.residue.prec(), &self.residue + self.shifted)
    }
}

pub fn contour_moment_sum(k: u32, prec: u32) -> Result<ContourEvaluation, MomentError> {
    let residue = double_pole_residue(k, prec)?;
    let shifted = shifted_integral(k)?;
    Ok(ContourEvaluation { k, residue, shifted: shifted.value, error: shifted.error })
}

// ---------------------------------------------------------------------------
// Direct lattice sum
// ---------------------------------------------------------------------------

/// Controls for [`diagonal_moment_sum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentOptions {
    /// Required bound on the discarded region `r² s > X k²`.
    pub tail_tolerance: f64,
    /// Multiplies the automatically chosen `X`; 2.0 doubles the truncation.
    pub cut_scale: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self { tail_tolerance: 1e-10, cut_scale: 1.0 }
    }
}

const STENCIL: usize = 10;
const GRID_STEP: f64 = 1.0 / 64.0;
const SIGMAS: [f64; 7] = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];

/// `W(e^t)` on a uniform grid in `t` with 10-point Lagrange interpolation.
struct LogTable {
    t0: f64,
    values: Vec<f64>,
    bary: [f64; STENCIL],
    error: f64,
}

impl LogTable {
    fn build(k: u32, x_min: f64, x_max: f64) -> Result<Self, MomentError> {
        let right = AfeWeight::new(k, 2.0)?;
        let left = AfeWeight::new(k, -1.0)?;
        let direct = |x: f64| {
            let a = right.eval(x);
            let b = left.eval(x);
            if a.error <= b.error {
                a
            } else {
                b
            }
        };
        let pad = (STENCIL + 2) as f64 * GRID_STEP;
        let t0 = x_min.ln() - pad;
        let n = ((x_max.ln() + pad - t0) / GRID_STEP).ceil() as usize + 1;
        let mut values = Vec::with_capacity(n);
        let mut node_error: f64 = 0.0;
        for i in 0..n {
            let e = direct((t0 + i as f64 * GRID_STEP).exp());
            node_error = node_error.max(e.error);
            values.push(e.value);
        }
        let mut bary = [0.0; STENCIL];
        for (i, b) in bary.iter_mut().enumerate() {
            let mut p = 1.0;
            for m in 0..STENCIL {
                if m != i {
                    p *= i as f64 - m as f64;
                }
            }
            *b = 1.0 / p;
        }
        let mut table = Self { t0, values, bary, error: 0.0 };
        // compare with direct evaluation at cell midpoints spread over the range
        let (lo, hi) = (x_min.ln(), x_max.ln());
        let mut interp: f64 = 0.0;
        let samples = 200;
        for j in 0..samples {
            let t = lo + (hi - lo) * (j as f64 + 0.5) / samples as f64;
            let t = ((t - t0) / GRID_STEP).floor() * GRID_STEP + t0 + 0.5 * GRID_STEP;
            let d = direct(t.exp());
            interp = interp.max((table.eval(t) - d.value).abs() + d.error);
        }
        table.error = 2.0 * interp.max(node_error);
        Ok(table)
    }

    #[inline]
    fn eval(&self, t: f64) -> f64 {
        let pos = (t - self.t0) / GRID_STEP;
        let j = pos.floor();
        let p = pos - j;
        let base = j as usize - (STENCIL / 2 - 1);
        let p = p + (STENCIL / 2 - 1) as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..STENCIL {
            let d = p - i as f64;
            if d == 0.0 {
                return self.values[base + i];
            }
            let w = self.bary[i] / d;
            num += w * self.values[base + i];
            den += w;
        }
        num / den
    }
}

/// Bound on `Σ_{r² s > X k²} r^{−1} s^{−3/2} |W(r² s/k²)|` from
/// `|W(x)| <= M_σ x^{−σ}`, minimised over the tabulated `σ`.
fn lattice_tail_bound(k: u32, x_cut: f64, decay: &[(f64, f64)]) -> f64 {
    let kf = k as f64;
    let n0 = x_cut * kf * kf;
    let r_edge = n0.sqrt().floor();
    decay
        .iter()
        .map(|&(sigma, m)| {
            let a = 1.5 + sigma;
            // r <= √N₀: Σ_{s > N₀/r²} s^{−a} <= (N₀/r²)^{−a} + (N₀/r²)^{1−a}/(a − 1)
            let sum_r2 = r_edge * (r_edge + 1.0) * (2.0 * r_edge + 1.0) / 6.0;
            let inner = (-a * n0.ln()).exp() * sum_r2 + r_edge * ((1.0 - a) * n0.ln()).exp() / (a - 1.0);
            // r > √N₀: every s >= 1 is discarded
            let zeta_a = 1.0 + 1.0 / (a - 1.0);
            let r1 = r_edge + 1.0;
            let outer = zeta_a * (r1.powf(-1.0 - 2.0 * sigma) + r1.powf(-2.0 * sigma) / (2.0 * sigma));
            m * (2.0 * sigma * kf.ln()).exp() * (inner + outer)
        })
        .fold(f64::INFINITY, f64::min)
}

/// The truncated lattice sum with its certificates.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSum {
    pub k: u32,
    #[serde(serialize_with = "float_string")]
    pub value: Float,
    /// Interpolation, weight-evaluation and rounding error.
    pub numerical_error: f64,
    /// Bound on the discarded region `r² s > X k²`.
    pub tail: f64,
    pub x_cut: f64,
    pub terms: u64,
}

impl MomentSum {
    pub fn certificate(&self) -> f64 {
        self.numerical_error + self.tail
    }
}

/// `2 Σ χ₋₄(s) r^{-1} s^{-3/2} W(r²s/k²)` over `r² s <= X k²`, where `X` is the
/// smallest cut-off on a geometric grid whose tail certificate is below
/// `opts.tail_tolerance`, then scaled by `opts.cut_scale`.
pub fn diagonal_moment_sum(k: u32, opts: &MomentOptions, prec: u32) -> Result<MomentSum, MomentError> {
    check_weight(k)?;
    let mut decay = Vec::with_capacity(SIGMAS.len());
    for &s in &SIGMAS {
        decay.push((s, AfeWeight::new(k, s)?.decay_constant()));
    }
    let mut x_cut = 10.0;
    let mut best = lattice_tail_bound(k, x_cut, &decay);
    while best > opts.tail_tolerance {
        x_cut *= 1.25;
        if x_cut > 1e4 {
            return Err(MomentError::TailNotCertified { bound: best, tolerance: opts.tail_tolerance });
        }
        best = lattice_tail_bound(k, x_cut, &decay);
    }
    x_cut *= opts.cut_scale.max(1.0);
    let tail = 2.0 * lattice_tail_bound(k, x_cut, &decay);

    let kf = k as f64;
    let table = LogTable::build(k, 1.0 / (kf * kf), x_cut)?;
    let n0 = x_cut * kf * kf;
    let r_max = n0.sqrt().floor() as usize;
    let ln_r: Vec<f64> = (0..=r_max).map(|r| (r.max(1) as f64).ln()).collect();
    let two_ln_k = 2.0 * kf.ln();
    let s_max = n0.floor() as u64;

    // Neumaier summation
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut abs_weight = 0.0f64;
    let mut terms = 0u64;
    let mut s = 1u64;
    while s <= s_max {
        let sf = s as f64;
        let sign = if s % 4 == 1 { 1.0 } else { -1.0 };
        let w_s = 1.0 / (sf * sf.sqrt());
        let ls = sf.ln() - two_ln_k;
        let rm = ((n0 / sf).sqrt().floor() as usize).min(r_max);
        let mut inner = 0.0;
        let mut inner_abs = 0.0;
        for (r, lr) in ln_r.iter().enumerate().take(rm + 1).skip(1) {
            let inv = 1.0 / r as f64;
            inner += inv * table.eval(2.0 * lr + ls);
            inner_abs += inv;
        }
        terms += rm as u64;
        let term = sign * w_s * inner;
        abs_weight += w_s * inner_abs;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        s += 2;
    }
    let value = 2.0 * (sum + comp);
    let numerical_error = 2.0 * abs_weight * (table.error + 4.0 * f64::EPSILON) + 1e-15 * value.abs();
    Ok(MomentSum { k, value: Float::with_val(prec, value), numerical_error, tail, x_cut, terms })
}

// ---------------------------------------------------------------------------
// Asymptotics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalMomentReport {
    pub k: u32,
    #[serde(serialize_with = "float_string")]
    pub sum_value: Float,
    pub sum_certificate: f64,
    #[serde(serialize_with = "float_string")]
    pub main_term: Float,
    #[serde(serialize_with = "float_string")]
    pub residual: Float,
}

impl DiagonalMomentReport {
    /// `k · residual`, which stays bounded when the error term is `O(1/k)`.
    pub fn scaled_residual(&self) -> f64 {
        self.residual.to_f64() * self.k as f64
    }
}

pub fn asymptotic_residual(k: u32, opts: &MomentOptions, prec: u32) -> Result<DiagonalMomentReport, MomentError> {
    let sum = diagonal_moment_sum(k, opts, prec)?;
    let main = main_term(k, prec)?;
    let residual = Float::with_val(prec, &sum.value - &main);
    Ok(DiagonalMomentReport { k, sum_certificate: sum.certificate(), sum_value: sum.value, main_term: main, residual })
}

/// Sweep of [`asymptotic_residual`] with the spread of `k · residual`.
#[derive(Debug, Clone, Serialize)]
pub struct MomentSweep {
    pub reports: Vec<DiagonalMomentReport>,
    /// `max k|residual|`, the empirical constant in the `O(1/k)` term.
    pub constant: f64,
    /// `max k|residual| / min k|residual|`.
    pub spread: f64,
}

impl MomentSweep {
    /// One CSV row per weight: `k,sum,certificate,main,residual,k_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,sum,certificate,main,residual,k_residual\n");
        for r in &self.reports {
            out.push_str(&format!(
                "{},{},{:e},{},{},{}\n",
                r.k,
                format!("{:.20e}", r.sum_value),
                r.sum_certificate,
                format!("{:.20e}", r.main_term),
                format!("{:.12e}", r.residual),
                r.scaled_residual()
            ));
        }
        out
    }
}

pub fn moment_sweep(ks: &[u32], opts: &MomentOptions, prec: u32) -> Result<MomentSweep, MomentError> {
    let mut reports = Vec::with_capacity(ks.len());
    for &k in ks {
        reports.push(asymptotic_residual(k, opts, prec)?);
    }
    let scaled: Vec<f64> = reports.iter().map(|r| r.scaled_residual().abs()).collect();
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(MomentSweep { reports, constant: max, spread: max / min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_special_values() {
        assert!((riemann_zeta(c(2.0, 0.0)).re - PI * PI / 6.0).abs() < 1e-14);
        assert!((riemann_zeta(c(0.0, 0.0)).re + 0.5).abs() < 1e-14);
        assert!((riemann_zeta(c(-1.0, 0.0)).re + 1.0 / 12.0).abs() < 1e-12);
        // first nontrivial zero
        assert!(riemann_zeta(c(0.5, 14.134_725_141_734_693)).norm() < 1e-12);
    }

    #[test]
    fn l_chi4_special_values() {
        assert!((l_chi4(c(2.0, 0.0)).re - 0.915_965_594_177_219_015).abs() < 1e-14);
        assert!((l_chi4(c(3.0, 0.0)).re - PI.powi(3) / 32.0).abs() < 1e-14);
        // L(−2n, χ₋₄) = E_{2n}/2 with Euler numbers E₀ = 1, E₂ = −1
        assert!((l_chi4(c(0.0, 0.0)).re - 0.5).abs() < 1e-14);
        let v = l_chi4(c(-2.0, 0.0)).re;
        assert!((v + 0.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn values_on_the_shifted_lines() {
        // reference values from an independent arbitrary-precision library
        let z = riemann_zeta(c(-0.5, 6.0));
        assert!((z - c(0.717_734_188_632_941_8, 0.524_564_300_950_962_7)).norm() < 1e-13);
        let l = l_chi4(c(0.75, 3.0));
        assert!((l - c(1.369_157_708_205_578_8, 0.127_808_272_959_590_55)).norm() < 1e-13);
    }

    #[test]
    fn interpolation_table_is_accurate() {
        let t = LogTable::build(100, 1e-4, 300.0).unwrap();
        assert!(t.error < 1e-12, "{}", t.error);
    }
}
