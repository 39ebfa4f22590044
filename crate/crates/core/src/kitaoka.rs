//! The Kitaoka summation formula for degree-two Siegel cusp forms of full
//! level: diagonal, rank-one and rank-two terms with tail certificates, and
//! the `W₊ ⊕ W₋` coordinates on `M₂(ℚ)`.
//!
//! Weight `k` enters through the Bessel order `ℓ = k − 3/2`. For `k = 6, 8`
//! there are no cusp forms, so the three arithmetic terms must cancel.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{ext_gcd, gcd, mat_det, mat_inv_unimodular, mat_mul, mat_transpose, smith_normal_form, Mat2};
use crate::expsums::{h_sum_exact, symplectic_coset_reps, ExpSumError, ExpSumValue, HalfIntegralForm};
use crate::siegel::{aut_count, qf_reduce, transform, SiegelError};
use crate::special::bessel::{bessel_j_f64, landau_bound, small_argument_bound};
use crate::special::gamma::ln_gamma_real;
use crate::special::kernels::cal_j;
use crate::special::{BesselOrder, SpecialError, SpectralPair};

#[derive(Debug, Error)]
pub enum KitaokaError {
    #[error("weight {0} must be an even integer >= 6")]
    UnsupportedWeight(u32),
    #[error("form ({0}, {1}, {2}) is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),
    #[error("reference matrix J is singular")]
    SingularJ,
    #[error("cutoffs must be positive")]
    InvalidCutoffs,
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    ExpSum(#[from] ExpSumError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

/// Truncation parameters: `c ≤ c_max`, `s ≤ s_max` in the rank-one sum and
/// Frobenius norm `‖C‖ ≤ c_norm_max` in the rank-two sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoffs {
    pub c_max: u64,
    pub s_max: u64,
    pub c_norm_max: f64,
}

impl Default for Cutoffs {
    fn default() -> Self {
        Self { c_max: 60, s_max: 60, c_norm_max: 40.0 }
    }
}

impl Cutoffs {
    fn validate(&self) -> Result<(), KitaokaError> {
        if self.c_max == 0 || self.s_max == 0 || !(self.c_norm_max >= 1.0) {
            return Err(KitaokaError::InvalidCutoffs);
        }
        Ok(())
    }
}

/// A truncated sum. `tail` bounds the discarded part; `numerical_error`
/// bounds quadrature and rounding error in the retained part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSum {
    pub re: f64,
    pub im: f64,
    pub tail: f64,
    pub numerical_error: f64,
    pub terms: u64,
}

impl TruncatedSum {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// `tail + numerical_error`.
    pub fn certificate(&self) -> f64 {
        self.tail + self.numerical_error
    }
}

/// All three terms of the formula for one pair `(T, Q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KitaokaTerms {
    pub t: HalfIntegralForm,
    pub q: HalfIntegralForm,
    pub k: u32,
    pub diagonal: i64,
    pub rank1: TruncatedSum,
    pub rank2: TruncatedSum,
    pub cutoffs: Cutoffs,
}

impl KitaokaTerms {
    /// `diagonal + rank1 + rank2`.
    pub fn total(&self) -> Complex64 {
        self.diagonal as f64 + self.rank1.value() + self.rank2.value()
    }

    /// Sum of both certificates.
    pub fn certificate(&self) -> f64 {
        self.rank1.certificate() + self.rank2.certificate()
    }
}

fn order_for(k: u32) -> Result<BesselOrder, KitaokaError> {
    if k < 6 || k % 2 == 1 {
        return Err(KitaokaError::UnsupportedWeight(k));
    }
    Ok(BesselOrder::from_weight(k)?)
}

fn as_tuple(f: &HalfIntegralForm) -> (i64, i64, i64) {
    (f.p1, f.p2, f.p4)
}

fn eigen_range(f: &HalfIntegralForm) -> (f64, f64) {
    let m = f.to_f64();
    let tr = m[0][0] + m[1][1];
    let det = f.det();
    let r = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let hi = 0.5 * (tr + r);
    (det / hi, hi)
}

// ---------------------------------------------------------------------------
// constant and diagonal term
// ---------------------------------------------------------------------------

/// `c_k = ¼ π^{1/2} (4π)^{3−2k} Γ(k − 3/2) Γ(k − 2)`, with both Gamma values
/// taken from exact products.
pub fn c_k_constant(k: u32, prec: u32) -> Result<Float, KitaokaError> {
    if k < 6 || k % 2 == 1 {
        return Err(KitaokaError::UnsupportedWeight(k));
    }
    let n = k - 2;
    // Γ(n + 1/2) = (2n)! / (4^n n!) · √π
    let mut half = Rational::from(Integer::from(Integer::factorial(2 * n)));
    half /= Integer::from(Integer::factorial(n));
    half /= Integer::from(Integer::u_pow_u(4, n));
    let gamma_k2 = Integer::from(Integer::factorial(k - 3));
    let pi = Float::with_val(prec, Constant::Pi);
    let four_pi = Float::with_val(prec, &pi * 4u32);
    let mut v = Float::with_val(prec, &pi / 4u32); // ¼ √π · √π
    v *= Float::with_val(prec, &half);
    v *= Float::with_val(prec, &gamma_k2);
    v /= four_pi.pow(2 * k - 3);
    Ok(v)
}

/// `#Aut(T)` when `T` and `Q` are `GL₂(ℤ)`-equivalent, else 0.
pub fn diagonal_term(t: &HalfIntegralForm, q: &HalfIntegralForm) -> Result<i64, KitaokaError> {
    let (rt, _) = qf_reduce(as_tuple(t))?;
    let (rq, _) = qf_reduce(as_tuple(q))?;
    if rt != rq {
        return Ok(0);
    }
    Ok(aut_count(as_tuple(t))? as i64)
}

/// All `U ∈ GL₂(ℤ)` with `Uᵀ T U = T`.
pub fn automorphs(t: &HalfIntegralForm) -> Result<Vec<Mat2>, KitaokaError> {
    let (red, ur) = qf_reduce(as_tuple(t))?;
    let (n, _, m) = red;
    let b = (2.0 * (m as f64 / n as f64).sqrt()).ceil() as i64 + 2;
    let ur_inv = mat_inv_unimodular(&ur);
    let mut out = Vec::new();
    for a in -b..=b {
        for bb in -b..=b {
            for c in -b..=b {
                for d in -b..=b {
                    let u = [[a, bb], [c, d]];
                    if mat_det(&u).abs() == 1 && transform(red, &u) == red {
                        // red = Urᵀ T Ur, so Ur U Ur⁻¹ fixes T
                        out.push(mat_mul(&mat_mul(&ur, &u), &ur_inv));
                    }
                }
            }
        }
    }
    debug_assert!(out.iter().all(|u| transform(as_tuple(t), u) == as_tuple(t)));
    Ok(out)
}

// ---------------------------------------------------------------------------
// rank one
// ---------------------------------------------------------------------------

/// Primitive `(x, y)` with `f(x, y) = s`.
fn primitive_representations(f: &HalfIntegralForm, s: i64) -> Vec<(i64, i64)> {
    let d2 = f.det2() as f64;
    let xb = (4.0 * f.p4 as f64 * s as f64 / d2).sqrt().floor() as i64 + 1;
    let yb = (4.0 * f.p1 as f64 * s as f64 / d2).sqrt().floor() as i64 + 1;
    let mut out = Vec::new();
    for x in -xb..=xb {
        for y in -yb..=yb {
            if gcd(x, y) == 1 && f.eval(x, y) == s {
                out.push((x, y));
            }
        }
    }
    out
}

/// Determinant-one completion of the bottom row `(u₃, u₄)`; among the
/// solutions `(a + t u₃, b + t u₄)` the upper row of least Euclidean length
/// is taken, ties broken towards nonnegative entries.
fn complete_bottom_row(u3: i64, u4: i64) -> Mat2 {
    let (g, x, y) = ext_gcd(u3, u4);
    debug_assert_eq!(g.abs(), 1);
    // a u₄ − b u₃ = 1 with (a, b) = (y, −x)·g
    let (a0, b0) = (g * y, -g * x);
    let norm2 = (u3 * u3 + u4 * u4) as f64;
    let t0 = -((a0 * u3 + b0 * u4) as f64 / norm2).round() as i64;
    let mut best: Option<(i64, i64, i64)> = None;
    for t in t0 - 1..=t0 + 1 {
        let (a, b) = (a0 + t * u3, b0 + t * u4);
        let key = (a * a + b * b, -(a.min(b)), t);
        if best.map_or(true, |bst| key < (bst.0, bst.1, bst.2)) {
            best = Some(key);
        }
    }
    let t = best.expect("nonempty").2;
    let u = [[a0 + t * u3, b0 + t * u4], [u3, u4]];
    debug_assert_eq!(mat_det(&u), 1);
    u
}

/// Pairs `(U, V)` in the rank-one sum for a given `s`: `U` runs over the
/// primitive bottom rows representing `s` by `Q`, modulo `±1`; `V` runs over
/// the primitive first columns `(v₁, v₃)` with `T[(−v₃, v₁)] = s`.
pub fn rank1_enumerate(t: &HalfIntegralForm, q: &HalfIntegralForm, s: u64) -> Vec<(Mat2, Mat2)> {
    let s = s as i64;
    let rows: Vec<_> = primitive_representations(q, s).into_iter().filter(|&(x, y)| x > 0 || (x == 0 && y > 0)).collect();
    let cols: Vec<_> = primitive_representations(t, s).into_iter().map(|(w3, w1)| (w1, -w3)).collect();
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for &(u3, u4) in &rows {
        let u = complete_bottom_row(u3, u4);
        for &(v1, v3) in &cols {
            // first column (v₁, v₃): V = Rᵀ-rotated completion of the row (−v₃, v₁)
            let w = complete_bottom_row(-v3, v1);
            let v = [[v1, -w[0][1]], [v3, w[0][0]]];
            debug_assert_eq!(mat_det(&v), 1);
            out.push((u, v));
        }
    }
    out
}

fn zeta_bound(alpha: f64) -> f64 {
    1.0 + 1.0 / (alpha - 1.0)
}

/// `Σ_{n > N} n^{−α} ≤ N^{1−α}/(α − 1)`.
fn power_tail(n: f64, alpha: f64) -> f64 {
    n.powf(1.0 - alpha) / (alpha - 1.0)
}

/// Rank-one term with tail certificate.
///
/// Tail: `|H^±| ≤ c·φ(c) ≤ c²` and `|J_ℓ(x)| ≤ (x/2)^ℓ/Γ(ℓ+1)`, summed in
/// closed form over `c > c_max` and over `s > s_max`. Beyond `s_max` the
/// number of pairs is bounded by counting at most two `x` per admissible `y`.
pub fn rank1_term(t: &HalfIntegralForm, q: &HalfIntegralForm, k: u32, cutoffs: &Cutoffs) -> Result<TruncatedSum, KitaokaError> {
    let ell = order_for(k)?;
    cutoffs.validate()?;
    let l = ell.value();
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let rho = (t.det() * q.det()).sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0u64;
    let mut pair_counts = Vec::with_capacity(cutoffs.s_max as usize);
    for s in 1..=cutoffs.s_max {
        let pairs = rank1_enumerate(t, q, s);
        pair_counts.push(pairs.len() as f64);
        let mut grouped: HashMap<(HalfIntegralForm, HalfIntegralForm), u32> = HashMap::new();
        for (u, v) in &pairs {
            let p = q.congruent(u);
            let sm = t.congruent(&mat_inv_unimodular(v));
            debug_assert_eq!(p.p4, s as i64);
            debug_assert_eq!(sm.p4, s as i64);
            *grouped.entry((p, sm)).or_insert(0) += 1;
        }
        for ((p, sm), mult) in &grouped {
            for c in 1..=cutoffs.c_max {
                let x = 4.0 * PI * rho / (c as f64 * s as f64);
                let jb = bessel_j_f64(l, x);
                let pref = sign * std::f64::consts::SQRT_2 * PI / ((c as f64).powf(1.5) * (s as f64).sqrt()) * jb * *mult as f64;
                for sg in [1, -1] {
                    acc += h_sum_exact(p, sm, c, sg).eval_f64() * pref;
                    terms += 1;
                }
            }
        }
    }
    // tail certificate
    let lg = ln_gamma_real(l + 1.0);
    let bessel_coef = |s: f64| ((l * (2.0 * PI * rho / s).ln()) - lg).exp(); // (2πρ/s)^ℓ/Γ(ℓ+1)
    let base = 2.0 * std::f64::consts::SQRT_2 * PI;
    let alpha = l - 0.5;
    let mut tail = 0.0;
    for (i, &n) in pair_counts.iter().enumerate() {
        let s = (i + 1) as f64;
        tail += base * s.powf(-0.5) * n * bessel_coef(s) * power_tail(cutoffs.c_max as f64, alpha);
    }
    let (aq, at) = (4.0 * q.p1 as f64 / q.det2() as f64, 4.0 * t.p1 as f64 / t.det2() as f64);
    let pair_coef = 0.5 * 2.0 * (2.0 * aq.sqrt() + 1.0) * 2.0 * (2.0 * at.sqrt() + 1.0); // ≥ #U·#V / s
    tail += base * pair_coef * bessel_coef(1.0) * zeta_bound(alpha) * power_tail(cutoffs.s_max as f64, alpha);
    let numerical_error = 1e-14 * terms as f64;
    Ok(TruncatedSum { re: acc.re, im: acc.im, tail, numerical_error, terms })
}

// ---------------------------------------------------------------------------
// rank two
// ---------------------------------------------------------------------------

/// Phase data of one coset representative for the diagonal modulus
/// `diag(d₁, d₂)`: the numerator of `tr(AΔ⁻¹Q + Δ⁻¹DT)` over `2 d₁ d₂` is
/// `α·(n_Q, r_Q, m_Q) + β·(n_T, r_T, m_T)`.
#[derive(Debug, Clone, Copy)]
struct RepPhase {
    alpha: [i64; 3],
    beta: [i64; 3],
}

fn diagonal_rep_phases(d1: i64, d2: i64) -> Result<Vec<RepPhase>, KitaokaError> {
    let delta: Mat2 = [[d1, 0], [0, d2]];
    let adj: Mat2 = [[d2, 0], [0, d1]];
    let reps = symplectic_coset_reps(&delta)?;
    let den = 2 * d1 * d2;
    let coef = |m: Mat2| [(2 * m[0][0]).rem_euclid(den), (m[0][1] + m[1][0]).rem_euclid(den), (2 * m[1][1]).rem_euclid(den)];
    Ok(reps
        .iter()
        .map(|r| RepPhase { alpha: coef(mat_mul(&r.a, &adj)), beta: coef(mat_mul(&adj, &r.d)) })
        .collect())
}

/// Cache of coset phase data keyed by the Smith invariants `(d₁, d₂)`.
#[derive(Default)]
pub struct KloostermanCache {
    phases: HashMap<(i64, i64), Vec<RepPhase>>,
}

impl KloostermanCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `K(Q, T; C)` through the Smith form `U₀ C V₀ = Δ`:
    /// `K(Q, T; C) = K(U₀ Q U₀ᵀ, V₀ᵀ T V₀; Δ)`.
    pub fn kloosterman(&mut self, q: &HalfIntegralForm, t: &HalfIntegralForm, c: &Mat2) -> Result<ExpSumValue, KitaokaError> {
        let det = mat_det(c);
        if det == 0 {
            return Err(ExpSumError::SingularModulus.into());
        }
        let (mut u0, d0, v0) = smith_normal_form(c);
        let (d1, mut d2) = (d0[0][0], d0[1][1]);
        debug_assert!(d1 > 0);
        if d2 < 0 {
            u0[1] = [-u0[1][0], -u0[1][1]];
            d2 = -d2;
        }
        let qp = q.congruent(&u0);
        let tp = t.congruent(&mat_transpose(&v0));
        let phases = match self.phases.entry((d1, d2)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(diagonal_rep_phases(d1, d2)?),
        };
        let den = 2 * d1 * d2;
        let qv = [qp.p1.rem_euclid(den), qp.p2.rem_euclid(den), qp.p4.rem_euclid(den)];
        let tv = [tp.p1.rem_euclid(den), tp.p2.rem_euclid(den), tp.p4.rem_euclid(den)];
        let mut counts = vec![0i64; den as usize];
        for r in phases.iter() {
            let num = r.alpha[0] * qv[0] + r.alpha[1] * qv[1] + r.alpha[2] * qv[2] + r.beta[0] * tv[0] + r.beta[1] * tv[1] + r.beta[2] * tv[2];
            counts[num.rem_euclid(den) as usize] += 1;
        }
        Ok(ExpSumValue { outer: crate::arith::RationalPhase::zero(), den: den as u64, counts })
    }
}

fn to_f64_mat(m: &Mat2) -> [[f64; 2]; 2] {
    [[m[0][0] as f64, m[0][1] as f64], [m[1][0] as f64, m[1][1] as f64]]
}

fn mul_f(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let mut r = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// `T C⁻¹ Q C⁻ᵀ` in floating point.
pub fn rank2_argument(t: &HalfIntegralForm, q: &HalfIntegralForm, c: &Mat2) -> [[f64; 2]; 2] {
    let d = mat_det(c) as f64;
    let ci = [[c[1][1] as f64 / d, -c[0][1] as f64 / d], [-c[1][0] as f64 / d, c[0][0] as f64 / d]];
    let cit = [[ci[0][0], ci[1][0]], [ci[0][1], ci[1][1]]];
    mul_f(&mul_f(&mul_f(&t.to_f64(), &ci), &q.to_f64()), &cit)
}

/// Bounds for `∫₀^{π/2} |J_ℓ(a sin θ) J_ℓ(b sin θ)| sin θ dθ`.
struct KernelBound {
    ell: f64,
    inv_gamma: f64,
    w_l1: f64,
    w_2l1: f64,
    w_l23: f64,
}

/// `∫₀^{π/2} sin^p θ dθ`.
fn sine_power_integral(p: f64) -> f64 {
    0.5 * PI.sqrt() * (ln_gamma_real(0.5 * (p + 1.0)) - ln_gamma_real(0.5 * p + 1.0)).exp()
}

impl KernelBound {
    fn new(ell: f64) -> Self {
        Self {
            ell,
            inv_gamma: (-ln_gamma_real(ell + 1.0)).exp(),
            w_l1: sine_power_integral(ell + 1.0),
            w_2l1: sine_power_integral(2.0 * ell + 1.0),
            w_l23: sine_power_integral(ell + 2.0 / 3.0),
        }
    }

    /// Rising part of the bound in `b`.
    fn rising(&self, b: f64) -> f64 {
        if b.is_infinite() {
            return self.w_l1;
        }
        self.w_l1.min((0.5 * b).powf(self.ell) * self.inv_gamma * self.w_2l1)
    }

    /// Falling part of the bound in `b`.
    fn falling(&self, b: f64) -> f64 {
        if b <= 0.0 {
            return f64::INFINITY;
        }
        landau_bound(b) * self.w_l23
    }

    /// Bound valid for every `a' ≤ a` and `b ∈ [b_lo, b_hi]`.
    fn bound(&self, a: f64, b_lo: f64, b_hi: f64) -> f64 {
        let pa = if a.is_infinite() { f64::INFINITY } else { small_argument_bound(self.ell, a) };
        let h = self.rising(b_hi).min(self.falling(b_lo));
        if pa <= 1.0 {
            pa * h
        } else {
            // |J_ℓ(a sin θ)| ≤ 1 and the weights lose the factor sin^ℓ
            let r = if b_hi.is_infinite() { 1.0 } else { (small_argument_bound(self.ell, b_hi) * sine_power_integral(self.ell + 1.0)).min(1.0) };
            let f = if b_lo > 0.0 { landau_bound(b_lo) * sine_power_integral(2.0 / 3.0) } else { f64::INFINITY };
            r.min(f)
        }
    }
}

/// Certified bound for `8π² Σ_{‖C‖ > R} |K(Q,T;C)| |det C|^{−3/2} |𝒥_ℓ|`.
///
/// Uses `|K| ≤ d₁|det C|` (size of the coset box) and `d₁² ≤ |det C|`, the
/// singular-value bounds `s_small ≤ κ/σ₁(C)`, `κ'/σ₂(C) ≤ s_large ≤ κ/σ₂(C)`
/// with `κ² = λ_max(Q)λ_max(T)`, `κ'² = λ_min(Q)λ_min(T)`, and compares the
/// lattice sum with an integral over unit cubes: singular values move by at
/// most 1 inside a cube (Weyl), and Lebesgue measure on `M₂(ℝ)` in singular
/// values is `4π²(σ₁² − σ₂²) dσ₁ dσ₂`. The integral is bounded by an upper
/// Riemann sum on a product grid plus a power-law tail.
pub fn rank2_tail_bound(t: &HalfIntegralForm, q: &HalfIntegralForm, ell: BesselOrder, r: f64) -> f64 {
    let l = ell.value();
    let kb = KernelBound::new(l);
    let (tmin, tmax) = eigen_range(t);
    let (qmin, qmax) = eigen_range(q);
    let kappa = (tmax * qmax).sqrt();
    let kappa_lo = (tmin * qmin).sqrt();
    let four_pi = 4.0 * PI;
    let r0 = (r - 1.0).max(0.0);
    let x_lo = r0 / std::f64::consts::SQRT_2;
    let x_hi = 50.0 * (r + 2.0);
    // σ₂ grid: fine near zero, geometric above
    let y_grid = |upto: f64| -> Vec<f64> {
        let mut g = vec![0.0];
        let mut y = 0.0;
        while y < upto {
            y = if y < 2.0 { y + 0.05 } else { y * 1.03 };
            g.push(y.min(upto));
        }
        g
    };
    let cell = |x0: f64, y0: f64, y1: f64| -> f64 {
        let a = if x0 > 1.0 { four_pi * kappa / (x0 - 1.0) } else { f64::INFINITY };
        let b_lo = four_pi * kappa_lo / (y1 + 1.0);
        let b_hi = if y0 > 1.0 { four_pi * kappa / (y0 - 1.0) } else { f64::INFINITY };
        kb.bound(a, b_lo, b_hi)
    };
    let mut total = 0.0;
    let mut x0 = x_lo;
    while x0 < x_hi {
        let x1 = if x0 < 2.0 { x0 + 0.05 } else { x0 * 1.01 };
        let ys = y_grid(x1);
        for w in ys.windows(2) {
            let (y0, y1) = (w[0], w[1]);
            if x1 * x1 + y1 * y1 <= r0 * r0 {
                continue;
            }
            total += (x1 * x1 - y0 * y0) * cell(x0, y0, y1) * (x1 - x0) * (y1 - y0);
        }
        x0 = x1;
    }
    // σ₁ > x_hi: inner integral over σ₂ bounded by H = ∫₀^∞ h
    let mut h_tot = 0.0;
    let ys = y_grid(x_hi);
    for w in ys.windows(2) {
        let b_lo = four_pi * kappa_lo / (w[1] + 1.0);
        let b_hi = if w[0] > 1.0 { four_pi * kappa / (w[0] - 1.0) } else { f64::INFINITY };
        h_tot += kb.rising(b_hi).min(kb.falling(b_lo)) * (w[1] - w[0]);
    }
    // σ₂ > x_hi: rising part ≤ (2πκ/(σ₂−1))^ℓ/Γ(ℓ+1) · W(2ℓ+1)
    h_tot += (2.0 * PI * kappa).powf(l) * kb.inv_gamma * kb.w_2l1 * power_tail(x_hi - 1.0, l);
    let ratio = x_hi / (x_hi - 1.0);
    let x_tail = ratio * ratio * (2.0 * PI * kappa).powf(l) * kb.inv_gamma * power_tail(x_hi - 1.0, l - 2.0);
    total += x_tail * h_tot;
    8.0 * PI * PI * 4.0 * PI * PI * total
}

/// Left and right symmetry groups of the rank-two summand: `C ↦ L C R`
/// with `L = U⁻ᵀ`, `U ∈ Aut(Q)`, and `R ∈ Aut(T)`.
fn symmetry_groups(t: &HalfIntegralForm, q: &HalfIntegralForm) -> Result<(Vec<Mat2>, Vec<Mat2>), KitaokaError> {
    let left = automorphs(q)?.iter().map(|u| mat_transpose(&mat_inv_unimodular(u))).collect();
    let right = automorphs(t)?;
    Ok((left, right))
}

fn frob2(c: &Mat2) -> i64 {
    c[0][0] * c[0][0] + c[0][1] * c[0][1] + c[1][0] * c[1][0] + c[1][1] * c[1][1]
}

fn flat(c: &Mat2) -> [i64; 4] {
    [c[0][0], c[0][1], c[1][0], c[1][1]]
}

/// Orbit weight of `C` if it is the least element (in lexicographic order)
/// of its orbit inside the ball, otherwise `None`.
fn canonical_weight(c: &Mat2, left: &[Mat2], right: &[Mat2], r2: i64, seen: &mut Vec<[i64; 4]>) -> Option<u32> {
    let key = flat(c);
    seen.clear();
    for l in left {
        let lc = mat_mul(l, c);
        for r in right {
            let img = mat_mul(&lc, r);
            if frob2(&img) > r2 {
                continue;
            }
            let f = flat(&img);
            if f < key {
                return None;
            }
            if !seen.contains(&f) {
                seen.push(f);
            }
        }
    }
    Some(seen.len() as u32)
}

/// Rank-two term over `‖C‖ ≤ c_norm_max` with tail certificate.
///
/// The summand is invariant under `C ↦ U⁻ᵀ C V` for `U ∈ Aut(Q)`,
/// `V ∈ Aut(T)`, so each orbit inside the ball is evaluated once and
/// weighted by its size. `K(Q, T; C)` is reduced to the Smith form of `C`
/// with cached coset data.
pub fn rank2_term(t: &HalfIntegralForm, q: &HalfIntegralForm, k: u32, cutoffs: &Cutoffs) -> Result<TruncatedSum, KitaokaError> {
    let ell = order_for(k)?;
    cutoffs.validate()?;
    let (left, right) = symmetry_groups(t, q)?;
    let r = cutoffs.c_norm_max;
    let r2 = (r * r + 1e-9).floor() as i64;
    let b = r.floor() as i64;
    let mut cache = KloostermanCache::new();
    let mut seen = Vec::with_capacity(left.len() * right.len());
    let mut acc = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut terms = 0u64;
    for a in -b..=b {
        let ra = r2 - a * a;
        let bb = (ra as f64).sqrt().floor() as i64;
        for c01 in -bb..=bb {
            let rb = ra - c01 * c01;
            let cb = (rb as f64).sqrt().floor() as i64;
            for c10 in -cb..=cb {
                let rc = rb - c10 * c10;
                let db = (rc as f64).sqrt().floor() as i64;
                for d in -db..=db {
                    let c: Mat2 = [[a, c01], [c10, d]];
                    let det = mat_det(&c);
                    if det == 0 {
                        continue;
                    }
                    let Some(w) = canonical_weight(&c, &left, &right, r2, &mut seen) else { continue };
                    let kv = cache.kloosterman(q, t, &c)?.eval_f64();
                    let pair = SpectralPair::from_matrix(rank2_argument(t, q, &c))?;
                    let j = cal_j(ell, pair)?;
                    let pref = 8.0 * PI * PI * w as f64 / (det.abs() as f64).powf(1.5);
                    acc += kv * (pref * j.value);
                    err += pref * kv.norm() * j.error;
                    terms += 1;
                }
            }
        }
    }
    let tail = rank2_tail_bound(t, q, ell, r);
    Ok(TruncatedSum { re: acc.re, im: acc.im, tail, numerical_error: err + 1e-15 * terms as f64, terms })
}

/// Right-hand side of the formula: `diagonal + rank1 + rank2`. For `k = 6, 8`
/// it must vanish; for larger `k` it equals `8c_k Σ_F a_F(T)a_F(Q)/‖F‖²`.
pub fn kitaoka_residual(t: &HalfIntegralForm, q: &HalfIntegralForm, k: u32, cutoffs: &Cutoffs) -> Result<KitaokaTerms, KitaokaError> {
    for f in [t, q] {
        if f.p1 <= 0 || f.det2() <= 0 {
            return Err(KitaokaError::NotPositiveDefinite(f.p1, f.p2, f.p4));
        }
    }
    order_for(k)?;
    Ok(KitaokaTerms {
        t: *t,
        q: *q,
        k,
        diagonal: diagonal_term(t, q)?,
        rank1: rank1_term(t, q, k, cutoffs)?,
        rank2: rank2_term(t, q, k, cutoffs)?,
        cutoffs: *cutoffs,
    })
}

// ---------------------------------------------------------------------------
// W₊ ⊕ W₋ coordinates
// ---------------------------------------------------------------------------

/// Coordinates `(a₊, a₋, b₊, b₋)` of `N ∈ M₂(ℝ)` relative to `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WpmCoordinates {
    pub a_plus: f64,
    pub a_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub j: Mat2,
}

fn check_j(j: &Mat2) -> Result<f64, KitaokaError> {
    let d = mat_det(j);
    if d == 0 {
        return Err(KitaokaError::SingularJ);
    }
    Ok(d as f64)
}

fn jtj(j: &Mat2) -> [[f64; 2]; 2] {
    to_f64_mat(&mat_mul(&mat_transpose(j), j))
}

/// `(j₁,±, j₂,±)(a, b) = ∓ (det J)⁻¹ JᵀJ (−b, a)ᵀ`; `sign = +1` gives `W₊`.
pub fn wpm_lower_row(sign: i32, a: f64, b: f64, j: &Mat2) -> Result<[f64; 2], KitaokaError> {
    let d = check_j(j)?;
    let m = jtj(j);
    let f = -(sign as f64) / d;
    Ok([f * (m[0][0] * -b + m[0][1] * a), f * (m[1][0] * -b + m[1][1] * a)])
}

/// Splits `N` along `W₊ ⊕ W₋`.
pub fn wpm_decompose(n: [[f64; 2]; 2], j: &Mat2) -> Result<WpmCoordinates, KitaokaError> {
    let d = check_j(j)?;
    // lower row = G(a₋ − a₊, b₋ − b₊) with G(x, y) = JᵀJ(−y, x)/det J
    let m = jtj(j);
    let mdet = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let (n3, n4) = (n[1][0] * d, n[1][1] * d);
    let u = (m[1][1] * n3 - m[0][1] * n4) / mdet;
    let v = (-m[1][0] * n3 + m[0][0] * n4) / mdet;
    // (−y, x) = (u, v)
    let (x, y) = (v, -u);
    Ok(WpmCoordinates {
        a_plus: 0.5 * (n[0][0] - x),
        a_minus: 0.5 * (n[0][0] + x),
        b_plus: 0.5 * (n[0][1] - y),
        b_minus: 0.5 * (n[0][1] + y),
        j: *j,
    })
}

impl WpmCoordinates {
    /// Rebuilds `N` from the coordinates.
    pub fn reconstruct(&self) -> Result<[[f64; 2]; 2], KitaokaError> {
        let p = wpm_lower_row(1, self.a_plus, self.b_plus, &self.j)?;
        let m = wpm_lower_row(-1, self.a_minus, self.b_minus, &self.j)?;
        Ok([[self.a_plus + self.a_minus, self.b_plus + self.b_minus], [p[0] + m[0], p[1] + m[1]]])
    }

    /// `(−b, a) JᵀJ (det J)⁻² (−b, a)ᵀ` for the `W₋` part (`sign = +1`) or
    /// the `W₊` part (`sign = −1`), as printed for the short-variable form.
    pub fn short_form(&self, sign: i32) -> f64 {
        let (a, b) = if sign > 0 { (self.a_minus, self.b_minus) } else { (self.a_plus, self.b_plus) };
        let m = jtj(&self.j);
        let d = mat_det(&self.j) as f64;
        let v = [-b, a];
        (v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1])) / (d * d)
    }
}

/// `(‖NJ⁻¹‖² + 2 det NJ⁻¹, ‖NJ⁻¹‖² − 2 det NJ⁻¹)`.
pub fn norm_det_combinations(n: [[f64; 2]; 2], j: &Mat2) -> Result<(f64, f64), KitaokaError> {
    let d = check_j(j)?;
    let ji = [[j[1][1] as f64 / d, -j[0][1] as f64 / d], [-j[1][0] as f64 / d, j[0][0] as f64 / d]];
    let a = mul_f(&n, &ji);
    let norm = a.iter().flatten().map(|x| x * x).sum::<f64>();
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    Ok((norm + 2.0 * det, norm - 2.0 * det))
}

/// Exact determinant of the linear map `N ↦ (a₊, a₋, b₊, b₋)`.
pub fn wpm_change_of_variables_det(j: &Mat2) -> Result<Rational, KitaokaError> {
    check_j(j)?;
    let d = Integer::from(mat_det(j));
    let m = mat_mul(&mat_transpose(j), j);
    // columns: images of a₊, a₋, b₊, b₋ as (n₁, n₂, n₃, n₄)
    let lower = |sign: i64, a: i64, b: i64| -> [Rational; 2] {
        let f = Rational::from((Integer::from(-sign), d.clone()));
        [f.clone() * Integer::from(m[0][0] * -b + m[0][1] * a), f * Integer::from(m[1][0] * -b + m[1][1] * a)]
    };
    let col = |top: [i64; 2], low: [Rational; 2]| -> [Rational; 4] {
        let [x, y] = low;
        [Rational::from(top[0]), Rational::from(top[1]), x, y]
    };
    let cols = [col([1, 0], lower(1, 1, 0)), col([1, 0], lower(-1, 1, 0)), col([0, 1], lower(1, 0, 1)), col([0, 1], lower(-1, 0, 1))];
    let mut a: Vec<Vec<Rational>> = (0..4).map(|i| (0..4).map(|j| cols[j][i].clone()).collect()).collect();
    // Gaussian elimination over ℚ
    let mut det = Rational::from(1);
    for c in 0..4 {
        let Some(p) = (c..4).find(|&r| a[r][c] != 0) else { return Ok(Rational::new()) };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..4 {
            let f = Rational::from(&a[r][c] / &a[c][c]);
            for cc in c..4 {
                let sub = Rational::from(&f * &a[c][cc]);
                a[r][cc] -= sub;
            }
        }
    }
    Ok(Rational::from(1) / det)
}

/// Central-difference check of the gradients of `‖NJ⁻¹‖²` and `det NJ⁻¹` in
/// `(a₊, b₊)` at `a₋ = b₋ = 0` against `4J⁻¹J⁻ᵀ(a₊, b₊)ᵀ` and
/// `−2J⁻¹J⁻ᵀ(a₊, b₊)ᵀ`; returns the largest absolute discrepancy.
pub fn wpm_gradient_check(a_plus: f64, b_plus: f64, j: &Mat2) -> Result<f64, KitaokaError> {
    let d = check_j(j)?;
    let h = 1e-4;
    let eval = |a: f64, b: f64| -> Result<(f64, f64), KitaokaError> {
        let n = WpmCoordinates { a_plus: a, a_minus: 0.0, b_plus: b, b_minus: 0.0, j: *j }.reconstruct()?;
        let (p, m) = norm_det_combinations(n, j)?;
        Ok((0.5 * (p + m), 0.25 * (p - m)))
    };
    let mut grad_n = [0.0; 2];
    let mut grad_d = [0.0; 2];
    for (i, (da, db)) in [(h, 0.0), (0.0, h)].into_iter().enumerate() {
        let (np, dp) = eval(a_plus + da, b_plus + db)?;
        let (nm, dm) = eval(a_plus - da, b_plus - db)?;
        grad_n[i] = (np - nm) / (2.0 * h);
        grad_d[i] = (dp - dm) / (2.0 * h);
    }
    let ji = [[j[1][1] as f64 / d, -j[0][1] as f64 / d], [-j[1][0] as f64 / d, j[0][0] as f64 / d]];
    let jit = [[ji[0][0], ji[1][0]], [ji[0][1], ji[1][1]]];
    let g = mul_f(&ji, &jit);
    let gv = [g[0][0] * a_plus + g[0][1] * b_plus, g[1][0] * a_plus + g[1][1] * b_plus];
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        worst = worst.max((grad_n[i] - 4.0 * gv[i]).abs()).max((grad_d[i] + 2.0 * gv[i]).abs());
    }
    Ok(worst)
}
