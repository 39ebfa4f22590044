//! Fourier coefficients of the Saito–Kurokawa lifts of weight 10 and 12,
//! binary quadratic form utilities, and the attached elliptic eigenforms.
//!
//! A binary form is written `T = (n, r, m)`, meaning the half-integral matrix
//! `[[n, r/2], [r/2, m]]`, and its discriminant is `D = 4nm − r²`.
//!
//! Jacobi forms of index 1 and even weight have coefficients `c(n, r)` that
//! depend only on `D`; a table stores `c(D)` for `0 <= D <= D_max`. Cusp forms
//! are scaled so that `c(3) = 1`.
//!
//! The cusp forms are built twice:
//! * as `E₆·E_{4,1} − E₄·E_{6,1}` and `E₄²·E_{4,1} − E₆·E_{6,1}`;
//! * as `Δ·φ_{−2,1}` and `Δ·φ_{0,1}`, expanding `φ_{−2,1} = θ₁(τ,z)²/η⁶` with the
//!   Jacobi triple product and `φ_{0,1} = 12 φ_{−2,1} ℘/(2πi)²`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arith::{bernoulli_numbers, cohen_h, divisor_sigma, divisors, fundamental_split, gcd, kronecker, mobius, Mat2};

#[derive(Debug, Error)]
pub enum SiegelError {
    #[error("unsupported weight {0}")]
    UnsupportedWeight(u32),
    #[error("form ({0}, {1}, {2}) is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),
    #[error("discriminant {needed} exceeds table bound {have}")]
    TableTooSmall { needed: u64, have: u64 },
    #[error("cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// q-expansions
// ---------------------------------------------------------------------------

/// Truncated `q`-expansion `Σ_{n <= n_max} a(n) qⁿ` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    pub weight: u32,
    pub coefficients: Vec<Rational>,
}

impl QExpansion {
    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coefficients[n]
    }

    /// Product truncated to the shorter of the two expansions.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let n = self.n_max().min(other.n_max());
        let mut out = vec![Rational::new(); n + 1];
        for i in 0..=n {
            if self.coefficients[i] == 0 {
                continue;
            }
            for j in 0..=n - i {
                out[i + j] += Rational::from(&self.coefficients[i] * &other.coefficients[j]);
            }
        }
        QExpansion { weight: self.weight + other.weight, coefficients: out }
    }

    fn scale_sub(&self, a: &Rational, other: &QExpansion, b: &Rational) -> QExpansion {
        let n = self.n_max().min(other.n_max());
        let coefficients = (0..=n)
            .map(|i| Rational::from(a * &self.coefficients[i]) - Rational::from(b * &other.coefficients[i]))
            .collect();
        QExpansion { weight: self.weight, coefficients }
    }
}

/// `E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ` for `k ∈ {4, 6}` (any even `k >= 4` works).
pub fn eisenstein_q_expansion(weight: u32, n_max: usize) -> Result<QExpansion, SiegelError> {
    if weight < 4 || weight % 2 == 1 {
        return Err(SiegelError::UnsupportedWeight(weight));
    }
    let b = bernoulli_numbers(weight as usize);
    let factor = -Rational::from(2 * weight) / &b[weight as usize];
    let mut coefficients = vec![Rational::from(1)];
    for n in 1..=n_max as u64 {
        coefficients.push(Rational::from(&factor * divisor_sigma(n, weight - 1)));
    }
    Ok(QExpansion { weight, coefficients })
}

/// `Δ = (E₄³ − E₆²)/1728`.
pub fn delta_q_expansion(n_max: usize) -> QExpansion {
    let e4 = eisenstein_q_expansion(4, n_max).expect("weight 4");
    let e6 = eisenstein_q_expansion(6, n_max).expect("weight 6");
    let e4c = e4.mul(&e4).mul(&e4);
    let e6s = e6.mul(&e6);
    let inv = Rational::from((1, 1728));
    let mut d = e4c.scale_sub(&inv, &e6s, &inv);
    d.weight = 12;
    d
}

/// The normalised eigenform spanning `S_18` (`Δ E₆`) or `S_22` (`Δ E₁₀`).
pub fn elliptic_eigenform(weight: u32, n_max: usize) -> Result<QExpansion, SiegelError> {
    let coefficients = eigenform_coefficients(weight, n_max)?.into_iter().map(Rational::from).collect();
    Ok(QExpansion { weight, coefficients })
}

/// Integer coefficients `a(0..=n_max)` of the same eigenform.
///
/// Only `a(p)` is obtained by convolution of `τ` with the Eisenstein series;
/// everything else follows from the Hecke relations, so the cost is
/// `O(n_max²/log n_max)` rather than a full product.
pub fn eigenform_coefficients(weight: u32, n_max: usize) -> Result<Vec<Integer>, SiegelError> {
    let ew = match weight {
        18 => 6,
        22 => 10,
        w => return Err(SiegelError::UnsupportedWeight(w)),
    };
    let tau = ramanujan_tau(n_max);
    let e: Vec<Integer> = eisenstein_q_expansion(ew, n_max)?
        .coefficients
        .into_iter()
        .map(|c| c.into_numer_denom().0)
        .collect();
    let mut spf = vec![0usize; n_max + 1];
    for i in 2..=n_max {
        if spf[i] == 0 {
            for j in (i..=n_max).step_by(i) {
                if spf[j] == 0 {
                    spf[j] = i;
                }
            }
        }
    }
    let mut a = vec![Integer::new(); n_max + 1];
    if n_max >= 1 {
        a[1] = Integer::from(1);
    }
    for n in 2..=n_max {
        let p = spf[n];
        let mut pj = p;
        while (n / pj) % p == 0 {
            pj *= p;
        }
        let rest = n / pj;
        a[n] = if rest > 1 {
            Integer::from(&a[pj] * &a[rest])
        } else if pj == p {
            let mut acc = Integer::new();
            for m in 1..=p {
                acc += Integer::from(&tau[m] * &e[p - m]);
            }
            acc
        } else {
            let pw = Integer::from(p).pow(weight - 1);
            Integer::from(&a[p] * &a[n / p]) - pw * &a[n / (p * p)]
        };
    }
    Ok(a)
}

/// `τ(0..=n_max)` from `Δ = q·(Σ_m (−1)^m (2m+1) q^{m(m+1)/2})⁸`.
pub fn ramanujan_tau(n_max: usize) -> Vec<Integer> {
    let len = n_max.max(1);
    let mut s = vec![0i128; len];
    let mut m = 0usize;
    while m * (m + 1) / 2 < len {
        s[m * (m + 1) / 2] = if m % 2 == 0 { 2 * m as i128 + 1 } else { -(2 * m as i128 + 1) };
        m += 1;
    }
    let square = |x: &[i128]| {
        let mut out = vec![0i128; len];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &xj) in x[..len - i].iter().enumerate() {
                out[i + j] += xi * xj;
            }
        }
        out
    };
    let s8 = square(&square(&square(&s)));
    let mut tau = vec![Integer::new(); n_max + 1];
    for n in 1..=n_max {
        tau[n] = Integer::from(s8[n - 1]);
    }
    tau
}

// ---------------------------------------------------------------------------
// Jacobi forms of index 1
// ---------------------------------------------------------------------------

/// Coefficients `c(D)` of an index-1 Jacobi form, `0 <= D <= d_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobiFormTable {
    pub weight: u32,
    pub d_max: u64,
    #[serde(with = "rational_vec")]
    pub coefficients: Vec<Rational>,
}

mod rational_vec {
    use rug::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|r| r.to_string()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter()
            .map(|s| Rational::parse(s).map(Rational::from).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl JacobiFormTable {
    /// `c(D)`, zero for `D ≡ 1, 2 (mod 4)`.
    pub fn c(&self, d: u64) -> Result<&Rational, SiegelError> {
        self.coefficients
            .get(d as usize)
            .ok_or(SiegelError::TableTooSmall { needed: d, have: self.d_max })
    }

    /// Multiplication by an elliptic modular form: `(fφ)(D) = Σ_m a(m) c(D − 4m)`.
    fn times(&self, f: &QExpansion) -> JacobiFormTable {
        let mut out = vec![Rational::new(); self.coefficients.len()];
        for (d, slot) in out.iter_mut().enumerate() {
            for m in 0..=(d / 4).min(f.n_max()) {
                *slot += Rational::from(f.coeff(m) * &self.coefficients[d - 4 * m]);
            }
        }
        JacobiFormTable { weight: self.weight + f.weight, d_max: self.d_max, coefficients: out }
    }

    fn combine(&self, a: &Rational, other: &JacobiFormTable, b: &Rational) -> JacobiFormTable {
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(x, y)| Rational::from(a * x) + Rational::from(b * y))
            .collect();
        JacobiFormTable { weight: self.weight, d_max: self.d_max, coefficients }
    }

    fn normalised_at_three(mut self) -> JacobiFormTable {
        let c3 = self.coefficients[3].clone();
        assert!(c3 != 0, "c(3) vanishes");
        for c in &mut self.coefficients {
            *c /= &c3;
        }
        self
    }
}

/// `E_{k,1}` with `c(D) = H(k−1, D)/H(k−1, 0)`.
pub fn jacobi_eisenstein(weight: u32, d_max: u64) -> Result<JacobiFormTable, SiegelError> {
    if weight != 4 && weight != 6 {
        return Err(SiegelError::UnsupportedWeight(weight));
    }
    let h0 = cohen_h(weight - 1, 0);
    let coefficients = (0..=d_max)
        .map(|d| if d % 4 == 0 || d % 4 == 3 { cohen_h(weight - 1, d) / &h0 } else { Rational::new() })
        .collect();
    Ok(JacobiFormTable { weight, d_max, coefficients })
}

/// The cusp form `φ_{k,1}`, `k ∈ {10, 12}`, from Eisenstein series.
pub fn jacobi_cusp_form(weight: u32, d_max: u64) -> Result<JacobiFormTable, SiegelError> {
    let n = (d_max / 4) as usize + 1;
    let e41 = jacobi_eisenstein(4, d_max)?;
    let e61 = jacobi_eisenstein(6, d_max)?;
    let e4 = eisenstein_q_expansion(4, n)?;
    let e6 = eisenstein_q_expansion(6, n)?;
    let one = Rational::from(1);
    let minus = Rational::from(-1);
    let raw = match weight {
        10 => e41.times(&e6).combine(&one, &e61.times(&e4), &minus),
        12 => e41.times(&e4.mul(&e4)).combine(&one, &e61.times(&e6), &minus),
        w => return Err(SiegelError::UnsupportedWeight(w)),
    };
    Ok(raw.normalised_at_three())
}

/// Dense two-variable Laurent polynomial `Σ a(n, r) qⁿ ζ^r`, `0 <= n <= N`,
/// `|r| <= R`.
struct Laurent2 {
    n: usize,
    r: i64,
    a: Vec<Integer>,
}

impl Laurent2 {
    fn new(n: usize, r: i64) -> Self {
        Self { n, r, a: vec![Integer::new(); (n + 1) * (2 * r as usize + 1)] }
    }

    fn idx(&self, n: usize, r: i64) -> usize {
        n * (2 * self.r as usize + 1) + (r + self.r) as usize
    }

    fn get(&self, n: usize, r: i64) -> &Integer {
        &self.a[self.idx(n, r)]
    }

    fn add(&mut self, n: usize, r: i64, v: &Integer) {
        if n <= self.n && r.abs() <= self.r {
            let i = self.idx(n, r);
            self.a[i] += v;
        }
    }

    /// Multiply in place by `1 + c·q^dn·ζ^dr` (`c = ±1`, `±2`, ...).
    fn mul_binomial(&mut self, c: i64, dn: usize, dr: i64) {
        let width = 2 * self.r + 1;
        // descending n keeps every source row untouched when it is read
        for n in (dn..=self.n).rev() {
            for r in -self.r..=self.r {
                let sr = r - dr;
                if sr.abs() > self.r {
                    continue;
                }
                let src = (n - dn) as i64 * width + sr + self.r;
                let v = Integer::from(&self.a[src as usize] * c);
                let i = self.idx(n, r);
                self.a[i] += v;
            }
        }
    }

    /// Multiply in place by `1/(1 − q^dn)`.
    fn div_one_minus_q(&mut self, dn: usize) {
        for n in dn..=self.n {
            for r in -self.r..=self.r {
                let v = self.get(n - dn, r).clone();
                let i = self.idx(n, r);
                self.a[i] += v;
            }
        }
    }

    fn mul_q_series(&self, f: &[Integer]) -> Laurent2 {
        let mut out = Laurent2::new(self.n, self.r);
        for n in 0..=self.n {
            for m in 0..=n.min(f.len() - 1) {
                if f[m] == 0 {
                    continue;
                }
                for r in -self.r..=self.r {
                    let v = Integer::from(&f[m] * self.get(n - m, r));
                    out.add(n, r, &v);
                }
            }
        }
        out
    }
}

/// `φ_{−2,1} = (ζ − 2 + ζ^{−1}) Π_{n>=1} (1 − qⁿζ)²(1 − qⁿζ^{−1})²/(1 − qⁿ)⁴`.
fn phi_minus2(n_max: usize) -> Laurent2 {
    let rb = 2 * n_max as i64 + 4;
    let mut p = Laurent2::new(n_max, rb);
    p.add(0, 1, &Integer::from(1));
    p.add(0, 0, &Integer::from(-2));
    p.add(0, -1, &Integer::from(1));
    for n in 1..=n_max {
        for _ in 0..2 {
            p.mul_binomial(-1, n, 1);
            p.mul_binomial(-1, n, -1);
        }
        for _ in 0..4 {
            p.div_one_minus_q(n);
        }
    }
    p
}

/// `φ_{0,1} = 12 φ_{−2,1} · (1/12 + ζ/(1−ζ)² + Σ_{n>=1} Σ_{d|n} d (ζ^d − 2 + ζ^{−d}) qⁿ)`.
///
/// The middle term cancels the prefactor `(1−ζ)²/ζ` of `φ_{−2,1}` and is
/// handled by expanding the bare product.
fn phi_zero(n_max: usize) -> Laurent2 {
    let m2 = phi_minus2(n_max);
    let rb = m2.r;
    // bare product Π(...) without the (ζ − 2 + ζ^{-1}) prefactor
    let mut bare = Laurent2::new(n_max, rb);
    bare.add(0, 0, &Integer::from(1));
    for n in 1..=n_max {
        for _ in 0..2 {
            bare.mul_binomial(-1, n, 1);
            bare.mul_binomial(-1, n, -1);
        }
        for _ in 0..4 {
            bare.div_one_minus_q(n);
        }
    }
    let mut out = Laurent2::new(n_max, rb);
    for i in 0..out.a.len() {
        out.a[i] = Integer::from(&m2.a[i] + &bare.a[i] * 12u32);
    }
    // 12 φ_{−2,1} Σ_{n>=1} Σ_{d|n} d (ζ^d − 2 + ζ^{−d}) qⁿ
    for n in 1..=n_max {
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            let di = d as i64;
            for (dr, c) in [(di, 12 * di), (0, -24 * di), (-di, 12 * di)] {
                for m in 0..=n_max - n {
                    for r in -rb..=rb {
                        let v = m2.get(m, r);
                        if *v != 0 {
                            let t = Integer::from(v * c);
                            out.add(m + n, r + dr, &t);
                        }
                    }
                }
            }
        }
    }
    out
}

/// The cusp form `φ_{k,1}` from the triple-product expansions. Also checks
/// that each coefficient depends on `(n, r)` only through `4n − r²`.
pub fn jacobi_cusp_form_product(weight: u32, d_max: u64) -> Result<JacobiFormTable, SiegelError> {
    let n_max = (d_max / 4) as usize + 1;
    let base = match weight {
        10 => phi_minus2(n_max),
        12 => phi_zero(n_max),
        w => return Err(SiegelError::UnsupportedWeight(w)),
    };
    let delta: Vec<Integer> = delta_q_expansion(n_max)
        .coefficients
        .iter()
        .map(|c| c.numer().clone())
        .collect();
    let prod = base.mul_q_series(&delta);
    let mut coefficients = vec![Rational::new(); d_max as usize + 1];
    let mut seen = vec![false; d_max as usize + 1];
    for n in 0..=n_max {
        for r in -(prod.r)..=prod.r {
            let d = 4 * n as i64 - r * r;
            if d < 0 || d > d_max as i64 {
                continue;
            }
            // coefficients with n near the truncation edge are complete
            let v = Rational::from(prod.get(n, r).clone());
            let d = d as usize;
            if seen[d] {
                assert_eq!(coefficients[d], v, "c(n, r) not a function of 4n − r² at D = {d}");
            } else {
                coefficients[d] = v;
                seen[d] = true;
            }
        }
    }
    Ok(JacobiFormTable { weight, d_max, coefficients }.normalised_at_three())
}

// ---------------------------------------------------------------------------
// Binary quadratic forms
// ---------------------------------------------------------------------------

/// `Uᵀ T U` for `T = (n, r, m)`.
pub fn transform(t: (i64, i64, i64), u: &Mat2) -> (i64, i64, i64) {
    let (n, r, m) = t;
    let (a, b, c, d) = (u[0][0], u[0][1], u[1][0], u[1][1]);
    // columns (a, c) and (b, d)
    let q = |x: i64, y: i64| n * x * x + r * x * y + m * y * y;
    let n2 = q(a, c);
    let m2 = q(b, d);
    let r2 = 2 * n * a * b + r * (a * d + b * c) + 2 * m * c * d;
    (n2, r2, m2)
}

fn check_positive(t: (i64, i64, i64)) -> Result<(), SiegelError> {
    let (n, r, m) = t;
    if n > 0 && 4 * n * m - r * r > 0 {
        Ok(())
    } else {
        Err(SiegelError::NotPositiveDefinite(n, r, m))
    }
}

/// Reduction under `GL₂(ℤ)`: returns `(T', U)` with `T' = Uᵀ T U` and
/// `0 <= r' <= n' <= m'`, which determines the class uniquely.
pub fn qf_reduce(t: (i64, i64, i64)) -> Result<((i64, i64, i64), Mat2), SiegelError> {
    check_positive(t)?;
    let mut cur = t;
    let mut u: Mat2 = [[1, 0], [0, 1]];
    let mul = |a: &Mat2, b: &Mat2| crate::arith::mat_mul(a, b);
    loop {
        let (n, r, m) = cur;
        if r.abs() > n {
            // x -> x − k y with k nearest to r/(2n)
            let k = (r as f64 / (2.0 * n as f64)).round() as i64;
            let s: Mat2 = [[1, -k], [0, 1]];
            cur = transform(cur, &s);
            u = mul(&u, &s);
        } else if n > m {
            let s: Mat2 = [[0, -1], [1, 0]];
            cur = transform(cur, &s);
            u = mul(&u, &s);
        } else {
            break;
        }
    }
    if cur.1 < 0 {
        // (n, r, m) and (n, −r, m) are GL₂-equivalent
        let s: Mat2 = [[1, 0], [0, -1]];
        cur = transform(cur, &s);
        u = mul(&u, &s);
    }
    debug_assert_eq!(transform(t, &u), cur);
    Ok((cur, u))
}

/// `#{U ∈ GL₂(ℤ) : Uᵀ T U = T}` by exhaustive search.
pub fn aut_count(t: (i64, i64, i64)) -> Result<u32, SiegelError> {
    aut_count_with_radius(t, None)
}

/// [`aut_count`] with an explicit entry bound; the default bound for the
/// reduced form is `2·sqrt(m/n) + 2`.
pub fn aut_count_with_radius(t: (i64, i64, i64), radius: Option<i64>) -> Result<u32, SiegelError> {
    let (red, _) = qf_reduce(t)?;
    let (n, _, m) = red;
    let b = radius.unwrap_or_else(|| (2.0 * (m as f64 / n as f64).sqrt()).ceil() as i64 + 2);
    let mut count = 0;
    for a in -b..=b {
        for bb in -b..=b {
            for c in -b..=b {
                for d in -b..=b {
                    let det = a * d - bb * c;
                    if det.abs() == 1 && transform(red, &[[a, bb], [c, d]]) == red {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Reduced representatives `(n, r, m)` with `4nm − r² <= disc_max`.
pub fn reduced_forms(disc_max: i64) -> Vec<(i64, i64, i64)> {
    let mut out = vec![];
    let mut n = 1;
    while 3 * n * n <= disc_max {
        for r in 0..=n {
            let mut m = n;
            while 4 * n * m - r * r <= disc_max {
                out.push((n, r, m));
                m += 1;
            }
        }
        n += 1;
    }
    out.sort_by_key(|&(n, r, m)| (4 * n * m - r * r, n, r, m));
    out
}

// ---------------------------------------------------------------------------
// Siegel coefficients
// ---------------------------------------------------------------------------

/// Anything that can answer `c(D)` for an index-1 Jacobi form of known weight.
pub trait JacobiSource {
    fn weight(&self) -> u32;
    fn coefficient(&self, d: u64) -> Result<Rational, SiegelError>;
}

impl JacobiSource for JacobiFormTable {
    fn weight(&self) -> u32 {
        self.weight
    }

    fn coefficient(&self, d: u64) -> Result<Rational, SiegelError> {
        self.c(d).cloned()
    }
}

/// A cusp-form table extended past its bound by the Shimura correspondence:
/// `c(|D₀| f²) = c(|D₀|) Σ_{d | f} μ(d) (D₀/d) d^{k−2} a(f/d)`, where `a` are the
/// Hecke eigenvalues of the weight `2k − 2` eigenform.
#[derive(Debug, Clone)]
pub struct ExtendedJacobi {
    pub table: JacobiFormTable,
    pub eigenform: QExpansion,
}

impl ExtendedJacobi {
    /// `f_max` bounds the square part `f` that can be reached beyond the table.
    pub fn new(table: JacobiFormTable, f_max: usize) -> Result<Self, SiegelError> {
        let eigenform = elliptic_eigenform(2 * table.weight - 2, f_max)?;
        Ok(Self { table, eigenform })
    }

    /// The extension formula, also for `D` inside the table (used by tests).
    pub fn via_hecke(&self, d: u64) -> Result<Rational, SiegelError> {
        if d == 0 || !matches!(d % 4, 0 | 3) {
            return Ok(Rational::new());
        }
        let (d0, f) = fundamental_split(-(d as i64)).expect("residue checked");
        let base = self.table.c(d0.unsigned_abs())?;
        if f as usize > self.eigenform.n_max() {
            return Err(SiegelError::TableTooSmall { needed: d, have: self.table.d_max });
        }
        let mut sum = Rational::new();
        for e in divisors(f) {
            let mu = mobius(e);
            let chi = kronecker(d0, e as i64);
            if mu == 0 || chi == 0 {
                continue;
            }
            let term = Rational::from(Integer::from(e).pow(self.table.weight - 2) * self.eigenform.coeff((f / e) as usize));
            if mu * chi as i64 > 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        Ok(sum * base)
    }
}

impl JacobiSource for ExtendedJacobi {
    fn weight(&self) -> u32 {
        self.table.weight
    }

    fn coefficient(&self, d: u64) -> Result<Rational, SiegelError> {
        if d <= self.table.d_max {
            self.table.c(d).cloned()
        } else {
            self.via_hecke(d)
        }
    }
}

/// `A(T) = Σ_{d | gcd(n, r, m)} d^{k−1} c((4nm − r²)/d²)`.
pub fn sk_fourier<J: JacobiSource + ?Sized>(t: (i64, i64, i64), table: &J) -> Result<Rational, SiegelError> {
    check_positive(t)?;
    let (n, r, m) = t;
    let disc = (4 * n * m - r * r) as u64;
    let g = gcd(gcd(n, r), m).unsigned_abs();
    let mut acc = Rational::new();
    for d in 1..=g {
        if g % d != 0 {
            continue;
        }
        let c = table.coefficient(disc / (d * d))?;
        acc += c * Integer::from(d).pow(table.weight() - 1);
    }
    Ok(acc)
}

/// `a_F(T) = A(T) / (det T)^{k/2 − 3/4}` with `det T = (4nm − r²)/4`.
pub fn normalize_af(t: (i64, i64, i64), k: u32, a: &Rational, prec: u32) -> Result<Float, SiegelError> {
    check_positive(t)?;
    let (n, r, m) = t;
    let det = Float::with_val(prec, 4 * n * m - r * r) / 4u32;
    let e = Float::with_val(prec, 2 * k as i64 - 3) / 4u32;
    Ok(Float::with_val(prec, a) / det.pow(e))
}

/// Exact `A(T)` for all reduced `T` up to a discriminant bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiegelCoefficientTable {
    pub weight: u32,
    pub disc_max: i64,
    pub entries: BTreeMap<(i64, i64, i64), Rational>,
}

impl SiegelCoefficientTable {
    pub fn build(weight: u32, disc_max: i64) -> Result<Self, SiegelError> {
        let jac = jacobi_cusp_form(weight, disc_max as u64)?;
        Self::from_jacobi(&jac, disc_max)
    }

    pub fn from_jacobi(jac: &JacobiFormTable, disc_max: i64) -> Result<Self, SiegelError> {
        let mut entries = BTreeMap::new();
        for t in reduced_forms(disc_max) {
            entries.insert(t, sk_fourier(t, jac)?);
        }
        Ok(Self { weight: jac.weight, disc_max, entries })
    }

    /// `A(T)` for any positive definite `T`, through its reduced form.
    pub fn get(&self, t: (i64, i64, i64)) -> Result<Rational, SiegelError> {
        let (red, _) = qf_reduce(t)?;
        let disc = 4 * red.0 * red.2 - red.1 * red.1;
        self.entries
            .get(&red)
            .cloned()
            .ok_or(SiegelError::TableTooSmall { needed: disc as u64, have: self.disc_max as u64 })
    }

    fn body(&self) -> String {
        let mut s = String::new();
        for ((n, r, m), a) in &self.entries {
            let _ = writeln!(s, "{n} {r} {m} {} {}", a.numer(), a.denom());
        }
        s
    }

    pub fn content_hash(&self) -> String {
        hex(&Sha256::digest(self.body().as_bytes()))
    }

    pub fn save(&self, path: &Path) -> Result<(), SiegelError> {
        let body = self.body();
        let header = format!("# siegel weight={} dmax={} norm=c3 sha256={}\n", self.weight, self.disc_max, hex(&Sha256::digest(body.as_bytes())));
        std::fs::write(path, header + &body)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SiegelError> {
        let text = std::fs::read_to_string(path)?;
        let (header, body) = text.split_once('\n').ok_or_else(|| SiegelError::Cache("empty file".into()))?;
        let fields = parse_header(header, "siegel")?;
        let weight: u32 = field(&fields, "weight")?;
        let disc_max: i64 = field(&fields, "dmax")?;
        let hash: String = field(&fields, "sha256")?;
        if hex(&Sha256::digest(body.as_bytes())) != hash {
            return Err(SiegelError::Cache("content hash mismatch".into()));
        }
        let mut entries = BTreeMap::new();
        for line in body.lines() {
            let v: Vec<&str> = line.split_whitespace().collect();
            if v.len() != 5 {
                return Err(SiegelError::Cache(format!("bad record `{line}`")));
            }
            let p = |s: &str| s.parse::<i64>().map_err(|e| SiegelError::Cache(e.to_string()));
            let num = Integer::parse(v[3]).map_err(|e| SiegelError::Cache(e.to_string()))?;
            let den = Integer::parse(v[4]).map_err(|e| SiegelError::Cache(e.to_string()))?;
            entries.insert((p(v[0])?, p(v[1])?, p(v[2])?), Rational::from((Integer::from(num), Integer::from(den))));
        }
        Ok(Self { weight, disc_max, entries })
    }
}

impl JacobiFormTable {
    fn body(&self) -> String {
        let mut s = String::new();
        for (d, c) in self.coefficients.iter().enumerate() {
            let _ = writeln!(s, "{d} {} {}", c.numer(), c.denom());
        }
        s
    }

    pub fn content_hash(&self) -> String {
        hex(&Sha256::digest(self.body().as_bytes()))
    }

    pub fn save(&self, path: &Path) -> Result<(), SiegelError> {
        let body = self.body();
        let header = format!("# jacobi weight={} dmax={} norm=c3 sha256={}\n", self.weight, self.d_max, hex(&Sha256::digest(body.as_bytes())));
        std::fs::write(path, header + &body)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SiegelError> {
        let text = std::fs::read_to_string(path)?;
        let (header, body) = text.split_once('\n').ok_or_else(|| SiegelError::Cache("empty file".into()))?;
        let fields = parse_header(header, "jacobi")?;
        let weight: u32 = field(&fields, "weight")?;
        let d_max: u64 = field(&fields, "dmax")?;
        let hash: String = field(&fields, "sha256")?;
        if hex(&Sha256::digest(body.as_bytes())) != hash {
            return Err(SiegelError::Cache("content hash mismatch".into()));
        }
        let mut coefficients = vec![Rational::new(); d_max as usize + 1];
        let mut count = 0;
        for line in body.lines() {
            let v: Vec<&str> = line.split_whitespace().collect();
            if v.len() != 3 {
                return Err(SiegelError::Cache(format!("bad record `{line}`")));
            }
            let d: usize = v[0].parse().map_err(|_| SiegelError::Cache(format!("bad D `{}`", v[0])))?;
            if d > d_max as usize {
                return Err(SiegelError::Cache(format!("D = {d} beyond header bound")));
            }
            let num = Integer::parse(v[1]).map_err(|e| SiegelError::Cache(e.to_string()))?;
            let den = Integer::parse(v[2]).map_err(|e| SiegelError::Cache(e.to_string()))?;
            coefficients[d] = Rational::from((Integer::from(num), Integer::from(den)));
            count += 1;
        }
        if count != d_max as usize + 1 {
            return Err(SiegelError::Cache("record count mismatch".into()));
        }
        Ok(Self { weight, d_max, coefficients })
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn parse_header(line: &str, kind: &str) -> Result<BTreeMap<String, String>, SiegelError> {
    let mut it = line.split_whitespace();
    if it.next() != Some("#") || it.next() != Some(kind) {
        return Err(SiegelError::Cache(format!("expected a {kind} header")));
    }
    Ok(it
        .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect())
}

fn field<T: std::str::FromStr>(fields: &BTreeMap<String, String>, key: &str) -> Result<T, SiegelError> {
    fields
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| SiegelError::Cache(format!("header field `{key}` missing or malformed")))
}
