//! Exact exponential sums: the rank-one sums `H^±(P, S; c)`, Salié sums and
//! matrix Kloosterman sums `K(Q, T; C)` over symplectic double cosets.
//!
//! Sums are accumulated as histograms of integer phase numerators over a
//! common denominator, so no rounding happens until [`ExpSumValue::eval`].

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::rc::Rc;

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float, Integer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{
    self, divisor_tau, gcd, is_prime, jacobi, mat_adj, mat_det, mat_inv_unimodular, mat_mul,
    mat_transpose, mod_inverse, modp, smith_normal_form, smith_normal_form_general, ArithError,
    Mat2, RationalPhase,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpSumError {
    #[error("modulus {0} is even")]
    EvenModulus(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("modulus matrix is singular")]
    SingularModulus,
    #[error("form ({0}, {1}, {2}) is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),
    #[error("coset cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Half-integral symmetric matrix `(p1, p2/2; p2/2, p4)`, positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfIntegralForm {
    pub p1: i64,
    pub p2: i64,
    pub p4: i64,
}

impl HalfIntegralForm {
    pub const IDENTITY: Self = Self { p1: 1, p2: 0, p4: 1 };
    pub const HEXAGONAL: Self = Self { p1: 1, p2: 1, p4: 1 };

    pub fn new(p1: i64, p2: i64, p4: i64) -> Result<Self, ExpSumError> {
        let f = Self { p1, p2, p4 };
        if p1 > 0 && f.det2() > 0 {
            Ok(f)
        } else {
            Err(ExpSumError::NotPositiveDefinite(p1, p2, p4))
        }
    }

    /// `det(2P) = 4 p1 p4 - p2²`.
    pub fn det2(&self) -> i64 {
        4 * self.p1 * self.p4 - self.p2 * self.p2
    }

    /// `det P` as a float.
    pub fn det(&self) -> f64 {
        self.det2() as f64 / 4.0
    }

    /// The integral matrix `2P`.
    pub fn doubled(&self) -> Mat2 {
        [[2 * self.p1, self.p2], [self.p2, 2 * self.p4]]
    }

    /// Inverse of [`Self::doubled`]; panics on odd diagonal or asymmetry.
    pub fn from_doubled(m: &Mat2) -> Self {
        assert!(m[0][1] == m[1][0] && m[0][0] % 2 == 0 && m[1][1] % 2 == 0);
        Self { p1: m[0][0] / 2, p2: m[0][1], p4: m[1][1] / 2 }
    }

    /// `U · P · Uᵀ`.
    pub fn congruent(&self, u: &Mat2) -> Self {
        Self::from_doubled(&mat_mul(&mat_mul(u, &self.doubled()), &mat_transpose(u)))
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let h = self.p2 as f64 / 2.0;
        [[self.p1 as f64, h], [h, self.p4 as f64]]
    }

    /// Value of the quadratic form at `(x, y)`.
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.p1 * x * x + self.p2 * x * y + self.p4 * y * y
    }
}

/// Exact value `e(outer) · Σ_j counts[j] · e(j / den)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpSumValue {
    pub outer: RationalPhase,
    pub den: u64,
    pub counts: Vec<i64>,
}

thread_local! {
    static ROOTS_HP: RefCell<HashMap<(u64, u32), Rc<Vec<Complex>>>> = RefCell::new(HashMap::new());
    static ROOTS_F64: RefCell<HashMap<u64, Rc<Vec<Complex64>>>> = RefCell::new(HashMap::new());
}

fn roots_hp(den: u64, prec: u32) -> Rc<Vec<Complex>> {
    ROOTS_HP.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(r) = cache.get(&(den, prec)) {
            return r.clone();
        }
        let wp = prec + 16;
        let tau = Float::with_val(wp, Constant::Pi) * 2u32;
        let mut v = Vec::with_capacity(den as usize);
        for j in 0..den {
            let ang = Float::with_val(wp, &tau * j) / den;
            let (s, c) = ang.sin_cos(Float::new(wp));
            v.push(Complex::with_val(prec, (c, s)));
        }
        let r = Rc::new(v);
        if den <= 1 << 14 {
            cache.insert((den, prec), r.clone());
        }
        r
    })
}

fn roots_f64(den: u64) -> Rc<Vec<Complex64>> {
    ROOTS_F64.with(|cache| {
        let mut cache = cache.borrow_mut();
        if let Some(r) = cache.get(&den) {
            return r.clone();
        }
        let v: Vec<Complex64> = (0..den)
            .map(|j| {
                let x = j as f64 / den as f64;
                let (s, c) = (std::f64::consts::TAU * x).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        let r = Rc::new(v);
        if den <= 1 << 16 {
            cache.insert(den, r.clone());
        }
        r
    })
}

impl ExpSumValue {
    pub fn zero() -> Self {
        Self { outer: RationalPhase::zero(), den: 1, counts: vec![0] }
    }

    /// Number of terms (with multiplicity) in the sum.
    pub fn term_count(&self) -> i64 {
        self.counts.iter().sum()
    }

    pub fn is_zero_sum(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, prec: u32) -> Complex {
        let wp = prec + 16;
        let roots = roots_hp(self.den, wp);
        let mut acc = Complex::with_val(wp, 0);
        for (j, &n) in self.counts.iter().enumerate() {
            if n != 0 {
                acc += Complex::with_val(wp, &roots[j] * n);
            }
        }
        acc *= self.outer.eval(wp);
        Complex::with_val(prec, acc)
    }

    pub fn eval_f64(&self) -> Complex64 {
        let roots = roots_f64(self.den);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &n) in self.counts.iter().enumerate() {
            if n != 0 {
                acc += roots[j] * n as f64;
            }
        }
        acc * self.outer.eval_f64()
    }
}

/// `H^±(P, S; c)` as an exact phase histogram. `sign = +1` selects `H^+`.
pub fn h_sum_exact(p: &HalfIntegralForm, s: &HalfIntegralForm, c: u64, sign: i32) -> ExpSumValue {
    assert!(c >= 1, "modulus must be positive");
    assert!(sign == 1 || sign == -1);
    if s.p4 != p.p4 {
        return ExpSumValue::zero();
    }
    let outer = RationalPhase::new(
        Integer::from(-(sign as i64)) * p.p2 * s.p2,
        Integer::from(2u64 * c) * s.p4,
    )
    .expect("nonzero denominator");
    let mut counts = vec![0i64; c as usize];
    let cm = c as i64;
    let s4 = modp(s.p4, c) as i64;
    let p2 = modp(-(sign as i64) * p.p2, c) as i64;
    let p1 = modp(p.p1, c) as i64;
    let s1 = modp(s.p1, c) as i64;
    let s2 = modp(s.p2, c) as i64;
    for d1 in 0..cm {
        if gcd(d1, cm) != 1 {
            continue;
        }
        let inv = mod_inverse(d1, c).expect("unit") as i64;
        let a = inv * s4 % cm;
        let b = (inv * p2 + s2) % cm;
        let mut v = ((inv * p1) % cm + (d1 * s1) % cm) % cm;
        // v(d2) = a d2² + b d2 + const, stepped by first differences
        let mut delta = (a + b) % cm;
        let two_a = 2 * a % cm;
        for _ in 0..cm {
            counts[v as usize] += 1;
            v += delta;
            if v >= cm {
                v -= cm;
            }
            delta += two_a;
            if delta >= cm {
                delta -= cm;
            }
        }
    }
    ExpSumValue { outer, den: c, counts }
}

/// `H^±(P, S; c)` evaluated at `prec` bits.
pub fn h_sum(p: &HalfIntegralForm, s: &HalfIntegralForm, c: u64, sign: i32, prec: u32) -> Complex {
    h_sum_exact(p, s, c, sign).eval(prec)
}

/// `max_± |H^±(P,S;c)| / (τ(c) · c · gcd(det 2P, det 2S, c))`.
pub fn h_bound_margin(p: &HalfIntegralForm, s: &HalfIntegralForm, c: u64, prec: u32) -> Result<Float, ExpSumError> {
    if c == 0 {
        return Err(ExpSumError::ZeroModulus);
    }
    if c % 2 == 0 {
        return Err(ExpSumError::EvenModulus(c));
    }
    let g = gcd(gcd(p.det2(), s.det2()), c as i64) as u64;
    let bound = Float::with_val(prec, divisor_tau(c) * c * g);
    let mut best = Float::with_val(prec, 0);
    for sign in [1, -1] {
        let v = h_sum(p, s, c, sign, prec + 32);
        let r = Float::with_val(prec, v.abs().real()) / &bound;
        if r > best {
            best = r;
        }
    }
    Ok(best)
}

/// Salié sum `Σ*_{d mod p} (d/p) e((m d + n d̄)/p)`.
///
/// When `p ∤ mn` the sum equals `ε_p √p (n/p) Σ_{y² ≡ 4mn} e(y/p)`, which has
/// two, one or zero terms according to `(mn/p)`. Other cases are summed
/// directly.
pub fn salie_sum(m: i64, n: i64, p: u64, prec: u32) -> Result<Complex, ExpSumError> {
    if p % 2 == 0 || !is_prime(p) {
        return Err(ExpSumError::NotPrime(p));
    }
    let wp = prec + 16;
    if modp(m, p) == 0 || modp(n, p) == 0 {
        return Ok(Complex::with_val(prec, salie_direct(m, n, p, wp)));
    }
    let target = modp(4 * modp(m, p) as i64 % p as i64 * modp(n, p) as i64, p);
    let mut roots_sum = Complex::with_val(wp, 0);
    let mut found = 0;
    let half = (p - 1) / 2;
    for y in 0..=half {
        if (y as u128 * y as u128 % p as u128) as u64 == target {
            let e1 = RationalPhase::new(y, p)?.eval(wp);
            roots_sum += &e1;
            found += 1;
            if y != 0 {
                roots_sum += e1.conj();
                found += 1;
            }
            break;
        }
    }
    debug_assert_eq!(found as i32, 1 + jacobi(m * n % p as i64, p));
    let mut v = roots_sum * Float::with_val(wp, p).sqrt();
    if p % 4 == 3 {
        v *= Complex::with_val(wp, (0, 1));
    }
    if jacobi(n, p) < 0 {
        v = -v;
    }
    Ok(Complex::with_val(prec, v))
}

fn salie_direct(m: i64, n: i64, p: u64, wp: u32) -> Complex {
    let mut counts = vec![0i64; p as usize];
    for d in 1..p as i64 {
        let inv = mod_inverse(d, p).expect("prime modulus") as i64;
        let ph = modp(m * d + n * inv, p) as usize;
        counts[ph] += jacobi(d, p) as i64;
    }
    ExpSumValue { outer: RationalPhase::zero(), den: p, counts }.eval(wp)
}

/// One element of `X(C)`: a symplectic matrix `(A B; C D)` for fixed `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymplecticCosetRep {
    pub a: Mat2,
    pub b: Mat2,
    pub d: Mat2,
}

/// Checks `A Bᵀ`, `C Dᵀ` symmetric and `A Dᵀ − B Cᵀ = I`.
pub fn is_symplectic(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> bool {
    let sym = |m: Mat2| m[0][1] == m[1][0];
    let abt = mat_mul(a, &mat_transpose(b));
    let cdt = mat_mul(c, &mat_transpose(d));
    let adt = mat_mul(a, &mat_transpose(d));
    let bct = mat_mul(b, &mat_transpose(c));
    let id = [[adt[0][0] - bct[0][0], adt[0][1] - bct[0][1]], [adt[1][0] - bct[1][0], adt[1][1] - bct[1][1]]];
    sym(abt) && sym(cdt) && id == arith::IDENTITY
}

fn minors_gcd(c: &Mat2, d: &Mat2) -> i64 {
    let cols = [[c[0][0], c[1][0]], [c[0][1], c[1][1]], [d[0][0], d[1][0]], [d[0][1], d[1][1]]];
    let mut g = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            g = gcd(g, cols[i][0] * cols[j][1] - cols[i][1] * cols[j][0]);
        }
    }
    g
}

/// Completes a coprime symmetric pair `(C, D)` to `(A B; C D) ∈ Sp₄(ℤ)`.
fn complete_pair(c: &Mat2, d: &Mat2) -> (Mat2, Mat2) {
    let stacked = vec![vec![c[0][0], c[0][1], d[0][0], d[0][1]], vec![c[1][0], c[1][1], d[1][0], d[1][1]]];
    let (p, snf, q) = smith_normal_form_general(&stacked);
    debug_assert!(snf[0][0] == 1 && snf[1][1] == 1);
    // (C D) · Q[:, 0..2] · P = I
    let mut xy = [[0i64; 2]; 4];
    for (i, row) in xy.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            *slot = q[i][0] * p[0][j] + q[i][1] * p[1][j];
        }
    }
    let x: Mat2 = [xy[0], xy[1]];
    let y: Mat2 = [xy[2], xy[3]];
    let mut a = mat_transpose(&y);
    let mut b = mat_transpose(&x);
    b = [[-b[0][0], -b[0][1]], [-b[1][0], -b[1][1]]];
    // make A Bᵀ symmetric with A += R C, B += R D, R = (0 n; 0 0)
    let abt = mat_mul(&a, &mat_transpose(&b));
    let n = abt[0][1] - abt[1][0];
    let r: Mat2 = [[0, n], [0, 0]];
    let rc = mat_mul(&r, c);
    let rd = mat_mul(&r, d);
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] += rc[i][j];
            b[i][j] += rd[i][j];
        }
    }
    debug_assert!(is_symplectic(&a, &b, c, d));
    (a, b)
}

/// Representatives of `Γ∞ \ Sp₄(ℤ) / Γ∞` with lower-left block `C`.
///
/// `C` is brought to Smith form `U₀ C V₀ = diag(d₁, d₂)`; for the diagonal
/// modulus the classes of `D` modulo `diag(d₁, d₂)·Sym₂(ℤ)` form a box, and
/// representatives are transported back by `m(U) = (U 0; 0 U^{-T})` on both
/// sides.
pub fn symplectic_coset_reps(c: &Mat2) -> Result<Vec<SymplecticCosetRep>, ExpSumError> {
    if mat_det(c) == 0 {
        return Err(ExpSumError::SingularModulus);
    }
    let (u0, d0, v0) = smith_normal_form(c);
    let (d1, d2) = (d0[0][0], d0[1][1]);
    let ratio = d2 / d1;
    let u = mat_transpose(&u0);
    let u_inv_t = mat_inv_unimodular(&u0); // (U0ᵀ)^{-T} = U0^{-1}
    let v = mat_inv_unimodular(&v0);
    let v_inv_t = mat_transpose(&v0); // (V0^{-1})^{-T} = V0ᵀ
    let mut out = Vec::new();
    for x in 0..d1 {
        for y in 0..d1 {
            for z in 0..d2 {
                let dd: Mat2 = [[x, y], [ratio * y, z]];
                if minors_gcd(&d0, &dd) != 1 {
                    continue;
                }
                let (a, b) = complete_pair(&d0, &dd);
                let a2 = mat_mul(&mat_mul(&u, &a), &v);
                let b2 = mat_mul(&mat_mul(&u, &b), &v_inv_t);
                let dd2 = mat_mul(&mat_mul(&u_inv_t, &dd), &v_inv_t);
                debug_assert!(is_symplectic(&a2, &b2, c, &dd2));
                out.push(SymplecticCosetRep { a: a2, b: b2, d: dd2 });
            }
        }
    }
    Ok(out)
}

/// Numerator of `tr(A C^{-1} Q + C^{-1} D T)` over the denominator `2|det C|`,
/// reduced into `[0, 2|det C|)`.
pub fn kloosterman_phase_numerator(rep: &SymplecticCosetRep, c: &Mat2, q: &HalfIntegralForm, t: &HalfIntegralForm) -> u64 {
    let det = mat_det(c);
    let adj = mat_adj(c);
    let first = mat_mul(&mat_mul(&rep.a, &adj), &q.doubled());
    let second = mat_mul(&mat_mul(&adj, &rep.d), &t.doubled());
    let mut num = arith::mat_trace(&first) as i128 + arith::mat_trace(&second) as i128;
    if det < 0 {
        num = -num;
    }
    num.rem_euclid(2 * det.unsigned_abs() as i128) as u64
}

/// `K(Q, T; C)` as an exact phase histogram.
pub fn matrix_kloosterman_exact(q: &HalfIntegralForm, t: &HalfIntegralForm, c: &Mat2) -> Result<ExpSumValue, ExpSumError> {
    let reps = symplectic_coset_reps(c)?;
    Ok(kloosterman_from_reps(&reps, q, t, c))
}

/// `K(Q, T; C)` from precomputed representatives.
pub fn kloosterman_from_reps(reps: &[SymplecticCosetRep], q: &HalfIntegralForm, t: &HalfIntegralForm, c: &Mat2) -> ExpSumValue {
    let den = 2 * mat_det(c).unsigned_abs();
    let mut counts = vec![0i64; den as usize];
    for rep in reps {
        counts[kloosterman_phase_numerator(rep, c, q, t) as usize] += 1;
    }
    ExpSumValue { outer: RationalPhase::zero(), den, counts }
}

/// `K(Q, T; C)` evaluated at `prec` bits.
pub fn matrix_kloosterman(q: &HalfIntegralForm, t: &HalfIntegralForm, c: &Mat2, prec: u32) -> Result<Complex, ExpSumError> {
    Ok(matrix_kloosterman_exact(q, t, c)?.eval(prec))
}

/// Writes coset representatives for `C` as line-delimited integer records.
pub fn save_coset_reps(path: &Path, c: &Mat2, reps: &[SymplecticCosetRep]) -> Result<(), ExpSumError> {
    let mut s = String::new();
    let _ = writeln!(s, "C {} {} {} {} {}", c[0][0], c[0][1], c[1][0], c[1][1], reps.len());
    for r in reps {
        let vals = [r.a, r.b, r.d].iter().flat_map(|m| m.iter().flatten().copied()).collect::<Vec<_>>();
        let line = vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{line}");
    }
    let mut f = std::fs::File::create(path).map_err(|e| ExpSumError::Cache(e.to_string()))?;
    f.write_all(s.as_bytes()).map_err(|e| ExpSumError::Cache(e.to_string()))
}

/// Reads a file written by [`save_coset_reps`], checking the key and every
/// record's symplectic relations.
pub fn load_coset_reps(path: &Path, c: &Mat2) -> Result<Vec<SymplecticCosetRep>, ExpSumError> {
    let bad = |m: &str| ExpSumError::Cache(m.to_string());
    let f = std::fs::File::open(path).map_err(|e| ExpSumError::Cache(e.to_string()))?;
    let mut lines = BufReader::new(f).lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?.map_err(|e| bad(&e.to_string()))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    let parse = |x: &str| x.parse::<i64>().map_err(|_| bad("malformed integer"));
    if h.len() != 6 || h[0] != "C" {
        return Err(bad("malformed header"));
    }
    let key = [[parse(h[1])?, parse(h[2])?], [parse(h[3])?, parse(h[4])?]];
    if &key != c {
        return Err(bad("modulus mismatch"));
    }
    let count = parse(h[5])? as usize;
    let mut out = Vec::with_capacity(count);
    for line in lines {
        let line = line.map_err(|e| bad(&e.to_string()))?;
        let v: Vec<i64> = line.split_whitespace().map(parse).collect::<Result<_, _>>()?;
        if v.len() != 12 {
            return Err(bad("malformed record"));
        }
        let m = |o: usize| [[v[o], v[o + 1]], [v[o + 2], v[o + 3]]];
        let rep = SymplecticCosetRep { a: m(0), b: m(4), d: m(8) };
        if !is_symplectic(&rep.a, &rep.b, c, &rep.d) {
            return Err(bad("record is not symplectic"));
        }
        out.push(rep);
    }
    if out.len() != count {
        return Err(bad("record count mismatch"));
    }
    Ok(out)
}
