//! Exact integer, rational and character arithmetic.
//!
//! Everything here is a pure function. Integer work that can grow is done in
//! `rug::Integer`/`rug::Rational`; small modular helpers widen to `i128`
//! internally so no intermediate product can overflow.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use thiserror::Error;

/// Errors raised by the arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{a} is not invertible modulo {c} (gcd {g})")]
    NotCoprime { a: i64, c: u64, g: u64 },
    #[error("modulus {0} is even")]
    EvenModulus(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("argument {0} outside the supported domain")]
    Domain(String),
    #[error("requested precision of {0} bits cannot be certified")]
    PrecisionUnreachable(u32),
}

/// Integral 2x2 matrix in row-major order.
pub type Mat2 = [[i64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

// ---------------------------------------------------------------------------
// Elementary number theory
// ---------------------------------------------------------------------------

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut x0, mut x1) = (1i128, 0i128);
    let (mut y0, mut y1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (r0, x0, y0) = (-r0, -x0, -y0);
    }
    (r0 as i64, x0 as i64, y0 as i64)
}

/// Least nonnegative residue of `a` modulo `c`.
#[inline]
pub fn modp(a: i64, c: u64) -> u64 {
    (a as i128).rem_euclid(c as i128) as u64
}

/// Multiplicative inverse of `a` modulo `c`, in `[0, c)`.
pub fn mod_inverse(a: i64, c: u64) -> Result<u64, ArithError> {
    if c == 0 {
        return Err(ArithError::ZeroModulus);
    }
    if c == 1 {
        return Ok(0);
    }
    let (g, x, _) = ext_gcd(modp(a, c) as i64, c as i64);
    if g != 1 {
        return Err(ArithError::NotCoprime { a, c, g: g as u64 });
    }
    Ok(modp(x, c))
}

/// Prime factorisation by trial division, primes in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).first() == Some(&(n, 1))
}

/// All positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Number of positive divisors.
pub fn divisor_tau(n: u64) -> u64 {
    assert!(n >= 1, "divisor_tau needs n >= 1");
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Sum of `k`-th powers of divisors, exact.
pub fn divisor_sigma(n: u64, k: u32) -> Integer {
    let mut s = Integer::new();
    for d in divisors(n) {
        s += Integer::from(d).pow(k);
    }
    s
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = modp(a, n);
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(d/n)` for arbitrary integers.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut res = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && d < 0 {
        res = -res;
    }
    let tz = m.trailing_zeros();
    if tz > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && tz % 2 == 1 {
            res = -res;
        }
        m >>= tz;
    }
    res * jacobi(d, m)
}

/// Splits `m != 0` with `m ≡ 0, 1 (mod 4)` as `m = d0 * f^2` with `d0` a
/// fundamental discriminant (or 1). Returns `None` for other residues.
pub fn fundamental_split(m: i64) -> Option<(i64, u64)> {
    if m == 0 || !matches!(m.rem_euclid(4), 0 | 1) {
        return None;
    }
    let sign = m.signum();
    let mut core = 1i64;
    let mut f = 1u64;
    for (p, e) in factorize(m.unsigned_abs()) {
        f *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p as i64;
        }
    }
    core *= sign;
    if core.rem_euclid(4) == 1 {
        Some((core, f))
    } else {
        // core ≡ 2, 3 mod 4 needs a factor 4 pulled out of f^2
        debug_assert!(f % 2 == 0);
        Some((4 * core, f / 2))
    }
}

// ---------------------------------------------------------------------------
// Characters
// ---------------------------------------------------------------------------

/// The odd character modulo 4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DirichletCharacterMod4;

impl DirichletCharacterMod4 {
    pub fn eval(&self, n: i64) -> i32 {
        match n.rem_euclid(4) {
            1 => 1,
            3 => -1,
            _ => 0,
        }
    }
}

/// Real primitive character `n -> (disc/n)`; `disc = 1` is the trivial character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticCharacter {
    pub disc: i64,
}

impl QuadraticCharacter {
    pub const TRIVIAL: Self = Self { disc: 1 };

    pub fn conductor(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn eval(&self, n: i64) -> i32 {
        if self.disc == 1 {
            1
        } else {
            kronecker(self.disc, n)
        }
    }
}

impl From<DirichletCharacterMod4> for QuadraticCharacter {
    fn from(_: DirichletCharacterMod4) -> Self {
        Self { disc: -4 }
    }
}

// ---------------------------------------------------------------------------
// Exact phases and Gauss sums
// ---------------------------------------------------------------------------

/// The root of unity `e(num/den) = exp(2πi num/den)` kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPhase {
    num: Integer,
    den: Integer,
}

impl RationalPhase {
    /// Builds the phase; the numerator is reduced into `[0, den)`.
    pub fn new(num: impl Into<Integer>, den: impl Into<Integer>) -> Result<Self, ArithError> {
        let mut num = num.into();
        let mut den = den.into();
        if den == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = Integer::from(num.gcd_ref(&den));
        num /= &g;
        den /= &g;
        num = num.modulo(&den);
        Ok(Self { num, den })
    }

    pub fn zero() -> Self {
        Self { num: Integer::ZERO, den: Integer::from(1) }
    }

    pub fn num(&self) -> &Integer {
        &self.num
    }

    pub fn den(&self) -> &Integer {
        &self.den
    }

    /// Sum of two phases (product of the roots of unity).
    pub fn add(&self, other: &Self) -> Self {
        let num = Integer::from(&self.num * &other.den) + Integer::from(&other.num * &self.den);
        let den = Integer::from(&self.den * &other.den);
        Self::new(num, den).expect("positive denominator")
    }

    pub fn eval(&self, prec: u32) -> Complex {
        let wp = prec + 16;
        let mut ang = Float::with_val(wp, Constant::Pi) * 2u32;
        ang *= Rational::from((self.num.clone(), self.den.clone()));
        let (s, c) = ang.sin_cos(Float::new(wp));
        Complex::with_val(prec, (c, s))
    }

    pub fn eval_f64(&self) -> num_complex::Complex64 {
        let x = Rational::from((self.num.clone(), self.den.clone())).to_f64();
        num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * x)
    }
}

/// `Σ_{x mod c} e((a x² + b x)/c)` for odd `c`, by completing the square.
pub fn quadratic_gauss_sum(a: i64, b: i64, c: u64, prec: u32) -> Result<Complex, ArithError> {
    if c == 0 {
        return Err(ArithError::ZeroModulus);
    }
    if c % 2 == 0 {
        return Err(ArithError::EvenModulus(c));
    }
    let g = gcd_u64(modp(a, c), c);
    if g != 1 && c != 1 {
        return Err(ArithError::NotCoprime { a, c, g });
    }
    if c == 1 {
        return Ok(Complex::with_val(prec, 1));
    }
    // a(x + b/(2a))^2 - b^2/(4a): the shift is a bijection mod odd c
    let inv4a = mod_inverse(4 * modp(a, c) as i64 % c as i64, c)? as i128;
    let bb = (modp(b, c) as i128).pow(2) % c as i128;
    let num = (-(bb * inv4a)).rem_euclid(c as i128);
    let phase = RationalPhase::new(Integer::from(num), Integer::from(c))?.eval(prec + 8);
    let mut v = Complex::with_val(prec + 8, (Float::with_val(prec + 8, c).sqrt(), 0));
    if c % 4 == 3 {
        v *= Complex::with_val(prec, (0, 1));
    }
    if jacobi(a, c) < 0 {
        v = -v;
    }
    v *= phase;
    Ok(Complex::with_val(prec, v))
}

// ---------------------------------------------------------------------------
// Bernoulli numbers, L-values at non-positive integers, Cohen numbers
// ---------------------------------------------------------------------------

/// Bernoulli numbers `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b = vec![Rational::new(); n + 1];
    b[0] = Rational::from(1);
    for m in 1..=n {
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += Rational::from(bj * &binom);
            binom *= (m + 1 - j) as u64;
            binom /= (j + 1) as u64;
        }
        b[m] = -acc / Rational::from(m as u64 + 1);
    }
    b
}

fn binomial(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// Generalised Bernoulli number `B_{n,χ}` of a real primitive character.
///
/// Uses `B_{n,χ} = Σ_j C(n,j) B_j f^{j-1} S_{n-j}` with `S_m = Σ_{a=1}^{f} χ(a) a^m`.
pub fn generalized_bernoulli(chi: QuadraticCharacter, n: u32) -> Rational {
    assert!(n >= 1);
    let f = chi.conductor();
    let sums = character_power_sums(chi, n);
    let bern = bernoulli_numbers(n as usize);
    let mut acc = Rational::new();
    for j in 0..=n {
        if bern[j as usize] == 0 {
            continue;
        }
        let term = Rational::from(&bern[j as usize] * binomial(n, j))
            * Rational::from(&sums[(n - j) as usize]);
        let fj = if j == 0 {
            Rational::from((1, f))
        } else {
            Rational::from(Integer::from(f).pow(j - 1))
        };
        acc += term * fj;
    }
    acc
}

/// `S_m = Σ_{a=1}^{f} χ(a) a^m` for `m = 0..=n`.
fn character_power_sums(chi: QuadraticCharacter, n: u32) -> Vec<Integer> {
    let f = chi.conductor();
    // χ is completely multiplicative: evaluate on primes, extend with a sieve.
    let mut spf = vec![0u32; f as usize + 1];
    let mut val = vec![0i8; f as usize + 1];
    if f >= 1 {
        val[1] = 1;
    }
    for a in 2..=f as usize {
        if spf[a] == 0 {
            let mut j = a;
            while j <= f as usize {
                if spf[j] == 0 {
                    spf[j] = a as u32;
                }
                j += a;
            }
            val[a] = chi.eval(a as i64) as i8;
        } else {
            let p = spf[a] as usize;
            val[a] = val[p] * val[a / p];
        }
    }
    let small = (f as f64).powi(n as i32 + 1) < 1.0e36;
    let mut out = vec![Integer::new(); n as usize + 1];
    if small {
        let mut acc = vec![0i128; n as usize + 1];
        for a in 1..=f as usize {
            let v = val[a] as i128;
            if v == 0 {
                continue;
            }
            let mut pw = v;
            for slot in acc.iter_mut() {
                *slot += pw;
                pw *= a as i128;
            }
        }
        for (o, a) in out.iter_mut().zip(acc) {
            *o = Integer::from(a);
        }
    } else {
        for a in 1..=f as usize {
            let v = val[a] as i64;
            if v == 0 {
                continue;
            }
            let mut pw = Integer::from(v);
            for slot in out.iter_mut() {
                *slot += &pw;
                pw *= a as u64;
            }
        }
    }
    out
}

/// Exact `L(1 - n, χ) = -B_{n,χ}/n`.
pub fn l_value_nonpositive(chi: QuadraticCharacter, n: u32) -> Rational {
    -generalized_bernoulli(chi, n) / Rational::from(n)
}

/// Cohen's number `H(r, N)`.
pub fn cohen_h(r: u32, n: u64) -> Rational {
    assert!(r >= 1);
    if n == 0 {
        let b = bernoulli_numbers(2 * r as usize);
        return -Rational::from(&b[2 * r as usize] / Rational::from(2 * r));
    }
    let m = if r % 2 == 0 { n as i64 } else { -(n as i64) };
    let Some((d0, f)) = fundamental_split(m) else {
        return Rational::new();
    };
    let chi = QuadraticCharacter { disc: d0 };
    let lval = l_value_nonpositive(chi, r);
    let mut s = Integer::new();
    for d in divisors(f) {
        let mu = mobius(d);
        if mu == 0 {
            continue;
        }
        let c = chi.eval(d as i64);
        if c == 0 {
            continue;
        }
        let term = Integer::from(d).pow(r - 1) * divisor_sigma(f / d, 2 * r - 1);
        if mu * c as i64 > 0 {
            s += term;
        } else {
            s -= term;
        }
    }
    lval * Rational::from(s)
}

// ---------------------------------------------------------------------------
// L(s, χ_{-4}) on the real line
// ---------------------------------------------------------------------------

/// `L(s, χ₋₄)` (order 0) or its derivative (order 1) for real `s >= 1`.
///
/// Cohen–Rodriguez Villegas–Zagier acceleration of the alternating series.
/// Both sequences are moments of a measure on `[0, 1]` whose total variation
/// is at most 1 (order 0) and `sqrt(ψ'(1)) < 1.3` (order 1), which gives the
/// certified truncation bound `2·V·(3+√8)^{-n}`.
pub fn dirichlet_beta(s: f64, order: u8, prec: u32) -> Result<Float, ArithError> {
    dirichlet_beta_with_bound(s, order, prec).map(|(v, _)| v)
}

/// As [`dirichlet_beta`] and also returns the truncation bound.
pub fn dirichlet_beta_with_bound(s: f64, order: u8, prec: u32) -> Result<(Float, Float), ArithError> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(ArithError::Domain(format!("s = {s}")));
    }
    if order > 1 {
        return Err(ArithError::Domain(format!("derivative order {order}")));
    }
    if !(16..=200_000).contains(&prec) {
        return Err(ArithError::PrecisionUnreachable(prec));
    }
    let rate = (3.0 + 8f64.sqrt()).log2();
    let n = ((prec as f64 + 8.0) / rate).ceil() as u64 + 2;
    let wp = prec + (n as f64 * rate) as u32 + 64;
    let sf = Float::with_val(wp, s);

    let root8 = Float::with_val(wp, 8).sqrt();
    let mut d = (root8 + 3u32).pow(n as u32);
    d = (Float::with_val(wp, 1) / &d + &d) / 2u32;
    let mut b = Float::with_val(wp, -1);
    let mut c = -d.clone();
    let mut acc = Float::with_val(wp, 0);
    for k in 0..n {
        c = Float::with_val(wp, &b - &c);
        let m = Float::with_val(wp, 2 * k + 1);
        let mut a = Float::with_val(wp, m.ln_ref()) * &sf;
        a = (-a).exp();
        if order == 1 {
            a *= -Float::with_val(wp, m.ln_ref());
        }
        acc += Float::with_val(wp, &c * &a);
        let num = (k as f64 + n as f64) * (k as f64 - n as f64);
        b *= num;
        b /= (k as f64 + 0.5) * (k as f64 + 1.0);
    }
    let val = Float::with_val(prec, acc / &d);
    let var = if order == 0 { 1.0 } else { 1.3 };
    let bound = Float::with_val(53, 2.0 * var) / Float::with_val(53, 3.0 + 8f64.sqrt()).pow(n as u32);
    Ok((val, bound))
}

// ---------------------------------------------------------------------------
// Integer matrices
// ---------------------------------------------------------------------------

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat_det(a: &Mat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat_transpose(a: &Mat2) -> Mat2 {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

/// Adjugate, so that `a * adj(a) = det(a) I`.
pub fn mat_adj(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

/// Inverse of a unimodular matrix.
pub fn mat_inv_unimodular(a: &Mat2) -> Mat2 {
    let d = mat_det(a);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    let adj = mat_adj(a);
    [[adj[0][0] * d, adj[0][1] * d], [adj[1][0] * d, adj[1][1] * d]]
}

pub fn mat_trace(a: &Mat2) -> i64 {
    a[0][0] + a[1][1]
}

/// Representative `(a b; 0 d)` of `SL₂(ℤ)\M₂⁺(ℤ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HNFCoset {
    pub a: u64,
    pub b: u64,
    pub d: u64,
}

impl HNFCoset {
    pub fn matrix(&self) -> Mat2 {
        [[self.a as i64, self.b as i64], [0, self.d as i64]]
    }
}

/// Hermite representatives of determinant `delta`; there are `σ₁(delta)` of them.
pub fn hnf_cosets(delta: u64) -> Vec<HNFCoset> {
    let mut out = Vec::new();
    for a in divisors(delta) {
        let d = delta / a;
        for b in 0..d {
            out.push(HNFCoset { a, b, d });
        }
    }
    out
}

/// Smith form of a general integer matrix: returns `(U, D, V)` with
/// `U·M·V = D` diagonal, `d_i | d_{i+1}`, `d_i >= 0` and `U`, `V` unimodular.
pub fn smith_normal_form_general(m: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..rows)
        .map(|i| (0..rows).map(|j| (i == j) as i128).collect())
        .collect();
    let mut v: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| (i == j) as i128).collect())
        .collect();

    for t in 0..rows.min(cols) {
        loop {
            // pivot: smallest nonzero magnitude in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_snf(a, u, v);
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
            let p = a[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(p);
                if q != 0 {
                    for j in 0..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(p);
                if q != 0 {
                    for i in 0..rows {
                        a[i][j] -= q * a[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= q * v[i][t];
                    }
                }
                dirty |= a[t][j] != 0;
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let mut fix = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if a[i][j] % p != 0 {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for j in 0..cols {
                        a[t][j] += a[i][j];
                    }
                    for j in 0..rows {
                        u[t][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for j in 0..cols {
                a[t][j] = -a[t][j];
            }
            for j in 0..rows {
                u[t][j] = -u[t][j];
            }
        }
    }
    finish_snf(a, u, v)
}

type I128Mat = Vec<Vec<i128>>;

fn finish_snf(a: I128Mat, u: I128Mat, v: I128Mat) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let conv = |m: I128Mat| -> Vec<Vec<i64>> {
        m.into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("SNF entry overflow")).collect())
            .collect()
    };
    (conv(u), conv(a), conv(v))
}

/// Smith normal form of a 2x2 matrix: `U·M·V = diag(d1, d2)`, `d1 | d2`.
pub fn smith_normal_form(m: &Mat2) -> (Mat2, Mat2, Mat2) {
    let rows = vec![m[0].to_vec(), m[1].to_vec()];
    let (u, d, v) = smith_normal_form_general(&rows);
    let to2 = |x: &Vec<Vec<i64>>| -> Mat2 { [[x[0][0], x[0][1]], [x[1][0], x[1][1]]] };
    (to2(&u), to2(&d), to2(&v))
}
