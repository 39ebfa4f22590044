//! The degree-5 standard L-function of a Saito–Kurokawa lift.
//!
//! Three independent evaluations are provided: the Dirichlet series over
//! `SL₂(ℤ)\M₂⁺(ℤ)` built from Siegel Fourier coefficients, the product
//! `ζ(s)L(s+1/2, f)L(s−1/2, f)` built from the elliptic eigenform `f`, and the
//! approximate functional equation at the centre.
//!
//! Dirichlet coefficients are normalised as
//! `b(Δ) = Σ_{det M = Δ} A(MMᵀ) / (A(I) Δ^{k−1})`, so that
//! `D(s, F) = L(s+1, χ₋₄) ζ(2s) Σ_Δ b(Δ) Δ^{−s}`.

use num_complex::Complex64;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::arith::{divisors, gcd, hnf_cosets, is_prime, ArithError, DirichletCharacterMod4};
use crate::siegel::{sk_fourier, JacobiSource, SiegelError};
use crate::special::kernels::AfeWeight;
use crate::special::quad::Estimate;
use crate::special::SpecialError;

#[derive(Debug, Error)]
pub enum LfuncError {
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("tail not certified: {0}")]
    TailNotCertified(String),
    #[error("{0}")]
    Domain(String),
}

// ---------------------------------------------------------------------------
// Euler factors
// ---------------------------------------------------------------------------

/// `(1−t)(1−α₁t)(1−α₂t)(1−α₁⁻¹t)(1−α₂⁻¹t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerFactorDeg5 {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl EulerFactorDeg5 {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Result<Self, LfuncError> {
        if alpha1.norm() == 0.0 || alpha2.norm() == 0.0 {
            return Err(LfuncError::Domain("Satake parameter zero".into()));
        }
        Ok(Self { alpha1, alpha2 })
    }

    /// Coefficients of `1, t, …, t⁵`.
    pub fn coefficients(&self) -> [Complex64; 6] {
        let one = Complex64::new(1.0, 0.0);
        let roots = [one, self.alpha1, self.alpha2, one / self.alpha1, one / self.alpha2];
        let mut c = [Complex64::new(0.0, 0.0); 6];
        c[0] = one;
        for (deg, r) in roots.iter().enumerate() {
            for j in (1..=deg + 1).rev() {
                c[j] = c[j] - r * c[j - 1];
            }
        }
        c
    }

    pub fn eval(&self, t: Complex64) -> Complex64 {
        let c = self.coefficients();
        c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, x| acc * t + x)
    }
}

pub fn standard_euler_factor(t: Complex64, alpha1: Complex64, alpha2: Complex64) -> Result<Complex64, LfuncError> {
    Ok(EulerFactorDeg5::new(alpha1, alpha2)?.eval(t))
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Rational::from(x * y);
        }
    }
    out
}

/// The Euler polynomial of `ζ(s)L(s+1/2, f)L(s−1/2, f)` at `p` in `X = p^{−s}`,
/// exact in `ℚ[X]`: `(1 − X)(1 − a_p p^{1−w/2} X + p X²)(1 − a_p p^{−w/2} X + X²/p)`.
pub fn sk_local_polynomial(p: u64, a_p: &Integer, weight: u32) -> Vec<Rational> {
    let half = weight / 2;
    let pw = |e: u32| Integer::from(p).pow(e);
    let a_big = Rational::from((a_p.clone(), pw(half - 1)));
    let a_small = Rational::from((a_p.clone(), pw(half)));
    let f1 = [Rational::from(1), Rational::from(-1)];
    let f2 = [Rational::from(1), -a_big, Rational::from(p)];
    let f3 = [Rational::from(1), -a_small, Rational::from((1, p))];
    poly_mul(&poly_mul(&f1, &f2), &f3)
}

/// `(1 − χ₋₄(p) X/p)(1 − X²)`: the local factors of `1/(L(s+1, χ₋₄) ζ(2s))`.
pub fn normalising_polynomial(p: u64) -> Vec<Rational> {
    let chi = DirichletCharacterMod4.eval(p as i64);
    let a = [Rational::from(1), -Rational::from((chi, p as i64))];
    let b = [Rational::from(1), Rational::new(), Rational::from(-1)];
    poly_mul(&a, &b)
}

// ---------------------------------------------------------------------------
// Dirichlet coefficients from Siegel coefficients
// ---------------------------------------------------------------------------

/// `Σ_{M ∈ SL₂(ℤ)\M₂⁺(ℤ), det M = Δ} A(MMᵀ)` through the generic coefficient lookup.
pub fn coset_sum<J: JacobiSource + ?Sized>(delta: u64, source: &J) -> Result<Rational, LfuncError> {
    let mut acc = Rational::new();
    for h in hnf_cosets(delta) {
        acc += sk_fourier(gram(h.a, h.b, h.d), source)?;
    }
    Ok(acc)
}

/// `MMᵀ` for `M = (a b; 0 d)` as `(n, r, m)`.
fn gram(a: u64, b: u64, d: u64) -> (i64, i64, i64) {
    let (a, b, d) = (a as i64, b as i64, d as i64);
    (a * a + b * b, 2 * b * d, d * d)
}

/// Truncated coefficient data `b(1..=Δ_max)` with a measured growth envelope.
#[derive(Debug, Clone)]
pub struct LSeriesContext {
    pub weight: u32,
    pub delta_max: u64,
    /// `b[Δ]`, index 0 unused.
    pub b: Vec<Rational>,
    /// `A(I)`.
    pub identity_coefficient: Rational,
    envelope: Envelope,
}

/// `|b(Δ)| <= constant · Δ^exponent` on the computed range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub constant: f64,
    pub exponent: f64,
}

/// Exponent used for the empirical envelope of `b(Δ)`: the square-root growth
/// of `L(s − 1/2, f)` plus room for divisor-type factors.
pub const ENVELOPE_EXPONENT: f64 = 0.75;

impl LSeriesContext {
    /// Computes `b(p^j)` from coset sums for every prime power up to
    /// `delta_max` and extends multiplicatively.
    ///
    /// Only `c(4f²)` for `f <= delta_max` is ever needed, since every `MMᵀ`
    /// with `det M = Δ` has discriminant `4Δ²`.
    pub fn from_source<J: JacobiSource + ?Sized>(source: &J, delta_max: u64) -> Result<Self, LfuncError> {
        let k = source.weight();
        let n = delta_max as usize;
        let c4: Vec<Rational> = (0..=delta_max)
            .map(|f| if f == 0 { Ok(Rational::new()) } else { source.coefficient(4 * f * f) })
            .collect::<Result<_, _>>()?;
        let pows: Vec<Integer> = (0..=delta_max).map(|e| Integer::from(e).pow(k - 1)).collect();
        let identity_coefficient = c4[1].clone();
        if identity_coefficient == 0 {
            return Err(LfuncError::Domain("A(I) = 0".into()));
        }

        let mut spf = vec![0usize; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                for j in (i..=n).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i;
                    }
                }
            }
        }
        let mut b = vec![Rational::new(); n + 1];
        if n >= 1 {
            b[1] = Rational::from(1);
        }
        for delta in 2..=n {
            let p = spf[delta];
            let mut pj = p;
            while (delta / pj) % p == 0 {
                pj *= p;
            }
            if pj < delta {
                b[delta] = Rational::from(&b[pj] * &b[delta / pj]);
                continue;
            }
            let mut g = Rational::new();
            for h in hnf_cosets(delta as u64) {
                let (nn, r, m) = gram(h.a, h.b, h.d);
                let cont = gcd(gcd(nn, r), m) as u64;
                for e in divisors(cont) {
                    if delta as u64 % e == 0 {
                        g += Rational::from(&pows[e as usize] * &c4[delta / e as usize]);
                    }
                }
            }
            let scale = Integer::from(delta).pow(k - 1) * identity_coefficient.numer() ;
            b[delta] = g * identity_coefficient.denom().clone() / scale;
        }
        let mut constant: f64 = 0.0;
        for (d, v) in b.iter().enumerate().skip(1) {
            constant = constant.max(v.to_f64().abs() / (d as f64).powf(ENVELOPE_EXPONENT));
        }
        Ok(Self {
            weight: k,
            delta_max,
            b,
            identity_coefficient,
            envelope: Envelope { constant, exponent: ENVELOPE_EXPONENT },
        })
    }

    /// Same coefficients computed from coset sums at every `Δ`, without multiplicativity.
    pub fn direct<J: JacobiSource + ?Sized>(source: &J, delta_max: u64) -> Result<Vec<Rational>, LfuncError> {
        let a_id = sk_fourier((1, 0, 1), source)?;
        let k = source.weight();
        let mut out = vec![Rational::new()];
        for delta in 1..=delta_max {
            let g = coset_sum(delta, source)?;
            out.push(g / Rational::from(Integer::from(delta).pow(k - 1) * &a_id));
        }
        Ok(out)
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    /// `Σ_{Δ <= n} b(Δ) Δ^{−s}` and the envelope bound on `Σ_{Δ > n} |b(Δ)| Δ^{−s}`.
    pub fn partial_sum(&self, s: f64, n: u64, prec: u32) -> Result<(Float, f64), LfuncError> {
        let n = n.min(self.delta_max);
        let e = self.envelope;
        let excess = s - e.exponent - 1.0;
        if !(excess > 0.0) {
            return Err(LfuncError::TailNotCertified(format!("s = {s} not above {}", e.exponent + 1.0)));
        }
        let sf = Float::with_val(prec, s);
        let mut acc = Float::with_val(prec, 0);
        for d in 1..=n {
            let v = &self.b[d as usize];
            if *v == 0 {
                continue;
            }
            let pw = Float::with_val(prec, Float::with_val(prec, d).ln() * &sf).exp();
            acc += Float::with_val(prec, v) / pw;
        }
        let tail = e.constant * (n as f64).powf(-excess) / excess;
        Ok((acc, tail))
    }

    /// `D(s, F)` truncated at `Δ <= n` with its tail bound.
    pub fn standard_l_dirichlet(&self, s: f64, n: u64, prec: u32) -> Result<Estimate<Float>, LfuncError> {
        if !(s >= 2.0) {
            return Err(LfuncError::Domain(format!("s = {s} < 2")));
        }
        let (sum, tail) = self.partial_sum(s, n, prec)?;
        let beta = crate::arith::dirichlet_beta(s + 1.0, 0, prec)?;
        let zeta = Float::with_val(prec, 2.0 * s).zeta();
        let pref = Float::with_val(prec, &beta * &zeta);
        let value = Float::with_val(prec, &pref * &sum);
        let error = pref.to_f64() * tail;
        Ok(Estimate { value, error })
    }

    /// `D(1/2, F)` from the approximate functional equation, dropping
    /// `r²sΔ > x_max k²`.
    pub fn afe_central_value(&self, x_max: f64, decay_exponent: f64) -> Result<Estimate<f64>, LfuncError> {
        let k = self.weight;
        let k2 = (k as f64).powi(2);
        let cut = (x_max * k2).floor() as u64;
        if cut > self.delta_max {
            return Err(SiegelError::TableTooSmall { needed: cut, have: self.delta_max }.into());
        }
        let chi = DirichletCharacterMod4;
        // Dirichlet coefficients of the centre sum, grouped by n = r²sΔ
        let mut coef = vec![0f64; cut as usize + 1];
        let bf: Vec<f64> = self.b.iter().enumerate().map(|(d, v)| if d == 0 { 0.0 } else { v.to_f64() / (d as f64).sqrt() }).collect();
        let mut r = 1u64;
        while r * r <= cut {
            let mut s = 1u64;
            while r * r * s <= cut {
                let c = chi.eval(s as i64);
                if c != 0 {
                    let w = c as f64 / (r as f64 * (s as f64).powf(1.5));
                    let base = r * r * s;
                    for d in 1..=cut / base {
                        coef[(base * d) as usize] += w * bf[d as usize];
                    }
                }
                s += 1;
            }
            r += 1;
        }
        let weight = AfeWeight::new(k, 2.0)?;
        let mut value = 0.0;
        let mut error = 0.0;
        let mut envelope: f64 = 0.0;
        for (n, &c) in coef.iter().enumerate().skip(1) {
            if c == 0.0 {
                continue;
            }
            let w = weight.eval(n as f64 / k2);
            value += 2.0 * c * w.value;
            error += 2.0 * c.abs() * w.error;
            envelope = envelope.max(c.abs() / (n as f64).powf(ENVELOPE_EXPONENT - 0.5));
        }
        // |W(x)| <= M_A x^{-A} beyond the cut
        let decay = AfeWeight::new(k, decay_exponent)?.decay_constant();
        let theta = ENVELOPE_EXPONENT - 0.5;
        let excess = decay_exponent - theta - 1.0;
        if !(excess > 0.0) {
            return Err(LfuncError::TailNotCertified(format!("decay exponent {decay_exponent}")));
        }
        let tail = 2.0 * envelope * decay * k2.powf(decay_exponent) * (cut as f64).powf(-excess) / excess;
        Ok(Estimate { value, error: error + tail })
    }
}

// ---------------------------------------------------------------------------
// Elliptic L-functions
// ---------------------------------------------------------------------------

/// `L(s, f)` in the analytic normalisation, for a level-one eigenform of
/// weight `w`, through the incomplete-gamma expansion of the completed
/// function. Valid for all real `s > (1 − w)/2`.
pub fn elliptic_l(s: f64, coefficients: &[Integer], weight: u32, prec: u32) -> Result<Estimate<Float>, LfuncError> {
    let w = weight as f64;
    let u = s + (w - 1.0) / 2.0;
    if !(u > 0.0) || !(w - u > 0.0) {
        return Err(LfuncError::Domain(format!("s = {s}")));
    }
    let eps: i32 = if weight % 4 == 0 { 1 } else { -1 };
    let wp = prec + 32;
    let two_pi = Float::with_val(wp, rug::float::Constant::Pi) * 2u32;
    // terms decay like e^{-2πn}
    let need = (prec as f64 + 10.0) * std::f64::consts::LN_2 + w * w.ln();
    let n_terms = (need / (2.0 * std::f64::consts::PI)).ceil() as usize + 2;
    if coefficients.len() <= n_terms + 1 {
        return Err(SiegelError::TableTooSmall { needed: n_terms as u64 + 1, have: coefficients.len() as u64 }.into());
    }
    let uf = Float::with_val(wp, u);
    let vf = Float::with_val(wp, w - u);
    let mut lambda = Float::with_val(wp, 0);
    for (n, a) in coefficients.iter().enumerate().take(n_terms + 1).skip(1) {
        if *a == 0 {
            continue;
        }
        let x = Float::with_val(wp, &two_pi * n as u32);
        let lx = Float::with_val(wp, x.ln_ref());
        let g1 = Float::with_val(wp, uf.gamma_inc_ref(&x)) * Float::with_val(wp, -Float::with_val(wp, &lx * &uf)).exp();
        let g2 = Float::with_val(wp, vf.gamma_inc_ref(&x)) * Float::with_val(wp, -Float::with_val(wp, &lx * &vf)).exp();
        let t = if eps == 1 { g1 + g2 } else { g1 - g2 };
        lambda += t * Float::with_val(wp, a);
    }
    // (2π)^{-u} Γ(u)
    let gam = Float::with_val(wp, uf.gamma_ref()) * Float::with_val(wp, -Float::with_val(wp, two_pi.ln_ref()) * &uf).exp();
    let value = Float::with_val(prec, lambda / &gam);
    // |a(n)| <= d(n) n^{(w-1)/2} <= 2 n^{w/2}; Γ(a, x) <= 2 x^{a-1} e^{-x} for x >= 2a
    let mut tail = 0.0;
    for n in n_terms + 1..n_terms + 200 {
        let x = 2.0 * std::f64::consts::PI * n as f64;
        tail += 2.0 * (n as f64).powf(w / 2.0) * 2.0 * 2.0 * (-x).exp() / x;
    }
    let error = tail / gam.to_f64().abs() + value.to_f64().abs() * 2f64.powi(-(prec as i32) + 8);
    Ok(Estimate { value, error })
}

/// `ζ(s) L(s + 1/2, f) L(s − 1/2, f)` with the elliptic values from [`elliptic_l`].
pub fn sk_factorization(s: f64, coefficients: &[Integer], weight: u32, prec: u32) -> Result<Estimate<Float>, LfuncError> {
    if s == 1.0 {
        return Err(LfuncError::Domain("pole of ζ at s = 1".into()));
    }
    let z = Float::with_val(prec, s).zeta();
    let l1 = elliptic_l(s + 0.5, coefficients, weight, prec)?;
    let l2 = elliptic_l(s - 0.5, coefficients, weight, prec)?;
    let prod = Float::with_val(prec, &l1.value * &l2.value);
    let value = Float::with_val(prec, &z * &prod);
    let zf = z.to_f64().abs();
    let error = zf * (l1.error * l2.value.to_f64().abs() + l2.error * l1.value.to_f64().abs() + l1.error * l2.error)
        + value.to_f64().abs() * 2f64.powi(-(prec as i32) + 8);
    Ok(Estimate { value, error })
}

/// Root number `i^w` of a level-one form of weight `w`.
pub fn root_number(weight: u32) -> i32 {
    if weight % 4 == 0 {
        1
    } else {
        -1
    }
}

/// Primes up to `n`, for local checks.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}
