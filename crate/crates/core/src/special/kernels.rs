//! Oscillatory kernels: the matrix kernel `𝒥_ℓ`, the function `E(z)`, the
//! Bessel product integral and the weight of the approximate functional
//! equation.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};

use super::bessel::{bessel_j_f64, small_argument_bound};
use super::gamma::ln_gamma;
use super::quad::{adaptive, gl_panels, Estimate};
use super::{BesselOrder, SpecialError, SpectralPair};

// ---------------------------------------------------------------------------
// 𝒥_ℓ(P)
// ---------------------------------------------------------------------------

/// Largest `4π s₂` for which [`cal_j`] uses the double power series.
pub const CAL_J_SERIES_LIMIT: f64 = 10.0;

/// `∫₀^{π/2} J_ℓ(4π s₁ sin θ) J_ℓ(4π s₂ sin θ) sin θ dθ`.
///
/// Small arguments go through [`cal_j_series`]. Otherwise panels are a
/// quarter of the shortest oscillation period `1/(2(s₁+s₂))` wide, each
/// integrated with 20-point Gauss–Legendre.
pub fn cal_j(ell: BesselOrder, pair: SpectralPair) -> Result<Estimate<f64>, SpecialError> {
    let l = ell.value();
    let (a, b) = (4.0 * PI * pair.s1, 4.0 * PI * pair.s2);
    if b <= CAL_J_SERIES_LIMIT {
        return Ok(cal_j_series(l, a, b));
    }
    let width = 1.0 / (8.0 * (pair.s1 + pair.s2));
    let panels = ((PI / 2.0) / width).ceil() as usize + 2;
    let mut f = |t: f64| {
        let s = t.sin();
        bessel_j_f64(l, a * s) * bessel_j_f64(l, b * s) * s
    };
    let est = gl_panels(&mut f, 0.0, PI / 2.0, panels, 20);
    if est.error > 1e-9 {
        return Err(SpecialError::PrecisionUnreachable(53));
    }
    Ok(Estimate { value: est.value, error: est.error + 1e-15 * panels as f64 })
}

/// `∫₀^{π/2} J_ℓ(a sin θ) J_ℓ(b sin θ) sin θ dθ` by multiplying the two
/// Bessel series and integrating `sin^{2ℓ+2m+1}` exactly. The error
/// estimate covers rounding in the alternating sum; use only for moderate
/// `a, b` (cancellation grows like `e^{a+b}`).
pub fn cal_j_series(ell: f64, a: f64, b: f64) -> Estimate<f64> {
    let coeffs = |x: f64| -> Vec<f64> {
        let q = -0.25 * x * x;
        let mut v = vec![(-super::gamma::ln_gamma_real(ell + 1.0)).exp()];
        let mut i = 1.0;
        loop {
            let next = v[v.len() - 1] * q / (i * (i + ell));
            v.push(next);
            if next.abs() < 1e-20 * v[0] && i > 0.5 * x + 2.0 {
                break;
            }
            i += 1.0;
        }
        v
    };
    let (ca, cb) = (coeffs(a), coeffs(b));
    // W_m = ∫ sin^{2ℓ+2m+1}
    let mut w = vec![(0.5 * PI.sqrt()) * (super::gamma::ln_gamma_real(ell + 1.0) - super::gamma::ln_gamma_real(ell + 1.5)).exp()];
    for m in 1..ca.len() + cb.len() {
        let p = 2.0 * ell + 2.0 * m as f64;
        let prev = w[m - 1];
        w.push(prev * p / (p + 1.0));
    }
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (i, x) in ca.iter().enumerate() {
        for (j, y) in cb.iter().enumerate() {
            let t = x * y * w[i + j];
            sum += t;
            abs += t.abs();
        }
    }
    let scale = (0.25 * a * b).powf(ell);
    Estimate { value: scale * sum, error: scale * abs * 1e-15 + 1e-300 }
}

/// [`cal_j`] for a real 2×2 matrix with positive eigenvalues `s₁², s₂²`.
pub fn cal_j_matrix(ell: BesselOrder, p: [[f64; 2]; 2]) -> Result<Estimate<f64>, SpecialError> {
    cal_j(ell, SpectralPair::from_matrix(p)?)
}

// ---------------------------------------------------------------------------
// E(z)
// ---------------------------------------------------------------------------

fn two_pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi) * 2u32
}

/// `∫₀^X e(−t²) dt` by its power series, with guard bits for cancellation.
fn fresnel_series(x: &Float, prec: u32) -> Complex {
    let x2f = x.to_f64().powi(2);
    let wp = prec + 24 + (TAU * x2f / std::f64::consts::LN_2).ceil() as u32;
    let x = Float::with_val(wp, x);
    let step = Complex::with_val(wp, (0, -two_pi(wp) * Float::with_val(wp, x.square_ref())));
    let mut p = Complex::with_val(wp, (1, 0));
    let mut acc = Complex::with_val(wp, &x);
    let tiny = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut n = 0u32;
    loop {
        n += 1;
        p *= &step;
        p /= n;
        let t = Complex::with_val(wp, &p * &x) / (2 * n + 1);
        acc += &t;
        if n as f64 > TAU * x2f && Float::with_val(wp, t.abs_ref()) < tiny {
            break;
        }
    }
    Complex::with_val(prec, acc)
}

/// `e(X²) ∫_X^∞ e(−t²) dt` by its asymptotic expansion; the oscillating
/// factor cancels exactly, leaving `−(1/(2iaX)) Σ (2k−1)!!/(2iaX²)^k` with
/// `a = −2π`. Returns the value and the size of the first omitted term.
fn fresnel_tail_scaled(x: &Float, prec: u32) -> (Complex, f64) {
    let wp = prec + 16;
    let x = Float::with_val(wp, x);
    let ia2 = Complex::with_val(wp, (0, -two_pi(wp) * 2u32)); // 2ia
    let q = Complex::with_val(wp, &ia2 * Float::with_val(wp, x.square_ref())); // 2iaX²
    let mut term = Complex::with_val(wp, (1, 0));
    let mut acc = term.clone();
    let mut last = 1.0f64;
    let mut k = 0u32;
    loop {
        k += 1;
        let next = Complex::with_val(wp, &term * (2 * k - 1)) / &q;
        let size = next.clone().abs().real().to_f64();
        if size >= last || size < 1e-300 || k > 100_000 {
            last = size.min(last);
            break;
        }
        term = next;
        acc += &term;
        last = size;
        if size * 2f64.powi(wp as i32) < 1.0 {
            break;
        }
    }
    let pref = Complex::with_val(wp, &ia2 * &x);
    let v = -(acc / pref);
    // relative truncation error times the leading size 1/(4πX)
    let err = last / (2.0 * TAU * x.to_f64());
    (Complex::with_val(prec, v), err)
}

fn use_series(x: f64, prec: u32) -> bool {
    TAU * x * x <= (prec as f64 + 20.0) * std::f64::consts::LN_2 + 10.0
}

/// `E(z) = ∫₀^{π/2} e(sin²θ / z) sin θ dθ` in closed Fresnel form.
pub fn e_function(z: f64, prec: u32) -> Result<Complex, SpecialError> {
    if !(z > 0.0) {
        return Err(SpecialError::Domain(format!("E({z})")));
    }
    let wp = prec + 16;
    let zf = Float::with_val(wp, z);
    let x = Float::with_val(wp, zf.clone().recip_sqrt());
    let sz = Float::with_val(wp, zf.sqrt_ref());
    if use_series(x.to_f64(), prec) {
        let inv = Float::with_val(wp, zf.recip_ref()) * two_pi(wp);
        let (s, c) = inv.sin_cos(Float::new(wp));
        let e = Complex::with_val(wp, (c, s));
        let f = fresnel_series(&x, wp);
        Ok(Complex::with_val(prec, e * f * sz))
    } else {
        let (e1, e2) = e_split(z, prec)?;
        Ok(Complex::with_val(prec, e1 + e2))
    }
}

/// The decomposition `E = E₁ + E₂` with `E₁(z) = e(1/z) z^{1/2} (1 − i)/4`.
pub fn e_split(z: f64, prec: u32) -> Result<(Complex, Complex), SpecialError> {
    if !(z > 0.0) {
        return Err(SpecialError::Domain(format!("E({z})")));
    }
    let wp = prec + 16;
    let zf = Float::with_val(wp, z);
    let x = Float::with_val(wp, zf.clone().recip_sqrt());
    let sz = Float::with_val(wp, zf.sqrt_ref());
    let inv = Float::with_val(wp, zf.recip_ref()) * two_pi(wp);
    let (s, c) = inv.sin_cos(Float::new(wp));
    let e = Complex::with_val(wp, (c, s));
    let quarter = Complex::with_val(wp, (0.25, -0.25));
    let e1 = Complex::with_val(wp, &e * &quarter) * &sz;
    let e2 = if use_series(x.to_f64(), prec) {
        let f = fresnel_series(&x, wp);
        -(e * (quarter - f) * sz)
    } else {
        let (t, err) = fresnel_tail_scaled(&x, wp);
        if err > 2f64.powi(-(prec as i32)) {
            return Err(SpecialError::PrecisionUnreachable(prec));
        }
        -(t * sz)
    };
    Ok((Complex::with_val(prec, e1), Complex::with_val(prec, e2)))
}

/// `E(z)` from its defining θ-integral by adaptive quadrature.
pub fn e_function_theta(z: f64) -> Estimate<Complex64> {
    let pieces = (2.0 / z).ceil().min(1e7) as usize + 8;
    adaptive(
        |t: f64| {
            let s = t.sin();
            Complex64::from_polar(s, TAU * s * s / z)
        },
        0.0,
        PI / 2.0,
        1e-13,
        pieces,
        pieces * 64,
    )
}

// ---------------------------------------------------------------------------
// Bessel product integral
// ---------------------------------------------------------------------------

/// Both sides of the Bessel product formula
/// `2Re[e(−(ℓ+1)/4) ∫₀^∞ e((α+β)z + γ/z) J_ℓ(4π√(αβ)z) dz/z] = 2π J_ℓ(4π√(αγ)) J_ℓ(4π√(βγ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Combined quadrature error and tail certificate for `lhs`.
    pub lhs_error: f64,
}

pub fn bessel_product_check(alpha: f64, beta: f64, gamma: f64, ell: BesselOrder) -> Result<ProductCheck, SpecialError> {
    if !(alpha > 0.0 && beta > 0.0 && gamma > 0.0) {
        return Err(SpecialError::Domain("α, β, γ must be positive".into()));
    }
    let integral = product_integral(alpha, beta, gamma, ell)?;
    let l = ell.value();
    let rot = Complex64::from_polar(1.0, -TAU * (l + 1.0) / 4.0);
    let lhs = 2.0 * (rot * integral.value).re;
    let rhs = TAU * bessel_j_f64(l, 4.0 * PI * (alpha * gamma).sqrt()) * bessel_j_f64(l, 4.0 * PI * (beta * gamma).sqrt());
    Ok(ProductCheck { lhs, rhs, residual: (lhs - rhs).abs(), lhs_error: 2.0 * integral.error })
}

/// `∫₀^∞ e((α+β)z + γ/z) J_ℓ(cz) dz/z` with `c = 4π√(αβ)`.
pub fn product_integral(alpha: f64, beta: f64, gamma: f64, ell: BesselOrder) -> Result<Estimate<Complex64>, SpecialError> {
    let l = ell.value();
    let c = 4.0 * PI * (alpha * beta).sqrt();
    let sum = alpha + beta;
    // [0, z0]: |J_ℓ(cz)| <= (cz/2)^ℓ/Γ(ℓ+1), whose dz/z mass is that bound over ℓ
    let mut z0 = 1.0f64;
    while small_argument_bound(l, c * z0) / l > 1e-15 {
        z0 *= 0.8;
    }
    let head_bound = small_argument_bound(l, c * z0) / l;
    let integrand = |z: f64| Complex64::from_polar(bessel_j_f64(l, c * z) / z, TAU * (sum * z + gamma / z));

    let mut value = Complex64::new(0.0, 0.0);
    let mut error = head_bound;
    if z0 < 1.0 {
        // [z0, 1] in w = 1/z: ∫₁^{1/z0} e((α+β)/w + γw) J_ℓ(c/w) dw/w
        let w1 = 1.0 / z0;
        let freq = TAU * (gamma + sum) + c;
        let panels = ((w1 - 1.0) * freq / (PI / 2.0)).ceil() as usize + 1;
        let mut g = |w: f64| integrand(1.0 / w) / (w * w);
        let e = gl_panels(&mut g, 1.0, w1, panels, 16);
        value += e.value;
        error += e.error;
    }
    let omega_plus = TAU * sum + c;
    let omega_minus = TAU * (alpha.sqrt() - beta.sqrt()).powi(2);
    let min_nonzero = if omega_minus > 0.0 { omega_minus } else { omega_plus };
    let big_z = (100.0 / min_nonzero).max(200.0);
    let freq = omega_plus + TAU * gamma;
    let panels = ((big_z - 1.0) * freq / (PI / 2.0)).ceil() as usize + 1;
    let mut g = integrand;
    let e = gl_panels(&mut g, 1.0, big_z, panels, 16);
    value += e.value;
    error += e.error;
    let tail = product_tail(sum, c, omega_minus, gamma, ell, big_z);
    value += tail.value;
    error += tail.error;
    if error > 1e-9 {
        return Err(SpecialError::PrecisionUnreachable(53));
    }
    Ok(Estimate { value, error })
}

/// `∫_Z^∞ z^{−p} e^{iωz} dz`, exactly for `ω = 0` and otherwise by the
/// asymptotic series `−e^{iωZ} Σ_j (p)_j / ((iω)^{j+1} Z^{p+j})`, stopped at its
/// smallest term. Returns the value and the last term used as error.
fn power_oscillatory_tail(p: f64, omega: f64, big_z: f64) -> (Complex64, f64) {
    if omega == 0.0 {
        return (Complex64::new(big_z.powf(1.0 - p) / (p - 1.0), 0.0), 0.0);
    }
    let iw = Complex64::new(0.0, omega);
    let mut term = Complex64::new(big_z.powf(-p), 0.0) / iw;
    let mut acc = term;
    let mut j = 0.0;
    loop {
        let next = term * (p + j) / (iw * big_z);
        j += 1.0;
        if next.norm() >= term.norm() || next.norm() < 1e-22 * acc.norm() {
            let err = next.norm().min(term.norm());
            return (-Complex64::from_polar(1.0, omega * big_z) * acc, err);
        }
        term = next;
        acc += term;
    }
}

/// Tail `∫_Z^∞` of the product integrand using the terminating Hankel form
/// of `J_ℓ` and the Taylor series of `e(γ/z)`.
fn product_tail(sum: f64, c: f64, omega_minus: f64, gamma: f64, ell: BesselOrder, big_z: f64) -> Estimate<Complex64> {
    let n = ell.n() as i32;
    // J(cz) = sqrt(2/(πcz)) ½[(−i)^{n+1} e^{icz} S(cz) + i^{n+1} e^{−icz} S̄(cz)],
    // S(x) = Σ_k i^k a_k (2x)^{−k}
    let amp = (2.0 / (PI * c)).sqrt() * 0.5;
    let ipow = |m: i32| Complex64::new(0.0, 1.0).powi(m);
    let mut a = vec![1.0f64];
    for k in 1..=n {
        let prev = a[(k - 1) as usize];
        a.push(prev * ((n + k) * (n - k + 1)) as f64 / (k as f64 * 2.0 * c));
    }
    let mut gm = vec![Complex64::new(1.0, 0.0)];
    let mut m = 0usize;
    loop {
        let next = gm[m] * Complex64::new(0.0, TAU * gamma) / (m as f64 + 1.0);
        if next.norm() * big_z.powf(-(m as f64 + 1.0)) < 1e-20 {
            break;
        }
        gm.push(next);
        m += 1;
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for (sign, omega) in [(1i32, TAU * sum + c), (-1, omega_minus)] {
        // sign +1: e^{icz} branch; −1: e^{−icz} branch
        let lead = if sign == 1 { ipow(-(n + 1)) } else { ipow(n + 1) };
        for (k, ak) in a.iter().enumerate() {
            let sk = if sign == 1 { ipow(k as i32) } else { ipow(-(k as i32)) };
            for (mm, g) in gm.iter().enumerate() {
                let p = 1.5 + k as f64 + mm as f64;
                let (t, e) = power_oscillatory_tail(p, omega, big_z);
                let coef = lead * sk * *ak * *g * amp;
                value += coef * t;
                error += coef.norm() * e;
            }
        }
    }
    // the dropped Taylor terms of e(γ/z) are bounded by the first omitted one
    error += (2.0 / (PI * c * big_z)).sqrt() * 1e-20 * 4.0;
    Estimate { value, error }
}

// ---------------------------------------------------------------------------
// AFE weight
// ---------------------------------------------------------------------------

/// `G(u) = D_∞(u + 1/2)/D_∞(1/2)` for weight `k`, with
/// `D_∞(s) = 2^{5−2k−2s} π^{1−5s/2} Γ(s/2) Γ(k+s−2) Γ(k+s−1)`.
pub fn gamma_factor_ratio(u: Complex64, k: u32) -> Complex64 {
    let kf = k as f64;
    let ln = -2.0 * u * 2f64.ln() - 2.5 * u * PI.ln() + ln_gamma((u + 0.5) / 2.0)
        - ln_gamma(Complex64::new(0.25, 0.0))
        + ln_gamma(u + kf - 1.5)
        - ln_gamma(Complex64::new(kf - 1.5, 0.0))
        + ln_gamma(u + kf - 0.5)
        - ln_gamma(Complex64::new(kf - 0.5, 0.0));
    ln.exp()
}

/// The weight `W(x) = ∫_{(σ)} (k²x)^{−u} G(u) e^{u²} (1 − 4u²)/u du/(2πi)`,
/// precomputed on a vertical line for repeated evaluation.
///
/// For `σ < 0` the residue `1` at `u = 0` is added back, so any
/// `σ ∈ (−5/2, 0) ∪ (0, ∞)` represents the same function.
#[derive(Debug, Clone)]
pub struct AfeWeight {
    k: u32,
    sigma: f64,
    step: f64,
    nodes: Vec<(Complex64, Complex64)>,
    truncation: f64,
}

impl AfeWeight {
    pub fn new(k: u32, sigma: f64) -> Result<Self, SpecialError> {
        if k < 6 || k % 2 == 1 {
            return Err(SpecialError::Domain(format!("weight {k}")));
        }
        if sigma == 0.0 || sigma <= -2.5 {
            return Err(SpecialError::Domain(format!("contour Re u = {sigma}")));
        }
        let step = 0.05;
        let tmax = 9.0 + sigma.abs();
        let n = (tmax / step).ceil() as i64;
        let mut nodes = Vec::with_capacity(2 * n as usize + 1);
        for j in -n..=n {
            let u = Complex64::new(sigma, j as f64 * step);
            let g = gamma_factor_ratio(u, k) * (u * u).exp() * (1.0 - 4.0 * u * u) / u;
            nodes.push((u, g));
        }
        // |integrand| at the cut-off, times a generous Gaussian tail factor
        let edge = nodes.first().map(|x| x.1.norm()).unwrap_or(0.0) + nodes.last().map(|x| x.1.norm()).unwrap_or(0.0);
        Ok(Self { k, sigma, step, nodes, truncation: edge / tmax })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Upper bound `|W(x) − [σ<0]| <= M_σ x^{−σ}` with `M_σ` returned here.
    pub fn decay_constant(&self) -> f64 {
        let ln_k2 = 2.0 * (self.k as f64).ln();
        let s: f64 = self.nodes.iter().map(|(_, g)| g.norm()).sum();
        (s * self.step / TAU + self.truncation) * (-self.sigma * ln_k2).exp()
    }

    pub fn eval(&self, x: f64) -> Estimate<f64> {
        let lx = 2.0 * (self.k as f64).ln() + x.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut coarse = Complex64::new(0.0, 0.0);
        for (j, (u, g)) in self.nodes.iter().enumerate() {
            let t = (-u * lx).exp() * g;
            acc += t;
            if j % 2 == 0 {
                coarse += t;
            }
        }
        // du = i dt, so du/(2πi) = dt/(2π)
        let v = acc * self.step / TAU;
        let vc = coarse * (2.0 * self.step) / TAU;
        let scale = (-self.sigma * lx).exp();
        let mut value = v.re;
        if self.sigma < 0.0 {
            value += 1.0;
        }
        Estimate { value, error: (v - vc).norm() + self.truncation * scale + 1e-15 }
    }
}

/// One-off evaluation of `W(x)` on the line `Re u = 2`.
pub fn afe_weight(x: f64, k: u32) -> Result<Estimate<f64>, SpecialError> {
    if !(x > 0.0) {
        return Err(SpecialError::Domain(format!("x = {x}")));
    }
    Ok(AfeWeight::new(k, 2.0)?.eval(x))
}
