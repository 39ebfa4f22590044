//! Bessel functions `J_ℓ` of half-integer order.
//!
//! Arbitrary precision: ascending series for `x <= ℓ`, Miller's backward
//! recurrence for `ℓ < x <= ℓ²` and the terminating Hankel expansion beyond.
//! Each branch carries enough guard bits that the absolute error stays below
//! `2^{-prec+4}`.

use rug::float::Constant;
use rug::{Complex, Float};

use super::quad::{adaptive, Estimate};
use super::{BesselOrder, SpecialError};

/// Which algorithm [`bessel_j`] would use at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselRegime {
    Series,
    Miller,
    Hankel,
}

pub fn bessel_regime(ell: BesselOrder, x: f64) -> BesselRegime {
    let l = ell.value();
    if x <= l.max(2.0) {
        BesselRegime::Series
    } else if x <= l * l {
        BesselRegime::Miller
    } else {
        BesselRegime::Hankel
    }
}

/// `J_ℓ(x)` to `prec` bits of absolute accuracy.
pub fn bessel_j(ell: BesselOrder, x: &Float, prec: u32) -> Result<Float, SpecialError> {
    if *x < 0 {
        return Err(SpecialError::Domain(format!("negative argument {x}")));
    }
    if prec > 1 << 20 {
        return Err(SpecialError::PrecisionUnreachable(prec));
    }
    if *x == 0 {
        return Ok(Float::with_val(prec, 0));
    }
    let v = match bessel_regime(ell, x.to_f64()) {
        BesselRegime::Series => bessel_series(ell, x, prec),
        BesselRegime::Miller => bessel_miller(ell, x, prec),
        BesselRegime::Hankel => bessel_hankel(ell, x, prec),
    };
    Ok(v)
}

/// Ascending series, usable for any `x` at the cost of `~1.45 x` guard bits.
pub fn bessel_series(ell: BesselOrder, x: &Float, prec: u32) -> Float {
    let xf = x.to_f64();
    let guard = (1.45 * xf).ceil() as u32 + 24;
    let wp = prec + guard;
    let l = Float::with_val(wp, ell.twice()) / 2u32;
    let half_x = Float::with_val(wp, x) / 2u32;
    let q = Float::with_val(wp, half_x.square_ref());
    // first term (x/2)^ℓ / Γ(ℓ+1)
    let lnx = Float::with_val(wp, half_x.ln_ref()) * &l;
    let mut term = lnx.exp() / Float::with_val(wp, Float::with_val(wp, &l + 1u32).gamma_ref());
    let mut acc = term.clone();
    let tiny = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut m = 0u32;
    loop {
        m += 1;
        // t_m = -t_{m-1} q / (m (m + ℓ))
        let denom = Float::with_val(wp, &l + m) * m;
        term *= &q;
        term /= denom;
        term = -term;
        acc += &term;
        if m as f64 > xf && Float::with_val(wp, term.abs_ref()) < tiny {
            break;
        }
    }
    Float::with_val(prec, acc)
}

/// Miller's algorithm: backward recurrence from a high order, normalised
/// against the closed forms of `J_{±1/2}`.
pub fn bessel_miller(ell: BesselOrder, x: &Float, prec: u32) -> Float {
    let xf = x.to_f64();
    let wp = prec + 40;
    let n_top = miller_start(ell.value(), xf, wp);
    let target = ell.n() as i64;
    let two_over_x = Float::with_val(wp, 2u32) / x;
    // f_{ν-1} = (2ν/x) f_ν - f_{ν+1}, ν = j + 1/2
    let mut above = Float::with_val(wp, 0);
    let mut cur = Float::with_val(wp, Float::i_exp(1, -(wp as i32) / 2));
    let mut stored = Float::with_val(wp, 0);
    let mut j = n_top;
    let big = Float::with_val(wp, Float::i_exp(1, 1 << 20));
    while j > -1 {
        if j == target {
            stored = cur.clone();
        }
        let nu2 = Float::with_val(wp, 2 * j + 1) / 2u32;
        let next = Float::with_val(wp, &two_over_x * &nu2) * &cur - &above;
        above = cur;
        cur = next;
        j -= 1;
        if Float::with_val(wp, cur.abs_ref()) > big {
            cur /= &big;
            above /= &big;
            stored /= &big;
        }
    }
    if target == -1 {
        stored = cur.clone();
    }
    // cur = f_{-1/2}, above = f_{1/2}
    let pref = (Float::with_val(wp, 2u32) / (Float::with_val(wp, Constant::Pi) * x)).sqrt();
    let (s, c) = Float::with_val(wp, x).sin_cos(Float::new(wp));
    let jp = Float::with_val(wp, &pref * &s);
    let jm = Float::with_val(wp, &pref * &c);
    let num = Float::with_val(wp, &jp * &above) + Float::with_val(wp, &jm * &cur);
    let den = Float::with_val(wp, above.square_ref()) + Float::with_val(wp, cur.square_ref());
    Float::with_val(prec, stored * num / den)
}

fn miller_start(l: f64, x: f64, wp: u32) -> i64 {
    // Debye estimate ln J_N(x) ≈ -N(α - tanh α) for N > x, with sech α = x/N.
    let need = (wp as f64 + 20.0) * std::f64::consts::LN_2;
    let mut n = l.max(x).ceil() + 10.0;
    loop {
        let a = (n / x).acosh();
        if 2.0 * n * (a - a.tanh()) >= need {
            return n as i64;
        }
        n += 5.0;
    }
}

/// Terminating Hankel expansion
/// `J_{n+1/2}(x) = sqrt(2/(πx)) Re[(-i)^{n+1} e^{ix} Σ_k i^k (n+k)! / (k! (n-k)! (2x)^k)]`.
pub fn bessel_hankel(ell: BesselOrder, x: &Float, prec: u32) -> Float {
    let n = ell.n() as u32;
    let xf = x.to_f64();
    // largest term size in bits decides the guard
    let mut lmax: f64 = 0.0;
    let mut lt = 0.0f64;
    for k in 1..=n {
        lt += (((n + k) * (n - k + 1)) as f64).ln() - (k as f64).ln() - (2.0 * xf).ln();
        lmax = lmax.max(lt);
    }
    let wp = prec + 32 + (lmax / std::f64::consts::LN_2).max(0.0).ceil() as u32;
    let two_x = Float::with_val(wp, x) * 2u32;
    let mut sum = Complex::with_val(wp, (1, 0));
    let mut a = Float::with_val(wp, 1);
    let i = Complex::with_val(wp, (0, 1));
    let mut ik = Complex::with_val(wp, (1, 0));
    for k in 1..=n {
        a *= (n + k) * (n - k + 1);
        a /= k;
        a /= &two_x;
        ik *= &i;
        sum += Complex::with_val(wp, &ik * &a);
    }
    let mut rot = Complex::with_val(wp, (1, 0));
    let mi = Complex::with_val(wp, (0, -1));
    for _ in 0..(n + 1) % 4 {
        rot *= &mi;
    }
    let (s, c) = Float::with_val(wp, x).sin_cos(Float::new(wp));
    let e = Complex::with_val(wp, (c, s));
    let v = Complex::with_val(wp, sum * rot * e);
    let pref = (Float::with_val(wp, 2u32) / (Float::with_val(wp, Constant::Pi) * x)).sqrt();
    Float::with_val(prec, v.real() * pref)
}

/// Olver's phase `ψ(x, ℓ) = sqrt(x² − ℓ²) − ℓ arctan(sqrt((x/ℓ)² − 1))` for `x >= 2ℓ`.
pub fn olver_phase(ell: BesselOrder, x: &Float, prec: u32) -> Result<Float, SpecialError> {
    let l = Float::with_val(prec, ell.twice()) / 2u32;
    if *x < Float::with_val(prec, &l * 2u32) {
        return Err(SpecialError::DomainTooSmall { x: x.to_f64(), min: 2.0 * ell.value() });
    }
    let r = Float::with_val(prec + 16, Float::with_val(prec + 16, x.square_ref()) - Float::with_val(prec + 16, l.square_ref())).sqrt();
    let at = Float::with_val(prec + 16, &r / &l).atan();
    Ok(Float::with_val(prec, r - at * l))
}

/// Double-precision `J_ℓ(x)` for half-integer `ℓ`.
pub fn bessel_j_f64(ell: f64, x: f64) -> f64 {
    debug_assert!((ell - ell.floor() - 0.5).abs() < 1e-12 && ell > 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let n = (ell - 0.5).round() as i64;
    if x <= (ell + 1.0).sqrt() || x < 1.0 {
        return series_f64(ell, x);
    }
    let pref = (2.0 / (std::f64::consts::PI * x)).sqrt();
    let (s, c) = x.sin_cos();
    let jm = pref * c; // J_{-1/2}
    let jp = pref * s; // J_{1/2}
    if x >= ell {
        // upward recurrence is stable while ν < x
        let (mut a, mut b) = (jm, jp);
        for j in 0..n {
            let nu = j as f64 + 0.5;
            let next = (2.0 * nu / x) * b - a;
            a = b;
            b = next;
        }
        return b;
    }
    let top = (ell + (160.0 * ell.max(x)).sqrt() + 12.0).ceil() as i64;
    let (mut above, mut cur) = (0.0f64, 1e-30f64);
    let mut stored = 0.0;
    let mut j = top;
    while j > -1 {
        if j == n {
            stored = cur;
        }
        let nu = j as f64 + 0.5;
        let next = (2.0 * nu / x) * cur - above;
        above = cur;
        cur = next;
        j -= 1;
        if cur.abs() > 1e100 {
            cur *= 1e-100;
            above *= 1e-100;
            stored *= 1e-100;
        }
    }
    let scale = (jp * above + jm * cur) / (above * above + cur * cur);
    stored * scale
}

fn series_f64(ell: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = h * h;
    let mut term = if ell < 100.0 {
        // Γ(ℓ+1) = (√π/2)·Π_{j=1}^{n} (j + 1/2) exactly enough in f64
        let mut g = 0.5 * std::f64::consts::PI.sqrt();
        let mut a = 1.5;
        while a < ell + 0.75 {
            g *= a;
            a += 1.0;
        }
        h.powf(ell) / g
    } else {
        (ell * h.ln() - super::gamma::ln_gamma_real(ell + 1.0)).exp()
    };
    let mut acc = term;
    let mut m = 1.0;
    loop {
        term *= -q / (m * (m + ell));
        acc += term;
        if term.abs() <= 1e-18 * acc.abs() || term == 0.0 {
            return acc;
        }
        m += 1.0;
    }
}

/// The two pieces of the integral representation
/// `J_ℓ(z) = (1/π)∫₀^π cos(ℓθ − z sin θ)dθ − (sin ℓπ/π)∫₀^∞ e^{−ℓθ − z sinh θ}dθ`.
///
/// For `ℓ ≡ 1/2 (mod 2)` the factor `sin ℓπ` equals 1.
pub fn bessel_split(ell: BesselOrder, z: f64) -> Result<(Estimate<f64>, Estimate<f64>), SpecialError> {
    if z <= 0.0 {
        return Err(SpecialError::Domain(format!("z = {z}")));
    }
    let l = ell.value();
    let pi = std::f64::consts::PI;
    let pieces = ((z + l) * 2.0).ceil() as usize + 4;
    let j1 = adaptive(|t: f64| (l * t - z * t.sin()).cos(), 0.0, pi, 1e-14, pieces, 100_000);
    // e^{-ℓθ} alone drops below 1e-18 at θ = 42/ℓ
    let cut = 42.0 / l;
    let j2 = adaptive(|t: f64| (-l * t - z * t.sinh()).exp(), 0.0, cut, 1e-15, 16, 100_000);
    let sign = if ell.n() % 2 == 0 { 1.0 } else { -1.0 };
    let tail = (-l * cut).exp() / l;
    let a = Estimate { value: j1.value / pi, error: j1.error / pi };
    let b = Estimate { value: -sign * j2.value / pi, error: (j2.error + tail) / pi };
    if !(a.error < 1e-9 && b.error < 1e-9) {
        return Err(SpecialError::PrecisionUnreachable(53));
    }
    Ok((a, b))
}

/// `Γ(ℓ + 1)` at `prec` bits for a half-integer order.
pub fn gamma_order_plus_one(ell: BesselOrder, prec: u32) -> Float {
    let l = Float::with_val(prec, ell.twice()) / 2u32;
    Float::with_val(prec, l + 1u32).gamma()
}

/// Upper bound `(x/2)^ℓ / Γ(ℓ+1)` for `|J_ℓ(x)|`, valid for all `x >= 0`.
pub fn small_argument_bound(ell: f64, x: f64) -> f64 {
    (ell * (0.5 * x).ln() - super::gamma::ln_gamma_real(ell + 1.0)).exp()
}

/// Landau's uniform bound `|J_ν(x)| <= 0.7858 x^{-1/3}`.
pub fn landau_bound(x: f64) -> f64 {
    0.7858 * x.powf(-1.0 / 3.0)
}
