//! Gamma-type functions of a complex variable in double precision.

use num_complex::Complex64;

// B_{2j} / (2j (2j - 1)) for j = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

// B_{2j} / (2j) for j = 1..=8
const DIGAMMA: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

const SHIFT_TO: f64 = 16.0;

/// A logarithm of `Γ(z)`; the imaginary part is only defined modulo `2π`,
/// which is harmless because every caller exponentiates.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        let s = (z * pi).sin();
        return Complex64::new(pi.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * std::f64::consts::TAU.ln() + series - shift
}

/// `ψ(z) = Γ'(z)/Γ(z)` for `Re z > 0`.
pub fn digamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_TO {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for c in DIGAMMA {
        series += p * c;
        p *= inv2;
    }
    w.ln() - inv * 0.5 - series - shift
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        let half = ln_gamma(Complex64::new(0.5, 0.0));
        assert!((half.re - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!((ln_gamma_real(10.0) - 362880f64.ln()).abs() < 1e-13);
        // |Γ(1/2 + it)|² = π / cosh(πt)
        let t = 3.7;
        let v = ln_gamma(Complex64::new(0.5, t));
        let expect = 0.5 * (std::f64::consts::PI / (std::f64::consts::PI * t).cosh()).ln();
        assert!((v.re - expect).abs() < 1e-13);
        let g = 0.577_215_664_901_532_9;
        assert!((digamma(Complex64::new(1.0, 0.0)).re + g).abs() < 1e-14);
    }
}
