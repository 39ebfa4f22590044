use proptest::prelude::*;
use rug::float::Constant;
use rug::Float;
use sp4moment::arith::dirichlet_beta;
use sp4moment::moment::*;
use sp4moment::special::gamma::digamma;
use sp4moment::special::kernels::afe_weight;

// c₀ to 50 digits from an independent arbitrary-precision library
// (numerical derivative of the Dirichlet series of χ₋₄ at 3/2).
const C0_REFERENCE: &str = "-4.3746037297819089488925384523366929606746214460823";

#[test]
fn digamma_at_a_quarter() {
    let closed = digamma_quarter_closed_form(256);
    let mpfr = Float::with_val(256, 0.25).digamma();
    assert!(Float::with_val(256, &closed - &mpfr).abs() < 1e-70);
    let f64_value = digamma(num_complex::Complex64::new(0.25, 0.0)).re;
    assert!((f64_value - closed.to_f64()).abs() < 1e-10);
}

#[test]
fn c0_matches_reference_and_is_stable_in_precision() {
    let a = c0_constant(128).unwrap();
    let b = c0_constant(256).unwrap();
    assert!(Float::with_val(256, &a - &b).abs() < 1e-36);
    let reference = Float::with_val(256, Float::parse(C0_REFERENCE).unwrap());
    assert!(Float::with_val(256, &b - &reference).abs() < 1e-48);
}

#[test]
fn c0_euler_constant_coefficient() {
    // c₀ depends on γ only through (3/2)·L(3/2, χ₋₄)·γ: recompute with the
    // bracket split and compare the γ part against the total
    let prec = 192;
    let l = dirichlet_beta(1.5, 0, prec).unwrap();
    let dl = dirichlet_beta(1.5, 1, prec).unwrap();
    let pi = Float::with_val(prec, Constant::Pi);
    let log2 = Float::with_val(prec, Constant::Log2);
    let logpi = Float::with_val(prec, pi.ln_ref());
    let rest = Float::with_val(prec, &l * (-pi / 4u32 - log2 * 7u32 / 2u32 - logpi * 5u32 / 2u32)) + &dl;
    let gamma_part = Float::with_val(prec, c0_constant(prec).unwrap() - rest);
    let expect = Float::with_val(prec, Constant::Euler) * &l * 3u32 / 2u32;
    assert!(Float::with_val(prec, gamma_part - expect).abs() < 1e-50);
}

#[test]
fn residue_tends_to_the_main_term() {
    // residue − main = L·(ψ(k − 3/2) + ψ(k − 1/2) − 2 log k) ~ −3L/k
    let l = dirichlet_beta(1.5, 0, 128).unwrap().to_f64();
    for k in [1_000u32, 100_000, 10_000_000] {
        let diff = Float::with_val(128, double_pole_residue(k, 128).unwrap() - main_term(k, 128).unwrap()).to_f64();
        let predicted = -3.0 * l / k as f64;
        assert!((diff - predicted).abs() < 3.0 / (k as f64 * k as f64), "k={k}: {diff} vs {predicted}");
    }
}

#[test]
fn leading_term_is_close_to_two() {
    // the (r, s) = (1, 1) term is 2 W(1/k²) and W(0) = 1
    let w = afe_weight(1.0 / 1e4, 100).unwrap();
    assert!((2.0 * w.value - 2.0).abs() < 0.02);
}

#[test]
fn contour_and_direct_agree_at_k_100() {
    let d = diagonal_moment_sum(100, &MomentOptions::default(), 128).unwrap();
    let c = contour_moment_sum(100, 128).unwrap();
    let diff = Float::with_val(128, &d.value - &c.value()).to_f64().abs();
    assert!(diff <= 1e-8, "{diff}");
    assert!(diff <= d.certificate() + c.error, "{diff} > {}", d.certificate() + c.error);
}

#[test]
fn doubling_the_truncation_is_stable() {
    let a = diagonal_moment_sum(100, &MomentOptions::default(), 128).unwrap();
    let b = diagonal_moment_sum(100, &MomentOptions { cut_scale: 2.0, ..MomentOptions::default() }, 128).unwrap();
    assert!(b.x_cut > 1.99 * a.x_cut);
    assert!(b.tail < a.tail);
    let diff = Float::with_val(128, &a.value - &b.value).to_f64().abs();
    assert!(diff < 1e-8, "{diff}");
}

#[test]
fn residual_shrinks_like_one_over_k() {
    let opts = MomentOptions::default();
    let r100 = asymptotic_residual(100, &opts, 128).unwrap();
    let r400 = asymptotic_residual(400, &opts, 128).unwrap();
    let ratio = r100.residual.to_f64() / r400.residual.to_f64();
    assert!((3.6..4.4).contains(&ratio), "{ratio}");
    let sweep = moment_sweep(&[100, 200, 400], &opts, 128).unwrap();
    assert!(sweep.spread <= 10.0);
    assert_eq!(sweep.to_csv().lines().count(), 4);
}

#[test]
fn tail_tolerance_can_fail() {
    let opts = MomentOptions { tail_tolerance: 1e-300, cut_scale: 1.0 };
    assert!(matches!(diagonal_moment_sum(100, &opts, 64), Err(MomentError::TailNotCertified { .. })));
    assert!(matches!(diagonal_moment_sum(7, &MomentOptions::default(), 64), Err(MomentError::UnsupportedWeight(7))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn contour_residual_is_order_one_over_k(half in 25u32..2000) {
        let k = 2 * half;
        let c = contour_moment_sum(k, 128).unwrap();
        let res = Float::with_val(128, c.value() - main_term(k, 128).unwrap()).to_f64();
        prop_assert!(res < 0.0);
        prop_assert!((k as f64 * res).abs() < 3.0);
    }
}
