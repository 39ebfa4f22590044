//! Measurements behind the verification suites.
//!
//! Every function here returns raw measured quantities (deviations, residuals,
//! certificates); the tolerances live with the callers. [`run_suite`]
//! packages them into a [`Report`] with the default tolerances in
//! [`tolerances`].

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::float::Constant;
use rug::{Complex, Float, Rational};
use serde::Serialize;
use thiserror::Error;

use crate::arith::{gcd, is_prime, mat_det, quadratic_gauss_sum, ArithError, Mat2};
use crate::expsums::{h_bound_margin, ExpSumError, HalfIntegralForm};
use crate::kitaoka::{
    kitaoka_residual, norm_det_combinations, wpm_change_of_variables_det, wpm_decompose, wpm_gradient_check, Cutoffs, KitaokaError,
    KitaokaTerms,
};
use crate::lfunc::{LSeriesContext, LfuncError};
use crate::moment::{contour_moment_sum, diagonal_moment_sum, digamma_quarter_closed_form, moment_sweep, MomentError, MomentOptions, MomentSweep};
use crate::report::{Check, Report};
use crate::siegel::{
    eigenform_coefficients, jacobi_cusp_form, jacobi_cusp_form_product, normalize_af, sk_fourier, ExtendedJacobi, JacobiFormTable,
    SiegelCoefficientTable, SiegelError,
};
use crate::lfunc::{elliptic_l, sk_factorization};
use crate::special::analysis::{parseval_identity_check, HermiteProfile, PARSEVAL_BOUND_CONSTANT};
use crate::special::{bessel_j_f64, bessel_product_check, BesselOrder, SpecialError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("cache file {0} is missing")]
    CacheMissing(PathBuf),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    ExpSum(#[from] ExpSumError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Lfunc(#[from] LfuncError),
    #[error(transparent)]
    Kitaoka(#[from] KitaokaError),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// Default thresholds of the suites.
pub mod tolerances {
    pub const H_BOUND_RELATIVE: f64 = 1e-20;
    pub const GAUSS_SUM: f64 = 1e-25;
    pub const BESSEL_PRODUCT: f64 = 1e-8;
    pub const KITAOKA_SLACK: f64 = 1e-6;
    pub const DIMENSION_ONE_RELATIVE: f64 = 0.01;
    pub const LIFT_RELATIVE: f64 = 1e-6;
    pub const MOMENT_SPREAD: f64 = 10.0;
    pub const MOMENT_ROUTES: f64 = 1e-8;
    pub const AFE_RELATIVE: f64 = 1e-4;
    pub const WPM_IDENTITY: f64 = 1e-10;
    pub const WPM_GRADIENT: f64 = 1e-6;
    pub const PARSEVAL: f64 = 1e-8;
    pub const PARSEVAL_SAFETY: f64 = 10.0;
    pub const DIGAMMA_QUARTER: f64 = 1e-10;
    pub const UNIFORM_ENVELOPE: f64 = 2.1;
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub precision_bits: u32,
    pub cutoffs: Cutoffs,
    /// Dirichlet-series length for `D(s, F)`.
    pub delta_max: u64,
    /// Discriminant bound of the Jacobi and Siegel tables.
    pub d_max: u64,
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    /// Build and store a missing cache file instead of failing.
    pub build_missing: bool,
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let bad = |m: &str| Err(VerifyError::InvalidConfig(m.to_string()));
        if self.precision_bits < 64 {
            return bad("precision must be at least 64 bits");
        }
        if self.cutoffs.c_max == 0 || self.cutoffs.s_max == 0 || !(self.cutoffs.c_norm_max > 0.0) {
            return bad("cutoffs must be positive");
        }
        if self.delta_max == 0 || self.d_max == 0 {
            return bad("table bounds must be positive");
        }
        Ok(())
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { precision_bits: 128, cutoffs: Cutoffs::default(), delta_max: 20_000, d_max: 100, seed: 20_240_601, cache_dir: None, build_missing: true }
    }
}

pub const SUITES: [&str; 6] = ["expsums", "special", "siegel", "lfunc", "kitaoka", "moment"];

// ---------------------------------------------------------------------------
// Table cache
// ---------------------------------------------------------------------------

pub fn jacobi_cache_path(dir: &Path, k: u32, d_max: u64) -> PathBuf {
    dir.join(format!("jacobi_k{k}_d{d_max}.txt"))
}

pub fn siegel_cache_path(dir: &Path, k: u32, d_max: u64) -> PathBuf {
    dir.join(format!("siegel_k{k}_d{d_max}.txt"))
}

/// Writes the Jacobi and Siegel tables for weight `k`; returns their paths
/// and content hashes.
pub fn build_tables(dir: &Path, k: u32, d_max: u64) -> Result<Vec<(PathBuf, String)>, VerifyError> {
    std::fs::create_dir_all(dir).map_err(SiegelError::from)?;
    let jac = jacobi_cusp_form(k, d_max)?;
    let siegel = SiegelCoefficientTable::from_jacobi(&jac, d_max as i64)?;
    let jp = jacobi_cache_path(dir, k, d_max);
    let sp = siegel_cache_path(dir, k, d_max);
    jac.save(&jp)?;
    siegel.save(&sp)?;
    Ok(vec![(jp, jac.content_hash()), (sp, siegel.content_hash())])
}

/// The Jacobi table from the cache directory when configured (a tampered
/// file is an error), otherwise computed. A missing file is built and
/// stored unless `build_missing` is off.
pub fn jacobi_table(cfg: &VerifyConfig, k: u32) -> Result<JacobiFormTable, VerifyError> {
    match &cfg.cache_dir {
        Some(dir) => {
            let path = jacobi_cache_path(dir, k, cfg.d_max);
            if !path.exists() {
                if !cfg.build_missing {
                    return Err(VerifyError::CacheMissing(path));
                }
                build_tables(dir, k, cfg.d_max)?;
            }
            Ok(JacobiFormTable::load(&path)?)
        }
        None => Ok(jacobi_cusp_form(k, cfg.d_max)?),
    }
}

// ---------------------------------------------------------------------------
// Exponential sums
// ---------------------------------------------------------------------------

fn random_form(rng: &mut ChaCha8Rng, p4: i64) -> HalfIntegralForm {
    loop {
        let p1 = rng.gen_range(1..=60);
        let p2 = rng.gen_range(-60..=60);
        if let Ok(f) = HalfIntegralForm::new(p1, p2, p4) {
            return f;
        }
    }
}

/// `max |H^±| / (τ(c)·c·gcd(det 2P, det 2S, c))` over odd `c <= c_max` and
/// `pairs` seeded pairs `(P, S)` with `s₄ = p₄` per modulus. The margin is
/// kept at working precision so that an excess over 1 below f64 resolution
/// stays visible.
pub fn h_bound_sweep(c_max: u64, pairs: usize, seed: u64, prec: u32) -> Result<Float, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Float::with_val(prec, 0);
    for c in (1..=c_max).step_by(2) {
        for _ in 0..pairs {
            let p4 = rng.gen_range(1..=60);
            let p = random_form(&mut rng, p4);
            let s = random_form(&mut rng, p4);
            let m = h_bound_margin(&p, &s, c, prec)?;
            if m > worst {
                worst = m;
            }
        }
    }
    Ok(worst)
}

fn gauss_brute(a: i64, b: i64, c: u64, prec: u32) -> Complex {
    let tau = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut acc = Complex::with_val(prec, 0);
    for x in 0..c as i64 {
        let r = (a as i128 * (x * x) as i128 + b as i128 * x as i128).rem_euclid(c as i128);
        let ang = Float::with_val(prec, &tau * r as u64) / c;
        let (s, co) = ang.sin_cos(Float::new(prec));
        acc += Complex::with_val(prec, (co, s));
    }
    acc
}

pub fn odd_prime_powers(limit: u64) -> Vec<u64> {
    let mut out: Vec<u64> = Vec::new();
    for p in (3..=limit).step_by(2).filter(|&p| is_prime(p)) {
        let mut q = p;
        while q <= limit {
            out.push(q);
            q *= p;
        }
    }
    out.sort_unstable();
    out
}

/// Largest `|closed form − Σ_x e((ax² + bx)/c)|` over odd prime powers
/// `c <= limit`, all `a` coprime to `c` and `b ∈ {0, 1}`.
pub fn gauss_sum_sweep(limit: u64, prec: u32) -> Result<f64, VerifyError> {
    let mut worst: f64 = 0.0;
    for c in odd_prime_powers(limit) {
        for a in 1..c as i64 {
            if gcd(a, c as i64) != 1 {
                continue;
            }
            for b in [0i64, 1] {
                let closed = quadratic_gauss_sum(a, b, c, prec)?;
                let brute = gauss_brute(a, b, c, prec + 32);
                let d = Float::with_val(prec, (closed - brute).abs().real()).to_f64();
                worst = worst.max(d);
            }
        }
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Largest residual of the Bessel product formula on `{1/2, 1, 2}³` for each order.
pub fn bessel_product_grid(ells: &[f64]) -> Result<f64, VerifyError> {
    let grid = [0.5, 1.0, 2.0];
    let mut worst: f64 = 0.0;
    for &l in ells {
        let o = BesselOrder::new(l)?;
        for a in grid {
            for b in grid {
                for g in grid {
                    worst = worst.max(bessel_product_check(a, b, g, o)?.residual);
                }
            }
        }
    }
    Ok(worst)
}

/// `max |J_ℓ(x)| · 2^ℓ` over `samples` equispaced `x ∈ (0, ℓ/2]`.
pub fn small_argument_ratio(ell: f64, samples: usize) -> f64 {
    (1..=samples)
        .map(|i| {
            let x = 0.5 * ell * i as f64 / samples as f64;
            bessel_j_f64(ell, x).abs() * 2f64.powf(ell)
        })
        .fold(0.0, f64::max)
}

/// `max |J_ℓ(x)| (x² − ℓ²)^{1/4}` on `[2ℓ, 100ℓ]`.
pub fn uniform_envelope(ell: f64, samples: usize) -> f64 {
    (0..=samples)
        .map(|i| {
            let x = 2.0 * ell + 98.0 * ell * i as f64 / samples as f64;
            bessel_j_f64(ell, x).abs() * (x * x - ell * ell).powf(0.25)
        })
        .fold(0.0, f64::max)
}

/// Quadratic forms, shifts, scales and Hermite profiles used for the
/// Parseval identity: definite, indefinite and negative definite phases.
#[allow(clippy::type_complexity)]
pub fn parseval_catalogue() -> Vec<([[f64; 2]; 2], [f64; 2], [f64; 2], HermiteProfile)> {
    vec![
        ([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], [1.0, 1.0], HermiteProfile { n1: 0, n2: 0 }),
        ([[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0], [1.0, 1.0], HermiteProfile { n1: 0, n2: 0 }),
        ([[0.8, 0.3], [0.3, -0.5]], [0.4, -0.2], [1.0, 1.2], HermiteProfile { n1: 1, n2: 0 }),
        ([[0.6, 0.1], [0.1, 0.9]], [-0.3, 0.5], [1.3, 1.0], HermiteProfile { n1: 2, n2: 1 }),
        ([[-0.7, 0.2], [0.2, -0.4]], [0.0, 0.3], [1.0, 1.0], HermiteProfile { n1: 0, n2: 2 }),
    ]
}

/// Largest Parseval residual and largest `bound_ratio / (√π/2)` over the catalogue.
pub fn parseval_sweep() -> Result<(f64, f64), VerifyError> {
    let mut res: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    for (a, b, x, f) in parseval_catalogue() {
        let r = parseval_identity_check(a, b, x, f)?;
        res = res.max(r.residual);
        ratio = ratio.max(r.bound_ratio / PARSEVAL_BOUND_CONSTANT);
    }
    Ok((res, ratio))
}

// ---------------------------------------------------------------------------
// Siegel tables and L-functions
// ---------------------------------------------------------------------------

/// Number of discriminants `D <= d_max` where the two Jacobi constructions differ.
pub fn jacobi_construction_mismatches(k: u32, d_max: u64) -> Result<usize, VerifyError> {
    let a = jacobi_cusp_form(k, d_max)?;
    let b = jacobi_cusp_form_product(k, d_max)?;
    Ok(a.coefficients.iter().zip(&b.coefficients).filter(|(x, y)| x != y).count())
}

/// The degree-five Dirichlet series of the weight-`k` lift, from the cached
/// or freshly built Jacobi table.
pub fn l_series(k: u32, cfg: &VerifyConfig) -> Result<LSeriesContext, VerifyError> {
    let ext = ExtendedJacobi::new(jacobi_table(cfg, k)?, cfg.delta_max as usize)?;
    Ok(LSeriesContext::from_source(&ext, cfg.delta_max)?)
}

/// `(|D(s) − ζ(s)L(s+½, f)L(s−½, f)|, tail certificates + rel·|value|)`.
pub fn lift_cross_identity(ctx: &LSeriesContext, k: u32, s: f64, prec: u32) -> Result<(f64, f64), VerifyError> {
    let a = eigenform_coefficients(2 * k - 2, 100)?;
    let d = ctx.standard_l_dirichlet(s, ctx.delta_max, prec)?;
    let p = sk_factorization(s, &a, 2 * k - 2, prec)?;
    let diff = Float::with_val(prec, &d.value - &p.value).abs().to_f64();
    Ok((diff, d.error + p.error + tolerances::LIFT_RELATIVE * p.value.to_f64().abs()))
}

/// Relative error of the AFE central value at weight 10 against
/// `ζ(1/2) L(1, f₁₈) L(0, f₁₈)`; `ctx` must be the weight-10 series.
pub fn afe_central_relative_error(ctx: &LSeriesContext, prec: u32) -> Result<f64, VerifyError> {
    let afe = ctx.afe_central_value(100.0, 5.0)?;
    let a = eigenform_coefficients(18, 100)?;
    let zeta_half = Float::with_val(prec, 0.5).zeta().to_f64();
    let l1 = elliptic_l(1.0, &a, 18, prec)?.value.to_f64();
    let l0 = elliptic_l(0.0, &a, 18, prec)?.value.to_f64();
    let exact = zeta_half * l1 * l0;
    Ok(((afe.value - exact) / exact).abs())
}

// ---------------------------------------------------------------------------
// Kitaoka formula
// ---------------------------------------------------------------------------

pub fn dimension_zero_pairs() -> [(HalfIntegralForm, HalfIntegralForm); 3] {
    let (i, h) = (HalfIntegralForm::IDENTITY, HalfIntegralForm::HEXAGONAL);
    [(i, i), (i, h), (h, h)]
}

/// The weight-10 value matrix over three reduced forms and what it says
/// about the one-dimensional cusp space.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionOne {
    pub forms: Vec<HalfIntegralForm>,
    pub values: [[f64; 3]; 3],
    pub certificates: [[f64; 3]; 3],
    pub a_f: Vec<f64>,
    /// Largest `|ad − bc| / max(|ad|, |bc|)` over all 2×2 minors.
    pub max_minor: f64,
    /// Largest relative gap between `R(T_i, Q)/R(T_j, Q)` and `a_F(T_i)/a_F(T_j)`.
    pub max_ratio_gap: f64,
    /// `R(T, Q) / (a_F(T) a_F(Q))` for every entry.
    pub w: Vec<f64>,
    /// `max |w / mean(w) − 1|`.
    pub w_spread: f64,
}

pub fn dimension_one_structure(cfg: &VerifyConfig) -> Result<DimensionOne, VerifyError> {
    let k = 10;
    let forms = vec![HalfIntegralForm::HEXAGONAL, HalfIntegralForm::IDENTITY, HalfIntegralForm::new(1, 1, 2)?];
    let jac = jacobi_table(cfg, k)?;
    let mut a_f = Vec::new();
    for f in &forms {
        let t = (f.p1, f.p2, f.p4);
        a_f.push(normalize_af(t, k, &sk_fourier(t, &jac)?, cfg.precision_bits)?.to_f64());
    }
    let mut values = [[0.0; 3]; 3];
    let mut certificates = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let r = kitaoka_residual(&forms[i], &forms[j], k, &cfg.cutoffs)?;
            values[i][j] = r.total().re;
            values[j][i] = values[i][j];
            certificates[i][j] = r.certificate();
            certificates[j][i] = certificates[i][j];
        }
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut max_minor: f64 = 0.0;
    for (i, j) in pairs {
        for (p, q) in pairs {
            let lhs = values[i][p] * values[j][q];
            let rhs = values[i][q] * values[j][p];
            max_minor = max_minor.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
        }
    }
    let mut max_ratio_gap: f64 = 0.0;
    for q in 0..3 {
        for (i, j) in pairs {
            let got = values[i][q] / values[j][q];
            let want = a_f[i] / a_f[j];
            max_ratio_gap = max_ratio_gap.max((got / want - 1.0).abs());
        }
    }
    let w: Vec<f64> = (0..9).map(|n| values[n / 3][n % 3] / (a_f[n / 3] * a_f[n % 3])).collect();
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let w_spread = w.iter().map(|x| (x / mean - 1.0).abs()).fold(0.0, f64::max);
    Ok(DimensionOne { forms, values, certificates, a_f, max_minor, max_ratio_gap, w, w_spread })
}

/// Aggregates over seeded random `(N, J)` for the `W±` coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WpmSweep {
    pub samples: usize,
    /// Largest entrywise reconstruction error, relative to `1 + |N_ij|`.
    pub reconstruction: f64,
    /// Largest relative gap of the short-variable identity exactly as printed.
    pub short_as_printed: f64,
    /// The same gap after multiplying the quadratic form by 4.
    pub short_times_four: f64,
    /// Number of `J` whose change-of-variables determinant is not `−1/4`.
    pub determinant_failures: usize,
    pub gradient: f64,
}

pub fn wpm_sweep(samples: usize, seed: u64) -> Result<WpmSweep, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = WpmSweep { samples, reconstruction: 0.0, short_as_printed: 0.0, short_times_four: 0.0, determinant_failures: 0, gradient: 0.0 };
    let quarter = Rational::from((-1, 4));
    for _ in 0..samples {
        let j: Mat2 = loop {
            let j = [[rng.gen_range(-4..=4), rng.gen_range(-4..=4)], [rng.gen_range(-4..=4), rng.gen_range(-4..=4)]];
            let d = mat_det(&j);
            if d != 0 && d.abs() <= 4 {
                break j;
            }
        };
        let n = [[rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)], [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)]];
        let c = wpm_decompose(n, &j)?;
        let back = c.reconstruct()?;
        for r in 0..2 {
            for s in 0..2 {
                out.reconstruction = out.reconstruction.max((back[r][s] - n[r][s]).abs() / (1.0 + n[r][s].abs()));
            }
        }
        let (plus, minus) = norm_det_combinations(n, &j)?;
        let scale = plus.abs().max(minus.abs()).max(1.0);
        let printed = (plus - c.short_form(1)).abs().max((minus - c.short_form(-1)).abs()) / scale;
        let scaled = (plus - 4.0 * c.short_form(1)).abs().max((minus - 4.0 * c.short_form(-1)).abs()) / scale;
        out.short_as_printed = out.short_as_printed.max(printed);
        out.short_times_four = out.short_times_four.max(scaled);
        if wpm_change_of_variables_det(&j)? != quarter {
            out.determinant_failures += 1;
        }
        let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        out.gradient = out.gradient.max(wpm_gradient_check(a, b, &j)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn kitaoka_check(name: &str, r: &KitaokaTerms) -> Check {
    Check::at_most(name, r.total().norm(), r.certificate() + tolerances::KITAOKA_SLACK)
}

fn form_label(f: &HalfIntegralForm) -> String {
    format!("({},{},{})", f.p1, f.p2, f.p4)
}

pub fn suite_checks(suite: &str, cfg: &VerifyConfig) -> Result<Vec<Check>, VerifyError> {
    use tolerances as tol;
    let prec = cfg.precision_bits;
    let mut checks = Vec::new();
    match suite {
        "expsums" => {
            let m = h_bound_sweep(199, 500, cfg.seed, prec)?;
            checks.push(Check::at_most("h_bound_margin_odd_c_le_199", m.to_f64(), 1.0));
            checks.push(Check::at_most("h_bound_margin_excess", (m - 1u32).to_f64(), tol::H_BOUND_RELATIVE));
            checks.push(Check::at_most("gauss_sum_prime_powers_le_343", gauss_sum_sweep(343, prec)?, tol::GAUSS_SUM));
        }
        "special" => {
            checks.push(Check::at_most("bessel_product_residual", bessel_product_grid(&[4.5, 8.5])?, tol::BESSEL_PRODUCT));
            for l in [4.5, 8.5, 16.5, 48.5] {
                checks.push(Check::at_most(format!("bessel_small_argument_ratio_l{l}"), small_argument_ratio(l, 100), 1.0));
            }
            for l in [4.5, 8.5, 20.5] {
                checks.push(Check::at_most(format!("bessel_uniform_envelope_l{l}"), uniform_envelope(l, 20_000), tol::UNIFORM_ENVELOPE));
            }
            let (res, ratio) = parseval_sweep()?;
            checks.push(Check::at_most("parseval_residual", res, tol::PARSEVAL));
            checks.push(Check::at_most("parseval_bound_ratio", ratio, tol::PARSEVAL_SAFETY));
        }
        "siegel" => {
            for k in [10, 12] {
                let mism = jacobi_construction_mismatches(k, cfg.d_max)?;
                checks.push(Check::equal(format!("jacobi_constructions_mismatch_k{k}"), mism as f64, 0.0));
                let jac = jacobi_table(cfg, k)?;
                checks.push(Check::equal(format!("jacobi_c3_k{k}"), jac.c(3)?.to_f64(), 1.0));
            }
        }
        "lfunc" => {
            for k in [10, 12] {
                let ctx = l_series(k, cfg)?;
                for s in [3.0, 2.5] {
                    let (diff, bound) = lift_cross_identity(&ctx, k, s, prec)?;
                    checks.push(Check::at_most(format!("dirichlet_vs_lift_k{k}_s{s}"), diff, bound));
                }
                if k == 10 {
                    checks.push(Check::at_most("afe_central_value_k10", afe_central_relative_error(&ctx, prec)?, tol::AFE_RELATIVE));
                }
            }
        }
        "kitaoka" => {
            for k in [6, 8] {
                for (t, q) in dimension_zero_pairs() {
                    let r = kitaoka_residual(&t, &q, k, &cfg.cutoffs)?;
                    checks.push(kitaoka_check(&format!("dimension_zero_k{k}_{}_{}", form_label(&t), form_label(&q)), &r));
                }
            }
            let d = dimension_one_structure(cfg)?;
            checks.push(Check::at_most("k10_minors", d.max_minor, tol::DIMENSION_ONE_RELATIVE));
            checks.push(Check::at_most("k10_ratio_vs_sk", d.max_ratio_gap, tol::DIMENSION_ONE_RELATIVE));
            checks.push(Check::at_most("k10_w_spread", d.w_spread, tol::DIMENSION_ONE_RELATIVE));
            checks.push(Check::at_least("k10_w_min", d.w.iter().cloned().fold(f64::INFINITY, f64::min), f64::MIN_POSITIVE));
            let w = wpm_sweep(1000, cfg.seed)?;
            checks.push(Check::at_most("wpm_reconstruction", w.reconstruction, tol::WPM_IDENTITY));
            checks.push(Check::at_most("wpm_short_as_printed", w.short_as_printed, tol::WPM_IDENTITY));
            checks.push(Check::at_most("wpm_short_times_four", w.short_times_four, tol::WPM_IDENTITY));
            checks.push(Check::equal("wpm_determinant_failures", w.determinant_failures as f64, 0.0));
            checks.push(Check::at_most("wpm_gradient", w.gradient, tol::WPM_GRADIENT));
        }
        "moment" => return Ok(moment_suite(prec)?.0),
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    }
    Ok(checks)
}

pub const MOMENT_WEIGHTS: [u32; 5] = [100, 200, 400, 800, 1600];

/// The moment checks together with the sweep they were read from.
pub fn moment_suite(prec: u32) -> Result<(Vec<Check>, MomentSweep), VerifyError> {
    use tolerances as tol;
    let sweep = moment_sweep(&MOMENT_WEIGHTS, &MomentOptions::default(), prec)?;
    let mut checks = vec![Check::at_most("moment_k_residual_spread", sweep.spread, tol::MOMENT_SPREAD)];
    let c = contour_moment_sum(100, prec)?;
    let d = diagonal_moment_sum(100, &MomentOptions::default(), prec)?;
    let gap = Float::with_val(prec, &d.value - &c.value()).abs().to_f64();
    checks.push(Check::at_most("moment_contour_vs_direct_k100", gap, tol::MOMENT_ROUTES));
    let psi = Float::with_val(prec, 0.25).digamma();
    let closed = digamma_quarter_closed_form(prec);
    checks.push(Check::at_most("digamma_quarter", Float::with_val(prec, psi - closed).abs().to_f64(), tol::DIGAMMA_QUARTER));
    Ok((checks, sweep))
}

/// Runs one suite, or all of them for `"all"`.
pub fn run_suite(suite: &str, cfg: &VerifyConfig) -> Result<Report, VerifyError> {
    Ok(run_suite_with_sweep(suite, cfg)?.0)
}

/// As [`run_suite`], also returning the moment sweep when the moment suite ran.
pub fn run_suite_with_sweep(suite: &str, cfg: &VerifyConfig) -> Result<(Report, Option<MomentSweep>), VerifyError> {
    cfg.validate()?;
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    };
    let config = serde_json::to_value(cfg).expect("config is plain data");
    let mut report = Report::new(suite, config);
    let mut sweep = None;
    for name in names {
        let checks = if name == "moment" {
            let (checks, s) = moment_suite(cfg.precision_bits)?;
            sweep = Some(s);
            checks
        } else {
            suite_checks(name, cfg)?
        };
        let prefix = suite == "all";
        report.extend(checks.into_iter().map(|mut c| {
            if prefix {
                c.name = format!("{name}.{}", c.name);
            }
            c
        }));
    }
    Ok((report, sweep))
}
