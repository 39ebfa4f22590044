//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::cell::RefCell;
use std::process::ExitCode;
use std::time::Instant;

use rug::Float;
use sp4moment::kitaoka::{kitaoka_residual, Cutoffs};
use sp4moment::verify::*;

const TOL_H_BOUND_RELATIVE: f64 = 1e-20;
const TOL_GAUSS_SUM: f64 = 1e-25;
const TOL_BESSEL_PRODUCT: f64 = 1e-8;
const TOL_SMALL_ARGUMENT_RATIO: f64 = 1.0;
const TOL_KITAOKA_SLACK: f64 = 1e-6;
const TOL_DIMENSION_ONE: f64 = 0.01;
const TOL_LIFT_RELATIVE: f64 = 1e-6;
const TOL_MOMENT_SPREAD: f64 = 10.0;
const TOL_MOMENT_ROUTES: f64 = 1e-8;
const TOL_AFE_RELATIVE: f64 = 1e-4;
const TOL_WPM: f64 = 1e-10;
const TOL_WPM_GRADIENT: f64 = 1e-6;
const TOL_PARSEVAL: f64 = 1e-8;
const TOL_PARSEVAL_SAFETY: f64 = 10.0;

const SEED: u64 = 20_240_601;
const PREC: u32 = 128;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1() -> Outcome {
    let m = h_bound_sweep(199, 500, SEED, PREC).unwrap();
    let excess = Float::with_val(PREC, &m - 1u32).to_f64();
    outcome(excess <= TOL_H_BOUND_RELATIVE, format!("max |H|/(tau(c) c gcd) = {:.6e}, excess {excess:.3e} <= {TOL_H_BOUND_RELATIVE:e}", m.to_f64()))
}

fn c2() -> Outcome {
    let d = gauss_sum_sweep(343, PREC).unwrap();
    outcome(d <= TOL_GAUSS_SUM, format!("max deviation {d:.3e} <= {TOL_GAUSS_SUM:e}"))
}

fn c3() -> Outcome {
    let r = bessel_product_grid(&[4.5, 8.5]).unwrap();
    outcome(r <= TOL_BESSEL_PRODUCT, format!("max residual {r:.3e} <= {TOL_BESSEL_PRODUCT:e}"))
}

fn c4() -> Outcome {
    let ratios: Vec<(f64, f64)> = [4.5, 8.5, 16.5, 48.5].iter().map(|&l| (l, small_argument_ratio(l, 100))).collect();
    let pass = ratios.iter().all(|&(_, r)| r <= TOL_SMALL_ARGUMENT_RATIO);
    let text: Vec<String> = ratios.iter().map(|(l, r)| format!("l={l}: {r:.4e}")).collect();
    outcome(pass, format!("max |J_l(x)| 2^l <= {TOL_SMALL_ARGUMENT_RATIO}: {}", text.join(", ")))
}

fn c5() -> Outcome {
    let cut = Cutoffs { c_max: 60, s_max: 60, c_norm_max: 40.0 };
    let mut worst = f64::NEG_INFINITY;
    let mut identity_diag = 0;
    for k in [6, 8] {
        for (t, q) in dimension_zero_pairs() {
            let r = kitaoka_residual(&t, &q, k, &cut).unwrap();
            if t == q && t.p2 == 0 {
                identity_diag = r.diagonal;
            }
            worst = worst.max(r.total().norm() - r.certificate() - TOL_KITAOKA_SLACK);
        }
    }
    outcome(worst <= 0.0 && identity_diag == 8, format!("max(|total| - certificate - {TOL_KITAOKA_SLACK:e}) = {worst:.3e} <= 0, diagonal(I,I) = {identity_diag}"))
}

fn c6() -> Outcome {
    let d = dimension_one_structure(&VerifyConfig::default()).unwrap();
    let w_min = d.w.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = d.max_minor <= TOL_DIMENSION_ONE && d.max_ratio_gap <= TOL_DIMENSION_ONE && d.w_spread <= TOL_DIMENSION_ONE && w_min > 0.0;
    outcome(
        pass,
        format!("minors {:.2e}, ratio gap {:.2e}, w spread {:.2e} (each <= {TOL_DIMENSION_ONE}), min w {w_min:.4e} > 0", d.max_minor, d.max_ratio_gap, d.w_spread),
    )
}

fn c7_c9() -> (Outcome, Outcome) {
    let cfg = VerifyConfig::default();
    let mut worst = f64::NEG_INFINITY;
    let mut afe = f64::NAN;
    for k in [10, 12] {
        let ctx = l_series(k, &cfg).unwrap();
        for s in [3.0, 2.5] {
            let (diff, bound) = lift_cross_identity(&ctx, k, s, PREC).unwrap();
            // the bound already carries TOL_LIFT_RELATIVE·|value|
            worst = worst.max(diff - bound);
        }
        if k == 10 {
            afe = afe_central_relative_error(&ctx, PREC).unwrap();
        }
    }
    (
        outcome(worst <= 0.0, format!("max(|D - lift| - tails - {TOL_LIFT_RELATIVE:e}|lift|) = {worst:.3e} <= 0")),
        outcome(afe <= TOL_AFE_RELATIVE, format!("relative error {afe:.3e} <= {TOL_AFE_RELATIVE:e}")),
    )
}

fn c8() -> Outcome {
    let (checks, sweep) = moment_suite(PREC).unwrap();
    let routes = checks.iter().find(|c| c.name == "moment_contour_vs_direct_k100").unwrap().value;
    let ks: Vec<String> = sweep.reports.iter().map(|r| format!("{:.4}", r.scaled_residual())).collect();
    outcome(
        sweep.spread <= TOL_MOMENT_SPREAD && routes <= TOL_MOMENT_ROUTES,
        format!("k*residual [{}], max/min {:.4} <= {TOL_MOMENT_SPREAD}, contour vs direct {routes:.2e} <= {TOL_MOMENT_ROUTES:e}", ks.join(", "), sweep.spread),
    )
}

fn c10() -> Outcome {
    let w = wpm_sweep(1000, SEED).unwrap();
    let pass = w.short_as_printed <= TOL_WPM && w.reconstruction <= TOL_WPM && w.determinant_failures == 0 && w.gradient <= TOL_WPM_GRADIENT;
    outcome(
        pass,
        format!(
            "short {:.3e} (x4: {:.3e}), coord {:.3e} (each <= {TOL_WPM:e}), det != -1/4 in {} of {}, gradient {:.3e} <= {TOL_WPM_GRADIENT:e}",
            w.short_as_printed, w.short_times_four, w.reconstruction, w.determinant_failures, w.samples, w.gradient
        ),
    )
}

fn c11() -> Outcome {
    let (res, ratio) = parseval_sweep().unwrap();
    outcome(
        res <= TOL_PARSEVAL && ratio <= TOL_PARSEVAL_SAFETY,
        format!("residual {res:.3e} <= {TOL_PARSEVAL:e}, bound ratio / (sqrt(pi)/2) {ratio:.4} <= {TOL_PARSEVAL_SAFETY}"),
    )
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // that matches nothing here skips the run
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{n:>2}] {name}: {} ({:.1}s)", o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "exponential sum bound", &c1);
    report(2, "Gauss sum closed form", &c2);
    report(3, "Bessel product formula", &c3);
    report(4, "small-argument Bessel bound", &c4);
    report(5, "dimension-zero Kitaoka identity", &c5);
    report(6, "dimension-one structure at k = 10", &c6);
    // criteria 7 and 9 share the L-series tables; 9 reports from the same run
    let afe = RefCell::new(None);
    report(7, "Dirichlet series vs lift", &|| {
        let (c7, c9) = c7_c9();
        *afe.borrow_mut() = Some(c9);
        c7
    });
    report(8, "diagonal moment asymptotic", &c8);
    report(9, "AFE central value", &|| afe.borrow_mut().take().expect("computed with criterion 7"));
    report(10, "W+- coordinates", &c10);
    report(11, "Parseval identity", &c11);
    println!("{} of 11 criteria failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
