use sp4moment::kitaoka::{kitaoka_residual, Cutoffs};
use sp4moment::report::Relation;
use sp4moment::verify::*;

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("sp4moment-verify-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn prime_power_list() {
    let q = odd_prime_powers(30);
    assert_eq!(q, vec![3, 5, 7, 9, 11, 13, 17, 19, 23, 25, 27, 29]);
    assert_eq!(odd_prime_powers(343).last(), Some(&343));
}

#[test]
fn small_sweeps_pass() {
    let m = h_bound_sweep(21, 20, 7, 128).unwrap();
    assert!(m <= 1.0, "{m}");
    assert!(m > 0.0);
    assert!(gauss_sum_sweep(27, 128).unwrap() < 1e-30);
}

#[test]
fn halved_cutoffs_give_larger_certificates() {
    let (t, q) = dimension_zero_pairs()[0];
    let full = kitaoka_residual(&t, &q, 8, &Cutoffs::default()).unwrap();
    let half = kitaoka_residual(&t, &q, 8, &Cutoffs { c_max: 30, s_max: 30, c_norm_max: 20.0 }).unwrap();
    assert!(half.certificate() > full.certificate());
    assert!(half.total().norm() <= half.certificate() + 1e-6);
    assert!(full.total().norm() <= full.certificate() + 1e-6);
}

#[test]
fn wpm_sweep_is_seeded() {
    let a = wpm_sweep(50, 1).unwrap();
    let b = wpm_sweep(50, 1).unwrap();
    assert_eq!(a.short_as_printed, b.short_as_printed);
    assert_eq!(a.determinant_failures, 0);
    assert!(a.short_times_four < 1e-10);
    assert!(a.short_as_printed > 0.1);
}

#[test]
fn cache_is_built_on_demand_and_refused_when_tampered() {
    let dir = temp_dir("cache");
    let cfg = VerifyConfig { cache_dir: Some(dir.clone()), d_max: 60, build_missing: false, ..VerifyConfig::default() };
    assert!(matches!(jacobi_table(&cfg, 10), Err(VerifyError::CacheMissing(_))));
    let cfg = VerifyConfig { build_missing: true, ..cfg };
    let t = jacobi_table(&cfg, 10).unwrap();
    assert_eq!(*t.c(3).unwrap(), 1);
    let path = jacobi_cache_path(&dir, 10, 60);
    let text = std::fs::read_to_string(&path).unwrap().replacen("\n4 -2 1\n", "\n4 -3 1\n", 1);
    std::fs::write(&path, text).unwrap();
    assert!(matches!(jacobi_table(&cfg, 10), Err(VerifyError::Siegel(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn siegel_suite_report() {
    let cfg = VerifyConfig { d_max: 60, ..VerifyConfig::default() };
    let r = run_suite("siegel", &cfg).unwrap();
    assert!(r.all_pass());
    assert_eq!(r.checks.len(), 4);
    assert!(r.checks.iter().all(|c| c.relation == Relation::Equal));
    assert_eq!(r.config["d_max"], 60);
}

#[test]
fn configuration_is_validated() {
    let low = VerifyConfig { precision_bits: 32, ..VerifyConfig::default() };
    assert!(matches!(run_suite("siegel", &low), Err(VerifyError::InvalidConfig(_))));
    let cut = VerifyConfig { cutoffs: Cutoffs { c_max: 0, ..Cutoffs::default() }, ..VerifyConfig::default() };
    assert!(matches!(run_suite("siegel", &cut), Err(VerifyError::InvalidConfig(_))));
    assert!(matches!(run_suite("nope", &VerifyConfig::default()), Err(VerifyError::UnknownSuite(_))));
}
