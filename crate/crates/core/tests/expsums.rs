use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;
use sp4moment::arith::*;
use sp4moment::expsums::*;

fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * x)
}

fn form(p1: i64, p2: i64, p4: i64) -> HalfIntegralForm {
    HalfIntegralForm::new(p1, p2, p4).unwrap()
}

/// Direct transcription of the rank-one sum with floating phases and a
/// brute-force inverse.
fn h_direct(p: &HalfIntegralForm, s: &HalfIntegralForm, c: i64, sign: i64) -> Complex64 {
    if p.p4 != s.p4 {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for d1 in 0..c {
        let Some(inv) = (0..c).find(|x| (x * d1 - 1).rem_euclid(c) == 0 || c == 1) else {
            continue;
        };
        if gcd(d1, c) != 1 {
            continue;
        }
        for d2 in 0..c {
            let num = inv * s.p4 * d2 * d2 - sign * inv * p.p2 * d2 + s.p2 * d2 + inv * p.p1 + d1 * s.p1;
            let frac = num.rem_euclid(c) as f64 / c as f64;
            acc += e(frac - sign as f64 * (p.p2 * s.p2) as f64 / (2 * c * s.p4) as f64);
        }
    }
    acc
}

fn to_c64(z: &rug::Complex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

#[test]
fn h_sum_examples() {
    let i = HalfIntegralForm::IDENTITY;
    let s = form(3, 1, 2);
    assert_eq!(h_sum(&i, &s, 5, 1, 128), rug::Complex::with_val(128, 0));
    let p = form(2, 3, 5);
    let s = form(1, 1, 5);
    for sign in [1, -1] {
        let v = to_c64(&h_sum(&p, &s, 1, sign, 128));
        let expect = e(-(sign as f64) * 3.0 / 10.0);
        assert!((v - expect).norm() < 1e-15);
    }
    for sign in [1, -1] {
        let v = to_c64(&h_sum(&i, &i, 3, sign, 128));
        assert!((v - Complex64::new(3.0, 0.0)).norm() < 1e-14);
    }
    let m = h_bound_margin(&i, &i, 3, 128).unwrap();
    assert!((m.to_f64() - 0.5).abs() < 1e-20);
    let m1 = h_bound_margin(&p, &s, 1, 128).unwrap();
    assert!((m1.to_f64() - 1.0).abs() < 1e-20);
    assert_eq!(h_bound_margin(&i, &i, 4, 64), Err(ExpSumError::EvenModulus(4)));
}

#[test]
fn h_sum_matches_direct_transcription() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..60 {
        let p4 = rng.gen_range(1..6);
        let p1 = rng.gen_range(1..8);
        let p2 = rng.gen_range(-3..=3);
        let s1 = rng.gen_range(1..8);
        let s2 = rng.gen_range(-3..=3);
        let (Ok(p), Ok(s)) = (HalfIntegralForm::new(p1, p2, p4), HalfIntegralForm::new(s1, s2, p4)) else {
            continue;
        };
        let c = rng.gen_range(1..30);
        for sign in [1, -1] {
            let fast = h_sum_exact(&p, &s, c as u64, sign).eval_f64();
            let slow = h_direct(&p, &s, c, sign as i64);
            assert!((fast - slow).norm() < 1e-9, "{p:?} {s:?} c={c}");
        }
    }
}

#[test]
fn h_sum_sign_flip_symmetry() {
    // H^-(P, S) = H^+(P', S) with p2 -> -p2
    let p = form(3, 2, 4);
    let q = form(3, -2, 4);
    let s = form(5, 3, 4);
    for c in [5u64, 9, 15, 21] {
        let a = h_sum_exact(&p, &s, c, -1).eval_f64();
        let b = h_sum_exact(&q, &s, c, 1).eval_f64();
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn h_sum_twisted_multiplicativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pairs = [(3u64, 5u64), (3, 7), (5, 7), (3, 11), (5, 11), (3, 13), (5, 21), (7, 15), (3, 35)];
    for &(c1, c2) in &pairs {
        assert!(c1 * c2 <= 105);
        for _ in 0..5 {
            let p4 = rng.gen_range(1..5);
            let p = form(rng.gen_range(p4..p4 + 10), rng.gen_range(-2..=2), p4);
            let s = form(rng.gen_range(p4..p4 + 10), rng.gen_range(-2..=2), p4);
            let whole = h_sum_exact(&p, &s, c1 * c2, 1).eval_f64().norm();
            // S rescaled by the inverse of the complementary modulus
            let part = |ca: u64, cb: u64| {
                let inv = mod_inverse(cb as i64, ca).unwrap() as i64;
                let s2 = (s.p2 * inv).rem_euclid(ca as i64);
                let s1 = (s.p1 * inv * inv).rem_euclid(ca as i64) + 10 * ca as i64 * (1 + s2 * s2);
                let sp = form(s1, s2, s.p4);
                h_sum_exact(&p, &sp, ca, 1).eval_f64().norm()
            };
            let prod = part(c1, c2) * part(c2, c1);
            assert!((whole - prod).abs() < 1e-8 * (1.0 + whole), "{c1} {c2}: {whole} vs {prod}");
        }
    }
}

#[test]
fn h_bound_unimodular_specialisation() {
    // P = V^{-1} V^{-T} has det 2P = 4
    let vs: [Mat2; 4] = [[[1, 0], [0, 1]], [[1, 1], [0, 1]], [[2, 1], [1, 1]], [[1, 2], [1, 3]]];
    for v in vs {
        let vinv = mat_inv_unimodular(&v);
        let p = HalfIntegralForm::IDENTITY.congruent(&vinv);
        assert_eq!(p.det2(), 4);
        for s1 in 1..6 {
            let s = HalfIntegralForm { p1: s1 + p.p4, p2: 1, p4: p.p4 };
            for c in (1..60u64).step_by(2) {
                let h = h_sum_exact(&p, &s, c, 1).eval_f64().norm();
                let bound = (divisor_tau(c) * c * gcd(4, c as i64) as u64) as f64;
                assert!(h <= bound * (1.0 + 1e-12));
            }
        }
    }
}

fn salie_brute(m: i64, n: i64, p: i64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for d in 1..p {
        let inv = (1..p).find(|x| (x * d) % p == 1).unwrap();
        acc += e((m * d + n * inv).rem_euclid(p) as f64 / p as f64) * jacobi(d, p as u64) as f64;
    }
    acc
}

#[test]
fn salie_examples_and_bound() {
    let g = salie_sum(0, 0, 7, 128).unwrap();
    assert!(to_c64(&g).norm() < 1e-20, "sum of a nontrivial character vanishes");
    // (0, n): reduces to a twisted Gauss sum of modulus √p
    let v = to_c64(&salie_sum(0, 3, 11, 128).unwrap());
    assert!((v.norm() - 11f64.sqrt()).abs() < 1e-12);
    let v = to_c64(&salie_sum(1, 1, 5, 128).unwrap());
    assert!((v - salie_brute(1, 1, 5)).norm() < 1e-12);
    assert_eq!(salie_sum(1, 1, 9, 64), Err(ExpSumError::NotPrime(9)));
    for p in (3..=97u64).filter(|&p| is_prime(p)) {
        for m in -3..6 {
            for n in -3..6 {
                let v = to_c64(&salie_sum(m, n, p, 128).unwrap());
                assert!((v - salie_brute(m, n, p as i64)).norm() < 1e-10, "m={m} n={n} p={p}");
                if (m * n).rem_euclid(p as i64) != 0 {
                    assert!(v.norm() <= 2.0 * (p as f64).sqrt() + 1e-10);
                }
            }
        }
    }
}

/// Independent reading of X(C): symmetric `N = adj(C) D` modulo `det C`
/// over a generous box of D, and completions found by search.
fn brute_classes(c: &Mat2) -> Vec<(Mat2, Mat2)> {
    let det = mat_det(c);
    let ad = det.abs();
    let bound = 2 * ad;
    let adj = mat_adj(c);
    let mut seen = std::collections::HashMap::new();
    for d11 in -bound..=bound {
        for d12 in -bound..=bound {
            for d21 in -bound..=bound {
                for d22 in -bound..=bound {
                    let d = [[d11, d12], [d21, d22]];
                    let n = mat_mul(&adj, &d);
                    if n[0][1] != n[1][0] {
                        continue;
                    }
                    let key = (n[0][0].rem_euclid(ad), n[0][1].rem_euclid(ad), n[1][1].rem_euclid(ad));
                    if seen.contains_key(&key) {
                        continue;
                    }
                    // completion search: B = (A Dᵀ − I) adj(C)ᵀ / det
                    'search: for a11 in -3..=3 {
                        for a12 in -3..=3 {
                            for a21 in -3..=3 {
                                for a22 in -3..=3 {
                                    let a = [[a11, a12], [a21, a22]];
                                    let mut m = mat_mul(&a, &mat_transpose(&d));
                                    m[0][0] -= 1;
                                    m[1][1] -= 1;
                                    let bn = mat_mul(&m, &mat_transpose(&adj));
                                    if bn.iter().flatten().any(|v| v % det != 0) {
                                        continue;
                                    }
                                    let b = [[bn[0][0] / det, bn[0][1] / det], [bn[1][0] / det, bn[1][1] / det]];
                                    if is_symplectic(&a, &b, c, &d) {
                                        seen.insert(key, (a, d));
                                        break 'search;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    seen.into_values().collect()
}

fn brute_kloosterman(q: &HalfIntegralForm, t: &HalfIntegralForm, c: &Mat2) -> Complex64 {
    let det = mat_det(c) as f64;
    let adj = mat_adj(c);
    let cinv = [[adj[0][0] as f64 / det, adj[0][1] as f64 / det], [adj[1][0] as f64 / det, adj[1][1] as f64 / det]];
    let qf = q.to_f64();
    let tf = t.to_f64();
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        let mut r = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        r
    };
    let tof = |m: Mat2| [[m[0][0] as f64, m[0][1] as f64], [m[1][0] as f64, m[1][1] as f64]];
    brute_classes(c)
        .into_iter()
        .map(|(a, d)| {
            let x = mul(mul(tof(a), cinv), qf);
            let y = mul(mul(cinv, tof(d)), tf);
            e(x[0][0] + x[1][1] + y[0][0] + y[1][1])
        })
        .sum()
}

#[test]
fn coset_reps_unit_modulus() {
    let reps = symplectic_coset_reps(&IDENTITY).unwrap();
    assert_eq!(reps.len(), 1);
    let k = matrix_kloosterman(&HalfIntegralForm::IDENTITY, &HalfIntegralForm::HEXAGONAL, &IDENTITY, 128).unwrap();
    assert!((to_c64(&k) - Complex64::new(1.0, 0.0)).norm() < 1e-30);
    assert_eq!(symplectic_coset_reps(&[[1, 2], [2, 4]]), Err(ExpSumError::SingularModulus));
}

#[test]
fn coset_reps_match_brute_force() {
    let cs: [Mat2; 7] = [[[1, 0], [0, 2]], [[2, 0], [0, 2]], [[1, 1], [0, 3]], [[2, 1], [1, 2]], [[0, 1], [-2, 0]], [[1, 2], [3, 4]], [[2, 0], [1, -2]]];
    let q = form(1, 1, 2);
    let t = form(2, -1, 3);
    for c in cs {
        let reps = symplectic_coset_reps(&c).unwrap();
        let brute = brute_classes(&c);
        assert_eq!(reps.len(), brute.len(), "C = {c:?}");
        let adj = mat_adj(&c);
        let ad = mat_det(&c).abs();
        let mut keys = std::collections::HashSet::new();
        for r in &reps {
            assert!(is_symplectic(&r.a, &r.b, &c, &r.d));
            let n = mat_mul(&adj, &r.d);
            assert!(keys.insert((n[0][0].rem_euclid(ad), n[0][1].rem_euclid(ad), n[1][1].rem_euclid(ad))));
        }
        let fast = matrix_kloosterman_exact(&q, &t, &c).unwrap().eval_f64();
        let slow = brute_kloosterman(&q, &t, &c);
        assert!((fast - slow).norm() < 1e-9, "C = {c:?}: {fast} vs {slow}");
    }
    let two = [[2, 0], [0, 2]];
    let u = HalfIntegralForm::IDENTITY;
    let fast = matrix_kloosterman_exact(&u, &u, &two).unwrap().eval_f64();
    assert!((fast - brute_kloosterman(&u, &u, &two)).norm() < 1e-9);
}

#[test]
fn kloosterman_real_for_symmetric_modulus() {
    let i = HalfIntegralForm::IDENTITY;
    for c in [[[1, 0], [0, 2]], [[2, 1], [1, 2]], [[1, 1], [1, -2]], [[2, 0], [0, 3]], [[1, 2], [2, -2]], [[0, 2], [2, 1]]] {
        assert!(mat_det(&c).abs() <= 6);
        let k = matrix_kloosterman(&i, &i, &c, 128).unwrap();
        assert!(k.imag().clone().abs() < 1e-30, "C = {c:?}");
    }
}

fn random_unimodular(rng: &mut ChaCha8Rng) -> Mat2 {
    let mut m = IDENTITY;
    for _ in 0..rng.gen_range(1..5) {
        let k = rng.gen_range(-2..=2);
        let step: Mat2 = if rng.gen_bool(0.5) { [[1, k], [0, 1]] } else { [[1, 0], [k, 1]] };
        m = mat_mul(&m, &step);
    }
    if rng.gen_bool(0.3) {
        m = mat_mul(&m, &[[0, 1], [1, 0]]);
    }
    m
}

#[test]
fn kloosterman_invariant_under_unimodular_move() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 100 {
        let c: Mat2 = [[rng.gen_range(-3..=3), rng.gen_range(-3..=3)], [rng.gen_range(-3..=3), rng.gen_range(-3..=3)]];
        let det = mat_det(&c);
        if det == 0 || det.abs() > 6 {
            continue;
        }
        let m: Mat2 = [[rng.gen_range(-2..=2), rng.gen_range(-2..=2)], [rng.gen_range(-2..=2), rng.gen_range(-2..=2)]];
        if mat_det(&m) == 0 {
            continue;
        }
        let u = random_unimodular(&mut rng);
        let t = HalfIntegralForm::from_doubled(&{
            let mm = mat_mul(&m, &mat_transpose(&m));
            [[2 * mm[0][0], 2 * mm[0][1]], [2 * mm[1][0], 2 * mm[1][1]]]
        });
        let um = mat_mul(&u, &m);
        let t2 = HalfIntegralForm::from_doubled(&{
            let mm = mat_mul(&um, &mat_transpose(&um));
            [[2 * mm[0][0], 2 * mm[0][1]], [2 * mm[1][0], 2 * mm[1][1]]]
        });
        let i = HalfIntegralForm::IDENTITY;
        let a = matrix_kloosterman_exact(&i, &t, &c).unwrap().eval_f64();
        let b = matrix_kloosterman_exact(&i, &t2, &mat_mul(&c, &mat_transpose(&u))).unwrap().eval_f64();
        assert!((a - b).norm() < 1e-9, "C={c:?} M={m:?} U={u:?}");
        done += 1;
    }
}

#[test]
fn coset_cache_roundtrip_and_tamper() {
    let dir = std::env::temp_dir().join(format!("sp4-coset-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let c = [[2, 1], [1, 3]];
    let reps = symplectic_coset_reps(&c).unwrap();
    let path = dir.join("c.txt");
    save_coset_reps(&path, &c, &reps).unwrap();
    let first = std::fs::read(&path).unwrap();
    save_coset_reps(&path, &c, &reps).unwrap();
    assert_eq!(first, std::fs::read(&path).unwrap());
    assert_eq!(load_coset_reps(&path, &c).unwrap(), reps);
    assert!(load_coset_reps(&path, &[[1, 0], [0, 5]]).is_err());
    let text = String::from_utf8(first).unwrap().replacen('\n', "\n9 ", 2);
    std::fs::write(&path, text).unwrap();
    assert!(load_coset_reps(&path, &c).is_err());
    std::fs::remove_dir_all(&dir).ok();
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn h_bound_small_moduli(p1 in 1i64..30, p2 in -30i64..30, p4 in 1i64..30, s1 in 1i64..30, s2 in -30i64..30, c in (0u64..40).prop_map(|x| 2 * x + 1)) {
        prop_assume!(4 * p1 * p4 > p2 * p2 && 4 * s1 * p4 > s2 * s2);
        let p = form(p1, p2, p4);
        let s = form(s1, s2, p4);
        let m = h_bound_margin(&p, &s, c, 96).unwrap();
        prop_assert!(m <= Float::with_val(96, 1.0) + 1e-20f64);
    }
}
