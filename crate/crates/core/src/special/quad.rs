//! Gauss–Legendre and Gauss–Kronrod quadrature in double precision.

use std::collections::{BinaryHeap, HashMap};
use std::ops::{Add, Mul, Sub};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

/// Values that can be integrated: real or complex doubles.
pub trait Integrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// An integral value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the three-term recurrence and memoised per order.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    if let Some(r) = guard.get(&n) {
        return r;
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    let leaked: &'static (Vec<f64>, Vec<f64>) = Box::leak(Box::new((x, w)));
    guard.insert(n, leaked);
    leaked
}

/// Fixed-order Gauss–Legendre rule on `[a, b]`.
pub fn gl_integrate<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64, n: usize) -> T {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = T::zero();
    for (xi, wi) in x.iter().zip(w) {
        acc = acc + f(mid + half * xi) * (wi * half);
    }
    acc
}

/// Composite rule with `panels` equal panels of `n`-point Gauss–Legendre.
/// The error estimate compares against the same panels at order `n - 4`.
pub fn gl_panels<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64, panels: usize, n: usize) -> Estimate<T> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut fine = T::zero();
    let mut coarse = T::zero();
    for p in 0..panels {
        let lo = a + h * p as f64;
        let hi = if p + 1 == panels { b } else { lo + h };
        fine = fine + gl_integrate(f, lo, hi, n);
        coarse = coarse + gl_integrate(f, lo, hi, n.saturating_sub(4).max(2));
    }
    Estimate { value: fine, error: (fine - coarse).magnitude() }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut vals = [(fc, fc); 7];
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(mid - dx), f(mid + dx));
        vals[j] = (lo, hi);
        let s = lo + hi;
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    // QUADPACK error heuristic, scaled by the mean absolute deviation
    let mean = k * 0.5;
    let mut resasc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        resasc += WGK[j] * ((vals[j].0 - mean).magnitude() + (vals[j].1 - mean).magnitude());
    }
    resasc *= half.abs();
    let k = k * half;
    let g = g * half;
    let diff = (k - g).magnitude();
    let err = if resasc > 0.0 && diff > 0.0 {
        resasc * (200.0 * diff / resasc).powf(1.5).min(1.0)
    } else {
        diff
    };
    (k, err.max(50.0 * f64::EPSILON * k.magnitude()))
}

/// Adaptive Gauss–Kronrod (7, 15) integration to absolute tolerance `tol`.
///
/// The interval is first cut into `initial` equal pieces (useful for
/// oscillatory integrands); the worst piece is bisected until the summed
/// error estimate falls below `tol` or `max_intervals` is reached.
pub fn adaptive<T: Integrand>(mut f: impl FnMut(f64) -> T, a: f64, b: f64, tol: f64, initial: usize, max_intervals: usize) -> Estimate<T> {
    struct Piece<T> {
        lo: f64,
        hi: f64,
        value: T,
        error: f64,
    }
    impl<T> PartialEq for Piece<T> {
        fn eq(&self, other: &Self) -> bool {
            self.error == other.error
        }
    }
    impl<T> Eq for Piece<T> {}
    impl<T> PartialOrd for Piece<T> {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl<T> Ord for Piece<T> {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.error.total_cmp(&other.error)
        }
    }

    let initial = initial.max(1);
    let h = (b - a) / initial as f64;
    let mut heap = BinaryHeap::with_capacity(initial);
    let mut total = 0.0;
    for i in 0..initial {
        let lo = a + h * i as f64;
        let hi = if i + 1 == initial { b } else { lo + h };
        let (value, error) = gk15(&mut f, lo, hi);
        total += error;
        heap.push(Piece { lo, hi, value, error });
    }
    while total > tol && heap.len() < max_intervals {
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.lo + worst.hi);
        if m <= worst.lo || m >= worst.hi {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.lo, m);
        let (v2, e2) = gk15(&mut f, m, worst.hi);
        total += e1 + e2 - worst.error;
        heap.push(Piece { lo: worst.lo, hi: m, value: v1, error: e1 });
        heap.push(Piece { lo: m, hi: worst.hi, value: v2, error: e2 });
    }
    let mut pieces = heap.into_vec();
    pieces.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let mut value = T::zero();
    let mut error = 0.0;
    for p in &pieces {
        value = value + p.value;
        error += p.error;
    }
    Estimate { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_on_polynomials() {
        for n in [2usize, 5, 12, 20] {
            let v = gl_integrate(&mut |x: f64| x.powi(2 * n as i32 - 1) + x.powi(2 * n as i32 - 2), 0.0, 1.0, n);
            let exact = 1.0 / (2 * n) as f64 + 1.0 / (2 * n - 1) as f64;
            assert!((v - exact).abs() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let r = adaptive(|x: f64| (50.0 * x).cos(), 0.0, 3.0, 1e-12, 20, 10_000);
        assert!((r.value - (150.0f64).sin() / 50.0).abs() < 1e-12);
    }
}
