//! One-dimensional quadrature on radial intervals and tensor rules on Euclidean discs.
//!
//! All area integrals use the normalized measure `dA = dx dy / π`, so the unit disc has
//! total mass one.

mod disc;

pub use disc::{
    disc_integral, disc_integral_par, disc_integral_real, lq_mean, lq_mean_with_rule, DiscRule,
    DEFAULT_NODES,
};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Absolute and relative stopping tolerances for adaptive integration.
///
/// An integral is accepted when its error estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Purely relative tolerance; used where integrands can be extremely small.
    pub const fn relative(rel: f64) -> Self {
        Tolerance {
            abs: f64::MIN_POSITIVE,
            rel,
        }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::new(1e-10, 1e-12)
    }
}

/// An integral estimate together with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_SUBDIVISIONS: usize = 4000;

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err, res_abs)
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Returns a [`LabError::Tolerance`] carrying the best estimate when the subdivision
/// budget is exhausted, and [`LabError::Divergent`] when the integrand is not finite.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut intervals: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e, _) = gk15(&f, a, b);
    intervals.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let value: f64 = intervals.iter().map(|iv| iv.2).sum();
        let error: f64 = intervals.iter().map(|iv| iv.3).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(LabError::Divergent(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if error <= tol.target(value) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if intervals.len() >= MAX_SUBDIVISIONS {
            return Err(LabError::Tolerance {
                what: format!("adaptive quadrature on [{a}, {b}]"),
                estimate: value,
                error,
            });
        }
        let (idx, _) = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = intervals.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval cannot be split further in floating point
            return Err(LabError::Tolerance {
                what: format!("adaptive quadrature on [{a}, {b}]"),
                estimate: value,
                error,
            });
        }
        let (v1, e1, _) = gk15(&f, lo, mid);
        let (v2, e2, _) = gk15(&f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}

/// Adaptive integral of `f` over `[a, b] ⊂ [0, 1]` with absolute tolerance `tol`.
pub fn radial_integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
        return Err(LabError::domain(format!(
            "radial interval [{a}, {b}] must satisfy 0 <= a <= b <= 1"
        )));
    }
    Ok(adaptive(f, a, b, Tolerance::new(tol, 0.0))?.value)
}

/// Integral over `[a, 1)` of a function given in terms of the gap `δ = 1 − s`.
///
/// Uses the substitution `δ = e^{-u}`, which concentrates nodes at the boundary, and sums
/// panels of doubling width in `u` until two consecutive panels are negligible.
pub fn boundary_integral<F: Fn(f64) -> f64>(f_gap: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    if !(0.0..1.0).contains(&a) {
        return Err(LabError::domain(format!(
            "boundary integral needs 0 <= a < 1, got {a}"
        )));
    }
    let g = |u: f64| {
        let delta = (-u).exp();
        if delta == 0.0 {
            return 0.0;
        }
        f_gap(delta) * delta
    };
    let mut u = -(1.0 - a).ln();
    let mut width = 1.0;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut quiet = 0;
    let mut prev_panel = f64::INFINITY;
    while u < 745.0 {
        let hi = (u + width).min(745.0);
        let panel_tol = Tolerance::new(tol.abs * 0.25, tol.rel);
        let est = adaptive(g, u, hi, panel_tol)?;
        evaluations += est.evaluations;
        if est.value.abs() > 10.0 * prev_panel.abs() && u > 20.0 && est.value.abs() > 0.0 {
            return Err(LabError::Divergent(format!(
                "boundary contribution grows toward s = 1 (panel at u = {u:.1})"
            )));
        }
        total += est.value;
        error += est.error;
        if est.value.abs() <= 1e-3 * tol.target(total) && u > 4.0 {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        prev_panel = est.value;
        u = hi;
        width *= 2.0;
    }
    if !total.is_finite() {
        return Err(LabError::Divergent("boundary integral is not finite".into()));
    }
    Ok(Estimate {
        value: total,
        error,
        evaluations,
    })
}

static GL_CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration and cached.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    let cache = GL_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("gl cache").get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache
        .lock()
        .expect("gl cache")
        .insert(n, Arc::clone(&rule));
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Compensated (Neumaier) summation; the result does not depend on thread scheduling.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Complex compensated summation.
pub fn neumaier_sum_complex<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let mut re = (0.0f64, 0.0f64);
    let mut im = (0.0f64, 0.0f64);
    let step = |acc: &mut (f64, f64), v: f64| {
        let t = acc.0 + v;
        if acc.0.abs() >= v.abs() {
            acc.1 += (acc.0 - t) + v;
        } else {
            acc.1 += (v - t) + acc.0;
        }
        acc.0 = t;
    };
    for v in values {
        step(&mut re, v.re);
        step(&mut im, v.im);
    }
    Complex64::new(re.0 + re.1, im.0 + im.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1usize, 2, 5, 16, 48, 101] {
            let rule = gauss_legendre(n);
            let (x, w) = (&rule.0, &rule.1);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            for deg in 0..(2 * n).min(40) {
                let approx: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!((approx - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn radial_examples() {
        assert!((radial_integral(|_| 1.0, 0.0, 1.0, 1e-12).unwrap() - 1.0).abs() < 1e-12);
        assert!((radial_integral(|s| s, 0.0, 1.0, 1e-12).unwrap() - 0.5).abs() < 1e-12);
        let v = radial_integral(|s| 2.0 * (1.0 - s * s), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
        assert!(radial_integral(|s| s, 0.5, 0.2, 1e-12).is_err());
        assert!(radial_integral(|s| s, -0.1, 0.2, 1e-12).is_err());
    }

    #[test]
    fn tolerance_failure_carries_estimate() {
        // 1/sqrt|x - 1/3| cannot be resolved to 1e-15 absolute
        let err = adaptive(
            |x| 1.0 / (x - 1.0 / 3.0).abs().sqrt().max(1e-300),
            0.0,
            1.0,
            Tolerance::new(1e-15, 0.0),
        )
        .unwrap_err();
        match err {
            LabError::Tolerance { estimate, .. } => assert!(estimate > 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn boundary_integral_handles_endpoint_singularity() {
        // ∫_0^1 (1-s)^{-1/2} ds = 2
        let est = boundary_integral(|d| d.powf(-0.5), 0.0, Tolerance::relative(1e-12)).unwrap();
        assert!((est.value - 2.0).abs() < 1e-10, "{}", est.value);
        // ∫_{0.9}^1 (1-s)^2 ds = 0.1^3 / 3
        let est = boundary_integral(|d| d * d, 0.9, Tolerance::relative(1e-12)).unwrap();
        assert!((est.value - 1e-3 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_integral_detects_divergence() {
        let err = boundary_integral(|d| 1.0 / (d * d), 0.0, Tolerance::relative(1e-10)).unwrap_err();
        assert!(matches!(err, LabError::Divergent(_)), "{err:?}");
    }

    #[test]
    fn compensated_sum_is_accurate() {
        let v = vec![1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(v), 2.0);
    }
}
