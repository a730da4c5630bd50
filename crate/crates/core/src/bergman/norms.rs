use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::KernelSeries;
use crate::error::{LabError, Result};
use crate::geometry::BergmanDisc;
use crate::quadrature::{adaptive, neumaier_sum, DiscRule, Tolerance};
use crate::weights::{ap_constant, RadialWeight};

/// `(∫ |F|^p v dA)^{1/p}` on a rule.
pub fn lp_norm<F: Fn(Complex64) -> Result<Complex64>>(
    f: F,
    rule: &DiscRule,
    p: f64,
    v: &RadialWeight,
) -> Result<f64> {
    let mut terms = Vec::with_capacity(rule.len());
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let val = f(z)?.norm();
        if !val.is_finite() {
            return Err(LabError::Evaluation {
                node: z,
                what: format!("|F| = {val}"),
            });
        }
        terms.push(w * val.powf(p) * v.eval(z.norm()));
    }
    Ok(neumaier_sum(terms).powf(1.0 / p))
}

/// `‖B_z^ω‖_{A^p_v}` by quadrature on the Möbius pullback of `base` to `z`.
pub fn kernel_norm_quadrature(
    kernel: &KernelSeries,
    v: &RadialWeight,
    p: f64,
    z: Complex64,
    base: &DiscRule,
) -> Result<f64> {
    let rule = DiscRule::mobius_pullback(z, base);
    lp_norm(|w| kernel.eval_fast(w, z), &rule, p, v)
}

/// Quadrature value and the proxy `v(D(z,r))^{1/p} / ω(D(z,r))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelNorm {
    pub quadrature: f64,
    pub proxy: f64,
}

pub fn kernel_norm(
    kernel: &KernelSeries,
    v: &RadialWeight,
    p: f64,
    z: Complex64,
    r: f64,
    base: &DiscRule,
) -> Result<KernelNorm> {
    if !(p > 1.0) {
        return Err(LabError::domain(format!("kernel_norm needs p > 1, got {p}")));
    }
    let quadrature = kernel_norm_quadrature(kernel, v, p, z, base)?;
    let disc = BergmanDisc::new(z, r)?;
    let vm = v.disc_mass(disc.euclid_center, disc.euclid_radius)?;
    let wm = kernel
        .weight()
        .disc_mass(disc.euclid_center, disc.euclid_radius)?;
    Ok(KernelNorm {
        quadrature,
        proxy: vm.powf(1.0 / p) / wm,
    })
}

/// `‖(B_z^ω)^{(n)}‖_{A^p_v}`, derivative in the free variable, by quadrature.
pub fn kernel_deriv_norm(
    kernel: &KernelSeries,
    v: &RadialWeight,
    p: f64,
    n: usize,
    z: Complex64,
    base: &DiscRule,
) -> Result<f64> {
    let rule = DiscRule::mobius_pullback(z, base);
    lp_norm(|w| kernel.derivative(n, w, z), &rule, p, v)
}

/// `(∫_0^{|z|} v̂(t) / (ω̂(t)^p (1−t)^{p(n+1)}) dt)^{1/p}`.
pub fn kernel_deriv_norm_proxy(
    omega: &RadialWeight,
    v: &RadialWeight,
    p: f64,
    n: usize,
    z: Complex64,
) -> Result<f64> {
    if !(p > 1.0) {
        return Err(LabError::domain(format!("needs p > 1, got {p}")));
    }
    let b = z.norm();
    if b == 0.0 {
        return Ok(0.0);
    }
    let exponent = p * (n as f64 + 1.0);
    // tails may fail inside the integrand; surface the first error
    let failure = std::cell::RefCell::new(None);
    let integrand = |t: f64| -> f64 {
        match (v.tail(t), omega.tail(t)) {
            (Ok(vt), Ok(wt)) => vt / (wt.powf(p) * (1.0 - t).powf(exponent)),
            (Err(e), _) | (_, Err(e)) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let est = adaptive(integrand, 0.0, b, Tolerance::new(0.0, 1e-9))?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est.value.powf(1.0 / p))
}

/// `F = Σ λ_j B_{z_j}/‖B_{z_j}‖_{A^p_v}` with its measured norm ratio.
#[derive(Debug, Clone)]
pub struct AtomicFunction {
    pub points: Vec<Complex64>,
    pub lambda: Vec<Complex64>,
    /// `‖B_{z_j}‖_{A^p_v}`
    pub atom_norms: Vec<f64>,
    pub norm: f64,
    pub lambda_norm: f64,
    /// `‖F‖_{A^p_v} / ‖λ‖_{ℓ^p}`
    pub ratio: f64,
    kernel: Arc<KernelSeries>,
}

impl AtomicFunction {
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&a, &l), &n) in self.points.iter().zip(&self.lambda).zip(&self.atom_norms) {
            acc += l * self.kernel.eval_fast(z, a)? / n;
        }
        Ok(acc)
    }
}

pub fn atomic_function(
    lambda: &[Complex64],
    points: &[Complex64],
    kernel: Arc<KernelSeries>,
    v: &Arc<RadialWeight>,
    p: f64,
    rule: &DiscRule,
) -> Result<AtomicFunction> {
    if lambda.len() != points.len() {
        return Err(LabError::domain("one coefficient per lattice point is needed"));
    }
    let ap = ap_constant(kernel.weight(), v, p)?;
    if !ap.value.is_finite() {
        return Err(LabError::precondition(format!(
            "A_p({}, {}) is infinite: {}",
            kernel.weight().label(),
            v.label(),
            ap.diagnostic.unwrap_or_default()
        )));
    }
    let base = DiscRule::unit_default();
    let atom_norms = points
        .iter()
        .map(|&a| kernel_norm_quadrature(&kernel, v, p, a, &base))
        .collect::<Result<Vec<_>>>()?;
    let lambda_norm = lambda.iter().map(|l| l.norm().powf(p)).sum::<f64>().powf(1.0 / p);
    let mut f = AtomicFunction {
        points: points.to_vec(),
        lambda: lambda.to_vec(),
        atom_norms,
        norm: 0.0,
        lambda_norm,
        ratio: 0.0,
        kernel,
    };
    f.norm = lp_norm(|z| f.eval(z), rule, p, v)?;
    f.ratio = f.norm / lambda_norm;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Lattice;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_norm_examples() {
        let w0 = RadialWeight::power(0.0);
        let k = KernelSeries::new(Arc::clone(&w0), 400).unwrap();
        let base = DiscRule::unit_default();
        let n0 = kernel_norm(&k, &w0, 2.0, c(0.0, 0.0), 1.0, &base).unwrap();
        assert!((n0.quadrature - 1.0).abs() < 1e-10);
        let n1 = kernel_norm(&k, &w0, 2.0, c(0.5, 0.0), 1.0, &base).unwrap();
        assert!((n1.quadrature - 4.0 / 3.0).abs() < 1e-8);
        assert!(n1.proxy > 0.0);
    }

    #[test]
    fn reproducing_identity_series_kernel() {
        for alpha in [0.0, 1.0] {
            let w = RadialWeight::power(alpha);
            let k = KernelSeries::new(Arc::clone(&w), 400).unwrap();
            let base = DiscRule::unit_default();
            for z in [c(0.3, 0.1), c(-0.6, 0.5), c(0.0, 0.9)] {
                let rule = DiscRule::mobius_pullback(z, &base);
                let norm = lp_norm(|x| k.eval(x, z), &rule, 2.0, &w).unwrap();
                let bzz = k.eval(z, z).unwrap().re;
                assert!((norm * norm - bzz).abs() / bzz < 1e-4);
            }
        }
    }

    #[test]
    fn deriv_proxy_examples() {
        let w0 = RadialWeight::power(0.0);
        assert_eq!(kernel_deriv_norm_proxy(&w0, &w0, 2.0, 1, c(0.0, 0.0)).unwrap(), 0.0);
        for b in [0.3f64, 0.7, 0.9] {
            let got = kernel_deriv_norm_proxy(&w0, &w0, 2.0, 1, c(b, 0.0)).unwrap();
            let expect = (0.25 * ((1.0 - b).powi(-4) - 1.0)).sqrt();
            assert!((got - expect).abs() < 1e-7 * expect, "{got} vs {expect}");
        }
    }

    #[test]
    fn deriv_norm_tracks_proxy() {
        let w0 = RadialWeight::power(0.0);
        let k = KernelSeries::new(Arc::clone(&w0), 400).unwrap();
        let base = DiscRule::unit_default();
        let mut ratios = Vec::new();
        for b in [0.5, 0.7, 0.8, 0.9] {
            let z = c(b, 0.0);
            let q = kernel_deriv_norm(&k, &w0, 2.0, 1, z, &base).unwrap();
            let p = kernel_deriv_norm_proxy(&w0, &w0, 2.0, 1, z).unwrap();
            ratios.push(q / p);
        }
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |a, &r| (a.0.min(r), a.1.max(r)));
        assert!(hi / lo < 3.0, "{ratios:?}");
    }

    #[test]
    fn atomic_ratio_is_bounded() {
        let w0 = RadialWeight::power(0.0);
        let k = Arc::new(KernelSeries::new(Arc::clone(&w0), 400).unwrap());
        let lat = Lattice::generate(1.0, 0.99, 3).unwrap();
        assert!(lat.len() >= 100);
        let rule = DiscRule::unit_graded(10, 12, 1024);
        let single = atomic_function(&[c(1.0, 0.0)], &lat.points[5..6], Arc::clone(&k), &w0, 2.0, &rule).unwrap();
        assert!((single.ratio - 1.0).abs() < 1e-3);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts: Vec<Complex64> = lat.points.iter().copied().take(100).collect();
        let lam: Vec<Complex64> = (0..100).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let f50 = atomic_function(&lam[..50], &pts[..50], Arc::clone(&k), &w0, 2.0, &rule).unwrap();
        let f100 = atomic_function(&lam, &pts, Arc::clone(&k), &w0, 2.0, &rule).unwrap();
        // exact Gram-matrix norm for p = 2: ‖F‖² = Σ λ_i λ̄_j B(a_j, a_i)/(n_i n_j)
        let mut gram = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                let b = k.eval_fast(pts[j], pts[i]).unwrap();
                gram += (lam[i] * lam[j].conj() * b).re / (f50.atom_norms[i] * f50.atom_norms[j]);
            }
        }
        assert!((gram.sqrt() - f50.norm).abs() < 1e-3 * f50.norm);
        assert!((f100.ratio - f50.ratio).abs() <= 0.2 * f50.ratio, "{} vs {}", f100.ratio, f50.ratio);
        let alt: Vec<Complex64> = (0..50).map(|j| c(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        let pos = vec![c(1.0, 0.0); 50];
        let fa = atomic_function(&alt, &pts[..50], Arc::clone(&k), &w0, 2.0, &rule).unwrap();
        let fp = atomic_function(&pos, &pts[..50], Arc::clone(&k), &w0, 2.0, &rule).unwrap();
        assert!(fa.ratio.is_finite() && fp.ratio.is_finite());
    }
}
