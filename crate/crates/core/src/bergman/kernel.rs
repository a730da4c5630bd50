use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::weights::{RadialWeight, WeightFamily};

pub const DEFAULT_DMAX: usize = 400;
pub const DEFAULT_KERNEL_TOL: f64 = 1e-13;
/// Largest `|zζ̄|` accepted by the series.
pub const MAX_MODULUS: f64 = 0.995;

/// `B(z, ζ) = Σ κ_n (zζ̄)^n` with `κ_n = 1/(2·moment(2n+1))`.
#[derive(Debug, Clone)]
pub struct KernelSeries {
    weight: Arc<RadialWeight>,
    coeffs: Vec<f64>,
    /// `ratio_max[n] = max_{n <= k < d_max} κ_{k+1}/κ_k`
    ratio_max: Vec<f64>,
    d_max: usize,
    tol: f64,
    /// `α + 2` when the weight is `power(α)`, where `B = (1 − zζ̄)^{−(α+2)}`.
    closed_form: Option<f64>,
}

impl KernelSeries {
    pub fn new(weight: Arc<RadialWeight>, d_max: usize) -> Result<Self> {
        if d_max < 2 {
            return Err(LabError::domain("kernel needs d_max >= 2"));
        }
        let mut coeffs = Vec::with_capacity(d_max + 1);
        for n in 0..=d_max {
            let m = weight.moment(2.0 * n as f64 + 1.0)?;
            if !(m > 0.0) {
                return Err(LabError::domain(format!(
                    "weight {} has vanishing moment of order {}",
                    weight.label(),
                    2 * n + 1
                )));
            }
            coeffs.push(1.0 / (2.0 * m));
        }
        let mut ratio_max = vec![0.0; d_max + 1];
        let mut run = 0.0f64;
        for n in (0..d_max).rev() {
            run = run.max(coeffs[n + 1] / coeffs[n]);
            ratio_max[n] = run;
        }
        ratio_max[d_max] = run;
        let closed_form = match weight.family() {
            WeightFamily::Power { alpha } => Some(alpha + 2.0),
            _ => None,
        };
        Ok(KernelSeries {
            weight,
            coeffs,
            ratio_max,
            d_max,
            tol: DEFAULT_KERNEL_TOL,
            closed_form,
        })
    }

    /// Kernel of the unweighted space `A²`.
    pub fn unweighted(d_max: usize) -> Result<Self> {
        Self::new(RadialWeight::power(0.0), d_max)
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn weight(&self) -> &Arc<RadialWeight> {
        &self.weight
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `B(z, ζ)` by the series, to relative tolerance `tol`.
    pub fn eval(&self, z: Complex64, zeta: Complex64) -> Result<Complex64> {
        self.eval_with_tol(z, zeta, self.tol)
    }

    pub fn eval_with_tol(&self, z: Complex64, zeta: Complex64, tol: f64) -> Result<Complex64> {
        self.series(z * zeta.conj(), tol, 0)
    }

    /// `∂ⁿ/∂zⁿ B(z, ζ)`.
    pub fn derivative(&self, n: usize, z: Complex64, zeta: Complex64) -> Result<Complex64> {
        if n == 0 {
            return self.eval(z, zeta);
        }
        // Σ_{k>=n} κ_k k!/(k−n)! z^{k−n} ζ̄^k = ζ̄^n Σ_m κ_{m+n} (m+n)!/m! x^m
        let x = z * zeta.conj();
        Ok(self.series(x, self.tol, n)? * zeta.conj().powu(n as u32))
    }

    fn series(&self, x: Complex64, tol: f64, shift: usize) -> Result<Complex64> {
        let ax = x.norm();
        if ax > MAX_MODULUS {
            return Err(LabError::domain(format!(
                "|zζ̄| = {ax} exceeds the series margin {MAX_MODULUS}"
            )));
        }
        let factor = |m: usize| -> f64 {
            // (m+shift)!/m!
            (1..=shift).map(|i| (m + i) as f64).product()
        };
        let mut partial = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut power = Complex64::new(1.0, 0.0);
        let mut apow = 1.0;
        let top = self.d_max - shift;
        for m in 0..=top {
            let c = self.coeffs[m + shift] * factor(m);
            partial += power * c;
            abs_sum += c * apow;
            power *= x;
            apow *= ax;
            if m + 1 > top {
                break;
            }
            let next = self.coeffs[m + 1 + shift] * factor(m + 1) * apow;
            if next == 0.0 {
                return Ok(partial);
            }
            // geometric majorant of the remaining terms
            let growth = self.ratio_max[m + 1 + shift]
                * if shift > 0 {
                    (m + 2 + shift) as f64 / (m + 2) as f64
                } else {
                    1.0
                };
            let q = growth * ax;
            if q < 1.0 {
                let bound = next / (1.0 - q);
                if bound <= tol * abs_sum.max(partial.norm()) {
                    return Ok(partial);
                }
            }
        }
        let next = self.coeffs[self.d_max] * apow;
        let q = self.ratio_max[self.d_max] * ax;
        let bound = if q < 1.0 { next / (1.0 - q) } else { f64::INFINITY };
        if bound <= tol * abs_sum.max(partial.norm()) {
            return Ok(partial);
        }
        Err(LabError::Truncation {
            partial,
            bound,
            degree: self.d_max,
        })
    }

    /// Kernel value for bulk work: the closed form `(1 − zζ̄)^{−(α+2)}` for power
    /// weights, the series otherwise.
    pub fn eval_fast(&self, z: Complex64, zeta: Complex64) -> Result<Complex64> {
        match self.closed_form {
            Some(e) => {
                let x = z * zeta.conj();
                if x.norm() >= 1.0 {
                    return Err(LabError::domain("kernel evaluated outside the disc"));
                }
                Ok((Complex64::new(1.0, 0.0) - x).powf(-e))
            }
            None => self.eval(z, zeta),
        }
    }

    /// `B(a, a) = ‖B_a‖²_{A²_ω}`.
    pub fn diagonal(&self, a: Complex64) -> Result<f64> {
        Ok(self.eval_fast(a, a)?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn unweighted_examples() {
        let k = KernelSeries::unweighted(400).unwrap();
        assert!((k.eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        for n in 0..10 {
            assert!((k.coeff(n) - (n as f64 + 1.0)).abs() < 1e-10 * (n as f64 + 1.0));
        }
        let z = c(0.3, 0.4);
        assert!((k.eval(z, c(0.0, 0.0)).unwrap() - k.coeff(0)).norm() < 1e-15);
    }

    #[test]
    fn power_one_closed_form() {
        let k = KernelSeries::new(RadialWeight::power(1.0), 400).unwrap();
        for n in 0..8 {
            let expect = (n as f64 + 1.0) * (n as f64 + 2.0) / 2.0;
            assert!((k.coeff(n) - expect).abs() < 1e-10 * expect);
        }
        let (z, w) = (c(0.9, 0.0), c(0.0, 0.9));
        let got = k.eval(z, w).unwrap();
        let expect = (c(1.0, 0.0) - z * w.conj()).powi(-3);
        assert!((got - expect).norm() < 1e-8 * expect.norm());
    }

    #[test]
    fn hermitian_and_fast_path() {
        let k = KernelSeries::new(RadialWeight::power(0.5), 400).unwrap();
        let (z, w) = (c(0.5, -0.6), c(-0.3, 0.7));
        let a = k.eval(z, w).unwrap();
        let b = k.eval(w, z).unwrap();
        assert!((a - b.conj()).norm() < 1e-12);
        let fast = k.eval_fast(z, w).unwrap();
        assert!((a - fast).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn truncation_error_carries_partial_sum() {
        let k = KernelSeries::unweighted(50).unwrap();
        match k.eval(c(0.99, 0.0), c(0.99, 0.0)) {
            Err(LabError::Truncation { partial, degree, .. }) => {
                assert_eq!(degree, 50);
                assert!(partial.re > 100.0);
            }
            other => panic!("expected truncation, got {other:?}"),
        }
        assert!(k.eval(c(0.999, 0.0), c(0.999, 0.0)).is_err());
    }

    #[test]
    fn derivative_matches_closed_form() {
        let k = KernelSeries::unweighted(400).unwrap();
        let (z, w) = (c(0.4, 0.3), c(0.2, -0.5));
        // d/dz (1 − z w̄)^{-2} = 2 w̄ (1 − z w̄)^{-3}
        let x = c(1.0, 0.0) - z * w.conj();
        let expect = 2.0 * w.conj() / (x * x * x);
        let got = k.derivative(1, z, w).unwrap();
        assert!((got - expect).norm() < 1e-11 * expect.norm());
        let expect2 = 6.0 * w.conj() * w.conj() / x.powi(4);
        let got2 = k.derivative(2, z, w).unwrap();
        assert!((got2 - expect2).norm() < 1e-11 * expect2.norm());
    }
}
