use num_complex::Complex64;
use serde::Serialize;

/// `Σ c_k ((z − center)/scale)^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticPoly {
    pub center: Complex64,
    pub scale: f64,
    pub coeffs: Vec<Complex64>,
}

impl AnalyticPoly {
    /// Polynomial in `z` itself.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        AnalyticPoly {
            center: Complex64::new(0.0, 0.0),
            scale: 1.0,
            coeffs,
        }
    }

    pub fn centered(center: Complex64, scale: f64, coeffs: Vec<Complex64>) -> Self {
        AnalyticPoly {
            center,
            scale,
            coeffs,
        }
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn monomial(n: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
        c[n] = Complex64::new(1.0, 0.0);
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let t = (z - self.center) / self.scale;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let t = (z - self.center) / self.scale;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * t + c * k as f64;
        }
        acc / self.scale
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        AnalyticPoly {
            center: self.center,
            scale: self.scale,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    /// Coefficients in powers of `z` (only meaningful for modest degrees).
    pub fn to_monomial(&self) -> Vec<Complex64> {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        // expand c_k ((z − c)/s)^k by the binomial theorem
        for (k, &ck) in self.coeffs.iter().enumerate() {
            let base = ck / self.scale.powi(k as i32);
            let mut binom = 1.0;
            for j in 0..=k {
                out[j] += base * binom * (-self.center).powu((k - j) as u32);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_expand() {
        let p = AnalyticPoly::centered(
            Complex64::new(0.2, -0.1),
            0.5,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.5)],
        );
        let m = AnalyticPoly::new(p.to_monomial());
        for z in [Complex64::new(0.3, 0.3), Complex64::new(-0.7, 0.1)] {
            assert!((p.eval(z) - m.eval(z)).norm() < 1e-13);
            assert!((p.derivative(z) - m.derivative(z)).norm() < 1e-12);
        }
    }
}
