use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{kernel_norm_quadrature, lp_norm, AnalyticPoly, KernelSeries};
use crate::error::{LabError, Result};
use crate::quadrature::DiscRule;
use crate::weights::RadialWeight;

/// A member of a lower-bound test family, normalized in `A^p_v`.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// `B_a/‖B_a‖`
    Atom { point: Complex64, norm: f64 },
    Poly { poly: AnalyticPoly, norm: f64 },
}

/// Kernel atoms at given points plus seeded random polynomials, each of unit `A^p_v` norm.
#[derive(Debug, Clone)]
pub struct TestFamily {
    kernel: Arc<KernelSeries>,
    pub members: Vec<TestFunction>,
    pub p: f64,
}

impl TestFamily {
    /// Polynomials have degree `degree` with standard complex Gaussian coefficients.
    pub fn new(
        kernel: Arc<KernelSeries>,
        v: &RadialWeight,
        p: f64,
        atoms: &[Complex64],
        n_poly: usize,
        degree: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(LabError::domain(format!("test family needs p >= 1, got {p}")));
        }
        let base = DiscRule::unit_default();
        let mut members = Vec::with_capacity(atoms.len() + n_poly);
        for &a in atoms {
            let norm = kernel_norm_quadrature(&kernel, v, p, a, &base)?;
            members.push(TestFunction::Atom { point: a, norm });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for _ in 0..n_poly {
            let coeffs: Vec<Complex64> = (0..=degree)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re * half, im * half)
                })
                .collect();
            let poly = AnalyticPoly::new(coeffs);
            let norm = lp_norm(|z| Ok(poly.eval(z)), &base, p, v)?;
            members.push(TestFunction::Poly { poly, norm });
        }
        Ok(TestFamily { kernel, members, p })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn kernel(&self) -> &Arc<KernelSeries> {
        &self.kernel
    }

    /// Value of the normalized member `i` at `z`.
    pub fn eval(&self, i: usize, z: Complex64) -> Result<Complex64> {
        match &self.members[i] {
            TestFunction::Atom { point, norm } => Ok(self.kernel.eval_fast(z, *point)? / *norm),
            TestFunction::Poly { poly, norm } => Ok(poly.eval(z) / *norm),
        }
    }

    /// Where the member concentrates; quadrature rules are pulled back to this point.
    pub fn focus(&self, i: usize) -> Complex64 {
        match &self.members[i] {
            TestFunction::Atom { point, .. } => *point,
            TestFunction::Poly { .. } => Complex64::new(0.0, 0.0),
        }
    }
}
