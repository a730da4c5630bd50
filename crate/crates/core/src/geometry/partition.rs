use std::sync::Arc;

use num_complex::Complex64;

use super::{beta_metric, mobius, mobius_derivative, Lattice};
use crate::error::{LabError, Result};

/// Fade profile of the bump `χ(t)` on `[½, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BumpProfile {
    /// `3x² − 2x³`; C¹.
    Cubic,
    /// `6x⁵ − 15x⁴ + 10x³`; C².
    Quintic,
}

impl BumpProfile {
    /// Profile from a smoothness order (1 → C¹, otherwise C²).
    pub fn from_smoothness(order: f64) -> Self {
        if order <= 1.0 {
            BumpProfile::Cubic
        } else {
            BumpProfile::Quintic
        }
    }

    fn step(self, x: f64) -> (f64, f64) {
        match self {
            BumpProfile::Cubic => (x * x * (3.0 - 2.0 * x), 6.0 * x * (1.0 - x)),
            BumpProfile::Quintic => (
                x * x * x * (x * (6.0 * x - 15.0) + 10.0),
                30.0 * x * x * (x - 1.0) * (x - 1.0),
            ),
        }
    }

    /// `χ(t)` and `χ′(t)` with `t = β/r`.
    fn chi(self, t: f64) -> (f64, f64) {
        if t <= 0.5 {
            (1.0, 0.0)
        } else if t >= 1.0 {
            (0.0, 0.0)
        } else {
            let (s, ds) = self.step(2.0 * t - 1.0);
            (1.0 - s, -2.0 * ds)
        }
    }
}

/// One nonzero term of the partition at a point.
#[derive(Debug, Clone, Copy)]
pub struct PouTerm {
    pub index: usize,
    pub phi: f64,
    /// `∂̄φ_j` with `∂̄ = ½(∂_x + i∂_y)`.
    pub dbar: Complex64,
}

/// `φ_j = χ_j / Σ_k χ_k` with `χ_j` a radial bump in `β(·, a_j)`.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    pub lattice: Arc<Lattice>,
    pub profile: BumpProfile,
    /// `sup (1 − |a_j|)|∂̄φ_j|` measured on the default evaluation grid.
    pub c_pou: f64,
}

impl PartitionOfUnity {
    pub fn new(lattice: Arc<Lattice>, smoothness: f64) -> Result<Self> {
        let mut pou = PartitionOfUnity {
            lattice,
            profile: BumpProfile::from_smoothness(smoothness),
            c_pou: f64::NAN,
        };
        pou.c_pou = pou.c_pou_estimate(12)?;
        Ok(pou)
    }

    fn bump(&self, j: usize, z: Complex64) -> (f64, Complex64) {
        let a = self.lattice.points[j];
        let r = self.lattice.r;
        let b = beta_metric(a, z);
        let (chi, dchi) = self.profile.chi(b / r);
        if dchi == 0.0 {
            return (chi, Complex64::new(0.0, 0.0));
        }
        let phi = mobius(a, z);
        let rho = phi.norm();
        let dphi = mobius_derivative(a, z);
        let dbar_beta = phi * dphi.conj() / (2.0 * rho * (1.0 - rho * rho));
        (chi, dbar_beta * (dchi / r))
    }

    /// All nonzero `φ_j(z)` with their `∂̄φ_j(z)`.
    pub fn eval(&self, z: Complex64) -> Result<Vec<PouTerm>> {
        let (terms, total) = self.eval_with_total(z);
        if !(total > 0.0) {
            return Err(LabError::LatticeInvalid(format!("point {z} is not covered")));
        }
        Ok(terms)
    }

    /// Like [`eval`](Self::eval), also returning the unnormalized sum `Σ_k χ_k(z)`;
    /// uncovered points give no terms and a zero sum.
    pub fn eval_with_total(&self, z: Complex64) -> (Vec<PouTerm>, f64) {
        let idx = self.lattice.neighbors(z, self.lattice.r);
        let bumps: Vec<(usize, f64, Complex64)> = idx
            .into_iter()
            .map(|j| {
                let (c, d) = self.bump(j, z);
                (j, c, d)
            })
            .filter(|t| t.1 > 0.0)
            .collect();
        let total: f64 = bumps.iter().map(|t| t.1).sum();
        if !(total > 0.0) {
            return (Vec::new(), 0.0);
        }
        let dtotal: Complex64 = bumps.iter().map(|t| t.2).sum();
        let terms = bumps
            .into_iter()
            .map(|(j, c, d)| PouTerm {
                index: j,
                phi: c / total,
                dbar: (d * total - dtotal * c) / (total * total),
            })
            .collect();
        (terms, total)
    }

    /// `φ_j(z)` for a single index.
    pub fn phi(&self, j: usize, z: Complex64) -> Result<f64> {
        Ok(self
            .eval(z)?
            .iter()
            .find(|t| t.index == j)
            .map_or(0.0, |t| t.phi))
    }

    /// Sup of `(1 − |a_j|)|∂̄φ_j|` over a polar grid of `resolution × 4·resolution`
    /// points in each of up to 48 lattice discs inside `{|z| <= r_max}`.
    pub fn c_pou_estimate(&self, resolution: usize) -> Result<f64> {
        let lat = &self.lattice;
        let inner: Vec<usize> = (0..lat.len())
            .filter(|&j| lat.points[j].norm() <= lat.r_max)
            .collect();
        let stride = (inner.len() / 48).max(1);
        let s = lat.r.tanh();
        let n_t = 4 * resolution;
        let mut sup = 0.0f64;
        for &j in inner.iter().step_by(stride) {
            let a = lat.points[j];
            for i in 1..=resolution {
                let rho = s * (i as f64 - 0.5) / resolution as f64;
                for k in 0..n_t {
                    let u = Complex64::from_polar(rho, std::f64::consts::TAU * k as f64 / n_t as f64);
                    let z = mobius(a, u);
                    if z.norm() > lat.r_max {
                        continue;
                    }
                    for t in self.eval(z)? {
                        let v = (1.0 - lat.points[t.index].norm()) * t.dbar.norm();
                        sup = sup.max(v);
                    }
                }
            }
        }
        Ok(sup)
    }
}
