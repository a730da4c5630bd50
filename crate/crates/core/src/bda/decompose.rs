use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{bda_value, g_value, m_r_of, BdaProblem};
use crate::bergman::{AnalyticPoly, SymbolField};
use crate::error::{LabError, Result};
use crate::geometry::{BergmanDisc, PartitionOfUnity};
use crate::quadrature::{neumaier_sum, DiscRule};
use crate::weights::RadialWeight;

/// `f = f₁ + f₂` with `f₁ = Σ_j h_j φ_j` and `h_j` the local best approximant on `D(a_j, r)`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub f: SymbolField,
    pub pou: Arc<PartitionOfUnity>,
    pub patches: Vec<AnalyticPoly>,
    pub q: f64,
    pub d: usize,
}

pub fn decompose(f: &SymbolField, pou: Arc<PartitionOfUnity>, q: f64, d: usize) -> Result<Decomposition> {
    let lat = &pou.lattice;
    let patches = lat
        .points
        .par_iter()
        .enumerate()
        .map(|(j, &a)| {
            let prob = BergmanDisc::new(a, lat.r).map(|disc| BdaProblem {
                f: f.clone(),
                disc,
                q,
                d,
                v: None,
            });
            prob.and_then(|p| bda_value(&p))
                .map(|v| v.minimizer)
                .map_err(|e| LabError::Patch {
                    patch: j,
                    reason: e.to_string(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Decomposition {
        f: f.clone(),
        pou,
        patches,
        q,
        d,
    })
}

impl Decomposition {
    pub fn r(&self) -> f64 {
        self.pou.lattice.r
    }

    /// `Σ_j h_j(z) φ_j(z)`; zero off the lattice.
    pub fn f1(&self, z: Complex64) -> Complex64 {
        let (terms, _) = self.pou.eval_with_total(z);
        terms.iter().map(|t| self.patches[t.index].eval(z) * t.phi).sum()
    }

    pub fn f2(&self, z: Complex64) -> Complex64 {
        self.f.eval(z) - self.f1(z)
    }

    /// `Σ_i (h_i − h_j) ∂̄φ_i` with `j` the dominant patch at `z`.
    pub fn dbar_f1(&self, z: Complex64) -> Complex64 {
        let (terms, _) = self.pou.eval_with_total(z);
        let Some(main) = terms.iter().max_by(|a, b| a.phi.total_cmp(&b.phi)) else {
            return Complex64::new(0.0, 0.0);
        };
        let hj = self.patches[main.index].eval(z);
        terms
            .iter()
            .map(|t| (self.patches[t.index].eval(z) - hj) * t.dbar)
            .sum()
    }

    /// Number of partition terms active at `z`.
    pub fn active_terms(&self, z: Complex64) -> usize {
        self.pou.eval_with_total(z).0.len()
    }

    /// Largest `|z|` whose disc `D(z, r)` stays inside the covered region.
    pub fn validation_radius(&self) -> f64 {
        let lat = &self.pou.lattice;
        (lat.r_max.atanh() - lat.r).tanh().max(0.0)
    }

    /// Both ratio bounds on `grid`, plus the reconstruction identity on `grid` and on
    /// `n_random` seeded points of `{|z| <= r_max}`.
    pub fn validate(&self, grid: &[Complex64], n_random: usize, seed: u64) -> Result<DecompositionValidation> {
        let (q, r) = (self.q, self.r());
        let points = grid
            .par_iter()
            .map(|&z| {
                let g2 = g_value(&self.f, z, 2.0 * r, q, self.d)?;
                let dbar = (1.0 - z.norm()) * self.dbar_f1(z).norm();
                let m = m_r_of(|w| Ok(self.f2(w)), z, r, q)?;
                let trivial = g2 < 1e-12;
                Ok(ValidationPoint {
                    z,
                    g_2r: g2,
                    dbar_term: dbar,
                    m_term: m,
                    dbar_ratio: if trivial { 0.0 } else { dbar / g2 },
                    m_ratio: if trivial { 0.0 } else { m / g2 },
                    active_terms: self.active_terms(z),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let r_max = self.pou.lattice.r_max;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random: Vec<Complex64> = (0..n_random)
            .map(|_| Complex64::from_polar(r_max * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>()))
            .collect();
        let reconstruction_error = grid
            .iter()
            .chain(&random)
            .map(|&z| {
                let f = self.f.eval(z);
                (self.f1(z) + self.f2(z) - f).norm() / f.norm().max(1.0)
            })
            .fold(0.0, f64::max);
        let multiplicity = self.pou.lattice.multiplicity;
        let max_dbar_ratio = points.iter().map(|p| p.dbar_ratio).fold(0.0, f64::max);
        let max_m_ratio = points.iter().map(|p| p.m_ratio).fold(0.0, f64::max);
        let bound = 10.0 * multiplicity as f64;
        Ok(DecompositionValidation {
            multiplicity,
            bound,
            max_dbar_ratio,
            max_m_ratio,
            max_abs_dbar: points.iter().map(|p| p.dbar_term).fold(0.0, f64::max),
            max_m: points.iter().map(|p| p.m_term).fold(0.0, f64::max),
            reconstruction_error,
            max_active_terms: points.iter().map(|p| p.active_terms).max().unwrap_or(0),
            passed: max_dbar_ratio.is_finite() && max_m_ratio.is_finite() && max_dbar_ratio <= bound && max_m_ratio <= bound,
            points,
        })
    }

    /// `‖(1 − |z|)|∂̄f₁|‖` and `‖M_r(|f₂|^q)^{1/q}‖` in `L^s_W` over `rule`.
    pub fn lw_norms(&self, ww: &RadialWeight, s: f64, rule: &DiscRule) -> Result<LwNorms> {
        let (q, r) = (self.q, self.r());
        let terms = rule
            .nodes
            .par_iter()
            .zip(rule.weights.par_iter())
            .map(|(&z, &wt)| {
                let w = wt * ww.eval(z.norm());
                let dbar = (1.0 - z.norm()) * self.dbar_f1(z).norm();
                let m = m_r_of(|x| Ok(self.f2(x)), z, r, q)?;
                Ok((w * dbar.powf(s), w * m.powf(s)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LwNorms {
            exponent: s,
            dbar_norm: neumaier_sum(terms.iter().map(|t| t.0)).powf(1.0 / s),
            m_norm: neumaier_sum(terms.iter().map(|t| t.1)).powf(1.0 / s),
        })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ValidationPoint {
    pub z: Complex64,
    pub g_2r: f64,
    /// `(1 − |z|)|∂̄f₁(z)|`
    pub dbar_term: f64,
    /// `M_r(|f₂|^q)^{1/q}(z)`
    pub m_term: f64,
    pub dbar_ratio: f64,
    pub m_ratio: f64,
    pub active_terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionValidation {
    pub multiplicity: usize,
    /// `10·N`
    pub bound: f64,
    pub max_dbar_ratio: f64,
    pub max_m_ratio: f64,
    pub max_abs_dbar: f64,
    pub max_m: f64,
    pub reconstruction_error: f64,
    pub max_active_terms: usize,
    pub passed: bool,
    pub points: Vec<ValidationPoint>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LwNorms {
    pub exponent: f64,
    pub dbar_norm: f64,
    pub m_norm: f64,
}
