use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{gauss_legendre, neumaier_sum, neumaier_sum_complex};
use crate::error::{LabError, Result};
use crate::geometry::{mobius, mobius_derivative, BergmanDisc};
use crate::weights::RadialWeight;

/// Default radial × angular node counts for a disc rule.
pub const DEFAULT_NODES: (usize, usize) = (48, 96);

/// Tensor quadrature rule on a Euclidean disc for the normalized measure `dA`.
#[derive(Debug, Clone)]
pub struct DiscRule {
    pub center: Complex64,
    pub radius: f64,
    pub n_radial: usize,
    pub n_angular: usize,
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    /// Total degree in `(w, w̄)` integrated exactly; 0 when no claim is made.
    pub exact_degree: usize,
}

impl DiscRule {
    /// Gauss–Legendre in the radius times the trapezoid rule in the angle.
    pub fn polar(center: Complex64, radius: f64, n_radial: usize, n_angular: usize) -> Self {
        let gl = gauss_legendre(n_radial);
        let mut nodes = Vec::with_capacity(n_radial * n_angular);
        let mut weights = Vec::with_capacity(n_radial * n_angular);
        for (x, w) in gl.0.iter().zip(&gl.1) {
            let rho = 0.5 * radius * (x + 1.0);
            // (R/2)·w · ρ · (2π/n)/π
            let wr = radius * w * rho / n_angular as f64;
            for k in 0..n_angular {
                let theta = TAU * k as f64 / n_angular as f64;
                nodes.push(center + Complex64::from_polar(rho, theta));
                weights.push(wr);
            }
        }
        DiscRule {
            center,
            radius,
            n_radial,
            n_angular,
            nodes,
            weights,
            exact_degree: (2 * n_radial).saturating_sub(2).min(n_angular.saturating_sub(1)),
        }
    }

    /// Default rule for a hyperbolic disc; node counts doubled when `|z| > 0.9`.
    pub fn for_disc(disc: &BergmanDisc) -> Self {
        let (nr, nt) = DEFAULT_NODES;
        let scale = if disc.center.norm() > 0.9 { 2 } else { 1 };
        DiscRule::polar(disc.euclid_center, disc.euclid_radius, nr * scale, nt * scale)
    }

    /// Rule on the whole unit disc graded toward the boundary.
    ///
    /// Radial panels `[1 − 2^{1−k}, 1 − 2^{−k}]` for `k = 1..levels`, plus a final
    /// panel reaching `1`; each panel carries `n_radial` Gauss nodes and
    /// `clamp(32·2^k, 64, max_angular)` angles.
    pub fn unit_graded(levels: usize, n_radial: usize, max_angular: usize) -> Self {
        let gl = gauss_legendre(n_radial);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut edges: Vec<f64> = vec![0.0];
        edges.extend((1..=levels).map(|k| 1.0 - 0.5f64.powi(k as i32)));
        edges.push(1.0);
        let mut n_ang_max = 0;
        for (k, pair) in edges.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let n_ang = (32usize << k.min(20)).clamp(64, max_angular.max(64));
            n_ang_max = n_ang_max.max(n_ang);
            for (x, w) in gl.0.iter().zip(&gl.1) {
                let rho = a + 0.5 * (b - a) * (x + 1.0);
                let wr = (b - a) * w * rho / n_ang as f64;
                for j in 0..n_ang {
                    let theta = TAU * (j as f64 + 0.5 * (k % 2) as f64) / n_ang as f64;
                    nodes.push(Complex64::from_polar(rho, theta));
                    weights.push(wr);
                }
            }
        }
        DiscRule {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
            n_radial: n_radial * (levels + 1),
            n_angular: n_ang_max,
            nodes,
            weights,
            exact_degree: (2 * n_radial).saturating_sub(2).min(63),
        }
    }

    /// Pull back `base` (a rule on the unit disc) through `φ_z`: nodes `φ_z(u)`,
    /// weights `w·|φ_z′(u)|²`. Concentrates nodes near `z`.
    pub fn mobius_pullback(z: Complex64, base: &DiscRule) -> Self {
        let nodes = base.nodes.iter().map(|&u| mobius(z, u)).collect();
        let weights = base
            .nodes
            .iter()
            .zip(&base.weights)
            .map(|(&u, &w)| w * mobius_derivative(z, u).norm_sqr())
            .collect();
        DiscRule {
            center: Complex64::new(0.0, 0.0),
            radius: 1.0,
            n_radial: base.n_radial,
            n_angular: base.n_angular,
            nodes,
            weights,
            exact_degree: 0,
        }
    }

    /// Default rule on the unit disc for kernel norms and projections.
    pub fn unit_default() -> Self {
        DiscRule::unit_graded(8, 12, 512)
    }

    /// Rule on `{|z| <= r_max}`; use `n_angular = 1` for radial integrands.
    pub fn truncated(r_max: f64, n_radial: usize, n_angular: usize) -> Self {
        DiscRule::polar(Complex64::new(0.0, 0.0), r_max, n_radial, n_angular)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.weights.iter().copied())
    }
}

/// `Σ w_i F(z_i)` with compensated summation.
pub fn disc_integral<F: Fn(Complex64) -> Complex64>(f: F, rule: &DiscRule) -> Result<Complex64> {
    let mut vals = Vec::with_capacity(rule.len());
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(z);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(LabError::Evaluation {
                node: z,
                what: format!("integrand is {v}"),
            });
        }
        vals.push(v * w);
    }
    Ok(neumaier_sum_complex(vals))
}

/// Parallel variant of [`disc_integral`]; values are collected in node order and then
/// summed serially, so the result does not depend on the thread count.
pub fn disc_integral_par<F>(f: F, rule: &DiscRule) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let vals: Vec<Complex64> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&z, &w)| f(z) * w)
        .collect();
    for (v, &z) in vals.iter().zip(&rule.nodes) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(LabError::Evaluation {
                node: z,
                what: format!("integrand is {v}"),
            });
        }
    }
    Ok(neumaier_sum_complex(vals))
}

/// Real-valued convenience wrapper.
pub fn disc_integral_real<F: Fn(Complex64) -> f64>(f: F, rule: &DiscRule) -> Result<f64> {
    let mut vals = Vec::with_capacity(rule.len());
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(z);
        if !v.is_finite() {
            return Err(LabError::Evaluation {
                node: z,
                what: format!("integrand is {v}"),
            });
        }
        vals.push(v * w);
    }
    Ok(neumaier_sum(vals))
}

/// `((1/m(D)) ∫_D |F|^q dm)^{1/q}` with `dm = dA` or `v dA`, on the default rule for `D`.
pub fn lq_mean<F: Fn(Complex64) -> Complex64>(
    f: F,
    disc: &BergmanDisc,
    q: f64,
    weight: Option<&RadialWeight>,
) -> Result<f64> {
    lq_mean_with_rule(f, &DiscRule::for_disc(disc), q, weight)
}

pub fn lq_mean_with_rule<F: Fn(Complex64) -> Complex64>(
    f: F,
    rule: &DiscRule,
    q: f64,
    weight: Option<&RadialWeight>,
) -> Result<f64> {
    if !(q > 0.0) {
        return Err(LabError::domain(format!("lq_mean needs q > 0, got {q}")));
    }
    let dm = |z: Complex64| weight.map_or(1.0, |w| w.eval(z.norm()));
    let mass = disc_integral_real(dm, rule)?;
    if !(mass > 0.0) {
        return Err(LabError::domain("disc has zero mass"));
    }
    let total = disc_integral_real(|z| f(z).norm().powf(q) * dm(z), rule)?;
    Ok((total / mass).powf(1.0 / q))
}
