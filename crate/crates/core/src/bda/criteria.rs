use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{bracket, g_value};
use crate::bergman::SymbolField;
use crate::carleson::{Trend, MAX_DUAL_EXPONENT};
use crate::error::{LabError, Result};
use crate::quadrature::{neumaier_sum, DiscRule};
use crate::weights::{weight_w, RadialWeight};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfilePoint {
    pub z: Complex64,
    pub g: f64,
    pub criterion: f64,
}

/// `z ↦ [η]^{1/q} [v]^{−1/p} G_{q,r}(f)(z)` on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionPq {
    pub profile: Vec<ProfilePoint>,
    pub sup: f64,
    pub argmax: Complex64,
    /// `(|z|, max over the circle)` for the grid circles with `|z| >= 0.5`.
    pub circle_maxima: Vec<(f64, f64)>,
    pub trend: Trend,
}

#[allow(clippy::too_many_arguments)]
pub fn criterion_pq(
    f: &SymbolField,
    v: &RadialWeight,
    eta: &RadialWeight,
    p: f64,
    q: f64,
    r: f64,
    d: usize,
    grid: &[Complex64],
) -> Result<CriterionPq> {
    if !(p > 1.0 && q >= p) {
        return Err(LabError::domain(format!("criterion_pq needs 1 < p <= q, got p = {p}, q = {q}")));
    }
    if grid.is_empty() {
        return Err(LabError::domain("empty evaluation grid"));
    }
    let profile = grid
        .par_iter()
        .map(|&z| {
            let g = g_value(f, z, r, q, d)?;
            let factor = bracket(eta, z)?.powf(1.0 / q) * bracket(v, z)?.powf(-1.0 / p);
            Ok(ProfilePoint {
                z,
                g,
                criterion: factor * g,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = profile
        .iter()
        .fold(&profile[0], |a, b| if b.criterion > a.criterion { b } else { a });
    let (sup, argmax) = (best.criterion, best.z);
    let mut circles: Vec<(f64, f64)> = Vec::new();
    let mut by_radius: Vec<(f64, f64)> = profile.iter().map(|pt| (pt.z.norm(), pt.criterion)).collect();
    by_radius.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (t, val) in by_radius {
        match circles.last_mut() {
            Some(last) if (last.0 - t).abs() < 1e-9 => last.1 = last.1.max(val),
            _ => circles.push((t, val)),
        }
    }
    if circles.iter().any(|c| c.0 >= 0.5 - 1e-12) {
        circles.retain(|c| c.0 >= 0.5 - 1e-12);
    }
    let values: Vec<f64> = circles.iter().map(|c| c.1).collect();
    Ok(CriterionPq {
        profile,
        sup,
        argmax,
        trend: Trend::of(&values),
        circle_maxima: circles,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QpNode {
    pub z: Complex64,
    pub quad_weight: f64,
    pub g: f64,
    pub w: f64,
}

/// `(∫_{|z|<=r_max} G_{q,r}(f)^s W dA)^{1/s}`, `s = pq/(p − q)`, `W = η^{p/(p−q)} v^{−q/(p−q)}`.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionQp {
    pub value: f64,
    pub exponent: f64,
    /// `p/(p − q)` exceeds the blow-up guard.
    pub degenerate: bool,
    pub nodes: Vec<QpNode>,
}

#[allow(clippy::too_many_arguments)]
pub fn criterion_qp(
    f: &SymbolField,
    v: &Arc<RadialWeight>,
    eta: &Arc<RadialWeight>,
    p: f64,
    q: f64,
    r: f64,
    d: usize,
    rule: &DiscRule,
) -> Result<CriterionQp> {
    if !(q > 1.0 && q < p) {
        return Err(LabError::domain(format!("criterion_qp needs 1 < q < p, got p = {p}, q = {q}")));
    }
    let ww = weight_w(v, eta, p, q)?;
    let s = p * q / (p - q);
    let nodes = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&z, &wt)| {
            Ok(QpNode {
                z,
                quad_weight: wt,
                g: g_value(f, z, r, q, d)?,
                w: ww.eval(z.norm()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let value = neumaier_sum(nodes.iter().map(|n| n.quad_weight * n.g.powf(s) * n.w)).powf(1.0 / s);
    Ok(CriterionQp {
        value,
        exponent: s,
        degenerate: p / (p - q) > MAX_DUAL_EXPONENT,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::AnalyticPoly;
    use crate::carleson::{polar_grid, profile_radii};

    fn radial_grid(r_max: f64) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)];
        g.extend(profile_radii(r_max).into_iter().map(|t| Complex64::new(t, 0.0)));
        g
    }

    #[test]
    fn one_weight_reduction_and_compact_signature() {
        let w0 = RadialWeight::power(0.0);
        let grid = radial_grid(0.99);
        let c = criterion_pq(&SymbolField::zbar(), &w0, &w0, 2.0, 2.0, 1.0, 4, &grid).unwrap();
        for pt in &c.profile {
            assert!((pt.criterion - pt.g).abs() <= 1e-12 * pt.g.max(1e-300));
            // G(z̄) is the Euclidean radius over √2, comparable to (1 − |z|) tanh r
            let t = pt.z.norm();
            let band = pt.g / ((1.0 - t) * 1f64.tanh());
            assert!(band > 0.3 && band < 4.0, "t={t}");
        }
        assert!(c.sup.is_finite());
        assert!(c.trend.vanishing);
    }

    #[test]
    fn log_symbol_is_not_vanishing() {
        let w0 = RadialWeight::power(0.0);
        let c = criterion_pq(&SymbolField::conj_log1mz(), &w0, &w0, 2.0, 2.0, 1.0, 10, &radial_grid(0.99)).unwrap();
        assert!(c.sup.is_finite());
        assert!(!c.trend.vanishing);
        let floor = c.circle_maxima.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        assert!(floor > 0.05, "{:?}", c.circle_maxima);
    }

    #[test]
    fn analytic_symbols_vanish() {
        let w0 = RadialWeight::power(0.0);
        let f = SymbolField::poly(AnalyticPoly::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]));
        let c = criterion_pq(&f, &w0, &w0, 2.0, 3.0, 1.0, 4, &polar_grid(0.9, 4, 4)).unwrap();
        assert!(c.sup < 1e-10);
        let q = criterion_qp(&f, &w0, &w0, 3.0, 2.0, 1.0, 4, &DiscRule::truncated(0.9, 8, 4)).unwrap();
        assert!(q.value < 1e-10);
    }

    #[test]
    fn qp_examples() {
        let w0 = RadialWeight::power(0.0);
        let rule = DiscRule::truncated(0.95, 24, 1);
        let base = criterion_qp(&SymbolField::zbar(), &w0, &w0, 3.0, 2.0, 1.0, 2, &rule).unwrap();
        assert_eq!(base.exponent, 6.0);
        assert!(base.value.is_finite() && base.value > 0.0);
        let scaled = criterion_qp(
            &SymbolField::zbar().scaled(Complex64::new(-2.0, 0.0)),
            &w0,
            &w0,
            3.0,
            2.0,
            1.0,
            2,
            &rule,
        )
        .unwrap();
        assert!((scaled.value - 2.0 * base.value).abs() < 1e-10 * base.value);
        // the integrand behaves like (1 − |z|)^6
        for n in &base.nodes {
            let band = n.g.powi(6) / (1.0 - n.z.norm()).powi(6);
            assert!(band > 1e-2 && band < 1e3, "{band}");
        }
        let w1 = RadialWeight::power(1.0);
        let mixed = criterion_qp(&SymbolField::zbar(), &w1, &w0, 3.0, 2.0, 1.0, 2, &rule).unwrap();
        assert!(mixed.value.is_finite());
        for n in &mixed.nodes {
            let t = n.z.norm();
            assert!((n.w - (2.0 * (1.0 - t * t)).powi(-2)).abs() < 1e-9 * n.w);
        }
    }
}
