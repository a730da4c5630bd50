//! Local distance to analytic functions `G_{q,r}(f)`, averages `M_r`, the Hankel
//! criteria in both exponent regimes and the decomposition `f = f₁ + f₂`.

mod criteria;
mod decompose;
mod lsq;

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::bergman::{AnalyticPoly, SymbolField};
use crate::error::{LabError, Result};
use crate::geometry::{beta_metric, BergmanDisc};
use crate::quadrature::{neumaier_sum, DiscRule};
use crate::weights::RadialWeight;

pub use criteria::{criterion_pq, criterion_qp, CriterionPq, CriterionQp, ProfilePoint};
pub use decompose::{decompose, Decomposition, DecompositionValidation, LwNorms, ValidationPoint};

/// Default degree of the local polynomial approximants.
pub const DEFAULT_DEGREE: usize = 10;
/// Radial × angular nodes of the per-disc rule.
pub const BDA_NODES: (usize, usize) = (32, 64);
pub const IRLS_DAMPING: f64 = 0.7;
pub const IRLS_FLOOR: f64 = 1e-10;
pub const IRLS_TOL: f64 = 1e-9;
pub const IRLS_MAX_ITER: usize = 200;

/// `inf_h ((1/|D|) ∫_D |f − h|^q dA)^{1/q}` over polynomials `h` of degree `≤ d`,
/// or the `v`-weighted version normalized by `v(D)`.
#[derive(Debug, Clone)]
pub struct BdaProblem {
    pub f: SymbolField,
    pub disc: BergmanDisc,
    pub q: f64,
    pub d: usize,
    pub v: Option<Arc<RadialWeight>>,
}

#[derive(Debug, Clone)]
pub struct BdaValue {
    pub value: f64,
    /// Minimizer as a polynomial in `w − center` (see [`AnalyticPoly::centered`]).
    pub minimizer: AnalyticPoly,
    pub iterations: usize,
}

impl BdaProblem {
    pub fn new(f: SymbolField, z: Complex64, r: f64, q: f64) -> Result<Self> {
        Ok(BdaProblem {
            f,
            disc: BergmanDisc::new(z, r)?,
            q,
            d: DEFAULT_DEGREE,
            v: None,
        })
    }

    pub fn with_degree(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_weight(mut self, v: Arc<RadialWeight>) -> Self {
        self.v = Some(v);
        self
    }

    fn rule(&self) -> DiscRule {
        let scale = if self.disc.center.norm() > 0.9 { 2 } else { 1 };
        DiscRule::polar(
            self.disc.euclid_center,
            self.disc.euclid_radius,
            BDA_NODES.0 * scale,
            BDA_NODES.1 * scale,
        )
    }
}

/// Sampled problem: nodes, measure weights (already divided by the disc mass), values.
struct Sampled {
    center: Complex64,
    radius: f64,
    t: Vec<Complex64>,
    w: Vec<f64>,
    f: Vec<Complex64>,
}

impl Sampled {
    fn new(prob: &BdaProblem) -> Result<Self> {
        if !(prob.q > 1.0) {
            return Err(LabError::domain(format!("bda needs q > 1, got {}", prob.q)));
        }
        let rule = prob.rule();
        let (c, rad) = (prob.disc.euclid_center, prob.disc.euclid_radius);
        let mut w: Vec<f64> = match &prob.v {
            Some(v) => rule.nodes.iter().zip(&rule.weights).map(|(z, &wt)| wt * v.eval(z.norm())).collect(),
            None => rule.weights.clone(),
        };
        let mass = match prob.v {
            Some(_) => neumaier_sum(w.iter().copied()),
            None => rad * rad,
        };
        if !(mass > 0.0) {
            return Err(LabError::domain(format!("weight has no mass on the disc at {}", prob.disc.center)));
        }
        w.iter_mut().for_each(|x| *x /= mass);
        let mut f = Vec::with_capacity(rule.len());
        for &z in &rule.nodes {
            let v = prob.f.eval(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(LabError::Evaluation {
                    node: z,
                    what: format!("symbol value {v}"),
                });
            }
            f.push(v);
        }
        let t = rule.nodes.iter().map(|&z| (z - c) / rad).collect();
        Ok(Sampled { center: c, radius: rad, t, w, f })
    }

    fn residuals(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.t
            .iter()
            .zip(&self.f)
            .map(|(&t, &f)| f - coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c))
            .collect()
    }

    fn lq(&self, res: &[Complex64], q: f64) -> f64 {
        neumaier_sum(res.iter().zip(&self.w).map(|(r, w)| w * r.norm().powf(q))).powf(1.0 / q)
    }

    fn poly(&self, coeffs: Vec<Complex64>) -> AnalyticPoly {
        AnalyticPoly::centered(self.center, self.radius, coeffs)
    }
}

/// `G_{q,r}(f)` on the problem's disc with its minimizer.
///
/// `q = 2` is a single least-squares solve; otherwise IRLS with damping
/// [`IRLS_DAMPING`] runs until successive values differ by at most [`IRLS_TOL`].
pub fn bda_value(prob: &BdaProblem) -> Result<BdaValue> {
    let s = Sampled::new(prob)?;
    let q = prob.q;
    let mut coeffs = lsq::weighted_poly_fit(&s.t, &s.f, &s.w, prob.d)?;
    let mut res = s.residuals(&coeffs);
    let mut value = s.lq(&res, q);
    let scale = s.lq(&s.f, q).max(f64::MIN_POSITIVE);
    if q == 2.0 || value <= 1e-14 * scale {
        return Ok(BdaValue {
            value,
            minimizer: s.poly(coeffs),
            iterations: 0,
        });
    }
    let mut best = (value, coeffs.clone());
    for it in 1..=IRLS_MAX_ITER {
        let u: Vec<f64> = res
            .iter()
            .zip(&s.w)
            .map(|(r, w)| w * r.norm().max(IRLS_FLOOR).powf(q - 2.0))
            .collect();
        let target = lsq::weighted_poly_fit(&s.t, &s.f, &u, prob.d)?;
        for (c, t) in coeffs.iter_mut().zip(&target) {
            *c += IRLS_DAMPING * (t - *c);
        }
        res = s.residuals(&coeffs);
        let next = s.lq(&res, q);
        if next < best.0 {
            best = (next, coeffs.clone());
        }
        if (next - value).abs() <= IRLS_TOL * value.max(1.0) {
            return Ok(BdaValue {
                value: best.0,
                minimizer: s.poly(best.1),
                iterations: it,
            });
        }
        value = next;
    }
    Err(LabError::Convergence {
        what: format!("IRLS for q = {q} on the disc at {}", prob.disc.center),
        best: best.0,
        iterations: IRLS_MAX_ITER,
    })
}

/// `G_{q,r}(f)(z)` with the default degree.
pub fn g_value(f: &SymbolField, z: Complex64, r: f64, q: f64, d: usize) -> Result<f64> {
    Ok(bda_value(&BdaProblem::new(f.clone(), z, r, q)?.with_degree(d))?.value)
}

/// The `v`-weighted local distance.
pub fn bda_weighted(prob: &BdaProblem) -> Result<f64> {
    if prob.v.is_none() {
        return Err(LabError::domain("bda_weighted needs a weight"));
    }
    Ok(bda_value(prob)?.value)
}

/// `((1/|D(z,r)|) ∫_{D(z,r)} |f|^q dA)^{1/q}`.
pub fn m_r(f: &SymbolField, z: Complex64, r: f64, q: f64) -> Result<f64> {
    m_r_of(|w| Ok(f.eval(w)), z, r, q)
}

/// [`m_r`] for an arbitrary fallible field.
pub fn m_r_of<F: Fn(Complex64) -> Result<Complex64>>(f: F, z: Complex64, r: f64, q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(LabError::domain(format!("M_r needs q > 0, got {q}")));
    }
    let disc = BergmanDisc::new(z, r)?;
    let rule = DiscRule::polar(disc.euclid_center, disc.euclid_radius, BDA_NODES.0, BDA_NODES.1);
    let mut terms = Vec::with_capacity(rule.len());
    for (&w, &wt) in rule.nodes.iter().zip(&rule.weights) {
        terms.push(wt * f(w)?.norm().powf(q));
    }
    Ok((neumaier_sum(terms) / disc.area()).powf(1.0 / q))
}

/// `[w](z) = ŵ(|z|)(1 − |z|)`.
pub fn bracket(w: &RadialWeight, z: Complex64) -> Result<f64> {
    let t = z.norm();
    Ok(w.tail(t)? * (1.0 - t))
}

/// `G_{q,r}(f)(w) / G_{q,r/2}(f)(z)` for `β(z, w) < r/2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GStability {
    pub numerator: f64,
    pub denominator: f64,
    /// `None` when both values are below `1e−12`.
    pub ratio: Option<f64>,
    pub trivial: bool,
}

pub fn g_stability(f: &SymbolField, z: Complex64, w: Complex64, q: f64, r: f64, d: usize) -> Result<GStability> {
    if !(beta_metric(z, w) < r / 2.0) {
        return Err(LabError::domain(format!("g_stability needs β(z, w) < r/2 = {}", r / 2.0)));
    }
    let numerator = g_value(f, w, r, q, d)?;
    let denominator = g_value(f, z, r / 2.0, q, d)?;
    let trivial = numerator < 1e-12 && denominator < 1e-12;
    Ok(GStability {
        numerator,
        denominator,
        ratio: (!trivial).then(|| numerator / denominator),
        trivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zbar_at_origin() {
        for r in [0.5f64, 1.0, 2.0] {
            let v = bda_value(&BdaProblem::new(SymbolField::zbar(), c(0.0, 0.0), r, 2.0).unwrap()).unwrap();
            assert!((v.value - r.tanh() / 2f64.sqrt()).abs() < 1e-12);
            assert!(v.minimizer.eval(c(0.1, 0.2)).norm() < 1e-12);
        }
    }

    #[test]
    fn zbar_translated() {
        for z in [c(0.5, 0.2), c(-0.3, -0.8)] {
            let prob = BdaProblem::new(SymbolField::zbar(), z, 1.0, 2.0).unwrap();
            let v = bda_value(&prob).unwrap();
            assert!((v.value - prob.disc.euclid_radius / 2f64.sqrt()).abs() < 1e-12);
            let center = prob.disc.euclid_center;
            assert!((v.minimizer.eval(center + 0.1) - center.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn polynomials_have_zero_distance() {
        let p = AnalyticPoly::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.5), c(0.3, 0.0)]);
        let f = SymbolField::poly(p.clone());
        for q in [2.0, 1.5, 3.0] {
            let v = bda_value(&BdaProblem::new(f.clone(), c(0.4, 0.1), 1.0, q).unwrap()).unwrap();
            assert!(v.value < 1e-12, "q={q} {}", v.value);
            assert!((v.minimizer.eval(c(0.45, 0.1)) - p.eval(c(0.45, 0.1))).norm() < 1e-10);
        }
    }

    #[test]
    fn irls_closed_form_for_zbar() {
        // symmetry forces h = 0 at the origin: value = R (2/(q+2))^{1/q}
        for q in [1.5, 3.0] {
            let v = bda_value(&BdaProblem::new(SymbolField::zbar(), c(0.0, 0.0), 1.0, q).unwrap()).unwrap();
            let expect = 1f64.tanh() * (2.0 / (q + 2.0)).powf(1.0 / q);
            assert!((v.value - expect).abs() < 1e-8, "q={q}: {} vs {expect}", v.value);
        }
    }

    #[test]
    fn continuity_in_q() {
        let at = |q| g_value(&SymbolField::re_z(), c(0.3, 0.2), 1.0, q, DEFAULT_DEGREE).unwrap();
        let base = at(2.0);
        for q in [1.99, 2.01] {
            assert!((at(q) - base).abs() <= 1e-3, "q={q}");
        }
    }

    #[test]
    fn degree_refinement_stabilizes() {
        let f = SymbolField::conj_log1mz();
        let z = c(0.6, 0.1);
        let vals: Vec<f64> = [4, 8, 12]
            .iter()
            .map(|&d| g_value(&f, z, 1.0, 2.0, d).unwrap())
            .collect();
        assert!(vals[1] <= vals[0] + 1e-12 && vals[2] <= vals[1] + 1e-12);
        assert!((vals[1] - vals[2]).abs() <= 0.01 * vals[1], "{vals:?}");
    }

    #[test]
    fn weighted_variant() {
        let z = c(0.2, 0.3);
        let plain = BdaProblem::new(SymbolField::zbar(), z, 1.0, 2.0).unwrap();
        let base = bda_value(&plain).unwrap().value;
        let flat = bda_weighted(&plain.clone().with_weight(RadialWeight::power(0.0))).unwrap();
        assert!((flat - base).abs() < 1e-12);
        let w1 = RadialWeight::power(1.0);
        let mut ratios = Vec::new();
        for t in [0.0, 0.3, 0.6, 0.8, 0.9] {
            let prob = BdaProblem::new(SymbolField::zbar(), c(t, 0.0), 1.0, 2.0).unwrap();
            let u = bda_value(&prob).unwrap().value;
            let w = bda_weighted(&prob.with_weight(Arc::clone(&w1))).unwrap();
            ratios.push(w / u);
        }
        assert!(ratios.iter().all(|&x| x > 0.5 && x < 2.0), "{ratios:?}");
        let scaled = BdaProblem::new(SymbolField::zbar().scaled(c(0.0, 3.0)), z, 1.0, 2.0).unwrap();
        assert!((bda_value(&scaled).unwrap().value - 3.0 * base).abs() < 1e-12);
    }

    #[test]
    fn average_examples() {
        let one = SymbolField::poly(AnalyticPoly::new(vec![c(0.0, -2.0)]));
        assert!((m_r(&one, c(0.4, 0.4), 1.0, 3.0).unwrap() - 2.0).abs() < 1e-12);
        for r in [0.5f64, 1.0] {
            let m = m_r(&SymbolField::zbar(), c(0.0, 0.0), r, 2.0).unwrap();
            assert!((m - r.tanh() / 2f64.sqrt()).abs() < 1e-12);
        }
        let f = SymbolField::conj_log1mz();
        for z in [c(0.0, 0.0), c(0.7, 0.0), c(-0.5, 0.5)] {
            assert!(m_r(&f, z, 1.0, 2.0).unwrap() >= g_value(&f, z, 1.0, 2.0, 6).unwrap());
        }
    }

    #[test]
    fn stability_examples() {
        let f = SymbolField::zbar();
        let s = g_stability(&f, c(0.0, 0.0), c(0.0, 0.0), 2.0, 1.0, 4).unwrap();
        assert!((s.ratio.unwrap() - 1f64.tanh() / 0.5f64.tanh()).abs() < 1e-10);
        let g = SymbolField::poly(AnalyticPoly::monomial(2));
        assert!(g_stability(&g, c(0.3, 0.0), c(0.35, 0.0), 2.0, 1.0, 4).unwrap().trivial);
        assert!(g_stability(&f, c(0.0, 0.0), c(0.9, 0.0), 2.0, 1.0, 4).is_err());

        // closed form for z̄: ratio = R(w, r)/R(z, r/2)
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let z = Complex64::from_polar(rng.random::<f64>() * 0.9, rng.random::<f64>() * 6.3);
            let off = Complex64::from_polar(rng.random::<f64>() * 0.49f64.tanh(), rng.random::<f64>() * 6.3);
            let w = crate::geometry::mobius(z, off);
            let s = g_stability(&f, z, w, 2.0, 1.0, 2).unwrap();
            let rw = BergmanDisc::new(w, 1.0).unwrap().euclid_radius;
            let rz = BergmanDisc::new(z, 0.5).unwrap().euclid_radius;
            assert!((s.ratio.unwrap() - rw / rz).abs() < 1e-9);
            // analytic band for r = 1, wider than [1, 4] near the boundary
            assert!(s.ratio.unwrap() > 1.0 && s.ratio.unwrap() < 8.5);
        }
    }
}
