use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use super::{AnalyticPoly, KernelSeries, SymbolField};
use crate::error::{LabError, Result};
use crate::geometry::{euclid_realization, BergmanDisc, PartitionOfUnity};
use crate::quadrature::{gauss_legendre, DiscRule};

/// Multipole order of the far-field expansion; the ratio `R/|z − c|` is at most ½.
const FAR_TERMS: usize = 48;
/// Patch rule used for moments and the fast near field.
const PATCH_NODES: (usize, usize) = (24, 48);
/// z-centered near-field rule: Gauss nodes per radial panel × angles.
const NEAR_RULE: (usize, usize) = (10, 128);

/// Radial cutoff `τ`: 1 up to hyperbolic radius `atanh(r_max) − r/2`, 0 from `r_max` on,
/// quintic in between. The lattice covers `{|z| <= r_max}`, so `Σ_j φ_j τ` is C² on the disc.
#[derive(Debug, Clone, Copy)]
struct Cutoff {
    inner: f64,
    outer: f64,
}

impl Cutoff {
    fn new(r: f64, r_max: f64) -> Self {
        let t_out = r_max.atanh();
        Cutoff {
            inner: (t_out - 0.5 * r).max(0.0).tanh(),
            outer: r_max,
        }
    }

    fn eval(&self, m: f64) -> f64 {
        if m <= self.inner {
            return 1.0;
        }
        if m >= self.outer {
            return 0.0;
        }
        let (t0, t1) = (self.inner.atanh(), self.outer.atanh());
        let x = (m.atanh() - t0) / (t1 - t0);
        1.0 - x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }
}

/// Positive roots `ρ < limit` of `|z + ρ·dir − c| = radius`.
fn ray_circle(z: Complex64, dir: Complex64, c: Complex64, radius: f64, limit: f64, out: &mut Vec<f64>) {
    let d = z - c;
    let b = (d * dir.conj()).re;
    let disc = b * b - (d.norm_sqr() - radius * radius);
    if disc <= 0.0 {
        return;
    }
    let sq = disc.sqrt();
    for rho in [-b - sq, -b + sq] {
        if rho > 0.0 && rho < limit {
            out.push(rho);
        }
    }
}

/// `φ_j(ξ)·τ(|ξ|)` for every patch touching `ξ`.
fn patch_weights(pou: &PartitionOfUnity, cutoff: &Cutoff, xi: Complex64) -> Vec<(usize, f64)> {
    let tau = cutoff.eval(xi.norm());
    if tau == 0.0 {
        return Vec::new();
    }
    pou.eval(xi)
        .unwrap_or_default()
        .into_iter()
        .map(|t| (t.index, t.phi * tau))
        .collect()
}

#[derive(Debug, Clone)]
struct Patch {
    index: usize,
    point: Complex64,
    center: Complex64,
    radius: f64,
    /// Euclidean circle `β(·, a) = r/2` where the bump starts to fade.
    inner: (Complex64, f64),
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
    /// `w_i h_j(ξ_i)` with `h_j = φ_j g ∂̄f / B_{a_j}`
    samples: Vec<Complex64>,
    /// `Σ_i w_i h_j(ξ_i) ((ξ_i − c)/R)^k`
    moments: Vec<Complex64>,
}

impl Patch {
    fn far(&self, z: Complex64) -> Complex64 {
        // ∫ h/(z − ξ) = Σ_k M_k R^k/(z − c)^{k+1}
        let d = z - self.center;
        let t = self.radius / d;
        let mut acc = Complex64::new(0.0, 0.0);
        for m in self.moments.iter().rev() {
            acc = acc * t + m;
        }
        acc / d
    }

    fn is_near(&self, z: Complex64) -> bool {
        (z - self.center).norm() < 2.0 * self.radius
    }
}

/// `u(z) = Σ_j B_{a_j}(z) ∫ φ_j(ξ) τ(ξ) g(ξ) ∂̄f(ξ) / ((z − ξ) B_{a_j}(ξ)) dA(ξ)`, so that
/// `∂̄u = τ g ∂̄f`, with `τ` the radial cutoff of the finite lattice.
#[derive(Debug, Clone)]
pub struct DbarSolution {
    f: SymbolField,
    g: AnalyticPoly,
    pou: Arc<PartitionOfUnity>,
    kernel: Arc<KernelSeries>,
    patches: Vec<Patch>,
    cutoff: Cutoff,
    near_rule: (usize, usize),
}

pub fn dbar_solve(
    f: &SymbolField,
    g: &AnalyticPoly,
    pou: Arc<PartitionOfUnity>,
    kernel: Arc<KernelSeries>,
) -> Result<DbarSolution> {
    if !f.has_dbar() {
        return Err(LabError::precondition(format!(
            "symbol {} has no closed-form ∂̄f",
            f.label()
        )));
    }
    let lat = Arc::clone(&pou.lattice);
    let cutoff = Cutoff::new(lat.r, lat.r_max);
    let mut patches = Vec::with_capacity(lat.len());
    for (j, &a) in lat.points.iter().enumerate() {
        let disc = BergmanDisc::new(a, lat.r).map_err(|e| LabError::Patch {
            patch: j,
            reason: e.to_string(),
        })?;
        let rule = DiscRule::polar(disc.euclid_center, disc.euclid_radius, PATCH_NODES.0, PATCH_NODES.1);
        let scale = kernel.diagonal(a)?;
        let mut samples = Vec::with_capacity(rule.len());
        for &xi in &rule.nodes {
            let phi = patch_weights(&pou, &cutoff, xi)
                .iter()
                .find(|t| t.0 == j)
                .map_or(0.0, |t| t.1);
            if phi == 0.0 {
                samples.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let b = kernel.eval_fast(xi, a)?;
            if !(b.norm() > 1e-12 * scale) {
                return Err(LabError::Patch {
                    patch: j,
                    reason: format!("kernel B_a vanishes near {xi}"),
                });
            }
            let df = f.dbar(xi).expect("checked above");
            samples.push(phi * g.eval(xi) * df / b);
        }
        for (s, &w) in samples.iter_mut().zip(&rule.weights) {
            *s *= w;
        }
        let mut moments = vec![Complex64::new(0.0, 0.0); FAR_TERMS];
        for (&xi, &s) in rule.nodes.iter().zip(&samples) {
            let t = (xi - disc.euclid_center) / disc.euclid_radius;
            let mut p = s;
            for m in moments.iter_mut() {
                *m += p;
                p *= t;
            }
        }
        patches.push(Patch {
            index: j,
            point: a,
            center: disc.euclid_center,
            radius: disc.euclid_radius,
            inner: euclid_realization(a, (0.5 * lat.r).tanh()),
            nodes: rule.nodes,
            weights: rule.weights,
            samples,
            moments,
        });
    }
    Ok(DbarSolution {
        f: f.clone(),
        g: g.clone(),
        pou,
        kernel,
        patches,
        cutoff,
        near_rule: NEAR_RULE,
    })
}

impl DbarSolution {
    /// Override the z-centered near-field rule (Gauss nodes per radial panel, angles).
    pub fn with_near_rule(mut self, per_panel: usize, angles: usize) -> Self {
        self.near_rule = (per_panel.max(2), angles.max(8));
        self
    }

    fn density(&self, xi: Complex64) -> Option<Complex64> {
        let df = self.f.dbar(xi)?;
        Some(self.g.eval(xi) * df)
    }

    /// Accurate evaluation: near patches use a rule centered at `z`, on which the
    /// Cauchy factor becomes `−e^{−iθ}/ρ` and cancels the polar Jacobian.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut near = Vec::new();
        let mut reach = 0.0f64;
        for p in &self.patches {
            if p.is_near(z) {
                reach = reach.max((z - p.center).norm() + p.radius);
                near.push(p);
            } else {
                acc += self.kernel.eval_fast(z, p.point)? * p.far(z);
            }
        }
        if near.is_empty() {
            return Ok(acc);
        }
        let bz: Vec<Complex64> = near
            .iter()
            .map(|p| self.kernel.eval_fast(z, p.point))
            .collect::<Result<_>>()?;
        // the density is smooth between the circles β(·, a_k) ∈ {r/2, r}; rays are split there
        let circles: Vec<(Complex64, f64)> = self
            .patches
            .iter()
            .filter(|p| (z - p.center).norm() - p.radius < reach)
            .flat_map(|p| [(p.center, p.radius), p.inner])
            .chain([(Complex64::new(0.0, 0.0), self.cutoff.inner), (Complex64::new(0.0, 0.0), self.cutoff.outer)])
            .collect();
        let (per_panel, n_ang) = self.near_rule;
        let gl = gauss_legendre(per_panel);
        let max_panel = reach / 8.0;
        let mut near_sum = Complex64::new(0.0, 0.0);
        let mut breaks = Vec::new();
        for k in 0..n_ang {
            let theta = TAU * (k as f64 + 0.5) / n_ang as f64;
            let dir = Complex64::from_polar(1.0, theta);
            breaks.clear();
            breaks.push(0.0);
            breaks.push(reach);
            for &(c, rad) in &circles {
                ray_circle(z, dir, c, rad, reach, &mut breaks);
            }
            breaks.sort_by(f64::total_cmp);
            let mut ray = Complex64::new(0.0, 0.0);
            for pair in breaks.windows(2) {
                let (lo, hi) = (pair[0], pair[1]);
                if hi - lo < 1e-15 {
                    continue;
                }
                let mid = z + dir * (0.5 * (lo + hi));
                if !near.iter().any(|p| (mid - p.center).norm() < p.radius) {
                    continue;
                }
                let pieces = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
                let h = (hi - lo) / pieces as f64;
                for piece in 0..pieces {
                    let a = lo + piece as f64 * h;
                    for (x, w) in gl.0.iter().zip(&gl.1) {
                        let xi = z + dir * (a + 0.5 * h * (x + 1.0));
                        if xi.norm() >= 1.0 {
                            continue;
                        }
                        let terms = patch_weights(&self.pou, &self.cutoff, xi);
                        let mut s = Complex64::new(0.0, 0.0);
                        for (p, &b) in near.iter().zip(&bz) {
                            if let Some(t) = terms.iter().find(|t| t.0 == p.index) {
                                s += t.1 * b / self.kernel.eval_fast(xi, p.point)?;
                            }
                        }
                        if s != Complex64::new(0.0, 0.0) {
                            ray += s * self.density(xi).expect("checked at construction") * (0.5 * h * w);
                        }
                    }
                }
            }
            near_sum -= ray * dir.conj();
        }
        // (1/π)·(2π/n) for the normalized area measure
        Ok(acc + near_sum * (2.0 / n_ang as f64))
    }

    /// Fast evaluation for bulk use: near patches reuse the patch rule with the
    /// singular part subtracted against the exact Cauchy transform of the disc.
    pub fn eval_fast(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut terms = None;
        for p in &self.patches {
            let bz = self.kernel.eval_fast(z, p.point)?;
            if !p.is_near(z) {
                acc += bz * p.far(z);
                continue;
            }
            let terms = terms.get_or_insert_with(|| patch_weights(&self.pou, &self.cutoff, z));
            let phi = terms.iter().find(|t| t.0 == p.index).map_or(0.0, |t| t.1);
            let hz = if phi > 0.0 {
                phi * self.density(z).expect("checked at construction") / bz
            } else {
                Complex64::new(0.0, 0.0)
            };
            let mut s = Complex64::new(0.0, 0.0);
            let mut cauchy = Complex64::new(0.0, 0.0);
            for ((&xi, &w), &sample) in p.nodes.iter().zip(&p.weights).zip(&p.samples) {
                let d = z - xi;
                if d.norm() < 1e-14 {
                    continue;
                }
                let inv = d.inv();
                s += sample * inv;
                cauchy += w * inv;
            }
            let d = z - p.center;
            let exact = if d.norm() < p.radius {
                d.conj()
            } else {
                p.radius * p.radius / d
            };
            acc += bz * (s + hz * (exact - cauchy));
        }
        Ok(acc)
    }

    /// `max |eval − eval_fast|` over the given points.
    pub fn quadrature_residual(&self, points: &[Complex64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for &z in points {
            worst = worst.max((self.eval(z)? - self.eval_fast(z)?).norm());
        }
        Ok(worst)
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::{hankel_apply, project_values};
    use crate::geometry::Lattice;
    use crate::weights::RadialWeight;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup(r_max: f64) -> (Arc<PartitionOfUnity>, Arc<KernelSeries>) {
        let lat = Arc::new(Lattice::generate(1.0, r_max, 11).unwrap());
        let pou = Arc::new(PartitionOfUnity::new(lat, 2.0).unwrap());
        (pou, Arc::new(KernelSeries::unweighted(400).unwrap()))
    }

    #[test]
    fn analytic_symbol_gives_zero() {
        let (pou, k) = setup(0.9);
        let f = SymbolField::poly(AnalyticPoly::new(vec![c(1.0, 0.0), c(0.0, 1.0)]));
        let u = dbar_solve(&f, &AnalyticPoly::monomial(1), pou, k).unwrap();
        for z in [c(0.1, 0.2), c(-0.5, 0.3)] {
            assert_eq!(u.eval(z).unwrap(), c(0.0, 0.0));
            assert_eq!(u.eval_fast(z).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn dbar_of_solution_is_the_density() {
        let (pou, k) = setup(0.9);
        let u = dbar_solve(&SymbolField::zbar(), &AnalyticPoly::monomial(0), pou, k).unwrap();
        let h = 1e-5;
        for z in [c(0.13, 0.21), c(-0.42, 0.05), c(0.31, -0.55), c(-0.07, -0.66)] {
            let dx = (u.eval(z + h).unwrap() - u.eval(z - h).unwrap()) / (2.0 * h);
            let dy = (u.eval(z + c(0.0, h)).unwrap() - u.eval(z - c(0.0, h)).unwrap()) / (2.0 * h);
            let dbar = 0.5 * (dx + Complex64::i() * dy);
            assert!((dbar - 1.0).norm() < 1e-3, "z={z} ∂̄u={dbar}");
        }
    }

    #[test]
    fn fast_and_accurate_agree() {
        let (pou, k) = setup(0.9);
        let u = dbar_solve(&SymbolField::zbar(), &AnalyticPoly::monomial(1), pou, k).unwrap();
        let pts = [c(0.0, 0.0), c(0.4, 0.4), c(-0.7, 0.1), c(0.2, -0.85)];
        let scale = pts.iter().map(|&z| u.eval(z).unwrap().norm()).fold(0.0, f64::max);
        let res = u.quadrature_residual(&pts).unwrap();
        assert!(res < 5e-3 * scale, "{res} vs {scale}");
    }

    #[test]
    fn consistency_with_hankel() {
        let (pou, k) = setup(0.99);
        let f = SymbolField::zbar();
        let g = AnalyticPoly::monomial(1);
        let u = dbar_solve(&f, &g, pou, k).unwrap();
        let w0 = RadialWeight::power(0.0);
        let kw = KernelSeries::new(w0, 400).unwrap();
        let unit = DiscRule::unit_graded(6, 10, 256);
        let values: Vec<Complex64> = unit.nodes.iter().map(|&z| u.eval_fast(z).unwrap()).collect();
        let pu = project_values(&kw, &values, 60, &unit).unwrap();
        let h = hankel_apply(&kw, &f, &g, 10, &DiscRule::unit_default()).unwrap();
        let grid = DiscRule::truncated(0.9, 16, 48);
        let mut err = 0.0;
        let mut norm = 0.0;
        for (&z, &w) in grid.nodes.iter().zip(&grid.weights) {
            let lhs = u.eval_fast(z).unwrap() - pu.poly.eval(z);
            let rhs = h.eval(z);
            err += w * (lhs - rhs).norm_sqr();
            norm += w * rhs.norm_sqr();
        }
        assert!(err.sqrt() <= 1e-2 * norm.sqrt(), "{} vs {}", err.sqrt(), norm.sqrt());
    }
}
