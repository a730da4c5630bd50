//! Carleson-measure tests for `A^p_ω → L^q(μ)` in both exponent regimes.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::bergman::TestFamily;
use crate::error::{LabError, Result};
use crate::geometry::{BergmanDisc, DiscParam};
use crate::quadrature::{neumaier_sum, DiscRule};
use crate::weights::RadialWeight;

/// Largest exponent `p/(p − q)` accepted before the q < p criterion is flagged degenerate.
pub const MAX_DUAL_EXPONENT: f64 = 1e3;

type Density = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

/// A positive measure on the disc.
#[derive(Clone)]
pub enum DiscMeasure {
    /// Point masses `(z_i, m_i)`.
    Discrete(Vec<(Complex64, f64)>),
    /// `c·w(|z|) dA` restricted to `|z| < support`.
    Radial {
        weight: Arc<RadialWeight>,
        scale: f64,
        support: f64,
    },
    /// `h(z) dA` for a general density, integrated by quadrature.
    Density { density: Density, label: String },
}

impl fmt::Debug for DiscMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiscMeasure({})", self.label())
    }
}

impl DiscMeasure {
    pub fn discrete(points: Vec<(Complex64, f64)>) -> Result<Self> {
        if points.iter().any(|&(z, m)| !(m > 0.0) || !(z.norm() < 1.0)) {
            return Err(LabError::domain("point masses must be positive and inside the disc"));
        }
        Ok(DiscMeasure::Discrete(points))
    }

    /// `w dA`.
    pub fn weighted(weight: Arc<RadialWeight>) -> Self {
        DiscMeasure::Radial {
            weight,
            scale: 1.0,
            support: 1.0,
        }
    }

    /// `(1 − |z|²)^γ dA`, `γ > −1`.
    pub fn gap_power(gamma: f64) -> Result<Self> {
        if !(gamma > -1.0) {
            return Err(LabError::domain(format!("gap exponent must exceed -1, got {gamma}")));
        }
        Ok(DiscMeasure::Radial {
            weight: RadialWeight::power(gamma),
            scale: 1.0 / (1.0 + gamma),
            support: 1.0,
        })
    }

    pub fn density(label: impl Into<String>, density: impl Fn(Complex64) -> f64 + Send + Sync + 'static) -> Self {
        DiscMeasure::Density {
            density: Arc::new(density),
            label: label.into(),
        }
    }

    /// `μ` restricted to `|z| < s` (radial measures only).
    pub fn restricted(&self, s: f64) -> Result<Self> {
        match self {
            DiscMeasure::Radial { weight, scale, support } => Ok(DiscMeasure::Radial {
                weight: Arc::clone(weight),
                scale: *scale,
                support: support.min(s),
            }),
            _ => Err(LabError::domain("only radial measures can be restricted")),
        }
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(LabError::domain("measures scale by positive factors"));
        }
        Ok(match self {
            DiscMeasure::Discrete(pts) => DiscMeasure::Discrete(pts.iter().map(|&(z, m)| (z, c * m)).collect()),
            DiscMeasure::Radial { weight, scale, support } => DiscMeasure::Radial {
                weight: Arc::clone(weight),
                scale: scale * c,
                support: *support,
            },
            DiscMeasure::Density { density, label } => {
                let d = Arc::clone(density);
                DiscMeasure::Density {
                    density: Arc::new(move |z| c * d(z)),
                    label: format!("{c}*{label}"),
                }
            }
        })
    }

    /// Config grammar: `weight:<weight spec>`, `gap:gamma=…`, `point:re=…,im=…,mass=…`,
    /// `points:path=…` (CSV `re,im,mass`), each optionally followed by `|scale=…` or
    /// `|support=…`.
    pub fn parse(spec: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut parts = spec.split('|');
        let head = parts.next().unwrap_or("").trim();
        let (name, args) = head.split_once(':').unwrap_or((head, ""));
        let num = |key: &str, raw: &str| -> Result<f64> {
            raw.trim()
                .parse::<f64>()
                .map_err(|_| LabError::Parse(format!("measure `{spec}`: bad `{key}`")))
        };
        let kv = |args: &str| -> Result<std::collections::HashMap<String, String>> {
            args.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| LabError::Parse(format!("measure `{spec}`: expected key=value")))
                })
                .collect()
        };
        let mut m = match name {
            "weight" => DiscMeasure::weighted(RadialWeight::parse(args, base_dir)?),
            "gap" => {
                let p = kv(args)?;
                let g = p
                    .get("gamma")
                    .ok_or_else(|| LabError::Parse(format!("measure `{spec}` is missing `gamma`")))?;
                DiscMeasure::gap_power(num("gamma", g)?).map_err(|e| LabError::Parse(e.to_string()))?
            }
            "point" => {
                let p = kv(args)?;
                let get = |k: &str| -> Result<f64> {
                    p.get(k).map_or(Ok(if k == "mass" { 1.0 } else { 0.0 }), |v| num(k, v))
                };
                DiscMeasure::discrete(vec![(Complex64::new(get("re")?, get("im")?), get("mass")?)])
                    .map_err(|e| LabError::Parse(e.to_string()))?
            }
            "points" => {
                let p = kv(args)?;
                let raw = p
                    .get("path")
                    .ok_or_else(|| LabError::Parse(format!("measure `{spec}` is missing `path`")))?;
                let path = base_dir.map_or_else(|| raw.into(), |d| d.join(raw));
                DiscMeasure::read_csv(&path)?
            }
            other => return Err(LabError::Parse(format!("unknown measure `{other}`"))),
        };
        for modifier in parts {
            let (k, v) = modifier
                .split_once('=')
                .ok_or_else(|| LabError::Parse(format!("measure `{spec}`: bad modifier `{modifier}`")))?;
            let x = num(k, v)?;
            m = match k.trim() {
                "scale" => m.scaled(x),
                "support" => m.restricted(x),
                other => return Err(LabError::Parse(format!("measure `{spec}`: unknown modifier `{other}`"))),
            }
            .map_err(|e| LabError::Parse(e.to_string()))?;
        }
        Ok(m)
    }

    /// Point masses from a CSV with columns `re,im,mass`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut pts = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let v: Vec<f64> = rec
                .iter()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| LabError::Parse(format!("{}: bad row {rec:?}", path.display())))?;
            if v.len() < 3 {
                return Err(LabError::Parse(format!("{}: rows need re,im,mass", path.display())));
            }
            pts.push((Complex64::new(v[0], v[1]), v[2]));
        }
        DiscMeasure::discrete(pts).map_err(|e| LabError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn label(&self) -> String {
        match self {
            DiscMeasure::Discrete(p) => format!("discrete({} points)", p.len()),
            DiscMeasure::Radial { weight, scale, support } => {
                let mut s = weight.label().to_string();
                if *scale != 1.0 {
                    s = format!("{scale}*{s}");
                }
                if *support < 1.0 {
                    s += &format!(" on |z|<{support}");
                }
                s
            }
            DiscMeasure::Density { label, .. } => label.clone(),
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, DiscMeasure::Radial { .. })
    }

    /// `μ(D)` for a hyperbolic disc, via its Euclidean realization.
    pub fn mass(&self, disc: &BergmanDisc) -> Result<f64> {
        match self {
            DiscMeasure::Discrete(pts) => Ok(neumaier_sum(
                pts.iter().filter(|(z, _)| disc.contains_euclid(*z)).map(|&(_, m)| m),
            )),
            DiscMeasure::Radial { weight, scale, support } => {
                Ok(scale * weight.disc_mass_within(disc.euclid_center, disc.euclid_radius, *support)?)
            }
            DiscMeasure::Density { density, .. } => {
                let rule = DiscRule::for_disc(disc);
                Ok(neumaier_sum(rule.nodes.iter().zip(&rule.weights).map(|(&z, &w)| w * density(z))))
            }
        }
    }

    /// `∫ F dμ` for a nonnegative integrand concentrated near `focus`.
    pub fn integrate<F: Fn(Complex64) -> Result<f64>>(&self, f: F, focus: Complex64) -> Result<f64> {
        match self {
            DiscMeasure::Discrete(pts) => {
                let mut terms = Vec::with_capacity(pts.len());
                for &(z, m) in pts {
                    terms.push(m * f(z)?);
                }
                Ok(neumaier_sum(terms))
            }
            DiscMeasure::Radial { weight, scale, support } if *support < 1.0 => {
                let rule = DiscRule::polar(Complex64::new(0.0, 0.0), *support, 48, 128);
                let mut terms = Vec::with_capacity(rule.len());
                for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
                    terms.push(w * weight.eval(z.norm()) * f(z)?);
                }
                Ok(scale * neumaier_sum(terms))
            }
            _ => {
                let rule = DiscRule::mobius_pullback(focus, &DiscRule::unit_default());
                let mut terms = Vec::with_capacity(rule.len());
                for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
                    terms.push(w * self.density_at(z) * f(z)?);
                }
                Ok(neumaier_sum(terms))
            }
        }
    }

    fn density_at(&self, z: Complex64) -> f64 {
        match self {
            DiscMeasure::Discrete(_) => 0.0,
            DiscMeasure::Radial { weight, scale, support } => {
                if z.norm() < *support {
                    scale * weight.eval(z.norm())
                } else {
                    0.0
                }
            }
            DiscMeasure::Density { density, .. } => density(z),
        }
    }
}

fn check_exponents(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && q > 1.0) {
        return Err(LabError::domain(format!("exponents must exceed 1, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `μ(D(z,r)) / ω(D(z,r))^{q/p}`.
pub fn carleson_ratio(
    mu: &DiscMeasure,
    omega: &RadialWeight,
    p: f64,
    q: f64,
    r: f64,
    param: DiscParam,
    z: Complex64,
) -> Result<f64> {
    check_exponents(p, q)?;
    let disc = BergmanDisc::with_param(z, r, param)?;
    let wm = omega.disc_mass(disc.euclid_center, disc.euclid_radius)?;
    if !(wm > 0.0) {
        return Err(LabError::domain(format!("ω has zero mass on the disc at {z}")));
    }
    Ok(mu.mass(&disc)? / wm.powf(q / p))
}

/// Profile of the ratio over a grid with its sup.
#[derive(Debug, Clone, Serialize)]
pub struct CarlesonSup {
    pub param: DiscParam,
    pub sup: f64,
    pub argmax: Complex64,
    pub profile: Vec<(Complex64, f64)>,
    /// The maximal ratio over the outermost grid circle exceeds every inner circle's
    /// maximum by a factor of 2 or more, and circle maxima increase monotonically outward.
    pub diverging: bool,
}

pub fn carleson_sup(
    mu: &DiscMeasure,
    omega: &RadialWeight,
    p: f64,
    q: f64,
    r: f64,
    param: DiscParam,
    grid: &[Complex64],
) -> Result<CarlesonSup> {
    if grid.is_empty() {
        return Err(LabError::domain("empty evaluation grid"));
    }
    let mut profile = Vec::with_capacity(grid.len());
    let (mut sup, mut argmax) = (f64::NEG_INFINITY, grid[0]);
    for &z in grid {
        let v = carleson_ratio(mu, omega, p, q, r, param, z)?;
        if v > sup {
            sup = v;
            argmax = z;
        }
        profile.push((z, v));
    }
    let circles = circle_maxima(&profile);
    let diverging = circles.len() >= 3
        && circles.windows(2).all(|w| w[1].1 >= w[0].1)
        && circles[circles.len() - 1].1 >= 2.0 * circles[0].1;
    Ok(CarlesonSup {
        param,
        sup,
        argmax,
        profile,
        diverging,
    })
}

/// `(|z|, max ratio on that circle)` in increasing `|z|`.
fn circle_maxima(profile: &[(Complex64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut sorted: Vec<(f64, f64)> = profile.iter().map(|(z, v)| (z.norm(), *v)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (t, v) in sorted {
        match out.last_mut() {
            Some(last) if (last.0 - t).abs() < 1e-9 => last.1 = last.1.max(v),
            _ => out.push((t, v)),
        }
    }
    out
}

/// `(∫ (μ(D)/ω(D))^{p/(p−q)} ω dA)^{(p−q)/p}` over `|z| <= r_max`.
#[derive(Debug, Clone, Serialize)]
pub struct CarlesonLpNorm {
    pub value: f64,
    pub exponent: f64,
    /// `p/(p − q)` exceeds [`MAX_DUAL_EXPONENT`].
    pub degenerate: bool,
}

pub fn carleson_lp_norm(
    mu: &DiscMeasure,
    omega: &RadialWeight,
    p: f64,
    q: f64,
    r: f64,
    r_max: f64,
    param: DiscParam,
) -> Result<CarlesonLpNorm> {
    check_exponents(p, q)?;
    if !(q < p) {
        return Err(LabError::domain(format!("the L^p criterion needs q < p, got p = {p}, q = {q}")));
    }
    let exponent = p / (p - q);
    let n_ang = if mu.is_radial() { 1 } else { 64 };
    let rule = DiscRule::truncated(r_max, 64, n_ang);
    let mut terms = Vec::with_capacity(rule.len());
    for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
        let disc = BergmanDisc::with_param(z, r, param)?;
        let wm = omega.disc_mass(disc.euclid_center, disc.euclid_radius)?;
        let ratio = mu.mass(&disc)? / wm;
        terms.push(w * ratio.powf(exponent) * omega.eval(z.norm()));
    }
    Ok(CarlesonLpNorm {
        value: neumaier_sum(terms).powf(1.0 / exponent),
        exponent,
        degenerate: exponent > MAX_DUAL_EXPONENT,
    })
}

/// Boundary trend of a profile sampled at increasing radii.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Trend {
    pub decreasing_tail: bool,
    pub final_fraction: f64,
    /// Last four points decreasing and the final value below 10% of the first.
    pub vanishing: bool,
}

impl Trend {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let tail = &values[n.saturating_sub(4)..];
        let decreasing_tail = n >= 4 && tail.windows(2).all(|w| w[1] < w[0]);
        let first = values.first().copied().unwrap_or(0.0);
        let last = values.last().copied().unwrap_or(0.0);
        let final_fraction = if first > 0.0 { last / first } else if last == 0.0 { 0.0 } else { f64::INFINITY };
        Trend {
            decreasing_tail,
            final_fraction,
            vanishing: decreasing_tail && final_fraction < 0.1,
        }
    }
}

/// Radii `0.5, 0.6, …, 0.9, 0.95, 0.99`, capped at `r_max` (which is always included).
pub fn profile_radii(r_max: f64) -> Vec<f64> {
    let mut t: Vec<f64> = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
        .into_iter()
        .filter(|&x| x < r_max - 1e-12)
        .collect();
    t.push(r_max);
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct VanishingProfile {
    pub param: DiscParam,
    /// `(t, sup_{|z|=t} ratio)`
    pub profile: Vec<(f64, f64)>,
    pub trend: Trend,
}

pub fn vanishing_profile(
    mu: &DiscMeasure,
    omega: &RadialWeight,
    p: f64,
    q: f64,
    r: f64,
    r_max: f64,
    param: DiscParam,
) -> Result<VanishingProfile> {
    let n_ang = if mu.is_radial() { 1 } else { 64 };
    let mut profile = Vec::new();
    for t in profile_radii(r_max) {
        let mut best = 0.0f64;
        for k in 0..n_ang {
            let z = Complex64::from_polar(t, std::f64::consts::TAU * k as f64 / n_ang as f64);
            best = best.max(carleson_ratio(mu, omega, p, q, r, param, z)?);
        }
        profile.push((t, best));
    }
    let values: Vec<f64> = profile.iter().map(|x| x.1).collect();
    Ok(VanishingProfile {
        param,
        trend: Trend::of(&values),
        profile,
    })
}

/// `sup_g ‖g‖_{L^q(μ)} / ‖g‖_{A^p_ω}` over a normalized test family (a lower estimate).
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingEstimate {
    pub estimate: f64,
    pub argmax: usize,
    pub per_member: Vec<f64>,
}

pub fn embedding_norm_estimate(mu: &DiscMeasure, q: f64, family: &TestFamily) -> Result<EmbeddingEstimate> {
    if family.is_empty() {
        return Err(LabError::domain("empty test family"));
    }
    let mut per_member = Vec::with_capacity(family.len());
    for i in 0..family.len() {
        let integral = mu.integrate(|z| Ok(family.eval(i, z)?.norm().powf(q)), family.focus(i))?;
        per_member.push(integral.powf(1.0 / q));
    }
    let (argmax, estimate) = per_member
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |a, (i, v)| if v > a.1 { (i, v) } else { a });
    Ok(EmbeddingEstimate {
        estimate,
        argmax,
        per_member,
    })
}

/// Polar evaluation grid: `n_radii` radii from 0 to `r_max` (inclusive) times `n_angles`.
pub fn polar_grid(r_max: f64, n_radii: usize, n_angles: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for i in 1..n_radii.max(2) {
        let t = r_max * i as f64 / (n_radii.max(2) - 1) as f64;
        for k in 0..n_angles.max(1) {
            out.push(Complex64::from_polar(t, std::f64::consts::TAU * k as f64 / n_angles.max(1) as f64));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::KernelSeries;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ratio_examples() {
        let w0 = RadialWeight::power(0.0);
        let mu = DiscMeasure::weighted(Arc::clone(&w0));
        for z in [c(0.0, 0.0), c(0.5, 0.3), c(-0.9, 0.0)] {
            let v = carleson_ratio(&mu, &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, z).unwrap();
            assert!((v - 1.0).abs() < 1e-10);
        }
        let delta = DiscMeasure::discrete(vec![(c(0.0, 0.0), 1.0)]).unwrap();
        let v = carleson_ratio(&delta, &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, c(0.0, 0.0)).unwrap();
        let expect = 1.0 / 1f64.tanh().powi(2);
        assert!((v - expect).abs() < 1e-12);
        assert!((v - 1.7244).abs() < 1e-3);
    }

    #[test]
    fn gap_measure_profile_decreases() {
        let w0 = RadialWeight::power(0.0);
        let mu = DiscMeasure::gap_power(1.0).unwrap();
        let prof = vanishing_profile(&mu, &w0, 2.0, 2.0, 1.0, 0.99, DiscParam::Bergman).unwrap();
        assert!(prof.trend.vanishing, "{:?}", prof.profile);
        // ratio comparable to 1 − t
        for (t, v) in &prof.profile {
            let band = v / (1.0 - t);
            assert!(band > 1.0 && band < 10.0, "t={t} ratio={v}");
        }
        let flat = vanishing_profile(&DiscMeasure::weighted(Arc::clone(&w0)), &w0, 2.0, 2.0, 1.0, 0.99, DiscParam::Bergman)
            .unwrap();
        assert!(flat.profile.iter().all(|(_, v)| (v - 1.0).abs() < 1e-9));
        assert!(!flat.trend.vanishing);
    }

    #[test]
    fn compactly_supported_measure_vanishes() {
        let w0 = RadialWeight::power(0.0);
        let mu = DiscMeasure::weighted(Arc::clone(&w0)).restricted(0.5).unwrap();
        let prof = vanishing_profile(&mu, &w0, 2.0, 2.0, 1.0, 0.99, DiscParam::Bergman).unwrap();
        // D(z, 1) stays clear of |w| < 0.5 once tanh(atanh t − 1) >= 0.5
        for (t, v) in &prof.profile {
            if (t.atanh() - 1.0).tanh() >= 0.5 {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn sup_homogeneity_and_divergence() {
        let w0 = RadialWeight::power(0.0);
        let grid = polar_grid(0.95, 8, 4);
        let mu = DiscMeasure::gap_power(0.5).unwrap();
        let s1 = carleson_sup(&mu, &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, &grid).unwrap();
        let s3 = carleson_sup(&mu.scaled(3.0).unwrap(), &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, &grid).unwrap();
        assert!((s3.sup - 3.0 * s1.sup).abs() < 1e-12 * s3.sup);
        assert!(!s1.diverging);
        let heavy = DiscMeasure::gap_power(-0.5).unwrap();
        let sh = carleson_sup(&heavy, &w0, 2.0, 2.0, 1.0, DiscParam::Bergman, &polar_grid(0.999, 8, 4)).unwrap();
        assert!(sh.diverging);
        assert!(sh.argmax.norm() > 0.9);
    }

    #[test]
    fn lp_norm_examples() {
        let w0 = RadialWeight::power(0.0);
        let mu = DiscMeasure::weighted(Arc::clone(&w0));
        let n = carleson_lp_norm(&mu, &w0, 3.0, 2.0, 1.0, 0.99, DiscParam::Bergman).unwrap();
        // ratio ≡ 1, so the value is (r_max²)^{1/3}
        assert!((n.value - 0.99f64.powf(2.0 / 3.0)).abs() < 1e-10);
        assert!(!n.degenerate);
        let point = DiscMeasure::discrete(vec![(c(0.0, 0.0), 1.0)]).unwrap();
        let pn = carleson_lp_norm(&point, &w0, 3.0, 2.0, 1.0, 0.99, DiscParam::Bergman).unwrap();
        assert!(pn.value.is_finite() && pn.value > 0.0);
        let deg = carleson_lp_norm(&mu, &w0, 2.0005, 2.0, 1.0, 0.9, DiscParam::Bergman).unwrap();
        assert!(deg.degenerate);
    }

    #[test]
    fn embedding_examples() {
        let w0 = RadialWeight::power(0.0);
        let k = Arc::new(KernelSeries::new(Arc::clone(&w0), 400).unwrap());
        let fam = TestFamily::new(k, &w0, 2.0, &[c(0.3, 0.0), c(0.0, -0.7)], 4, 5, 3).unwrap();
        let mu = DiscMeasure::weighted(Arc::clone(&w0));
        let e = embedding_norm_estimate(&mu, 2.0, &fam).unwrap();
        assert!((e.estimate - 1.0).abs() < 1e-8);
        let e4 = embedding_norm_estimate(&mu.scaled(4.0).unwrap(), 2.0, &fam).unwrap();
        assert!((e4.estimate - 2.0).abs() < 1e-8);
    }

    #[test]
    fn parse_measures() {
        let m = DiscMeasure::parse("gap:gamma=0.5|scale=2", None).unwrap();
        assert!(m.is_radial());
        let p = DiscMeasure::parse("point:re=0.1,im=0.2,mass=3", None).unwrap();
        assert!(matches!(p, DiscMeasure::Discrete(ref v) if v.len() == 1 && v[0].1 == 3.0));
        let w = DiscMeasure::parse("weight:powerlog:alpha=1,gamma=0.5", None).unwrap();
        assert!(w.label().contains("powerlog") || !w.label().is_empty());
        assert!(DiscMeasure::parse("nope", None).is_err());
        assert!(DiscMeasure::parse("gap:gamma=-2", None).is_err());
    }

    #[test]
    fn parameterizations_both_run() {
        let w0 = RadialWeight::power(0.0);
        let mu = DiscMeasure::gap_power(1.0).unwrap();
        let a = carleson_ratio(&mu, &w0, 2.0, 2.0, 0.5, DiscParam::Bergman, c(0.4, 0.0)).unwrap();
        let b = carleson_ratio(&mu, &w0, 2.0, 2.0, 0.5f64.tanh(), DiscParam::Pseudohyperbolic, c(0.4, 0.0)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
