use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use super::config::Scenario;
use super::hankel::{hankel_atom_norm, hankel_family_norms, rademacher_lower_bound};
use super::report::{Check, ExperimentReport, Table};
use crate::bda::{criterion_pq, criterion_qp, decompose, g_value, DEFAULT_DEGREE};
use crate::bergman::{kernel_norm, lp_norm, KernelSeries, TestFamily, DEFAULT_DMAX, DEFAULT_KERNEL_TOL};
use crate::carleson::{
    carleson_lp_norm, carleson_sup, embedding_norm_estimate, profile_radii, vanishing_profile, Trend,
};
use crate::error::{LabError, Result};
use crate::geometry::{BergmanDisc, DiscParam, Lattice, PartitionOfUnity};
use crate::quadrature::DiscRule;
use crate::weights::{ap_constant, classify, conjugate, dyadic_grid, least_squares, sigma_weight, weight_w, RadialWeight, WeightFamily};

/// The six experiment kinds, one per CLI subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    ClassifyWeight,
    KernelCheck,
    CarlesonTest,
    BdaProfile,
    Decompose,
    HankelVerify,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::ClassifyWeight,
        Experiment::KernelCheck,
        Experiment::CarlesonTest,
        Experiment::BdaProfile,
        Experiment::Decompose,
        Experiment::HankelVerify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::ClassifyWeight => "classify-weight",
            Experiment::KernelCheck => "kernel-check",
            Experiment::CarlesonTest => "carleson-test",
            Experiment::BdaProfile => "bda-profile",
            Experiment::Decompose => "decompose",
            Experiment::HankelVerify => "hankel-verify",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }
}

/// Run one experiment; the report is always returned, `partial` on error.
pub fn run(kind: Experiment, scenario: &mut Scenario) -> ExperimentReport {
    let mut rep = ExperimentReport::new(kind.name());
    let outcome = match scenario.raw("experiment") {
        Some(e) if e != kind.name() => Err(LabError::precondition(format!(
            "config is for `{e}` but `{}` was requested",
            kind.name()
        ))),
        _ => match kind {
            Experiment::ClassifyWeight => classify_weight(scenario, &mut rep),
            Experiment::KernelCheck => kernel_check(scenario, &mut rep),
            Experiment::CarlesonTest => carleson_test(scenario, &mut rep),
            Experiment::BdaProfile => bda_profile(scenario, &mut rep),
            Experiment::Decompose => decompose_run(scenario, &mut rep),
            Experiment::HankelVerify => hankel_verify(scenario, &mut rep),
        },
    };
    rep.scenario = scenario.echo().clone();
    rep.finish(outcome);
    rep
}

fn exponent(s: &mut Scenario, key: &str, default: f64) -> Result<f64> {
    let x = s.f64(key, default)?;
    if !(x > 1.0 && x.is_finite()) {
        return Err(LabError::precondition(format!("`{key}` must exceed 1, got {x}")));
    }
    Ok(x)
}

fn radius_in_unit(s: &mut Scenario, key: &str, default: f64) -> Result<f64> {
    let x = s.f64(key, default)?;
    if !(x > 0.0 && x < 1.0) {
        return Err(LabError::precondition(format!("`{key}` must lie in (0, 1), got {x}")));
    }
    Ok(x)
}

fn hyp_radius(s: &mut Scenario) -> Result<f64> {
    let r = s.f64("r", 1.0)?;
    if !(r > 0.0 && r <= 2.0) {
        return Err(LabError::precondition(format!("`r` must lie in (0, 2], got {r}")));
    }
    Ok(r)
}

/// Radii `{0, 0.25} ∪ {0.5, 0.6, …, r_max}` times `n_angles` angles (the origin once).
pub fn profile_grid(r_max: f64, n_angles: usize) -> Vec<Complex64> {
    let mut radii = vec![0.25];
    radii.extend(profile_radii(r_max));
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for t in radii {
        for k in 0..n_angles.max(1) {
            out.push(Complex64::from_polar(t, TAU * k as f64 / n_angles.max(1) as f64));
        }
    }
    out
}

/// Three A_p constants: `(ω, η)`, `(ω, v)` and the dual `A_{p′}(ω, σ)`.
fn ap_triplet(
    rep: &mut ExperimentReport,
    omega: &Arc<RadialWeight>,
    v: &Arc<RadialWeight>,
    eta: &Arc<RadialWeight>,
    p: f64,
) -> Result<()> {
    let a_eta = ap_constant(omega, eta, p)?;
    let a_v = ap_constant(omega, v, p)?;
    let sigma = sigma_weight(omega, v, p);
    let a_sigma = match sigma.tail(0.0) {
        Ok(t) if t.is_finite() => Some(ap_constant(omega, &sigma, conjugate(p))?),
        _ => None,
    };
    for (name, val) in [("omega_eta", &a_eta), ("omega_v", &a_v)] {
        if !val.value.is_finite() {
            rep.warnings.push(format!(
                "A_p({name}) is infinite: {}",
                val.diagnostic.clone().unwrap_or_default()
            ));
        }
    }
    rep.put("ap_omega_eta", &a_eta);
    rep.put("ap_omega_v", &a_v);
    rep.put("ap_dual_omega_sigma", &a_sigma);
    Ok(())
}

fn classify_weight(s: &mut Scenario, rep: &mut ExperimentReport) -> Result<()> {
    let omega = s.weight("omega", "power:alpha=0")?;
    let v = s.weight("v", s.raw("omega").unwrap_or("power:alpha=0").to_string().as_str())?;
    let eta = s.weight("eta", s.raw("omega").unwrap_or("power:alpha=0").to_string().as_str())?;
    let p = exponent(s, "p", 2.0)?;
    let depth = s.usize("grid_depth", 24)?;
    let cls = classify(&omega, depth)?;
    rep.put("weight", omega.label());
    rep.put("class", &cls);
    ap_triplet(rep, &omega, &v, &eta, p)?;

    let mut table = Table::new(&["k", "r", "tail", "dhat_ratio", "regular_ratio"]);
    for (k, r) in dyadic_grid(cls.depth_used).into_iter().enumerate() {
        let t = omega.tail(r)?;
        let t_half = omega.tail((1.0 + r) / 2.0)?;
        table.push(vec![(k + 1) as f64, r, t, t / t_half, t / (omega.eval(r) * (1.0 - r))]);
    }
    rep.profile = Some(table);

    if let Some(e) = s.opt_bool("expect_in_r")? {
        rep.check(Check::flag("in_R", cls.in_r, e));
    }
    if let Some(e) = s.opt_bool("expect_in_dhat")? {
        rep.check(Check::flag("in_Dhat", cls.in_dhat, e));
    }
    if let Some(e) = s.opt_bool("expect_in_dcheck")? {
        rep.check(Check::flag("in_Dcheck", cls.in_dcheck, e));
    }
    if let Some(beta) = s.opt_f64("expect_beta")? {
        let tol = s.f64("beta_tol", 0.05)?;
        rep.check(Check::band("beta", cls.beta, beta - tol, beta + tol));
    }
    if let Some(ap) = s.opt_f64("expect_ap")? {
        let a = ap_constant(&omega, &v, p)?.value;
        rep.check(Check::band("ap_omega_v", a, ap - 1e-6, ap + 1e-6));
    }
    Ok(())
}

fn kernel(s: &mut Scenario, omega: &Arc<RadialWeight>) -> Result<Arc<KernelSeries>> {
    let d_max = s.usize("d_max", DEFAULT_DMAX)?;
    let tol = s.f64("kernel_tol", DEFAULT_KERNEL_TOL)?;
    Ok(Arc::new(KernelSeries::new(Arc::clone(omega), d_max)?.with_tolerance(tol)))
}

/// Kernel closed form, Hermitian symmetry, reproducing identity and the two bands
/// `ω(D)/[ω]` and `‖B_z‖_{A^p_v}/proxy` with their log-slopes.
fn kernel_check(s: &mut Scenario, rep: &mut ExperimentReport) -> Result<()> {
    let omega = s.weight("omega", "power:alpha=0")?;
    let v = s.weight("v", s.raw("omega").unwrap_or("power:alpha=0").to_string().as_str())?;
    let p = exponent(s, "p", 2.0)?;
    let r = hyp_radius(s)?;
    let r_max = radius_in_unit(s, "r_max", 0.95)?;
    let n = s.usize("grid_radii", 20)?.max(2);
    let band = s.f64("band", 100.0)?;
    let k = kernel(s, &omega)?;
    let base = DiscRule::unit_default();
    rep.nodes("unit_default", base.len());

    // 20 × 20 closed-form comparison on |z|, |ζ| <= 0.9
    let pts: Vec<Complex64> = (0..20)
        .map(|i| Complex64::from_polar(0.9 * i as f64 / 19.0, 2.4 * i as f64))
        .collect();
    let mut herm = 0.0f64;
    let mut closed = None;
    if let WeightFamily::Power { alpha } = omega.family() {
        let mut worst = 0.0f64;
        for &z in &pts {
            for &zeta in &pts {
                let b = k.eval(z, zeta)?;
                let exact = (Complex64::new(1.0, 0.0) - z * zeta.conj()).powf(-(alpha + 2.0));
                worst = worst.max((b - exact).norm() / exact.norm());
            }
        }
        closed = Some(worst);
    }
    for &z in &pts {
        for &zeta in &pts {
            herm = herm.max((k.eval(z, zeta)? - k.eval(zeta, z)?.conj()).norm());
        }
    }
    let mut repro = 0.0f64;
    for i in 0..10 {
        let z = Complex64::from_polar(0.9 * i as f64 / 9.0, 1.1 * i as f64);
        let rule = DiscRule::mobius_pullback(z, &base);
        let norm = lp_norm(|w| k.eval_fast(w, z), &rule, 2.0, &omega)?;
        let bzz = k.eval(z, z)?.re;
        repro = repro.max((norm * norm - bzz).abs() / bzz);
    }

    let mut table = Table::new(&["modulus", "mass_ratio", "norm_quadrature", "norm_proxy", "norm_ratio"]);
    let (mut xs, mut mass_log, mut norm_log) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let t = r_max * i as f64 / (n - 1) as f64;
        let z = Complex64::new(t, 0.0);
        let disc = BergmanDisc::new(z, r)?;
        let mass = omega.disc_mass(disc.euclid_center, disc.euclid_radius)?;
        let mass_ratio = mass / (omega.tail(t)? * (1.0 - t));
        let kn = kernel_norm(&k, &v, p, z, r, &base)?;
        let norm_ratio = kn.quadrature / kn.proxy;
        table.push(vec![t, mass_ratio, kn.quadrature, kn.proxy, norm_ratio]);
        xs.push((1.0 - t).ln());
        mass_log.push(mass_ratio.ln());
        norm_log.push(norm_ratio.ln());
    }
    let width = |ys: &[f64]| {
        let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &y| (a.0.min(y), a.1.max(y)));
        (hi - lo).exp()
    };
    let (mass_slope, _) = least_squares(&xs, &mass_log);
    let (norm_slope, _) = least_squares(&xs, &norm_log);
    // same fit restricted to |z| >= 0.5
    let outer: Vec<usize> = (0..n).filter(|&i| table.rows[i][0] >= 0.5).collect();
    let sub = |ys: &[f64]| {
        let x: Vec<f64> = outer.iter().map(|&i| xs[i]).collect();
        let y: Vec<f64> = outer.iter().map(|&i| ys[i]).collect();
        if x.len() >= 2 { least_squares(&x, &y).0 } else { f64::NAN }
    };
    rep.put("kernel_closed_form_max_rel_error", closed);
    rep.put("hermitian_max_abs_error", herm);
    rep.put("reproducing_max_rel_error", repro);
    rep.put("mass_band_width", width(&mass_log));
    rep.put("norm_band_width", width(&norm_log));
    rep.put("mass_log_slope", mass_slope);
    rep.put("norm_log_slope", norm_slope);
    rep.put("mass_log_slope_outer", sub(&mass_log));
    rep.put("norm_log_slope_outer", sub(&norm_log));
    rep.put("d_max", k.d_max());
    rep.profile = Some(table);

    if let Some(e) = closed {
        rep.check(Check::at_most("kernel_closed_form", e, 1e-8));
    }
    rep.check(Check::at_most("hermitian_symmetry", herm, 1e-12));
    rep.check(Check::at_most("reproducing_identity", repro, 1e-4));
    rep.check(Check::at_most("mass_band_width", width(&mass_log), band));
    rep.check(Check::at_most("norm_band_width", width(&norm_log), band));
    rep.check(Check::band("mass_log_slope", mass_slope, -0.1, 0.1));
    rep.check(Check::band("norm_log_slope", norm_slope, -0.1, 0.1));
    Ok(())
}

fn lattice(s: &mut Scenario, rep: &mut ExperimentReport, r: f64, r_max: f64) -> Result<Arc<Lattice>> {
    let seed = s.u64("seed", 0)?;
    rep.provenance.seed = Some(seed);
    let lat = Arc::new(Lattice::generate(r, r_max, seed)?);
    rep.set_lattice(Arc::clone(&lat));
    Ok(lat)
}

/// Kernel atoms at lattice points (up to `atoms`) plus `n_poly` seeded polynomials.
fn test_family(
    s: &mut Scenario,
    rep: &mut ExperimentReport,
    kernel: Arc<KernelSeries>,
    v: &RadialWeight,
    p: f64,
    lat: &Lattice,
) -> Result<TestFamily> {
    let n_atoms = s.usize("atoms", 200)?;
    let n_poly = s.usize("n_poly", 8)?;
    let degree = s.usize("poly_degree", 10)?;
    let seed = s.u64("seed", 0)?;
    let atoms: Vec<Complex64> = lat.points.iter().copied().take(n_atoms).collect();
    rep.put("family_atoms", atoms.len());
    rep.put("family_polys", n_poly);
    TestFamily::new(kernel, v, p, &atoms, n_poly, degree, seed)
}

fn carleson_test(s: &mut Scenario, rep: &mut ExperimentReport) -> Result<()> {
    let omega = s.weight("omega", "power:alpha=0")?;
    let mu = s.measure("weight:power:alpha=0")?;
    let p = exponent(s, "p", 2.0)?;
    let q = exponent(s, "q", 2.0)?;
    let r = hyp_radius(s)?;
    let r_max = radius_in_unit(s, "r_max", 0.99)?;
    let n_angles = s.usize("grid_angles", 8)?;
    let band = s.f64("band", 20.0)?;
    rep.put("measure", mu.label());
    let lat = lattice(s, rep, r, r_max)?;
    let k = kernel(s, &omega)?;
    let family = test_family(s, rep, Arc::clone(&k), &omega, p, &lat)?;
    let emb = embedding_norm_estimate(&mu, q, &family)?;
    rep.put("embedding_estimate_lower", emb.estimate);
    rep.put("embedding_argmax_member", emb.argmax);
    let params = [(DiscParam::Bergman, r), (DiscParam::Pseudohyperbolic, (r / 2.0).tanh())];

    if p <= q {
        let grid = profile_grid(r_max, n_angles);
        let mut table = Table::new(&["modulus", "angle", "ratio_bergman", "ratio_pseudohyperbolic"]);
        let sups = params
            .iter()
            .map(|&(param, rad)| carleson_sup(&mu, &omega, p, q, rad, param, &grid))
            .collect::<Result<Vec<_>>>()?;
        for (i, z) in grid.iter().enumerate() {
            table.push(vec![z.norm(), z.arg(), sups[0].profile[i].1, sups[1].profile[i].1]);
        }
        let profiles = params
            .iter()
            .map(|&(param, rad)| vanishing_profile(&mu, &omega, p, q, rad, r_max, param))
            .collect::<Result<Vec<_>>>()?;
        let ratio = emb.estimate.powf(q) / sups[0].sup;
        rep.put("carleson_sup", sups[0].sup);
        rep.put("carleson_argmax", sups[0].argmax);
        rep.put("carleson_diverging", sups[0].diverging);
        rep.put("carleson_sup_pseudohyperbolic", sups[1].sup);
        rep.put("pseudohyperbolic_radius", params[1].1);
        rep.put("vanishing_profile", &profiles[0]);
        rep.put("vanishing_profile_pseudohyperbolic", &profiles[1]);
        rep.put("estimate_pow_q_over_sup", ratio);
        rep.profile = Some(table);
        rep.check(Check::band("estimate_vs_sup", ratio, 1.0 / band, band));
        if let Some(e) = s.opt_bool("expect_vanishing")? {
            rep.check(Check::flag("vanishing", profiles[0].trend.vanishing, e));
        }
        if s.bool("sensitivity", false)? {
            let mut vals = Vec::new();
            for rr in [0.5, 1.0, 2.0] {
                vals.push(carleson_sup(&mu, &omega, p, q, rr, DiscParam::Bergman, &grid)?.sup);
            }
            let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |a, &x| (a.0.min(x), a.1.max(x)));
            rep.put("sensitivity_sups", &vals);
            rep.check(Check::at_most("sensitivity_band", hi / lo, band));
        }
    } else {
        let norms = params
            .iter()
            .map(|&(param, rad)| carleson_lp_norm(&mu, &omega, p, q, rad, r_max, param))
            .collect::<Result<Vec<_>>>()?;
        let ratio = emb.estimate.powf(q) / norms[0].value;
        rep.put("carleson_lp_norm", &norms[0]);
        rep.put("carleson_lp_norm_pseudohyperbolic", &norms[1]);
        rep.put("estimate_pow_q_over_lp_norm", ratio);
        if norms[0].degenerate {
            rep.warnings.push(format!("dual exponent {} exceeds the blow-up guard", norms[0].exponent));
        }
        rep.check(Check::finite("carleson_lp_norm", norms[0].value));
        rep.check(Check::band("estimate_vs_lp_norm", ratio, 1.0 / band, band));
    }
    Ok(())
}

/// Relative change of `G` between degrees `d` and `d + 2` at a few grid points.
fn degree_diagnostic(f: &crate::bergman::SymbolField, pts: &[Complex64], r: f64, q: f64, d: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in pts {
        let a = g_value(f, z, r, q, d)?;
        let b = g_value(f, z, r, q, d + 2)?;
        if a > 1e-12 {
            worst = worst.max((a - b).abs() / a);
        }
    }
    Ok(worst)
}

fn bda_profile(s: &mut Scenario, rep: &mut ExperimentReport) -> Result<()> {
    let f = s.symbol("zbar")?;
    let v = s.weight("v", "power:alpha=0")?;
    let eta = s.weight("eta", s.raw("v").unwrap_or("power:alpha=0").to_string().as_str())?;
    let p = exponent(s, "p", 2.0)?;
    let q = exponent(s, "q", 2.0)?;
    let r = hyp_radius(s)?;
    let r_max = radius_in_unit(s, "r_max", 0.99)?;
    let d = s.usize("d", DEFAULT_DEGREE)?;
    let n_angles = s.usize("grid_angles", 8)?;
    rep.put("symbol", f.label());
    let grid = profile_grid(r_max, n_angles);
    let probe = [grid[0], grid[grid.len() / 2], grid[grid.len() - 1]];
    let diag = degree_diagnostic(&f, &probe, r, q, d)?;
    rep.put("degree_refinement_rel_change", diag);
    if diag > 0.01 {
        rep.warnings.push(format!("G changes by {diag:.3e} from degree {d} to {}", d + 2));
    }
    if p <= q {
        let c = criterion_pq(&f, &v, &eta, p, q, r, d, &grid)?;
        let mut table = Table::new(&["modulus", "angle", "g", "criterion"]);
        for pt in &c.profile {
            table.push(vec![pt.z.norm(), pt.z.arg(), pt.g, pt.criterion]);
        }
        rep.put("criterion_sup", c.sup);
        rep.put("criterion_argmax", c.argmax);
        rep.put("circle_maxima", &c.circle_maxima);
        rep.put("trend", c.trend);
        rep.profile = Some(table);
        rep.check(Check::finite("criterion_sup", c.sup));
        if let Some(e) = s.opt_bool("expect_vanishing")? {
            rep.check(Check::flag("vanishing", c.trend.vanishing, e));
        }
    } else {
        let nodes = s.usize("qp_nodes", 24)?;
        let angles = s.usize("qp_angles", 16)?;
        let rule = DiscRule::truncated(r_max, nodes, angles);
        rep.nodes("criterion_qp", rule.len());
        let c = criterion_qp(&f, &v, &eta, p, q, r, d, &rule)?;
        let mut table = Table::new(&["modulus", "angle", "g", "w", "quad_weight"]);
        for n in &c.nodes {
            table.push(vec![n.z.norm(), n.z.arg(), n.g, n.w, n.quad_weight]);
        }
        rep.put("criterion_qp", c.value);
        rep.put("criterion_exponent", c.exponent);
        rep.put("criterion_degenerate", c.degenerate);
        rep.profile = Some(table);
        rep.check(Check::finite("criterion_qp", c.value));
    }
    Ok(())
}

fn decompose_run(s: &mut Scenario, rep: &mut ExperimentReport) -> Result<()> {
    let f = s.symbol("zbar")?;
    let q = exponent(s, "q", 2.0)?;
    let r = hyp_radius(s)?;
    let r_max = radius_in_unit(s, "r_max", 0.95)?;
    let d = s.usize("d", DEFAULT_DEGREE)?;
    let smooth = s.f64("smoothness", 2.0)?;
    let n_angles = s.usize("grid_angles", 8)?;
    let lat = lattice(s, rep, r, r_max)?;
    let pou = Arc::new(PartitionOfUnity::new(Arc::clone(&lat), smooth)?);
    let dec = decompose(&f, Arc::clone(&pou), q, d)?;
    let rv = dec.validation_radius();
    let grid = crate::carleson::polar_grid(rv, 6, n_angles);
    let val = dec.validate(&grid, 1000, lat.seed)?;
    let mut table = Table::new(&["modulus", "angle", "g_2r", "dbar_term", "m_term", "dbar_ratio", "m_ratio"]);
    for pt in &val.points {
        table.push(vec![pt.z.norm(), pt.z.arg(), pt.g_2r, pt.dbar_term, pt.m_term, pt.dbar_ratio, pt.m_ratio]);
    }
    rep.put("symbol", f.label());
    rep.put("validation_radius", rv);
    rep.put("c_pou", pou.c_pou);
    rep.put("multiplicity", val.multiplicity);
    rep.put("bound", val.bound);
    rep.put("max_dbar_ratio", val.max_dbar_ratio);
    rep.put("max_m_ratio", val.max_m_ratio);
    rep.put("max_abs_dbar_term", val.max_abs_dbar);
    rep.put("max_m_term", val.max_m);
    rep.put("reconstruction_error", val.reconstruction_error);
    rep.profile = Some(table);
    rep.check(Check::at_most("dbar_ratio", val.max_dbar_ratio, val.bound));
    rep.check(Check::at_most("m_ratio", val.max_m_ratio, val.bound));
    rep.check(Check::at_most("reconstruction", val.reconstruction_error, 1e-12));
    if s.bool("expect_zero", false)? {
        rep.check(Check::at_most("dbar_term_zero", val.max_abs_dbar, 1e-8));
        rep.check(Check::at_most("m_term_zero", val.max_m, 1e-8));
    }
    Ok(())
}

fn hankel_verify(s: &mut Scenario, rep: &mut ExperimentReport) -> Result<()> {
    let f = s.symbol("zbar")?;
    let omega = s.weight("omega", "power:alpha=0")?;
    let v = s.weight("v", s.raw("omega").unwrap_or("power:alpha=0").to_string().as_str())?;
    let eta = s.weight("eta", s.raw("omega").unwrap_or("power:alpha=0").to_string().as_str())?;
    let p = exponent(s, "p", 2.0)?;
    let q = exponent(s, "q", 2.0)?;
    let r = hyp_radius(s)?;
    let d = s.usize("d", DEFAULT_DEGREE)?;
    let smooth = s.f64("smoothness", 2.0)?;
    rep.put("symbol", f.label());
    rep.put("regime", if p <= q { "p<=q" } else { "q<p" });
    ap_triplet(rep, &omega, &v, &eta, p)?;
    let k = kernel(s, &omega)?;
    let base = DiscRule::unit_default();
    rep.nodes("unit_default", base.len());
    let expect_zero = s.bool("expect_zero", false)?;
    if p <= q {
        hankel_pq(s, rep, (&f, &omega, &v, &eta), (p, q, r, d, smooth), k, &base, expect_zero)
    } else {
        hankel_qp(s, rep, (&f, &omega, &v, &eta), (p, q, r, d, smooth), k, &base, expect_zero)
    }
}

type Weights<'a> = (
    &'a crate::bergman::SymbolField,
    &'a Arc<RadialWeight>,
    &'a Arc<RadialWeight>,
    &'a Arc<RadialWeight>,
);

#[allow(clippy::too_many_arguments)]
fn hankel_pq(
    s: &mut Scenario,
    rep: &mut ExperimentReport,
    (f, _omega, v, eta): Weights<'_>,
    (p, q, r, d, smooth): (f64, f64, f64, usize, f64),
    k: Arc<KernelSeries>,
    base: &DiscRule,
    expect_zero: bool,
) -> Result<()> {
    let r_max = radius_in_unit(s, "r_max", 0.99)?;
    let n_angles = s.usize("grid_angles", 8)?;
    let band = s.f64("band", 50.0)?;
    let grid = profile_grid(r_max, n_angles);

    // (a) criterion
    let crit = criterion_pq(f, v, eta, p, q, r, d, &grid)?;
    // (b) lower norm estimate over lattice atoms and random polynomials
    let lat = lattice(s, rep, r, r_max)?;
    let family = test_family(s, rep, Arc::clone(&k), v, p, &lat)?;
    let member_norms = hankel_family_norms(&family, f, eta, q, base)?;
    let estimate = member_norms.iter().copied().fold(0.0, f64::max);
    // (d) boundary trend of ‖H_f(b_z)‖
    let mut trend_rows = Vec::new();
    for t in profile_radii(r_max) {
        let mut best = 0.0f64;
        for j in 0..n_angles.max(1) {
            let z = Complex64::from_polar(t, TAU * j as f64 / n_angles.max(1) as f64);
            best = best.max(hankel_atom_norm(&k, f, v, p, eta, q, z, base)?);
        }
        trend_rows.push((t, best));
    }
    let atom_trend = Trend::of(&trend_rows.iter().map(|x| x.1).collect::<Vec<_>>());
    // (c) decomposition
    let pou = Arc::new(PartitionOfUnity::new(Arc::clone(&lat), smooth)?);
    let dec = decompose(f, pou, q, d)?;
    let vgrid = crate::carleson::polar_grid(dec.validation_radius(), 5, n_angles);
    let val = dec.validate(&vgrid, 1000, lat.seed)?;

    let mut table = Table::new(&["modulus", "angle", "g", "criterion"]);
    for pt in &crit.profile {
        table.push(vec![pt.z.norm(), pt.z.arg(), pt.g, pt.criterion]);
    }
    rep.profile = Some(table);
    let compact = crit.trend.vanishing && atom_trend.vanishing;
    rep.put("criterion_sup", crit.sup);
    rep.put("criterion_argmax", crit.argmax);
    rep.put("criterion_circle_maxima", &crit.circle_maxima);
    rep.put("criterion_trend", crit.trend);
    rep.put("norm_estimate_lower", estimate);
    rep.put("norm_estimate_members", &member_norms);
    rep.put("atom_norm_profile", &trend_rows);
    rep.put("atom_norm_trend", atom_trend);
    rep.put("compact_signature", compact);
    rep.put("decomposition", serde_json::json!({
        "multiplicity": val.multiplicity,
        "bound": val.bound,
        "max_dbar_ratio": val.max_dbar_ratio,
        "max_m_ratio": val.max_m_ratio,
        "reconstruction_error": val.reconstruction_error,
    }));

    if expect_zero {
        let worst = crit.sup.max(estimate).max(val.max_abs_dbar).max(val.max_m);
        rep.put("max_quantity", worst);
        rep.check(Check::at_most("operator_zero", worst, 1e-6));
        return Ok(());
    }
    let ratio = estimate / crit.sup;
    rep.put("estimate_over_criterion", ratio);
    rep.check(Check::finite("criterion_sup", crit.sup));
    rep.check(Check::band("estimate_vs_criterion", ratio, 1.0 / band, band));
    rep.check(Check::at_most("decomposition_dbar_ratio", val.max_dbar_ratio, val.bound));
    rep.check(Check::at_most("decomposition_m_ratio", val.max_m_ratio, val.bound));
    rep.check(Check::at_most("reconstruction", val.reconstruction_error, 1e-12));
    if let Some(e) = s.opt_bool("expect_compact")? {
        rep.check(Check::flag("compact_signature", compact, e));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn hankel_qp(
    s: &mut Scenario,
    rep: &mut ExperimentReport,
    (f, _omega, v, eta): Weights<'_>,
    (p, q, r, d, smooth): (f64, f64, f64, usize, f64),
    k: Arc<KernelSeries>,
    base: &DiscRule,
    expect_zero: bool,
) -> Result<()> {
    let r_max = radius_in_unit(s, "r_max", 0.95)?;
    let nodes = s.usize("qp_nodes", 24)?;
    let angles = s.usize("qp_angles", 16)?;
    let n_atoms = s.usize("atoms", 30)?;
    let samples = s.usize("samples", 64)?;
    let seed = s.u64("seed", 0)?;

    // (a) criterion
    let rule = DiscRule::truncated(r_max, nodes, angles);
    rep.nodes("criterion_qp", rule.len());
    let crit = criterion_qp(f, v, eta, p, q, r, d, &rule)?;
    // (b) Rademacher lower bound, λ_j = 1 on the first lattice atoms
    let lat = lattice(s, rep, r, r_max)?;
    let atoms: Vec<Complex64> = lat.points.iter().copied().take(n_atoms).collect();
    let lambda = vec![1.0; atoms.len()];
    let rad = rademacher_lower_bound(&k, f, v, eta, (p, q, r), &atoms, &lambda, samples, seed, d, base)?;
    // (c) decomposition norms in L^s_W
    let ww = weight_w(v, eta, p, q)?;
    let pou = Arc::new(PartitionOfUnity::new(Arc::clone(&lat), smooth)?);
    let dec = decompose(f, pou, q, d)?;
    let lw_rule = DiscRule::truncated(dec.validation_radius(), nodes / 2, angles / 2);
    rep.nodes("decomposition_lw", lw_rule.len());
    let lw = dec.lw_norms(&ww, crit.exponent, &lw_rule)?;

    let mut table = Table::new(&["modulus", "angle", "g", "w", "quad_weight"]);
    for n in &crit.nodes {
        table.push(vec![n.z.norm(), n.z.arg(), n.g, n.w, n.quad_weight]);
    }
    rep.profile = Some(table);
    rep.put("criterion_qp", crit.value);
    rep.put("criterion_exponent", crit.exponent);
    rep.put("criterion_degenerate", crit.degenerate);
    rep.put("w_weight", ww.label());
    rep.put("rademacher", serde_json::json!({
        "atoms": atoms.len(),
        "samples": samples,
        "mean": rad.mean,
        "std_err": rad.std_err,
        "lower_sum": rad.lower_sum,
        "ratio": rad.ratio,
        "trivial": rad.trivial,
    }));
    rep.put("decomposition_lw", lw);
    if rad.ratio.is_some() && crit.value > 0.0 {
        rep.put("rademacher_mean_root_over_criterion", rad.mean.powf(1.0 / q) / crit.value);
    }

    if expect_zero {
        let worst = crit.value.max(lw.dbar_norm).max(lw.m_norm).max(rad.mean);
        rep.put("max_quantity", worst);
        rep.check(Check::at_most("operator_zero", worst, 1e-6));
        rep.check(Check::flag("rademacher_trivial", rad.trivial, true));
        return Ok(());
    }
    rep.check(Check::finite("criterion_qp", crit.value));
    rep.check(Check::finite("lw_dbar_norm", lw.dbar_norm));
    rep.check(Check::finite("lw_m_norm", lw.m_norm));
    let min = s.f64("rademacher_min", 0.0)?;
    match rad.ratio {
        Some(x) => rep.check(Check::band("rademacher_ratio", x, min.max(f64::MIN_POSITIVE), f64::INFINITY)),
        None => rep.check(Check::flag("rademacher_nontrivial", false, true)),
    }
    Ok(())
}
