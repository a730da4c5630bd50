use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bda::g_value;
use crate::bergman::{hankel_on_atom, kernel_norm_quadrature, lp_norm, HankelPoly, KernelSeries, SymbolField, TestFamily, TestFunction};
use crate::error::{LabError, Result};
use crate::geometry::BergmanDisc;
use crate::quadrature::{neumaier_sum, DiscRule};
use crate::weights::RadialWeight;

fn require_harmonic(f: &SymbolField) -> Result<()> {
    if f.antianalytic(Complex64::new(0.0, 0.0)).is_none() {
        return Err(LabError::precondition(format!(
            "symbol `{}` has no analytic/anti-analytic split; Hankel sweeps need one",
            f.label()
        )));
    }
    Ok(())
}

/// `‖H_f(b_{v,a})‖_{L^q_η}` with `b_{v,a} = B_a/‖B_a‖_{A^p_v}`.
#[allow(clippy::too_many_arguments)]
pub fn hankel_atom_norm(
    kernel: &KernelSeries,
    f: &SymbolField,
    v: &RadialWeight,
    p: f64,
    eta: &RadialWeight,
    q: f64,
    a: Complex64,
    base: &DiscRule,
) -> Result<f64> {
    require_harmonic(f)?;
    let norm = kernel_norm_quadrature(kernel, v, p, a, base)?;
    let h = hankel_on_atom(kernel, f, a).expect("harmonic split checked");
    let rule = DiscRule::mobius_pullback(a, base);
    Ok(lp_norm(&h, &rule, q, eta)? / norm)
}

/// `sup_g ‖H_f(g)‖_{L^q_η}` over a family normalized in `A^p_v` (a lower estimate of
/// the operator norm), with the per-member values.
pub fn hankel_family_norms(
    family: &TestFamily,
    f: &SymbolField,
    eta: &RadialWeight,
    q: f64,
    base: &DiscRule,
) -> Result<Vec<f64>> {
    require_harmonic(f)?;
    let kernel = family.kernel();
    let mut out = Vec::with_capacity(family.len());
    for m in &family.members {
        let val = match m {
            TestFunction::Atom { point, norm } => {
                let h = hankel_on_atom(kernel, f, *point).expect("harmonic split checked");
                let rule = DiscRule::mobius_pullback(*point, base);
                lp_norm(&h, &rule, q, eta)? / norm
            }
            TestFunction::Poly { poly, norm } => {
                let h = HankelPoly::new(kernel, f, poly).ok_or_else(|| {
                    LabError::domain(format!("test polynomial degree exceeds d_max = {}", kernel.d_max()))
                })?;
                lp_norm(|z| Ok(h.eval(z)), base, q, eta)? / norm
            }
        };
        out.push(val);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RademacherBound {
    /// Monte-Carlo mean of `‖H_f(Σ ±λ_j b_{v,a_j})‖^q_{L^q_η}`.
    pub mean: f64,
    pub std_err: f64,
    /// `Σ_k |λ_k|^q G_{q,r}(f)(a_k)^q η(D(a_k,r)) v(D(a_k,r))^{−q/p}`.
    pub lower_sum: f64,
    pub ratio: Option<f64>,
    /// Both sides below `1e−24`.
    pub trivial: bool,
    pub samples: Vec<f64>,
}

/// Sign-randomized lower bound for `H_f: A^p_v → L^q_η`.
#[allow(clippy::too_many_arguments)]
pub fn rademacher_lower_bound(
    kernel: &KernelSeries,
    f: &SymbolField,
    v: &RadialWeight,
    eta: &RadialWeight,
    (p, q, r): (f64, f64, f64),
    atoms: &[Complex64],
    lambda: &[f64],
    n_samples: usize,
    seed: u64,
    d: usize,
    rule: &DiscRule,
) -> Result<RademacherBound> {
    require_harmonic(f)?;
    if atoms.len() != lambda.len() || atoms.is_empty() {
        return Err(LabError::domain("one coefficient per atom is needed"));
    }
    if n_samples < 2 {
        return Err(LabError::domain("at least two sign samples are needed"));
    }
    let base = DiscRule::unit_default();
    // columns λ_j H_f(b_{a_j}) sampled on the rule
    let mut cols = Vec::with_capacity(atoms.len());
    for (&a, &l) in atoms.iter().zip(lambda) {
        let norm = kernel_norm_quadrature(kernel, v, p, a, &base)?;
        let h = hankel_on_atom(kernel, f, a).expect("harmonic split checked");
        let col = rule
            .nodes
            .iter()
            .map(|&z| h(z).map(|x| x * (l / norm)))
            .collect::<Result<Vec<_>>>()?;
        cols.push(col);
    }
    let wts: Vec<f64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(z, w)| w * eta.eval(z.norm()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_samples);
    let mut acc = vec![Complex64::new(0.0, 0.0); rule.len()];
    for _ in 0..n_samples {
        acc.iter_mut().for_each(|x| *x = Complex64::new(0.0, 0.0));
        for col in &cols {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            acc.iter_mut().zip(col).for_each(|(s, c)| *s += c * sign);
        }
        samples.push(neumaier_sum(acc.iter().zip(&wts).map(|(s, w)| w * s.norm().powf(q))));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let mut lower = Vec::with_capacity(atoms.len());
    for (&a, &l) in atoms.iter().zip(lambda) {
        let disc = BergmanDisc::new(a, r)?;
        let g = g_value(f, a, r, q, d)?;
        let em = eta.disc_mass(disc.euclid_center, disc.euclid_radius)?;
        let vm = v.disc_mass(disc.euclid_center, disc.euclid_radius)?;
        lower.push(l.abs().powf(q) * g.powf(q) * em * vm.powf(-q / p));
    }
    let lower_sum = neumaier_sum(lower);
    let trivial = mean < 1e-24 && lower_sum < 1e-24;
    Ok(RademacherBound {
        mean,
        std_err: (var / n).sqrt(),
        lower_sum,
        ratio: (!trivial).then(|| mean / lower_sum),
        trivial,
        samples,
    })
}
