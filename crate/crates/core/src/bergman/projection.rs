use num_complex::Complex64;

use super::{AnalyticPoly, KernelSeries, SymbolField};
use crate::error::{LabError, Result};
use crate::quadrature::DiscRule;

/// Result of projecting a field onto analytic polynomials.
#[derive(Debug, Clone)]
pub struct Projection {
    pub poly: AnalyticPoly,
    /// Set when `d` exceeds what the rule integrates exactly.
    pub warning: Option<String>,
}

/// `P_ω F` truncated at degree `d`: `c_n = κ_n ∫ F(ζ) ζ̄ⁿ ω(|ζ|) dA(ζ)`.
pub fn project<F: Fn(Complex64) -> Complex64>(
    kernel: &KernelSeries,
    f: F,
    d: usize,
    rule: &DiscRule,
) -> Result<Projection> {
    let values: Vec<Complex64> = rule.nodes.iter().map(|&z| f(z)).collect();
    project_values(kernel, &values, d, rule)
}

/// [`project`] from field values already sampled at the rule nodes.
pub fn project_values(
    kernel: &KernelSeries,
    values: &[Complex64],
    d: usize,
    rule: &DiscRule,
) -> Result<Projection> {
    if d > kernel.d_max() {
        return Err(LabError::domain(format!(
            "projection degree {d} exceeds kernel table d_max = {}",
            kernel.d_max()
        )));
    }
    if values.len() != rule.len() {
        return Err(LabError::domain("one field value per rule node is needed"));
    }
    let w = kernel.weight();
    let mut sums = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); d + 1];
    for ((&z, &wt), &v) in rule.nodes.iter().zip(&rule.weights).zip(values) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(LabError::Evaluation {
                node: z,
                what: format!("field value {v}"),
            });
        }
        let mut term = v * (wt * w.eval(z.norm()));
        let zc = z.conj();
        for s in sums.iter_mut() {
            // Neumaier step on both parts
            let t = s.0 + term;
            let corr = |a: f64, b: f64, t: f64| if a.abs() >= b.abs() { (a - t) + b } else { (b - t) + a };
            s.1 += Complex64::new(corr(s.0.re, term.re, t.re), corr(s.0.im, term.im, t.im));
            s.0 = t;
            term *= zc;
        }
    }
    let coeffs = sums
        .into_iter()
        .enumerate()
        .map(|(n, s)| (s.0 + s.1) * kernel.coeff(n))
        .collect();
    let warning = (rule.exact_degree > 0 && 2 * d > rule.exact_degree).then(|| {
        format!(
            "degree {d} needs exactness {} but the rule is exact to {}",
            2 * d,
            rule.exact_degree
        )
    });
    Ok(Projection {
        poly: AnalyticPoly::new(coeffs),
        warning,
    })
}

/// `H_f(g) = fg − P_ω(fg)` with the projection computed by quadrature.
#[derive(Debug, Clone)]
pub struct HankelField {
    pub f: SymbolField,
    pub g: AnalyticPoly,
    pub projection: Projection,
}

impl HankelField {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.f.eval(z) * self.g.eval(z) - self.projection.poly.eval(z)
    }
}

pub fn hankel_apply(
    kernel: &KernelSeries,
    f: &SymbolField,
    g: &AnalyticPoly,
    d: usize,
    rule: &DiscRule,
) -> Result<HankelField> {
    let projection = project(kernel, |z| f.eval(z) * g.eval(z), d, rule)?;
    Ok(HankelField {
        f: f.clone(),
        g: g.clone(),
        projection,
    })
}

/// `H_f(B_a)` for `f = A + conj(F)`, using `P_ω(conj(F)·B_a) = conj(F(a))·B_a`:
/// the value is `(conj(F(z)) − conj(F(a)))·B_a(z)`.
pub fn hankel_on_atom<'k>(
    kernel: &'k KernelSeries,
    f: &SymbolField,
    a: Complex64,
) -> Option<impl Fn(Complex64) -> Result<Complex64> + 'k> {
    let fa = f.antianalytic(a)?.conj();
    let f = f.clone();
    Some(move |z: Complex64| {
        let fz = f.antianalytic(z).expect("harmonic split").conj();
        Ok((fz - fa) * kernel.eval_fast(z, a)?)
    })
}

/// `H_f(g)` for a polynomial `g` and `f = A + conj(F)`, with the projection done in
/// closed form: `P_ω(ζ̄^k ζ^m) = (κ_{m−k}/κ_m) z^{m−k}` for `k <= m`, zero otherwise.
#[derive(Debug, Clone)]
pub struct HankelPoly {
    f: SymbolField,
    g: AnalyticPoly,
    projection: AnalyticPoly,
}

impl HankelPoly {
    pub fn new(kernel: &KernelSeries, f: &SymbolField, g: &AnalyticPoly) -> Option<Self> {
        let gm = g.to_monomial();
        let n = gm.len().saturating_sub(1);
        if n > kernel.d_max() {
            return None;
        }
        let fk = f.antianalytic_taylor(n)?;
        let mut proj = vec![Complex64::new(0.0, 0.0); n + 1];
        for (m, &gm) in gm.iter().enumerate() {
            for (k, fk) in fk.iter().enumerate().take(m + 1) {
                proj[m - k] += fk.conj() * gm * (kernel.coeff(m - k) / kernel.coeff(m));
            }
        }
        Some(HankelPoly {
            f: f.clone(),
            g: g.clone(),
            projection: AnalyticPoly::new(proj),
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let fz = self.f.antianalytic(z).expect("harmonic split").conj();
        fz * self.g.eval(z) - self.projection.eval(z)
    }

    pub fn projection(&self) -> &AnalyticPoly {
        &self.projection
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::RadialWeight;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn kernel(alpha: f64) -> KernelSeries {
        KernelSeries::new(RadialWeight::power(alpha), 400).unwrap()
    }

    #[test]
    fn projection_examples() {
        let k = kernel(0.0);
        let rule = DiscRule::unit_default();
        let p = project(&k, |z| z * z, 6, &rule).unwrap();
        for (n, cn) in p.poly.coeffs.iter().enumerate() {
            let expect = if n == 2 { 1.0 } else { 0.0 };
            assert!((cn - expect).norm() < 1e-10, "n={n} c={cn}");
        }
        let p = project(&kernel(1.5), |z| z.conj(), 8, &rule).unwrap();
        assert!(p.poly.coeffs.iter().all(|c| c.norm() < 1e-12));
        let p = project(&k, |z| c(z.norm_sqr(), 0.0), 4, &rule).unwrap();
        assert!((p.poly.coeffs[0] - 0.5).norm() < 1e-12);
        assert!(p.poly.coeffs[1..].iter().all(|c| c.norm() < 1e-12));
        assert!(p.warning.is_none());
        let coarse = DiscRule::polar(c(0.0, 0.0), 1.0, 4, 8);
        assert!(project(&k, |z| z, 6, &coarse).unwrap().warning.is_some());
    }

    #[test]
    fn hankel_examples() {
        let k = kernel(0.0);
        let rule = DiscRule::unit_default();
        let z0 = c(0.3, -0.2);
        let h = hankel_apply(&k, &SymbolField::zbar(), &AnalyticPoly::monomial(0), 10, &rule).unwrap();
        assert!((h.eval(z0) - z0.conj()).norm() < 1e-10);
        let h = hankel_apply(&k, &SymbolField::zbar(), &AnalyticPoly::monomial(1), 10, &rule).unwrap();
        assert!((h.eval(z0) - (z0.norm_sqr() - 0.5)).norm() < 1e-10);
        let f = SymbolField::poly(AnalyticPoly::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(0.5, 0.0)]));
        let g = AnalyticPoly::new(vec![c(0.0, 1.0), c(-1.0, 0.0)]);
        let h = hankel_apply(&k, &f, &g, 10, &rule).unwrap();
        assert!(h.eval(z0).norm() < 1e-8);
    }

    #[test]
    fn identity_routes_match_quadrature() {
        let k = kernel(1.0);
        let rule = DiscRule::unit_graded(10, 16, 1024);
        let a = c(0.4, 0.3);
        for f in [SymbolField::zbar(), SymbolField::conj_log1mz(), SymbolField::re_z()] {
            // B_a as a truncated polynomial
            let g = AnalyticPoly::new(
                (0..=60)
                    .map(|n| a.conj().powu(n as u32) * k.coeff(n))
                    .collect(),
            );
            let quad = hankel_apply(&k, &f, &g, 60, &rule).unwrap();
            let atom = hankel_on_atom(&k, &f, a).unwrap();
            let poly = HankelPoly::new(&k, &f, &g).unwrap();
            for z in [c(0.1, 0.2), c(-0.5, 0.1), c(0.3, -0.6)] {
                let q = quad.eval(z);
                assert!((q - atom(z).unwrap()).norm() < 1e-6 * (1.0 + q.norm()), "{}", f.label());
                assert!((q - poly.eval(z)).norm() < 1e-6 * (1.0 + q.norm()), "{}", f.label());
            }
        }
    }
}
