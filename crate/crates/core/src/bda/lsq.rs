use num_complex::Complex64;

use crate::error::{LabError, Result};

/// Coefficients `c` minimizing `Σ w_i |f_i − Σ_k c_k t_i^k|²`, `k ≤ d`.
///
/// Modified Gram–Schmidt, run twice, on the columns `√w_i t_i^k`.
pub(crate) fn weighted_poly_fit(t: &[Complex64], f: &[Complex64], w: &[f64], d: usize) -> Result<Vec<Complex64>> {
    let n = t.len();
    let m = d + 1;
    if n < m {
        return Err(LabError::domain(format!("{n} nodes cannot determine degree {d}")));
    }
    let sw: Vec<f64> = w.iter().map(|x| x.max(0.0).sqrt()).collect();
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut r = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    let mut col: Vec<Complex64> = sw.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    for k in 0..m {
        if k > 0 {
            // next monomial column from the previous raw column
            for (c, &ti) in col.iter_mut().zip(t) {
                *c *= ti;
            }
        }
        let mut v = col.clone();
        for _ in 0..2 {
            for (j, qj) in q.iter().enumerate() {
                let proj: Complex64 = qj.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                r[j][k] += proj;
                v.iter_mut().zip(qj).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let col_norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-13 * col_norm) {
            return Err(LabError::domain(format!(
                "degree {d} basis is numerically rank deficient on the rule"
            )));
        }
        r[k][k] = Complex64::new(norm, 0.0);
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    let rhs: Vec<Complex64> = (0..m)
        .map(|j| q[j].iter().zip(f).zip(&sw).map(|((a, &b), &s)| a.conj() * b * s).sum())
        .collect();
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    for k in (0..m).rev() {
        let mut acc = rhs[k];
        for j in k + 1..m {
            acc -= r[k][j] * c[j];
        }
        c[k] = acc / r[k][k];
    }
    Ok(c)
}
