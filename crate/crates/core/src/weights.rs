//! Radial weights on the unit disc: evaluation, tails, moments, class tests and
//! the two-weight constants.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::quadrature::{adaptive, boundary_integral, Tolerance};

/// Default absolute tolerance for tails and moments.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Deepest dyadic level used by grid tests, `r = 1 - 2^-24`.
pub const MAX_GRID_DEPTH: usize = 24;
/// Ratios outside `[1/BAND, BAND]` count as unbounded on the finite grid.
pub const BAND_THRESHOLD: f64 = 1e3;
/// Smallest grid infimum accepted as evidence of the reverse doubling property.
pub const DCHECK_MARGIN: f64 = 1.01;

#[derive(Debug, Clone)]
pub enum WeightFamily {
    /// `(1 + α)(1 − r²)^α`, normalized so that `power(0) ≡ 1`.
    Power { alpha: f64 },
    /// `(1 − r²)^α (log(e/(1 − r)))^γ`.
    PowerLog { alpha: f64, gamma: f64 },
    /// `exp(−c/(1 − r))`.
    Exponential { c: f64 },
    /// Piecewise-linear interpolation of sampled `(r, ω)` pairs, constant past the last sample.
    Table { r: Vec<f64>, w: Vec<f64> },
    /// Pointwise product `Π ω_i^{e_i}`.
    Composite { factors: Vec<(Arc<RadialWeight>, f64)> },
}

pub struct RadialWeight {
    family: WeightFamily,
    label: String,
    tol: f64,
    tails: RwLock<HashMap<u64, f64>>,
    moments: RwLock<HashMap<u64, f64>>,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialWeight")
            .field("label", &self.label)
            .field("tol", &self.tol)
            .finish()
    }
}

impl RadialWeight {
    fn from_family(family: WeightFamily, label: String) -> Arc<Self> {
        Arc::new(RadialWeight {
            family,
            label,
            tol: DEFAULT_TOL,
            tails: RwLock::new(HashMap::new()),
            moments: RwLock::new(HashMap::new()),
        })
    }

    pub fn power(alpha: f64) -> Arc<Self> {
        assert!(alpha > -1.0, "power weight needs alpha > -1");
        Self::from_family(WeightFamily::Power { alpha }, format!("power:alpha={alpha}"))
    }

    pub fn power_log(alpha: f64, gamma: f64) -> Arc<Self> {
        assert!(alpha > -1.0, "power-log weight needs alpha > -1");
        Self::from_family(
            WeightFamily::PowerLog { alpha, gamma },
            format!("powerlog:alpha={alpha},gamma={gamma}"),
        )
    }

    pub fn exponential(c: f64) -> Arc<Self> {
        assert!(c > 0.0, "exponential weight needs c > 0");
        Self::from_family(WeightFamily::Exponential { c }, format!("exp:c={c}"))
    }

    /// Table weight from samples; `r` strictly increasing in `[0, 1)`, values nonnegative.
    pub fn table(r: Vec<f64>, w: Vec<f64>, label: impl Into<String>) -> Result<Arc<Self>> {
        if r.is_empty() || r.len() != w.len() {
            return Err(LabError::domain("weight table needs matching nonempty columns"));
        }
        if r.windows(2).any(|p| p[1] <= p[0]) || r[0] < 0.0 || *r.last().unwrap() >= 1.0 {
            return Err(LabError::domain(
                "weight table radii must increase strictly within [0, 1)",
            ));
        }
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(LabError::domain("weight table values must be finite and >= 0"));
        }
        Ok(Self::from_family(WeightFamily::Table { r, w }, label.into()))
    }

    /// Product of powers of weights.
    pub fn composite(factors: Vec<(Arc<RadialWeight>, f64)>) -> Arc<Self> {
        let label = factors
            .iter()
            .map(|(w, e)| format!("({})^{e}", w.label))
            .collect::<Vec<_>>()
            .join("*");
        Self::from_family(WeightFamily::Composite { factors }, label)
    }

    /// Parse the config grammar, e.g. `power:alpha=1` or `table:path=w.csv`.
    pub fn parse(spec: &str, base_dir: Option<&Path>) -> Result<Arc<Self>> {
        let spec = spec.trim();
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let params = parse_params(args)?;
        let get = |key: &str| -> Result<f64> {
            let raw = params
                .get(key)
                .ok_or_else(|| LabError::Parse(format!("weight `{spec}` is missing `{key}`")))?;
            raw.parse::<f64>()
                .map_err(|_| LabError::Parse(format!("weight `{spec}`: bad number `{raw}`")))
        };
        let w = match name {
            "power" => {
                let alpha = get("alpha")?;
                if alpha <= -1.0 {
                    return Err(LabError::Parse(format!("weight `{spec}`: alpha must exceed -1")));
                }
                Self::power(alpha)
            }
            "powerlog" => {
                let alpha = get("alpha")?;
                if alpha <= -1.0 {
                    return Err(LabError::Parse(format!("weight `{spec}`: alpha must exceed -1")));
                }
                Self::power_log(alpha, get("gamma")?)
            }
            "exp" => {
                let c = get("c")?;
                if c <= 0.0 {
                    return Err(LabError::Parse(format!("weight `{spec}`: c must be positive")));
                }
                Self::exponential(c)
            }
            "table" => {
                let raw = params
                    .get("path")
                    .ok_or_else(|| LabError::Parse(format!("weight `{spec}` is missing `path`")))?;
                let path = match base_dir {
                    Some(dir) => dir.join(raw),
                    None => raw.into(),
                };
                let (r, w) = read_table(&path)?;
                return Self::table(r, w, spec.to_string());
            }
            other => {
                return Err(LabError::Parse(format!("unknown weight family `{other}`")));
            }
        };
        Ok(w)
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// ω(r) for `0 <= r < 1`.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.family {
            WeightFamily::Table { r: rs, w } => table_interp(rs, w, r),
            _ => self.eval_gap(1.0 - r),
        }
    }

    /// ω evaluated at `r = 1 − δ`; accurate for tiny gaps.
    pub fn eval_gap(&self, delta: f64) -> f64 {
        let one_minus_r2 = delta * (2.0 - delta);
        match &self.family {
            WeightFamily::Power { alpha } => {
                if *alpha == 0.0 {
                    1.0
                } else {
                    (1.0 + alpha) * one_minus_r2.powf(*alpha)
                }
            }
            WeightFamily::PowerLog { alpha, gamma } => {
                one_minus_r2.powf(*alpha) * (1.0 - delta.ln()).powf(*gamma)
            }
            WeightFamily::Exponential { c } => (-c / delta).exp(),
            WeightFamily::Table { r, w } => table_interp(r, w, 1.0 - delta),
            WeightFamily::Composite { .. } => self.log_eval_gap(delta).exp(),
        }
    }

    /// `ln ω(1 − δ)`; products of large powers stay finite in log space.
    fn log_eval_gap(&self, delta: f64) -> f64 {
        let one_minus_r2 = delta * (2.0 - delta);
        match &self.family {
            WeightFamily::Power { alpha } if *alpha != 0.0 => (1.0 + alpha).ln() + alpha * one_minus_r2.ln(),
            WeightFamily::PowerLog { alpha, gamma } => {
                alpha * one_minus_r2.ln() + gamma * (1.0 - delta.ln()).ln()
            }
            WeightFamily::Exponential { c } => -c / delta,
            WeightFamily::Composite { factors } => factors
                .iter()
                .filter(|(_, e)| *e != 0.0)
                .map(|(w, e)| e * w.log_eval_gap(delta))
                .sum(),
            _ => self.eval_gap(delta).ln(),
        }
    }

    /// Tail `ω̂(r) = ∫_r^1 ω(s) ds`.
    pub fn tail(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(LabError::domain(format!("tail needs 0 <= r < 1, got {r}")));
        }
        let key = r.to_bits();
        if let Some(v) = self.tails.read().expect("tail cache").get(&key) {
            return Ok(*v);
        }
        let est = boundary_integral(|d| self.eval_gap(d), r, Tolerance::relative(1e-12))?;
        if est.error > self.tol.max(64.0 * f64::EPSILON * est.value.abs()) {
            return Err(LabError::Tolerance {
                what: format!("tail of {} at r = {r}", self.label),
                estimate: est.value,
                error: est.error,
            });
        }
        self.tails.write().expect("tail cache").insert(key, est.value);
        Ok(est.value)
    }

    /// Moment `∫_0^1 s^x ω(s) ds`, `x > −1`.
    pub fn moment(&self, x: f64) -> Result<f64> {
        if x <= -1.0 || x.is_nan() {
            return Err(LabError::domain(format!(
                "moment exponent must exceed -1, got {x}"
            )));
        }
        let key = x.to_bits();
        if let Some(v) = self.moments.read().expect("moment cache").get(&key) {
            return Ok(*v);
        }
        let tol = Tolerance::relative(1e-13);
        let inner = adaptive(|s| s.powf(x) * self.eval(s), 0.0, 0.5, tol)?;
        let outer = boundary_integral(|d| (1.0 - d).powf(x) * self.eval_gap(d), 0.5, tol)?;
        let value = inner.value + outer.value;
        let error = inner.error + outer.error;
        if error > self.tol.max(64.0 * f64::EPSILON * value.abs()) {
            return Err(LabError::Tolerance {
                what: format!("moment {x} of {}", self.label),
                estimate: value,
                error,
            });
        }
        self.moments.write().expect("moment cache").insert(key, value);
        Ok(value)
    }

    /// Mass `∫_{|w−c|<R} ω(|w|) dA(w)` of a Euclidean disc inside the unit disc.
    pub fn disc_mass(&self, c: num_complex::Complex64, radius: f64) -> Result<f64> {
        self.disc_mass_within(c, radius, 1.0)
    }

    /// Mass of the part of the Euclidean disc `|w − c| < R` lying in `|w| < s_max`.
    pub fn disc_mass_within(&self, c: num_complex::Complex64, radius: f64, s_max: f64) -> Result<f64> {
        let m = c.norm();
        if m + radius > 1.0 + 1e-15 || radius <= 0.0 {
            return Err(LabError::domain(format!(
                "disc (|c| = {m}, R = {radius}) must lie inside the unit disc"
            )));
        }
        let arc = |s: f64| -> f64 {
            if s <= radius - m {
                std::f64::consts::TAU
            } else if m == 0.0 {
                0.0
            } else {
                let cos = ((s * s + m * m - radius * radius) / (2.0 * s * m)).clamp(-1.0, 1.0);
                2.0 * cos.acos()
            }
        };
        let lo = (m - radius).max(0.0);
        let hi = (m + radius).min(1.0).min(s_max);
        if hi <= lo {
            return Ok(0.0);
        }
        let integrand = |s: f64| self.eval(s) * s * arc(s) / std::f64::consts::PI;
        let tol = Tolerance::relative(1e-11);
        let mut total = 0.0;
        // split at the kink where the circle stops being fully inside
        let kink = radius - m;
        if kink > lo && kink < hi {
            total += adaptive(integrand, lo, kink, tol)?.value;
            total += adaptive(integrand, kink, hi, tol)?.value;
        } else {
            total += adaptive(integrand, lo, hi, tol)?.value;
        }
        Ok(total)
    }
}

fn parse_params(args: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| LabError::Parse(format!("expected key=value, got `{part}`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut r = Vec::new();
    let mut w = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let parsed: Option<(f64, f64)> = match (rec.get(0), rec.get(1)) {
            (Some(a), Some(b)) => a.parse().ok().zip(b.parse().ok()),
            _ => None,
        };
        match parsed {
            Some((a, b)) => {
                r.push(a);
                w.push(b);
            }
            None if i == 0 => continue,
            None => {
                return Err(LabError::Parse(format!(
                    "{}: row {} is not an `r,w` pair",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok((r, w))
}

fn table_interp(rs: &[f64], ws: &[f64], r: f64) -> f64 {
    if r <= rs[0] {
        return ws[0];
    }
    let last = rs.len() - 1;
    if r >= rs[last] {
        return ws[last];
    }
    let i = rs.partition_point(|&x| x <= r) - 1;
    let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
    ws[i] + t * (ws[i + 1] - ws[i])
}

/// The dyadic grid `r_k = 1 − 2^{−k}`, `k = 1..=depth`.
pub fn dyadic_grid(depth: usize) -> Vec<f64> {
    (1..=depth).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightClassReport {
    pub in_dhat: bool,
    /// Grid sup of `ω̂(r)/ω̂((1+r)/2)`.
    pub dhat_constant: f64,
    pub in_dcheck: bool,
    /// Grid inf of `ω̂(r)/ω̂(1 − (1−r)/K)` for the `K` that worked (or the larger one).
    pub dcheck_constant: f64,
    pub dcheck_k: f64,
    pub in_r: bool,
    /// Inf and sup of `ω̂(r)/(ω(r)(1−r))` on the grid.
    pub r_band: (f64, f64),
    pub beta: f64,
    pub beta_residual: f64,
    /// Band constant `c` for `ω̂(r)/(((1−r)/(1−t))^β ω̂(t)) ∈ [1/c, c]`.
    pub beta_band: f64,
    pub depth_used: usize,
    pub reduced_confidence: bool,
}

/// Decide class membership on the dyadic grid `r_k = 1 − 2^{−k}`.
pub fn classify(w: &RadialWeight, grid_depth: usize) -> Result<WeightClassReport> {
    if grid_depth < 8 {
        return Err(LabError::domain("classify needs grid_depth >= 8"));
    }
    let requested = grid_depth.min(MAX_GRID_DEPTH);
    let mut reduced_confidence = grid_depth > MAX_GRID_DEPTH;
    // two extra levels so K = 4 ratios exist at every grid point
    let mut tails = Vec::with_capacity(requested + 2);
    for (k, r) in dyadic_grid(requested + 2).into_iter().enumerate() {
        let t = w.tail(r)?;
        if !(t > f64::MIN_POSITIVE * 1e3) {
            reduced_confidence = true;
            let _ = k;
            break;
        }
        tails.push((r, t));
    }
    let depth = tails.len().saturating_sub(2);
    if depth < 2 {
        return Ok(WeightClassReport {
            in_dhat: false,
            dhat_constant: f64::INFINITY,
            in_dcheck: false,
            dcheck_constant: f64::NAN,
            dcheck_k: 2.0,
            in_r: false,
            r_band: (f64::NAN, f64::NAN),
            beta: f64::NAN,
            beta_residual: f64::NAN,
            beta_band: f64::NAN,
            depth_used: depth,
            reduced_confidence: true,
        });
    }

    let dhat_constant = (0..depth)
        .map(|k| tails[k].1 / tails[k + 1].1)
        .fold(0.0f64, f64::max);
    let in_dhat = dhat_constant <= BAND_THRESHOLD;

    let inf_ratio = |step: usize| {
        (0..depth)
            .map(|k| tails[k].1 / tails[k + step].1)
            .fold(f64::INFINITY, f64::min)
    };
    let c2 = inf_ratio(1);
    let c4 = inf_ratio(2);
    let (dcheck_constant, dcheck_k) = if c2 > DCHECK_MARGIN { (c2, 2.0) } else { (c4, 4.0) };
    let in_dcheck = dcheck_constant > DCHECK_MARGIN;

    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &(r, t) in &tails[..depth] {
        let denom = w.eval(r) * (1.0 - r);
        let ratio = if denom > 0.0 { t / denom } else { f64::INFINITY };
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    let band_ok = lo >= 1.0 / BAND_THRESHOLD && hi <= BAND_THRESHOLD && hi / lo <= BAND_THRESHOLD;
    let in_r = band_ok && in_dhat && in_dcheck;

    let xs: Vec<f64> = tails[..depth].iter().map(|(r, _)| (1.0 - r).ln()).collect();
    let ys: Vec<f64> = tails[..depth].iter().map(|(_, t)| t.ln()).collect();
    let (beta, intercept) = least_squares(&xs, &ys);
    let beta_residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - beta * x - intercept).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();

    let mut beta_band = 1.0f64;
    for i in 0..depth {
        for j in i..depth {
            let (r, tr) = tails[i];
            let (t, tt) = tails[j];
            let v = tr / (((1.0 - r) / (1.0 - t)).powf(beta) * tt);
            beta_band = beta_band.max(v).max(1.0 / v);
        }
    }

    Ok(WeightClassReport {
        in_dhat,
        dhat_constant,
        in_dcheck,
        dcheck_constant,
        dcheck_k,
        in_r,
        r_band: (lo, hi),
        beta,
        beta_residual,
        beta_band,
        depth_used: depth,
        reduced_confidence,
    })
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Serialize)]
pub struct ApConstant {
    /// Grid sup, or `+∞` when σ is not integrable.
    pub value: f64,
    pub argmax_r: f64,
    pub diagnostic: Option<String>,
}

/// The auxiliary weight `σ = (ω / v^{1/p})^{p′}`.
pub fn sigma_weight(omega: &Arc<RadialWeight>, v: &Arc<RadialWeight>, p: f64) -> Arc<RadialWeight> {
    let pp = conjugate(p);
    RadialWeight::composite(vec![(Arc::clone(omega), pp), (Arc::clone(v), -pp / p)])
}

/// Conjugate exponent `p′ = p/(p−1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Two-weight constant `sup_r v̂(r)^{1/p} σ̂(r)^{1/p′} / ω̂(r)` over `{0} ∪` the dyadic grid.
pub fn ap_constant(omega: &Arc<RadialWeight>, v: &Arc<RadialWeight>, p: f64) -> Result<ApConstant> {
    if !(p > 1.0) {
        return Err(LabError::domain(format!("ap_constant needs p > 1, got {p}")));
    }
    let pp = conjugate(p);
    let sigma = sigma_weight(omega, v, p);
    match sigma.tail(0.0) {
        Ok(s) if s.is_finite() => {}
        Ok(_) | Err(LabError::Divergent(_)) => {
            return Ok(ApConstant {
                value: f64::INFINITY,
                argmax_r: 0.0,
                diagnostic: Some(format!("sigma = {} is not integrable", sigma.label())),
            })
        }
        Err(e) => return Err(e),
    }
    let mut best = (0.0f64, 0.0f64);
    let grid = std::iter::once(0.0).chain(dyadic_grid(MAX_GRID_DEPTH));
    for r in grid {
        let (vt, st, wt) = (v.tail(r)?, sigma.tail(r)?, omega.tail(r)?);
        if wt <= 0.0 {
            break;
        }
        let val = vt.powf(1.0 / p) * st.powf(1.0 / pp) / wt;
        if val > best.0 {
            best = (val, r);
        }
    }
    Ok(ApConstant {
        value: best.0,
        argmax_r: best.1,
        diagnostic: None,
    })
}

/// Mixed weight `W = η^{p/(p−q)} v^{−q/(p−q)}` for `1 < q < p`.
pub fn weight_w(
    v: &Arc<RadialWeight>,
    eta: &Arc<RadialWeight>,
    p: f64,
    q: f64,
) -> Result<Arc<RadialWeight>> {
    if !(q > 1.0 && q < p) {
        return Err(LabError::domain(format!("weight_W needs 1 < q < p, got p={p}, q={q}")));
    }
    let samples = (0..100)
        .map(|i| i as f64 / 100.0)
        .chain(dyadic_grid(MAX_GRID_DEPTH));
    for r in samples {
        if !(v.eval(r) > 0.0) {
            return Err(LabError::domain(format!(
                "weight v = {} vanishes at r = {r}",
                v.label()
            )));
        }
    }
    let gap = p - q;
    Ok(RadialWeight::composite(vec![
        (Arc::clone(eta), p / gap),
        (Arc::clone(v), -q / gap),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_examples() {
        assert!((RadialWeight::power(0.0).tail(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!((RadialWeight::power(1.0).tail(0.0).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!(RadialWeight::power(0.0).tail(1.0).is_err());
        assert!(RadialWeight::power(0.0).tail(-0.1).is_err());
    }

    #[test]
    fn moment_examples() {
        let w0 = RadialWeight::power(0.0);
        assert!((w0.moment(1.0).unwrap() - 0.5).abs() < 1e-13);
        for n in 0..=5 {
            let x = 2.0 * n as f64 + 1.0;
            assert!((w0.moment(x).unwrap() - 1.0 / (2.0 * n as f64 + 2.0)).abs() < 1e-13);
        }
        assert!((RadialWeight::power(1.0).moment(1.0).unwrap() - 0.5).abs() < 1e-13);
        assert!(w0.moment(-1.0).is_err());
        assert!((w0.moment(-0.5).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn exponential_tail_is_tiny_but_positive() {
        let w = RadialWeight::exponential(1.0);
        let t = w.tail(0.9).unwrap();
        assert!(t > 0.0 && t < 1e-5);
    }

    #[test]
    fn classify_power_zero() {
        let rep = classify(&RadialWeight::power(0.0), 16).unwrap();
        assert!(rep.in_dhat && rep.in_r && rep.in_dcheck);
        assert!((rep.dhat_constant - 2.0).abs() < 1e-9);
        assert!((rep.beta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classify_rejects_exponential() {
        let rep = classify(&RadialWeight::exponential(1.0), 24).unwrap();
        assert!(!rep.in_dhat);
        assert!(!rep.in_r);
    }

    #[test]
    fn classify_needs_depth() {
        assert!(classify(&RadialWeight::power(0.0), 4).is_err());
    }

    #[test]
    fn ap_constant_examples() {
        let w0 = RadialWeight::power(0.0);
        assert!((ap_constant(&w0, &w0, 3.0).unwrap().value - 1.0).abs() < 1e-9);
        let w1 = RadialWeight::power(1.0);
        let a = ap_constant(&w1, &w0, 2.0).unwrap();
        assert!(a.value.is_finite() && a.value > 0.0);
        // σ = ω^{p'} v^{-p'/p} with v = (1−r²)^{-1.5}·const is not integrable for p = 2
        let v = RadialWeight::power(2.0);
        let a = ap_constant(&w0, &v, 2.0).unwrap();
        assert!(a.value.is_infinite());
        assert!(a.diagnostic.is_some());
    }

    #[test]
    fn weight_w_example() {
        let eta = RadialWeight::power(0.0);
        let v = RadialWeight::power(1.0);
        let w = weight_w(&v, &eta, 3.0, 2.0).unwrap();
        for r in [0.0f64, 0.3, 0.7, 0.99] {
            let expect = (2.0 * (1.0 - r * r)).powi(-2);
            assert!((w.eval(r) - expect).abs() <= 1e-12 * expect);
        }
        assert!(weight_w(&v, &eta, 2.0, 3.0).is_err());
    }

    #[test]
    fn disc_mass_matches_area() {
        let w0 = RadialWeight::power(0.0);
        let c = num_complex::Complex64::new(0.3, -0.2);
        let m = w0.disc_mass(c, 0.4).unwrap();
        assert!((m - 0.16).abs() < 1e-10);
        let m = w0.disc_mass(num_complex::Complex64::new(0.0, 0.0), 0.5).unwrap();
        assert!((m - 0.25).abs() < 1e-12);
    }

    #[test]
    fn parse_grammar() {
        let w = RadialWeight::parse("powerlog:alpha=1.0,gamma=0.5", None).unwrap();
        let r: f64 = 0.4;
        let expect = (1.0 - r * r) * (1.0f64 - (1.0 - r).ln()).sqrt();
        assert!((w.eval(r) - expect).abs() < 1e-14);
        assert!(RadialWeight::parse("power:beta=1", None).is_err());
        assert!(RadialWeight::parse("banana", None).is_err());
        assert!((RadialWeight::parse("exp:c=2", None).unwrap().eval(0.5) - (-4.0f64).exp()).abs() < 1e-15);
    }
}
