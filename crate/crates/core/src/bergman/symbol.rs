use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::AnalyticPoly;
use crate::error::{LabError, Result};

type Field = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Analytic,
    /// `A + conj(F)` with `A`, `F` analytic.
    Harmonic,
    Smooth,
    Sampled,
}

#[derive(Clone)]
enum Kind {
    Zbar,
    ConjLog1mz,
    ReZ,
    BlochLacunary(u32),
    Poly(AnalyticPoly),
    Table(Arc<PolarTable>),
    Custom {
        f: Field,
        dbar: Option<Field>,
        smoothness: Smoothness,
    },
    Scaled(Box<SymbolField>, Complex64),
}

/// A symbol `f` on the disc with an optional closed-form `∂̄f`.
#[derive(Clone)]
pub struct SymbolField {
    kind: Kind,
    label: String,
}

impl fmt::Debug for SymbolField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolField({})", self.label)
    }
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl SymbolField {
    pub fn zbar() -> Self {
        SymbolField {
            kind: Kind::Zbar,
            label: "zbar".into(),
        }
    }

    /// `conj(log(1 − z))`: bounded distance to analytic, not vanishing at the boundary.
    pub fn conj_log1mz() -> Self {
        SymbolField {
            kind: Kind::ConjLog1mz,
            label: "conj_log1mz".into(),
        }
    }

    pub fn re_z() -> Self {
        SymbolField {
            kind: Kind::ReZ,
            label: "re_z".into(),
        }
    }

    /// `conj(Σ_{k<n} z^{2^k})`.
    pub fn bloch_lacunary(n: u32) -> Self {
        SymbolField {
            kind: Kind::BlochLacunary(n),
            label: format!("bloch_lacunary:n={n}"),
        }
    }

    pub fn poly(p: AnalyticPoly) -> Self {
        SymbolField {
            label: format!("poly(degree {})", p.degree()),
            kind: Kind::Poly(p),
        }
    }

    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        dbar: Option<Field>,
        smoothness: Smoothness,
    ) -> Self {
        SymbolField {
            kind: Kind::Custom {
                f: Arc::new(f),
                dbar,
                smoothness,
            },
            label: label.into(),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        SymbolField {
            label: format!("({c})*{}", self.label),
            kind: Kind::Scaled(Box::new(self.clone()), c),
        }
    }

    pub fn table(table: PolarTable, label: impl Into<String>) -> Self {
        SymbolField {
            kind: Kind::Table(Arc::new(table)),
            label: label.into(),
        }
    }

    /// Parse the config grammar: `zbar`, `conj_log1mz`, `re_z`, `bloch_lacunary:n=5`,
    /// `table:path=f.csv`, `poly:c=1;0;0.5` (optional `ci=` imaginary parts).
    pub fn parse(spec: &str, base_dir: Option<&Path>) -> Result<Self> {
        let spec = spec.trim();
        let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
        let mut params = std::collections::HashMap::new();
        for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| LabError::Parse(format!("symbol `{spec}`: expected key=value")))?;
            params.insert(k.trim(), v.trim());
        }
        match name {
            "zbar" => Ok(Self::zbar()),
            "conj_log1mz" => Ok(Self::conj_log1mz()),
            "re_z" => Ok(Self::re_z()),
            "bloch_lacunary" => {
                let n: u32 = params
                    .get("n")
                    .ok_or_else(|| LabError::Parse(format!("symbol `{spec}` is missing `n`")))?
                    .parse()
                    .map_err(|_| LabError::Parse(format!("symbol `{spec}`: bad `n`")))?;
                if n == 0 || n > 20 {
                    return Err(LabError::Parse(format!("symbol `{spec}`: n must be in 1..=20")));
                }
                Ok(Self::bloch_lacunary(n))
            }
            "poly" => {
                let list = |key: &str| -> Result<Vec<f64>> {
                    params.get(key).map_or(Ok(vec![]), |s| {
                        s.split(';')
                            .map(|x| {
                                x.trim().parse::<f64>().map_err(|_| {
                                    LabError::Parse(format!("symbol `{spec}`: bad coefficient `{x}`"))
                                })
                            })
                            .collect()
                    })
                };
                let re = list("c")?;
                let im = list("ci")?;
                let n = re.len().max(im.len());
                if n == 0 {
                    return Err(LabError::Parse(format!("symbol `{spec}` has no coefficients")));
                }
                let coeffs = (0..n)
                    .map(|k| {
                        Complex64::new(
                            re.get(k).copied().unwrap_or(0.0),
                            im.get(k).copied().unwrap_or(0.0),
                        )
                    })
                    .collect();
                let mut s = Self::poly(AnalyticPoly::new(coeffs));
                s.label = spec.to_string();
                Ok(s)
            }
            "table" => {
                let raw = params
                    .get("path")
                    .ok_or_else(|| LabError::Parse(format!("symbol `{spec}` is missing `path`")))?;
                let path = match base_dir {
                    Some(d) => d.join(raw),
                    None => raw.into(),
                };
                Ok(Self::table(PolarTable::read_csv(&path)?, spec))
            }
            other => Err(LabError::Parse(format!("unknown symbol `{other}`"))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.kind {
            Kind::Zbar => z.conj(),
            Kind::ConjLog1mz => (one() - z).ln().conj(),
            Kind::ReZ => Complex64::new(z.re, 0.0),
            Kind::BlochLacunary(n) => lacunary(*n, z).conj(),
            Kind::Poly(p) => p.eval(z),
            Kind::Table(t) => t.eval(z),
            Kind::Custom { f, .. } => f(z),
            Kind::Scaled(s, c) => s.eval(z) * c,
        }
    }

    /// `∂̄f(z)` with `∂̄ = ½(∂_x + i∂_y)`, when available in closed form.
    pub fn dbar(&self, z: Complex64) -> Option<Complex64> {
        match &self.kind {
            Kind::Zbar => Some(one()),
            // ∂̄ conj(g) = conj(g′)
            Kind::ConjLog1mz => Some((-one() / (one() - z)).conj()),
            Kind::ReZ => Some(Complex64::new(0.5, 0.0)),
            Kind::BlochLacunary(n) => Some(lacunary_derivative(*n, z).conj()),
            Kind::Poly(_) => Some(Complex64::new(0.0, 0.0)),
            Kind::Table(_) => None,
            Kind::Custom { dbar, .. } => dbar.as_ref().map(|d| d(z)),
            Kind::Scaled(s, c) => s.dbar(z).map(|v| v * c),
        }
    }

    pub fn has_dbar(&self) -> bool {
        self.dbar(Complex64::new(0.0, 0.0)).is_some()
    }

    pub fn smoothness(&self) -> Smoothness {
        match &self.kind {
            Kind::Poly(_) => Smoothness::Analytic,
            Kind::Zbar | Kind::ConjLog1mz | Kind::ReZ | Kind::BlochLacunary(_) => {
                Smoothness::Harmonic
            }
            Kind::Table(_) => Smoothness::Sampled,
            Kind::Custom { smoothness, .. } => *smoothness,
            Kind::Scaled(s, _) => s.smoothness(),
        }
    }

    /// For `f = A + conj(F)` with `A`, `F` analytic: the value `F(z)`.
    pub fn antianalytic(&self, z: Complex64) -> Option<Complex64> {
        match &self.kind {
            Kind::Zbar => Some(z),
            Kind::ConjLog1mz => Some((one() - z).ln()),
            Kind::ReZ => Some(0.5 * z),
            Kind::BlochLacunary(n) => Some(lacunary(*n, z)),
            Kind::Poly(_) => Some(Complex64::new(0.0, 0.0)),
            Kind::Scaled(s, c) => s.antianalytic(z).map(|v| v * c.conj()),
            _ => None,
        }
    }

    /// Taylor coefficients `F_0..F_n` of the anti-analytic part.
    pub fn antianalytic_taylor(&self, n: usize) -> Option<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        let mut out = vec![zero; n + 1];
        match &self.kind {
            Kind::Zbar => {
                if n >= 1 {
                    out[1] = one();
                }
            }
            Kind::ConjLog1mz => {
                for (k, c) in out.iter_mut().enumerate().skip(1) {
                    *c = Complex64::new(-1.0 / k as f64, 0.0);
                }
            }
            Kind::ReZ => {
                if n >= 1 {
                    out[1] = Complex64::new(0.5, 0.0);
                }
            }
            Kind::BlochLacunary(m) => {
                for k in 0..*m {
                    let d = 1usize << k;
                    if d <= n {
                        out[d] += one();
                    }
                }
            }
            Kind::Poly(_) => {}
            Kind::Scaled(s, c) => {
                return s
                    .antianalytic_taylor(n)
                    .map(|v| v.into_iter().map(|x| x * c.conj()).collect())
            }
            _ => return None,
        }
        Some(out)
    }

    /// True when `f` is an analytic polynomial.
    pub fn as_poly(&self) -> Option<&AnalyticPoly> {
        match &self.kind {
            Kind::Poly(p) => Some(p),
            _ => None,
        }
    }
}

fn lacunary(n: u32, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut p = z;
    for _ in 0..n {
        acc += p;
        p = p * p;
    }
    acc
}

fn lacunary_derivative(n: u32, z: Complex64) -> Complex64 {
    (0..n)
        .map(|k| {
            let d = 1u32 << k;
            z.powu(d - 1) * d as f64
        })
        .sum()
}

/// Complex samples on a tensor polar grid with bilinear interpolation (periodic in θ).
#[derive(Debug, Clone)]
pub struct PolarTable {
    rs: Vec<f64>,
    thetas: Vec<f64>,
    values: Vec<Complex64>,
}

impl PolarTable {
    pub fn new(rs: Vec<f64>, thetas: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if rs.is_empty() || thetas.is_empty() || values.len() != rs.len() * thetas.len() {
            return Err(LabError::Parse("polar table must be a full r × θ grid".into()));
        }
        if rs.windows(2).any(|w| w[1] <= w[0]) || thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::Parse("polar table axes must increase".into()));
        }
        Ok(PolarTable { rs, thetas, values })
    }

    /// CSV with columns `r,theta,re,im` covering a full tensor grid.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| LabError::Parse(format!("{}: bad row {rec:?}", path.display())))?;
            if nums.len() < 4 {
                return Err(LabError::Parse(format!("{}: rows need r,theta,re,im", path.display())));
            }
            rows.push((nums[0], nums[1].rem_euclid(std::f64::consts::TAU), Complex64::new(nums[2], nums[3])));
        }
        let mut rs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ts: Vec<f64> = rows.iter().map(|r| r.1).collect();
        rs.sort_by(f64::total_cmp);
        rs.dedup();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let mut values = vec![Complex64::new(f64::NAN, 0.0); rs.len() * ts.len()];
        for (r, t, v) in rows {
            let i = rs.partition_point(|&x| x < r);
            let j = ts.partition_point(|&x| x < t);
            values[i * ts.len() + j] = v;
        }
        if values.iter().any(|v| v.re.is_nan()) {
            return Err(LabError::Parse(format!("{}: grid is incomplete", path.display())));
        }
        PolarTable::new(rs, ts, values)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm().clamp(self.rs[0], *self.rs.last().unwrap());
        let nt = self.thetas.len();
        let i = (self.rs.partition_point(|&x| x <= r).max(1) - 1).min(self.rs.len().saturating_sub(2));
        let tr = if self.rs.len() > 1 {
            ((r - self.rs[i]) / (self.rs[i + 1] - self.rs[i])).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let theta = z.arg().rem_euclid(std::f64::consts::TAU);
        let j1 = self.thetas.partition_point(|&x| x <= theta);
        let (j0, j1) = ((j1 + nt - 1) % nt, j1 % nt);
        let t0 = self.thetas[j0];
        let mut span = self.thetas[j1] - t0;
        if span <= 0.0 {
            span += std::f64::consts::TAU;
        }
        let mut dt = theta - t0;
        if dt < 0.0 {
            dt += std::f64::consts::TAU;
        }
        let tt = if nt > 1 { (dt / span).clamp(0.0, 1.0) } else { 0.0 };
        let i1 = (i + 1).min(self.rs.len() - 1);
        let at = |a: usize, b: usize| self.values[a * nt + b];
        let lo = at(i, j0) * (1.0 - tt) + at(i, j1) * tt;
        let hi = at(i1, j0) * (1.0 - tt) + at(i1, j1) * tt;
        lo * (1.0 - tr) + hi * tr
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dbar_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-5;
        for s in [
            SymbolField::zbar(),
            SymbolField::conj_log1mz(),
            SymbolField::re_z(),
            SymbolField::bloch_lacunary(4),
            SymbolField::zbar().scaled(Complex64::new(0.5, 2.0)),
        ] {
            for _ in 0..50 {
                let z = Complex64::from_polar(0.9 * rng.random::<f64>(), rng.random::<f64>() * 6.3);
                let dx = (s.eval(z + h) - s.eval(z - h)) / (2.0 * h);
                let dy = (s.eval(z + Complex64::new(0.0, h)) - s.eval(z - Complex64::new(0.0, h))) / (2.0 * h);
                let fd = 0.5 * (dx + Complex64::i() * dy);
                let exact = s.dbar(z).unwrap();
                assert!((fd - exact).norm() <= 1e-4 * exact.norm().max(1e-3), "{}", s.label());
            }
        }
    }

    #[test]
    fn harmonic_split_reconstructs() {
        let z = Complex64::new(0.3, -0.5);
        for s in [SymbolField::zbar(), SymbolField::conj_log1mz(), SymbolField::bloch_lacunary(3)] {
            assert!((s.eval(z) - s.antianalytic(z).unwrap().conj()).norm() < 1e-14);
            let t = s.antianalytic_taylor(60).unwrap();
            let approx: Complex64 = t.iter().enumerate().map(|(k, c)| c * z.powu(k as u32)).sum();
            assert!((approx - s.antianalytic(z).unwrap()).norm() < 1e-12);
        }
        let re = SymbolField::re_z();
        assert!((re.eval(z) - (0.5 * z + re.antianalytic(z).unwrap().conj())).norm() < 1e-15);
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(SymbolField::parse("zbar", None).unwrap().label(), "zbar");
        let p = SymbolField::parse("poly:c=1;0;2,ci=0;1", None).unwrap();
        let z = Complex64::new(0.2, 0.1);
        let expect = Complex64::new(1.0, 0.0) + Complex64::i() * z + 2.0 * z * z;
        assert!((p.eval(z) - expect).norm() < 1e-15);
        assert!(SymbolField::parse("bloch_lacunary", None).is_err());
        assert!(SymbolField::parse("nope", None).is_err());
    }

    #[test]
    fn polar_table_interpolates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let mut text = String::from("r,theta,re,im\n");
        for i in 0..=20 {
            for j in 0..64 {
                let r = i as f64 / 20.0 * 0.99;
                let t = std::f64::consts::TAU * j as f64 / 64.0;
                let z = Complex64::from_polar(r, t);
                text += &format!("{r},{t},{},{}\n", z.conj().re, z.conj().im);
            }
        }
        std::fs::write(&path, text).unwrap();
        let s = SymbolField::parse("table:path=f.csv", Some(dir.path())).unwrap();
        let z = Complex64::new(0.31, -0.42);
        assert!((s.eval(z) - z.conj()).norm() < 2e-3);
        assert!(s.dbar(z).is_none());
    }
}
