use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{beta_metric, euclid_realization};
use crate::error::{LabError, Result};

/// Estimated point budget above which lattice generation refuses to run.
const MAX_POINTS: f64 = 400_000.0;
const VALIDATION_SAMPLES: usize = 4000;
/// In-ring acceptance distance as a multiple of `r`. Anything in `[1/2, 21/32)` keeps
/// both separation and covering; `0.6` keeps the multiplicity low.
const ACCEPT_FACTOR: f64 = 0.6;

#[derive(Debug, Clone)]
struct Ring {
    radius: f64,
    /// (angle in [0, 2π), point index), sorted by angle
    members: Vec<(f64, usize)>,
}

/// Separated point set whose discs `D(a_k, r)` cover `{|z| <= r_max}`.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub points: Vec<Complex64>,
    pub r: f64,
    pub r_max: f64,
    pub seed: u64,
    /// Largest number of discs `D(a_k, r)` containing a validation point.
    pub multiplicity: usize,
    rings: Vec<Ring>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeValidation {
    pub samples: usize,
    pub min_separation: f64,
    pub uncovered: usize,
    pub multiplicity: usize,
}

impl Lattice {
    /// Ring-by-ring greedy farthest-point construction.
    ///
    /// Rings sit at hyperbolic radii `k·r/2` around the origin, up to the radius needed
    /// to cover `{|z| <= r_max}`. On each ring a fine set of candidate angles (hyperbolic
    /// spacing at most `r/16`, randomly rotated from `seed`) is thinned greedily: the
    /// candidate farthest from all accepted points is accepted while that distance is at
    /// least `0.6·r`.
    pub fn generate(r: f64, r_max: f64, seed: u64) -> Result<Self> {
        if !(r > 0.0 && r <= 2.0) {
            return Err(LabError::domain(format!("lattice needs 0 < r <= 2, got {r}")));
        }
        if !(r_max > 0.0 && r_max < 1.0) {
            return Err(LabError::domain(format!("lattice needs 0 < r_max < 1, got {r_max}")));
        }
        // a point at hyperbolic radius t is within r/4 + r/32 + 0.6r of a lattice point of
        // the ring just inside it, so rings are needed up to atanh(r_max) - r/4
        let t_max = (r_max.atanh() - 0.25 * r).max(0.0);
        let estimate = estimated_points(r, t_max);
        if estimate > MAX_POINTS {
            let mut t = t_max;
            while t > 0.0 && estimated_points(r, t) > MAX_POINTS {
                t -= 0.05;
            }
            return Err(LabError::Resource {
                reason: format!("about {estimate:.0} lattice points needed for r_max = {r_max}"),
                suggested_r_max: (t.max(0.0) + 0.25 * r).tanh(),
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = 0.5 * r;
        let accept = ACCEPT_FACTOR * r;
        let n_rings = (t_max / half).ceil() as usize;
        let mut points = vec![Complex64::new(0.0, 0.0)];
        let mut prev_ring: Vec<Complex64> = points.clone();
        for k in 1..=n_rings {
            let s = (k as f64 * half).tanh();
            if s >= 1.0 {
                break;
            }
            let circumference = TAU * s / (1.0 - s * s);
            let m = ((circumference / (r / 16.0)).ceil() as usize).max(16);
            let offset = rng.random::<f64>() * TAU / m as f64;
            let candidates: Vec<Complex64> = (0..m)
                .map(|i| Complex64::from_polar(s, offset + TAU * i as f64 / m as f64))
                .collect();
            let mut dist: Vec<f64> = candidates
                .iter()
                .map(|&c| {
                    prev_ring
                        .iter()
                        .map(|&p| beta_metric(p, c))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let mut ring = Vec::new();
            loop {
                let (best, d) = dist
                    .iter()
                    .enumerate()
                    .fold((0usize, f64::NEG_INFINITY), |acc, (i, &d)| {
                        if d > acc.1 {
                            (i, d)
                        } else {
                            acc
                        }
                    });
                if d < accept {
                    break;
                }
                let p = candidates[best];
                ring.push(p);
                for (c, dc) in candidates.iter().zip(dist.iter_mut()) {
                    let b = beta_metric(p, *c);
                    if b < *dc {
                        *dc = b;
                    }
                }
            }
            points.extend_from_slice(&ring);
            prev_ring = ring;
        }
        let mut lat = Lattice::assemble(points, r, r_max, seed);
        let v = lat.validate(VALIDATION_SAMPLES, seed)?;
        lat.multiplicity = v.multiplicity;
        Ok(lat)
    }

    fn assemble(points: Vec<Complex64>, r: f64, r_max: f64, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].norm().total_cmp(&points[b].norm()));
        let mut rings: Vec<Ring> = Vec::new();
        for i in order {
            let rad = points[i].norm();
            let angle = points[i].arg().rem_euclid(TAU);
            match rings.last_mut() {
                Some(ring) if (ring.radius - rad).abs() <= 1e-12 => ring.members.push((angle, i)),
                _ => rings.push(Ring {
                    radius: rad,
                    members: vec![(angle, i)],
                }),
            }
        }
        for ring in &mut rings {
            ring.members.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        Lattice {
            points,
            r,
            r_max,
            seed,
            multiplicity: 0,
            rings,
        }
    }

    /// Lattice from explicit points; separation and covering are validated.
    pub fn from_points(points: Vec<Complex64>, r: f64, r_max: f64) -> Result<Self> {
        if points.iter().any(|p| !(p.norm() < 1.0)) {
            return Err(LabError::LatticeInvalid("points must lie in the unit disc".into()));
        }
        let mut lat = Lattice::assemble(points, r, r_max, 0);
        let v = lat.validate(VALIDATION_SAMPLES, 0)?;
        lat.multiplicity = v.multiplicity;
        Ok(lat)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Indices `j` with `β(z, a_j) < radius`, in increasing index order.
    pub fn neighbors(&self, z: Complex64, radius: f64) -> Vec<usize> {
        let s = radius.tanh();
        let (c, rad) = euclid_realization(z, s);
        let m = c.norm();
        let (lo, hi) = (m - rad, m + rad);
        let mut out = Vec::new();
        let start = self.rings.partition_point(|ring| ring.radius < lo - 1e-12);
        for ring in &self.rings[start..] {
            if ring.radius > hi + 1e-12 {
                break;
            }
            if m <= rad || ring.radius == 0.0 {
                out.extend(
                    ring.members
                        .iter()
                        .map(|&(_, i)| i)
                        .filter(|&i| beta_metric(z, self.points[i]) < radius),
                );
                continue;
            }
            let half_width = (rad / m).min(1.0).asin() + 1e-9;
            let center = c.arg().rem_euclid(TAU);
            let mut push_range = |a: f64, b: f64| {
                let i0 = ring.members.partition_point(|e| e.0 < a);
                let i1 = ring.members.partition_point(|e| e.0 <= b);
                for &(_, i) in &ring.members[i0..i1] {
                    if beta_metric(z, self.points[i]) < radius {
                        out.push(i);
                    }
                }
            };
            let (a, b) = (center - half_width, center + half_width);
            if half_width >= PI {
                push_range(0.0, TAU);
            } else if a < 0.0 {
                push_range(a + TAU, TAU);
                push_range(0.0, b);
            } else if b >= TAU {
                push_range(a, TAU);
                push_range(0.0, b - TAU);
            } else {
                push_range(a, b);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Check separation, covering and multiplicity on a seeded sample of `{|z| <= r_max}`.
    pub fn validate(&self, samples: usize, seed: u64) -> Result<LatticeValidation> {
        let mut min_sep = f64::INFINITY;
        for (i, &p) in self.points.iter().enumerate() {
            for j in self.neighbors(p, 0.5 * self.r) {
                if j != i {
                    min_sep = min_sep.min(beta_metric(p, self.points[j]));
                }
            }
        }
        if min_sep < 0.5 * self.r * (1.0 - 1e-12) {
            return Err(LabError::LatticeInvalid(format!(
                "separation {min_sep} below r/2 = {}",
                0.5 * self.r
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_1a77);
        let mut uncovered = 0;
        let mut multiplicity = 0;
        for k in 0..samples {
            // half the samples uniform in area, half uniform in radius to reach the edge
            let rad = if k % 2 == 0 {
                self.r_max * rng.random::<f64>().sqrt()
            } else {
                self.r_max * rng.random::<f64>()
            };
            let z = Complex64::from_polar(rad, rng.random::<f64>() * TAU);
            let count = self.neighbors(z, self.r).len();
            if count == 0 {
                uncovered += 1;
            }
            multiplicity = multiplicity.max(count);
        }
        if uncovered > 0 {
            return Err(LabError::LatticeInvalid(format!(
                "{uncovered} of {samples} sample points are not covered"
            )));
        }
        Ok(LatticeValidation {
            samples,
            min_separation: min_sep,
            uncovered,
            multiplicity,
        })
    }

    /// CSV with columns `index,re,im`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["index", "re", "im"])?;
        for (i, p) in self.points.iter().enumerate() {
            w.write_record([i.to_string(), format!("{:.17e}", p.re), format!("{:.17e}", p.im)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, r: f64, r_max: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let mut rows: Vec<(usize, Complex64)> = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let field = |k: usize| -> Result<&str> {
                rec.get(k)
                    .ok_or_else(|| LabError::Parse(format!("lattice row has fewer than 3 columns: {rec:?}")))
            };
            let idx: usize = field(0)?
                .parse()
                .map_err(|_| LabError::Parse(format!("bad lattice index in {rec:?}")))?;
            let re: f64 = field(1)?
                .parse()
                .map_err(|_| LabError::Parse(format!("bad lattice re in {rec:?}")))?;
            let im: f64 = field(2)?
                .parse()
                .map_err(|_| LabError::Parse(format!("bad lattice im in {rec:?}")))?;
            rows.push((idx, Complex64::new(re, im)));
        }
        rows.sort_by_key(|r| r.0);
        Lattice::from_points(rows.into_iter().map(|r| r.1).collect(), r, r_max)
    }
}

fn estimated_points(r: f64, t_max: f64) -> f64 {
    let half = 0.5 * r;
    let n = (t_max / half).ceil() as usize;
    (1..=n)
        .map(|k| {
            let s = (k as f64 * half).tanh();
            TAU * s / (1.0 - s * s).max(1e-300) / half
        })
        .sum::<f64>()
        + 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_radius_lattice_is_small() {
        let lat = Lattice::generate(2.0, 1.0f64.tanh(), 1).unwrap();
        assert!(lat.len() <= 12, "{} points", lat.len());
        assert!(lat.points.iter().all(|p| p.norm() <= 1.0f64.tanh() + 1e-12));
        let v = lat.validate(2000, 3).unwrap();
        assert!(v.min_separation >= 1.0);
    }

    #[test]
    fn separation_and_covering() {
        for &r in &[0.5, 1.0] {
            let lat = Lattice::generate(r, 0.9, 7).unwrap();
            for (i, &p) in lat.points.iter().enumerate() {
                for (j, &q) in lat.points.iter().enumerate() {
                    if i != j {
                        assert!(beta_metric(p, q) >= 0.5 * r * (1.0 - 1e-12));
                    }
                }
            }
            assert!(lat.multiplicity >= 1);
        }
    }

    #[test]
    fn multiplicity_is_bounded_near_the_boundary() {
        for &r in &[0.5, 1.0, 1.5, 2.0] {
            let lat = Lattice::generate(r, 0.99, 1).unwrap();
            eprintln!("r = {r}: {} points, N = {}", lat.len(), lat.multiplicity);
            assert!(lat.multiplicity <= 25, "r = {r}: N = {}", lat.multiplicity);
        }
    }

    #[test]
    fn neighbors_match_brute_force() {
        let lat = Lattice::generate(0.7, 0.95, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let z = Complex64::from_polar(0.97 * rng.random::<f64>(), rng.random::<f64>() * TAU);
            let fast = lat.neighbors(z, 0.7);
            let brute: Vec<usize> = (0..lat.len())
                .filter(|&i| beta_metric(z, lat.points[i]) < 0.7)
                .collect();
            assert_eq!(fast, brute, "z = {z}");
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = Lattice::generate(1.0, 0.9, 42).unwrap();
        let b = Lattice::generate(1.0, 0.9, 42).unwrap();
        assert_eq!(a.points, b.points);
        let c = Lattice::generate(1.0, 0.9, 43).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn resource_limit_suggests_radius() {
        match Lattice::generate(0.1, 0.999_999_9, 0) {
            Err(LabError::Resource { suggested_r_max, .. }) => {
                assert!(suggested_r_max > 0.0 && suggested_r_max < 0.999_999_9)
            }
            other => panic!("expected resource error, got {other:?}"),
        }
    }

    #[test]
    fn csv_roundtrip() {
        let lat = Lattice::generate(1.0, 0.8, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lattice.csv");
        lat.write_csv(&path).unwrap();
        let back = Lattice::read_csv(&path, 1.0, 0.8).unwrap();
        assert_eq!(back.points, lat.points);
    }

    #[test]
    fn sparse_points_are_rejected() {
        let pts = vec![Complex64::new(0.0, 0.0)];
        assert!(matches!(
            Lattice::from_points(pts, 0.5, 0.9),
            Err(LabError::LatticeInvalid(_))
        ));
    }
}
