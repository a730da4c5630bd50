//! Möbius maps, the pseudohyperbolic and Bergman metrics, and Euclidean realizations of
//! hyperbolic discs.

mod lattice;
mod partition;

pub use lattice::{Lattice, LatticeValidation};
pub use partition::{BumpProfile, PartitionOfUnity, PouTerm};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};

/// `φ_z(w) = (z − w)/(1 − z̄w)`.
pub fn mobius(z: Complex64, w: Complex64) -> Complex64 {
    (z - w) / (Complex64::new(1.0, 0.0) - z.conj() * w)
}

/// Derivative of `w ↦ φ_z(w)`.
pub fn mobius_derivative(z: Complex64, w: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - z.conj() * w;
    -(1.0 - z.norm_sqr()) / (d * d)
}

/// Pseudohyperbolic distance `ρ(z, w) = |φ_z(w)|`.
pub fn pseudo_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    (num / (Complex64::new(1.0, 0.0) - z.conj() * w).norm()).min(1.0)
}

/// Bergman metric `β(z, w) = artanh ρ(z, w)`.
pub fn beta_metric(z: Complex64, w: Complex64) -> f64 {
    pseudo_distance(z, w).atanh()
}

/// Which family of discs a quantity was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscParam {
    /// `D(z, r) = {β(z, w) < r}`.
    Bergman,
    /// `Δ(z, ρ) = {ρ(z, w) < ρ}`, i.e. `D(z, artanh ρ)`.
    Pseudohyperbolic,
}

/// Hyperbolic disc `D(z, r)` with its Euclidean center and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BergmanDisc {
    pub center: Complex64,
    pub hyp_radius: f64,
    pub euclid_center: Complex64,
    pub euclid_radius: f64,
}

impl BergmanDisc {
    pub fn new(z: Complex64, r: f64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(LabError::domain(format!("disc center {z} must lie in the unit disc")));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(LabError::domain(format!("disc radius must be positive, got {r}")));
        }
        let s = r.tanh();
        if s >= 1.0 {
            return Err(LabError::domain(format!(
                "hyperbolic radius {r} is beyond floating-point range"
            )));
        }
        let (c, rad) = euclid_realization(z, s);
        if !(c.norm() + rad < 1.0) {
            return Err(LabError::domain(format!(
                "disc D({z}, {r}) cannot be separated from the unit circle numerically"
            )));
        }
        Ok(BergmanDisc {
            center: z,
            hyp_radius: r,
            euclid_center: c,
            euclid_radius: rad,
        })
    }

    /// The pseudohyperbolic disc `Δ(a, ρ)`, which equals `D(a, artanh ρ)`.
    pub fn pseudo(a: Complex64, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(LabError::domain(format!("pseudohyperbolic radius must lie in (0, 1), got {rho}")));
        }
        Self::new(a, rho.atanh())
    }

    pub fn with_param(z: Complex64, radius: f64, param: DiscParam) -> Result<Self> {
        match param {
            DiscParam::Bergman => Self::new(z, radius),
            DiscParam::Pseudohyperbolic => Self::pseudo(z, radius),
        }
    }

    /// Membership by the metric definition.
    pub fn contains(&self, w: Complex64) -> bool {
        beta_metric(self.center, w) < self.hyp_radius
    }

    /// Membership through the Euclidean realization.
    pub fn contains_euclid(&self, w: Complex64) -> bool {
        (w - self.euclid_center).norm() < self.euclid_radius
    }

    /// Normalized area `|D| = R²`.
    pub fn area(&self) -> f64 {
        self.euclid_radius * self.euclid_radius
    }
}

/// Euclidean center and radius of `{ρ(z, w) < s}`.
pub fn euclid_realization(z: Complex64, s: f64) -> (Complex64, f64) {
    let m2 = z.norm_sqr();
    let s2 = s * s;
    let denom = 1.0 - s2 * m2;
    ((1.0 - s2) * z / denom, s * (1.0 - m2) / denom)
}
