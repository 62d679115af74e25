//! Points, distances, volumes and the stereographic chart on the round sphere Sⁿ ⊂ ℝⁿ⁺¹.

use std::f64::consts::PI;

use nalgebra::DVector;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Angular distance below which two points are treated as the same point.
pub const SAME_POINT_TOL: f64 = 1e-9;

/// A unit vector in ℝⁿ⁺¹. Coordinates are ordered `(Re z₁, Im z₁, Re z₂, Im z₂, x₁, …, x_{n−3})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: DVector<f64>,
}

impl SpherePoint {
    /// Normalizes `coords` onto the sphere. Requires at least 4 ambient coordinates (n ≥ 3).
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let v = DVector::from_vec(coords.into());
        if v.len() < 4 {
            return Err(Error::InvalidDimension {
                n: v.len().saturating_sub(1),
                reason: "sphere points need n >= 3 (ambient dimension >= 4)",
            });
        }
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::invalid("coords", "zero or non-finite vector"));
        }
        Ok(Self { coords: v / norm })
    }

    /// Point with complex coordinates `(z₁, z₂)` and real tail `x`, as `(re, im)` pairs.
    pub fn from_complex(n: usize, z1: (f64, f64), z2: (f64, f64), x: &[f64]) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension {
                n,
                reason: "the C x C x R^(n-3) splitting needs n >= 3",
            });
        }
        if x.len() > n - 3 {
            return Err(Error::DimensionMismatch {
                expected: n - 3,
                got: x.len(),
            });
        }
        let mut c = vec![0.0; n + 1];
        c[0] = z1.0;
        c[1] = z1.1;
        c[2] = z2.0;
        c[3] = z2.1;
        c[4..4 + x.len()].copy_from_slice(x);
        Self::new(c)
    }

    /// The i-th standard basis vector of ℝⁿ⁺¹.
    pub fn basis(n: usize, i: usize) -> Result<Self> {
        if i > n {
            return Err(Error::invalid("i", format!("basis index {i} exceeds n = {n}")));
        }
        let mut c = vec![0.0; n + 1];
        c[i] = 1.0;
        Self::new(c)
    }

    pub(crate) fn from_unit(coords: DVector<f64>) -> Self {
        Self { coords }
    }

    /// Sphere dimension n (ambient dimension minus one).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn dot(&self, other: &SpherePoint) -> Result<f64> {
        check_same_dim(self, other)?;
        Ok(self.coords.dot(&other.coords))
    }

    pub fn antipode(&self) -> SpherePoint {
        Self::from_unit(-&self.coords)
    }
}

fn check_same_dim(p: &SpherePoint, q: &SpherePoint) -> Result<()> {
    if p.coords.len() != q.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: p.coords.len(),
            got: q.coords.len(),
        });
    }
    Ok(())
}

/// Geodesic distance `arccos⟨p, q⟩` in `[0, π]`.
///
/// Small and near-antipodal distances are recovered from the chord length,
/// which keeps full relative accuracy where `arccos` of the inner product does not.
pub fn geodesic_distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64> {
    check_same_dim(p, q)?;
    let c = p.coords.dot(&q.coords).clamp(-1.0, 1.0);
    if c.abs() < 0.9 {
        return Ok(c.acos());
    }
    if c > 0.0 {
        let chord = (&p.coords - &q.coords).norm();
        Ok(2.0 * (0.5 * chord).min(1.0).asin())
    } else {
        let chord = (&p.coords + &q.coords).norm();
        Ok(PI - 2.0 * (0.5 * chord).min(1.0).asin())
    }
}

/// Uniformly distributed point on Sⁿ (normalized Gaussian vector).
pub fn random_point<R: rand::Rng + ?Sized>(rng: &mut R, n: usize) -> SpherePoint {
    loop {
        let v: Vec<f64> = (0..=n).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
        if let Ok(p) = SpherePoint::new(v) {
            return p;
        }
    }
}

/// Volume of the unit k-sphere, `2π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_volume(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("k", "sphere volume needs k >= 1"));
    }
    Ok(unit_sphere_measure(k))
}

/// Like [`sphere_volume`] but also accepts k = 0 (two points, measure 2).
pub(crate) fn unit_sphere_measure(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        2 => 4.0 * PI,
        3 => 2.0 * PI * PI,
        _ => {
            let h = 0.5 * (k as f64 + 1.0);
            2.0 * PI.powf(h) / gamma(h)
        }
    }
}

/// Dimension-dependent constants of the Yamabe problem on Sⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereConstants {
    pub n: usize,
    /// vol(Sⁿ)
    pub omega_n: f64,
    /// vol(Sⁿ⁻¹)
    pub omega_nm1: f64,
    /// n(n−2)/4
    pub a_n: f64,
    /// 2n/(n−2)
    pub two_star: f64,
    /// (n−2)/4 · vol(Sⁿ), the energy of a single bubble
    pub c_n: f64,
}

impl SphereConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension {
                n,
                reason: "the critical exponent needs n >= 3",
            });
        }
        let nf = n as f64;
        let omega_n = unit_sphere_measure(n);
        Ok(Self {
            n,
            omega_n,
            omega_nm1: unit_sphere_measure(n - 1),
            a_n: nf * (nf - 2.0) / 4.0,
            two_star: 2.0 * nf / (nf - 2.0),
            c_n: (nf - 2.0) / 4.0 * omega_n,
        })
    }
}

/// Stereographic chart Sⁿ∖{pole} → ℝⁿ sending the antipode of `pole` to the origin.
///
/// Coordinates are taken in the orthonormal frame of `pole`'s complement given by
/// the Householder reflection that maps `pole` to the last basis vector.
#[derive(Debug, Clone)]
pub struct StereographicChart {
    pole: SpherePoint,
    reflector: Option<DVector<f64>>,
}

impl StereographicChart {
    pub fn new(pole: &SpherePoint) -> Self {
        let dim = pole.coords.len();
        let mut v = pole.coords.clone();
        v[dim - 1] -= 1.0;
        let norm = v.norm();
        let reflector = if norm < 1e-14 { None } else { Some(v / norm) };
        Self {
            pole: pole.clone(),
            reflector,
        }
    }

    fn reflect(&self, y: &DVector<f64>) -> DVector<f64> {
        match &self.reflector {
            None => y.clone(),
            Some(u) => y - u * (2.0 * u.dot(y)),
        }
    }

    pub fn forward(&self, q: &SpherePoint) -> Result<Vec<f64>> {
        check_same_dim(&self.pole, q)?;
        let d = geodesic_distance(&self.pole, q)?;
        if d < SAME_POINT_TOL {
            return Err(Error::StereographicSingularity { distance: d });
        }
        let y = self.reflect(&q.coords);
        let n = y.len() - 1;
        // 1 − cos r from the half angle avoids cancellation close to the pole.
        let denom = 2.0 * (0.5 * d).sin().powi(2);
        Ok(y.as_slice()[..n].iter().map(|c| c / denom).collect())
    }

    pub fn inverse(&self, x: &[f64]) -> Result<SpherePoint> {
        let n = self.pole.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        let r2: f64 = x.iter().map(|c| c * c).sum();
        let mut y = DVector::zeros(n + 1);
        for (i, c) in x.iter().enumerate() {
            y[i] = 2.0 * c / (1.0 + r2);
        }
        y[n] = (r2 - 1.0) / (r2 + 1.0);
        let q = self.reflect(&y);
        SpherePoint::new(q.as_slice().to_vec())
    }
}

pub fn stereographic_forward(pole: &SpherePoint, q: &SpherePoint) -> Result<Vec<f64>> {
    StereographicChart::new(pole).forward(q)
}

pub fn stereographic_inverse(pole: &SpherePoint, x: &[f64]) -> Result<SpherePoint> {
    StereographicChart::new(pole).inverse(x)
}

/// Factor of the pulled-back round metric, `4 / (1 + |x|²)²`.
pub fn conformal_factor(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|c| c * c).sum();
    4.0 / (1.0 + r2).powi(2)
}

/// Chart volume density `(2 / (1 + |x|²))ⁿ` with n = `x.len()`.
pub fn chart_volume_density(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|c| c * c).sum();
    (2.0 / (1.0 + r2)).powi(x.len() as i32)
}
