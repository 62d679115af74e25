//! Numerical integration on Sⁿ.
//!
//! * zonal rules for integrands depending on the distance to one point,
//! * bizonal rules for integrands depending on the distances to two points,
//! * Monte Carlo with uniform sampling for general integrands,
//! * product grids: a generic one over hyperspherical angles (n ≤ 5) and a
//!   symmetry-folded one for integrands that only see the `(z₁, z₂)` coordinates.
//!
//! Deterministic rules are composite Gauss–Legendre on panels refined
//! geometrically toward the points where integrands concentrate; the sphere
//! weight `sinᵏ` is applied to the integrand, not folded into the nodes.
//! Partial sums are combined in a fixed order so results do not depend on the
//! number of threads.

mod gauss;
mod grid;
mod monte_carlo;
mod zonal;

pub use gauss::{gauss_legendre, graded, graded_breakpoints, periodic, Grid1d};
pub use grid::{integrate_folded, integrate_product_grid, SplitIntegrand};
pub use monte_carlo::integrate_mc;
pub use zonal::{
    ball_restricted_zonal, integrate_bizonal, integrate_zonal, integrate_zonal_range, BallRegion,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sphere::unit_sphere_measure;

/// Finest panel width used when no concentration scale is given.
pub const DEFAULT_FINEST: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    Zonal,
    Bizonal,
    MonteCarlo,
    ProductGrid,
}

/// A quadrature configuration.
///
/// For deterministic rules `resolution` is the number of Gauss–Legendre nodes
/// per panel; for Monte Carlo it is the sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub resolution: usize,
    pub seed: u64,
    /// Relative tolerance the rule guarantees on the volume of Sⁿ.
    pub reported_tolerance: f64,
    /// Length scale at which integrands concentrate; panels are refined down to 1/8 of it.
    pub concentration: Option<f64>,
}

impl QuadratureRule {
    fn deterministic(kind: QuadratureKind, resolution: usize, tol: f64) -> Result<Self> {
        if resolution < 8 {
            return Err(Error::invalid(
                "resolution",
                format!("deterministic rules need at least 8 nodes per panel, got {resolution}"),
            ));
        }
        Ok(Self {
            kind,
            resolution,
            seed: 0,
            reported_tolerance: tol,
            concentration: None,
        })
    }

    pub fn zonal(resolution: usize) -> Result<Self> {
        Self::deterministic(QuadratureKind::Zonal, resolution, 1e-12)
    }

    pub fn bizonal(resolution: usize) -> Result<Self> {
        Self::deterministic(QuadratureKind::Bizonal, resolution, 1e-12)
    }

    pub fn product_grid(resolution: usize) -> Result<Self> {
        Self::deterministic(QuadratureKind::ProductGrid, resolution, 1e-10)
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Result<Self> {
        if samples < 10_000 {
            return Err(Error::invalid(
                "samples",
                format!("Monte Carlo needs at least 10^4 samples, got {samples}"),
            ));
        }
        Ok(Self {
            kind: QuadratureKind::MonteCarlo,
            resolution: samples,
            seed,
            reported_tolerance: 0.0,
            concentration: None,
        })
    }

    /// Refine panels toward foci down to `scale / 8`.
    pub fn with_concentration(mut self, scale: f64) -> Self {
        if scale.is_finite() && scale > 0.0 {
            self.concentration = Some(scale);
        }
        self
    }

    pub fn with_kind(mut self, kind: QuadratureKind) -> Self {
        self.kind = kind;
        self
    }

    pub(crate) fn finest(&self) -> f64 {
        self.concentration
            .map(|s| (s / 8.0).min(0.05))
            .unwrap_or(DEFAULT_FINEST)
    }

    pub(crate) fn check_volume(&self, n: usize, got: f64) -> Result<()> {
        let expected = unit_sphere_measure(n);
        let tolerance = self.reported_tolerance.max(1e-14);
        if ((got - expected) / expected).abs() > tolerance {
            return Err(Error::Calibration {
                got,
                expected,
                tolerance,
            });
        }
        Ok(())
    }
}

pub(crate) fn check_finite(value: f64, node: &[f64]) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteIntegrand {
            value,
            node: node.to_vec(),
        })
    }
}
