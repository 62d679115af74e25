//! Zonal and bizonal rules.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::gauss::{graded, Grid1d};
use super::{check_finite, QuadratureRule};
use crate::error::{Error, Result};
use crate::sphere::unit_sphere_measure;
use crate::summation::Neumaier;

/// Which part of Sⁿ a ball-restricted integral covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallRegion {
    /// `d(x, p) < δ`
    Ball,
    /// `d(x, p) ≥ δ`
    Complement,
}

fn radial_grid(lo: f64, hi: f64, extra: &[f64], rule: &QuadratureRule) -> Grid1d {
    let mut foci = vec![lo, hi];
    foci.extend_from_slice(extra);
    graded(lo, hi, &foci, rule.finest(), rule.resolution)
}

fn calibrate_zonal(n: usize, rule: &QuadratureRule) -> Result<()> {
    let g = radial_grid(0.0, PI, &[], rule);
    let s: Neumaier = g.iter().map(|(r, w)| w * r.sin().powi(n as i32 - 1)).collect();
    rule.check_volume(n, unit_sphere_measure(n - 1) * s.value())
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidDimension {
            n,
            reason: "sphere dimension too small for this rule",
        });
    }
    Ok(())
}

/// `∫_{Sⁿ} f(d(x, p)) dV` for a zonal integrand given as a function of the distance `r`.
pub fn integrate_zonal<F>(n: usize, f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    integrate_zonal_range(n, 0.0, PI, f, rule)
}

/// Zonal integral over the annulus `lo ≤ d(x, p) ≤ hi`.
pub fn integrate_zonal_range<F>(n: usize, lo: f64, hi: f64, f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    check_n(n, 1)?;
    if !(0.0..=PI).contains(&lo) || !(lo..=PI).contains(&hi) {
        return Err(Error::invalid("range", format!("need 0 <= lo <= hi <= pi, got [{lo}, {hi}]")));
    }
    calibrate_zonal(n, rule)?;
    if hi == lo {
        return Ok(0.0);
    }
    let g = radial_grid(lo, hi, &[], rule);
    let mut acc = Neumaier::new();
    for (r, w) in g.iter() {
        let v = check_finite(f(r), &[r])?;
        acc.add(w * v * r.sin().powi(n as i32 - 1));
    }
    Ok(unit_sphere_measure(n - 1) * acc.value())
}

/// Zonal integral restricted to the geodesic ball of radius `delta` or its complement.
pub fn ball_restricted_zonal<F>(
    n: usize,
    delta: f64,
    region: BallRegion,
    f: F,
    rule: &QuadratureRule,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(delta > 0.0 && delta <= PI) {
        return Err(Error::invalid("delta", format!("ball radius must lie in (0, pi], got {delta}")));
    }
    match region {
        BallRegion::Ball => integrate_zonal_range(n, 0.0, delta, f, rule),
        BallRegion::Complement => integrate_zonal_range(n, delta, PI, f, rule),
    }
}

/// `∫_{Sⁿ} f(r, ψ) dV` in bizonal coordinates around `p`, with a second point `q` at distance `theta`.
///
/// `r = d(x, p)` and `ψ` is the angle at `p` between the geodesics toward `x` and toward `q`, so
/// `cos d(x, q) = cos r cos θ + sin r sin θ cos ψ`. The measure is
/// `ω_{n−2} sin^{n−1} r sin^{n−2} ψ dr dψ`.
pub fn integrate_bizonal<F>(n: usize, theta: f64, f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    check_n(n, 2)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::invalid("theta", format!("angle must lie in [0, pi], got {theta}")));
    }
    let rg = radial_grid(0.0, PI, &[theta], rule);
    let pg = graded(0.0, PI, &[0.0, PI], rule.finest(), rule.resolution);
    let psi_weights: Vec<f64> = pg
        .iter()
        .map(|(psi, w)| w * psi.sin().powi(n as i32 - 2))
        .collect();

    let vol_r: Neumaier = rg.iter().map(|(r, w)| w * r.sin().powi(n as i32 - 1)).collect();
    let vol_psi: Neumaier = psi_weights.iter().copied().collect();
    rule.check_volume(n, unit_sphere_measure(n - 2) * vol_r.value() * vol_psi.value())?;

    let partial: Vec<Result<f64>> = rg
        .nodes
        .par_iter()
        .zip(rg.weights.par_iter())
        .map(|(&r, &wr)| {
            let mut inner = Neumaier::new();
            for (&psi, &wp) in pg.nodes.iter().zip(&psi_weights) {
                let v = check_finite(f(r, psi), &[r, psi])?;
                inner.add(wp * v);
            }
            Ok(wr * r.sin().powi(n as i32 - 1) * inner.value())
        })
        .collect();
    let mut acc = Neumaier::new();
    for p in partial {
        acc.add(p?);
    }
    Ok(unit_sphere_measure(n - 2) * acc.value())
}
