//! Product grids: generic hyperspherical angles, and a symmetry-folded grid
//! for integrands built from a `z₁` part and a `z₂` part.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::gauss::{composite, graded, periodic};
use super::{check_finite, QuadratureRule};
use crate::error::{Error, Result};
use crate::sphere::unit_sphere_measure;
use crate::summation::Neumaier;

const GENERIC_PANELS: usize = 4;

/// Tensor Gauss–Legendre over hyperspherical angles, for `n ≤ 5`.
///
/// `x₀ = cos θ₁, x₁ = sin θ₁ cos θ₂, …, x_n = sin θ₁ ⋯ sin θ_{n−1} sin φ`, with
/// `GENERIC_PANELS` uniform panels per polar angle and a trapezoid rule in `φ`.
pub fn integrate_product_grid<F>(n: usize, f: F, rule: &QuadratureRule) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if !(2..=5).contains(&n) {
        return Err(Error::InvalidDimension { n, reason: "generic product grid supports 2 <= n <= 5" });
    }
    let breaks: Vec<f64> = (0..=GENERIC_PANELS).map(|k| PI * k as f64 / GENERIC_PANELS as f64).collect();
    let polar = composite(&breaks, rule.resolution);
    let azimuth = periodic(0.0, 2.0 * PI, 2 * polar.len());
    let dims = n - 1;
    let np = polar.len();

    // weight sum for calibration
    let mut vol = 1.0;
    for k in 0..dims {
        let s: Neumaier = polar.iter().map(|(t, w)| w * t.sin().powi((n - 1 - k) as i32)).collect();
        vol *= s.value();
    }
    rule.check_volume(n, vol * 2.0 * PI)?;

    let inner_count = np.pow(dims as u32 - 1);
    let partial: Vec<Result<f64>> = (0..np)
        .into_par_iter()
        .map(|i0| {
            let mut acc = Neumaier::new();
            let mut x = vec![0.0; n + 1];
            let mut idx = vec![0usize; dims];
            idx[0] = i0;
            for flat in 0..inner_count {
                let mut rest = flat;
                for slot in idx.iter_mut().skip(1) {
                    *slot = rest % np;
                    rest /= np;
                }
                let mut weight = 1.0;
                let mut radius = 1.0;
                for (k, &j) in idx.iter().enumerate() {
                    let t = polar.nodes[j];
                    x[k] = radius * t.cos();
                    weight *= polar.weights[j] * t.sin().powi((n - 1 - k) as i32);
                    radius *= t.sin();
                }
                for (phi, wp) in azimuth.iter() {
                    x[n - 1] = radius * phi.cos();
                    x[n] = radius * phi.sin();
                    let v = check_finite(f(&x), &x)?;
                    acc.add(weight * wp * v);
                }
            }
            Ok(acc.value())
        })
        .collect();
    let mut acc = Neumaier::new();
    for p in partial {
        acc.add(p?);
    }
    Ok(acc.value())
}

/// An integrand `F(x) = combine(A(z₁), B(z₂))` on Sⁿ ⊂ ℂ² × ℝ^{n−3}.
///
/// [`integrate_folded`] assumes `F` is invariant under
/// * rotating `z₁` alone, or `z₂` alone, by `2π/m`,
/// * conjugating `z₁` alone, or `z₂` alone,
/// * the swap `(z₁, z₂) ↦ (z̄₂, z̄₁)`,
/// * isometries of the trailing `ℝ^{n−3}` factor.
pub trait SplitIntegrand: Sync {
    type Plus: Send;
    type Minus: Send + Sync;
    /// `rest_sq = 1 − |z₁|²`, passed separately because it is known without cancellation.
    fn plus_part(&self, z1: [f64; 2], rest_sq: f64) -> Self::Plus;
    /// `rest_sq = 1 − |z₂|²`.
    fn minus_part(&self, z2: [f64; 2], rest_sq: f64) -> Self::Minus;
    /// `x = (z₁, z₂)` as four real coordinates; `tail` is the norm of the remaining coordinates.
    fn combine(&self, x: [f64; 4], tail: f64, plus: &Self::Plus, minus: &Self::Minus) -> f64;
}

/// `∫_{Sⁿ} F dV` for a [`SplitIntegrand`] with the symmetry of the m-fold configuration.
///
/// Coordinates: `z₁ = cos α cos χ e^{iφ₁}`, `z₂ = cos α sin χ e^{iφ₂}`, trailing part
/// of norm `sin α`; the domain is folded to `χ ∈ [0, π/4]`, `φ₁ ∈ [0, π/m]`,
/// `φ₂ ∈ [0, 2π/m)`, `α ∈ [0, π/2]`. Panels are refined toward the plus
/// concentration point `z₁ = 1`.
pub fn integrate_folded<I: SplitIntegrand>(n: usize, m: usize, integrand: &I, rule: &QuadratureRule) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDimension { n, reason: "folded grid needs n >= 3" });
    }
    if m == 0 {
        return Err(Error::invalid("m", "fold order must be positive"));
    }
    let finest = rule.finest();
    let res = rule.resolution;
    let mf = m as f64;
    let alpha = if n == 3 {
        super::Grid1d { nodes: vec![0.0], weights: vec![1.0] }
    } else {
        graded(0.0, 0.5 * PI, &[0.0], finest, res)
    };
    let alpha_w: Vec<f64> = alpha
        .iter()
        .map(|(a, w)| {
            if n == 3 {
                w
            } else {
                w * unit_sphere_measure(n - 4) * a.cos().powi(3) * a.sin().powi(n as i32 - 4)
            }
        })
        .collect();
    let chi = graded(0.0, 0.25 * PI, &[0.0], finest, res);
    let chi_w: Vec<f64> = chi.iter().map(|(c, w)| w * c.cos() * c.sin()).collect();
    let phi1 = graded(0.0, PI / mf, &[0.0], finest, res);
    let phi2 = periodic(0.0, 2.0 * PI / mf, (2 * res).max(16));
    let fold = 4.0 * mf * mf;

    let vol = fold
        * alpha_w.iter().sum::<f64>()
        * chi_w.iter().sum::<f64>()
        * phi1.weights.iter().sum::<f64>()
        * phi2.weights.iter().sum::<f64>();
    rule.check_volume(n, vol)?;

    let phi1_trig: Vec<(f64, f64)> = phi1.nodes.iter().map(|p| (p.cos(), p.sin())).collect();
    let phi2_trig: Vec<(f64, f64)> = phi2.nodes.iter().map(|p| (p.cos(), p.sin())).collect();
    let outer: Vec<(usize, usize)> = (0..alpha.len())
        .flat_map(|i| (0..chi.len()).map(move |j| (i, j)))
        .collect();

    let partial: Vec<Result<f64>> = outer
        .par_iter()
        .map(|&(ia, ic)| {
            let (a, c) = (alpha.nodes[ia], chi.nodes[ic]);
            let tail = a.sin();
            let (ca, cc, sc) = (a.cos(), c.cos(), c.sin());
            let r1 = ca * cc;
            let r2 = ca * sc;
            let rest1 = tail * tail + (ca * sc).powi(2);
            let rest2 = tail * tail + (ca * cc).powi(2);
            let minus: Vec<I::Minus> = phi2_trig
                .iter()
                .map(|&(co, si)| integrand.minus_part([r2 * co, r2 * si], rest2))
                .collect();
            let mut acc = Neumaier::new();
            for (&(c1, s1), &w1) in phi1_trig.iter().zip(&phi1.weights) {
                let z1 = [r1 * c1, r1 * s1];
                let plus = integrand.plus_part(z1, rest1);
                let mut inner = Neumaier::new();
                for (k, &(c2, s2)) in phi2_trig.iter().enumerate() {
                    let x = [z1[0], z1[1], r2 * c2, r2 * s2];
                    let v = integrand.combine(x, tail, &plus, &minus[k]);
                    inner.add(phi2.weights[k] * check_finite(v, &[x[0], x[1], x[2], x[3], tail])?);
                }
                acc.add(w1 * inner.value());
            }
            Ok(alpha_w[ia] * chi_w[ic] * acc.value())
        })
        .collect();
    let mut acc = Neumaier::new();
    for p in partial {
        acc.add(p?);
    }
    Ok(fold * acc.value())
}
