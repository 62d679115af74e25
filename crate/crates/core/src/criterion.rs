//! Interaction sums μ_p, μ̂_p of a signed orbit, the closed form a_{n,m} for
//! Γ_m at p = (1, 0, 0), and the inequalities that locate the threshold m_n.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{rotation_tau_configuration, SignedOrbit};
use crate::sphere::{SpherePoint, SAME_POINT_TOL};
use crate::summation::Neumaier;

/// Criterion quantities for the configuration `G_m p ⊔ τ G_m p` at p = (1, 0, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionResult {
    pub n: usize,
    pub m: usize,
    pub mu: f64,
    pub mu_hat: f64,
    pub a_nm: f64,
    pub positive: bool,
}

impl CriterionResult {
    pub fn evaluate(n: usize, m: usize) -> Result<Self> {
        let p = SpherePoint::from_complex(n, (1.0, 0.0), (0.0, 0.0), &[])?;
        let (mu, mu_hat) = mu_pair(&rotation_tau_configuration(n, m, &p)?, n)?;
        Ok(Self {
            n,
            m,
            mu,
            mu_hat,
            a_nm: a_nm(n, m)?,
            positive: mu - mu_hat > 0.0,
        })
    }
}

/// `(1 − cos d(p, q))^{(2−n)/2}`, with `1 − cos d` taken as half the squared chord.
fn interaction(p: &SpherePoint, q: &SpherePoint, n: usize, i: usize, j: usize) -> Result<f64> {
    let chord2 = (p.coords() - q.coords()).norm_squared();
    let distance = 2.0 * (0.5 * chord2.sqrt()).min(1.0).asin();
    if distance < SAME_POINT_TOL {
        return Err(Error::CoincidentPoints { i, j, distance });
    }
    Ok((0.5 * chord2).powf(-(n as f64 - 2.0) / 2.0))
}

/// μ_p over ordered pairs `i ≠ j` of plus points and μ̂_p over all plus/minus pairs.
pub fn mu_pair(orbit: &SignedOrbit, n: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the interaction power needs n >= 3",
        });
    }
    if orbit.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: orbit.dim() + 1,
        });
    }
    if !orbit.is_free() || orbit.minus_points.is_empty() {
        return Err(Error::OrbitNotFree);
    }
    let plus = &orbit.plus_points;
    let minus = &orbit.minus_points;
    let mut mu = Neumaier::new();
    for (i, pi) in plus.iter().enumerate() {
        for (j, pj) in plus.iter().enumerate() {
            if i != j {
                mu.add(interaction(pi, pj, n, i, j)?);
            }
        }
    }
    let mut mu_hat = Neumaier::new();
    for (i, pi) in plus.iter().enumerate() {
        for (j, qj) in minus.iter().enumerate() {
            mu_hat.add(interaction(pi, qj, n, i, plus.len() + j)?);
        }
    }
    Ok((mu.value(), mu_hat.value()))
}

/// `a_{n,m} = Σ_{j=1}^{m−1} (√2 sin(πj/m))^{−(n−2)} − m`, equal to `(μ_p − μ̂_p)/m` for Γ_m at (1, 0, 0).
pub fn a_nm(n: usize, m: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            n,
            reason: "a_{n,m} is defined for n >= 3",
        });
    }
    if m < 1 {
        return Err(Error::invalid("m", "m must be at least 1"));
    }
    let power = -(n as i32 - 2);
    let term = |j: usize| (SQRT_2 * (PI * j as f64 / m as f64).sin()).powi(power);
    // sin(πj/m) = sin(π(m−j)/m): sum the smaller half twice, largest terms last.
    let mut acc = Neumaier::new();
    if m.is_multiple_of(2) && m >= 2 {
        acc.add(term(m / 2));
    }
    for j in (1..=(m - 1) / 2).rev() {
        acc.add(2.0 * term(j));
    }
    acc.add(-(m as f64));
    Ok(acc.value())
}

/// Closed form for n = 4: `(m² − 1)/6 − m`.
pub fn a_4m_closed_form(m: usize) -> f64 {
    let m = m as f64;
    (m * m - 1.0) / 6.0 - m
}

/// Smallest `m ≤ m_max` with `a_{n,m} > 0`; every smaller m is confirmed non-positive.
///
/// Values within 1e-8 of zero are re-evaluated from the explicit orbit geometry.
pub fn minimal_m(n: usize, m_max: usize) -> Result<Option<usize>> {
    if m_max < 2 {
        return Err(Error::invalid("m_max", "must be at least 2"));
    }
    for m in 1..=m_max {
        let mut a = a_nm(n, m)?;
        if a.abs() < 1e-8 && m >= 2 {
            let c = CriterionResult::evaluate(n, m)?;
            a = (c.mu - c.mu_hat) / m as f64;
        }
        if a > 0.0 {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// The threshold table m_n as stated for the main theorem: 9, 7, 6, 6, then 5 for n ≥ 7.
pub fn tabulated_m_n(n: usize) -> Option<usize> {
    match n {
        0..=2 => None,
        3 => Some(9),
        4 => Some(7),
        5 | 6 => Some(6),
        _ => Some(5),
    }
}

/// `f_{n₀}(x) = (2x)^{1/n₀} − √2 sin(πx)`.
pub fn f_n0(n0: usize, x: f64) -> Result<f64> {
    if n0 == 0 {
        return Err(Error::invalid("n0", "must be positive"));
    }
    if !(x >= 0.0) {
        return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
    }
    Ok((2.0 * x).powf(1.0 / n0 as f64) - SQRT_2 * (PI * x).sin())
}

/// `1/sin(π/(m+1)) − 1/sin(π/m) − (√2 − 1)/2`, positive for all m ≥ 9.
pub fn claim15_margin(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid("m", "must be at least 2"));
    }
    let m = m as f64;
    Ok(1.0 / (PI / (m + 1.0)).sin() - 1.0 / (PI / m).sin() - (SQRT_2 - 1.0) / 2.0)
}

/// The two constants bounding the margin from below for m ≥ 9:
/// `(π/9)/(6 − (π/9)²)` and `1/π − (√2 − 1)/2`.
pub fn claim15_constants() -> (f64, f64) {
    let t = PI / 9.0;
    (t / (6.0 - t * t), 1.0 / PI - (SQRT_2 - 1.0) / 2.0)
}

/// `a_{3,m+1} − a_{3,m} − √2 (1/2 − √2/2 + 1/sin(π/(m+1)) − 1/sin(π/m))`.
///
/// Zero (up to roundoff) at m = 2 and m = 3, positive afterwards.
pub fn a3_recursion_margin(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid("m", "must be at least 2"));
    }
    let mf = m as f64;
    let step = SQRT_2
        * (0.5 - SQRT_2 / 2.0 + 1.0 / (PI / (mf + 1.0)).sin() - 1.0 / (PI / mf).sin());
    Ok(a_nm(3, m + 1)? - a_nm(3, m)? - step)
}

/// `a_{3,m+1} ≥ a_{3,m} + √2 (1/2 − √2/2 + 1/sin(π/(m+1)) − 1/sin(π/m))`, allowing 1e-12 roundoff.
pub fn a3_recursion_check(m: usize) -> Result<bool> {
    Ok(a3_recursion_margin(m)? >= -1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{orbit, SignedIsometry, SymmetryGroup};
    use approx::assert_relative_eq;

    /// Direct term-by-term evaluation over j = 1..m−1, no symmetry folding.
    fn a_nm_naive(n: usize, m: usize) -> f64 {
        let mut s = 0.0;
        for j in 1..m {
            s += 1.0 / (SQRT_2 * (PI * j as f64 / m as f64).sin()).powi(n as i32 - 2);
        }
        s - m as f64
    }

    #[test]
    fn reported_values() {
        assert!((a_nm(5, 6).unwrap() - 1.09907).abs() < 1e-4);
        assert!((a_nm(5, 5).unwrap() + 0.69601).abs() < 1e-4);
        assert!((a_nm(6, 5).unwrap() + 0.2).abs() < 1e-12);
        assert!((a_nm(4, 7).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_naive_sum() {
        for n in 3..12 {
            for m in 1..40 {
                assert_relative_eq!(a_nm(n, m).unwrap(), a_nm_naive(n, m), epsilon = 1e-10, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn m_equals_one_is_minus_one() {
        assert_eq!(a_nm(3, 1).unwrap(), -1.0);
    }

    #[test]
    fn mu_pair_examples() {
        let n = 4;
        let g = SymmetryGroup::gamma_m(n, 2).unwrap();
        let p = SpherePoint::from_complex(n, (1.0, 0.0), (0.0, 0.0), &[]).unwrap();
        let (mu, mu_hat) = mu_pair(&orbit(&g, &p).unwrap(), n).unwrap();
        // Antipodal plus pair: (1 − cos π)^{-1} = 1/2 each, two ordered pairs.
        assert_relative_eq!(mu, 1.0, epsilon = 1e-14);
        assert_relative_eq!(mu_hat, 4.0, epsilon = 1e-14);
        assert_relative_eq!((mu - mu_hat) / 2.0, a_4m_closed_form(2), epsilon = 1e-14);

        let c = rotation_tau_configuration(3, 1, &p_for(3)).unwrap();
        let (mu, mu_hat) = mu_pair(&c, 3).unwrap();
        assert_eq!(mu, 0.0);
        assert_relative_eq!(mu_hat, 1.0, epsilon = 1e-14);
    }

    fn p_for(n: usize) -> SpherePoint {
        SpherePoint::from_complex(n, (1.0, 0.0), (0.0, 0.0), &[]).unwrap()
    }

    #[test]
    fn mu_hat_is_m_squared() {
        for n in 3..8 {
            for m in 2..15 {
                let c = CriterionResult::evaluate(n, m).unwrap();
                assert!((c.mu_hat - (m * m) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fixed_orbit_is_rejected() {
        let g = SymmetryGroup::gamma_m(4, 3).unwrap();
        let fixed = SpherePoint::basis(4, 4).unwrap();
        let o = orbit(&g, &fixed).unwrap();
        assert!(matches!(mu_pair(&o, 4), Err(Error::OrbitNotFree)));
    }

    #[test]
    fn coincident_points_are_rejected() {
        let p = p_for(3);
        let o = SignedOrbit {
            base: p.clone(),
            plus_points: vec![p.clone(), p.clone()],
            minus_points: vec![p.antipode()],
        };
        assert!(matches!(mu_pair(&o, 3), Err(Error::CoincidentPoints { .. })));
    }

    #[test]
    fn mu_pair_is_rotation_invariant() {
        let n = 5;
        let g = SymmetryGroup::gamma_m(n, 6).unwrap();
        let p = SpherePoint::new(vec![0.7, 0.1, 0.2, -0.3, 0.5, 0.3]).unwrap();
        let o = orbit(&g, &p).unwrap();
        let (mu, mu_hat) = mu_pair(&o, n).unwrap();
        // A rotation in the (x₁, Re z₂) plane, not in Γ_m.
        let (s, c) = 0.7_f64.sin_cos();
        let mut r = nalgebra::DMatrix::identity(n + 1, n + 1);
        r[(2, 2)] = c;
        r[(2, 4)] = -s;
        r[(4, 2)] = s;
        r[(4, 4)] = c;
        let rot = SignedIsometry::new(r, 1).unwrap();
        let moved = SignedOrbit {
            base: crate::group::apply(&rot, &o.base).unwrap(),
            plus_points: o.plus_points.iter().map(|q| crate::group::apply(&rot, q).unwrap()).collect(),
            minus_points: o.minus_points.iter().map(|q| crate::group::apply(&rot, q).unwrap()).collect(),
        };
        let (mu2, mu_hat2) = mu_pair(&moved, n).unwrap();
        assert_relative_eq!(mu, mu2, max_relative = 1e-10);
        assert_relative_eq!(mu_hat, mu_hat2, max_relative = 1e-10);
    }

    #[test]
    fn threshold_table() {
        let expected = [(3, 9), (4, 7), (5, 6), (6, 6), (7, 5), (30, 5)];
        for (n, m) in expected {
            assert_eq!(minimal_m(n, 50).unwrap(), Some(m), "n = {n}");
        }
        assert_eq!(minimal_m(3, 5).unwrap(), None);
        assert_eq!(minimal_m(3, 8).unwrap(), None);
    }

    #[test]
    fn a_3m_negative_just_below_threshold() {
        for m in 5..=8 {
            assert!(a_nm(3, m).unwrap() < 0.0);
        }
    }

    #[test]
    fn small_m_bound() {
        // For 2 ≤ m ≤ 4 every term is at most one, so a_{n,m} ≤ −1.
        for n in 3..20 {
            for m in 2..=4 {
                assert!(a_nm(n, m).unwrap() <= -1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn f_n0_values() {
        for n0 in 1..8 {
            assert_eq!(f_n0(n0, 0.0).unwrap(), 0.0);
        }
        assert!(f_n0(5, 0.2).unwrap() > 0.0);
        assert!(f_n0(4, 1.0 / 6.0).unwrap() > 0.0);
        assert!(f_n0(3, 1.0 / 7.0).unwrap() > 0.0);
        assert!(f_n0(3, 0.2).unwrap() < 0.0);
        assert!(f_n0(3, -0.1).is_err());
    }

    #[test]
    fn claim15() {
        let (lo, hi) = claim15_constants();
        assert!((lo - 0.059383).abs() < 1e-6);
        assert!((hi - 0.111203).abs() < 1e-6);
        for m in 9..=1000 {
            assert!(claim15_margin(m).unwrap() > 0.0);
        }
        let far = claim15_margin(1_000_000).unwrap();
        assert!((far - hi).abs() < 1e-5);
    }

    #[test]
    fn a3_recursion() {
        assert!(a3_recursion_check(9).unwrap());
        assert!(a3_recursion_check(100).unwrap());
        for m in 2..=200 {
            let ok = a3_recursion_check(m).unwrap();
            assert!(ok, "m = {m}");
        }
        for m in 9..=200 {
            assert!(a_nm(3, m).unwrap() > 0.0);
        }
    }
}
