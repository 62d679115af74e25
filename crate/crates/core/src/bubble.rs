//! Concentrating bubbles `u_β` and the signed superposition `w_β` over an orbit.
//!
//! `u_β(q) = (β² − 1)^{(n−2)/4} (β − cos r)^{−(n−2)/2}` with `r = d(center, q)`.
//! The gap `β − cos r` is always formed as `(β − 1) + ½|q − c|²`, which keeps
//! full relative precision when both `β − 1` and `r` are small.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{rotation_tau_configuration, SignedOrbit};
use crate::quadrature::{integrate_zonal, QuadratureRule};
use crate::sphere::{SpherePoint, SphereConstants};

/// Smallest accepted `β − 1`; below it `(β − 1)^{−(n−2)/2}` leaves double range for large n.
pub const MIN_BETA_MINUS_ONE: f64 = 1e-8;

/// The radial profile of `u_β`, independent of the center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    n: usize,
    beta: f64,
    beta_minus_one: f64,
    amplitude: f64,
}

impl Profile {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension { n, reason: "bubbles need n >= 3" });
        }
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::DegenerateBubble { beta });
        }
        let beta_minus_one = beta - 1.0;
        if beta_minus_one < MIN_BETA_MINUS_ONE {
            return Err(Error::BubbleTooConcentrated { beta_minus_one });
        }
        let q = (n as f64 - 2.0) / 4.0;
        let amplitude = (beta_minus_one * (beta + 1.0)).powf(q);
        Ok(Self { n, beta, beta_minus_one, amplitude })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn beta_minus_one(&self) -> f64 {
        self.beta_minus_one
    }

    /// `β − cos r`, computed without cancellation.
    pub fn gap_at_distance(&self, r: f64) -> f64 {
        let s = (0.5 * r).sin();
        self.beta_minus_one + 2.0 * s * s
    }

    /// `β − ⟨q, c⟩` from the squared chord `|q − c|²`.
    pub fn gap_from_chord_sq(&self, chord_sq: f64) -> f64 {
        self.beta_minus_one + 0.5 * chord_sq
    }

    pub fn value_from_gap(&self, gap: f64) -> f64 {
        self.amplitude * gap.powf(-(self.n as f64 - 2.0) / 2.0)
    }

    pub fn value_at_distance(&self, r: f64) -> f64 {
        self.value_from_gap(self.gap_at_distance(r))
    }

    /// `du/dr = −(n−2)/2 · (β²−1)^{(n−2)/4} · sin r · (β − cos r)^{−n/2}`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        -r.sin() * self.derivative_over_sin(self.gap_at_distance(r))
    }

    /// `−(du/dr) / sin r` as a function of the gap; the ambient gradient of `u` is this times the center.
    pub fn derivative_over_sin(&self, gap: f64) -> f64 {
        let n = self.n as f64;
        0.5 * (n - 2.0) * self.amplitude * gap.powf(-0.5 * n)
    }

    /// `((β+1)/(β−1))^{(n−2)/4}`, attained at the center.
    pub fn max_value(&self) -> f64 {
        ((self.beta + 1.0) / self.beta_minus_one).powf((self.n as f64 - 2.0) / 4.0)
    }

    /// `((β−1)/(β+1))^{(n−2)/4}`, attained at the antipode.
    pub fn min_value(&self) -> f64 {
        self.max_value().recip()
    }

    /// Natural length scale `√(β − 1)` of the concentration.
    pub fn scale(&self) -> f64 {
        self.beta_minus_one.sqrt()
    }
}

/// A bubble centered at a point of Sⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Bubble {
    center: SpherePoint,
    profile: Profile,
}

impl Bubble {
    pub fn new(n: usize, center: SpherePoint, beta: f64) -> Result<Self> {
        if center.dim() != n {
            return Err(Error::DimensionMismatch { expected: n + 1, got: center.coords().len() });
        }
        Ok(Self { center, profile: Profile::new(n, beta)? })
    }

    /// Bubble centered at the first basis vector.
    pub fn at_pole(n: usize, beta: f64) -> Result<Self> {
        let center = SpherePoint::basis(n, 0)?;
        Self::new(n, center, beta)
    }

    pub fn n(&self) -> usize {
        self.profile.n
    }

    pub fn beta(&self) -> f64 {
        self.profile.beta
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn value(&self, q: &SpherePoint) -> Result<f64> {
        if q.dim() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n() + 1, got: q.coords().len() });
        }
        let chord_sq = (q.coords() - self.center.coords()).norm_squared();
        Ok(self.profile.value_from_gap(self.profile.gap_from_chord_sq(chord_sq)))
    }

    pub fn radial_derivative(&self, r: f64) -> f64 {
        self.profile.radial_derivative(r)
    }
}

/// `w_β = Σ_j u_{p_j,β} − Σ_j u_{q_j,β}` over a signed orbit.
#[derive(Debug, Clone)]
pub struct NodalAnsatz {
    n: usize,
    orbit: SignedOrbit,
    profile: Profile,
    centers: Vec<(DVector<f64>, f64)>,
    standard: bool,
}

impl NodalAnsatz {
    pub fn new(n: usize, beta: f64, orbit: SignedOrbit) -> Result<Self> {
        if orbit.dim() != n {
            return Err(Error::DimensionMismatch { expected: n + 1, got: orbit.base.coords().len() });
        }
        if !orbit.is_free() || orbit.minus_points.is_empty() {
            return Err(Error::OrbitNotFree);
        }
        let profile = Profile::new(n, beta)?;
        let centers = orbit
            .signed_points()
            .map(|(c, s)| (c.coords().clone(), s))
            .collect();
        Ok(Self { n, orbit, profile, centers, standard: false })
    }

    /// The m-fold configuration `{g p, τ g p}` at `p = (1, 0, …, 0)`.
    pub fn standard(n: usize, m: usize, beta: f64) -> Result<Self> {
        let p = SpherePoint::basis(n, 0)?;
        let orbit = rotation_tau_configuration(n, m, &p)?;
        let mut w = Self::new(n, beta, orbit)?;
        w.standard = true;
        Ok(w)
    }

    /// Built by [`NodalAnsatz::standard`], so the folded product grid applies.
    pub fn is_standard(&self) -> bool {
        self.standard
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.orbit.plus_points.len()
    }

    pub fn beta(&self) -> f64 {
        self.profile.beta
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn orbit(&self) -> &SignedOrbit {
        &self.orbit
    }

    /// Whether the orbit is stable under the full Γ_m (true for even m).
    ///
    /// For odd m, Γ_m contains −1 and the orbit would have 4m points; `w_β` is
    /// then only G_m-invariant and odd under `(z₁, z₂) ↦ (z̄₂, z̄₁)`.
    pub fn gamma_m_equivariant(&self) -> bool {
        self.m().is_multiple_of(2)
    }

    fn check_point(&self, q: &SpherePoint) -> Result<()> {
        if q.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n + 1, got: q.coords().len() });
        }
        Ok(())
    }

    pub fn value(&self, q: &SpherePoint) -> Result<f64> {
        self.check_point(q)?;
        let x = q.coords();
        Ok(self
            .centers
            .iter()
            .map(|(c, s)| s * self.profile.value_from_gap(self.profile.gap_from_chord_sq((x - c).norm_squared())))
            .sum())
    }

    /// Riemannian gradient as an ambient tangent vector: the signed sum of
    /// the radial bubble gradients `(du/dr) ∇r`.
    pub fn gradient(&self, q: &SpherePoint) -> Result<DVector<f64>> {
        self.check_point(q)?;
        let x = q.coords();
        let mut g = DVector::zeros(self.n + 1);
        for (c, s) in &self.centers {
            let gap = self.profile.gap_from_chord_sq((x - c).norm_squared());
            // ∇r = −(c − ⟨c,x⟩x)/sin r and du/dr = −sin r · k
            let k = self.profile.derivative_over_sin(gap);
            let t = c.dot(x);
            g += (s * k) * (c - t * x);
        }
        Ok(g)
    }
}

/// Outcome of [`solution_identity_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionIdentityReport {
    pub n: usize,
    pub beta: f64,
    /// `∫ u_β^{2*} dV`
    pub mass: f64,
    pub omega_n: f64,
    pub mass_relative_error: f64,
    /// `∫ |∇u_β|² + a_n u_β² dV`
    pub h1_norm_sq: f64,
    /// `a_n ω_n`
    pub h1_expected: f64,
    pub h1_relative_error: f64,
}

impl SolutionIdentityReport {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.mass_relative_error <= tolerance && self.h1_relative_error <= tolerance
    }
}

/// Checks `∫ u_β^{2*} = ω_n` and `‖u_β‖² = a_n ω_n` by zonal quadrature.
pub fn solution_identity_check(b: &Bubble, rule: &QuadratureRule) -> Result<SolutionIdentityReport> {
    let n = b.n();
    let k = SphereConstants::new(n)?;
    let p = *b.profile();
    let rule = rule.with_concentration(p.scale());
    let mass = integrate_zonal(n, |r| p.value_at_distance(r).powf(k.two_star), &rule)?;
    let h1 = integrate_zonal(
        n,
        |r| {
            let u = p.value_at_distance(r);
            let du = p.radial_derivative(r);
            du * du + k.a_n * u * u
        },
        &rule,
    )?;
    let h1_expected = k.a_n * k.omega_n;
    Ok(SolutionIdentityReport {
        n,
        beta: p.beta,
        mass,
        omega_n: k.omega_n,
        mass_relative_error: ((mass - k.omega_n) / k.omega_n).abs(),
        h1_norm_sq: h1,
        h1_expected,
        h1_relative_error: ((h1 - h1_expected) / h1_expected).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use crate::group::{apply, is_equivariant, SignedIsometry, SymmetryGroup};
    use crate::sphere::{geodesic_distance, random_point};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn center_value() {
        let b = Bubble::at_pole(3, 2.0).unwrap();
        assert_relative_eq!(b.value(b.center()).unwrap(), 3f64.powf(0.25), max_relative = 1e-15);
        assert_relative_eq!(b.profile().max_value(), 3f64.powf(0.25), max_relative = 1e-15);
        let anti = b.center().antipode();
        assert_relative_eq!(b.value(&anti).unwrap(), b.profile().min_value(), max_relative = 1e-14);
    }

    #[test]
    fn large_beta_tends_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 3..8 {
            let b = Bubble::at_pole(n, 1e6).unwrap();
            for _ in 0..20 {
                let q = random_point(&mut rng, n);
                assert!((b.value(&q).unwrap() - 1.0).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn antipodal_product() {
        for n in [3usize, 4, 7] {
            let p = Profile::new(n, 1.3).unwrap();
            let beta: f64 = 1.3;
            for k in 0..=20 {
                let r = PI * k as f64 / 20.0;
                let prod = p.value_at_distance(r) * p.value_at_distance(PI - r);
                let c = r.cos();
                let oracle = ((beta * beta - 1.0) / (beta * beta - c * c)).powf((n as f64 - 2.0) / 2.0);
                assert_relative_eq!(prod, oracle, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn profile_is_decreasing() {
        let p = Profile::new(5, 1.05).unwrap();
        let vals: Vec<f64> = (0..=200).map(|k| p.value_at_distance(PI * k as f64 / 200.0)).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn radial_derivative_matches_finite_differences() {
        let h = 1e-5;
        for (n, beta) in [(4usize, 1.5f64), (3, 1.1), (6, 2.5)] {
            let p = Profile::new(n, beta).unwrap();
            for k in 1..=20 {
                let r = PI * k as f64 / 21.0;
                let fd = (p.value_at_distance(r + h) - p.value_at_distance(r - h)) / (2.0 * h);
                assert_relative_eq!(p.radial_derivative(r), fd, max_relative = 1e-6);
            }
        }
        let p = Profile::new(4, 1.5).unwrap();
        assert_eq!(p.radial_derivative(0.0), 0.0);
        assert!(p.radial_derivative(PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(matches!(Profile::new(3, 1.0), Err(Error::DegenerateBubble { .. })));
        assert!(matches!(Profile::new(3, 0.5), Err(Error::DegenerateBubble { .. })));
        assert!(matches!(Profile::new(3, f64::NAN), Err(Error::DegenerateBubble { .. })));
        assert!(matches!(Profile::new(3, 1.0 + 1e-9), Err(Error::BubbleTooConcentrated { .. })));
        assert!(Profile::new(3, 1.0 + 2e-8).is_ok());
    }

    #[test]
    fn ansatz_vanishes_off_the_complex_plane() {
        for n in [4usize, 5, 7] {
            let w = NodalAnsatz::standard(n, 5, 1.2).unwrap();
            let mut tail = vec![0.0; n - 3];
            tail[0] = 1.0;
            let q = SpherePoint::from_complex(n, (0.0, 0.0), (0.0, 0.0), &tail).unwrap();
            assert!(w.value(&q).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn sign_near_centers() {
        let n = 3;
        for m in [2usize, 5, 9] {
            let w = NodalAnsatz::standard(n, m, 1.01).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            for (c, s) in w.orbit().signed_points() {
                assert!(s * w.value(c).unwrap() > 0.0);
                for _ in 0..10 {
                    // a point within 0.05 of the center
                    let d = random_point(&mut rng, n);
                    let q = SpherePoint::new((c.coords() + 0.05 * d.coords()).as_slice().to_vec()).unwrap();
                    assert!(geodesic_distance(c, &q).unwrap() < 0.06);
                    assert!(s * w.value(&q).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn equivariance_for_even_m() {
        for (n, m) in [(3usize, 2usize), (4, 6), (5, 4)] {
            let g = SymmetryGroup::gamma_m(n, m).unwrap();
            let w = NodalAnsatz::standard(n, m, 1.3).unwrap();
            assert!(w.gamma_m_equivariant());
            assert!(is_equivariant(&g, |q| w.value(q).unwrap(), 200).unwrap());
        }
    }

    #[test]
    fn odd_m_symmetry() {
        let (n, m) = (4usize, 5usize);
        let w = NodalAnsatz::standard(n, m, 1.3).unwrap();
        assert!(!w.gamma_m_equivariant());
        let g = SymmetryGroup::gamma_m(n, m).unwrap();
        assert!(!is_equivariant(&g, |q| w.value(q).unwrap(), 20).unwrap());
        // invariant under the rotations, odd under the swap (z₁, z₂) ↦ (z̄₂, z̄₁)
        let rot = SignedIsometry::rotation(n, 2.0 * PI / m as f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let q = random_point(&mut rng, n);
            let v = w.value(&q).unwrap();
            assert_relative_eq!(w.value(&apply(&rot, &q).unwrap()).unwrap(), v, epsilon = 1e-12, max_relative = 1e-10);
            let c = q.as_slice();
            let mut s = c.to_vec();
            s[0] = c[2];
            s[1] = -c[3];
            s[2] = c[0];
            s[3] = -c[1];
            let sq = SpherePoint::new(s).unwrap();
            assert_relative_eq!(w.value(&sq).unwrap(), -v, epsilon = 1e-12, max_relative = 1e-10);
        }
    }

    #[test]
    fn two_term_case() {
        let n = 3;
        let w = NodalAnsatz::standard(n, 1, 1.4).unwrap();
        let p = Bubble::new(n, w.orbit().plus_points[0].clone(), 1.4).unwrap();
        let tp = Bubble::new(n, w.orbit().minus_points[0].clone(), 1.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let q = random_point(&mut rng, n);
            assert_relative_eq!(
                w.value(&q).unwrap(),
                p.value(&q).unwrap() - tp.value(&q).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn gradient_matches_finite_differences_and_is_tangent() {
        let n = 4;
        let w = NodalAnsatz::standard(n, 3, 1.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..20 {
            let q = random_point(&mut rng, n);
            let g = w.gradient(&q).unwrap();
            assert!(g.dot(q.coords()).abs() < 1e-10 * (1.0 + g.norm()));
            // directional derivative along a random tangent direction through the exponential map
            let d = random_point(&mut rng, n);
            let mut v = d.coords() - d.coords().dot(q.coords()) * q.coords();
            v /= v.norm();
            let along = |t: f64| {
                let x = q.coords() * t.cos() + &v * t.sin();
                w.value(&SpherePoint::new(x.as_slice().to_vec()).unwrap()).unwrap()
            };
            let fd = (along(h) - along(-h)) / (2.0 * h);
            assert_relative_eq!(g.dot(&v), fd, epsilon = 1e-6, max_relative = 1e-6);
        }
    }

    #[test]
    fn solution_identity() {
        let rule = QuadratureRule::zonal(16).unwrap();
        for n in 3..=6 {
            for beta in [1.01, 1.5, 3.0, 10.0] {
                let b = Bubble::at_pole(n, beta).unwrap();
                let rep = solution_identity_check(&b, &rule).unwrap();
                assert!(rep.holds(1e-10), "{rep:?}");
            }
        }
        let flat = Bubble::at_pole(4, 1e6).unwrap();
        let rep = solution_identity_check(&flat, &rule).unwrap();
        assert!(rep.holds(1e-10));
    }
}
