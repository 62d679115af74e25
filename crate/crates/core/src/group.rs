//! Finite groups of signed isometries of ℝⁿ⁺¹, their orbits on Sⁿ, and the
//! structural assumptions needed for sign-changing equivariant test functions.
//!
//! The main instance is Γ_m, generated by the simultaneous rotation
//! `(z₁, z₂, x) ↦ (e^{2πi/m} z₁, e^{2πi/m} z₂, x)` (sign +1) and
//! `τ(z₁, z₂, x) = (−z̄₂, z̄₁, x)` (sign −1).
//!
//! The circle group Γ_∞ generated by all rotations `e^{iθ}` and τ is not
//! represented. Since Γ_m ⊂ Γ_∞, the least equivariant energy for φ_m never
//! exceeds the one for φ_∞.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sphere::{random_point, SpherePoint, SAME_POINT_TOL};

const MATRIX_MATCH_TOL: f64 = 1e-10;
const ORTHOGONALITY_TOL: f64 = 1e-12;
const MAX_GROUP_ORDER: usize = 10_000;

/// An orthogonal matrix paired with its value under the sign homomorphism φ.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedIsometry {
    matrix: DMatrix<f64>,
    sign: i8,
}

impl SignedIsometry {
    pub fn new(matrix: DMatrix<f64>, sign: i8) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("matrix", "must be square"));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::invalid("sign", format!("must be +1 or -1, got {sign}")));
        }
        let defect = (matrix.transpose() * &matrix - DMatrix::identity(matrix.nrows(), matrix.nrows()))
            .amax();
        if defect > ORTHOGONALITY_TOL {
            return Err(Error::invalid(
                "matrix",
                format!("not orthogonal (|MᵀM − I|∞ = {defect:e})"),
            ));
        }
        Ok(Self { matrix, sign })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n + 1, n + 1),
            sign: 1,
        }
    }

    /// `(z₁, z₂, x) ↦ (e^{iθ} z₁, e^{iθ} z₂, x)`, sign +1.
    pub fn rotation(n: usize, theta: f64) -> Result<Self> {
        check_dim(n)?;
        let (s, c) = theta.sin_cos();
        let mut m = DMatrix::identity(n + 1, n + 1);
        for k in [0, 2] {
            m[(k, k)] = c;
            m[(k, k + 1)] = -s;
            m[(k + 1, k)] = s;
            m[(k + 1, k + 1)] = c;
        }
        Ok(Self { matrix: m, sign: 1 })
    }

    /// `τ(z₁, z₂, x) = (−z̄₂, z̄₁, x)`, sign −1.
    pub fn tau(n: usize) -> Result<Self> {
        check_dim(n)?;
        let mut m = DMatrix::identity(n + 1, n + 1);
        for k in 0..4 {
            m[(k, k)] = 0.0;
        }
        m[(0, 2)] = -1.0;
        m[(1, 3)] = 1.0;
        m[(2, 0)] = 1.0;
        m[(3, 1)] = -1.0;
        Ok(Self { matrix: m, sign: -1 })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SignedIsometry) -> SignedIsometry {
        SignedIsometry {
            matrix: &self.matrix * &other.matrix,
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> SignedIsometry {
        SignedIsometry {
            matrix: self.matrix.transpose(),
            sign: self.sign,
        }
    }

    fn same_matrix(&self, other: &SignedIsometry) -> bool {
        (&self.matrix - &other.matrix).amax() < MATRIX_MATCH_TOL
    }

    fn is_identity(&self) -> bool {
        (&self.matrix - DMatrix::identity(self.matrix.nrows(), self.matrix.nrows())).amax()
            < MATRIX_MATCH_TOL
    }
}

/// Angle in [0, 2π) of a kernel element of Γ_m, read off its action on z₁.
fn rotation_angle(g: &SignedIsometry) -> f64 {
    let a = g.matrix[(1, 0)].atan2(g.matrix[(0, 0)]);
    if a < -1e-12 {
        a + 2.0 * PI
    } else {
        a.max(0.0)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the C x C x R^(n-3) splitting needs n + 1 >= 4",
        });
    }
    Ok(())
}

/// Apply `gamma` to `p`.
pub fn apply(gamma: &SignedIsometry, p: &SpherePoint) -> Result<SpherePoint> {
    if gamma.matrix.nrows() != p.coords().len() {
        return Err(Error::DimensionMismatch {
            expected: gamma.matrix.nrows(),
            got: p.coords().len(),
        });
    }
    let v = &gamma.matrix * p.coords();
    // Renormalize to absorb roundoff of the product.
    let norm = v.norm();
    Ok(SpherePoint::from_unit(v / norm))
}

/// A finite group of signed isometries.
///
/// Elements are stored as `g₁ = 1, g₂, …, g_k` (sign +1) followed by
/// `γ̂g₁, …, γ̂g_k` (sign −1) when φ is onto, where γ̂ is the first element of sign −1.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    n: usize,
    m: usize,
    elements: Vec<SignedIsometry>,
}

impl SymmetryGroup {
    /// Γ_m, the closure of `{e^{2πi/m}, τ}` with φ(rotation) = 1 and φ(τ) = −1.
    ///
    /// Because τ² = −1 on ℂ², the kernel of φ is G_m when m is even but G_{2m}
    /// when m is odd; the order is 2m or 4m accordingly. Kernel elements are
    /// sorted by rotation angle and the odd coset is listed as τ·g.
    pub fn gamma_m(n: usize, m: usize) -> Result<Self> {
        check_dim(n)?;
        if m < 1 {
            return Err(Error::invalid("m", "m must be at least 1"));
        }
        let generators = [
            SignedIsometry::rotation(n, 2.0 * PI / m as f64)?,
            SignedIsometry::tau(n)?,
        ];
        let mut group = Self::from_generators(n, &generators)?;
        let k = group.m;
        let mut plus = group.elements[..k].to_vec();
        plus.sort_by(|a, b| rotation_angle(a).total_cmp(&rotation_angle(b)));
        let tau = SignedIsometry::tau(n)?;
        let minus: Vec<SignedIsometry> = plus.iter().map(|g| tau.compose(g)).collect();
        group.elements = plus;
        group.elements.extend(minus);
        group.check_closure()?;
        Ok(group)
    }

    /// Closure of `generators` under composition.
    pub fn from_generators(n: usize, generators: &[SignedIsometry]) -> Result<Self> {
        check_dim(n)?;
        if let Some(g) = generators.iter().find(|g| g.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: g.dim() + 1,
            });
        }
        let mut elements = vec![SignedIsometry::identity(n)];
        let mut frontier = 0;
        while frontier < elements.len() {
            let current = elements[frontier].clone();
            for g in generators {
                let candidate = g.compose(&current);
                match elements.iter().find(|e| e.same_matrix(&candidate)) {
                    Some(existing) if existing.sign != candidate.sign => {
                        return Err(Error::NotClosed(
                            "the same isometry received both signs; φ is not a homomorphism".into(),
                        ));
                    }
                    Some(_) => {}
                    None => {
                        if elements.len() >= MAX_GROUP_ORDER {
                            return Err(Error::NotClosed(format!(
                                "generated more than {MAX_GROUP_ORDER} elements"
                            )));
                        }
                        elements.push(candidate);
                    }
                }
            }
            frontier += 1;
        }
        let (plus, minus): (Vec<_>, Vec<_>) = elements.into_iter().partition(|e| e.sign == 1);
        let m = plus.len();
        let mut ordered = plus.clone();
        if let Some(hat) = minus.first() {
            for g in &plus {
                let target = hat.compose(g);
                let found = minus
                    .iter()
                    .find(|e| e.same_matrix(&target))
                    .ok_or_else(|| Error::NotClosed("coset γ̂·ker φ incomplete".into()))?;
                ordered.push(found.clone());
            }
            if minus.len() != plus.len() {
                return Err(Error::NotClosed("cosets of ker φ have different sizes".into()));
            }
        }
        let group = Self {
            n,
            m,
            elements: ordered,
        };
        group.check_closure()?;
        Ok(group)
    }

    fn find(&self, g: &SignedIsometry) -> Option<&SignedIsometry> {
        self.elements.iter().find(|e| e.same_matrix(g))
    }

    /// Verifies closure under composition and inverses, and that signs multiply.
    pub fn check_closure(&self) -> Result<()> {
        if !self.elements[0].is_identity() || self.elements[0].sign != 1 {
            return Err(Error::NotClosed("first element must be the identity with sign +1".into()));
        }
        for a in &self.elements {
            let inv = a.inverse();
            match self.find(&inv) {
                Some(e) if e.sign == inv.sign => {}
                _ => return Err(Error::NotClosed("missing inverse".into())),
            }
            for b in &self.elements {
                let ab = a.compose(b);
                match self.find(&ab) {
                    Some(e) if e.sign == ab.sign => {}
                    Some(_) => return Err(Error::NotClosed("sign of a product does not multiply".into())),
                    None => return Err(Error::NotClosed("product outside the element list".into())),
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Order of ker φ (the number of sign +1 elements).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[SignedIsometry] {
        &self.elements
    }

    pub fn plus_elements(&self) -> &[SignedIsometry] {
        &self.elements[..self.m]
    }

    pub fn minus_elements(&self) -> &[SignedIsometry] {
        &self.elements[self.m..]
    }

    /// Elements fixing `p` (the isotropy group Γ_p).
    pub fn isotropy(&self, p: &SpherePoint) -> Result<Vec<&SignedIsometry>> {
        let mut out = Vec::new();
        for g in &self.elements {
            let gp = apply(g, p)?;
            if (gp.coords() - p.coords()).norm() < SAME_POINT_TOL {
                out.push(g);
            }
        }
        Ok(out)
    }
}

/// The orbit Γp split by sign.
///
/// For a free orbit `plus_points[j] = g_j p` and `minus_points[j] = γ̂ g_j p`;
/// a fixed point has `plus_points = [p]` and no minus points.
#[derive(Debug, Clone)]
pub struct SignedOrbit {
    pub base: SpherePoint,
    pub plus_points: Vec<SpherePoint>,
    pub minus_points: Vec<SpherePoint>,
}

impl SignedOrbit {
    pub fn is_free(&self) -> bool {
        !self.minus_points.is_empty() || self.plus_points.len() > 1
    }

    pub fn len(&self) -> usize {
        self.plus_points.len() + self.minus_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    /// All orbit points paired with their signs, plus points first.
    pub fn signed_points(&self) -> impl Iterator<Item = (&SpherePoint, f64)> {
        self.plus_points
            .iter()
            .map(|p| (p, 1.0))
            .chain(self.minus_points.iter().map(|q| (q, -1.0)))
    }
}

pub fn orbit(group: &SymmetryGroup, p: &SpherePoint) -> Result<SignedOrbit> {
    if p.dim() != group.n {
        return Err(Error::DimensionMismatch {
            expected: group.n + 1,
            got: p.coords().len(),
        });
    }
    let images: Vec<SpherePoint> = group
        .elements
        .iter()
        .map(|g| apply(g, p))
        .collect::<Result<_>>()?;
    let mut distinct: Vec<&SpherePoint> = Vec::new();
    for q in &images {
        if !distinct
            .iter()
            .any(|d| (d.coords() - q.coords()).norm() < SAME_POINT_TOL)
        {
            distinct.push(q);
        }
    }
    let order = group.order();
    match distinct.len() {
        1 => Ok(SignedOrbit {
            base: p.clone(),
            plus_points: vec![p.clone()],
            minus_points: Vec::new(),
        }),
        k if k == order => Ok(SignedOrbit {
            base: p.clone(),
            plus_points: images[..group.m].to_vec(),
            minus_points: images[group.m..].to_vec(),
        }),
        k => Err(Error::IsotropyViolation { size: k, order }),
    }
}

/// The points `g p` and `τ g p` for `g ∈ G_m` (rotations by multiples of 2π/m).
///
/// Plus points are `p_j = e^{2πij/m} p`, minus points `q_j = τ p_j`, j = 0..m−1.
/// For even m this is exactly the Γ_m-orbit of p. For odd m the Γ_m-orbit is
/// twice as large (it also contains `−p_j` and `−q_j`), and this configuration
/// is only G_m-invariant.
pub fn rotation_tau_configuration(n: usize, m: usize, p: &SpherePoint) -> Result<SignedOrbit> {
    check_dim(n)?;
    if m < 1 {
        return Err(Error::invalid("m", "m must be at least 1"));
    }
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: p.coords().len(),
        });
    }
    let c = p.as_slice();
    if c[..4].iter().all(|v| v.abs() < SAME_POINT_TOL) {
        return Err(Error::OrbitNotFree);
    }
    let tau = SignedIsometry::tau(n)?;
    let plus: Vec<SpherePoint> = (0..m)
        .map(|j| apply(&SignedIsometry::rotation(n, 2.0 * PI * j as f64 / m as f64)?, p))
        .collect::<Result<_>>()?;
    let minus = plus.iter().map(|q| apply(&tau, q)).collect::<Result<_>>()?;
    Ok(SignedOrbit {
        base: p.clone(),
        plus_points: plus,
        minus_points: minus,
    })
}

/// Outcome of [`check_assumptions`].
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    /// Some point has isotropy inside ker φ.
    pub a0: bool,
    /// Every isotropy group is either trivial or the whole group.
    pub a1: bool,
    /// φ is onto {±1}.
    pub a2: bool,
    pub a0_witness: Option<SpherePoint>,
    /// Result of the exact fixed-subspace analysis.
    pub a1_structural: bool,
    /// Result of the sampled orbit-size smoke test.
    pub a1_sampled: bool,
    pub samples_checked: usize,
}

const A1_SAMPLES: usize = 1000;

pub fn check_assumptions(group: &SymmetryGroup) -> Result<AssumptionReport> {
    let n = group.n;
    let a2 = group.elements.iter().any(|g| g.sign == -1);

    let mut candidates: Vec<SpherePoint> = Vec::new();
    candidates.push(SpherePoint::from_complex(n, (1.0, 0.0), (0.0, 0.0), &[])?);
    for i in 0..=n {
        candidates.push(SpherePoint::basis(n, i)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x00A0_A1A2);
    candidates.extend((0..16).map(|_| random_point(&mut rng, n)));
    let mut a0_witness = None;
    for c in &candidates {
        if group.isotropy(c)?.iter().all(|g| g.sign == 1) {
            a0_witness = Some(c.clone());
            break;
        }
    }

    let a1_structural = isotropy_dichotomy_exact(group);

    let mut samples = special_points(n, &mut rng)?;
    samples.extend((0..A1_SAMPLES).map(|_| random_point(&mut rng, n)));
    let mut a1_sampled = true;
    for p in &samples {
        let k = group.isotropy(p)?.len();
        if k != 1 && k != group.order() {
            a1_sampled = false;
            break;
        }
    }

    Ok(AssumptionReport {
        a0: a0_witness.is_some(),
        a1: a1_structural && a1_sampled,
        a2,
        a0_witness,
        a1_structural,
        a1_sampled,
        samples_checked: samples.len(),
    })
}

/// Each non-identity element's fixed subspace must be fixed by the whole group.
fn isotropy_dichotomy_exact(group: &SymmetryGroup) -> bool {
    let dim = group.n + 1;
    let id = DMatrix::<f64>::identity(dim, dim);
    for g in group.elements.iter().filter(|g| !g.is_identity()) {
        let svd = (g.matrix() - &id).svd(false, true);
        let Some(v_t) = svd.v_t else { return false };
        for (k, sv) in svd.singular_values.iter().enumerate() {
            if *sv > 1e-9 {
                continue;
            }
            let v: DVector<f64> = v_t.row(k).transpose();
            for h in &group.elements {
                if (h.matrix() * &v - &v).norm() > 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

/// Points with each nonempty pattern of vanishing blocks among z₁, z₂, x.
fn special_points(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<SpherePoint>> {
    use rand::Rng;
    let mut out = Vec::new();
    for mask in 1u8..8 {
        if mask & 4 != 0 && n == 3 {
            continue;
        }
        let mut c = vec![0.0; n + 1];
        for (i, slot) in c.iter_mut().enumerate() {
            let block = match i {
                0 | 1 => 1,
                2 | 3 => 2,
                _ => 4,
            };
            if mask & block != 0 {
                *slot = rng.sample(rand_distr::StandardNormal);
            }
        }
        out.push(SpherePoint::new(c)?);
        // Also the "real axis" representative of the pattern.
        let mut c = vec![0.0; n + 1];
        if mask & 1 != 0 {
            c[0] = 1.0;
        }
        if mask & 2 != 0 {
            c[2] = 1.0;
        }
        if mask & 4 != 0 {
            c[4] = 1.0;
        }
        out.push(SpherePoint::new(c)?);
    }
    Ok(out)
}

/// Checks `f(γp) = φ(γ) f(p)` on `sample_count` random points for every γ.
pub fn is_equivariant<F>(group: &SymmetryGroup, f: F, sample_count: usize) -> Result<bool>
where
    F: Fn(&SpherePoint) -> f64,
{
    if sample_count < 1 {
        return Err(Error::invalid("sample_count", "need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xE0_u64);
    for _ in 0..sample_count {
        let p = random_point(&mut rng, group.n);
        let fp = f(&p);
        for g in &group.elements {
            let fgp = f(&apply(g, &p)?);
            if (fgp - g.sign as f64 * fp).abs() > 1e-9 * (1.0 + fp.abs()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
