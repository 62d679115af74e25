//! The Yamabe functional on the signed superposition `w_β`: H¹ norms, the
//! critical mass `∫|w|^{2*}`, Nehari scaling, the quotient `Y_n`, and sweeps in β.
//!
//! `‖w‖² = a_n Σ_{k,l} s_k s_l I(θ_kl)` with `I(θ) = ∫ u_p u_q^{2*−1}` for centers at
//! angle θ, which holds because each bubble solves `−Δu + a_n u = a_n u^{2*−1}`.
//! The direct gradient integral is kept as an independent check.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::bubble::{NodalAnsatz, Profile};
use crate::criterion::CriterionResult;
use crate::error::{Error, Result};
use crate::quadrature::{
    ball_restricted_zonal, integrate_bizonal, integrate_folded, integrate_mc, integrate_product_grid,
    integrate_zonal, BallRegion, QuadratureKind, QuadratureRule, SplitIntegrand,
};
use crate::sphere::{geodesic_distance, SphereConstants, SpherePoint};
use crate::summation::Neumaier;

/// Resolution of the bizonal pair integrals when the main rule is Monte Carlo.
pub const DEFAULT_PAIR_RESOLUTION: usize = 16;
/// Angles closer than this share one pair integral.
const ANGLE_KEY_SCALE: f64 = 1e9;

fn pair_rule(rule: &QuadratureRule, profile: &Profile) -> Result<QuadratureRule> {
    let res = match rule.kind {
        QuadratureKind::MonteCarlo => DEFAULT_PAIR_RESOLUTION,
        _ => rule.resolution,
    };
    Ok(QuadratureRule::bizonal(res)?.with_concentration(profile.scale()))
}

/// `I(θ) = ∫ u_{p,β} u_{q,β}^{2*−1} dV` for `d(p, q) = θ`.
pub fn pair_integral(profile: &Profile, theta: f64, rule: &QuadratureRule) -> Result<f64> {
    let k = SphereConstants::new(profile.n())?;
    let e = k.two_star - 1.0;
    let rule = pair_rule(rule, profile)?;
    if theta == 0.0 {
        let zr = QuadratureRule::zonal(rule.resolution)?.with_concentration(profile.scale());
        return integrate_zonal(profile.n(), |r| profile.value_at_distance(r).powf(k.two_star), &zr);
    }
    let (st, bm1) = (theta.sin(), profile.beta_minus_one());
    integrate_bizonal(
        profile.n(),
        theta,
        |r, psi| {
            let gp = profile.gap_at_distance(r);
            // 1 − cos d(x, q) without cancellation
            let h = (0.5 * (r - theta)).sin();
            let s = (0.5 * psi).sin();
            let gq = bm1 + 2.0 * h * h + 2.0 * r.sin() * st * s * s;
            profile.value_from_gap(gp) * profile.value_from_gap(gq).powf(e)
        },
        &rule,
    )
}

/// ‖w_β‖² through the pairing identity, one bizonal integral per distinct center angle.
pub fn h1_norm_sq_pairing(w: &NodalAnsatz, rule: &QuadratureRule) -> Result<f64> {
    let k = SphereConstants::new(w.n())?;
    let centers: Vec<(&SpherePoint, f64)> = w.orbit().signed_points().collect();
    // angle key → (angle, signed multiplicity, first pair seen)
    let mut groups: BTreeMap<i64, (f64, f64, (usize, usize))> = BTreeMap::new();
    for (i, (ci, si)) in centers.iter().enumerate() {
        for (j, (cj, sj)) in centers.iter().enumerate() {
            let theta = if i == j { 0.0 } else { geodesic_distance(ci, cj)? };
            let key = (theta * ANGLE_KEY_SCALE).round() as i64;
            let entry = groups.entry(key).or_insert((theta, 0.0, (i, j)));
            entry.1 += si * sj;
        }
    }
    let mut acc = Neumaier::new();
    for (theta, mult, (i, j)) in groups.into_values() {
        if mult == 0.0 {
            continue;
        }
        let value = pair_integral(w.profile(), theta, rule).map_err(|e| Error::Pair { i, j, source: Box::new(e) })?;
        acc.add(mult * value);
    }
    Ok(k.a_n * acc.value())
}

fn ring(m: usize, conj: bool) -> Vec<[f64; 2]> {
    (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            [t.cos(), if conj { -t.sin() } else { t.sin() }]
        })
        .collect()
}

/// Folded-grid integrands for the standard configuration: plus centers
/// `e^{2πij/m}` in the z₁-plane, minus centers `e^{−2πij/m}` in the z₂-plane.
struct Folded {
    profile: Profile,
    a_n: f64,
    two_star: f64,
    plus: Vec<[f64; 2]>,
    minus: Vec<[f64; 2]>,
}

/// Bubble sum over one ring: value, ambient gradient coefficient `Σ k_j c_j`, and `Σ k_j ⟨c_j, x⟩`.
#[derive(Clone, Copy)]
struct RingPart {
    value: f64,
    grad: [f64; 2],
    radial: f64,
}

impl Folded {
    fn new(w: &NodalAnsatz) -> Result<Self> {
        let k = SphereConstants::new(w.n())?;
        Ok(Self {
            profile: *w.profile(),
            a_n: k.a_n,
            two_star: k.two_star,
            plus: ring(w.m(), false),
            minus: ring(w.m(), true),
        })
    }

    fn gap(&self, z: [f64; 2], rest_sq: f64, c: &[f64; 2]) -> f64 {
        let d0 = z[0] - c[0];
        let d1 = z[1] - c[1];
        self.profile.gap_from_chord_sq(d0 * d0 + d1 * d1 + rest_sq)
    }

    fn value(&self, z: [f64; 2], rest_sq: f64, centers: &[[f64; 2]]) -> f64 {
        centers
            .iter()
            .map(|c| self.profile.value_from_gap(self.gap(z, rest_sq, c)))
            .sum()
    }

    fn part(&self, z: [f64; 2], rest_sq: f64, centers: &[[f64; 2]]) -> RingPart {
        let mut out = RingPart { value: 0.0, grad: [0.0; 2], radial: 0.0 };
        for c in centers {
            let gap = self.gap(z, rest_sq, c);
            let k = self.profile.derivative_over_sin(gap);
            out.value += self.profile.value_from_gap(gap);
            out.grad[0] += k * c[0];
            out.grad[1] += k * c[1];
            // ⟨c, x⟩ = β − gap
            out.radial += k * (self.profile.beta() - gap);
        }
        out
    }
}

struct MassIntegrand(Folded);

impl SplitIntegrand for MassIntegrand {
    type Plus = f64;
    type Minus = f64;
    fn plus_part(&self, z1: [f64; 2], rest_sq: f64) -> f64 {
        self.0.value(z1, rest_sq, &self.0.plus)
    }
    fn minus_part(&self, z2: [f64; 2], rest_sq: f64) -> f64 {
        self.0.value(z2, rest_sq, &self.0.minus)
    }
    fn combine(&self, _: [f64; 4], _: f64, a: &f64, b: &f64) -> f64 {
        (a - b).abs().powf(self.0.two_star)
    }
}

struct DirectIntegrand(Folded);

impl SplitIntegrand for DirectIntegrand {
    type Plus = RingPart;
    type Minus = RingPart;
    fn plus_part(&self, z1: [f64; 2], rest_sq: f64) -> RingPart {
        self.0.part(z1, rest_sq, &self.0.plus)
    }
    fn minus_part(&self, z2: [f64; 2], rest_sq: f64) -> RingPart {
        self.0.part(z2, rest_sq, &self.0.minus)
    }
    fn combine(&self, x: [f64; 4], tail: f64, a: &RingPart, b: &RingPart) -> f64 {
        // tangent vector G − T x with G = (Σ⁺ k c) − (Σ⁻ k c), T = Σ⁺ k⟨c,x⟩ − Σ⁻ k⟨c,x⟩
        let t = a.radial - b.radial;
        let v = [
            a.grad[0] - t * x[0],
            a.grad[1] - t * x[1],
            -b.grad[0] - t * x[2],
            -b.grad[1] - t * x[3],
        ];
        let tail_part = t * tail;
        let grad_sq = v.iter().map(|c| c * c).sum::<f64>() + tail_part * tail_part;
        let w = a.value - b.value;
        grad_sq + self.0.a_n * w * w
    }
}

fn folded_rule(rule: &QuadratureRule, w: &NodalAnsatz) -> QuadratureRule {
    rule.with_concentration(w.profile().scale())
}

/// Integrates `f(w(x), ∇w(x))` by the general-purpose rules (generic grid or Monte Carlo).
fn integrate_pointwise<F>(w: &NodalAnsatz, rule: &QuadratureRule, f: F) -> Result<f64>
where
    F: Fn(&SpherePoint) -> f64 + Sync,
{
    let n = w.n();
    let eval = |x: &[f64]| match SpherePoint::new(x.to_vec()) {
        Ok(q) => f(&q),
        Err(_) => f64::NAN,
    };
    match rule.kind {
        QuadratureKind::MonteCarlo => integrate_mc(n, eval, rule).map(|(est, _)| est),
        _ => integrate_product_grid(n, eval, rule),
    }
}

/// `∫ |w_β|^{2*} dV`.
///
/// The standard configuration uses the folded product grid (any n) unless a
/// Monte Carlo rule is given; other orbits use the generic grid (n ≤ 5) or Monte Carlo.
pub fn lp_mass(w: &NodalAnsatz, rule: &QuadratureRule) -> Result<f64> {
    let two_star = SphereConstants::new(w.n())?.two_star;
    if w.is_standard() && rule.kind != QuadratureKind::MonteCarlo {
        return integrate_folded(w.n(), w.m(), &MassIntegrand(Folded::new(w)?), &folded_rule(rule, w));
    }
    integrate_pointwise(w, rule, |q| w.value(q).map(|v| v.abs().powf(two_star)).unwrap_or(f64::NAN))
}

/// `‖w_β‖² = ∫ |∇w|² + a_n w² dV` from pointwise gradients.
pub fn h1_norm_sq_direct(w: &NodalAnsatz, rule: &QuadratureRule) -> Result<f64> {
    let a_n = SphereConstants::new(w.n())?.a_n;
    if w.is_standard() && rule.kind != QuadratureKind::MonteCarlo {
        return integrate_folded(w.n(), w.m(), &DirectIntegrand(Folded::new(w)?), &folded_rule(rule, w));
    }
    integrate_pointwise(w, rule, |q| match (w.value(q), w.gradient(q)) {
        (Ok(v), Ok(g)) => g.norm_squared() + a_n * v * v,
        _ => f64::NAN,
    })
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// `t` with `‖tw‖² = a_n ∫|tw|^{2*}`: `t = (h1 / (a_n · mass))^{1/(2*−2)}`.
pub fn nehari_scale(h1_sq: f64, lp_mass: f64, n: usize) -> Result<f64> {
    positive("h1_sq", h1_sq)?;
    positive("lp_mass", lp_mass)?;
    let k = SphereConstants::new(n)?;
    Ok((h1_sq / (k.a_n * lp_mass)).powf(1.0 / (k.two_star - 2.0)))
}

/// `Y_n = ‖w‖² / (a_n ∫|w|^{2*})^{2/2*}`.
pub fn quotient(h1_sq: f64, lp_mass: f64, n: usize) -> Result<f64> {
    positive("h1_sq", h1_sq)?;
    positive("lp_mass", lp_mass)?;
    let k = SphereConstants::new(n)?;
    Ok(h1_sq / (k.a_n * lp_mass).powf(2.0 / k.two_star))
}

/// `J_n(tw) = (1/n) Y^{n/2}` on the Nehari manifold.
pub fn energy_from_quotient(y: f64, n: usize) -> f64 {
    y.powf(n as f64 / 2.0) / n as f64
}

/// `J_n(u) = ½‖u‖² − (a_n/2*) ∫|u|^{2*}` evaluated from its definition.
pub fn functional(h1_sq: f64, lp_mass: f64, n: usize) -> Result<f64> {
    let k = SphereConstants::new(n)?;
    Ok(0.5 * h1_sq - k.a_n / k.two_star * lp_mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    /// ‖w_β‖² from the pairing identity
    pub h1_norm_sq: f64,
    /// ‖w_β‖² from pointwise gradients
    pub h1_norm_sq_direct: f64,
    /// relative difference of the two H¹ computations
    pub h1_relative_gap: f64,
    /// ∫|w_β|^{2*}
    pub lp_mass: f64,
    pub nehari_t: f64,
    pub quotient: f64,
    /// J_n(t_β w_β)
    pub energy: f64,
    /// 2m c_n
    pub bound: f64,
    /// (bound − energy) / bound
    pub margin: f64,
    /// ∫|t_β w_β|^{2*} = n J / a_n, to compare with 2m ω_n
    pub nehari_mass: f64,
    pub mass_bound: f64,
    pub certified: bool,
    /// energy exceeds 2c_n, as it must for a sign-changing function with symmetric parts
    pub above_nodal_floor: bool,
    pub gamma_m_equivariant: bool,
}

pub fn energy_report(n: usize, m: usize, beta: f64, rule: &QuadratureRule) -> Result<EnergyReport> {
    let w = NodalAnsatz::standard(n, m, beta)?;
    report_for(&w, rule)
}

pub fn report_for(w: &NodalAnsatz, rule: &QuadratureRule) -> Result<EnergyReport> {
    let n = w.n();
    let m = w.m();
    let k = SphereConstants::new(n)?;
    let h1 = h1_norm_sq_pairing(w, rule)?;
    let h1_direct = h1_norm_sq_direct(w, rule)?;
    let mass = lp_mass(w, rule)?;
    let t = nehari_scale(h1, mass, n)?;
    let y = quotient(h1, mass, n)?;
    let energy = energy_from_quotient(y, n);
    let bound = 2.0 * m as f64 * k.c_n;
    Ok(EnergyReport {
        n,
        m,
        beta: w.beta(),
        h1_norm_sq: h1,
        h1_norm_sq_direct: h1_direct,
        h1_relative_gap: ((h1 - h1_direct) / h1).abs(),
        lp_mass: mass,
        nehari_t: t,
        quotient: y,
        energy,
        bound,
        margin: (bound - energy) / bound,
        nehari_mass: n as f64 * energy / k.a_n,
        mass_bound: 2.0 * m as f64 * k.omega_n,
        certified: energy < bound,
        above_nodal_floor: energy > 2.0 * k.c_n,
        gamma_m_equivariant: w.gamma_m_equivariant(),
    })
}

/// Log-spaced `β − 1` values from `lo` to `hi` inclusive.
pub fn log_beta_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![1.0 + lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| 1.0 + (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Default sweep: 12 values of `β − 1` log-spaced in `[10⁻³, 0.5]`.
pub fn default_beta_grid() -> Vec<f64> {
    log_beta_grid(1e-3, 0.5, 12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub n: usize,
    pub m: usize,
    pub certified: bool,
    /// β with the largest margin
    pub best_beta: f64,
    pub best_margin: f64,
    pub min_quotient: f64,
    pub best_nehari_mass: f64,
    pub mass_bound: f64,
    pub max_h1_relative_gap: f64,
}

/// Energy reports over a β grid plus a summary of the best β.
pub fn sweep(n: usize, m: usize, betas: &[f64], rule: &QuadratureRule) -> Result<(Vec<EnergyReport>, SweepSummary)> {
    if betas.is_empty() {
        return Err(Error::invalid("beta_grid", "empty"));
    }
    let reports: Vec<EnergyReport> = betas
        .iter()
        .map(|&b| energy_report(n, m, b, rule))
        .collect::<Result<_>>()?;
    let best = reports
        .iter()
        .max_by(|a, b| a.margin.total_cmp(&b.margin))
        .expect("non-empty");
    let summary = SweepSummary {
        n,
        m,
        certified: reports.iter().any(|r| r.certified),
        best_beta: best.beta,
        best_margin: best.margin,
        min_quotient: reports.iter().map(|r| r.quotient).fold(f64::INFINITY, f64::min),
        best_nehari_mass: best.nehari_mass,
        mass_bound: best.mass_bound,
        max_h1_relative_gap: reports.iter().map(|r| r.h1_relative_gap).fold(0.0, f64::max),
    };
    Ok((reports, summary))
}

/// Half the smallest distance between orbit points.
pub fn default_delta(w: &NodalAnsatz) -> Result<f64> {
    let pts: Vec<&SpherePoint> = w.orbit().signed_points().map(|(p, _)| p).collect();
    let mut best = PI;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            best = best.min(geodesic_distance(pts[i], pts[j])?);
        }
    }
    Ok(0.5 * best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma31Row {
    pub n: usize,
    pub beta: f64,
    pub delta: f64,
    /// ∫_{B_δ} u_β^{2*−1}
    pub ball: f64,
    /// 2^{(3n+2)/4} ω_{n−1}/n · (β−1)^{(n−2)/4}
    pub leading: f64,
    pub ratio: f64,
    /// ∫ outside B_δ of u_β^{2*−1}
    pub complement: f64,
    /// complement / (β−1)^{(n+2)/4}
    pub complement_scaled: f64,
}

/// Ball and complement integrals of `u_β^{2*−1}` against the predicted orders.
pub fn lemma31_convergence(n: usize, betas: &[f64], delta: f64, rule: &QuadratureRule) -> Result<Vec<Lemma31Row>> {
    let k = SphereConstants::new(n)?;
    let nf = n as f64;
    betas
        .iter()
        .map(|&beta| {
            let p = Profile::new(n, beta)?;
            let r = rule.with_concentration(p.scale());
            let f = |r: f64| p.value_at_distance(r).powf(k.two_star - 1.0);
            let ball = ball_restricted_zonal(n, delta, BallRegion::Ball, f, &r)?;
            let complement = ball_restricted_zonal(n, delta, BallRegion::Complement, f, &r)?;
            let eps = p.beta_minus_one();
            let leading = 2f64.powf((3.0 * nf + 2.0) / 4.0) * k.omega_nm1 / nf * eps.powf((nf - 2.0) / 4.0);
            Ok(Lemma31Row {
                n,
                beta,
                delta,
                ball,
                leading,
                ratio: ball / leading,
                complement,
                complement_scaled: complement / eps.powf((nf + 2.0) / 4.0),
            })
        })
        .collect()
}

/// Richardson extrapolation of the ‖w_β‖² expansion slope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeReport {
    pub n: usize,
    pub m: usize,
    /// `(β − 1, slope)` samples
    pub samples: Vec<(f64, f64)>,
    pub extrapolated: f64,
    /// `2^{n+1} a_n ω_{n−1}/n · (μ − μ̂)`
    pub target: f64,
    pub relative_error: f64,
    /// estimated order p of the leading correction `c ε^p`, from three geometric samples
    pub empirical_order: Option<f64>,
}

/// Extrapolates `samples (ε_i, S_i)` with geometric ratio 2 assuming corrections of order ε.
fn richardson(samples: &[(f64, f64)]) -> f64 {
    // repeated first-order elimination on the finest samples
    let mut level: Vec<f64> = samples.iter().map(|s| s.1).collect();
    if level.len() >= 2 {
        level = level.windows(2).map(|w| 2.0 * w[0] - w[1]).collect();
    }
    level[0]
}

fn empirical_order(samples: &[(f64, f64)]) -> Option<f64> {
    if samples.len() < 3 {
        return None;
    }
    let (s0, s1, s2) = (samples[0].1, samples[1].1, samples[2].1);
    let q = (s2 - s1) / (s1 - s0);
    (q > 0.0 && q.is_finite()).then(|| q.log2())
}

/// Slope `(‖w_β‖² − 2m a_n ω_n)/(β−1)^{(n−2)/2}` at increasing `β − 1` values
/// (a geometric sequence with ratio 2, finest first), extrapolated to `β → 1`.
pub fn norm_expansion_slope(n: usize, m: usize, eps: &[f64], rule: &QuadratureRule) -> Result<SlopeReport> {
    let k = SphereConstants::new(n)?;
    let crit = CriterionResult::evaluate(n, m)?;
    let base = 2.0 * m as f64 * k.a_n * k.omega_n;
    let power = (n as f64 - 2.0) / 2.0;
    let samples: Vec<(f64, f64)> = eps
        .iter()
        .map(|&e| {
            let w = NodalAnsatz::standard(n, m, 1.0 + e)?;
            let h1 = h1_norm_sq_pairing(&w, rule)?;
            Ok((e, (h1 - base) / e.powf(power)))
        })
        .collect::<Result<_>>()?;
    let target = 2f64.powi(n as i32 + 1) * k.a_n * k.omega_nm1 / n as f64 * (crit.mu - crit.mu_hat);
    let extrapolated = richardson(&samples);
    Ok(SlopeReport {
        n,
        m,
        empirical_order: empirical_order(&samples),
        relative_error: ((extrapolated - target) / target).abs(),
        extrapolated,
        target,
        samples,
    })
}

/// Leading behavior of the certification margin in `(β−1)^{(n−2)/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSlope {
    pub n: usize,
    pub m: usize,
    /// `(β − 1, margin / (β−1)^{(n−2)/2})`
    pub samples: Vec<(f64, f64)>,
    pub extrapolated: f64,
    /// `2ⁿ ω_{n−1} (μ − μ̂) / (2m ω_n)`, the first-order prediction
    pub predicted: f64,
}

/// Margin `(2m c_n − J)/(2m c_n)` scaled by `(β−1)^{(n−2)/2}`; its sign near β = 1 is the sign of `μ − μ̂`.
pub fn margin_slope(n: usize, m: usize, eps: &[f64], rule: &QuadratureRule) -> Result<MarginSlope> {
    let k = SphereConstants::new(n)?;
    let crit = CriterionResult::evaluate(n, m)?;
    let power = (n as f64 - 2.0) / 2.0;
    let samples: Vec<(f64, f64)> = eps
        .iter()
        .map(|&e| {
            let r = energy_report(n, m, 1.0 + e, rule)?;
            Ok((e, r.margin / e.powf(power)))
        })
        .collect::<Result<_>>()?;
    let predicted = 2f64.powi(n as i32) * k.omega_nm1 * (crit.mu - crit.mu_hat) / (2.0 * m as f64 * k.omega_n);
    Ok(MarginSlope { n, m, extrapolated: richardson(&samples), predicted, samples })
}
