//! The claims suite: reference constants, the threshold table, bubble identities,
//! the concentration lemma, and the two headline certifications.

use serde::Serialize;

use super::config::RunConfig;
use super::{energy_rule, CliError};
use crate::bubble::{solution_identity_check, Bubble, Profile};
use crate::criterion::{a_4m_closed_form, a_nm, claim15_constants, claim15_margin, minimal_m, tabulated_m_n};
use crate::energy::{lemma31_convergence, pair_integral, sweep};
use crate::quadrature::{integrate_mc, QuadratureRule};
use crate::sphere::SphereConstants;

/// Knobs for exercising the suite itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaimOptions {
    /// Multiplies the reference value of vol(Sⁿ) used by the bubble identities; 1 for a real run.
    pub omega_scale: f64,
}

impl Default for ClaimOptions {
    fn default() -> Self {
        Self { omega_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimRow {
    pub claim: String,
    pub expected: f64,
    pub computed: f64,
    pub tolerance: f64,
    /// `abs`: |computed − expected| ≤ tolerance; `rel`: relative; `gt`: computed > expected
    pub relation: &'static str,
    pub passed: bool,
    pub note: String,
}

impl ClaimRow {
    fn abs(claim: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        Self {
            claim: claim.into(),
            expected,
            computed,
            tolerance,
            relation: "abs",
            passed: (computed - expected).abs() <= tolerance,
            note: String::new(),
        }
    }

    fn rel(claim: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        Self {
            relation: "rel",
            passed: ((computed - expected) / expected).abs() <= tolerance,
            ..Self::abs(claim, expected, computed, tolerance)
        }
    }

    fn gt(claim: impl Into<String>, threshold: f64, computed: f64) -> Self {
        Self {
            relation: "gt",
            passed: computed > threshold,
            ..Self::abs(claim, threshold, computed, 0.0)
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimsReport {
    pub claims: Vec<ClaimRow>,
}

impl ClaimsReport {
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<String> {
        self.claims.iter().filter(|c| !c.passed).map(|c| c.claim.clone()).collect()
    }
}

const ODD_M_NOTE: &str = "odd m: the configuration {g p, tau g p} is G_m-invariant and odd under \
(z1,z2)->(conj z2,conj z1); the full group generated by the rotation and tau has order 4m";

pub fn check_claims(cfg: &RunConfig, opts: &ClaimOptions) -> Result<ClaimsReport, CliError> {
    let mut claims = vec![
        ClaimRow::abs("a_5_6", 1.09907, a_nm(5, 6)?, 1e-4),
        ClaimRow::abs("a_5_5", -0.69601, a_nm(5, 5)?, 1e-4),
        ClaimRow::abs("a_6_5", -0.2, a_nm(6, 5)?, 1e-10),
    ];

    let worst_closed_form = (2..=100)
        .map(|m| a_nm(4, m).map(|a| (a - a_4m_closed_form(m)).abs()))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    claims.push(ClaimRow::abs("a_4_m_closed_form", 0.0, worst_closed_form, 1e-12).note("max over m = 2..100"));

    let mut mismatches = 0usize;
    for n in 3..=30 {
        if minimal_m(n, super::MN_SEARCH_LIMIT)? != tabulated_m_n(n) {
            mismatches += 1;
        }
    }
    claims.push(ClaimRow::abs("m_n_table", 0.0, mismatches as f64, 0.0).note("mismatches for n = 3..30"));

    let (c1, c2) = claim15_constants();
    claims.push(ClaimRow::abs("claim15_constant_1", 0.059383, c1, 1e-6));
    claims.push(ClaimRow::abs("claim15_constant_2", 0.111203, c2, 1e-6));
    let min_margin = (9..=1000)
        .map(claim15_margin)
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    claims.push(ClaimRow::gt("claim15_margin", 0.0, min_margin).note("min over m = 9..1000"));

    let zonal = QuadratureRule::zonal(16)?;
    // n=5 approaches its leading term more slowly: 0.9748 at β−1 = 1e-3, so it is checked closer in
    for (n, beta, tol, note) in [
        (3, 1.001, 0.02, "beta-1=1e-3, delta=0.5"),
        (4, 1.001, 0.02, "beta-1=1e-3, delta=0.5"),
        (5, 1.0005, 0.03, "beta-1=5e-4, delta=0.5"),
    ] {
        let row = &lemma31_convergence(n, &[beta], 0.5, &zonal)?[0];
        claims.push(ClaimRow::rel(format!("lemma31_ratio_n{n}"), 1.0, row.ratio, tol).note(note));
    }

    for n in 3..=5 {
        let k = SphereConstants::new(n)?;
        let rep = solution_identity_check(&Bubble::at_pole(n, 1.5)?, &zonal)?;
        let omega = k.omega_n * opts.omega_scale;
        claims.push(ClaimRow::rel(format!("solution_identity_mass_n{n}"), omega, rep.mass, 1e-6).note("beta=1.5"));
        claims.push(
            ClaimRow::rel(format!("solution_identity_norm_n{n}"), k.a_n * omega, rep.h1_norm_sq, 1e-6).note("beta=1.5"),
        );
    }

    // bizonal pair integral against seeded Monte Carlo, centers at right angle
    let (n, beta) = (3usize, 1.5f64);
    let profile = Profile::new(n, beta)?;
    let k = SphereConstants::new(n)?;
    let pair = pair_integral(&profile, std::f64::consts::FRAC_PI_2, &QuadratureRule::bizonal(cfg.resolution)?)?;
    let mc = QuadratureRule::monte_carlo(cfg.mc_samples, cfg.seed)?;
    let (est, se) = integrate_mc(
        n,
        |x| profile.value_from_gap(beta - x[0]) * profile.value_from_gap(beta - x[1]).powf(k.two_star - 1.0),
        &mc,
    )?;
    claims.push(ClaimRow::abs("pair_integral_monte_carlo", pair, est, 3.0 * se).note("n=3, beta=1.5, 3 standard errors"));

    let rule = energy_rule(cfg)?;
    for (n, m) in [(3usize, 9usize), (4, 7)] {
        let (_, s) = sweep(n, m, &cfg.beta_grid, &rule)?;
        let mut row = ClaimRow::gt(format!("certification_n{n}_m{m}"), 0.0, s.best_margin)
            .note(format!("best beta={:.6}; relative margin of 2m c_n over J(t w)", s.best_beta));
        if m % 2 == 1 {
            row.note = format!("{}; {ODD_M_NOTE}", row.note);
        }
        claims.push(row);
    }

    Ok(ClaimsReport { claims })
}
