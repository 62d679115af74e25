//! Seeded Monte Carlo integration with uniform samples on Sⁿ.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::{check_finite, QuadratureKind, QuadratureRule};
use crate::error::{Error, Result};
use crate::sphere::unit_sphere_measure;
use crate::summation::Neumaier;

const CHUNK: usize = 4096;

/// Estimate `∫_{Sⁿ} f dV`; returns `(estimate, standard error)`.
///
/// Samples come in fixed chunks, each drawn from its own ChaCha stream, so the
/// result depends only on the seed and the sample count.
pub fn integrate_mc<F>(n: usize, f: F, rule: &QuadratureRule) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if rule.kind != QuadratureKind::MonteCarlo {
        return Err(Error::invalid("rule", "Monte Carlo integration needs a Monte Carlo rule"));
    }
    if n < 1 {
        return Err(Error::InvalidDimension { n, reason: "sphere dimension must be positive" });
    }
    let samples = rule.resolution;
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Result<(f64, f64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(rule.seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let mut x = vec![0.0; n + 1];
            let mut s = Neumaier::new();
            let mut s2 = Neumaier::new();
            for _ in 0..count {
                loop {
                    for xi in x.iter_mut() {
                        *xi = StandardNormal.sample(&mut rng);
                    }
                    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 1e-12 {
                        x.iter_mut().for_each(|v| *v /= norm);
                        break;
                    }
                }
                let v = check_finite(f(&x), &x)?;
                s.add(v);
                s2.add(v * v);
            }
            Ok((s.value(), s2.value()))
        })
        .collect();
    let mut sum = Neumaier::new();
    let mut sum2 = Neumaier::new();
    for p in partial {
        let (a, b) = p?;
        sum.add(a);
        sum2.add(b);
    }
    let nf = samples as f64;
    let mean = sum.value() / nf;
    let var = (sum2.value() / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    let vol = unit_sphere_measure(n);
    Ok((vol * mean, vol * (var / nf).sqrt()))
}
