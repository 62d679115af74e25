//! Gauss–Legendre nodes and composite rules on graded panels.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[order - 1 - i] = x;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = order as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional composite rule.
#[derive(Debug, Clone)]
pub struct Grid1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Widest panel produced by [`graded_breakpoints`].
pub const MAX_PANEL: f64 = 0.4;

/// Breakpoints on `[a, b]` refined geometrically toward each focus, starting at width `finest`.
pub fn graded_breakpoints(a: f64, b: f64, foci: &[f64], finest: f64) -> Vec<f64> {
    let mut pts = vec![a, b];
    for &f in foci {
        if f < a || f > b {
            continue;
        }
        if f > a && f < b {
            pts.push(f);
        }
        let mut d = finest;
        while f - d > a || f + d < b {
            if f - d > a {
                pts.push(f - d);
            }
            if f + d < b {
                pts.push(f + d);
            }
            d *= 2.0;
        }
    }
    pts.sort_by(f64::total_cmp);
    let min_gap = 0.25 * finest;
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&last) if p - last < min_gap => {
                // keep the exact endpoint b
                if p == b {
                    *out.last_mut().unwrap() = b;
                }
            }
            _ => out.push(p),
        }
    }
    if out.len() == 1 {
        out.push(b);
    }
    let mut capped = Vec::with_capacity(out.len());
    for w in out.windows(2) {
        let pieces = ((w[1] - w[0]) / MAX_PANEL).ceil().max(1.0) as usize;
        for i in 0..pieces {
            capped.push(w[0] + (w[1] - w[0]) * i as f64 / pieces as f64);
        }
    }
    capped.push(b);
    capped
}

/// Composite Gauss–Legendre with `per_panel` nodes on each panel between breakpoints.
pub fn composite(breakpoints: &[f64], per_panel: usize) -> Grid1d {
    let (x, w) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(per_panel * breakpoints.len());
    let mut weights = Vec::with_capacity(per_panel * breakpoints.len());
    for pair in breakpoints.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    Grid1d { nodes, weights }
}

pub fn graded(a: f64, b: f64, foci: &[f64], finest: f64, per_panel: usize) -> Grid1d {
    composite(&graded_breakpoints(a, b, foci, finest), per_panel)
}

/// Trapezoid nodes on one period `[a, a + period)`, weights summing to `period`.
pub fn periodic(a: f64, period: f64, count: usize) -> Grid1d {
    let h = period / count as f64;
    Grid1d {
        nodes: (0..count).map(|k| a + h * k as f64).collect(),
        weights: vec![h; count],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        for order in 1..30 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..(2 * order) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "order {order} degree {deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn breakpoints_are_sorted_and_cover_interval() {
        let b = graded_breakpoints(0.0, PI, &[0.0, 1.0, PI], 1e-4);
        assert_eq!(b[0], 0.0);
        assert_eq!(*b.last().unwrap(), PI);
        assert!(b.windows(2).all(|w| w[1] > w[0]));
        assert!(b.contains(&1.0));
        assert!(b.iter().any(|&x| (x - 1e-4).abs() < 1e-15));
    }

    #[test]
    fn graded_rule_resolves_a_narrow_peak() {
        // ∫₀^∞ s / (s² + x²) dx = π/2; truncated at 1 it is atan(1/s).
        let s: f64 = 1e-4;
        let g = graded(0.0, 1.0, &[0.0], s / 8.0, 16);
        let got: f64 = g.iter().map(|(x, w)| w * s / (s * s + x * x)).sum();
        assert!((got - (1.0 / s).atan()).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_spectral_for_periodic_functions() {
        let g = periodic(0.0, 2.0 * PI, 32);
        let got: f64 = g.iter().map(|(x, w)| w * (x.cos()).exp()).sum();
        // 2π I₀(1)
        assert!((got - 2.0 * PI * 1.266_065_877_752_008_4).abs() < 1e-13);
    }
}
