//! The graphs of `f_{n₀}(x) = (2x)^{1/n₀} − √2 sin(πx)` for n₀ = 3, 4, 5.

use std::fmt::Write;

use serde::Serialize;

use super::Meta;
use crate::criterion::f_n0;
use crate::error::Result;

pub const SAMPLES: usize = 500;
pub const X_MAX: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FigureSample {
    pub x: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
}

pub fn figure1_samples() -> Result<Vec<FigureSample>> {
    (0..SAMPLES)
        .map(|i| {
            let x = X_MAX * i as f64 / (SAMPLES - 1) as f64;
            Ok(FigureSample { x, f3: f_n0(3, x)?, f4: f_n0(4, x)?, f5: f_n0(5, x)? })
        })
        .collect()
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 40.0;

const CURVES: [(&str, &str); 3] = [("f3", "#1f77b4"), ("f4", "#d62728"), ("f5", "#2ca02c")];

/// Self-contained SVG 1.1 with axes, ticks every 0.05, guides at 1/7, 1/6, 1/5 and a legend.
pub fn figure1_svg(samples: &[FigureSample], meta: &Meta) -> String {
    let values = |s: &FigureSample| [s.f3, s.f4, s.f5];
    let lo = samples.iter().flat_map(values).fold(0.0, f64::min);
    let hi = samples.iter().flat_map(values).fold(0.0, f64::max);
    let (y0, y1) = ((lo / 0.1).floor() * 0.1, (hi / 0.1).ceil() * 0.1);
    let px = |x: f64| LEFT + (W - LEFT - RIGHT) * x / X_MAX;
    let py = |y: f64| TOP + (H - TOP - BOTTOM) * (y1 - y) / (y1 - y0);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        s,
        "<!-- {} {} command={} seed={} -->",
        meta.tool, meta.version, meta.command, meta.seed
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/></g>"#,
        px(0.0), py(0.0), px(X_MAX), py(0.0), px(0.0), py(y0), px(0.0), py(y1)
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11" fill="black">"#);
    for k in 0..=5 {
        let x = 0.05 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4:.2}</text>"#,
            px(x), py(0.0) - 3.0, py(0.0) + 3.0, H - BOTTOM + 16.0, x
        );
    }
    let steps = ((y1 - y0) / 0.1).round() as i64;
    for k in 0..=steps {
        let y = y0 + 0.1 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5:.1}</text>"#,
            px(0.0) - 3.0, py(y), px(0.0) + 3.0, px(0.0) - 6.0, py(y) + 4.0, y
        );
    }
    let _ = writeln!(s, "</g>");
    for (label, x) in [("1/7", 1.0 / 7.0), ("1/6", 1.0 / 6.0), ("1/5", 1.0 / 5.0)] {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#888888" stroke-dasharray="4 3"/><text x="{0:.2}" y="{3:.2}" font-family="sans-serif" font-size="10" fill="#555555" text-anchor="middle">{label}</text>"##,
            px(x), py(y0), py(y1), py(y1) - 4.0 + 12.0
        );
    }
    for (i, (name, colour)) in CURVES.iter().enumerate() {
        let pts = samples
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.x), py(values(p)[i])))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>"#);
        let ly = TOP + 14.0 + 16.0 * i as f64;
        let lx = W - RIGHT - 110.0;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx, lx + 24.0, lx + 30.0, ly + 4.0, legend(name)
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn legend(name: &str) -> &'static str {
    match name {
        "f3" => "n0 = 3",
        "f4" => "n0 = 4",
        _ => "n0 = 5",
    }
}
