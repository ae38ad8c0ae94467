//! Write-only SVG drawings of arc systems: the boundary circle, each arc as
//! a circular arc meeting the circle at right angles, punctures as dots.

use std::f64::consts::PI;
use std::fmt::Write;

use lamicone::ArcSystemStage;

const SIZE: f64 = 512.0;
const CENTER: f64 = SIZE / 2.0;
const RADIUS: f64 = 220.0;

fn point(angle: f64, r: f64) -> (f64, f64) {
    (CENTER + r * angle.cos(), CENTER - r * angle.sin())
}

/// Angle of boundary token `t` out of `len`, counterclockwise from the top.
fn token_angle(t: usize, len: usize) -> f64 {
    PI / 2.0 + 2.0 * PI * (t as f64 + 0.5) / len as f64
}

fn chord_path(a: f64, b: f64) -> String {
    let (x1, y1) = point(a, RADIUS);
    let (x2, y2) = point(b, RADIUS);
    let mut delta = (b - a).rem_euclid(2.0 * PI);
    // Screen y points down, so a counterclockwise step in angle draws clockwise.
    let mut sweep = 1;
    if delta > PI {
        delta = 2.0 * PI - delta;
        sweep = 0;
    }
    if (delta - PI).abs() < 1e-9 {
        return format!("M {x1:.3} {y1:.3} L {x2:.3} {y2:.3}");
    }
    // The circle orthogonal to the boundary through both endpoints.
    let r = RADIUS * (delta / 2.0).tan();
    format!("M {x1:.3} {y1:.3} A {r:.3} {r:.3} 0 0 {sweep} {x2:.3} {y2:.3}")
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub fn render(stage: &ArcSystemStage, title: &str) -> String {
    let word = stage.boundary.word();
    let len = word.len().max(1);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="512" height="512" viewBox="0 0 512 512">"#);
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(
        out,
        r##"<circle cx="{CENTER}" cy="{CENTER}" r="{RADIUS}" fill="none" stroke="#333" stroke-width="2"/>"##
    );
    for chord in 0..stage.boundary.chord_count() {
        let (a, b) = stage.boundary.endpoints(chord);
        let colour = PALETTE[chord % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1.5"><title>{}</title></path>"#,
            chord_path(token_angle(a, len), token_angle(b, len)),
            stage.boundary.name(chord)
        );
    }
    // Each region's dots sit just inside the first boundary gap it touches.
    let regions = stage.gap_regions();
    for (region, &count) in stage.region_punctures.iter().enumerate() {
        let Some(gap) = regions.iter().position(|&r| r == region) else {
            continue;
        };
        let mid = token_angle(gap, len) + PI / len as f64;
        let spread = PI / len as f64 * 0.8;
        for k in 0..count {
            let offset = if count > 1 { spread * (k as f64 / (count - 1) as f64 - 0.5) } else { 0.0 };
            let (x, y) = point(mid + offset, RADIUS - 14.0);
            let _ = writeln!(out, r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#000"/>"##);
        }
    }
    out.push_str("</svg>\n");
    out
}
