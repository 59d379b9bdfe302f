//! Static SVG scatterplots of the bitext space.

use std::fmt::Write as _;

use bimap_core::{BitextMap, BitextSpace};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Candidate points as circles, chain points as squares, the map as a
/// polyline and the main diagonal as a dashed line. Output depends only on
/// the inputs.
pub fn render(space: &BitextSpace, points: &[(f64, f64)], chain: &[(f64, f64)], map: Option<&BitextMap>) -> String {
    let scale = (SIZE - 2.0 * MARGIN) / space.width.max(space.height);
    let (w, h) = (space.width * scale, space.height * scale);
    let px = |x: f64| MARGIN + x * scale;
    // y grows upward in the bitext space
    let py = |y: f64| MARGIN + h - y * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}">"#,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<style>.axis{{stroke:#000;fill:none}}.diagonal{{stroke:#888;stroke-dasharray:6 4}}.point{{fill:#4a7fc1}}.chain{{fill:#d2452b}}.map{{stroke:#1a1a1a;fill:none;stroke-width:1.5}}</style>"#
    );
    let _ = writeln!(
        s,
        r#"<rect class="axis" x="{:.2}" y="{:.2}" width="{w:.2}" height="{h:.2}"/>"#,
        MARGIN, MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12">x ({} chars)</text>"#,
        MARGIN,
        h + MARGIN + 25.0,
        space.width
    );
    let _ = writeln!(
        s,
        r#"<text x="5" y="{:.2}" font-size="12">y ({} chars)</text>"#,
        MARGIN - 10.0,
        space.height
    );
    let _ = writeln!(
        s,
        r#"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
        px(0.0),
        py(0.0),
        px(space.width),
        py(space.height)
    );
    for &(x, y) in points {
        let _ = writeln!(s, r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="1.5"/>"#, px(x), py(y));
    }
    for &(x, y) in chain {
        let _ = writeln!(
            s,
            r#"<rect class="chain" x="{:.2}" y="{:.2}" width="3" height="3"/>"#,
            px(x) - 1.5,
            py(y) - 1.5
        );
    }
    if let Some(m) = map {
        let coords: Vec<String> = m.anchors().iter().map(|a| format!("{:.2},{:.2}", px(a.x), py(a.y))).collect();
        let _ = writeln!(s, r#"<polyline class="map" points="{}"/>"#, coords.join(" "));
    }
    s.push_str("</svg>\n");
    s
}
