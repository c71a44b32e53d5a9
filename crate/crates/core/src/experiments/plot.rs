use std::fmt::Write;

use super::ConvergenceTable;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const PAD: f64 = 48.0;

/// Log-log plot of absolute error against `m` as a standalone SVG document.
/// Rows with non-positive error are omitted.
pub fn convergence_svg(table: &ConvergenceTable) -> String {
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.abs_error > 0.0)
        .map(|r| ((r.m as f64).log10(), r.abs_error.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="13">{} / {}: |error| vs m</text>"#,
        WIDTH / 2.0,
        table.fixture,
        table.energy.name()
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * PAD,
        HEIGHT - 2.0 * PAD
    );
    if !pts.is_empty() {
        let span = |sel: fn(&(f64, f64)) -> f64| {
            let lo = pts.iter().map(sel).fold(f64::INFINITY, f64::min).floor();
            let hi = pts.iter().map(sel).fold(f64::NEG_INFINITY, f64::max).ceil();
            (lo, if hi > lo { hi } else { lo + 1.0 })
        };
        let (x0, x1) = span(|p| p.0);
        let (y0, y1) = span(|p| p.1);
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
        let sy = |y: f64| HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
        }
        for (k, e) in [(x0, y0), (x1, y1)].iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{}</text>"#,
                sx(e.0),
                HEIGHT - PAD + 16.0,
                e.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">1e{}</text>"#,
                PAD - 4.0,
                sy(e.1) + if k == 0 { 0.0 } else { 10.0 },
                e.1
            );
        }
    }
    if let Some(fit) = table.rate {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">rate {:.3} (residual {:.2e})</text>"#,
            WIDTH - PAD,
            PAD - 6.0,
            fit.rate,
            fit.residual
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurveFamily;
    use crate::discrete_energy::DiscreteEnergy;
    use crate::experiments::gamma_limsup_sweep;
    use crate::polygon::Partition;

    #[test]
    fn emits_one_marker_per_row() {
        let f = CurveFamily::Ellipse { a: 2.0, b: 1.0 }.build(2).unwrap();
        let t = gamma_limsup_sweep(&f, &[8, 16, 32], Partition::ParameterUniform, DiscreteEnergy::KimKusner, 4.0)
            .unwrap();
        let svg = convergence_svg(&t);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
    }
}
