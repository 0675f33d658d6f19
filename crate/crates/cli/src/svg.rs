//! Minimal deterministic SVG emitters: log-y line plots and heat maps.
//! Output depends only on the data, so identical runs produce identical
//! files.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// BER-style plot: linear x, log10 y, optional horizontal reference line.
pub fn line_plot_log_y(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    reference_line: Option<(f64, &str)>,
) -> String {
    let (w, h) = (640.0, 460.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 55.0);
    let pw = w - ml - mr;
    let ph = h - mt - mb;

    let xs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|y| *y > 0.0)
        .chain(reference_line.map(|r| r.0))
        .collect();
    let (x_min, x_max) = bounds(&xs, 0.0, 1.0);
    let (y_min_raw, y_max_raw) = bounds(&ys, 1e-6, 1.0);
    let ly_min = (y_min_raw.log10() - 0.2).floor();
    let ly_max = (y_max_raw.log10() + 0.2).ceil();

    let to_x = |x: f64| ml + (x - x_min) / (x_max - x_min).max(1e-12) * pw;
    let to_y = |y: f64| {
        let ly = y.max(1e-300).log10().clamp(ly_min, ly_max);
        mt + (ly_max - ly) / (ly_max - ly_min).max(1e-12) * ph
    };

    let mut svg = String::new();
    header(&mut svg, w, h, title);
    axes(&mut svg, ml, mt, pw, ph);

    // y grid: decades
    let mut dec = ly_min as i64;
    while dec <= ly_max as i64 {
        let y = to_y(10f64.powi(dec as i32));
        let _ = writeln!(
            svg,
            r##"<line x1="{ml}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">1e{dec}</text>"##,
            ml + pw,
            ml - 6.0,
            y + 4.0
        );
        dec += 1;
    }
    // x ticks
    for i in 0..=5 {
        let x = x_min + (x_max - x_min) * i as f64 / 5.0;
        let px = to_x(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#ddd"/><text x="{px:.1}" y="{:.1}" font-size="11" text-anchor="middle">{x:.1}</text>"##,
            mt,
            mt + ph,
            mt + ph + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{x_label}</text>"##,
        ml + pw / 2.0,
        h - 14.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"##,
        mt + ph / 2.0,
        mt + ph / 2.0
    );

    if let Some((yref, label)) = reference_line {
        let y = to_y(yref);
        let _ = writeln!(
            svg,
            r##"<line x1="{ml}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#888" stroke-dasharray="6,4"/><text x="{:.1}" y="{:.1}" font-size="11" fill="#555">{label}</text>"##,
            ml + pw,
            ml + pw - 70.0,
            y - 5.0
        );
    }

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        let mut started = false;
        for (x, y) in &s.points {
            if *y <= 0.0 {
                continue; // zero BER has no place on a log axis
            }
            let cmd = if started { 'L' } else { 'M' };
            let _ = write!(path, "{cmd}{:.1},{:.1} ", to_x(*x), to_y(*y));
            started = true;
        }
        let _ = writeln!(
            svg,
            r##"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.8"/>"##
        );
        for (x, y) in &s.points {
            if *y <= 0.0 {
                continue;
            }
            let _ = writeln!(
                svg,
                r##"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"##,
                to_x(*x),
                to_y(*y)
            );
        }
        let ly = mt + 16.0 + i as f64 * 16.0;
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="12" height="3" fill="{color}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"##,
            ml + pw - 150.0,
            ly - 3.0,
            ml + pw - 132.0,
            ly + 2.0,
            s.name
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Heat map over an (x, y) grid; `None` cells are hatched as infeasible.
pub fn heatmap_log(
    title: &str,
    x_label: &str,
    y_label: &str,
    x_ticks: &[String],
    y_ticks: &[String],
    cells: &[Vec<Option<f64>>],
) -> String {
    let (nx, ny) = (x_ticks.len(), y_ticks.len());
    let cell = 56.0;
    let (ml, mt) = (80.0, 50.0);
    let w = ml + nx as f64 * cell + 110.0;
    let h = mt + ny as f64 * cell + 60.0;

    let finite: Vec<f64> = cells
        .iter()
        .flatten()
        .filter_map(|c| *c)
        .filter(|v| *v > 0.0)
        .collect();
    let (lo, hi) = bounds(&finite, 1e-6, 1.0);
    let (llo, lhi) = (lo.log10(), hi.log10().max(lo.log10() + 1e-9));

    let mut svg = String::new();
    header(&mut svg, w, h, title);
    for (yi, row) in cells.iter().enumerate() {
        for (xi, c) in row.iter().enumerate() {
            let px = ml + xi as f64 * cell;
            let py = mt + yi as f64 * cell;
            match c {
                Some(v) if *v > 0.0 => {
                    let t = ((v.log10() - llo) / (lhi - llo)).clamp(0.0, 1.0);
                    let color = viridis_like(1.0 - t);
                    let _ = writeln!(
                        svg,
                        r##"<rect x="{px:.1}" y="{py:.1}" width="{cell}" height="{cell}" fill="{color}" stroke="#fff"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle" fill="#fff">{:.1e}</text>"##,
                        px + cell / 2.0,
                        py + cell / 2.0 + 3.0,
                        v
                    );
                }
                Some(_) => {
                    // measured-zero cell
                    let _ = writeln!(
                        svg,
                        r##"<rect x="{px:.1}" y="{py:.1}" width="{cell}" height="{cell}" fill="#08306b" stroke="#fff"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle" fill="#fff">0</text>"##,
                        px + cell / 2.0,
                        py + cell / 2.0 + 3.0
                    );
                }
                None => {
                    let _ = writeln!(
                        svg,
                        r##"<rect x="{px:.1}" y="{py:.1}" width="{cell}" height="{cell}" fill="#eee" stroke="#fff"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle" fill="#999">n/a</text>"##,
                        px + cell / 2.0,
                        py + cell / 2.0 + 3.0
                    );
                }
            }
        }
    }
    for (xi, t) in x_ticks.iter().enumerate() {
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{t}</text>"##,
            ml + xi as f64 * cell + cell / 2.0,
            mt + ny as f64 * cell + 16.0
        );
    }
    for (yi, t) in y_ticks.iter().enumerate() {
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{t}</text>"##,
            ml - 8.0,
            mt + yi as f64 * cell + cell / 2.0 + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r##"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{x_label}</text>"##,
        ml + nx as f64 * cell / 2.0,
        mt + ny as f64 * cell + 40.0
    );
    let _ = writeln!(
        svg,
        r##"<text x="20" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 20 {:.1})">{y_label}</text>"##,
        mt + ny as f64 * cell / 2.0,
        mt + ny as f64 * cell / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn bounds(vals: &[f64], def_lo: f64, def_hi: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in vals {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (def_lo, def_hi)
    } else if lo == hi {
        (lo * 0.5, hi * 2.0 + 1e-12)
    } else {
        (lo, hi)
    }
}

fn header(svg: &mut String, w: f64, h: f64, title: &str) {
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}"><rect width="{w}" height="{h}" fill="white"/><text x="{:.1}" y="24" font-size="14" text-anchor="middle" font-family="sans-serif">{title}</text><g font-family="sans-serif">"##,
        w / 2.0
    );
}

fn axes(svg: &mut String, ml: f64, mt: f64, pw: f64, ph: f64) {
    let _ = writeln!(
        svg,
        r##"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    );
}

fn viridis_like(t: f64) -> String {
    // coarse 6-stop interpolation, good enough for a BER map
    let stops = [
        (68u8, 1u8, 84u8),
        (59, 82, 139),
        (33, 145, 140),
        (94, 201, 98),
        (253, 231, 37),
        (255, 255, 200),
    ];
    let x = (t.clamp(0.0, 1.0)) * (stops.len() - 1) as f64;
    let i = (x.floor() as usize).min(stops.len() - 2);
    let f = x - i as f64;
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * f).round() as u8;
    let (r, g, b) = (
        lerp(stops[i].0, stops[i + 1].0),
        lerp(stops[i].1, stops[i + 1].1),
        lerp(stops[i].2, stops[i + 1].2),
    );
    format!("#{r:02x}{g:02x}{b:02x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_deterministic_and_wellformed() {
        let series = vec![Series {
            name: "ffe".into(),
            points: vec![(0.0, 1e-3), (5.0, 1e-2), (10.0, 1e-1)],
        }];
        let a = line_plot_log_y("t", "x", "y", &series, Some((1e-2, "FEC")));
        let b = line_plot_log_y("t", "x", "y", &series, Some((1e-2, "FEC")));
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert!(a.contains("FEC"));
    }

    #[test]
    fn heatmap_marks_infeasible() {
        let cells = vec![vec![Some(1e-2), None], vec![Some(1e-3), Some(0.0)]];
        let svg = heatmap_log(
            "m",
            "p",
            "L",
            &["64".into(), "8".into()],
            &["1".into(), "2".into()],
            &cells,
        );
        assert!(svg.contains("n/a"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
