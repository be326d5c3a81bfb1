//! Minimal self-contained SVG scatter plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

const CURVE_COLORS: [&str; 4] = ["#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Measured points, drawn as markers.
    pub points: Vec<(f64, f64)>,
    /// Optional per-point error bar half-heights.
    pub errors: Vec<f64>,
    pub curves: Vec<Curve>,
}

impl Plot {
    pub fn to_svg(&self) -> String {
        let all = self
            .points
            .iter()
            .chain(self.curves.iter().flat_map(|c| c.points.iter()))
            .filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, f64::MIN);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        for (&(_, y), &e) in self.points.iter().zip(&self.errors) {
            y1 = y1.max(y + e);
        }
        if x0 > x1 {
            (x0, x1, y1) = (0.0, 1.0, 1.0);
        }
        if x1 - x0 < 1e-12 {
            x0 -= 1.0;
            x1 += 1.0;
        }
        if y1 - y0 < 1e-12 {
            y1 = y0 + 1.0;
        }

        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let sy = |y: f64| MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let mut s = String::new();
        writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(&self.title)
        )
        .unwrap();

        // axes
        let (ax, ay) = (sx(x0), sy(y0));
        writeln!(
            s,
            r#"<path class="axis" d="M{ax:.2},{:.2} L{ax:.2},{ay:.2} L{:.2},{ay:.2}" stroke="black" fill="none"/>"#,
            sy(y1),
            sx(x1)
        )
        .unwrap();
        for i in 0..=TICKS {
            let t = i as f64 / TICKS as f64;
            let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            writeln!(
                s,
                r#"<line x1="{0:.2}" y1="{ay:.2}" x2="{0:.2}" y2="{1:.2}" stroke="black"/><text x="{0:.2}" y="{2:.2}" text-anchor="middle">{3}</text>"#,
                sx(xv),
                ay + 5.0,
                ay + 20.0,
                tick_label(xv)
            )
            .unwrap();
            writeln!(
                s,
                r#"<line x1="{ax:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black"/><text x="{2:.2}" y="{3:.2}" text-anchor="end">{4}</text>"#,
                sy(yv),
                ax - 5.0,
                ax - 8.0,
                sy(yv) + 4.0,
                tick_label(yv)
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="18" y="{0:.2}" text-anchor="middle" transform="rotate(-90 18 {0:.2})">{1}</text>"#,
            MARGIN_TOP + plot_h / 2.0,
            escape(&self.y_label)
        )
        .unwrap();

        for (i, c) in self.curves.iter().enumerate() {
            let color = CURVE_COLORS[i % CURVE_COLORS.len()];
            let pts: Vec<String> = c
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            writeln!(
                s,
                r#"<polyline class="reference" points="{}" fill="none" stroke="{color}" stroke-dasharray="6 4"/>"#,
                pts.join(" ")
            )
            .unwrap();
            let ly = MARGIN_TOP + 20.0 * (i as f64 + 1.0);
            let lx = WIDTH - MARGIN_RIGHT + 15.0;
            writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-dasharray="6 4"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 25.0,
                lx + 30.0,
                ly + 4.0,
                escape(&c.label)
            )
            .unwrap();
        }

        for (i, &(x, y)) in self.points.iter().enumerate() {
            if let Some(&e) = self.errors.get(i) {
                if e > 0.0 {
                    writeln!(
                        s,
                        r#"<line class="errorbar" x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/>"#,
                        sx(x),
                        sy(y - e),
                        sy(y + e)
                    )
                    .unwrap();
                }
            }
            writeln!(
                s,
                r##"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="#1f77b4"/>"##,
                sx(x),
                sy(y)
            )
            .unwrap();
        }
        let ly = MARGIN_TOP + 20.0 * (self.curves.len() as f64 + 1.0);
        let lx = WIDTH - MARGIN_RIGHT + 15.0;
        writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{ly:.2}" r="4" fill="#1f77b4"/><text x="{:.2}" y="{:.2}">measured mean</text>"##,
            lx + 12.0,
            lx + 30.0,
            ly + 4.0
        )
        .unwrap();
        s.push_str("</svg>\n");
        s
    }
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e5).contains(&a) {
        format!("{v:.2e}")
    } else if (v - v.round()).abs() < 1e-9 {
        format!("{}", v.round())
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_marker_per_point() {
        let p = Plot {
            title: "M vs n <test>".into(),
            x_label: "n".into(),
            y_label: "M".into(),
            points: vec![(1.0, 2.0), (2.0, 5.0), (4.0, 9.0)],
            errors: vec![0.5, 0.0, 1.0],
            curves: vec![Curve {
                label: "n^2".into(),
                points: vec![(1.0, 1.0), (4.0, 16.0)],
            }],
        };
        let svg = p.to_svg();
        assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("class=\"marker\"").count(), 3);
        assert_eq!(svg.matches("class=\"reference\"").count(), 1);
        assert_eq!(svg.matches("class=\"errorbar\"").count(), 2);
        assert!(svg.contains("&lt;test&gt;"));
    }

    #[test]
    fn degenerate_ranges() {
        let p = Plot {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            points: vec![(3.0, 0.0)],
            errors: vec![],
            curves: vec![],
        };
        let svg = p.to_svg();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        assert_eq!(svg.matches("class=\"marker\"").count(), 1);
    }
}
