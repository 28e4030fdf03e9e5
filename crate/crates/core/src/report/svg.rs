//! Standalone SVG scatter/line figures — no plotting dependency, no
//! timestamps, byte-stable output for identical input.

const PALETTE: [&str; 5] = ["#444444", "#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    Points,
    Line,
}

#[derive(Debug, Clone)]
struct Series {
    name: String,
    kind: SeriesKind,
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Figure {
    title: String,
    x_label: String,
    y_label: String,
    width: f64,
    height: f64,
    series: Vec<Series>,
}

impl Figure {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            width: 640.0,
            height: 440.0,
            series: Vec::new(),
        }
    }

    pub fn points(mut self, name: &str, pts: &[(f64, f64)]) -> Self {
        self.series.push(Series {
            name: name.to_string(),
            kind: SeriesKind::Points,
            points: pts.to_vec(),
        });
        self
    }

    pub fn line(mut self, name: &str, pts: &[(f64, f64)]) -> Self {
        self.series.push(Series {
            name: name.to_string(),
            kind: SeriesKind::Line,
            points: pts.to_vec(),
        });
        self
    }

    pub fn render(&self) -> String {
        let (ml, mr, mt, mb) = (72.0, 18.0, 42.0, 56.0);
        let pw = self.width - ml - mr;
        let ph = self.height - mt - mb;

        let all: Vec<(f64, f64)> = self
            .series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .collect();
        let (x0, x1) = padded_range(all.iter().map(|p| p.0));
        let (y0, y1) = padded_range(all.iter().map(|p| p.1));
        let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| mt + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
             viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">\n",
            w = self.width,
            h = self.height
        ));
        out.push_str(&format!(
            "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
            self.width, self.height
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            ml + pw / 2.0,
            escape(&self.title)
        ));

        // Gridlines and ticks.
        for t in ticks(x0, x1) {
            let x = sx(t);
            out.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n",
                mt, mt + ph
            ));
            out.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
                mt + ph + 16.0,
                fmt_tick(t)
            ));
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n",
                ml, ml + pw
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
                ml - 6.0,
                y + 3.5,
                fmt_tick(t)
            ));
        }

        // Axes.
        out.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            mt + ph,
            ml + pw,
            mt + ph
        ));
        out.push_str(&format!(
            "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{:.1}\" stroke=\"black\" stroke-width=\"1\"/>\n",
            mt + ph
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
            ml + pw / 2.0,
            self.height - 14.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" \
             transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
            mt + ph / 2.0,
            mt + ph / 2.0,
            escape(&self.y_label)
        ));

        // Series.
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            match s.kind {
                SeriesKind::Line => {
                    let path: Vec<String> = s
                        .points
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    out.push_str(&format!(
                        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                        path.join(" ")
                    ));
                }
                SeriesKind::Points => {
                    for &(x, y) in &s.points {
                        out.push_str(&format!(
                            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.85\"/>\n",
                            sx(x),
                            sy(y)
                        ));
                    }
                }
            }
        }

        // Legend.
        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let y = mt + 14.0 + 16.0 * i as f64;
            let x = ml + 10.0;
            match s.kind {
                SeriesKind::Line => out.push_str(&format!(
                    "<line x1=\"{x}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                    y - 4.0,
                    x + 18.0,
                    y - 4.0
                )),
                SeriesKind::Points => out.push_str(&format!(
                    "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>\n",
                    x + 9.0,
                    y - 4.0
                )),
            }
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"11\">{}</text>\n",
                x + 24.0,
                escape(&s.name)
            ));
        }

        out.push_str("</svg>\n");
        out
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Roughly five ticks at a 1/2/5 step.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        mag
    } else if norm < 3.5 {
        2.0 * mag
    } else if norm < 7.5 {
        5.0 * mag
    } else {
        10.0 * mag
    };
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if a >= 1e6 {
        format!("{:.2e}", v)
    } else if a >= 1.0 {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.4}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_svg() {
        let fig = Figure::new("title", "x", "y")
            .points("observed", &[(0.0, 1.0), (1.0, 2.0), (2.0, 4.0)])
            .line("fitted", &[(0.0, 1.1), (1.0, 2.1), (2.0, 3.9)]);
        let svg = fig.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3 + 1); // points + legend marker
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("observed"));
    }

    #[test]
    fn render_is_deterministic() {
        let fig = Figure::new("t", "x", "y").points("p", &[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(fig.render(), fig.render());
    }

    #[test]
    fn tick_scale_is_sane() {
        let t = ticks(0.0, 10.0);
        assert!(t.len() >= 4 && t.len() <= 8, "{t:?}");
        let t = ticks(1900.0, 1975.0);
        assert!(t.iter().all(|v| v.rem_euclid(1.0) == 0.0));
    }

    #[test]
    fn escapes_markup() {
        let fig = Figure::new("a < b & c", "x", "y").points("p", &[(0.0, 0.0), (1.0, 1.0)]);
        let svg = fig.render();
        assert!(svg.contains("a &lt; b &amp; c"));
    }
}
