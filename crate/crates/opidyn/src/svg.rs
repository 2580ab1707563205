//! Minimal SVG 1.1 plotting: axes, polylines, histogram bars. Enough for
//! the overlay and scan figures the CLI emits; no plotting dependency.

const W: f64 = 720.0;
const H: f64 = 480.0;
const ML: f64 = 64.0;
const MR: f64 = 18.0;
const MT: f64 = 34.0;
const MB: f64 = 48.0;

pub struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    body: String,
    title: String,
    x_label: String,
    y_label: String,
}

impl Frame {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), title: &str, x_label: &str, y_label: &str) -> Self {
        Frame {
            x_min: x_range.0,
            x_max: x_range.1,
            y_min: y_range.0,
            y_max: y_range.1,
            body: String::new(),
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
        }
    }

    fn sx(&self, x: f64) -> f64 {
        ML + (x - self.x_min) / (self.x_max - self.x_min) * (W - ML - MR)
    }

    fn sy(&self, y: f64) -> f64 {
        H - MB - (y - self.y_min) / (self.y_max - self.y_min) * (H - MT - MB)
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, width: f64) {
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", self.sx(x), self.sy(y)))
            .collect();
        self.body.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
    }

    /// One bar per (left, right, height), measured in data units.
    pub fn bars(&mut self, bars: &[(f64, f64, f64)], color: &str) {
        for &(l, r, h) in bars {
            let x = self.sx(l);
            let w = (self.sx(r) - x).max(0.3);
            let y = self.sy(h);
            let hh = (self.sy(self.y_min.max(0.0)) - y).max(0.0);
            self.body.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{hh:.2}\" fill=\"{color}\" fill-opacity=\"0.55\"/>\n"
            ));
        }
    }

    pub fn circles(&mut self, points: &[(f64, f64)], color: &str, radius: f64) {
        for &(x, y) in points {
            self.body.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{color}\"/>\n",
                self.sx(x),
                self.sy(y)
            ));
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        ));
        s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        // frame
        s.push_str(&format!(
            "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444\"/>\n",
            W - ML - MR,
            H - MT - MB
        ));
        // ticks: 6 per axis
        for i in 0..=5 {
            let t = i as f64 / 5.0;
            let xv = self.x_min + t * (self.x_max - self.x_min);
            let yv = self.y_min + t * (self.y_max - self.y_min);
            let xp = self.sx(xv);
            let yp = self.sy(yv);
            s.push_str(&format!(
                "<line x1=\"{xp:.2}\" y1=\"{:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"#444\"/>\n",
                H - MB,
                H - MB + 5.0
            ));
            s.push_str(&format!(
                "<text x=\"{xp:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
                H - MB + 18.0,
                tick_label(xv)
            ));
            s.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{ML}\" y2=\"{yp:.2}\" stroke=\"#444\"/>\n",
                ML - 5.0
            ));
            s.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">{}</text>\n",
                ML - 8.0,
                yp + 4.0,
                tick_label(yv)
            ));
        }
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            ML + (W - ML - MR) / 2.0,
            xml_escape(&self.title)
        ));
        s.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">{}</text>\n",
            ML + (W - ML - MR) / 2.0,
            H - 12.0,
            xml_escape(&self.x_label)
        ));
        s.push_str(&format!(
            "<text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
            MT + (H - MT - MB) / 2.0,
            MT + (H - MT - MB) / 2.0,
            xml_escape(&self.y_label)
        ));
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Histogram bars (density-normalized) for a sample.
pub fn histogram(sample: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, f64)> {
    let mut counts = vec![0usize; bins];
    let w = (hi - lo) / bins as f64;
    let mut inside = 0usize;
    for &x in sample {
        if x >= lo && x < hi {
            counts[((x - lo) / w) as usize] += 1;
            inside += 1;
        }
    }
    let norm = 1.0 / (inside.max(1) as f64 * w);
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + i as f64 * w, lo + (i + 1) as f64 * w, c as f64 * norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_wellformed_svg() {
        let mut f = Frame::new((0.0, 1.0), (0.0, 2.0), "t", "x", "y");
        f.polyline(&[(0.0, 0.0), (0.5, 1.7), (1.0, 0.3)], "#1f77b4", 1.5);
        f.bars(&[(0.0, 0.1, 1.0), (0.1, 0.2, 0.5)], "#888");
        let s = f.render();
        assert!(s.starts_with("<svg"));
        assert!(s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 1);
        assert_eq!(s.matches("<rect").count(), 2 + 2);
    }

    #[test]
    fn histogram_mass_is_one() {
        let sample: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let bars = histogram(&sample, 0.0, 1.0, 20);
        let mass: f64 = bars.iter().map(|&(l, r, h)| (r - l) * h).sum();
        assert!((mass - 1.0).abs() < 1e-12);
    }
}
