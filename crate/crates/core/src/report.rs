//! Tabular experiment output: CSV tables and minimal SVG line plots.

use std::fmt::Write as _;
use std::io::Write;

use crate::error::Result;

pub const CSV_HEADER: &str = "level,h,dofs,l2_error,rate,cg_iters,seconds";

/// Which parameter varies between the rows of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    Refinement,
    K,
    M,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub level: u32,
    pub h: f64,
    pub dofs: usize,
    pub l2_error: f64,
    pub rate: Option<f64>,
    pub cg_iters: usize,
    pub seconds: f64,
    pub k: f64,
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub sweep: Sweep,
    /// Written as `# key=value` lines before the header.
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<ReportRow>,
    /// Written as `# key=value` lines after the rows.
    pub footer: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn new(sweep: Sweep) -> Self {
        Self { sweep, metadata: Vec::new(), rows: Vec::new(), footer: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    /// Fills `rate = log2(e_{l-1}/e_l) / (level_l - level_{l-1})`.
    pub fn compute_rates(&mut self) {
        for i in 0..self.rows.len() {
            self.rows[i].rate = (i > 0).then(|| {
                let (a, b) = (&self.rows[i - 1], &self.rows[i]);
                let steps = (b.level as f64 - a.level as f64).max(1.0);
                (a.l2_error / b.l2_error).log2() / steps
            });
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let sweep = self.sweep != Sweep::Refinement;
        out.push_str(CSV_HEADER);
        out.push_str(if sweep { ",k,M\n" } else { "\n" });
        for r in &self.rows {
            let rate = r.rate.map_or(String::new(), |x| format!("{x:.4}"));
            let _ = write!(out, "{},{},{},{:.6e},{},{},{:.3}", r.level, r.h, r.dofs, r.l2_error, rate, r.cg_iters, r.seconds);
            if sweep {
                let _ = write!(out, ",{},{}", r.k, r.m);
            }
            out.push('\n');
        }
        for (k, v) in &self.footer {
            let _ = writeln!(out, "# {k}={v}");
        }
        out
    }

    /// Plotted abscissa of each row: `h` (log axis), `1/k` or `M`.
    fn abscissa(&self, r: &ReportRow) -> f64 {
        match self.sweep {
            Sweep::Refinement => r.h,
            Sweep::K => 1.0 / r.k,
            Sweep::M => r.m,
        }
    }

    pub fn write_svg<W: Write>(&self, mut w: W, title: &str) -> Result<()> {
        let points: Vec<(f64, f64)> = self.rows.iter().map(|r| (self.abscissa(r), r.l2_error)).collect();
        let xlabel = match self.sweep {
            Sweep::Refinement => "h",
            Sweep::K => "1/k",
            Sweep::M => "M",
        };
        let plot = LinePlot { title, xlabel, ylabel: "L2 error", log_x: self.sweep == Sweep::Refinement, series: vec![points] };
        w.write_all(plot.render().as_bytes())?;
        Ok(())
    }
}

/// Least-squares fit of `ln e = a + b x`; returns `(b, R²)`.
pub fn fit_log_linear(x: &[f64], e: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || n != e.len() || e.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}

/// A line plot with a logarithmic y axis.
pub struct LinePlot<'a> {
    pub title: &'a str,
    pub xlabel: &'a str,
    pub ylabel: &'a str,
    pub log_x: bool,
    pub series: Vec<Vec<(f64, f64)>>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 70.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LinePlot<'_> {
    pub fn render(&self) -> String {
        let tx = |x: f64| if self.log_x { x.log10() } else { x };
        let pts: Vec<(f64, f64)> =
            self.series.iter().flatten().filter(|(x, y)| *y > 0.0 && (!self.log_x || *x > 0.0)).map(|&(x, y)| (tx(x), y.log10())).collect();
        let range = |v: Vec<f64>, snap: bool| {
            let (mut lo, mut hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            if !lo.is_finite() {
                (lo, hi) = (0.0, 1.0);
            }
            if snap {
                (lo, hi) = (lo.floor(), hi.ceil());
            }
            if hi - lo < 1e-12 {
                (lo, hi) = (lo - 0.5, hi + 0.5);
            }
            (lo, hi)
        };
        let (x0, x1) = range(pts.iter().map(|p| p.0).collect(), self.log_x);
        let (y0, y1) = range(pts.iter().map(|p| p.1).collect(), true);
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="30" text-anchor="middle" font-size="15">{}</text>"#, WIDTH / 2.0, escape(self.title));
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(s, r#"<polyline fill="none" stroke="black" points="{l},{t} {l},{b} {r},{b}"/>"#);
        for e in (y0 as i64)..=(y1 as i64) {
            let y = py(e as f64);
            let _ = writeln!(s, r#"<line x1="{}" y1="{y:.1}" x2="{l}" y2="{y:.1}" stroke="black"/>"#, l - 5.0);
            let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{e}</text>"#, l - 8.0, y + 4.0);
        }
        let xticks: Vec<(f64, String)> = if self.log_x {
            ((x0 as i64)..=(x1 as i64)).map(|e| (e as f64, format!("1e{e}"))).collect()
        } else {
            (0..=4).map(|i| x0 + (x1 - x0) * i as f64 / 4.0).map(|v| (v, format!("{v:.3}"))).collect()
        };
        for (v, label) in xticks {
            let x = px(v);
            let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{}" stroke="black"/>"#, b + 5.0);
            let _ = writeln!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{label}</text>"#, b + 20.0);
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 25.0, escape(self.xlabel));
        let _ = writeln!(
            s,
            r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
            HEIGHT / 2.0,
            escape(self.ylabel)
        );
        for (i, series) in self.series.iter().enumerate() {
            let coords: Vec<String> = series
                .iter()
                .filter(|(x, y)| *y > 0.0 && (!self.log_x || *x > 0.0))
                .map(|&(x, y)| format!("{:.1},{:.1}", px(tx(x)), py(y.log10())))
                .collect();
            let color = COLORS[i % COLORS.len()];
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, coords.join(" "));
            for c in &coords {
                let (x, y) = c.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
        }
        s.push_str("</svg>\n");
        s
    }
}
