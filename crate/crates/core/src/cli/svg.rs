//! Static SVG figures: one file per encoding, rows for
//! (trace norm, A_k), (accessible fraction, gap), (accuracy, w(P★)),
//! one column per k.

use std::fmt::Write;

use crate::encodings::EncodingKind;
use crate::harness::ResultRecord;

const PANEL_W: f64 = 300.0;
const PANEL_H: f64 = 200.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 50.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 45.0;
const TITLE_H: f64 = 40.0;

const BLUE: &str = "#1f77b4";
const ORANGE: &str = "#ff7f0e";
const GREEN: &str = "#2ca02c";
const RED: &str = "#d62728";
const GREY: &str = "#7f7f7f";

struct Series<'a> {
    label: &'a str,
    color: &'a str,
    points: Vec<(f64, f64)>,
    dashed: bool,
    markers: bool,
    right_axis: bool,
}

struct Panel {
    left: f64,
    top: f64,
    x: (f64, f64),
    y: (f64, f64),
    y_ticks: usize,
    y2: Option<(f64, f64, usize)>,
    legend_low: bool,
}

impl Panel {
    fn sx(&self, v: f64) -> f64 {
        let span = (self.x.1 - self.x.0).max(1e-12);
        self.left + (v - self.x.0) / span * PANEL_W
    }

    fn sy(&self, v: f64, range: (f64, f64)) -> f64 {
        let span = (range.1 - range.0).max(1e-12);
        self.top + PANEL_H - (v - range.0) / span * PANEL_H
    }
}

/// Smallest positive multiple of 1/2 at or above `v`.
fn half_steps(v: f64) -> f64 {
    ((v * 2.0).ceil() / 2.0).max(0.5)
}

fn ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count).map(|i| lo + (hi - lo) * i as f64 / count as f64).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn draw_panel(svg: &mut String, panel: &Panel, title: &str, y_label: &str, y2_label: Option<&str>, series: &[Series]) {
    let (l, t) = (panel.left, panel.top);
    let _ = writeln!(
        svg,
        r#"<rect x="{l:.2}" y="{t:.2}" width="{PANEL_W:.2}" height="{PANEL_H:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        l + PANEL_W / 2.0,
        t - 8.0,
        escape(title)
    );
    for v in ticks(panel.x.0, panel.x.1, 5) {
        let x = panel.sx(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{v:.2}</text>"#,
            t + PANEL_H,
            t + PANEL_H + 4.0,
            t + PANEL_H + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">p</text>"#,
        l + PANEL_W / 2.0,
        t + PANEL_H + 32.0
    );
    for v in ticks(panel.y.0, panel.y.1, panel.y_ticks) {
        let y = panel.sy(v, panel.y);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{l:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{v:.2}</text>"#,
            l - 4.0,
            l - 6.0,
            y + 3.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        l - 42.0,
        t + PANEL_H / 2.0,
        l - 42.0,
        t + PANEL_H / 2.0,
        escape(y_label)
    );
    if let (Some((lo, hi, count)), Some(label)) = (panel.y2, y2_label) {
        let right = l + PANEL_W;
        for v in ticks(lo, hi, count) {
            let y = panel.sy(v, (lo, hi));
            let _ = writeln!(
                svg,
                r#"<line x1="{right:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="10">{v:.1}</text>"#,
                right + 4.0,
                right + 6.0,
                y + 3.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11" transform="rotate(90 {:.2} {:.2})">{}</text>"#,
            right + 34.0,
            t + PANEL_H / 2.0,
            right + 34.0,
            t + PANEL_H / 2.0,
            escape(label)
        );
    }
    for (i, s) in series.iter().enumerate() {
        let range = match panel.y2 {
            Some((lo, hi, _)) if s.right_axis => (lo, hi),
            _ => panel.y,
        };
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", panel.sx(x), panel.sy(y, range)))
            .collect();
        if !pts.is_empty() {
            let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                s.color,
                pts.join(" ")
            );
        }
        if s.markers {
            for &(x, y) in &s.points {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#,
                    panel.sx(x),
                    panel.sy(y, range),
                    s.color
                );
            }
        }
        let (lx, ly) = if panel.legend_low {
            (l + 10.0, t + PANEL_H - 12.0 - 13.0 * (series.len() - 1 - i) as f64)
        } else {
            (l + PANEL_W - 110.0, t + 12.0 + 13.0 * i as f64)
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="10">{}</text>"#,
            lx + 16.0,
            s.color,
            lx + 20.0,
            ly + 3.0,
            escape(s.label)
        );
    }
}

fn column<F: Fn(&ResultRecord) -> Option<f64>>(recs: &[&ResultRecord], f: F) -> Vec<(f64, f64)> {
    recs.iter().filter_map(|r| f(r).map(|v| (r.p, v))).collect()
}

/// Renders the records of a single encoding configuration.
pub fn render(records: &[ResultRecord]) -> String {
    let first = &records[0];
    let mut ks: Vec<usize> = records.iter().map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    let p_lo = records.iter().map(|r| r.p).fold(f64::INFINITY, f64::min);
    let p_hi = records.iter().map(|r| r.p).fold(f64::NEG_INFINITY, f64::max);
    let x = if p_hi > p_lo { (p_lo, p_hi) } else { (p_lo, p_lo + 1.0) };
    let top_max = half_steps(
        records
            .iter()
            .flat_map(|r| [r.trace_norm.unwrap_or(0.0), r.a_k_exact, r.a_k_hat])
            .fold(0.0, f64::max),
    );
    let gap_max = half_steps(records.iter().filter_map(|r| r.gap).fold(0.0, f64::max));

    let col_w = MARGIN_L + PANEL_W + MARGIN_R;
    let row_h = MARGIN_T + PANEL_H + MARGIN_B;
    let width = col_w * ks.len() as f64;
    let height = TITLE_H + 3.0 * row_h;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let angle = match first.encoding {
        EncodingKind::Entangling => format!(", θ = {:.4}", first.theta),
        EncodingKind::Product => String::new(),
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="26" text-anchor="middle" font-size="16">{} encoding, n = {}{angle}, ε = {:.5}</text>"#,
        width / 2.0,
        first.encoding,
        first.n,
        first.epsilon
    );

    for (col, &k) in ks.iter().enumerate() {
        let recs: Vec<&ResultRecord> = records.iter().filter(|r| r.k == k).collect();
        let left = col as f64 * col_w + MARGIN_L;
        let row_top = |row: usize| TITLE_H + row as f64 * row_h + MARGIN_T;

        let panel = Panel {
            left,
            top: row_top(0),
            x,
            y: (0.0, top_max),
            y_ticks: (top_max * 2.0) as usize,
            y2: None,
            legend_low: false,
        };
        let series = [
            Series {
                label: "trace norm",
                color: BLUE,
                points: column(&recs, |r| r.trace_norm),
                dashed: false,
                markers: false,
                right_axis: false,
            },
            Series {
                label: "A_k exact",
                color: ORANGE,
                points: column(&recs, |r| Some(r.a_k_exact)),
                dashed: false,
                markers: false,
                right_axis: false,
            },
            Series {
                label: "A_k sampled",
                color: GREEN,
                points: column(&recs, |r| Some(r.a_k_hat)),
                dashed: true,
                markers: true,
                right_axis: false,
            },
        ];
        draw_panel(
            &mut svg,
            &panel,
            &format!("k = {k}: global vs local"),
            "bias",
            None,
            &series,
        );

        let panel = Panel {
            left,
            top: row_top(1),
            x,
            y: (0.0, 1.0),
            y_ticks: 4,
            y2: Some((0.0, gap_max, (gap_max * 2.0) as usize)),
            legend_low: true,
        };
        let series = [
            Series {
                label: "accessible fraction",
                color: BLUE,
                points: column(&recs, |r| r.accessible_fraction),
                dashed: false,
                markers: true,
                right_axis: false,
            },
            Series {
                label: "gap (right)",
                color: RED,
                points: column(&recs, |r| r.gap),
                dashed: true,
                markers: false,
                right_axis: true,
            },
        ];
        draw_panel(
            &mut svg,
            &panel,
            &format!("k = {k}: accessible fraction"),
            "fraction",
            Some("gap"),
            &series,
        );

        let panel = Panel {
            left,
            top: row_top(2),
            x,
            y: (0.4, 1.0),
            y_ticks: 6,
            y2: Some((0.0, (k + 1) as f64, k + 1)),
            legend_low: false,
        };
        let series = [
            Series {
                label: "empirical",
                color: GREEN,
                points: column(&recs, |r| Some(r.acc_empirical)),
                dashed: false,
                markers: true,
                right_axis: false,
            },
            Series {
                label: "predicted",
                color: ORANGE,
                points: column(&recs, |r| Some(r.acc_predicted_exact)),
                dashed: true,
                markers: false,
                right_axis: false,
            },
            Series {
                label: "w(P★) (right)",
                color: GREY,
                points: column(&recs, |r| Some(r.w_star as f64)),
                dashed: false,
                markers: true,
                right_axis: true,
            },
        ];
        draw_panel(
            &mut svg,
            &panel,
            &format!("k = {k}: accuracy"),
            "accuracy",
            Some("w(P★)"),
            &series,
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: usize, p: f64) -> ResultRecord {
        let a = 2.0 * (1.0 - 4.0 * p / 3.0);
        ResultRecord {
            encoding: EncodingKind::Product,
            n: 4,
            theta: 0.0,
            p,
            k,
            trace_norm: Some(a + 0.1),
            a_k_exact: a,
            a_k_hat: a,
            p_star: "XIII".parse().unwrap(),
            w_star: 1,
            acc_empirical: 0.5 + a / 4.0,
            acc_predicted_exact: 0.5 + a / 4.0,
            acc_predicted_hat: 0.5 + a / 4.0,
            accessible_fraction: Some(a / (a + 0.1)),
            gap: Some(0.1),
            epsilon: 0.007,
            n_search: 1,
            n_eval: 1,
            master_seed: 0,
        }
    }

    #[test]
    fn layout_and_determinism() {
        let recs: Vec<_> = [1, 2]
            .iter()
            .flat_map(|&k| [0.0, 0.3, 0.6].map(|p| rec(k, p)))
            .collect();
        let a = render(&recs);
        assert_eq!(a, render(&recs));
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<polyline").count(), 2 * 8);
        assert!(a.contains("k = 2: accuracy"));
        assert!(a.contains("product encoding, n = 4"));
    }

    #[test]
    fn single_point() {
        let svg = render(&[rec(1, 0.2)]);
        assert!(!svg.contains("NaN"));
    }
}
