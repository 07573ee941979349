//! CSV and SVG rendering of simulation results.

use std::fmt::Write;

use super::{ChannelSpec, SweepResult, TrialResult};
use crate::rational::to_f64;

/// Header of the per-trial CSV for `d` transmitters.
pub fn trial_header(d: usize) -> Vec<String> {
    let mut cols: Vec<String> = (1..=d).map(|k| format!("c_{k}")).collect();
    cols.extend((1..=d).map(|k| format!("s_{k}")));
    cols.extend(
        [
            "seed",
            "N",
            "decoded_prefix",
            "final_rate",
            "err_bits",
            "err_rate",
        ]
        .map(String::from),
    );
    cols
}

fn channel_cols(ch: &ChannelSpec) -> Vec<String> {
    let mut cols: Vec<String> = ch
        .capacities
        .iter()
        .map(|c| to_f64(c).to_string())
        .collect();
    cols.extend((0..ch.d()).map(|k| ch.symbol_rate(k).to_string()));
    cols
}

/// One per-trial CSV row. Errors are counted below `N(rate − ε)` when a
/// target rate is given and inside the ε-tolerant prefix otherwise.
pub fn trial_row(
    ch: &ChannelSpec,
    t: &TrialResult,
    rate: Option<f64>,
    epsilon: f64,
) -> Vec<String> {
    let (err, total) = match rate {
        Some(r) => t.errors_at_rate(r, epsilon),
        None => {
            let cp = t.checkpoints.last().expect("final checkpoint");
            (cp.unresolved_in(t.tolerant_prefix), t.tolerant_prefix)
        }
    };
    let err_rate = if total == 0 {
        0.0
    } else {
        err as f64 / total as f64
    };
    let mut cols = channel_cols(ch);
    cols.extend([
        t.seed.to_string(),
        t.n.to_string(),
        t.decoded_prefix.to_string(),
        t.final_rate.to_string(),
        err.to_string(),
        err_rate.to_string(),
    ]);
    cols
}

fn write_csv(header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII fields")
}

/// Per-trial CSV for trials run on a single channel.
pub fn trials_csv(
    ch: &ChannelSpec,
    trials: &[TrialResult],
    rate: Option<f64>,
    epsilon: f64,
) -> String {
    write_csv(
        trial_header(ch.d()),
        trials.iter().map(|t| trial_row(ch, t, rate, epsilon)),
    )
}

/// Per-trial CSV of a whole sweep, points in grid order.
pub fn sweep_trials_csv(result: &SweepResult, epsilon: f64) -> String {
    let d = result.points.first().map_or(0, |p| p.channel.d());
    write_csv(
        trial_header(d),
        result.points.iter().flat_map(|p| {
            p.trials
                .iter()
                .map(|t| trial_row(&p.channel, t, None, epsilon))
        }),
    )
}

/// Per-point CSV with mean and sample deviation of the final rate, and the
/// theoretical rate when supplied.
pub fn sweep_aggregate_csv(result: &SweepResult, theory: Option<&[f64]>) -> String {
    let d = result.points.first().map_or(0, |p| p.channel.d());
    let mut header: Vec<String> = (1..=d).map(|k| format!("c_{k}")).collect();
    header.extend((1..=d).map(|k| format!("s_{k}")));
    header.extend(
        [
            "trials",
            "mean_rate",
            "std_rate",
            "mean_decoded_rate",
            "mean_strict_rate",
        ]
        .map(String::from),
    );
    if theory.is_some() {
        header.push("theory_rate".into());
    }
    let rows = result.points.iter().enumerate().map(|(i, p)| {
        let mut row = channel_cols(&p.channel);
        row.extend([
            p.trials.len().to_string(),
            p.mean_rate().to_string(),
            p.std_rate().to_string(),
            p.mean_decoded_rate().to_string(),
            p.mean_strict_rate().to_string(),
        ]);
        if let Some(th) = theory {
            row.push(th[i].to_string());
        }
        row
    });
    write_csv(header, rows)
}

/// One polyline in a plot.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw as a step curve rather than straight segments.
    pub steps: bool,
    /// Draw markers with ± bars given as the third value.
    pub error_bars: Option<Vec<f64>>,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            steps: false,
            error_bars: None,
        }
    }
}

const COLORS: [&str; 5] = ["#1f5fbf", "#c0392b", "#27864a", "#8e44ad", "#b7791f"];

/// A self-contained SVG line plot.
pub fn svg_plot(series: &[Series], x_label: &str, y_label: &str) -> String {
    let (w, h, m) = (640.0, 420.0, 56.0);
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    y1 *= 1.05;
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{m} {top} V{bottom} H{right}" stroke="black" fill="none"/>"#,
        top = m,
        bottom = h - m,
        right = w - m
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
            sx(fx),
            h - m + 16.0,
            fx
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            m - 6.0,
            sy(fy) + 4.0,
            fy
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        w / 2.0,
        h - 12.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        let mut prev: Option<(f64, f64)> = None;
        for &(x, y) in &s.points {
            match prev {
                None => {
                    let _ = write!(d, "M{:.2} {:.2}", sx(x), sy(y));
                }
                Some((_, py)) if s.steps => {
                    let _ = write!(d, " H{:.2} V{:.2}", sx(x), sy(y));
                    let _ = py;
                }
                Some(_) => {
                    let _ = write!(d, " L{:.2} {:.2}", sx(x), sy(y));
                }
            }
            prev = Some((x, y));
        }
        let _ = writeln!(
            out,
            r#"<path d="{d}" stroke="{color}" stroke-width="1.5" fill="none"/>"#
        );
        if let Some(bars) = &s.error_bars {
            for (&(x, y), &e) in s.points.iter().zip(bars) {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/><path d="M{:.2} {:.2} V{:.2}" stroke="{color}"/>"#,
                    sx(x),
                    sy(y),
                    sx(x),
                    sy(y - e),
                    sy(y + e)
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            w - m - 150.0,
            m + 16.0 * i as f64,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
