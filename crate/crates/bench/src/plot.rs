//! Standalone SVG charts built only from the CSV outputs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::eq3::{COUNTS_FILE, EXPECTED_PROBABILITIES, RATIOS_FILE};
use crate::error::{BenchError, Result};
use crate::records::SUMMARY_FILE;

pub const FIDELITY_SVG: &str = "fidelity_vs_n.svg";
pub const PROBABILITY_SVG: &str = "eq3_probabilities.svg";
pub const RATIO_SVG: &str = "eq3_ratio_histogram.svg";
pub const RATIO_BINS: usize = 20;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// A parsed CSV with named columns.
pub struct Table {
    path: PathBuf,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(BenchError::csv(path))?;
        let headers = reader
            .headers()
            .map_err(BenchError::csv(path))?
            .iter()
            .map(str::to_owned)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|r| r.iter().map(str::to_owned).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()
            .map_err(BenchError::csv(path))?;
        if rows.is_empty() {
            return Err(BenchError::EmptyCsv {
                path: path.to_path_buf(),
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| BenchError::MissingColumn {
                path: self.path.clone(),
                column: name.to_owned(),
            })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column values parsed as numbers; empty cells become `None`.
    pub fn numbers(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let v = row[c].trim();
                if v.is_empty() {
                    return Ok(None);
                }
                v.parse().map(Some).map_err(|_| BenchError::BadValue {
                    path: self.path.clone(),
                    row: i + 1,
                    column: name.to_owned(),
                    value: v.to_owned(),
                })
            })
            .collect()
    }

    pub fn strings(&self, name: &str) -> Result<Vec<&str>> {
        let c = self.column(name)?;
        Ok(self.rows.iter().map(|r| r[c].as_str()).collect())
    }
}

struct Frame {
    x_range: (f64, f64),
    y_range: (f64, f64),
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let (lo, hi) = self.x_range;
        MARGIN_LEFT + (v - lo) / (hi - lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let (lo, hi) = self.y_range;
        HEIGHT - MARGIN_BOTTOM - (v - lo) / (hi - lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn open_svg(title: &str, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (WIDTH - MARGIN_RIGHT + MARGIN_LEFT) / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (WIDTH - MARGIN_RIGHT + MARGIN_LEFT) / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        (HEIGHT - MARGIN_BOTTOM + MARGIN_TOP) / 2.0,
        escape(y_label)
    );
    s
}

fn axes(s: &mut String, frame: &Frame, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)]) {
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    for (v, label) in x_ticks {
        let x = frame.x(*v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#,
            y0 + 19.0,
            escape(label)
        );
    }
    for (v, label) in y_ticks {
        let y = frame.y(*v);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#e0e0e0"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 6.0,
            y + 4.0,
            escape(label)
        );
    }
}

fn linear_ticks(lo: f64, hi: f64, count: usize) -> Vec<(f64, String)> {
    (0..=count)
        .map(|i| {
            let v = lo + (hi - lo) * i as f64 / count as f64;
            (
                v,
                format!("{v:.3}")
                    .trim_end_matches('0')
                    .trim_end_matches('.')
                    .to_owned(),
            )
        })
        .collect()
}

fn finish(mut s: String, path: &Path) -> Result<PathBuf> {
    s.push_str("</svg>\n");
    fs::write(path, s).map_err(BenchError::io(path))?;
    Ok(path.to_path_buf())
}

/// Mean fidelity against `N` (log₂ axis), one line per family/method pair.
pub fn plot_fidelity(summary_csv: &Path, out: &Path) -> Result<PathBuf> {
    let table = Table::read(summary_csv)?;
    let families = table.strings("family")?;
    let methods = table.strings("method")?;
    let sizes = table.numbers("N")?;
    let fidelity = table.numbers("mean_fidelity")?;

    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for i in 0..table.len() {
        if let (Some(n), Some(f)) = (sizes[i], fidelity[i]) {
            if n > 0.0 {
                series
                    .entry(format!("{} / {}", families[i], methods[i]))
                    .or_default()
                    .push((n.log2(), f));
            }
        }
    }
    if series.is_empty() {
        return Err(BenchError::EmptyCsv {
            path: summary_csv.to_path_buf(),
        });
    }
    let xs = series.values().flatten().map(|p| p.0);
    let x_lo = xs.clone().fold(f64::INFINITY, f64::min);
    let x_hi = xs.fold(f64::NEG_INFINITY, f64::max);
    let x_range = if x_hi > x_lo {
        (x_lo, x_hi)
    } else {
        (x_lo - 1.0, x_hi + 1.0)
    };
    let y_min = series.values().flatten().map(|p| p.1).fold(1.0, f64::min);
    let y_lo = ((y_min * 10.0).floor() / 10.0).clamp(0.0, 0.9);
    let frame = Frame {
        x_range,
        y_range: (y_lo, 1.0),
    };

    let mut s = open_svg(
        "Mean fidelity by system size",
        "N (log2 scale)",
        "mean fidelity",
    );
    let x_ticks: Vec<(f64, String)> = (x_range.0.ceil() as i64..=x_range.1.floor() as i64)
        .map(|k| (k as f64, format!("{}", 1u64 << k.max(0))))
        .collect();
    axes(&mut s, &frame, &x_ticks, &linear_ticks(y_lo, 1.0, 5));
    for (idx, (name, points)) in series.iter_mut().enumerate() {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let colour = PALETTE[idx % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for (x, y) in points.iter() {
            let _ = writeln!(
                s,
                r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3.5" fill="{colour}"/>"#,
                frame.x(*x),
                frame.y(*y)
            );
        }
        let ly = MARGIN_TOP + 18.0 * idx as f64;
        let lx = WIDTH - MARGIN_RIGHT + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            ly + 4.0,
            escape(name)
        );
    }
    finish(s, out)
}

/// Mean outcome probabilities of the worked example as two bars, with the
/// exact values marked.
pub fn plot_probabilities(counts_csv: &Path, out: &Path) -> Result<PathBuf> {
    let table = Table::read(counts_csv)?;
    let mut means = [0.0; 2];
    for (k, col) in ["p0", "p1"].iter().enumerate() {
        let values: Vec<f64> = table.numbers(col)?.into_iter().flatten().collect();
        if values.is_empty() {
            return Err(BenchError::EmptyCsv {
                path: counts_csv.to_path_buf(),
            });
        }
        means[k] = values.iter().sum::<f64>() / values.len() as f64;
    }
    let frame = Frame {
        x_range: (0.0, 2.0),
        y_range: (0.0, 1.0),
    };
    let mut s = open_svg("Average outcome probabilities", "outcome", "probability");
    axes(
        &mut s,
        &frame,
        &[(0.5, "|0⟩".into()), (1.5, "|1⟩".into())],
        &linear_ticks(0.0, 1.0, 5),
    );
    for (k, mean) in means.iter().enumerate() {
        let (x0, x1) = (frame.x(k as f64 + 0.2), frame.x(k as f64 + 0.8));
        let (top, base) = (frame.y(*mean), frame.y(0.0));
        let _ = writeln!(
            s,
            r#"<rect class="bar" x="{x0:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}" data-value="{mean}"/>"#,
            x1 - x0,
            base - top,
            PALETTE[k]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{mean:.4}</text>"#,
            (x0 + x1) / 2.0,
            top - 6.0
        );
        let ey = frame.y(EXPECTED_PROBABILITIES[k]);
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{ey:.2}" x2="{x1:.2}" y2="{ey:.2}" stroke="black" stroke-dasharray="4 3"/>"#
        );
    }
    finish(s, out)
}

/// Histogram of the per-run `p(0)/p(1)` ratios.
pub fn plot_ratio_histogram(ratios_csv: &Path, out: &Path) -> Result<PathBuf> {
    let table = Table::read(ratios_csv)?;
    let ratios: Vec<f64> = table
        .numbers("ratio")?
        .into_iter()
        .flatten()
        .filter(|r| r.is_finite())
        .collect();
    if ratios.is_empty() {
        return Err(BenchError::EmptyCsv {
            path: ratios_csv.to_path_buf(),
        });
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    };
    let width = (hi - lo) / RATIO_BINS as f64;
    let mut counts = [0usize; RATIO_BINS];
    for r in &ratios {
        counts[(((r - lo) / width) as usize).min(RATIO_BINS - 1)] += 1;
    }
    let top = *counts.iter().max().unwrap() as f64;
    let frame = Frame {
        x_range: (lo, hi),
        y_range: (0.0, top),
    };
    let mut s = open_svg("Distribution of probability ratios", "p(0) / p(1)", "runs");
    let y_ticks: Vec<(f64, String)> = linear_ticks(0.0, top, 4)
        .into_iter()
        .map(|(v, _)| (v, format!("{v:.1}")))
        .collect();
    axes(&mut s, &frame, &linear_ticks(lo, hi, 4), &y_ticks);
    for (b, &count) in counts.iter().enumerate() {
        let x0 = frame.x(lo + b as f64 * width);
        let x1 = frame.x(lo + (b + 1) as f64 * width);
        let y = frame.y(count as f64);
        let _ = writeln!(
            s,
            r##"<rect class="bar" x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#1f77b4" stroke="white" data-value="{count}"/>"##,
            x1 - x0,
            frame.y(0.0) - y
        );
    }
    finish(s, out)
}

/// Renders every chart whose input CSV exists in `input_dir`.
pub fn emit_plots(input_dir: &Path, output_dir: &Path) -> Result<Vec<PathBuf>> {
    type Plotter = fn(&Path, &Path) -> Result<PathBuf>;
    let jobs: [(&str, &str, Plotter); 3] = [
        (SUMMARY_FILE, FIDELITY_SVG, plot_fidelity),
        (COUNTS_FILE, PROBABILITY_SVG, plot_probabilities),
        (RATIOS_FILE, RATIO_SVG, plot_ratio_histogram),
    ];
    let present: Vec<_> = jobs
        .iter()
        .filter(|(csv, _, _)| input_dir.join(csv).exists())
        .collect();
    if present.is_empty() {
        return Err(BenchError::Config(format!(
            "{} contains none of {SUMMARY_FILE}, {COUNTS_FILE}, {RATIOS_FILE}",
            input_dir.display()
        )));
    }
    fs::create_dir_all(output_dir).map_err(BenchError::io(output_dir))?;
    present
        .into_iter()
        .map(|(csv, svg, plot)| plot(&input_dir.join(csv), &output_dir.join(svg)))
        .collect()
}
