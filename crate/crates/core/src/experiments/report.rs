use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{ExperimentError, ExperimentRecord};
use crate::graph::Family;

/// Quantity plotted on the y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Kappa,
    AmortizedMessages,
    AmortizedRounds,
}

impl Metric {
    fn label(self) -> &'static str {
        match self {
            Metric::Kappa => "kappa (used fraction of short walks)",
            Metric::AmortizedMessages => "messages per walk",
            Metric::AmortizedRounds => "rounds per walk",
        }
    }

    fn of(self, r: &ExperimentRecord) -> f64 {
        match self {
            Metric::Kappa => r.kappa_mean,
            Metric::AmortizedMessages => r.messages_mean,
            Metric::AmortizedRounds => r.rounds_mean,
        }
    }
}

/// Writes one CSV row per replica:
/// `family,param_name,param_value,replica,kappa,amortized_rounds,amortized_messages,walks_served,diameter`.
/// Each `provenance` line is emitted first as a `# ` comment.
pub fn write_csv<W: Write>(
    records: &[ExperimentRecord],
    provenance: &[String],
    mut out: W,
) -> Result<(), ExperimentError> {
    for line in provenance {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record([
        "family",
        "param_name",
        "param_value",
        "replica",
        "kappa",
        "amortized_rounds",
        "amortized_messages",
        "walks_served",
        "diameter",
    ])?;
    for r in records {
        for rep in &r.replicas {
            w.write_record([
                r.family.name().to_string(),
                r.param.name().to_string(),
                r.value.to_string(),
                rep.replica.to_string(),
                format!("{:.6}", rep.kappa),
                format!("{:.3}", rep.amortized_rounds),
                format!("{:.3}", rep.amortized_messages),
                rep.walks_served.to_string(),
                rep.diameter.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 150.0, 30.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

/// Self-contained SVG line plot: one polyline per family through the
/// replica means, in grid order.
pub fn write_svg<W: Write>(
    records: &[ExperimentRecord],
    metric: Metric,
    mut out: W,
) -> Result<(), ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyRecords);
    }
    let param = records[0].param;
    let mut families: Vec<Family> = records.iter().map(|r| r.family).collect();
    families.dedup();
    let points = |f: Family| -> Vec<(f64, f64)> {
        records
            .iter()
            .filter(|r| r.family == f)
            .map(|r| (r.value, metric.of(r)))
            .filter(|(_, y)| y.is_finite())
            .collect()
    };
    let xs: Vec<f64> = records.iter().map(|r| r.value).collect();
    let ys: Vec<f64> = records.iter().map(|r| metric.of(r)).filter(|y| y.is_finite()).collect();
    let (xmin, xmax) = bounds(&xs);
    let log_x = xmin > 0.0 && xmax / xmin > 10.0;
    let tx = |x: f64| if log_x { x.ln() } else { x };
    let (ymin, ymax) = if ys.is_empty() { (0.0, 1.0) } else { bounds(&ys) };
    let ymin = ymin.min(0.0);
    let ymax = if ymax > ymin { ymax * 1.05 } else { ymin + 1.0 };
    let (x0, x1) = (tx(xmin), tx(xmax));
    let x_span = if x1 > x0 { x1 - x0 } else { 1.0 };
    let (ml, mr, mt, mb) = MARGIN;
    let plot_w = WIDTH - ml - mr;
    let plot_h = HEIGHT - mt - mb;
    let px = |x: f64| ml + (tx(x) - x0) / x_span * plot_w;
    let py = |y: f64| mt + plot_h - (y - ymin) / (ymax - ymin) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<g stroke="black"><line x1="{ml}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{ml}" y1="{mt}" x2="{ml}" y2="{b}"/></g>"#,
        b = mt + plot_h,
        r = ml + plot_w
    );
    for i in 0..=4 {
        let y = ymin + (ymax - ymin) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{}</text>"#,
            ml - 6.0,
            py(y) + 4.0,
            tick(y)
        );
    }
    let mut grid = xs.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    for &x in &grid {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            mt + plot_h + 18.0,
            tick(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{}" text-anchor="middle">{}{}</text>"#,
        ml + plot_w / 2.0,
        HEIGHT - 10.0,
        param.name(),
        if log_x { " (log scale)" } else { "" }
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" transform="rotate(-90 16 {:.1})" text-anchor="middle">{}</text>"#,
        mt + plot_h / 2.0,
        mt + plot_h / 2.0,
        metric.label()
    );
    for (i, &f) in families.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> =
            points(f).iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline data-family="{f}" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = mt + 14.0 + 18.0 * i as f64;
        let lx = ml + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{f}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    out.write_all(svg.as_bytes())?;
    Ok(())
}

fn bounds(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// Writes `<stem>.csv` (and `<stem>.svg` when `svg` is set) under `dir`,
/// creating the directory if needed. Returns the written paths.
pub fn emit_report(
    records: &[ExperimentRecord],
    dir: &Path,
    stem: &str,
    svg: Option<Metric>,
    provenance: &[String],
) -> Result<Vec<PathBuf>, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyRecords);
    }
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    write_csv(records, provenance, BufWriter::new(File::create(&csv_path)?))?;
    let mut written = vec![csv_path];
    if let Some(metric) = svg {
        let svg_path = dir.join(format!("{stem}.svg"));
        write_svg(records, metric, BufWriter::new(File::create(&svg_path)?))?;
        written.push(svg_path);
    }
    Ok(written)
}
