//! CSV tables and a static ratio plot for a report.

use anyhow::{Context, Result};
use plotters::prelude::*;
use std::path::Path;
use weyl_core::verify::Report;

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_all(dir: &Path, report: &Report) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut w = csv::Writer::from_path(dir.join(format!("{}-cases.csv", report.suite)))?;
    w.write_record(["label", "lhs", "rhs", "ratio", "residual", "inputs"])?;
    for c in &report.cases {
        let inputs = serde_json::to_string(&c.inputs)?;
        w.write_record([c.label.clone(), cell(c.lhs), cell(c.rhs), cell(c.ratio), cell(c.residual), inputs])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join(format!("{}-verdicts.csv", report.suite)))?;
    w.write_record(["name", "invariant", "hard", "passed", "value", "threshold"])?;
    for v in &report.verdicts {
        w.write_record([
            v.name.clone(),
            v.invariant.clone(),
            v.hard.to_string(),
            v.passed.to_string(),
            cell(v.value),
            cell(v.threshold),
        ])?;
    }
    w.flush()?;

    let ratios: Vec<(usize, f64)> =
        report.cases.iter().enumerate().filter_map(|(i, c)| c.ratio.filter(|r| r.is_finite() && *r > 0.0).map(|r| (i, r))).collect();
    if !ratios.is_empty() {
        plot(&dir.join(format!("{}-ratios.svg", report.suite)), &report.suite, &ratios)?;
    }
    Ok(())
}

fn plot(path: &Path, title: &str, ratios: &[(usize, f64)]) -> Result<()> {
    let lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    let last = ratios.last().map(|r| r.0).unwrap_or(0) + 1;
    let root = SVGBackend::new(path, (800, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(format!("{title}: lhs / rhs"), ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(32)
        .y_label_area_size(64)
        .build_cartesian_2d(0usize..last, (lo / 1.2..hi * 1.2).log_scale())
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    chart.configure_mesh().x_desc("case").y_desc("ratio").draw().map_err(|e| anyhow::anyhow!("{e}"))?;
    chart
        .draw_series(ratios.iter().map(|&(i, r)| Circle::new((i, r), 3, BLUE.filled())))
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    root.present().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(())
}
