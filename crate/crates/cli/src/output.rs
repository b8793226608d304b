use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use plotters::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::checks::{CheckOutcome, PlotData, Table};
use crate::SCHEMA_VERSION;

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: &'a str,
    check: &'a str,
    passed: bool,
    domain: &'a Value,
    report: &'a Value,
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<check>.json` and `<check>.csv`; returns the JSON path.
pub fn write_check(dir: &Path, outcome: &CheckOutcome, domain: &Value) -> Result<PathBuf> {
    let name = outcome.check.as_str();
    let json_path = dir.join(format!("{name}.json"));
    write_json(
        &json_path,
        &Envelope {
            schema_version: SCHEMA_VERSION,
            check: name,
            passed: outcome.passed,
            domain,
            report: &outcome.body,
        },
    )?;
    if !outcome.table.rows.is_empty() {
        write_csv(&dir.join(format!("{name}.csv")), &outcome.table)?;
    }
    Ok(json_path)
}

const COLORS: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
];

fn plot_err<E: std::fmt::Debug>(e: E) -> anyhow::Error {
    anyhow::anyhow!("plotting failed: {e:?}")
}

/// Relative deviation of ε from its mean, per sample, one series per λ.
fn plot_epsilon(path: &Path, series: &[(f64, Vec<f64>)]) -> Result<()> {
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let n = series.iter().map(|(_, v)| v.len()).max().unwrap_or(1).max(1);
    let bound = series
        .iter()
        .flat_map(|(_, v)| v.iter().map(|x| x.abs()))
        .fold(1e-16, f64::max)
        * 1.2;
    let mut chart = ChartBuilder::on(&root)
        .caption("epsilon / mean - 1", ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(72)
        .build_cartesian_2d(0f64..n as f64, -bound..bound)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("sample")
        .y_label_formatter(&|y| format!("{y:.1e}"))
        .draw()
        .map_err(plot_err)?;
    for (i, (lambda, values)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(
                values
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| Circle::new((j as f64, v), 3, color.filled())),
            )
            .map_err(plot_err)?
            .label(format!("lambda = {lambda}"))
            .legend(move |(x, y)| Circle::new((x, y), 3, color.filled()));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// `log10 E` against `log10 λ`.
fn plot_decay(path: &Path, lambdas: &[f64], e1: &[f64], e2: &[f64]) -> Result<()> {
    let log = |v: f64| v.max(1e-300).log10();
    let xs: Vec<f64> = lambdas.iter().map(|&l| log(l)).collect();
    let ys: Vec<f64> = e1.iter().chain(e2).map(|&v| log(v)).collect();
    let (x0, x1) = (
        xs.iter().copied().fold(f64::INFINITY, f64::min),
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let (y0, y1) = (
        ys.iter().copied().fold(f64::INFINITY, f64::min),
        ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    );
    let pad = |a: f64, b: f64| {
        if b - a < 1e-9 {
            (a - 0.5, b + 0.5)
        } else {
            (a - 0.1 * (b - a), b + 0.1 * (b - a))
        }
    };
    let ((x0, x1), (y0, y1)) = (pad(x0, x1), pad(y0, y1));
    let root = SVGBackend::new(path, (720, 480)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("correspondence defects", ("sans-serif", 18))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(56)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("log10 lambda")
        .y_desc("log10 E")
        .draw()
        .map_err(plot_err)?;
    for (i, (name, e)) in [("E1", e1), ("E2", e2)].into_iter().enumerate() {
        let color = COLORS[i];
        let pts: Vec<(f64, f64)> = xs.iter().zip(e).map(|(&x, &v)| (x, log(v))).collect();
        chart
            .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
            .map_err(plot_err)?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2)));
        chart
            .draw_series(pts.into_iter().map(|p| Circle::new(p, 3, color.filled())))
            .map_err(plot_err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

pub fn write_plot(dir: &Path, outcome: &CheckOutcome) -> Result<Option<PathBuf>> {
    let path = dir.join(format!("{}.svg", outcome.check.as_str()));
    match &outcome.plot {
        Some(PlotData::Epsilon(series)) if !series.is_empty() => plot_epsilon(&path, series)?,
        Some(PlotData::Decay { lambdas, e1, e2 }) if !lambdas.is_empty() => plot_decay(&path, lambdas, e1, e2)?,
        _ => return Ok(None),
    }
    Ok(Some(path))
}
