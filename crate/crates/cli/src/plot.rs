//! Static SVG line plots, one file per panel, drawn from the telemetry.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use medfault::scenario::Telemetry;
use plotters::prelude::*;

/// Most points drawn per series; longer runs are decimated by stride.
const MAX_POINTS: usize = 2000;

struct Panel {
    key: &'static str,
    title: &'static str,
    unit: &'static str,
    columns: Vec<String>,
}

fn matching(tel: &Telemetry, pred: impl Fn(&str) -> bool) -> Vec<String> {
    tel.columns.iter().filter(|c| pred(c)).cloned().collect()
}

fn panels(tel: &Telemetry) -> Vec<Panel> {
    let fixed = |names: &[&str]| matching(tel, |c| names.contains(&c));
    let is_wheel_torque = |c: &str| c.starts_with("wheel") && c.ends_with("_torque_Nm");
    let is_gimbal_angle = |c: &str| c.ends_with("_angle_deg");
    let is_gimbal_rate = |c: &str| c.ends_with("_rate_degps") && !c.starts_with('w');
    vec![
        Panel {
            key: "attitude",
            title: "Euler angle error",
            unit: "deg",
            columns: fixed(&["roll_deg", "pitch_deg", "yaw_deg"]),
        },
        Panel {
            key: "rate",
            title: "Angular velocity",
            unit: "deg/s",
            columns: fixed(&["wx_degps", "wy_degps", "wz_degps"]),
        },
        Panel {
            key: "torque",
            title: "Delivered torque",
            unit: "N·m",
            columns: fixed(&["taux_Nm", "tauy_Nm", "tauz_Nm"]),
        },
        Panel { key: "wheel_torque", title: "Wheel torque", unit: "N·m", columns: matching(tel, is_wheel_torque) },
        Panel {
            key: "momentum",
            title: "Rotor momentum",
            unit: "N·m·s",
            columns: matching(tel, |c| c.ends_with("_momentum_Nms")),
        },
        Panel { key: "gimbal_angle", title: "Gimbal angle", unit: "deg", columns: matching(tel, is_gimbal_angle) },
        Panel { key: "gimbal_rate", title: "Gimbal rate", unit: "deg/s", columns: matching(tel, is_gimbal_rate) },
        Panel {
            key: "singularity", title: "Singularity measure det(AAᵀ)", unit: "", columns: fixed(&["singularity"])
        },
    ]
}

/// Writes every panel that has data. Returns the written paths.
pub fn write_panels(tel: &Telemetry, out_dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let t = tel.column("t_s").context("telemetry has no time column")?;
    let mut written = Vec::new();
    for panel in panels(tel) {
        if panel.columns.is_empty() {
            continue;
        }
        let series: Vec<(String, Vec<f64>)> =
            panel.columns.iter().map(|c| (c.clone(), tel.column(c).unwrap_or_default())).collect();
        let path = out_dir.join(format!("{stem}_{}.svg", panel.key));
        line_plot(&path, panel.title, panel.unit, &t, &series)
            .with_context(|| format!("plotting {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-9 * hi.abs().max(1.0));
    (lo - pad, hi + pad)
}

fn line_plot(path: &Path, title: &str, unit: &str, t: &[f64], series: &[(String, Vec<f64>)]) -> Result<()> {
    let stride = t.len().div_ceil(MAX_POINTS).max(1);
    let root = SVGBackend::new(path, (900, 500)).into_drawing_area();
    root.fill(&WHITE)?;
    let (t0, t1) = range(t.iter().copied());
    let (y0, y1) = range(series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(t0..t1, y0..y1)?;
    chart.configure_mesh().x_desc("t (s)").y_desc(unit).draw()?;
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        let points = t.iter().zip(ys).step_by(stride).filter(|(_, y)| y.is_finite()).map(|(&x, &y)| (x, y));
        chart
            .draw_series(LineSeries::new(points, color.stroke_width(2)))?
            .label(name.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.85)).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}
