//! The three plot kinds, written to a directory (default `plots/`).
//!
//! cargo run --example svg_plots -- [out_dir]

use vineshape::plot::{render_svg, PlotData, PlotKind, PlotSpec, Series};
use vineshape::prelude::*;

fn main() -> vineshape::Result<()> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "plots".into()));
    std::fs::create_dir_all(&dir)?;
    let geom = RobotGeometry::default();

    let shape = make_hinged_bend_shape(80.0, 75.0, &geom, geom.sensed_length())?;
    let cfg = TrialConfig {
        geometry: geom,
        drift: DriftModel::default(),
        offset_age_s: 90.0,
        shape: shape.clone(),
        trial_seed: 3,
        mounting_std_deg: 2.0,
    };
    let est = evaluate_trial(&simulate_trial(&cfg, geom.bend_radius())?, 1, false)?;
    let n = 200;
    let truth = (0..=n)
        .map(|k| shape.pose_at(shape.total_length() * k as f64 / n as f64).position)
        .map(|p| (p.x, p.y))
        .collect();
    let estimate = est.centerline.points.iter().map(|p| (p.x, p.y)).collect();
    let overlay = render_svg(
        &PlotSpec::new(PlotKind::CenterlineOverlay, "75 deg passive bend", "x (cm)", "y (cm)"),
        &PlotData::Centerlines(vec![Series::new("truth", truth), Series::new("estimate", estimate)]),
    )?;
    std::fs::write(dir.join("overlay.svg"), overlay)?;

    let drift = run_drift_experiment(6, 600.0, &DriftModel::default(), 10.0)?;
    let traces = drift
        .traces
        .iter()
        .map(|t| Series::new(format!("IMU {}", t.sensor), t.samples.clone()))
        .collect();
    let spec = PlotSpec::new(PlotKind::DriftTraces, "drift", "time (min)", "error (deg)");
    std::fs::write(dir.join("drift.svg"), render_svg(&spec, &PlotData::Traces(traces))?)?;

    let points: Vec<(f64, f64)> = drift.traces.iter().flat_map(|t| t.samples.iter().copied()).collect();
    let g = drift.regression;
    let spec = PlotSpec::new(PlotKind::ErrorScatterWithFit, "pooled drift fit", "time (min)", "error (deg)");
    let scatter = PlotData::Scatter {
        points,
        fit: Some((g.slope, g.intercept)),
    };
    std::fs::write(dir.join("scatter.svg"), render_svg(&spec, &scatter)?)?;

    println!("wrote overlay.svg, drift.svg and scatter.svg to {}", dir.display());
    Ok(())
}
