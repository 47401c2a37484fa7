//! Drift characterization: per-sensor orientation error over ten minutes and
//! the pooled linear fit.
//!
//! cargo run --example drift

use vineshape::prelude::*;

fn main() -> vineshape::Result<()> {
    let model = DriftModel::default();
    let r = run_drift_experiment(15, 600.0, &model, 30.0)?;
    for t in r.traces.iter().take(5) {
        let (m, e) = t.samples.last().copied().unwrap_or_default();
        println!("IMU {:2}: rate {:5.2} deg/min, {e:5.2} deg after {m:.0} min", t.sensor, t.rate);
    }
    let g = r.regression;
    println!(
        "pooled fit: {:.3} deg/min, R^2 {:.3}, p {:.2e}; mean error {:.2} deg",
        g.slope, g.r_squared, g.p_value, r.mean_error_deg
    );

    // Offsets refreshed every 90 s bound the error a single sensor can build up.
    let mut rng = vineshape::rng::stream(0, 0, vineshape::rng::Purpose::MeasurementNoise);
    let drifted = apply_drift(Quat::IDENTITY, 1.33, Vec3::Z, 90.0, 0.0, &mut rng);
    println!("1.33 deg/min for 90 s: {:.3} deg", angle_between(Quat::IDENTITY, drifted).to_degrees());
    Ok(())
}
