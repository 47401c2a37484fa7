//! One simulated trial: ground-truth shape, corrupted IMU readings,
//! offsetting, reconstruction and tip error.
//!
//! cargo run --example simulate_trial

use vineshape::prelude::*;

fn main() -> vineshape::Result<()> {
    let geom = RobotGeometry::default();
    let shape = make_hinged_bend_shape(80.0, 60.0, &geom, geom.sensed_length())?;
    println!("shape: {}", shape.description);

    for (label, drift, mounting) in [
        ("clean", DriftModel::none(), 0.0),
        ("mounted 5 deg", DriftModel::none(), 5.0),
        ("drift + noise", DriftModel::default(), 5.0),
    ] {
        let cfg = TrialConfig {
            geometry: geom,
            drift,
            offset_age_s: 90.0,
            shape: shape.clone(),
            trial_seed: 7,
            mounting_std_deg: mounting,
        };
        let log = simulate_trial(&cfg, geom.bend_radius())?;
        let est = evaluate_trial(&log, 1, false)?;
        let t = est.estimated_tip;
        println!(
            "{label:>14}: tip ({:7.2}, {:7.2}, {:6.2}) vs true ({:7.2}, {:7.2}) -> {:.3}% error",
            t.x, t.y, t.z, log.true_tip.x, log.true_tip.y, est.tip_error_pct
        );
    }
    Ok(())
}
