//! Hinge-model reconstruction of a centerline from relative rotations.
//!
//! cargo run --example reconstruct

use vineshape::prelude::*;

fn main() -> vineshape::Result<()> {
    let geom = RobotGeometry::default();
    let seg = segment_from_rotation(Quat::from_axis_angle(Vec3::Z, 30f64.to_radians()), &geom, true)?;
    println!(
        "30 deg span: outer arc {:.3} cm, centerline arc {:.3} cm, straight {:.3} cm each side",
        seg.arc_length_outer, seg.arc_length, seg.straight_length
    );

    // A gentle S: left for the first half, right for the second.
    let rotations: Vec<Quat> = (0..geom.num_imus - 1)
        .map(|i| {
            let deg: f64 = if i < 8 { 10.0 } else { -10.0 };
            Quat::from_axis_angle(Vec3::Z, deg.to_radians())
        })
        .collect();
    let line = reconstruct(&rotations, &geom, Pose::default(), None, true)?;
    println!("{} polyline points, {} IMUs", line.points.len(), line.imu_indices.len());
    for (i, p) in line.imu_positions().enumerate().step_by(4) {
        println!("  IMU {i:2}: ({:7.2}, {:7.2}) cm", p.x, p.y);
    }
    let tip = line.tip.position;
    println!("tip: ({:.2}, {:.2}, {:.2}) cm", tip.x, tip.y, tip.z);

    // Bends beyond s/d clamp by default and fail in strict mode.
    let too_far = vec![Quat::from_axis_angle(Vec3::Z, 1.0); geom.num_imus - 1];
    let clamped = reconstruct(&too_far, &geom, Pose::default(), None, false)?;
    println!("lenient: {} spans clamped", clamped.clamped_segments.len());
    if let Err(e) = reconstruct(&too_far, &geom, Pose::default(), None, true) {
        println!("strict: {e}");
    }
    Ok(())
}
