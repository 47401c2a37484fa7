//! Offsetting: a straight snapshot absorbs arbitrary IMU mountings, so
//! later frames yield the body's bends alone.
//!
//! cargo run --example offsets

use vineshape::prelude::*;
use vineshape::simulation::sample_mountings;

fn main() -> vineshape::Result<()> {
    let n = 5;
    let mounts = sample_mountings(n, 10.0, 42);
    let snapshot: Vec<ImuSample> = (0..n).map(|i| ImuSample::new(0.0, i, mounts[i])).collect();
    let table = compute_offsets(&snapshot)?;

    // Bend the body 20 degrees between IMUs 1 and 2, and 35 between 3 and 4.
    let bends = [0.0, 20.0, 0.0, 35.0].map(|d: f64| Quat::from_axis_angle(Vec3::Z, d.to_radians()));
    let mut body = Quat::IDENTITY;
    let mut frame = vec![ImuSample::new(60.0, 0, mounts[0])];
    for (i, b) in bends.iter().enumerate() {
        body = body * *b;
        frame.push(ImuSample::new(60.0, i + 1, body * mounts[i + 1]));
    }

    for (i, r) in corrected_relative_rotations(&frame, &table)?.iter().enumerate() {
        let aa = quat_to_axis_angle(*r);
        println!("pair {i}: {:6.3} deg about {:?}", aa.angle.to_degrees(), aa.axis.to_array().map(|c| (c * 1e6).round() / 1e6));
    }
    Ok(())
}
