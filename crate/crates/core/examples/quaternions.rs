//! Quaternion basics: axis-angle conversion, composition and the angle
//! between two orientations.
//!
//! cargo run --example quaternions

use vineshape::prelude::*;

fn main() {
    let yaw = Quat::from_axis_angle(Vec3::Z, 30f64.to_radians());
    let pitch = Quat::from_axis_angle(Vec3::Y, -15f64.to_radians());

    // Local composition: pitch is applied in the frame left by yaw.
    let q = quat_mul(yaw, pitch);
    let aa = quat_to_axis_angle(q);
    println!("yaw * pitch = {:?}", q.to_wxyz());
    println!("  axis {:?}, angle {:.4} deg", aa.axis.to_array(), aa.angle.to_degrees());
    println!("  tangent {:?}", q.rotate(Vec3::X).to_array());

    let back = axis_angle_to_quat(aa);
    println!("round trip error: {:.2e} rad", angle_between(q, back));
    println!("q * q^-1 = {:?}", quat_mul(q, quat_inv(q)).to_wxyz());

    // q and -q are the same rotation and canonicalize to the same value.
    let [w, x, y, z] = q.to_wxyz();
    let neg = Quat::from_wxyz(-w, -x, -y, -z).unwrap();
    println!("canonical under negation: {}", neg == q);
}
