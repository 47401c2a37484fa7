//! Vector and unit-quaternion algebra.
//!
//! Quaternions follow the Hamilton convention (`i*j = k`, right-handed) and
//! store `(w, x, y, z)`. An orientation `q` maps vectors from the body frame
//! into the world frame: `v_world = q.rotate(v_body)`.
//!
//! Composition is local (right) composition: `a * b` (or [`quat_mul`]) is the
//! rotation `b` expressed in the frame already rotated by `a`. Chaining
//! `base * r0 * r1 * ...` therefore walks a kinematic chain from the base
//! outwards, each relative rotation expressed in the frame of its parent.
//!
//! Every constructor and product renormalizes and canonicalizes the sign so
//! that `q` and `-q` have one stored representation.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Rotations with an angle at or below this threshold (radians) are treated
/// as the identity; their axis is undefined.
pub const THETA_EPS: f64 = 1e-9;

/// A 3-vector. Centimeters when positional, dimensionless when directional.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(self / n)
        } else {
            None
        }
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, k: f64) -> Vec3 {
        Vec3::new(self.x / k, self.y / k, self.z / k)
    }
}

/// Unit quaternion, sign-canonical (`w >= 0`).
///
/// Fields are private so the unit-norm and canonical-sign invariants cannot
/// be broken from outside; use [`Quat::from_wxyz`] to build one from raw
/// components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quat {
    w: f64,
    x: f64,
    y: f64,
    z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Normalizes and sign-canonicalizes raw components. Returns `None` for a
    /// zero or non-finite input.
    pub fn from_wxyz(w: f64, x: f64, y: f64, z: f64) -> Option<Quat> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !(n > 1e-300 && n.is_finite()) {
            return None;
        }
        Some(Quat::canonical(w / n, x / n, y / n, z / n))
    }

    fn canonical(w: f64, x: f64, y: f64, z: f64) -> Quat {
        // w == 0 is a half-turn: break the tie on the first non-zero
        // vector component so q and -q still agree.
        let flip = if w != 0.0 {
            w < 0.0
        } else if x != 0.0 {
            x < 0.0
        } else if y != 0.0 {
            y < 0.0
        } else {
            z < 0.0
        };
        let q = if flip {
            Quat {
                w: -w,
                x: -x,
                y: -y,
                z: -z,
            }
        } else {
            Quat { w, x, y, z }
        };
        // -0.0 and 0.0 must not produce distinct representations.
        Quat {
            w: q.w + 0.0,
            x: q.x + 0.0,
            y: q.y + 0.0,
            z: q.z + 0.0,
        }
    }

    /// Rotation of `angle` radians about `axis` (normalized internally). A
    /// zero axis yields the identity.
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Quat {
        match axis.normalized() {
            Some(a) => {
                let (s, c) = (angle / 2.0).sin_cos();
                Quat::from_wxyz(c, a.x * s, a.y * s, a.z * s).unwrap_or(Quat::IDENTITY)
            }
            None => Quat::IDENTITY,
        }
    }

    pub fn w(self) -> f64 {
        self.w
    }
    pub fn x(self) -> f64 {
        self.x
    }
    pub fn y(self) -> f64 {
        self.y
    }
    pub fn z(self) -> f64 {
        self.z
    }

    pub fn to_wxyz(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn vector(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn norm(self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn inverse(self) -> Quat {
        quat_inv(self)
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(self) -> f64 {
        2.0 * self.vector().norm().atan2(self.w.abs())
    }

    /// Rotates a vector from the body frame into the parent frame.
    pub fn rotate(self, v: Vec3) -> Vec3 {
        let u = self.vector();
        let t = 2.0 * u.cross(v);
        v + self.w * t + u.cross(t)
    }
}

impl Default for Quat {
    fn default() -> Self {
        Quat::IDENTITY
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, b: Quat) -> Quat {
        quat_mul(self, b)
    }
}

impl TryFrom<[f64; 4]> for Quat {
    type Error = String;
    fn try_from(a: [f64; 4]) -> Result<Self, Self::Error> {
        let [w, x, y, z] = a;
        let n2 = w * w + x * x + y * y + z * z;
        if (n2 - 1.0).abs() <= 1e-12 {
            // Already unit: keep the stored bits so serialization round-trips.
            return Ok(Quat::canonical(w, x, y, z));
        }
        Quat::from_wxyz(w, x, y, z).ok_or_else(|| "zero or non-finite quaternion".into())
    }
}

impl From<Quat> for [f64; 4] {
    fn from(q: Quat) -> Self {
        q.to_wxyz()
    }
}

/// Rotation as a unit axis and an angle in `[0, pi]`.
///
/// For angles at or below [`THETA_EPS`] the axis is the placeholder `+z` and
/// carries no geometric meaning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: Vec3,
    pub angle: f64,
}

impl AxisAngle {
    pub fn is_identity(&self) -> bool {
        self.angle <= THETA_EPS
    }
}

/// Position (cm) plus body-to-world orientation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: Quat,
}

impl Pose {
    pub fn new(position: Vec3, orientation: Quat) -> Self {
        Self {
            position,
            orientation,
        }
    }

    /// Maps a point from this pose's body frame into the parent frame.
    pub fn transform_point(&self, local: Vec3) -> Vec3 {
        self.position + self.orientation.rotate(local)
    }

    /// Applies `self` as a rigid transform to another pose.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            position: self.transform_point(other.position),
            orientation: self.orientation * other.orientation,
        }
    }

    /// Unit tangent of the robot body: the local `+x` axis in the world.
    pub fn tangent(&self) -> Vec3 {
        self.orientation.rotate(Vec3::X)
    }
}

/// Hamilton product `a * b`: rotation `b` applied in the frame rotated by `a`.
pub fn quat_mul(a: Quat, b: Quat) -> Quat {
    let w = a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z;
    let x = a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y;
    let y = a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x;
    let z = a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w;
    Quat::from_wxyz(w, x, y, z).unwrap_or(Quat::IDENTITY)
}

/// Inverse of a unit quaternion (its conjugate).
pub fn quat_inv(q: Quat) -> Quat {
    Quat::canonical(q.w, -q.x, -q.y, -q.z)
}

pub fn quat_to_axis_angle(q: Quat) -> AxisAngle {
    let v = q.vector();
    let s = v.norm();
    let angle = 2.0 * s.atan2(q.w);
    if angle <= THETA_EPS {
        return AxisAngle {
            axis: Vec3::Z,
            angle,
        };
    }
    AxisAngle {
        axis: v / s,
        angle,
    }
}

pub fn axis_angle_to_quat(aa: AxisAngle) -> Quat {
    Quat::from_axis_angle(aa.axis, aa.angle)
}

/// Angle of the rotation taking `a` to `b`, in `[0, pi]`.
pub fn angle_between(a: Quat, b: Quat) -> f64 {
    quat_to_axis_angle(quat_inv(a) * b).angle
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn arb_quat() -> impl Strategy<Value = Quat> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter_map("non-zero", |(w, x, y, z)| Quat::from_wxyz(w, x, y, z))
    }

    fn close(a: Quat, b: Quat, tol: f64) -> bool {
        angle_between(a, b) < tol
    }

    #[test]
    fn identity_is_neutral() {
        let q = Quat::from_axis_angle(Vec3::new(1.0, 2.0, 3.0), 0.7);
        assert_eq!(quat_mul(Quat::IDENTITY, q), q);
        assert!(close(quat_mul(q, quat_inv(q)), Quat::IDENTITY, 1e-9));
    }

    #[test]
    fn quarter_turns_about_z_compose_to_half_turn() {
        let q = Quat::from_axis_angle(Vec3::Z, FRAC_PI_2);
        let h = quat_mul(q, q);
        // Hand evaluation: (c + s k)^2 = c^2 - s^2 + 2cs k = 0 + 1 k.
        assert!(h.w().abs() < 1e-15);
        assert!((h.z() - 1.0).abs() < 1e-15);
        let aa = quat_to_axis_angle(h);
        assert!((aa.angle - PI).abs() < 1e-12);
        assert!((aa.axis.z - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_is_local() {
        // Yaw 90 then a pitch about the *new* y axis (which is world -x).
        let yaw = Quat::from_axis_angle(Vec3::Z, FRAC_PI_2);
        let pitch = Quat::from_axis_angle(Vec3::Y, FRAC_PI_2);
        let q = yaw * pitch;
        // Body x first pitches to -z, then the yaw leaves -z in place.
        let t = q.rotate(Vec3::X);
        assert!(t.distance(Vec3::new(0.0, 0.0, -1.0)) < 1e-12);
        // Body z: pitch takes it to +x, yaw takes +x to +y.
        assert!(q.rotate(Vec3::Z).distance(Vec3::Y) < 1e-12);
    }

    #[test]
    fn inverse_of_quarter_turn() {
        let q = Quat::from_axis_angle(Vec3::Z, FRAC_PI_2);
        let qi = quat_inv(q);
        assert!(close(qi, Quat::from_axis_angle(Vec3::Z, -FRAC_PI_2), 1e-12));
        assert_eq!(quat_inv(Quat::IDENTITY), Quat::IDENTITY);
    }

    #[test]
    fn axis_angle_examples() {
        let aa = quat_to_axis_angle(Quat::IDENTITY);
        assert_eq!(aa.angle, 0.0);
        assert!(aa.is_identity());

        let diag = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        let q = Quat::from_axis_angle(diag, 2.0 * PI / 3.0);
        // Hand conversion: w = cos 60 = 0.5, vector = sin 60 * diag = 0.5 each.
        assert!((q.w() - 0.5).abs() < 1e-15);
        assert!((q.x() - 0.5).abs() < 1e-15);
        let aa = quat_to_axis_angle(q);
        assert!((aa.angle - 2.094_395_102_393_195).abs() < 1e-12);
        assert!(aa.axis.distance(diag) < 1e-12);

        let q = axis_angle_to_quat(AxisAngle {
            axis: Vec3::Z,
            angle: FRAC_PI_2,
        });
        let h = 2f64.sqrt() / 2.0;
        assert!((q.w() - h).abs() < 1e-15 && (q.z() - h).abs() < 1e-15);
        assert_eq!(
            axis_angle_to_quat(AxisAngle {
                axis: Vec3::X,
                angle: 0.0
            }),
            Quat::IDENTITY
        );
    }

    #[test]
    fn tiny_rotation_gets_placeholder_axis() {
        let half = THETA_EPS / 4.0;
        let q = Quat::from_wxyz(half.cos(), half.sin(), 0.0, 0.0).unwrap();
        let aa = quat_to_axis_angle(q);
        assert!(aa.angle <= THETA_EPS);
        assert_eq!(aa.axis, Vec3::Z);
    }

    #[test]
    fn angle_between_examples() {
        let q = Quat::from_axis_angle(Vec3::X, PI / 6.0);
        assert_eq!(angle_between(q, q), 0.0);
        assert!((angle_between(Quat::IDENTITY, q) - 0.523_598_775_598_298_8).abs() < 1e-12);
    }

    #[test]
    fn half_turn_sign_is_canonical() {
        let a = Quat::from_wxyz(0.0, -1.0, 0.0, 0.0).unwrap();
        let b = Quat::from_wxyz(0.0, 1.0, -0.0, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serde_round_trip() {
        let q = Quat::from_axis_angle(Vec3::new(0.3, -1.0, 2.0), 1.1);
        let s = serde_json::to_string(&q).unwrap();
        let back: Quat = serde_json::from_str(&s).unwrap();
        assert_eq!(q, back);
        assert!(serde_json::from_str::<Quat>("[0,0,0,0]").is_err());
    }

    proptest! {
        #[test]
        fn products_stay_unit_and_canonical(a in arb_quat(), b in arb_quat()) {
            let p = a * b;
            prop_assert!((p.norm() - 1.0).abs() < 1e-9);
            prop_assert!(p.w() >= 0.0);
        }

        #[test]
        fn associativity(a in arb_quat(), b in arb_quat(), c in arb_quat()) {
            prop_assert!(angle_between((a * b) * c, a * (b * c)) < 1e-9);
        }

        #[test]
        fn negation_has_one_representation(c in prop::array::uniform4(-1.0..1.0f64)) {
            prop_assume!(c.iter().any(|v| v.abs() > 1e-3));
            let a = Quat::from_wxyz(c[0], c[1], c[2], c[3]).unwrap();
            let b = Quat::from_wxyz(-c[0], -c[1], -c[2], -c[3]).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn inverse_cancels(q in arb_quat()) {
            prop_assert!(angle_between(q * quat_inv(q), Quat::IDENTITY) < 1e-9);
        }

        #[test]
        fn angle_between_is_symmetric(a in arb_quat(), b in arb_quat()) {
            prop_assert!((angle_between(a, b) - angle_between(b, a)).abs() < 1e-9);
        }

        #[test]
        fn rotate_matches_sandwich_product(q in arb_quat(), v in prop::array::uniform3(-10.0..10.0f64)) {
            let v = Vec3::from(v);
            let r = q.rotate(v);
            // q * (0, v) * q^-1, expanded by hand without the canonicalizing product.
            let (w, x, y, z) = (q.w(), q.x(), q.y(), q.z());
            let m = [
                [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
                [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
                [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
            ];
            let e = Vec3::new(
                m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
            );
            prop_assert!(r.distance(e) < 1e-9);
        }
    }
}
