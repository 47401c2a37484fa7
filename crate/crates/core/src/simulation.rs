//! Ground-truth centerlines, ideal IMU placement and measurement corruption.
//!
//! Shapes are chains of straight runs and circular arcs, parametrized by
//! centerline arc length. Frames along a shape are parallel-transported
//! (twist free): inside an arc the frame only rotates about the arc's
//! binormal. The body tangent is the local `+x` axis, and the default base
//! sits at the origin facing `+x` with planar bends turning towards `+y`.
//!
//! IMUs ride on the body wall, which does not stretch, so they are placed by
//! *wall length* rather than centerline length. Along an arc of curvature
//! `k` the wall at distance `w` from the centerline on the outside of the
//! bend is `1 + k * w` times longer than the centerline. With `w = d / 2`
//! this matches the hinge model exactly, so any hinge-chain shape sampled
//! this way is reproduced exactly by reconstruction.

use serde::{Deserialize, Serialize};

use crate::calibration::{sample_sensor_rates, DriftModel, ImuSample};
use crate::error::{Error, Result};
use crate::math::{quat_to_axis_angle, Pose, Quat, Vec3, THETA_EPS};
use crate::reconstruction::RobotGeometry;
use crate::rng::{self, Purpose};

/// Upper end of the curvature range used for actively steered shapes, 1/cm.
pub const MAX_CURVATURE: f64 = 0.15;

/// One piece of a ground-truth centerline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapePiece {
    /// Centerline length, cm.
    pub length: f64,
    /// 1/cm, zero for a straight run.
    pub curvature: f64,
    /// Local direction the tangent turns towards; unit and orthogonal to
    /// `+x`. Ignored for straight runs.
    pub normal: Vec3,
}

impl ShapePiece {
    pub fn straight(length: f64) -> Self {
        Self {
            length,
            curvature: 0.0,
            normal: Vec3::Y,
        }
    }

    pub fn arc(length: f64, curvature: f64, normal: Vec3) -> Self {
        Self {
            length,
            curvature,
            normal,
        }
    }

    /// Pose after travelling `u` cm along this piece from `start`.
    fn advance(&self, start: &Pose, u: f64) -> Pose {
        if self.curvature == 0.0 || u == 0.0 {
            return Pose::new(start.transform_point(Vec3::X * u), start.orientation);
        }
        let radius = 1.0 / self.curvature;
        let phi = self.curvature * u;
        let local = Vec3::X * (radius * phi.sin()) + self.normal * (radius * (1.0 - phi.cos()));
        let binormal = Vec3::X.cross(self.normal);
        Pose::new(
            start.transform_point(local),
            start.orientation * Quat::from_axis_angle(binormal, phi),
        )
    }

    fn wall_length(&self, wall_offset: f64) -> f64 {
        self.length * (1.0 + self.curvature * wall_offset)
    }
}

/// A parametric centerline: arc length (cm) to pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthShape {
    pub base: Pose,
    pub pieces: Vec<ShapePiece>,
    pub description: String,
}

impl GroundTruthShape {
    pub fn new(base: Pose, pieces: Vec<ShapePiece>, description: impl Into<String>) -> Self {
        Self {
            base,
            pieces: pieces.into_iter().filter(|p| p.length > 0.0).collect(),
            description: description.into(),
        }
    }

    /// Centerline length, cm.
    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length).sum()
    }

    /// Pose at centerline arc length `s`, clamped to the shape.
    pub fn pose_at(&self, s: f64) -> Pose {
        let mut remaining = s.max(0.0);
        let mut pose = self.base;
        for piece in &self.pieces {
            if remaining <= piece.length {
                return piece.advance(&pose, remaining);
            }
            pose = piece.advance(&pose, piece.length);
            remaining -= piece.length;
        }
        pose
    }

    pub fn tip(&self) -> Pose {
        self.pose_at(self.total_length())
    }

    /// Length of the body wall at `wall_offset` from the centerline.
    pub fn wall_length(&self, wall_offset: f64) -> f64 {
        self.pieces.iter().map(|p| p.wall_length(wall_offset)).sum()
    }

    /// Centerline arc length at which the wall has run `wall` cm.
    pub fn centerline_at_wall(&self, wall: f64, wall_offset: f64) -> f64 {
        let mut remaining = wall.max(0.0);
        let mut s = 0.0;
        for piece in &self.pieces {
            let w = piece.wall_length(wall_offset);
            if remaining <= w {
                return s + piece.length * (remaining / w);
            }
            remaining -= w;
            s += piece.length;
        }
        s
    }

    /// The first `length` cm of centerline.
    pub fn truncated(&self, length: f64) -> GroundTruthShape {
        let mut remaining = length.max(0.0);
        let mut pieces = Vec::new();
        for piece in &self.pieces {
            if remaining <= 0.0 {
                break;
            }
            let take = piece.length.min(remaining);
            pieces.push(ShapePiece { length: take, ..*piece });
            remaining -= take;
        }
        GroundTruthShape {
            base: self.base,
            pieces,
            description: format!("{} truncated to {length} cm", self.description),
        }
    }

    /// Appends a straight run at the tip.
    pub fn with_straight_tail(mut self, length: f64) -> GroundTruthShape {
        if length > 0.0 {
            self.pieces.push(ShapePiece::straight(length));
        }
        self
    }

    /// Re-bases the shape.
    pub fn with_base(mut self, base: Pose) -> GroundTruthShape {
        self.base = base;
        self
    }
}

fn shape_err(msg: String) -> Error {
    Error::InvalidShape(msg)
}

/// Planar bend against an obstacle: `pre_length` straight, an arc turning
/// `bend_angle` degrees at `bend_radius`, then straight up to `total_length`
/// of centerline.
pub fn make_passive_bend_shape(
    pre_length: f64,
    bend_angle: f64,
    bend_radius: f64,
    total_length: f64,
) -> Result<GroundTruthShape> {
    if !(0.0..=90.0).contains(&bend_angle) {
        return Err(shape_err(format!("bend angle {bend_angle} deg outside [0, 90]")));
    }
    if !(pre_length >= 0.0 && bend_radius > 0.0 && total_length > 0.0) {
        return Err(shape_err(format!(
            "need pre_length >= 0, bend_radius > 0, total_length > 0 (got {pre_length}, {bend_radius}, {total_length})"
        )));
    }
    let theta = bend_angle.to_radians();
    let arc = bend_radius * theta;
    if pre_length + arc > total_length {
        return Err(shape_err(format!(
            "pre_length {pre_length} + arc {arc:.4} exceeds total length {total_length}"
        )));
    }
    let pieces = vec![
        ShapePiece::straight(pre_length),
        ShapePiece::arc(arc, 1.0 / bend_radius, Vec3::Y),
        ShapePiece::straight(total_length - pre_length - arc),
    ];
    Ok(GroundTruthShape::new(
        Pose::default(),
        pieces,
        format!("passive bend {bend_angle} deg at r={bend_radius} cm after {pre_length} cm"),
    ))
}

/// Planar arc of constant curvature `kappa` (1/cm), turning towards `+y`.
pub fn make_constant_curvature_shape(kappa: f64, length: f64) -> Result<GroundTruthShape> {
    if !(0.0..=MAX_CURVATURE).contains(&kappa) {
        return Err(shape_err(format!("curvature {kappa} outside [0, {MAX_CURVATURE}]")));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(shape_err(format!("length must be > 0, got {length}")));
    }
    Ok(GroundTruthShape::new(
        Pose::default(),
        vec![ShapePiece::arc(length, kappa, Vec3::Y)],
        format!("constant curvature {kappa} /cm over {length} cm"),
    ))
}

/// The robot after growing `grown_length` cm of centerline along `base_shape`.
pub fn make_grown_shape(base_shape: &GroundTruthShape, grown_length: f64) -> Result<GroundTruthShape> {
    let total = base_shape.total_length();
    if !(grown_length > 0.0 && grown_length <= total + 1e-9) {
        return Err(shape_err(format!("grown length {grown_length} outside (0, {total}]")));
    }
    Ok(base_shape.truncated(grown_length))
}

/// A shape made exactly of hinge-model spans: one straight/arc/straight span
/// per relative rotation. Each rotation must be a pure bend (axis orthogonal
/// to the tangent) of at most `s / d`.
pub fn make_hinge_chain_shape(bends: &[Quat], geom: &RobotGeometry) -> Result<GroundTruthShape> {
    let mut pieces = Vec::with_capacity(bends.len() * 3);
    let radius = geom.bend_radius();
    for (i, &r) in bends.iter().enumerate() {
        let aa = quat_to_axis_angle(r);
        if aa.angle <= THETA_EPS {
            pieces.push(ShapePiece::straight(geom.spacing));
            continue;
        }
        if aa.axis.x.abs() > 1e-9 {
            return Err(shape_err(format!("span {i}: bend axis is not orthogonal to the tangent")));
        }
        if aa.angle > geom.max_bend() {
            return Err(shape_err(format!(
                "span {i}: bend {:.6} rad exceeds s/d = {:.6}",
                aa.angle,
                geom.max_bend()
            )));
        }
        let straight = ((geom.spacing - aa.angle * geom.diameter) / 2.0).max(0.0);
        let normal = aa.axis.cross(Vec3::X).normalized().unwrap_or(Vec3::Y);
        pieces.push(ShapePiece::straight(straight));
        pieces.push(ShapePiece::arc(aa.angle * radius, 1.0 / radius, normal));
        pieces.push(ShapePiece::straight(straight));
    }
    Ok(GroundTruthShape::new(
        Pose::default(),
        pieces,
        format!("hinge chain of {} spans", bends.len()),
    ))
}

/// A bend of `bend_angle` degrees split evenly over consecutive spans, each
/// a centered hinge no larger than `s / d`, starting at the span that
/// contains wall length `pre_length`. Straight elsewhere, `robot_length` of
/// wall in total.
pub fn make_hinged_bend_shape(
    pre_length: f64,
    bend_angle: f64,
    geom: &RobotGeometry,
    robot_length: f64,
) -> Result<GroundTruthShape> {
    if !(0.0..=90.0).contains(&bend_angle) {
        return Err(shape_err(format!("bend angle {bend_angle} deg outside [0, 90]")));
    }
    let spans = (robot_length / geom.spacing + 1e-9).floor() as usize;
    let theta = bend_angle.to_radians();
    let count = if theta > 0.0 {
        (theta / geom.max_bend() - 1e-12).ceil().max(1.0) as usize
    } else {
        0
    };
    let first = (pre_length.max(0.0) / geom.spacing).floor() as usize;
    if first + count > spans {
        return Err(shape_err(format!(
            "bend of {bend_angle} deg needs spans {first}..{} but only {spans} fit",
            first + count
        )));
    }
    let hinge = Quat::from_axis_angle(Vec3::Z, theta / count.max(1) as f64);
    let bends: Vec<Quat> = (0..spans)
        .map(|i| if i >= first && i < first + count { hinge } else { Quat::IDENTITY })
        .collect();
    let tail = robot_length - spans as f64 * geom.spacing;
    let mut shape = make_hinge_chain_shape(&bends, geom)?.with_straight_tail(tail);
    shape.description = format!("hinged bend {bend_angle} deg over {count} spans from span {first}");
    Ok(shape)
}

/// IMUs that fit on a body of `wall_length`: `floor(L / s) + 1`, at most
/// `max_imus`.
pub fn imus_placed(wall_length: f64, spacing: f64, max_imus: usize) -> usize {
    (((wall_length / spacing) + 1e-9).floor() as usize + 1).min(max_imus)
}

/// True body poses of the IMUs, placed every `geom.spacing` cm of wall with
/// the wall `wall_offset` from the centerline.
pub fn sample_ideal_poses(shape: &GroundTruthShape, geom: &RobotGeometry, wall_offset: f64) -> Vec<Pose> {
    let n = imus_placed(shape.wall_length(wall_offset), geom.spacing, geom.num_imus);
    (0..n)
        .map(|i| shape.pose_at(shape.centerline_at_wall(i as f64 * geom.spacing, wall_offset)))
        .collect()
}

/// Noise-free readings of every IMU that fits on the shape, at time 0.
pub fn sample_ideal_imu_frames(shape: &GroundTruthShape, geom: &RobotGeometry) -> Vec<ImuSample> {
    sample_ideal_poses(shape, geom, geom.bend_radius())
        .into_iter()
        .enumerate()
        .map(|(i, p)| ImuSample::new(0.0, i, p.orientation))
        .collect()
}

/// Everything needed to simulate one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub geometry: RobotGeometry,
    pub drift: DriftModel,
    /// Seconds between the offset snapshot and the measurement.
    pub offset_age_s: f64,
    pub shape: GroundTruthShape,
    pub trial_seed: u64,
    /// Std of the random mounting rotation of IMUs 1.., degrees. IMU 0
    /// defines the body frame and is never rotated.
    #[serde(default)]
    pub mounting_std_deg: f64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.drift.validate()?;
        if !(self.offset_age_s >= 0.0 && self.offset_age_s.is_finite()) {
            return Err(Error::config("offset_age_s", "must be finite and >= 0"));
        }
        if !(self.mounting_std_deg >= 0.0 && self.mounting_std_deg.is_finite()) {
            return Err(Error::config("mounting_std_deg", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Random mounting rotation of each sensor relative to the body frame.
pub fn sample_mountings(n: usize, std_deg: f64, seed: u64) -> Vec<Quat> {
    use rand_distr::{Distribution, Normal, UnitSphere};
    (0..n)
        .map(|i| {
            if i == 0 || std_deg == 0.0 {
                return Quat::IDENTITY;
            }
            let mut r = rng::stream(seed, i as u64, Purpose::Mounting);
            let [x, y, z]: [f64; 3] = UnitSphere.sample(&mut r);
            let angle = Normal::new(0.0, std_deg).expect("finite std").sample(&mut r);
            Quat::from_axis_angle(Vec3::new(x, y, z), angle.to_radians())
        })
        .collect()
}

/// Produces the straight-pose offset snapshot and the drifted measurement
/// for a set of ideal readings.
///
/// The snapshot sees every sensor in the straight configuration at the
/// shape's base orientation, with noise but no drift. The measurement sees
/// the ideal frames after `offset_age_s` of per-sensor drift plus noise.
pub fn corrupt_samples(ideal: &[ImuSample], cfg: &TrialConfig) -> (Vec<ImuSample>, Vec<ImuSample>) {
    let model = cfg.drift.with_seed(rng::derive_seed(cfg.trial_seed, 0, Purpose::SensorRate));
    let sensors = sample_sensor_rates(&model, ideal.len());
    let mountings = sample_mountings(ideal.len(), cfg.mounting_std_deg, cfg.trial_seed);
    let mount = |q: Quat, m: Quat| if m == Quat::IDENTITY { q } else { q * m };

    let mut snapshot = Vec::with_capacity(ideal.len());
    let mut measured = Vec::with_capacity(ideal.len());
    for (s, (sensor, &m)) in ideal.iter().zip(sensors.iter().zip(&mountings)) {
        let i = s.imu_index as u64;
        let mut snap_rng = rng::stream(cfg.trial_seed, i, Purpose::SnapshotNoise);
        let straight = mount(cfg.shape.base.orientation, m);
        snapshot.push(ImuSample::new(
            0.0,
            s.imu_index,
            sensor.corrupt(straight, 0.0, &model, &mut snap_rng),
        ));

        let mut meas_rng = rng::stream(cfg.trial_seed, i, Purpose::MeasurementNoise);
        let q = sensor.corrupt(mount(s.orientation, m), cfg.offset_age_s, &model, &mut meas_rng);
        measured.push(ImuSample::new(s.time + cfg.offset_age_s, s.imu_index, q));
    }
    (snapshot, measured)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::angle_between;
    use std::f64::consts::PI;

    #[test]
    fn zero_bend_is_straight() {
        let s = make_passive_bend_shape(80.0, 0.0, 6.45, 173.4).unwrap();
        assert!(s.tip().position.distance(Vec3::new(173.4, 0.0, 0.0)) < 1e-9);
        let c = make_constant_curvature_shape(0.0, 50.0).unwrap();
        assert!(c.tip().position.distance(Vec3::new(50.0, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn right_angle_passive_bend_tip() {
        let r = 6.45;
        let s = make_passive_bend_shape(80.0, 90.0, r, 173.4).unwrap();
        // Straight to (80, 0), quarter circle about (80, r) to (80 + r, r),
        // then the remainder straight along +y.
        let rest = 173.4 - 80.0 - r * PI / 2.0;
        let expected = Vec3::new(80.0 + r, r + rest, 0.0);
        assert!(s.tip().position.distance(expected) < 1e-9);
        assert!(s.tip().tangent().distance(Vec3::Y) < 1e-12);
    }

    #[test]
    fn passive_shape_rejects_bad_geometry() {
        assert!(make_passive_bend_shape(80.0, 95.0, 6.45, 173.4).is_err());
        assert!(make_passive_bend_shape(170.0, 90.0, 6.45, 173.4).is_err());
        for angle in (0..=90).step_by(15) {
            assert!(make_passive_bend_shape(80.0, angle as f64, 6.45, 173.4).is_ok());
        }
    }

    #[test]
    fn quarter_circle() {
        let s = make_constant_curvature_shape(0.01, 50.0 * PI).unwrap();
        assert!(s.tip().position.distance(Vec3::new(100.0, 100.0, 0.0)) < 1e-9);
        assert!(make_constant_curvature_shape(0.2, 10.0).is_err());
    }

    #[test]
    fn multi_loop_arc_stays_on_circle() {
        let s = make_constant_curvature_shape(0.15, 173.4).unwrap();
        let total_turn: f64 = 0.15 * 173.4;
        assert!((total_turn - 26.01).abs() < 1e-9);
        let center = Vec3::new(0.0, 1.0 / 0.15, 0.0);
        for k in 0..=100 {
            let p = s.pose_at(173.4 * k as f64 / 100.0);
            assert!((p.position.distance(center) - 1.0 / 0.15).abs() < 1e-9);
        }
        let heading = s.tip().tangent();
        let expected = Vec3::new(total_turn.cos(), total_turn.sin(), 0.0);
        assert!(heading.distance(expected) < 1e-9);
    }

    #[test]
    fn grown_shape_truncates() {
        let base = make_constant_curvature_shape(0.02, 180.0).unwrap();
        let full = make_grown_shape(&base, 180.0).unwrap();
        assert!(full.tip().position.distance(base.tip().position) < 1e-12);
        let g = make_grown_shape(&base, 30.0).unwrap();
        let phi: f64 = 0.02 * 30.0;
        let expected = Vec3::new(50.0 * phi.sin(), 50.0 * (1.0 - phi.cos()), 0.0);
        assert!(g.tip().position.distance(expected) < 1e-9);
        assert!(make_grown_shape(&base, 200.0).is_err());
    }

    #[test]
    fn straight_shape_frames_are_identical() {
        let geom = RobotGeometry::default();
        let s = make_constant_curvature_shape(0.0, 173.4).unwrap();
        let f = sample_ideal_imu_frames(&s, &geom);
        assert_eq!(f.len(), 18);
        assert!(f.iter().all(|x| angle_between(x.orientation, Quat::IDENTITY) < 1e-12));
    }

    #[test]
    fn constant_curvature_relative_rotations_are_equal() {
        let geom = RobotGeometry::default();
        let kappa = 0.03;
        let s = make_constant_curvature_shape(kappa, 150.0).unwrap();
        let f = sample_ideal_imu_frames(&s, &geom);
        // Each span covers s of wall, i.e. s / (1 + k d/2) of centerline.
        let theta = kappa * geom.spacing / (1.0 + kappa * geom.diameter / 2.0);
        for w in f.windows(2) {
            let r = w[0].orientation.inverse() * w[1].orientation;
            let aa = quat_to_axis_angle(r);
            assert!((aa.angle - theta).abs() < 1e-9);
            assert!(aa.axis.distance(Vec3::Z) < 1e-9);
        }
    }

    #[test]
    fn placement_rule() {
        let geom = RobotGeometry::default();
        assert_eq!(imus_placed(30.0, 10.2, 18), 3);
        assert_eq!(imus_placed(173.4, 10.2, 18), 18);
        assert_eq!(imus_placed(175.0, 10.2, 18), 18);
        assert_eq!(imus_placed(10.2, 10.2, 18), 2);
        let straight = make_constant_curvature_shape(0.0, 30.0).unwrap();
        assert_eq!(sample_ideal_imu_frames(&straight, &geom).len(), 3);
    }

    #[test]
    fn hinge_chain_rejects_invalid_bends() {
        let g = RobotGeometry::default();
        let twist = Quat::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 0.2);
        assert!(make_hinge_chain_shape(&[twist], &g).is_err());
        let big = Quat::from_axis_angle(Vec3::Z, 1.0);
        assert!(make_hinge_chain_shape(&[big], &g).is_err());
    }

    #[test]
    fn hinged_bend_splits_angle() {
        let g = RobotGeometry::default();
        let s = make_hinged_bend_shape(80.0, 90.0, &g, 173.4).unwrap();
        assert!((s.wall_length(g.bend_radius()) - 173.4).abs() < 1e-9);
        assert!(s.tip().tangent().distance(Vec3::Y) < 1e-12);
        assert_eq!(s.pieces.iter().filter(|p| p.curvature > 0.0).count(), 2);
    }

    fn cfg(drift: DriftModel, age: f64, seed: u64) -> TrialConfig {
        TrialConfig {
            geometry: RobotGeometry::default(),
            drift,
            offset_age_s: age,
            shape: make_constant_curvature_shape(0.02, 160.0).unwrap(),
            trial_seed: seed,
            mounting_std_deg: 0.0,
        }
    }

    #[test]
    fn clean_corruption_is_identity() {
        let c = cfg(DriftModel::none(), 90.0, 1);
        let ideal = sample_ideal_imu_frames(&c.shape, &c.geometry);
        let (snap, meas) = corrupt_samples(&ideal, &c);
        for (a, b) in ideal.iter().zip(&meas) {
            assert_eq!(a.orientation, b.orientation);
        }
        assert!(snap.iter().all(|s| s.orientation == Quat::IDENTITY));
    }

    #[test]
    fn ninety_seconds_of_drift() {
        let drift = DriftModel {
            mean_rate: 1.33,
            rate_spread: 0.0,
            noise_std: 0.0,
            ..DriftModel::default()
        };
        let c = cfg(drift, 90.0, 2);
        let ideal = sample_ideal_imu_frames(&c.shape, &c.geometry);
        let (_, meas) = corrupt_samples(&ideal, &c);
        for (a, b) in ideal.iter().zip(&meas) {
            assert!((angle_between(a.orientation, b.orientation).to_degrees() - 1.995).abs() < 1e-9);
        }
    }

    #[test]
    fn corruption_is_seeded() {
        let c = cfg(DriftModel::default(), 84.0, 5);
        let c = TrialConfig {
            mounting_std_deg: 4.0,
            ..c
        };
        let ideal = sample_ideal_imu_frames(&c.shape, &c.geometry);
        assert_eq!(corrupt_samples(&ideal, &c), corrupt_samples(&ideal, &c));
        let other = TrialConfig { trial_seed: 6, ..c.clone() };
        assert_ne!(corrupt_samples(&ideal, &c), corrupt_samples(&ideal, &other));
    }
}
