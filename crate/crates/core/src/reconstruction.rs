//! Hinge-model shape reconstruction.
//!
//! Each span between consecutive IMUs is modelled as a straight run, a
//! circular arc and a second straight run of equal length. The outer wall of
//! the body is inextensible: for a bend of angle `theta` the outer wall arc
//! is `theta * d` long, the centerline arc `theta * d / 2` (so the centerline
//! bends with radius `d / 2`), and the remainder of the spacing `s` is split
//! between the two straight runs:
//!
//! ```text
//! L_arc_outer = theta * d
//! L_arc       = theta * d / 2
//! L_straight  = (s - L_arc_outer) / 2
//! ```
//!
//! The body tangent is the local `+x` axis of each IMU frame. Spans are
//! chained from the base: the end pose of one span is the start of the next.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{quat_to_axis_angle, Pose, Quat, Vec3};

/// Axis/tangent alignment above which a relative rotation is treated as a
/// pure twist.
pub const TWIST_ALIGNMENT: f64 = 0.999;

/// Arc angle covered by one polyline sample with the default sampling.
pub const ARC_SAMPLE_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotGeometry {
    /// Straight spacing between consecutive IMUs, cm.
    pub spacing: f64,
    /// Inflated body diameter, cm.
    pub diameter: f64,
    pub num_imus: usize,
}

impl Default for RobotGeometry {
    /// The 18-IMU, 10.2 cm spacing, 12.9 cm diameter robot.
    fn default() -> Self {
        Self {
            spacing: 10.2,
            diameter: 12.9,
            num_imus: 18,
        }
    }
}

impl RobotGeometry {
    pub fn new(spacing: f64, diameter: f64, num_imus: usize) -> Result<Self> {
        let g = Self {
            spacing,
            diameter,
            num_imus,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::InvalidGeometry(format!("spacing must be > 0, got {}", self.spacing)));
        }
        if !(self.diameter.is_finite() && self.diameter > 0.0) {
            return Err(Error::InvalidGeometry(format!("diameter must be > 0, got {}", self.diameter)));
        }
        if self.num_imus < 2 {
            return Err(Error::InvalidGeometry(format!("need at least 2 IMUs, got {}", self.num_imus)));
        }
        Ok(())
    }

    /// Largest bend a single span can hold, `s / d`.
    pub fn max_bend(&self) -> f64 {
        self.spacing / self.diameter
    }

    /// Distance from the base to the last IMU when straight.
    pub fn sensed_length(&self) -> f64 {
        (self.num_imus - 1) as f64 * self.spacing
    }

    /// Centerline bend radius of the hinge arc.
    pub fn bend_radius(&self) -> f64 {
        self.diameter / 2.0
    }
}

/// Straight/arc/straight decomposition of one span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentShape {
    /// Bend angle used for the geometry, radians. Zero for pure twists.
    pub theta: f64,
    /// Rotation axis in the frame of the span's first IMU.
    pub bend_axis: Vec3,
    /// Centerline arc length, cm.
    pub arc_length: f64,
    /// Outer-wall arc length, cm.
    pub arc_length_outer: f64,
    /// Length of each of the two straight runs, cm.
    pub straight_length: f64,
    /// The bend exceeded `s / d` and was limited to it.
    pub clamped: bool,
    /// Full relative rotation, applied to the frame at the end of the span.
    pub rotation: Quat,
}

impl SegmentShape {
    /// Unit direction (local frame) the tangent turns towards, if the span
    /// bends at all.
    pub fn bend_direction(&self) -> Option<Vec3> {
        if self.theta == 0.0 {
            return None;
        }
        self.bend_axis.cross(Vec3::X).normalized()
    }

    fn default_arc_samples(&self) -> usize {
        ((self.theta / ARC_SAMPLE_STEP).ceil() as usize).max(2)
    }
}

/// Converts one corrected relative rotation into its span geometry.
///
/// Bends beyond `s / d` leave no room for the straight runs; `strict` turns
/// that into an error, otherwise the bend is clamped to `s / d`.
pub fn segment_from_rotation(r: Quat, geom: &RobotGeometry, strict: bool) -> Result<SegmentShape> {
    segment_at(r, geom, strict, 0)
}

fn segment_at(r: Quat, geom: &RobotGeometry, strict: bool, index: usize) -> Result<SegmentShape> {
    let aa = quat_to_axis_angle(r);
    let twist = aa.axis.x.abs() > TWIST_ALIGNMENT;
    let mut theta = if aa.is_identity() || twist { 0.0 } else { aa.angle };
    let limit = geom.max_bend();
    let mut clamped = false;
    if theta > limit {
        if strict {
            return Err(Error::BendExceedsSegment {
                segment: index,
                theta,
                limit,
            });
        }
        theta = limit;
        clamped = true;
    }
    let arc_length_outer = theta * geom.diameter;
    let straight_length = ((geom.spacing - arc_length_outer) / 2.0).max(0.0);
    Ok(SegmentShape {
        theta,
        bend_axis: aa.axis,
        arc_length: theta * geom.diameter / 2.0,
        arc_length_outer,
        straight_length,
        clamped,
        rotation: r,
    })
}

/// Walks one span from `start`.
///
/// Returns the end pose and the points visited after `start`: the arc start,
/// `arc_samples` points along the arc, and the span end. A straight span
/// contributes only its end point.
pub fn advance_pose(start: &Pose, seg: &SegmentShape, arc_samples: usize) -> (Pose, Vec<Vec3>) {
    let end_orientation = start.orientation * seg.rotation;
    let Some(n) = seg.bend_direction() else {
        let span = 2.0 * seg.straight_length + seg.arc_length;
        let end = start.transform_point(Vec3::X * span);
        return (Pose::new(end, end_orientation), vec![end]);
    };
    let radius = seg.arc_length / seg.theta;
    let ls = seg.straight_length;
    let arc_point = |phi: f64| Vec3::X * (ls + radius * phi.sin()) + n * (radius * (1.0 - phi.cos()));
    let samples = arc_samples.max(1);

    let mut local = Vec::with_capacity(samples + 2);
    if ls > 0.0 {
        local.push(Vec3::X * ls);
    }
    for k in 1..=samples {
        local.push(arc_point(seg.theta * k as f64 / samples as f64));
    }
    let (s, c) = seg.theta.sin_cos();
    let exit_tangent = Vec3::X * c + n * s;
    let end_local = arc_point(seg.theta) + exit_tangent * ls;
    if ls > 0.0 {
        local.push(end_local);
    }

    let points = local.into_iter().map(|p| start.transform_point(p)).collect();
    let end = Pose::new(start.transform_point(end_local), end_orientation);
    (end, points)
}

/// Reconstructed centerline from base to the last IMU.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterlinePolyline {
    /// World-frame points, cm. `points[0]` is the base.
    pub points: Vec<Vec3>,
    /// Index into `points` of each IMU.
    pub imu_indices: Vec<usize>,
    /// Pose at each IMU.
    pub imu_poses: Vec<Pose>,
    /// Pose at the last IMU.
    pub tip: Pose,
    /// Spans whose bend was clamped to `s / d`.
    pub clamped_segments: Vec<usize>,
}

impl CenterlinePolyline {
    /// Pose reached by continuing straight from the tip for `length` cm.
    /// Used when the body extends past the last IMU.
    pub fn extended_tip(&self, length: f64) -> Pose {
        Pose::new(
            self.tip.position + self.tip.tangent() * length.max(0.0),
            self.tip.orientation,
        )
    }

    pub fn imu_positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.imu_indices.iter().map(|&i| self.points[i])
    }
}

/// Chains every span from `base`. `arc_samples = None` picks
/// `max(2, ceil(theta / 0.05))` points per arc.
pub fn reconstruct(
    rotations: &[Quat],
    geom: &RobotGeometry,
    base: Pose,
    arc_samples: Option<usize>,
    strict: bool,
) -> Result<CenterlinePolyline> {
    geom.validate()?;
    if rotations.len() + 1 != geom.num_imus {
        return Err(Error::InvalidGeometry(format!(
            "{} relative rotations for {} IMUs",
            rotations.len(),
            geom.num_imus
        )));
    }
    let mut points = vec![base.position];
    let mut imu_indices = vec![0];
    let mut imu_poses = vec![base];
    let mut clamped_segments = Vec::new();
    let mut pose = base;
    for (i, &r) in rotations.iter().enumerate() {
        let seg = segment_at(r, geom, strict, i)?;
        if seg.clamped {
            clamped_segments.push(i);
        }
        let samples = arc_samples.unwrap_or_else(|| seg.default_arc_samples());
        let (end, pts) = advance_pose(&pose, &seg, samples);
        points.extend(pts);
        imu_indices.push(points.len() - 1);
        imu_poses.push(end);
        pose = end;
    }
    Ok(CenterlinePolyline {
        points,
        imu_indices,
        imu_poses,
        tip: pose,
        clamped_segments,
    })
}
