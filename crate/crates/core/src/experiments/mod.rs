//! End-to-end trials and the drift, passive, active, length and spacing
//! sweeps.
//!
//! A trial simulates a robot in a ground-truth shape, corrupts the IMU
//! readings, runs offsetting plus reconstruction and scores the estimated
//! tip against the true one as a percentage of the robot's length. When the
//! body extends past the last IMU used, the estimate continues straight from
//! that IMU for the remaining length.

mod stats;
mod sweeps;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use stats::{ln_gamma, ols_fit, regularized_incomplete_beta, student_t_two_sided, RegressionSummary};
pub use sweeps::*;

use crate::calibration::{compute_offsets, corrected_relative_rotations, ImuSample};
use crate::error::{Error, Result};
use crate::math::{Pose, Vec3};
use crate::reconstruction::{reconstruct, CenterlinePolyline, RobotGeometry};
use crate::simulation::{corrupt_samples, sample_ideal_poses, TrialConfig};

/// One trial's outcome within a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub trial: usize,
    /// Degrees, 1/cm or cm depending on the sweep.
    pub independent_var: f64,
    /// Tip error as a percentage of robot length.
    pub tip_error_pct: f64,
    pub trial_seed: u64,
    pub metadata: BTreeMap<String, String>,
}

impl ExperimentRecord {
    /// Metadata as `key=value` pairs joined by `;`, in key order.
    pub fn notes(&self) -> String {
        self.metadata
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `100 * |estimated - true| / robot_length`.
pub fn tip_error_percent(estimated_tip: Vec3, true_tip: Vec3, robot_length: f64) -> f64 {
    100.0 * estimated_tip.distance(true_tip) / robot_length
}

/// Everything recorded (or simulated) for one trial: the offset snapshot,
/// the measurement and the ground truth needed to score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub label: String,
    /// Geometry with `num_imus` set to the IMUs actually on the body.
    pub geometry: RobotGeometry,
    pub base: Pose,
    /// Wall length of the body, cm.
    pub robot_length: f64,
    pub true_tip: Vec3,
    pub true_imu_positions: Vec<Vec3>,
    pub snapshot: Vec<ImuSample>,
    pub measured: Vec<ImuSample>,
    pub trial_seed: u64,
    pub offset_age_s: f64,
}

/// Simulates one trial. `wall_offset` places the IMUs along the shape (see
/// [`crate::simulation`]); pass `d / 2` for a body that matches the model.
pub fn simulate_trial(cfg: &TrialConfig, wall_offset: f64) -> Result<TrialLog> {
    cfg.validate()?;
    let poses = sample_ideal_poses(&cfg.shape, &cfg.geometry, wall_offset);
    if poses.len() < 2 {
        return Err(Error::InvalidShape(format!(
            "shape holds {} IMU(s); at least 2 are needed",
            poses.len()
        )));
    }
    let ideal: Vec<ImuSample> = poses
        .iter()
        .enumerate()
        .map(|(i, p)| ImuSample::new(0.0, i, p.orientation))
        .collect();
    let (snapshot, measured) = corrupt_samples(&ideal, cfg);
    Ok(TrialLog {
        label: cfg.shape.description.clone(),
        geometry: RobotGeometry {
            num_imus: poses.len(),
            ..cfg.geometry
        },
        base: cfg.shape.base,
        robot_length: cfg.shape.wall_length(wall_offset),
        true_tip: cfg.shape.tip().position,
        true_imu_positions: poses.iter().map(|p| p.position).collect(),
        snapshot,
        measured,
        trial_seed: cfg.trial_seed,
        offset_age_s: cfg.offset_age_s,
    })
}

/// Reconstruction of a trial and its score.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialEstimate {
    pub centerline: CenterlinePolyline,
    /// Estimated end of the body, after the straight continuation.
    pub estimated_tip: Vec3,
    pub tip_error_pct: f64,
    /// Spacing between the IMUs that were used, cm.
    pub spacing: f64,
}

/// Reconstructs a trial using only IMUs `0, k, 2k, ...`. `k = 1` uses every
/// IMU.
pub fn evaluate_trial(log: &TrialLog, k: usize, strict: bool) -> Result<TrialEstimate> {
    let n = log.geometry.num_imus;
    if k == 0 || (n - 1) / k < 1 {
        return Err(Error::InvalidGeometry(format!(
            "decimation by {k} leaves fewer than two of {n} IMUs"
        )));
    }
    let table = compute_offsets(&log.snapshot)?.decimate(k)?;
    let measured: Vec<ImuSample> = if k == 1 {
        log.measured.clone()
    } else {
        let mut sorted = log.measured.clone();
        sorted.sort_by_key(|s| s.imu_index);
        sorted
            .into_iter()
            .filter(|s| s.imu_index % k == 0 && s.imu_index / k < table.num_imus())
            .map(|s| ImuSample::new(s.time, s.imu_index / k, s.orientation))
            .collect()
    };
    let geom = RobotGeometry {
        spacing: log.geometry.spacing * k as f64,
        num_imus: table.num_imus(),
        ..log.geometry
    };
    let rotations = corrected_relative_rotations(&measured, &table)?;
    let centerline = reconstruct(&rotations, &geom, log.base, None, strict)?;
    let remaining = log.robot_length - geom.sensed_length();
    let estimated_tip = centerline.extended_tip(remaining).position;
    Ok(TrialEstimate {
        tip_error_pct: tip_error_percent(estimated_tip, log.true_tip, log.robot_length),
        centerline,
        estimated_tip,
        spacing: geom.spacing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::DriftModel;
    use crate::simulation::make_hinged_bend_shape;

    #[test]
    fn tip_error_examples() {
        let v = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(tip_error_percent(v, v, 173.4), 0.0);
        let e = tip_error_percent(Vec3::new(17.34, 0.0, 0.0), Vec3::ZERO, 173.4);
        assert!((e - 10.0).abs() < 1e-12);
        let e = tip_error_percent(Vec3::new(0.0, 27.7, 0.0), Vec3::ZERO, 173.4);
        assert!((e - 16.0).abs() < 0.05);
    }

    #[test]
    fn notes_are_sorted_pairs() {
        let mut m = BTreeMap::new();
        m.insert("b".to_string(), "2".to_string());
        m.insert("a".to_string(), "1".to_string());
        let r = ExperimentRecord {
            trial: 0,
            independent_var: 0.0,
            tip_error_pct: 0.0,
            trial_seed: 0,
            metadata: m,
        };
        assert_eq!(r.notes(), "a=1;b=2");
    }

    #[test]
    fn clean_hinged_trial_is_exact() {
        let geom = RobotGeometry::default();
        let cfg = TrialConfig {
            geometry: geom,
            drift: DriftModel::none(),
            offset_age_s: 84.0,
            shape: make_hinged_bend_shape(80.0, 75.0, &geom, 173.4).unwrap(),
            trial_seed: 9,
            mounting_std_deg: 5.0,
        };
        let log = simulate_trial(&cfg, geom.bend_radius()).unwrap();
        let est = evaluate_trial(&log, 1, true).unwrap();
        assert!(est.tip_error_pct < 1e-9, "{}", est.tip_error_pct);
        for (p, q) in est.centerline.imu_positions().zip(&log.true_imu_positions) {
            assert!(p.distance(*q) < 1e-9);
        }
    }

    #[test]
    fn decimation_limits() {
        let geom = RobotGeometry::default();
        let cfg = TrialConfig {
            geometry: geom,
            drift: DriftModel::none(),
            offset_age_s: 0.0,
            shape: make_hinged_bend_shape(80.0, 30.0, &geom, 173.4).unwrap(),
            trial_seed: 1,
            mounting_std_deg: 0.0,
        };
        let log = simulate_trial(&cfg, geom.bend_radius()).unwrap();
        assert!(evaluate_trial(&log, 17, true).is_ok());
        assert!(evaluate_trial(&log, 18, true).is_err());
        assert!(evaluate_trial(&log, 0, true).is_err());
        let e = evaluate_trial(&log, 16, true).unwrap();
        assert_eq!(e.centerline.imu_indices.len(), 2);
        assert!((e.spacing - 163.2).abs() < 1e-9);
    }
}
