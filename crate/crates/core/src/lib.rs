//! Shape sensing for tip-everting vine robots from IMUs spaced along the
//! body.
//!
//! The pipeline, base to tip:
//!
//! 1. [`calibration`]: offset consecutive IMU frames against a snapshot
//!    taken with the robot straight, leaving one bend rotation per span.
//! 2. [`reconstruction`]: turn every bend into a straight/arc/straight span
//!    and chain the spans into a centerline.
//! 3. [`simulation`]: ground-truth shapes, ideal IMU readings and
//!    drift/noise corruption for desk-top experiments.
//! 4. [`experiments`]: drift, passive, active, length and spacing sweeps
//!    with tip-error statistics.
//! 5. [`io`], [`plot`], [`config`], [`cli`]: CSV/JSON files, SVG plots and
//!    the `vineshape` command line.
//!
//! ```
//! use vineshape::prelude::*;
//!
//! let geom = RobotGeometry::default();
//! let straight = vec![Quat::IDENTITY; geom.num_imus - 1];
//! let line = reconstruct(&straight, &geom, Pose::default(), None, true).unwrap();
//! assert!((line.tip.position.x - 173.4).abs() < 1e-9);
//! ```

pub mod calibration;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod math;
pub mod plot;
pub mod reconstruction;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::calibration::{
        apply_drift, compute_offsets, corrected_relative_rotations, sample_sensor_rates, DriftModel, ImuSample,
        OffsetTable, SensorDrift,
    };
    pub use crate::experiments::{
        evaluate_trial, ols_fit, run_active_sweep, run_drift_experiment, run_length_sweep, run_passive_sweep,
        run_spacing_sweep, simulate_spacing_trials, simulate_trial, tip_error_percent, ExperimentRecord,
        RegressionSummary, SweepTemplate, TrialLog,
    };
    pub use crate::math::{angle_between, axis_angle_to_quat, quat_inv, quat_mul, quat_to_axis_angle, AxisAngle, Pose, Quat, Vec3};
    pub use crate::reconstruction::{advance_pose, reconstruct, segment_from_rotation, CenterlinePolyline, RobotGeometry, SegmentShape};
    pub use crate::simulation::{
        corrupt_samples, make_constant_curvature_shape, make_grown_shape, make_hinge_chain_shape, make_hinged_bend_shape,
        make_passive_bend_shape, sample_ideal_imu_frames, GroundTruthShape, TrialConfig,
    };
    pub use crate::{Error, Result};
}
