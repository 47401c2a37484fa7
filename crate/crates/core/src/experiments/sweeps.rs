use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_trial, ols_fit, simulate_trial, ExperimentRecord, RegressionSummary, TrialLog};
use crate::calibration::{sample_sensor_rates, DriftModel};
use crate::error::{Error, Result};
use crate::math::{angle_between, Quat};
use crate::reconstruction::RobotGeometry;
use crate::rng::{self, Purpose};
use crate::simulation::{
    make_constant_curvature_shape, make_grown_shape, make_hinged_bend_shape, make_passive_bend_shape,
    GroundTruthShape, ShapePiece, TrialConfig,
};

/// Settings shared by every trial of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTemplate {
    pub geometry: RobotGeometry,
    pub drift: DriftModel,
    pub mounting_std_deg: f64,
    pub master_seed: u64,
    /// Fail on bends beyond `s / d` instead of clamping them.
    pub strict: bool,
}

impl Default for SweepTemplate {
    fn default() -> Self {
        Self {
            geometry: RobotGeometry::default(),
            drift: DriftModel::default(),
            mounting_std_deg: 0.0,
            master_seed: 0,
            strict: false,
        }
    }
}

impl SweepTemplate {
    /// The same template with drift and noise switched off.
    pub fn clean(&self) -> Self {
        Self {
            drift: DriftModel::none(),
            ..self.clone()
        }
    }

    fn trial_seed(&self, kind: SweepKind, index: usize) -> u64 {
        let sweep = rng::derive_seed(self.master_seed, kind as u64, Purpose::TrialSeed);
        rng::derive_seed(sweep, index as u64, Purpose::TrialSeed)
    }

    fn offset_age(&self, seed: u64, mean: f64, jitter: f64) -> f64 {
        if jitter == 0.0 {
            return mean;
        }
        let mut r = rng::stream(seed, 0, Purpose::OffsetAge);
        (mean + jitter * r.random_range(-1.0..=1.0)).max(0.0)
    }

    fn trial(&self, shape: GroundTruthShape, offset_age_s: f64, trial_seed: u64) -> TrialConfig {
        TrialConfig {
            geometry: self.geometry,
            drift: self.drift,
            offset_age_s,
            shape,
            trial_seed,
            mounting_std_deg: self.mounting_std_deg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u64)]
pub enum SweepKind {
    Drift = 1,
    Passive = 2,
    Active = 3,
    Length = 4,
    Spacing = 5,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Drift => "drift",
            SweepKind::Passive => "passive",
            SweepKind::Active => "active",
            SweepKind::Length => "length",
            SweepKind::Spacing => "spacing",
        }
    }
}

impl std::str::FromStr for SweepKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "drift" => SweepKind::Drift,
            "passive" => SweepKind::Passive,
            "active" => SweepKind::Active,
            "length" => SweepKind::Length,
            "spacing" => SweepKind::Spacing,
            other => return Err(Error::config("kind", format!("unknown sweep kind `{other}`"))),
        })
    }
}

/// Records of a tip-error sweep with the regression of error on the
/// independent variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub records: Vec<ExperimentRecord>,
    pub mean_error_pct: f64,
    /// `None` when the independent variable takes a single value or there
    /// are fewer than three records.
    pub regression: Option<RegressionSummary>,
}

impl SweepResult {
    fn from_records(kind: SweepKind, mut records: Vec<ExperimentRecord>) -> Self {
        records.sort_by_key(|r| r.trial);
        let n = records.len().max(1) as f64;
        let mean_error_pct = records.iter().map(|r| r.tip_error_pct).sum::<f64>() / n;
        let xs: Vec<f64> = records.iter().map(|r| r.independent_var).collect();
        let ys: Vec<f64> = records.iter().map(|r| r.tip_error_pct).collect();
        SweepResult {
            kind,
            mean_error_pct,
            regression: ols_fit(&xs, &ys).ok(),
            records,
        }
    }
}

fn record(
    trial: usize,
    independent_var: f64,
    log: &TrialLog,
    error: f64,
    extra: impl IntoIterator<Item = (&'static str, String)>,
) -> ExperimentRecord {
    let mut metadata = BTreeMap::new();
    metadata.insert("offset_age_s".to_string(), format!("{:.3}", log.offset_age_s));
    metadata.insert("imus".to_string(), log.geometry.num_imus.to_string());
    for (k, v) in extra {
        metadata.insert(k.to_string(), v);
    }
    ExperimentRecord {
        trial,
        independent_var,
        tip_error_pct: error,
        trial_seed: log.trial_seed,
        metadata,
    }
}

/// Scores a trial, and the same trial without corruption so sensor error
/// and model error can be told apart.
fn score(template: &SweepTemplate, cfg: &TrialConfig, wall_offset: f64) -> Result<(TrialLog, f64, f64)> {
    let log = simulate_trial(cfg, wall_offset)?;
    let error = evaluate_trial(&log, 1, template.strict)?.tip_error_pct;
    let clean_cfg = TrialConfig {
        drift: DriftModel::none(),
        ..cfg.clone()
    };
    let clean = simulate_trial(&clean_cfg, wall_offset)?;
    let model_error = evaluate_trial(&clean, 1, template.strict)?.tip_error_pct;
    Ok((log, error, model_error))
}

fn run_grid<T: Sync>(
    values: &[T],
    trials_per_value: usize,
    f: impl Fn(usize, &T) -> Result<ExperimentRecord> + Sync,
) -> Result<Vec<ExperimentRecord>> {
    (0..values.len() * trials_per_value)
        .into_par_iter()
        .map(|i| f(i, &values[i / trials_per_value]))
        .collect()
}

/// Bends against an obstacle at a sweep of angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PassiveSweep {
    pub angles_deg: Vec<f64>,
    pub trials_per_angle: usize,
    /// Wall length before the bend starts, cm.
    pub pre_length: f64,
    /// Centerline bend radius, cm. `None` splits the bend into centered
    /// hinges of radius `d / 2`, which the model represents exactly.
    pub bend_radius: Option<f64>,
    pub offset_age_s: f64,
    pub offset_age_jitter_s: f64,
}

impl Default for PassiveSweep {
    fn default() -> Self {
        Self {
            angles_deg: (0..=6).map(|i| 15.0 * i as f64).collect(),
            trials_per_angle: 2,
            pre_length: 80.0,
            bend_radius: None,
            offset_age_s: 84.0,
            offset_age_jitter_s: 15.0,
        }
    }
}

pub fn run_passive_sweep(template: &SweepTemplate, sweep: &PassiveSweep) -> Result<SweepResult> {
    if sweep.angles_deg.is_empty() || sweep.trials_per_angle == 0 {
        return Err(Error::config("passive.angles_deg", "need at least one angle and one trial"));
    }
    let geom = template.geometry;
    let robot_length = geom.sensed_length();
    let wall_offset = geom.bend_radius();
    let records = run_grid(&sweep.angles_deg, sweep.trials_per_angle, |i, &angle| {
        let shape = match sweep.bend_radius {
            None => make_hinged_bend_shape(sweep.pre_length, angle, &geom, robot_length)?,
            Some(r) => {
                let theta = angle.to_radians();
                let centerline = robot_length - theta * wall_offset;
                make_passive_bend_shape(sweep.pre_length, angle, r, centerline)?
            }
        };
        let seed = template.trial_seed(SweepKind::Passive, i);
        let age = template.offset_age(seed, sweep.offset_age_s, sweep.offset_age_jitter_s);
        let (log, err, model_err) = score(template, &template.trial(shape, age, seed), wall_offset)?;
        Ok(record(i, angle, &log, err, [("model_error_pct", format!("{model_err:.9}"))]))
    })?;
    Ok(SweepResult::from_records(SweepKind::Passive, records))
}

/// Actively steered constant-curvature shapes at full length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActiveSweep {
    pub curvatures: Vec<f64>,
    pub trials_per_curvature: usize,
    /// Distance from centerline to the inextensible wall, as a multiple of
    /// the model's `d / 2`. 1 matches the model; pouch-motor steering puts
    /// it further out.
    pub wall_offset_scale: f64,
    pub offset_age_s: f64,
    pub offset_age_jitter_s: f64,
}

impl Default for ActiveSweep {
    fn default() -> Self {
        Self {
            curvatures: (0..=10).map(|i| 0.015 * i as f64).collect(),
            trials_per_curvature: 2,
            wall_offset_scale: 2.0,
            offset_age_s: 87.0,
            offset_age_jitter_s: 15.0,
        }
    }
}

/// Constant-curvature arc whose wall, at `wall_offset`, is `wall_length` long.
pub fn constant_curvature_with_wall_length(kappa: f64, wall_length: f64, wall_offset: f64) -> Result<GroundTruthShape> {
    make_constant_curvature_shape(kappa, wall_length / (1.0 + kappa * wall_offset))
}

pub fn run_active_sweep(template: &SweepTemplate, sweep: &ActiveSweep) -> Result<SweepResult> {
    if sweep.curvatures.is_empty() || sweep.trials_per_curvature == 0 {
        return Err(Error::config("active.curvatures", "need at least one curvature and one trial"));
    }
    let geom = template.geometry;
    let wall_offset = geom.bend_radius() * sweep.wall_offset_scale;
    let records = run_grid(&sweep.curvatures, sweep.trials_per_curvature, |i, &kappa| {
        let shape = constant_curvature_with_wall_length(kappa, geom.sensed_length(), wall_offset)?;
        let seed = template.trial_seed(SweepKind::Active, i);
        let age = template.offset_age(seed, sweep.offset_age_s, sweep.offset_age_jitter_s);
        let (log, err, model_err) = score(template, &template.trial(shape, age, seed), wall_offset)?;
        Ok(record(i, kappa, &log, err, [("model_error_pct", format!("{model_err:.9}"))]))
    })?;
    Ok(SweepResult::from_records(SweepKind::Active, records))
}

/// Growth to a range of lengths along one actively steered path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LengthSweep {
    /// Robot (wall) lengths, cm.
    pub lengths: Vec<f64>,
    pub trials_per_length: usize,
    /// Straight run at the base before the steered section, cm.
    pub straight_length: f64,
    /// Curvature of the steered section, 1/cm.
    pub curvature: f64,
    pub wall_offset_scale: f64,
    pub offset_age_s: f64,
    pub offset_age_jitter_s: f64,
}

impl Default for LengthSweep {
    fn default() -> Self {
        Self {
            lengths: vec![30.0, 45.0, 60.0, 75.0, 90.0, 105.0, 120.0, 135.0, 150.0, 165.0, 175.0],
            trials_per_length: 1,
            straight_length: 40.0,
            curvature: 0.02,
            wall_offset_scale: 2.0,
            offset_age_s: 41.0,
            offset_age_jitter_s: 10.0,
        }
    }
}

pub fn run_length_sweep(template: &SweepTemplate, sweep: &LengthSweep) -> Result<SweepResult> {
    if sweep.lengths.is_empty() || sweep.trials_per_length == 0 {
        return Err(Error::config("length.lengths", "need at least one length and one trial"));
    }
    let geom = template.geometry;
    let wall_offset = geom.bend_radius() * sweep.wall_offset_scale;
    let longest = sweep.lengths.iter().copied().fold(0.0, f64::max);
    let path = GroundTruthShape::new(
        Default::default(),
        vec![
            ShapePiece::straight(sweep.straight_length),
            ShapePiece::arc(longest, sweep.curvature, crate::math::Vec3::Y),
        ],
        format!(
            "{} cm straight then curvature {} /cm",
            sweep.straight_length, sweep.curvature
        ),
    );
    let records = run_grid(&sweep.lengths, sweep.trials_per_length, |i, &length| {
        if !(length > 0.0) {
            return Err(Error::config("length.lengths", format!("lengths must be > 0, got {length}")));
        }
        let shape = make_grown_shape(&path, path.centerline_at_wall(length, wall_offset))?;
        let seed = template.trial_seed(SweepKind::Length, i);
        let age = template.offset_age(seed, sweep.offset_age_s, sweep.offset_age_jitter_s);
        let (log, err, model_err) = score(template, &template.trial(shape, age, seed), wall_offset)?;
        Ok(record(i, length, &log, err, [("model_error_pct", format!("{model_err:.9}"))]))
    })?;
    Ok(SweepResult::from_records(SweepKind::Length, records))
}

/// Reanalysis of full-length single-bend trials with sparser sensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpacingSweep {
    /// Use every k-th IMU.
    pub spacing_multiples: Vec<usize>,
    /// Number of simulated base trials, alternating passive and active.
    pub trials: usize,
    /// Passive bend angles are drawn uniformly from this range, degrees.
    pub passive_angle_range: [f64; 2],
    /// Active curvatures are drawn uniformly from this range, 1/cm.
    pub active_curvature_range: [f64; 2],
    pub pre_length: f64,
    pub wall_offset_scale: f64,
    pub offset_age_s: f64,
    pub offset_age_jitter_s: f64,
}

impl Default for SpacingSweep {
    fn default() -> Self {
        Self {
            spacing_multiples: (1..=16).collect(),
            trials: 100,
            passive_angle_range: [30.0, 90.0],
            active_curvature_range: [0.01, 0.05],
            pre_length: 80.0,
            wall_offset_scale: 2.0,
            offset_age_s: 57.0,
            offset_age_jitter_s: 15.0,
        }
    }
}

/// Simulates the base trials of a spacing sweep: even trials are passive
/// hinged bends, odd trials actively steered arcs.
pub fn simulate_spacing_trials(template: &SweepTemplate, sweep: &SpacingSweep) -> Result<Vec<TrialLog>> {
    let geom = template.geometry;
    let robot_length = geom.sensed_length();
    (0..sweep.trials)
        .into_par_iter()
        .map(|i| {
            let seed = template.trial_seed(SweepKind::Spacing, i);
            let mut r = rng::stream(seed, 0, Purpose::ShapeParams);
            let age = template.offset_age(seed, sweep.offset_age_s, sweep.offset_age_jitter_s);
            let (shape, wall_offset) = if i % 2 == 0 {
                let [lo, hi] = sweep.passive_angle_range;
                let angle = if hi > lo { r.random_range(lo..=hi) } else { lo };
                (
                    make_hinged_bend_shape(sweep.pre_length, angle, &geom, robot_length)?,
                    geom.bend_radius(),
                )
            } else {
                let [lo, hi] = sweep.active_curvature_range;
                let kappa = if hi > lo { r.random_range(lo..=hi) } else { lo };
                let w = geom.bend_radius() * sweep.wall_offset_scale;
                (constant_curvature_with_wall_length(kappa, robot_length, w)?, w)
            };
            simulate_trial(&template.trial(shape, age, seed), wall_offset)
        })
        .collect()
}

/// Per-spacing errors of a set of trials and the spacing that minimized
/// each trial's error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingResult {
    pub records: Vec<ExperimentRecord>,
    /// `(trial, spacing_cm, tip_error_pct)` at the best spacing of each
    /// trial. Ties go to the denser spacing.
    pub argmin: Vec<(usize, f64, f64)>,
    pub mean_error_pct: f64,
}

impl SpacingResult {
    /// Fraction of trials whose best spacing is sparser than the densest
    /// spacing tried.
    pub fn fraction_sparser_best(&self) -> f64 {
        if self.argmin.is_empty() {
            return 0.0;
        }
        let densest = self.records.iter().map(|r| r.independent_var).fold(f64::INFINITY, f64::min);
        let n = self.argmin.iter().filter(|(_, s, _)| *s > densest).count();
        n as f64 / self.argmin.len() as f64
    }
}

pub fn run_spacing_sweep(base_trials: &[TrialLog], spacing_multiples: &[usize], strict: bool) -> Result<SpacingResult> {
    if spacing_multiples.is_empty() {
        return Err(Error::config("spacing.spacing_multiples", "need at least one multiple"));
    }
    let per_trial: Vec<Vec<ExperimentRecord>> = base_trials
        .par_iter()
        .enumerate()
        .map(|(t, log)| {
            spacing_multiples
                .iter()
                .map(|&k| {
                    let est = evaluate_trial(log, k, strict)?;
                    let mut r = record(t, est.spacing, log, est.tip_error_pct, [("k", k.to_string())]);
                    r.metadata.insert("label".into(), log.label.replace([',', ';', '='], " "));
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let argmin = per_trial
        .iter()
        .enumerate()
        .filter_map(|(t, rs)| {
            rs.iter()
                .min_by(|a, b| {
                    a.tip_error_pct
                        .total_cmp(&b.tip_error_pct)
                        .then(a.independent_var.total_cmp(&b.independent_var))
                })
                .map(|r| (t, r.independent_var, r.tip_error_pct))
        })
        .collect();
    let records: Vec<ExperimentRecord> = per_trial.into_iter().flatten().collect();
    let mean_error_pct = records.iter().map(|r| r.tip_error_pct).sum::<f64>() / records.len().max(1) as f64;
    Ok(SpacingResult {
        records,
        argmin,
        mean_error_pct,
    })
}

/// Orientation error of one sensor over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftTrace {
    pub sensor: usize,
    /// Drift rate drawn for this sensor, deg/min.
    pub rate: f64,
    /// `(minutes since offsetting, orientation error in degrees)`.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftResult {
    pub traces: Vec<DriftTrace>,
    /// Pooled fit of error (deg) on time (min); the slope is the drift rate.
    pub regression: RegressionSummary,
    pub mean_error_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftSweep {
    pub n_sensors: usize,
    pub duration_s: f64,
    pub sample_every_s: f64,
}

impl Default for DriftSweep {
    fn default() -> Self {
        Self {
            n_sensors: 15,
            duration_s: 600.0,
            sample_every_s: 10.0,
        }
    }
}

/// Tracks each sensor's orientation error relative to its reading at the
/// moment of offsetting and fits one line through all samples.
pub fn run_drift_experiment(
    n_sensors: usize,
    duration_s: f64,
    model: &DriftModel,
    sample_every_s: f64,
) -> Result<DriftResult> {
    if !(duration_s > 0.0 && sample_every_s > 0.0) || n_sensors == 0 {
        return Err(Error::config(
            "drift",
            "need n_sensors >= 1, duration_s > 0 and sample_every_s > 0",
        ));
    }
    model.validate()?;
    let steps = (duration_s / sample_every_s + 1e-9).floor() as usize;
    let sensors = sample_sensor_rates(model, n_sensors);
    let traces: Vec<DriftTrace> = sensors
        .par_iter()
        .enumerate()
        .map(|(i, sensor)| {
            let mut noise = rng::stream(model.seed, i as u64, Purpose::MeasurementNoise);
            let mut walk_rng = rng::stream(model.seed, i as u64, Purpose::RandomWalk);
            let walk_step = model.random_walk * (sample_every_s / 60.0).sqrt();
            let mut walk_deg = 0.0;
            let samples = (0..=steps)
                .map(|k| {
                    let t = k as f64 * sample_every_s;
                    if k > 0 && walk_step > 0.0 {
                        walk_deg += Normal::new(0.0, walk_step).expect("finite").sample(&mut walk_rng);
                    }
                    let walked = Quat::from_axis_angle(sensor.axis, walk_deg.to_radians());
                    let q = crate::calibration::apply_drift(walked, sensor.rate, sensor.axis, t, model.noise_std, &mut noise);
                    (t / 60.0, angle_between(Quat::IDENTITY, q).to_degrees())
                })
                .collect();
            DriftTrace {
                sensor: i,
                rate: sensor.rate,
                samples,
            }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = traces.iter().flat_map(|t| t.samples.iter().copied()).unzip();
    let regression = ols_fit(&xs, &ys)?;
    let mean_error_deg = ys.iter().sum::<f64>() / ys.len() as f64;
    Ok(DriftResult {
        traces,
        regression,
        mean_error_deg,
    })
}
