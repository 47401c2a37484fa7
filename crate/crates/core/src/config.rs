//! Run configuration, read from JSON.
//!
//! Every section is optional and falls back to its default; unknown keys are
//! rejected. The shipped `configs/default.json` equals
//! [`RunConfig::default`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::calibration::DriftModel;
use crate::error::{Error, Result};
use crate::experiments::{ActiveSweep, DriftSweep, LengthSweep, PassiveSweep, SpacingSweep, SweepTemplate};
use crate::reconstruction::RobotGeometry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Master seed for every random draw of a run.
    pub seed: u64,
    pub strict: bool,
    pub out_dir: PathBuf,
    pub geometry: RobotGeometry,
    pub drift: DriftModel,
    /// Standard deviation of the angle between each IMU and its nominal
    /// mounting, degrees. IMU 0 is the reference and is mounted exactly.
    pub mounting_std_deg: f64,
    pub drift_experiment: DriftSweep,
    pub passive: PassiveSweep,
    pub active: ActiveSweep,
    pub length: LengthSweep,
    pub spacing: SpacingSweep,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            strict: false,
            out_dir: PathBuf::from("out"),
            geometry: RobotGeometry::default(),
            // Calibrated corruption level for the experiment sweeps; the
            // drift model's own default keeps 0.5 degree noise.
            drift: DriftModel {
                noise_std: 1.0,
                ..DriftModel::default()
            },
            mounting_std_deg: 2.0,
            drift_experiment: DriftSweep::default(),
            passive: PassiveSweep::default(),
            active: ActiveSweep::default(),
            length: LengthSweep::default(),
            spacing: SpacingSweep::default(),
        }
    }
}

fn check(field: &str, ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(field, msg()))
    }
}

fn finite_nonneg(field: &str, v: f64) -> Result<()> {
    check(field, v.is_finite() && v >= 0.0, || format!("must be finite and >= 0, got {v}"))
}

fn finite_all(field: &str, vs: &[f64]) -> Result<()> {
    match vs.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::config(field, format!("must be finite, got {v}"))),
        None => Ok(()),
    }
}

fn range(field: &str, [lo, hi]: [f64; 2]) -> Result<()> {
    check(field, lo.is_finite() && hi.is_finite() && lo <= hi, || {
        format!("need finite lo <= hi, got [{lo}, {hi}]")
    })
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            // serde reports unknown fields by name; keep that as the field.
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("unknown field"))
                .unwrap_or("<document>")
                .to_string();
            Error::Config { field, message: msg }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry
            .validate()
            .map_err(|e| Error::config("geometry", e.to_string()))?;
        self.drift.validate()?;
        finite_nonneg("mounting_std_deg", self.mounting_std_deg)?;

        let d = &self.drift_experiment;
        check("drift_experiment.n_sensors", d.n_sensors >= 1, || "must be >= 1".into())?;
        check("drift_experiment.duration_s", d.duration_s.is_finite() && d.duration_s > 0.0, || {
            format!("must be > 0, got {}", d.duration_s)
        })?;
        check(
            "drift_experiment.sample_every_s",
            d.sample_every_s.is_finite() && d.sample_every_s > 0.0,
            || format!("must be > 0, got {}", d.sample_every_s),
        )?;

        let p = &self.passive;
        check("passive.angles_deg", !p.angles_deg.is_empty(), || "must not be empty".into())?;
        finite_all("passive.angles_deg", &p.angles_deg)?;
        check("passive.angles_deg", p.angles_deg.iter().all(|a| (0.0..=180.0).contains(a)), || {
            "angles must lie in [0, 180] degrees".into()
        })?;
        check("passive.trials_per_angle", p.trials_per_angle >= 1, || "must be >= 1".into())?;
        finite_nonneg("passive.pre_length", p.pre_length)?;
        if let Some(r) = p.bend_radius {
            check("passive.bend_radius", r.is_finite() && r > 0.0, || format!("must be > 0, got {r}"))?;
        }
        finite_nonneg("passive.offset_age_s", p.offset_age_s)?;
        finite_nonneg("passive.offset_age_jitter_s", p.offset_age_jitter_s)?;

        let a = &self.active;
        check("active.curvatures", !a.curvatures.is_empty(), || "must not be empty".into())?;
        finite_all("active.curvatures", &a.curvatures)?;
        check("active.curvatures", a.curvatures.iter().all(|k| *k >= 0.0), || "must be >= 0".into())?;
        check("active.trials_per_curvature", a.trials_per_curvature >= 1, || "must be >= 1".into())?;
        check("active.wall_offset_scale", a.wall_offset_scale.is_finite() && a.wall_offset_scale > 0.0, || {
            format!("must be > 0, got {}", a.wall_offset_scale)
        })?;
        finite_nonneg("active.offset_age_s", a.offset_age_s)?;
        finite_nonneg("active.offset_age_jitter_s", a.offset_age_jitter_s)?;

        let l = &self.length;
        check("length.lengths", !l.lengths.is_empty(), || "must not be empty".into())?;
        finite_all("length.lengths", &l.lengths)?;
        check("length.lengths", l.lengths.iter().all(|x| *x > 0.0), || "must be > 0".into())?;
        check("length.trials_per_length", l.trials_per_length >= 1, || "must be >= 1".into())?;
        finite_nonneg("length.straight_length", l.straight_length)?;
        finite_nonneg("length.curvature", l.curvature)?;
        check("length.wall_offset_scale", l.wall_offset_scale.is_finite() && l.wall_offset_scale > 0.0, || {
            format!("must be > 0, got {}", l.wall_offset_scale)
        })?;
        finite_nonneg("length.offset_age_s", l.offset_age_s)?;
        finite_nonneg("length.offset_age_jitter_s", l.offset_age_jitter_s)?;

        let s = &self.spacing;
        check("spacing.spacing_multiples", !s.spacing_multiples.is_empty(), || "must not be empty".into())?;
        let max_k = self.geometry.num_imus - 1;
        check(
            "spacing.spacing_multiples",
            s.spacing_multiples.iter().all(|&k| k >= 1 && k <= max_k),
            || format!("every multiple must be in 1..={max_k} so at least two IMUs remain"),
        )?;
        check("spacing.trials", s.trials >= 1, || "must be >= 1".into())?;
        range("spacing.passive_angle_range", s.passive_angle_range)?;
        range("spacing.active_curvature_range", s.active_curvature_range)?;
        finite_nonneg("spacing.pre_length", s.pre_length)?;
        check("spacing.wall_offset_scale", s.wall_offset_scale.is_finite() && s.wall_offset_scale > 0.0, || {
            format!("must be > 0, got {}", s.wall_offset_scale)
        })?;
        finite_nonneg("spacing.offset_age_s", s.offset_age_s)?;
        finite_nonneg("spacing.offset_age_jitter_s", s.offset_age_jitter_s)?;
        Ok(())
    }

    /// Settings shared by every trial of the sweeps.
    pub fn template(&self) -> SweepTemplate {
        SweepTemplate {
            geometry: self.geometry,
            drift: self.drift,
            mounting_std_deg: self.mounting_std_deg,
            master_seed: self.seed,
            strict: self.strict,
        }
    }
}
