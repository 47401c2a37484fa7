//! Offsetting of consecutive IMU frames and the per-sensor drift model.
//!
//! With the robot straight, every IMU reports `q_i = B * m_i`, where `B` is
//! the common body frame and `m_i` the (unknown) mounting of sensor `i`. The
//! offset of pair `(i, i+1)` is `m_i^-1 * m_{i+1}`. Later measurements are
//! corrected into the frame of the first IMU:
//!
//! ```text
//! C_0 = 1,  C_{i+1} = C_i * offset_i
//! r_i = C_i * (q_i^-1 * q_{i+1}) * C_{i+1}^-1
//! ```
//!
//! `C_i` telescopes to `m_0^-1 * m_i`, so `r_i` is the bend between body
//! segments expressed in IMU 0's frame and the straight snapshot maps to the
//! identity.

use rand::Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{quat_inv, Quat, Vec3};
use crate::rng::{self, Purpose};

/// One orientation reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample {
    /// Seconds since session start.
    pub time: f64,
    /// 0-based, base to tip.
    pub imu_index: usize,
    pub orientation: Quat,
}

impl ImuSample {
    pub fn new(time: f64, imu_index: usize, orientation: Quat) -> Self {
        Self {
            time,
            imu_index,
            orientation,
        }
    }
}

/// Relative orientation of each consecutive IMU pair in the straight pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetTable {
    pub offsets: Vec<Quat>,
    pub captured_at: f64,
}

impl OffsetTable {
    pub fn num_imus(&self) -> usize {
        self.offsets.len() + 1
    }

    /// Offsets for the sensors `0, k, 2k, ...`, each the product of the
    /// intermediate pair offsets. `k = 1` returns an identical table.
    pub fn decimate(&self, k: usize) -> Result<OffsetTable> {
        if k == 0 {
            return Err(Error::MalformedSnapshot("decimation factor must be >= 1".into()));
        }
        if k == 1 {
            return Ok(self.clone());
        }
        let offsets = self
            .offsets
            .chunks_exact(k)
            .map(|c| c.iter().skip(1).fold(c[0], |acc, &o| acc * o))
            .collect::<Vec<_>>();
        if offsets.is_empty() {
            return Err(Error::MalformedSnapshot(format!(
                "decimation by {k} leaves fewer than two of {} IMUs",
                self.num_imus()
            )));
        }
        Ok(OffsetTable {
            offsets,
            captured_at: self.captured_at,
        })
    }
}

/// Sorts samples by IMU index and checks they cover `0..n` exactly once.
pub fn order_samples(samples: &[ImuSample]) -> Result<Vec<ImuSample>> {
    let mut sorted = samples.to_vec();
    sorted.sort_by_key(|s| s.imu_index);
    for (expected, s) in sorted.iter().enumerate() {
        if s.imu_index < expected {
            return Err(Error::MalformedSnapshot(format!(
                "duplicate sample for IMU {}",
                s.imu_index
            )));
        }
        if s.imu_index > expected {
            return Err(Error::MalformedSnapshot(format!("missing sample for IMU {expected}")));
        }
        if !(s.time >= 0.0) {
            return Err(Error::MalformedSnapshot(format!(
                "IMU {} has negative or non-finite time {}",
                s.imu_index, s.time
            )));
        }
    }
    if sorted.len() < 2 {
        return Err(Error::MalformedSnapshot(format!(
            "need at least two IMUs, got {}",
            sorted.len()
        )));
    }
    Ok(sorted)
}

/// Records `q_i^-1 * q_{i+1}` for every consecutive pair of a straight
/// snapshot.
pub fn compute_offsets(straight_snapshot: &[ImuSample]) -> Result<OffsetTable> {
    let sorted = order_samples(straight_snapshot)?;
    let offsets = sorted
        .windows(2)
        .map(|w| quat_inv(w[0].orientation) * w[1].orientation)
        .collect();
    let captured_at = sorted.iter().map(|s| s.time).fold(0.0, f64::max);
    Ok(OffsetTable {
        offsets,
        captured_at,
    })
}

/// Removes the stored offsets from a set of readings, giving one bend
/// rotation per consecutive IMU pair, all expressed in IMU 0's frame.
pub fn corrected_relative_rotations(current: &[ImuSample], table: &OffsetTable) -> Result<Vec<Quat>> {
    let sorted = order_samples(current)?;
    if sorted.len() != table.num_imus() {
        return Err(Error::MalformedSnapshot(format!(
            "{} readings but offset table covers {} IMUs",
            sorted.len(),
            table.num_imus()
        )));
    }
    let mut cumulative = Quat::IDENTITY;
    let mut out = Vec::with_capacity(table.offsets.len());
    for (pair, offset) in sorted.windows(2).zip(&table.offsets) {
        let next = cumulative * *offset;
        let raw = quat_inv(pair[0].orientation) * pair[1].orientation;
        out.push(cumulative * raw * quat_inv(next));
        cumulative = next;
    }
    Ok(out)
}

/// Per-sensor drift: a constant-rate rotation about one fixed axis, plus
/// white orientation noise on every sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftModel {
    /// Mean drift rate across sensors, deg/min.
    pub mean_rate: f64,
    /// Standard deviation of the per-sensor rate, deg/min.
    pub rate_spread: f64,
    /// Per-sample white orientation noise, degrees.
    pub noise_std: f64,
    /// Random-walk component on the drift angle, deg/sqrt(min). Zero
    /// disables it.
    pub random_walk: f64,
    pub seed: u64,
}

impl Default for DriftModel {
    fn default() -> Self {
        Self {
            mean_rate: 1.33,
            rate_spread: 1.0,
            noise_std: 0.5,
            random_walk: 0.0,
            seed: 0,
        }
    }
}

impl DriftModel {
    /// A model that leaves every reading untouched.
    pub fn none() -> Self {
        Self {
            mean_rate: 0.0,
            rate_spread: 0.0,
            noise_std: 0.0,
            random_walk: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mean_rate", self.mean_rate),
            ("rate_spread", self.rate_spread),
            ("noise_std", self.noise_std),
            ("random_walk", self.random_walk),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("drift.{name}"), format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Drift parameters drawn for one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorDrift {
    /// deg/min, never negative.
    pub rate: f64,
    pub axis: Vec3,
}

fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    Vec3::new(x, y, z)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, std: f64) -> f64 {
    if std == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, std).expect("finite std").sample(rng)
}

/// Draws one drift rate and axis per sensor, deterministically from
/// `model.seed`.
pub fn sample_sensor_rates(model: &DriftModel, n: usize) -> Vec<SensorDrift> {
    (0..n)
        .map(|i| {
            let mut r = rng::stream(model.seed, i as u64, Purpose::SensorRate);
            let rate = (model.mean_rate + gaussian(&mut r, model.rate_spread)).max(0.0);
            let mut a = rng::stream(model.seed, i as u64, Purpose::SensorAxis);
            SensorDrift {
                rate,
                axis: random_axis(&mut a),
            }
        })
        .collect()
}

/// Corrupts one reading with `rate * elapsed` of drift about `axis` and
/// `noise_std` degrees of white noise.
///
/// The drift angle gets an additive gaussian term; a second rotation of
/// gaussian magnitude about a random axis is composed after it. Both are
/// applied in the sensor frame.
pub fn apply_drift<R: Rng + ?Sized>(
    q: Quat,
    rate: f64,
    axis: Vec3,
    elapsed: f64,
    noise_std: f64,
    rng: &mut R,
) -> Quat {
    let drift_deg = rate * elapsed / 60.0 + gaussian(rng, noise_std);
    let noise_deg = gaussian(rng, noise_std).abs();
    let mut out = q;
    if drift_deg != 0.0 {
        out = out * Quat::from_axis_angle(axis, drift_deg.to_radians());
    }
    if noise_deg != 0.0 {
        let noise_axis = random_axis(rng);
        out = out * Quat::from_axis_angle(noise_axis, noise_deg.to_radians());
    }
    out
}

impl SensorDrift {
    /// [`apply_drift`] with this sensor's parameters, plus the model's
    /// random-walk term sampled at `elapsed`.
    pub fn corrupt<R: Rng + ?Sized>(&self, q: Quat, elapsed: f64, model: &DriftModel, rng: &mut R) -> Quat {
        let walked = if model.random_walk > 0.0 {
            let walk = gaussian(rng, model.random_walk * (elapsed / 60.0).sqrt());
            q * Quat::from_axis_angle(self.axis, walk.to_radians())
        } else {
            q
        };
        apply_drift(walked, self.rate, self.axis, elapsed, model.noise_std, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::angle_between;
    use std::f64::consts::PI;

    fn snapshot(qs: &[Quat]) -> Vec<ImuSample> {
        qs.iter()
            .enumerate()
            .map(|(i, &q)| ImuSample::new(2.5, i, q))
            .collect()
    }

    #[test]
    fn identity_snapshot_gives_identity_offsets() {
        let t = compute_offsets(&snapshot(&[Quat::IDENTITY; 5])).unwrap();
        assert_eq!(t.offsets.len(), 4);
        assert!(t.offsets.iter().all(|&o| o == Quat::IDENTITY));
        assert_eq!(t.captured_at, 2.5);
    }

    #[test]
    fn offset_is_relative_rotation() {
        let ten = Quat::from_axis_angle(Vec3::Z, 10f64.to_radians());
        let t = compute_offsets(&snapshot(&[Quat::IDENTITY, ten])).unwrap();
        assert!(angle_between(t.offsets[0], ten) < 1e-12);
    }

    #[test]
    fn missing_and_duplicate_imus_are_rejected() {
        let mut s = snapshot(&[Quat::IDENTITY; 5]);
        s.remove(3);
        assert!(matches!(compute_offsets(&s), Err(Error::MalformedSnapshot(m)) if m.contains("IMU 3")));
        let mut s = snapshot(&[Quat::IDENTITY; 3]);
        s[2].imu_index = 1;
        assert!(matches!(compute_offsets(&s), Err(Error::MalformedSnapshot(m)) if m.contains("duplicate")));
        assert!(compute_offsets(&snapshot(&[Quat::IDENTITY])).is_err());
    }

    #[test]
    fn straight_snapshot_corrects_to_identity() {
        let qs: Vec<Quat> = (0..6)
            .map(|i| Quat::from_axis_angle(Vec3::new(1.0, i as f64, 0.5), 0.3 * i as f64 + 0.1))
            .collect();
        let s = snapshot(&qs);
        let t = compute_offsets(&s).unwrap();
        for r in corrected_relative_rotations(&s, &t).unwrap() {
            assert!(r.angle() < 1e-9);
        }
    }

    #[test]
    fn identity_offsets_pass_bends_through() {
        let fifteen = Quat::from_axis_angle(Vec3::Y, 15f64.to_radians());
        let table = OffsetTable {
            offsets: vec![Quat::IDENTITY],
            captured_at: 0.0,
        };
        let r = corrected_relative_rotations(&snapshot(&[Quat::IDENTITY, fifteen]), &table).unwrap();
        assert!(angle_between(r[0], fifteen) < 1e-12);
    }

    #[test]
    fn table_size_mismatch_is_rejected() {
        let table = OffsetTable {
            offsets: vec![Quat::IDENTITY; 3],
            captured_at: 0.0,
        };
        assert!(corrected_relative_rotations(&snapshot(&[Quat::IDENTITY; 3]), &table).is_err());
    }

    #[test]
    fn decimated_offsets_match_direct_computation() {
        let qs: Vec<Quat> = (0..7)
            .map(|i| Quat::from_axis_angle(Vec3::new(0.2, 1.0, i as f64), 0.4 + 0.1 * i as f64))
            .collect();
        let full = compute_offsets(&snapshot(&qs)).unwrap();
        assert_eq!(full.decimate(1).unwrap(), full);
        let picked: Vec<Quat> = qs.iter().step_by(3).copied().collect();
        let direct = compute_offsets(&snapshot(&picked)).unwrap();
        let dec = full.decimate(3).unwrap();
        assert_eq!(dec.offsets.len(), direct.offsets.len());
        for (a, b) in dec.offsets.iter().zip(&direct.offsets) {
            assert!(angle_between(*a, *b) < 1e-12);
        }
        assert!(full.decimate(7).is_err());
    }

    #[test]
    fn zero_spread_gives_exact_mean_rate() {
        let m = DriftModel {
            rate_spread: 0.0,
            ..DriftModel::default()
        };
        assert!(sample_sensor_rates(&m, 15).iter().all(|s| s.rate == 1.33));
        let m = DriftModel::none();
        assert!(sample_sensor_rates(&m, 4).iter().all(|s| s.rate == 0.0));
    }

    #[test]
    fn sampled_rates_are_deterministic_and_clamped() {
        let m = DriftModel {
            mean_rate: 0.2,
            rate_spread: 1.0,
            seed: 11,
            ..DriftModel::default()
        };
        let a = sample_sensor_rates(&m, 200);
        assert_eq!(a, sample_sensor_rates(&m, 200));
        assert!(a.iter().all(|s| s.rate >= 0.0));
        assert!(a.iter().any(|s| s.rate == 0.0));
        assert!(a.iter().all(|s| (s.axis.norm() - 1.0).abs() < 1e-9));
    }

    #[test]
    fn sampled_rate_mean_converges() {
        let m = DriftModel {
            mean_rate: 5.0,
            rate_spread: 1.0,
            seed: 3,
            ..DriftModel::default()
        };
        let n = 4000;
        let mean = sample_sensor_rates(&m, n).iter().map(|s| s.rate).sum::<f64>() / n as f64;
        assert!((mean - 5.0).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn drift_over_ninety_seconds() {
        let mut r = rng::stream(0, 0, Purpose::MeasurementNoise);
        let q = Quat::from_axis_angle(Vec3::new(1.0, 1.0, 0.0), 0.4);
        let d = apply_drift(q, 1.33, Vec3::new(0.0, 0.6, 0.8), 90.0, 0.0, &mut r);
        assert!((angle_between(q, d).to_degrees() - 1.995).abs() < 1e-6);
        let d = apply_drift(q, 1.33, Vec3::X, 60.0, 0.0, &mut r);
        assert!((angle_between(q, d).to_degrees() - 1.33).abs() < 1e-9);
        assert_eq!(apply_drift(q, 1.33, Vec3::X, 0.0, 0.0, &mut r), q);
    }

    #[test]
    fn drift_is_linear_in_time() {
        let mut r = rng::stream(0, 0, Purpose::MeasurementNoise);
        let q = Quat::from_axis_angle(Vec3::Y, 1.0);
        for minutes in [0.5, 3.0, 10.0, 30.0] {
            let d = apply_drift(q, 2.1, Vec3::Z, minutes * 60.0, 0.0, &mut r);
            let expected = 2.1 * minutes;
            let got = angle_between(q, d).to_degrees();
            assert!((got - expected).abs() < 1e-9, "{minutes}: {got} vs {expected}");
            assert!(expected.to_radians() < PI);
        }
    }

    #[test]
    fn random_walk_is_off_by_default() {
        let m = DriftModel {
            noise_std: 0.0,
            rate_spread: 0.0,
            ..DriftModel::default()
        };
        let s = sample_sensor_rates(&m, 1)[0];
        let mut r = rng::stream(1, 0, Purpose::MeasurementNoise);
        let d = s.corrupt(Quat::IDENTITY, 60.0, &m, &mut r);
        assert!((d.angle().to_degrees() - 1.33).abs() < 1e-9);
        let walk = DriftModel { random_walk: 2.0, ..m };
        let d = s.corrupt(Quat::IDENTITY, 60.0, &walk, &mut r);
        assert!((d.angle().to_degrees() - 1.33).abs() > 1e-6);
    }
}
