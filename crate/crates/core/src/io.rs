//! CSV and JSON files read and written by the command line.
//!
//! | file        | columns                                           |
//! |-------------|---------------------------------------------------|
//! | IMU log     | `time_s,imu_index,qw,qx,qy,qz`                    |
//! | offsets     | `pair_index,qw,qx,qy,qz`, `# captured_at=<s>`     |
//! | centerline  | `point_index,x_cm,y_cm,z_cm,is_imu`, `# tip ...`  |
//! | records     | `trial,independent_var,tip_error_pct,seed,notes`  |
//! | drift       | `sensor,time_min,error_deg,seed`                  |
//!
//! Lines starting with `#` are comments. Quaternion components are written
//! with 12 decimals and re-read through the normalizing constructor, so every
//! file the tool writes can be read back. Writers take an optional
//! timestamp; with `None` the output depends only on the data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::{ImuSample, OffsetTable};
use crate::error::{Error, Result};
use crate::experiments::{DriftResult, ExperimentRecord, SpacingResult, SweepResult};
use crate::math::{Pose, Quat, Vec3};
use crate::reconstruction::CenterlinePolyline;

pub const IMU_LOG_HEADER: [&str; 6] = ["time_s", "imu_index", "qw", "qx", "qy", "qz"];
pub const OFFSETS_HEADER: [&str; 5] = ["pair_index", "qw", "qx", "qy", "qz"];
pub const CENTERLINE_HEADER: [&str; 5] = ["point_index", "x_cm", "y_cm", "z_cm", "is_imu"];
pub const RECORDS_HEADER: [&str; 5] = ["trial", "independent_var", "tip_error_pct", "seed", "notes"];
pub const DRIFT_HEADER: [&str; 4] = ["sensor", "time_min", "error_deg", "seed"];

/// Seconds since the Unix epoch, for the optional header line.
pub fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn stamp_line(out: &mut String, stamp: Option<u64>) {
    if let Some(t) = stamp {
        let _ = writeln!(out, "# generated_at={t}");
    }
}

fn quat_fields(q: Quat) -> String {
    let [w, x, y, z] = q.to_wxyz();
    format!("{w:.12},{x:.12},{y:.12},{z:.12}")
}

/// Rows of a CSV file with their 1-based line numbers. Comment lines are
/// skipped but still counted.
struct Table {
    path: String,
    header_line: u64,
    rows: Vec<(u64, csv::StringRecord)>,
    comments: Vec<(u64, String)>,
}

impl Table {
    fn parse(path: &str, text: &str, header: &[&str]) -> Result<Table> {
        let comments = text
            .lines()
            .enumerate()
            .filter(|(_, l)| l.trim_start().starts_with('#'))
            .map(|(i, l)| (i as u64 + 1, l.trim_start()[1..].trim().to_string()))
            .collect();
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let parse_err = |line: u64, message: String| Error::Parse {
            path: path.to_string(),
            line,
            message,
        };
        let found = rdr.headers().map_err(|e| parse_err(csv_line(&e), e.to_string()))?.clone();
        let header_line = header_line(text);
        if found.iter().ne(header.iter().copied()) {
            return Err(parse_err(
                header_line,
                format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| parse_err(csv_line(&e), e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != header.len() {
                return Err(parse_err(line, format!("expected {} fields, found {}", header.len(), rec.len())));
            }
            rows.push((line, rec));
        }
        Ok(Table {
            path: path.to_string(),
            header_line,
            rows,
            comments,
        })
    }

    fn read(path: &Path, header: &[&str]) -> Result<Table> {
        let mut text = String::new();
        std::fs::File::open(path)?.read_to_string(&mut text)?;
        Table::parse(&path.display().to_string(), &text, header)
    }

    fn err(&self, line: u64, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn field<T: std::str::FromStr>(&self, line: u64, rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
        let raw = rec.get(i).unwrap_or("");
        raw.parse()
            .map_err(|_| self.err(line, format!("column `{name}`: cannot parse `{raw}`")))
    }

    fn quat(&self, line: u64, rec: &csv::StringRecord, first: usize) -> Result<Quat> {
        let names = ["qw", "qx", "qy", "qz"];
        let mut c = [0.0; 4];
        for (k, v) in c.iter_mut().enumerate() {
            *v = self.field(line, rec, first + k, names[k])?;
        }
        Quat::from_wxyz(c[0], c[1], c[2], c[3])
            .ok_or_else(|| self.err(line, "quaternion is zero or not finite"))
    }

    /// Value of a `# key=value` comment.
    fn comment_value(&self, key: &str) -> Option<(u64, String)> {
        self.comments.iter().find_map(|(line, c)| {
            c.split_whitespace()
                .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('=').map(str::to_string))
                .map(|v| (*line, v))
        })
    }
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

fn header_line(text: &str) -> u64 {
    text.lines()
        .position(|l| !l.trim_start().starts_with('#'))
        .map_or(1, |i| i as u64 + 1)
}

/// One IMU log row together with the line it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoggedSample {
    pub line: u64,
    pub sample: ImuSample,
}

/// A parsed IMU log: one or more frames, each a reading of every IMU at one
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuLog {
    pub path: String,
    pub rows: Vec<LoggedSample>,
}

impl ImuLog {
    pub fn parse(path: &str, text: &str) -> Result<ImuLog> {
        let table = Table::parse(path, text, &IMU_LOG_HEADER)?;
        ImuLog::from_table(table)
    }

    pub fn read(path: &Path) -> Result<ImuLog> {
        ImuLog::from_table(Table::read(path, &IMU_LOG_HEADER)?)
    }

    fn from_table(table: Table) -> Result<ImuLog> {
        let mut rows = Vec::with_capacity(table.rows.len());
        for (line, rec) in &table.rows {
            let time: f64 = table.field(*line, rec, 0, "time_s")?;
            if !(time.is_finite() && time >= 0.0) {
                return Err(table.err(*line, format!("time_s must be finite and >= 0, got {time}")));
            }
            let imu_index: usize = table.field(*line, rec, 1, "imu_index")?;
            rows.push(LoggedSample {
                line: *line,
                sample: ImuSample::new(time, imu_index, table.quat(*line, rec, 2)?),
            });
        }
        if rows.is_empty() {
            return Err(table.err(table.header_line, "log has no samples"));
        }
        Ok(ImuLog { path: table.path, rows })
    }

    fn err(&self, line: u64, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    /// Times of the frames in the log, ascending.
    pub fn times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.rows.iter().map(|r| r.sample.time).collect();
        t.sort_by(f64::total_cmp);
        t.dedup();
        t
    }

    /// The frame at `time`, checked to hold IMUs `0..num_imus` exactly once
    /// each. Errors name the line where the frame goes wrong.
    pub fn frame(&self, time: f64, num_imus: usize) -> Result<Vec<ImuSample>> {
        let rows: Vec<&LoggedSample> = self.rows.iter().filter(|r| r.sample.time == time).collect();
        let Some(last) = rows.last() else {
            return Err(self.err(0, format!("no samples at time {time}")));
        };
        let mut seen = BTreeMap::new();
        for r in &rows {
            let i = r.sample.imu_index;
            if i >= num_imus {
                return Err(self.err(r.line, format!("imu_index {i} out of range: the robot has {num_imus} IMUs")));
            }
            if let Some(prev) = seen.insert(i, r.line) {
                return Err(self.err(r.line, format!("IMU {i} appears twice at time {time} (first on line {prev})")));
            }
        }
        if let Some(missing) = (0..num_imus).find(|i| !seen.contains_key(i)) {
            // Point at the first row after the gap, or the frame's last row.
            let line = seen.range(missing..).next().map_or(last.line, |(_, &l)| l);
            return Err(self.err(
                line,
                format!("IMU {missing} missing at time {time}: expected IMUs 0..{num_imus}"),
            ));
        }
        let mut out: Vec<ImuSample> = rows.iter().map(|r| r.sample).collect();
        out.sort_by_key(|s| s.imu_index);
        Ok(out)
    }

    /// Number of IMUs implied by the log: one more than the largest index.
    pub fn num_imus(&self) -> usize {
        self.rows.iter().map(|r| r.sample.imu_index).max().map_or(0, |m| m + 1)
    }

    /// The only frame of a snapshot log. A snapshot must have one time.
    pub fn single_frame(&self) -> Result<Vec<ImuSample>> {
        let times: BTreeSet<u64> = self.rows.iter().map(|r| r.sample.time.to_bits()).collect();
        if times.len() != 1 {
            let line = self.rows.iter().find(|r| r.sample.time != self.rows[0].sample.time).map_or(0, |r| r.line);
            return Err(self.err(line, format!("snapshot must hold one frame, found {} times", times.len())));
        }
        self.frame(self.rows[0].sample.time, self.num_imus())
    }
}

pub fn imu_log_csv(samples: &[ImuSample], stamp: Option<u64>) -> String {
    let mut out = String::new();
    stamp_line(&mut out, stamp);
    out.push_str(&IMU_LOG_HEADER.join(","));
    out.push('\n');
    for s in samples {
        let _ = writeln!(out, "{:.6},{},{}", s.time, s.imu_index, quat_fields(s.orientation));
    }
    out
}

pub fn offsets_csv(table: &OffsetTable, stamp: Option<u64>) -> String {
    let mut out = String::new();
    stamp_line(&mut out, stamp);
    let _ = writeln!(out, "# captured_at={:.6}", table.captured_at);
    out.push_str(&OFFSETS_HEADER.join(","));
    out.push('\n');
    for (i, q) in table.offsets.iter().enumerate() {
        let _ = writeln!(out, "{i},{}", quat_fields(*q));
    }
    out
}

pub fn parse_offsets(path: &str, text: &str) -> Result<OffsetTable> {
    offsets_from_table(Table::parse(path, text, &OFFSETS_HEADER)?)
}

pub fn read_offsets(path: &Path) -> Result<OffsetTable> {
    offsets_from_table(Table::read(path, &OFFSETS_HEADER)?)
}

fn offsets_from_table(table: Table) -> Result<OffsetTable> {
    let captured_at = match table.comment_value("captured_at") {
        Some((line, v)) => v
            .parse()
            .map_err(|_| table.err(line, format!("captured_at: cannot parse `{v}`")))?,
        None => return Err(table.err(table.header_line, "missing `# captured_at=<seconds>` comment")),
    };
    let mut offsets = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let i: usize = table.field(*line, rec, 0, "pair_index")?;
        if i != offsets.len() {
            return Err(table.err(*line, format!("expected pair_index {}, found {i}", offsets.len())));
        }
        offsets.push(table.quat(*line, rec, 1)?);
    }
    if offsets.is_empty() {
        return Err(table.err(table.header_line, "offset table has no rows"));
    }
    Ok(OffsetTable { offsets, captured_at })
}

pub fn centerline_csv(line: &CenterlinePolyline, stamp: Option<u64>) -> String {
    let mut out = String::new();
    stamp_line(&mut out, stamp);
    out.push_str(&CENTERLINE_HEADER.join(","));
    out.push('\n');
    let imu: BTreeSet<usize> = line.imu_indices.iter().copied().collect();
    for (i, p) in line.points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{:.9},{:.9},{:.9},{}",
            p.x,
            p.y,
            p.z,
            u8::from(imu.contains(&i))
        );
    }
    let t = line.tip.position;
    let [w, x, y, z] = line.tip.orientation.to_wxyz();
    let _ = writeln!(
        out,
        "# tip x_cm={:.9} y_cm={:.9} z_cm={:.9} qw={w:.12} qx={x:.12} qy={y:.12} qz={z:.12}",
        t.x, t.y, t.z
    );
    out
}

/// A centerline read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterlineFile {
    pub points: Vec<Vec3>,
    pub imu_indices: Vec<usize>,
    pub tip: Pose,
}

pub fn parse_centerline(path: &str, text: &str) -> Result<CenterlineFile> {
    centerline_from_table(Table::parse(path, text, &CENTERLINE_HEADER)?)
}

pub fn read_centerline(path: &Path) -> Result<CenterlineFile> {
    centerline_from_table(Table::read(path, &CENTERLINE_HEADER)?)
}

fn centerline_from_table(table: Table) -> Result<CenterlineFile> {
    let mut points = Vec::new();
    let mut imu_indices = Vec::new();
    for (line, rec) in &table.rows {
        let i: usize = table.field(*line, rec, 0, "point_index")?;
        if i != points.len() {
            return Err(table.err(*line, format!("expected point_index {}, found {i}", points.len())));
        }
        points.push(Vec3::new(
            table.field(*line, rec, 1, "x_cm")?,
            table.field(*line, rec, 2, "y_cm")?,
            table.field(*line, rec, 3, "z_cm")?,
        ));
        match rec.get(4) {
            Some("1") => imu_indices.push(i),
            Some("0") => {}
            other => return Err(table.err(*line, format!("column `is_imu`: expected 0 or 1, found `{}`", other.unwrap_or("")))),
        }
    }
    let get = |key: &str| -> Result<f64> {
        let (line, v) = table
            .comment_value(key)
            .ok_or_else(|| table.err(0, format!("missing `{key}` in the `# tip` comment")))?;
        v.parse().map_err(|_| table.err(line, format!("{key}: cannot parse `{v}`")))
    };
    let position = Vec3::new(get("x_cm")?, get("y_cm")?, get("z_cm")?);
    let orientation = Quat::from_wxyz(get("qw")?, get("qx")?, get("qy")?, get("qz")?)
        .ok_or_else(|| table.err(0, "tip orientation is zero or not finite"))?;
    Ok(CenterlineFile {
        points,
        imu_indices,
        tip: Pose::new(position, orientation),
    })
}

pub fn records_csv(records: &[ExperimentRecord], stamp: Option<u64>) -> String {
    let mut out = String::new();
    stamp_line(&mut out, stamp);
    out.push_str(&RECORDS_HEADER.join(","));
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{:.9},{},{}",
            r.trial,
            r.independent_var,
            r.tip_error_pct,
            r.trial_seed,
            r.notes()
        );
    }
    out
}

pub fn parse_records(path: &str, text: &str) -> Result<Vec<ExperimentRecord>> {
    let table = Table::parse(path, text, &RECORDS_HEADER)?;
    let mut out = Vec::with_capacity(table.rows.len());
    for (line, rec) in &table.rows {
        let mut metadata = BTreeMap::new();
        for kv in rec.get(4).unwrap_or("").split(';').filter(|s| !s.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| table.err(*line, format!("notes entry `{kv}` is not key=value")))?;
            metadata.insert(k.to_string(), v.to_string());
        }
        out.push(ExperimentRecord {
            trial: table.field(*line, rec, 0, "trial")?,
            independent_var: table.field(*line, rec, 1, "independent_var")?,
            tip_error_pct: table.field(*line, rec, 2, "tip_error_pct")?,
            trial_seed: table.field(*line, rec, 3, "seed")?,
            metadata,
        });
    }
    Ok(out)
}

pub fn drift_csv(result: &DriftResult, seed: u64, stamp: Option<u64>) -> String {
    let mut out = String::new();
    stamp_line(&mut out, stamp);
    out.push_str(&DRIFT_HEADER.join(","));
    out.push('\n');
    for t in &result.traces {
        for (m, e) in &t.samples {
            let _ = writeln!(out, "{},{m:.6},{e:.9},{seed}", t.sensor);
        }
    }
    out
}

/// Best spacing of one trial in a spacing sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgminEntry {
    pub trial: usize,
    pub spacing_cm: f64,
    pub tip_error_pct: f64,
}

/// The summary JSON written next to every sweep's records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: String,
    pub mean_error_pct: Option<f64>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_error_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub argmin: Option<Vec<ArgminEntry>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fraction_sparser_best: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_at: Option<u64>,
}

impl Summary {
    pub fn of_sweep(r: &SweepResult, seed: u64) -> Summary {
        let g = r.regression;
        Summary {
            kind: r.kind.name().to_string(),
            mean_error_pct: Some(r.mean_error_pct),
            slope: g.map(|g| g.slope),
            intercept: g.map(|g| g.intercept),
            r_squared: g.map(|g| g.r_squared),
            p_value: g.map(|g| g.p_value),
            n: r.records.len(),
            seed,
            mean_error_deg: None,
            argmin: None,
            fraction_sparser_best: None,
            generated_at: None,
        }
    }

    pub fn of_drift(r: &DriftResult, seed: u64) -> Summary {
        let g = r.regression;
        Summary {
            kind: "drift".into(),
            mean_error_pct: None,
            slope: Some(g.slope),
            intercept: Some(g.intercept),
            r_squared: Some(g.r_squared),
            p_value: Some(g.p_value),
            n: g.n,
            seed,
            mean_error_deg: Some(r.mean_error_deg),
            argmin: None,
            fraction_sparser_best: None,
            generated_at: None,
        }
    }

    /// Spacing summary; the regression is of error on spacing over all
    /// records.
    pub fn of_spacing(r: &SpacingResult, seed: u64) -> Summary {
        let xs: Vec<f64> = r.records.iter().map(|r| r.independent_var).collect();
        let ys: Vec<f64> = r.records.iter().map(|r| r.tip_error_pct).collect();
        let g = crate::experiments::ols_fit(&xs, &ys).ok();
        Summary {
            kind: "spacing".into(),
            mean_error_pct: Some(r.mean_error_pct),
            slope: g.map(|g| g.slope),
            intercept: g.map(|g| g.intercept),
            r_squared: g.map(|g| g.r_squared),
            p_value: g.map(|g| g.p_value),
            n: r.records.len(),
            seed,
            mean_error_deg: None,
            argmin: Some(
                r.argmin
                    .iter()
                    .map(|&(trial, spacing_cm, tip_error_pct)| ArgminEntry {
                        trial,
                        spacing_cm,
                        tip_error_pct,
                    })
                    .collect(),
            ),
            fraction_sparser_best: Some(r.fraction_sparser_best()),
            generated_at: None,
        }
    }

    pub fn with_stamp(mut self, stamp: Option<u64>) -> Summary {
        self.generated_at = stamp;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::compute_offsets;
    use crate::reconstruction::{reconstruct, RobotGeometry};

    fn q(deg: f64) -> Quat {
        Quat::from_axis_angle(Vec3::new(0.2, 0.3, 1.0), deg.to_radians())
    }

    #[test]
    fn imu_log_round_trip() {
        let samples: Vec<ImuSample> = (0..4).map(|i| ImuSample::new(2.5, i, q(10.0 * i as f64))).collect();
        let text = imu_log_csv(&samples, Some(123));
        assert!(text.starts_with("# generated_at=123\n"));
        let log = ImuLog::parse("log.csv", &text).unwrap();
        let back = log.frame(2.5, 4).unwrap();
        for (a, b) in samples.iter().zip(&back) {
            assert_eq!(a.imu_index, b.imu_index);
            assert!(crate::math::angle_between(a.orientation, b.orientation) < 1e-11);
        }
    }

    #[test]
    fn missing_imu_names_the_line() {
        let text = "time_s,imu_index,qw,qx,qy,qz\n0,0,1,0,0,0\n0,1,1,0,0,0\n0,3,1,0,0,0\n";
        let log = ImuLog::parse("log.csv", text).unwrap();
        match log.frame(0.0, 4) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("IMU 2 missing"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        // A missing last IMU points at the frame's last row.
        match log.frame(0.0, 5) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_rows_name_the_line() {
        let text = "# comment\ntime_s,imu_index,qw,qx,qy,qz\n0,0,1,0,0,0\n0,1,abc,0,0,0\n";
        match ImuLog::parse("log.csv", text) {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 4);
                assert!(message.contains("qw"));
            }
            other => panic!("{other:?}"),
        }
        let text = "time_s,imu_index,qw,qx,qy,qz\n0,0,0,0,0,0\n";
        assert!(matches!(ImuLog::parse("log.csv", text), Err(Error::Parse { line: 2, .. })));
        let text = "time,imu,qw,qx,qy,qz\n";
        assert!(matches!(ImuLog::parse("log.csv", text), Err(Error::Parse { line: 1, .. })));
        let text = "time_s,imu_index,qw,qx,qy,qz\n0,0,1,0,0\n";
        assert!(matches!(ImuLog::parse("log.csv", text), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn duplicate_imu_is_reported() {
        let text = "time_s,imu_index,qw,qx,qy,qz\n0,0,1,0,0,0\n0,0,1,0,0,0\n";
        let log = ImuLog::parse("log.csv", text).unwrap();
        assert!(matches!(log.frame(0.0, 1), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn offsets_round_trip() {
        let snap: Vec<ImuSample> = (0..5).map(|i| ImuSample::new(4.0, i, q(3.0 * i as f64))).collect();
        let table = compute_offsets(&snap).unwrap();
        let text = offsets_csv(&table, None);
        assert!(text.starts_with("# captured_at=4.000000\npair_index,qw,qx,qy,qz\n"));
        let back = parse_offsets("o.csv", &text).unwrap();
        assert_eq!(back.captured_at, 4.0);
        for (a, b) in table.offsets.iter().zip(&back.offsets) {
            assert!(crate::math::angle_between(*a, *b) < 1e-11);
        }
        assert!(parse_offsets("o.csv", "pair_index,qw,qx,qy,qz\n0,1,0,0,0\n").is_err());
    }

    #[test]
    fn centerline_round_trip() {
        let geom = RobotGeometry::default();
        let rots = vec![Quat::from_axis_angle(Vec3::Z, 0.2); geom.num_imus - 1];
        let line = reconstruct(&rots, &geom, Pose::default(), None, true).unwrap();
        let text = centerline_csv(&line, None);
        let back = parse_centerline("c.csv", &text).unwrap();
        assert_eq!(back.points.len(), line.points.len());
        assert_eq!(back.imu_indices, line.imu_indices);
        assert!(back.tip.position.distance(line.tip.position) < 1e-8);
        for (a, b) in back.points.iter().zip(&line.points) {
            assert!(a.distance(*b) < 1e-8);
        }
    }

    #[test]
    fn records_round_trip() {
        let mut metadata = BTreeMap::new();
        metadata.insert("imus".to_string(), "18".to_string());
        metadata.insert("k".to_string(), "2".to_string());
        let r = ExperimentRecord {
            trial: 3,
            independent_var: 45.0,
            tip_error_pct: 7.25,
            trial_seed: u64::MAX,
            metadata,
        };
        let text = records_csv(std::slice::from_ref(&r), None);
        assert_eq!(text, "trial,independent_var,tip_error_pct,seed,notes\n3,45,7.250000000,18446744073709551615,imus=18;k=2\n");
        assert_eq!(parse_records("r.csv", &text).unwrap(), vec![r]);
    }
}
