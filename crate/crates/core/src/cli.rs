//! The `vineshape` command line.
//!
//! ```text
//! vineshape [--config <path>] [--seed <int>] [--out <dir>] [--strict] [--no-timestamp] <command>
//!
//!   reconstruct --log <csv> (--snapshot <csv> | --offsets <csv>)   centerline CSV + SVG
//!   sweep <drift|passive|active|length|spacing>                  records CSV + summary JSON + SVG
//!   offsets --snapshot <csv>                                     offset table CSV
//!   plot <kind> --input <csv>...                                 SVG from files written earlier
//! ```
//!
//! Every command is a pure function of the config, its input files and the
//! master seed. Outputs carry a `generated_at` header unless
//! `--no-timestamp` is given.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::calibration::{compute_offsets, corrected_relative_rotations, OffsetTable};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::{
    run_active_sweep, run_drift_experiment, run_length_sweep, run_passive_sweep, run_spacing_sweep,
    simulate_spacing_trials, SweepKind, SweepResult, TrialLog,
};
use crate::io::{self, ImuLog, Summary};
use crate::math::Pose;
use crate::plot::{render_svg, PlotData, PlotKind, PlotSpec, Series};
use crate::reconstruction::{reconstruct, RobotGeometry};
use crate::rng::{self, Purpose};

#[derive(Debug, Parser)]
#[command(name = "vineshape", version, about = "IMU shape sensing for vine robots")]
pub struct Cli {
    /// JSON run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fail on bends a span cannot hold instead of clamping them.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Leave the generated_at header out of every output.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reconstruct a centerline from an IMU log.
    Reconstruct(ReconstructArgs),
    /// Run one of the experiment sweeps.
    Sweep(SweepArgs),
    /// Compute the offset table of a straight snapshot.
    Offsets {
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Render a plot from CSV files written by the other commands.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// IMU log, `time_s,imu_index,qw,qx,qy,qz`.
    #[arg(long)]
    pub log: PathBuf,
    /// Straight snapshot in the same format.
    #[arg(long, conflicts_with = "offsets", required_unless_present = "offsets")]
    pub snapshot: Option<PathBuf>,
    /// Offset table written by `offsets`, instead of a snapshot.
    #[arg(long)]
    pub offsets: Option<PathBuf>,
    /// Frame of the log to use; defaults to the latest.
    #[arg(long)]
    pub time: Option<f64>,
    /// IMU spacing in cm, overriding the config.
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Body diameter in cm, overriding the config.
    #[arg(long)]
    pub diameter: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// drift, passive, active, length or spacing.
    pub kind: SweepKind,
    /// Spacing sweep only: reanalyse trial logs saved by an earlier run
    /// (`spacing_trials.json`) instead of simulating new ones.
    #[arg(long)]
    pub logs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// centerline-overlay, error-scatter-with-fit or drift-traces.
    pub kind: PlotKind,
    /// Centerline CSVs (one per line), a records CSV or a drift CSV.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Output file name inside the output directory.
    #[arg(long, default_value = "plot.svg")]
    pub name: String,
    #[arg(long, default_value = "")]
    pub title: String,
}

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    stamp: Option<u64>,
}

impl Ctx {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out)?;
        let path = self.out.join(name);
        std::fs::write(&path, contents)?;
        Ok(path)
    }

    fn svg(&self, name: &str, svg: String) -> Result<PathBuf> {
        let svg = match self.stamp {
            Some(t) => svg.replacen('\n', &format!("\n<!-- generated_at={t} -->\n"), 1),
            None => svg,
        };
        self.write(name, &svg)
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<Vec<PathBuf>>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::config("arguments", e.to_string()))?;
    execute(cli)
}

/// Runs a parsed command line and returns the files written.
pub fn execute(cli: Cli) -> Result<Vec<PathBuf>> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.strict |= cli.strict;
    let out = cli.out.clone().unwrap_or_else(|| cfg.out_dir.clone());
    let ctx = Ctx {
        cfg,
        out,
        stamp: (!cli.no_timestamp).then(io::now_unix),
    };
    match &cli.command {
        Command::Reconstruct(a) => cmd_reconstruct(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Offsets { snapshot } => cmd_offsets(&ctx, snapshot),
        Command::Plot(a) => cmd_plot(&ctx, a),
    }
}

/// Entry point for the binary: prints errors and maps them to exit codes.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_offsets(ctx: &Ctx, snapshot: &Path) -> Result<Vec<PathBuf>> {
    let table = compute_offsets(&ImuLog::read(snapshot)?.single_frame()?)?;
    Ok(vec![ctx.write("offsets.csv", &io::offsets_csv(&table, ctx.stamp))?])
}

fn cmd_reconstruct(ctx: &Ctx, a: &ReconstructArgs) -> Result<Vec<PathBuf>> {
    let table: OffsetTable = match (&a.snapshot, &a.offsets) {
        (Some(s), _) => compute_offsets(&ImuLog::read(s)?.single_frame()?)?,
        (None, Some(o)) => io::read_offsets(o)?,
        (None, None) => return Err(Error::config("snapshot", "give --snapshot or --offsets")),
    };
    let n = table.num_imus();
    let log = ImuLog::read(&a.log)?;
    let time = match a.time {
        Some(t) => t,
        None => *log.times().last().expect("a parsed log has rows"),
    };
    let frame = log.frame(time, n)?;
    let geom = RobotGeometry::new(
        a.spacing.unwrap_or(ctx.cfg.geometry.spacing),
        a.diameter.unwrap_or(ctx.cfg.geometry.diameter),
        n,
    )?;
    let rotations = corrected_relative_rotations(&frame, &table)?;
    let line = reconstruct(&rotations, &geom, Pose::default(), None, ctx.cfg.strict)?;
    if !line.clamped_segments.is_empty() {
        eprintln!(
            "warning: bends clamped to s/d in segment(s) {:?}; pass --strict to fail instead",
            line.clamped_segments
        );
    }
    let csv = ctx.write("centerline.csv", &io::centerline_csv(&line, ctx.stamp))?;
    let spec = PlotSpec::new(PlotKind::CenterlineOverlay, "Reconstructed centerline (top view)", "x (cm)", "y (cm)");
    let pts = line.points.iter().map(|p| (p.x, p.y)).collect();
    let svg = ctx.svg("centerline.svg", render_svg(&spec, &PlotData::Centerlines(vec![Series::new("estimate", pts)]))?)?;
    Ok(vec![csv, svg])
}

fn scatter(result: &SweepResult, x_label: &str) -> Result<String> {
    let spec = PlotSpec::new(
        PlotKind::ErrorScatterWithFit,
        &format!("{} sweep", result.kind.name()),
        x_label,
        "tip error (% of length)",
    );
    render_svg(
        &spec,
        &PlotData::Scatter {
            points: result.records.iter().map(|r| (r.independent_var, r.tip_error_pct)).collect(),
            fit: result.regression.map(|g| (g.slope, g.intercept)),
        },
    )
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs) -> Result<Vec<PathBuf>> {
    let cfg = &ctx.cfg;
    let template = cfg.template();
    let name = a.kind.name();
    if a.logs.is_some() && a.kind != SweepKind::Spacing {
        return Err(Error::config("logs", "--logs applies to the spacing sweep only"));
    }
    let mut files = Vec::new();
    let (result, x_label) = match a.kind {
        SweepKind::Drift => {
            let d = &cfg.drift_experiment;
            let seed = rng::derive_seed(cfg.seed, SweepKind::Drift as u64, Purpose::TrialSeed);
            let r = run_drift_experiment(d.n_sensors, d.duration_s, &cfg.drift.with_seed(seed), d.sample_every_s)?;
            files.push(ctx.write("drift_traces.csv", &io::drift_csv(&r, seed, ctx.stamp))?);
            let summary = Summary::of_drift(&r, cfg.seed).with_stamp(ctx.stamp);
            files.push(ctx.write("drift_summary.json", &summary.to_json())?);
            let spec = PlotSpec::new(PlotKind::DriftTraces, "IMU drift", "time since offsetting (min)", "orientation error (deg)");
            let series = r
                .traces
                .iter()
                .map(|t| Series::new(format!("IMU {}", t.sensor), t.samples.clone()))
                .collect();
            files.push(ctx.svg("drift.svg", render_svg(&spec, &PlotData::Traces(series))?)?);
            return Ok(files);
        }
        SweepKind::Spacing => {
            let logs: Vec<TrialLog> = match &a.logs {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
                None => {
                    let logs = simulate_spacing_trials(&template, &cfg.spacing)?;
                    files.push(ctx.write("spacing_trials.json", &(serde_json::to_string(&logs)? + "\n"))?);
                    logs
                }
            };
            let r = run_spacing_sweep(&logs, &cfg.spacing.spacing_multiples, cfg.strict)?;
            files.push(ctx.write("spacing_records.csv", &io::records_csv(&r.records, ctx.stamp))?);
            let summary = Summary::of_spacing(&r, cfg.seed).with_stamp(ctx.stamp);
            files.push(ctx.write("spacing_summary.json", &summary.to_json())?);
            let spec = PlotSpec::new(PlotKind::DriftTraces, "spacing sweep", "sensor spacing (cm)", "tip error (% of length)");
            let mut series: Vec<Series> = Vec::new();
            for rec in &r.records {
                if series.len() <= rec.trial {
                    series.push(Series::new(format!("trial {}", rec.trial), Vec::new()));
                }
                series[rec.trial].points.push((rec.independent_var, rec.tip_error_pct));
            }
            files.push(ctx.svg("spacing.svg", render_svg(&spec, &PlotData::Traces(series))?)?);
            return Ok(files);
        }
        SweepKind::Passive => (run_passive_sweep(&template, &cfg.passive)?, "bend angle (deg)"),
        SweepKind::Active => (run_active_sweep(&template, &cfg.active)?, "curvature (1/cm)"),
        SweepKind::Length => (run_length_sweep(&template, &cfg.length)?, "robot length (cm)"),
    };
    files.push(ctx.write(&format!("{name}_records.csv"), &io::records_csv(&result.records, ctx.stamp))?);
    let summary = Summary::of_sweep(&result, cfg.seed).with_stamp(ctx.stamp);
    files.push(ctx.write(&format!("{name}_summary.json"), &summary.to_json())?);
    files.push(ctx.svg(&format!("{name}.svg"), scatter(&result, x_label)?)?);
    Ok(files)
}

fn cmd_plot(ctx: &Ctx, a: &PlotArgs) -> Result<Vec<PathBuf>> {
    let read = |p: &PathBuf| std::fs::read_to_string(p).map_err(Error::from);
    let label = |p: &PathBuf| p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
    let (data, x, y) = match a.kind {
        PlotKind::CenterlineOverlay => {
            let mut series = Vec::new();
            for p in &a.input {
                let c = io::parse_centerline(&p.display().to_string(), &read(p)?)?;
                series.push(Series::new(label(p), c.points.iter().map(|v| (v.x, v.y)).collect()));
            }
            (PlotData::Centerlines(series), "x (cm)", "y (cm)")
        }
        PlotKind::ErrorScatterWithFit => {
            let mut points = Vec::new();
            for p in &a.input {
                let recs = io::parse_records(&p.display().to_string(), &read(p)?)?;
                points.extend(recs.iter().map(|r| (r.independent_var, r.tip_error_pct)));
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
            let fit = crate::experiments::ols_fit(&xs, &ys).ok().map(|g| (g.slope, g.intercept));
            (PlotData::Scatter { points, fit }, "independent variable", "tip error (% of length)")
        }
        PlotKind::DriftTraces => {
            let mut series: Vec<Series> = Vec::new();
            for p in &a.input {
                for (sensor, pts) in parse_drift(p, &read(p)?)? {
                    series.push(Series::new(format!("IMU {sensor}"), pts));
                }
            }
            (PlotData::Traces(series), "time since offsetting (min)", "orientation error (deg)")
        }
    };
    let spec = PlotSpec::new(a.kind, &a.title, x, y);
    Ok(vec![ctx.svg(&a.name, render_svg(&spec, &data)?)?])
}

/// Per-sensor `(time_min, error_deg)` traces, in file order.
type Traces = Vec<(usize, Vec<(f64, f64)>)>;

fn parse_drift(path: &Path, text: &str) -> Result<Traces> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(io::DRIFT_HEADER.iter().copied()) {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected header `{}`", io::DRIFT_HEADER.join(",")),
        });
    }
    let mut out: Traces = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |col: &str| Error::Parse {
            path: path.display().to_string(),
            line,
            message: format!("column `{col}`: cannot parse"),
        };
        let sensor: usize = rec.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("sensor"))?;
        let t: f64 = rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad("time_min"))?;
        let e: f64 = rec.get(2).and_then(|s| s.parse().ok()).ok_or_else(|| bad("error_deg"))?;
        match out.iter_mut().find(|(s, _)| *s == sensor) {
            Some((_, pts)) => pts.push((t, e)),
            None => out.push((sensor, vec![(t, e)])),
        }
    }
    Ok(out)
}
