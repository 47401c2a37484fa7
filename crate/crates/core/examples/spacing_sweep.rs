//! Sensor spacing: reanalyse the same trials with every k-th IMU and find
//! the spacing with the lowest error per trial.
//!
//! cargo run --release --example spacing_sweep

use vineshape::config::RunConfig;
use vineshape::experiments::{run_spacing_sweep, simulate_spacing_trials};

fn main() -> vineshape::Result<()> {
    let cfg = RunConfig::default();
    let logs = simulate_spacing_trials(&cfg.template(), &cfg.spacing)?;
    let r = run_spacing_sweep(&logs, &cfg.spacing.spacing_multiples, cfg.strict)?;

    let mut counts = std::collections::BTreeMap::new();
    for &(_, spacing, _) in &r.argmin {
        *counts.entry((spacing * 10.0).round() as i64).or_insert(0) += 1;
    }
    println!("best spacing over {} trials:", r.argmin.len());
    for (s, c) in counts {
        println!("  {:6.1} cm: {c}", s as f64 / 10.0);
    }
    println!("densest spacing beaten in {:.0}% of trials", 100.0 * r.fraction_sparser_best());
    Ok(())
}
