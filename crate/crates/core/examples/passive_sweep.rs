//! Passive steering: bends against an obstacle at 0-90 degrees.
//!
//! cargo run --release --example passive_sweep

use vineshape::config::RunConfig;
use vineshape::experiments::run_passive_sweep;

fn main() -> vineshape::Result<()> {
    let cfg = RunConfig::default();
    let r = run_passive_sweep(&cfg.template(), &cfg.passive)?;
    for rec in &r.records {
        println!("angle {:4.0} deg  error {:6.3}%  ({})", rec.independent_var, rec.tip_error_pct, rec.notes());
    }
    println!("mean {:.3}%", r.mean_error_pct);
    if let Some(g) = r.regression {
        println!("slope {:.4} %/deg, p {:.3}", g.slope, g.p_value);
    }
    Ok(())
}
