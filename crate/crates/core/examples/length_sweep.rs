//! Growth: error against robot length along one steered path.
//!
//! cargo run --release --example length_sweep

use vineshape::config::RunConfig;
use vineshape::experiments::run_length_sweep;

fn main() -> vineshape::Result<()> {
    let cfg = RunConfig::default();
    let r = run_length_sweep(&cfg.template(), &cfg.length)?;
    for rec in &r.records {
        println!("{:6.1} cm, {} IMUs: {:6.3}%", rec.independent_var, rec.metadata["imus"], rec.tip_error_pct);
    }
    let g = r.regression.expect("several lengths");
    println!("slope {:.4} %/cm, R^2 {:.3}, p {:.3}", g.slope, g.r_squared, g.p_value);
    Ok(())
}
