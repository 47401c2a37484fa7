//! Active steering: constant curvature along the whole body, with the wall
//! further from the centerline than the model assumes.
//!
//! cargo run --release --example active_sweep

use vineshape::config::RunConfig;
use vineshape::experiments::{run_active_sweep, ActiveSweep};

fn main() -> vineshape::Result<()> {
    let cfg = RunConfig::default();
    let template = cfg.template();
    for scale in [1.0, cfg.active.wall_offset_scale] {
        let sweep = ActiveSweep {
            wall_offset_scale: scale,
            ..cfg.active.clone()
        };
        let r = run_active_sweep(&template, &sweep)?;
        println!("wall offset {scale} x d/2: mean error {:.3}%", r.mean_error_pct);
        for rec in r.records.iter().step_by(4) {
            println!("  kappa {:.3} /cm  error {:6.3}%", rec.independent_var, rec.tip_error_pct);
        }
    }
    Ok(())
}
