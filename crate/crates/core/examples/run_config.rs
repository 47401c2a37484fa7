//! Run configurations: defaults, JSON round trip and validation errors that
//! name the offending field.
//!
//! cargo run --example run_config

use vineshape::config::RunConfig;

fn main() {
    let cfg = RunConfig::default();
    println!("default seed {}, noise {} deg, mounting {} deg", cfg.seed, cfg.drift.noise_std, cfg.mounting_std_deg);

    let tweaked = RunConfig::from_json(r#"{"seed": 9, "passive": {"trials_per_angle": 5}}"#).unwrap();
    println!("partial document: seed {}, {} trials per angle", tweaked.seed, tweaked.passive.trials_per_angle);
    assert_eq!(RunConfig::from_json(&tweaked.to_json()).unwrap(), tweaked);

    for bad in [r#"{"drift": {"noise_std": -1}}"#, r#"{"spacing": {"spacing_multiples": [0]}}"#, r#"{"sede": 1}"#] {
        println!("{bad}\n  -> {}", RunConfig::from_json(bad).unwrap_err());
    }
}
