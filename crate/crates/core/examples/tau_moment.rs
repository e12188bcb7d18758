//! The bound E τ_t ≤ C t for an intensity bounded above by C.

use tcwiener::experiments::{self, ExperimentConfig, ExperimentKind, ModelConfig, ProfileKind, RunOptions};

fn main() -> tcwiener::Result<()> {
    let model = ModelConfig {
        dimension: 2,
        octant_limits: vec![1.0, 3.0, 2.0, 4.0],
        profile: ProfileKind::RadialSmooth,
        beta: None,
        cutoff: None,
        scale: Some(0.5),
    };
    let mut cfg = ExperimentConfig::new(ExperimentKind::TauMoment, model);
    cfg.monte_carlo.path_count = 4000;
    println!("{}", experiments::run(None, &cfg, RunOptions::default())?);
    Ok(())
}
