//! Euler-Maruyama for the limit SDE against the time-change construction of the same law.

use tcwiener::experiments::{self, ExperimentConfig, ExperimentKind, ModelConfig, ProfileKind, RunOptions};

fn main() -> tcwiener::Result<()> {
    let model = ModelConfig {
        dimension: 2,
        octant_limits: vec![1.0, 4.0, 2.0, 0.5],
        profile: ProfileKind::Constant,
        beta: None,
        cutoff: None,
        scale: None,
    };
    let mut cfg = ExperimentConfig::new(ExperimentKind::SdeCrosscheck, model);
    cfg.monte_carlo.path_count = 4000;
    println!("{}", experiments::run(None, &cfg, RunOptions::default())?);
    Ok(())
}
