//! Functional limit with an intensity vanishing at the origin (radial power, d = 3).

use tcwiener::experiments::{self, ExperimentConfig, ExperimentKind, FltConfig, ModelConfig, ProfileKind, RunOptions, Theorem};

fn main() -> tcwiener::Result<()> {
    let model = ModelConfig {
        dimension: 3,
        octant_limits: vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0],
        profile: ProfileKind::RadialPower,
        beta: Some(1.0),
        cutoff: Some(1.0),
        scale: None,
    };
    let mut cfg = ExperimentConfig::new(ExperimentKind::Flt, model);
    cfg.monte_carlo.path_count = 4000;
    cfg.grid.step = Some(0.02);
    cfg.flt = Some(FltConfig {
        theorem: Some(Theorem::Radial),
        step_halving: true,
        ..FltConfig::default()
    });
    println!("{}", experiments::validate(&cfg)?);
    println!();
    println!("{}", experiments::run(None, &cfg, RunOptions::default())?);
    Ok(())
}
