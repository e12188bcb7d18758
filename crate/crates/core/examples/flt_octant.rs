//! Functional limit for an octant-constant intensity: rescaled marginals against W(ν⁻¹(t)).

use tcwiener::experiments::{self, ExperimentConfig, ExperimentKind, FltConfig, ModelConfig, ProfileKind, RunOptions};

fn main() -> tcwiener::Result<()> {
    let model = ModelConfig {
        dimension: 2,
        octant_limits: vec![1.0, 4.0, 1.0, 4.0],
        profile: ProfileKind::Constant,
        beta: None,
        cutoff: None,
        scale: None,
    };
    let mut cfg = ExperimentConfig::new(ExperimentKind::Flt, model);
    cfg.monte_carlo.path_count = 4000;
    cfg.grid.step = Some(0.02);
    cfg.flt = Some(FltConfig {
        n_values: vec![1.0, 10.0, 100.0],
        eval_times: vec![0.5, 1.0],
        ..FltConfig::default()
    });
    let report = experiments::run(None, &cfg, RunOptions::default())?;
    println!("{report}");
    Ok(())
}
