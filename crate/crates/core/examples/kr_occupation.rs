//! Occupation time of a planar Brownian motion in a disc, normalized by log T.

use tcwiener::experiments::{self, ExperimentConfig, ExperimentKind, KrConfig, ModelConfig, ProfileKind, RunOptions, TestFunction};

fn main() -> tcwiener::Result<()> {
    for f in [TestFunction::Disc, TestFunction::GaussianBump] {
        println!("E ∫_0^T f(B_s) ds for {f:?} at T = 1e4: {:.4}", f.exact_mean(1e4));
    }
    let model = ModelConfig {
        dimension: 2,
        octant_limits: vec![1.0; 4],
        profile: ProfileKind::Constant,
        beta: None,
        cutoff: None,
        scale: None,
    };
    let mut cfg = ExperimentConfig::new(ExperimentKind::Kr, model);
    cfg.monte_carlo.path_count = 2000;
    cfg.kr = Some(KrConfig {
        t_values: vec![1024.0, 65536.0],
        ..KrConfig::default()
    });
    println!("{}", experiments::run(None, &cfg, RunOptions::default())?);
    Ok(())
}
