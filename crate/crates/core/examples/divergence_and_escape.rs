//! Divergence of S_B(t) and transience of |B_T|/√T in d = 3.

use tcwiener::experiments::{
    self, escape_probability, ExperimentConfig, ExperimentKind, ModelConfig, ProfileKind, RunOptions,
};

fn model() -> ModelConfig {
    ModelConfig {
        dimension: 3,
        octant_limits: vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0, 1.0, 2.0],
        profile: ProfileKind::RadialSmooth,
        beta: None,
        cutoff: None,
        scale: Some(1.0),
    }
}

fn main() -> tcwiener::Result<()> {
    let mut div = ExperimentConfig::new(ExperimentKind::Divergence, model());
    div.monte_carlo.path_count = 2000;
    println!("{}\n", experiments::run(None, &div, RunOptions::default())?);

    for t in [1e2, 1e4, 1e6] {
        println!("P(|B_T| > T^(1/2 - 1/3)) at T = {t:e}: {:.6}", escape_probability(3, t));
    }
    let mut esc = ExperimentConfig::new(ExperimentKind::EscapeRate, model());
    esc.monte_carlo.path_count = 2000;
    println!("{}", experiments::run(None, &esc, RunOptions::default())?);
    Ok(())
}
