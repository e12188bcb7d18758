//! Monte Carlo for ∂_t u = ½λΔu, checked against the closed form when λ is constant,
//! then writing the report and estimates to a directory.

use tcwiener::experiments::{
    self, CauchyConfig, ExperimentConfig, ExperimentKind, ModelConfig, Payoff, ProfileKind, RunOptions,
};

fn main() -> tcwiener::Result<()> {
    let model = |limits: Vec<f64>| ModelConfig {
        dimension: 2,
        octant_limits: limits,
        profile: ProfileKind::Constant,
        beta: None,
        cutoff: None,
        scale: None,
    };
    let table = CauchyConfig {
        payoff: Payoff::GaussianBump,
        start_points: vec![vec![0.0, 0.0], vec![1.0, -0.5]],
        eval_times: vec![0.25, 1.0],
        ..CauchyConfig::default()
    };

    let mut cfg = ExperimentConfig::new(ExperimentKind::CauchyMc, model(vec![2.0; 4]));
    cfg.monte_carlo.path_count = 4000;
    cfg.cauchy_mc = Some(table.clone());
    println!("{}\n", experiments::run(None, &cfg, RunOptions::default())?);

    // Skew coefficients: no closed form, estimates only.
    cfg.model = model(vec![1.0, 4.0, 1.0, 4.0]);
    let report = experiments::run(None, &cfg, RunOptions::default())?;
    let dir = std::env::temp_dir().join("tcw_cauchy_example");
    for f in report.write(&dir)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}
