//! Euler-Maruyama for dX = √λ(X) dW and the rescaled generator coefficient.

use tcwiener::geometry::{IntensityModel, Profile};
use tcwiener::path::Provenance;
use tcwiener::sde::{euler_maruyama, scaled_generator_check, DiffusionKind, SdeConfig};
use tcwiener::stats::mc_mean;

fn main() -> tcwiener::Result<()> {
    let model = IntensityModel::new(2, vec![1.0, 4.0, 1.0, 4.0], Profile::Constant)?;
    let cfg = SdeConfig::new(1e-3, 1.0, DiffusionKind::Limit(model.clone()))?;
    let ends: Vec<f64> = (0..2000)
        .map(|i| {
            let p = euler_maruyama(&cfg, &[0.0, 0.0], Provenance::new(3, 0, i))?;
            Ok(p.point(p.grid().steps())[1].powi(2))
        })
        .collect::<tcwiener::Result<_>>()?;
    let (m, se) = mc_mean(&ends)?;
    println!("E X_2(1)^2 = {m:.3} +- {se:.3} (between 1 and 4)");

    let singular = IntensityModel::new(2, vec![1.0, 4.0, 1.0, 4.0], Profile::RadialPower { beta: 1.0, cutoff: 1.0 })?;
    let points = vec![vec![0.01, 0.02], vec![-0.5, 0.3], vec![0.0, 1.0]];
    for n in [1.0, 1e2, 1e4, 1e6] {
        let gaps = scaled_generator_check(&singular, n, &points)?;
        let g: Vec<String> = gaps.iter().map(|g| format!("{:.2e}", g.gap)).collect();
        println!("n = {n:>7}: gaps {}", g.join(" "));
    }
    Ok(())
}
