//! The additive functional S_B, its inverse τ, and the rescaled time-changed process.

use tcwiener::clock::{additive_functional, limit_process, normalized_process, ClockSettings};
use tcwiener::geometry::{IntensityModel, Profile};
use tcwiener::path::{sample_wiener, Provenance, TimeGrid};

fn main() -> tcwiener::Result<()> {
    let model = IntensityModel::new(2, vec![1.0, 4.0, 1.0, 4.0], Profile::Constant)?;
    let path = sample_wiener(2, TimeGrid::new(0.01, 10.0)?, Provenance::new(1, 0, 0))?;

    let clock = additive_functional(&path, &model, 1e6)?;
    println!("S_B(10) = {:.4}", clock.final_value());
    for t in [0.5, 1.0, 2.0] {
        let tau = clock.inverse(t)?;
        println!("tau({t}) = {tau:.4}, S_B(tau) = {:.4}", clock.value_at(tau));
    }

    // B_{τ_{nt}}/√n with the horizon doubled as needed.
    let n = 100.0;
    let s = normalized_process(path.clone(), &model, n, &[0.5, 1.0], ClockSettings::default())?;
    println!("n = {n}: X(0.5) = {:?}, X(1) = {:?}, nu = {:?}", s.values[0], s.values[1], s.nu);
    println!("path horizon after extension: {}", s.path.grid().horizon());

    // The octant-skew limit W(ν⁻¹(t)) driven by an independent path.
    let w = sample_wiener(2, TimeGrid::new(0.01, 2.0)?, Provenance::new(1, 1, 0))?;
    let lim = limit_process(w, &model, &[0.5, 1.0], 40)?;
    println!("limit: Y(1) = {:?}, nu^-1(1) = {:.4}", lim.values[1], lim.nu_inverse[1]);
    Ok(())
}
