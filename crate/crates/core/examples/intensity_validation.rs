//! Build intensity models and check which limit theorems apply to them.

use tcwiener::geometry::{IntensityModel, OctantIndex, Profile};

fn main() -> tcwiener::Result<()> {
    let models = [
        ("octant-constant, d=2", IntensityModel::new(2, vec![1.0, 4.0, 1.0, 4.0], Profile::Constant)?),
        (
            "radial power beta=1, d=3",
            IntensityModel::new(3, vec![1.0; 8], Profile::RadialPower { beta: 1.0, cutoff: 1.0 })?,
        ),
        (
            "radial power beta=2.5, d=3",
            IntensityModel::new(3, vec![1.0; 8], Profile::RadialPower { beta: 2.5, cutoff: 1.0 })?,
        ),
        (
            "radial smooth, d=2",
            IntensityModel::new(2, vec![1.0, 2.0, 3.0, 4.0], Profile::RadialSmooth { scale: 1.0 })?,
        ),
    ];

    for (name, model) in &models {
        println!("== {name}");
        for x in [[0.5, -2.0, 1.0], [10.0, 10.0, -10.0]] {
            let x = &x[..model.dimension()];
            println!(
                "  lambda{x:?} = {:.4}  (octant {})",
                model.intensity_at(x)?,
                model.octant_of(x)?
            );
        }
        println!("{}\n", model.validate_assumptions());
    }

    // Octant bits: bit i set means x_i < 0.
    let q = OctantIndex::from_index(2, 2)?;
    println!("octant 2 in d=2 has bits {:?} and contains (1, -1): {}", q.bits(), q.contains(&[1.0, -1.0]));
    Ok(())
}
