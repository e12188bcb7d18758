//! Reproducible Brownian paths: sampling, extension, coarsening and bridge refinement.

use tcwiener::path::{sample_wiener, Provenance, TimeGrid};

fn main() -> tcwiener::Result<()> {
    let prov = Provenance::new(7, 0, 3);
    let path = sample_wiener(2, TimeGrid::new(0.01, 1.0)?, prov)?;
    println!("steps {}, W(1) = {:?}", path.grid().steps(), path.point(path.grid().steps()));

    // Same provenance, same path.
    let again = sample_wiener(2, TimeGrid::new(0.01, 1.0)?, prov)?;
    assert_eq!(path.values(), again.values());

    // Extending keeps the existing prefix.
    let longer = path.clone().extend(4.0)?;
    assert_eq!(&longer.values()[..path.values().len()], path.values());
    println!("extended to t = {}, W(4) = {:?}", longer.grid().horizon(), longer.interpolate(4.0));

    let coarse = path.coarsened(10)?;
    let fine = coarse.refine_bridge(10)?;
    println!(
        "coarse step {} -> refined step {}, endpoints agree: {}",
        coarse.grid().step(),
        fine.grid().step(),
        fine.interpolate(1.0) == coarse.interpolate(1.0)
    );

    let shifted = path.translated(&[1.0, -1.0])?;
    println!("translated start {:?}", shifted.point(0));
    Ok(())
}
