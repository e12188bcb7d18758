//! Euler–Maruyama for `dY = σ(Y) dB̃` with a scalar diffusion coefficient
//! applied to every coordinate.

use crate::error::{Error, Result};
use crate::geometry::{on_boundary, IntensityModel};
use crate::path::{Provenance, SampledPath, TimeGrid};

/// Diffusion coefficient of the integrated equation.
#[derive(Debug, Clone, PartialEq)]
pub enum DiffusionKind {
    /// `σ(x) = √λ(x)`.
    General(IntensityModel),
    /// `σ(x) = √λ_α` inside octant `Δ_α`, `σ = 1` on the bounding hyperplanes.
    Limit(IntensityModel),
}

impl DiffusionKind {
    fn model(&self) -> &IntensityModel {
        match self {
            DiffusionKind::General(m) | DiffusionKind::Limit(m) => m,
        }
    }

    /// `σ(x)`.
    #[inline]
    pub fn sigma(&self, x: &[f64]) -> f64 {
        match self {
            DiffusionKind::General(m) => m.intensity(x).sqrt(),
            DiffusionKind::Limit(m) => {
                if on_boundary(x) {
                    1.0
                } else {
                    m.limit_intensity(x).sqrt()
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdeConfig {
    pub grid: TimeGrid,
    pub kind: DiffusionKind,
}

impl SdeConfig {
    pub fn new(step: f64, horizon: f64, kind: DiffusionKind) -> Result<Self> {
        Ok(Self {
            grid: TimeGrid::new(step, horizon)?,
            kind,
        })
    }

    pub fn dimension(&self) -> usize {
        self.kind.model().dimension()
    }
}

/// `Y_{k+1} = Y_k + σ(Y_k) ΔB_k`, where `ΔB_k` are the increments of the
/// Wiener path with the given provenance on the same grid.
pub fn euler_maruyama(config: &SdeConfig, start: &[f64], provenance: Provenance) -> Result<SampledPath> {
    let d = config.dimension();
    if start.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: start.len(),
        });
    }
    let driver = crate::path::sample_wiener(d, config.grid, provenance)?;
    let mut values = Vec::with_capacity(driver.values().len());
    values.extend_from_slice(start);
    for k in 0..config.grid.steps() {
        let (a, b) = (driver.point(k), driver.point(k + 1));
        let y = &values[k * d..(k + 1) * d];
        let sigma = config.kind.sigma(y);
        let next: Vec<f64> = (0..d).map(|i| y[i] + sigma * (b[i] - a[i])).collect();
        values.extend_from_slice(&next);
    }
    SampledPath::from_values(d, config.grid, values, provenance)
}

/// `λ(x√n)` against its pointwise limit at one test point.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorGap {
    pub point: Vec<f64>,
    /// Coefficient of `Δ` in the generator of `B_{τ_{nt}}/√n` at `x`.
    pub scaled: f64,
    /// `Σ_α λ_α 1_{Δ_α}(x)`.
    pub limit: f64,
    pub gap: f64,
}

/// Compares the generator coefficient `λ(x√n)` of the rescaled process with
/// its octant limit at each test point off the bounding hyperplanes. Points on
/// a hyperplane are skipped.
pub fn scaled_generator_check(
    model: &IntensityModel,
    n: f64,
    test_points: &[Vec<f64>],
) -> Result<Vec<GeneratorGap>> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Config(format!("scale n must be >= 1, got {n}")));
    }
    let root = n.sqrt();
    test_points
        .iter()
        .filter(|x| !on_boundary(x))
        .map(|x| {
            let scaled_x: Vec<f64> = x.iter().map(|v| v * root).collect();
            let scaled = model.intensity_at(&scaled_x)?;
            let limit = model.limit_intensity(x);
            Ok(GeneratorGap {
                point: x.clone(),
                scaled,
                limit,
                gap: (scaled - limit).abs(),
            })
        })
        .collect()
}
