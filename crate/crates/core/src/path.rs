//! Seeded Wiener paths on uniform grids.
//!
//! A path with provenance `(key, refinement)` has its increment over grid
//! interval `k` drawn from unit `k` of the counter stream `key` (see
//! [`crate::rng`]). Extending a path only appends units, so a path sampled
//! directly on a long horizon and one reached by any sequence of extensions
//! agree at every shared time.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::StreamKey;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    step: f64,
    steps: usize,
}

impl TimeGrid {
    /// Uniform grid `0, step, 2·step, …` covering `[0, horizon]`.
    ///
    /// When `horizon` is not a multiple of `step` the last point is the first
    /// grid time at or beyond it.
    pub fn new(step: f64, horizon: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Config(format!("step must be positive, got {step}")));
        }
        if !(horizon >= step && horizon.is_finite()) {
            return Err(Error::Config(format!(
                "horizon {horizon} must be finite and at least one step ({step})"
            )));
        }
        let steps = (horizon / step * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(Self { step, steps })
    }

    pub fn with_steps(step: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Config("grid needs at least one step".into()));
        }
        Self::new(step, step)?;
        Ok(Self { step, steps })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of intervals; the grid has `steps + 1` points.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.step
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |k| self.time(k))
    }
}

/// Where a path's randomness comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub key: StreamKey,
    pub extension_count: u32,
    /// Number of bridge refinements applied.
    pub refinement: u32,
}

impl Provenance {
    pub fn new(master_seed: u64, stream: u64, path_index: u64) -> Self {
        Self {
            key: StreamKey::new(master_seed, stream, path_index),
            extension_count: 0,
            refinement: 0,
        }
    }

    fn increment_tag(&self) -> u64 {
        2 * self.refinement as u64
    }

    fn bridge_tag(&self, factor: usize) -> u64 {
        (2 * self.refinement as u64 + 1) | (factor as u64) << 12
    }
}

/// A continuous `R^d`-valued path, linear between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    dimension: usize,
    grid: TimeGrid,
    /// Row-major, `dimension` values per grid point.
    values: Vec<f64>,
    provenance: Provenance,
}

impl SampledPath {
    /// Wraps explicit values, e.g. a hand-built test path or an SDE solution.
    pub fn from_values(
        dimension: usize,
        grid: TimeGrid,
        values: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        if values.len() != grid.len() * dimension {
            return Err(Error::Config(format!(
                "expected {} values for {} grid points in dimension {dimension}, got {}",
                grid.len() * dimension,
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            dimension,
            grid,
            values,
            provenance,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.values[k * self.dimension..(k + 1) * self.dimension]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dimension)
    }

    /// Linear interpolation at time `t`, clamped to `[0, horizon]`.
    pub fn interpolate_into(&self, t: f64, out: &mut [f64]) {
        let h = self.grid.step;
        let last = self.grid.steps;
        let s = (t / h).max(0.0);
        let k = (s.floor() as usize).min(last);
        if k == last {
            out.copy_from_slice(self.point(last));
            return;
        }
        let w = s - k as f64;
        let (a, b) = (self.point(k), self.point(k + 1));
        for i in 0..self.dimension {
            out[i] = a[i] + w * (b[i] - a[i]);
        }
    }

    pub fn interpolate(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.interpolate_into(t, &mut out);
        out
    }

    /// The path shifted so it starts at `start`.
    pub fn translated(&self, start: &[f64]) -> Result<Self> {
        if start.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: start.len(),
            });
        }
        let mut values = self.values.clone();
        for p in values.chunks_exact_mut(self.dimension) {
            for (v, s) in p.iter_mut().zip(start) {
                *v += s;
            }
        }
        Ok(Self {
            values,
            ..self.clone()
        })
    }

    /// Keeps every `factor`-th grid point.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        if factor == 0 || self.grid.steps % factor != 0 {
            return Err(Error::Config(format!(
                "cannot coarsen {} steps by {factor}",
                self.grid.steps
            )));
        }
        let grid = TimeGrid::with_steps(self.grid.step * factor as f64, self.grid.steps / factor)?;
        let values = (0..grid.len())
            .flat_map(|k| self.point(k * factor).iter().copied())
            .collect();
        Ok(Self {
            dimension: self.dimension,
            grid,
            values,
            provenance: self.provenance,
        })
    }

    /// The initial segment up to grid index `steps`.
    pub fn truncated(&self, steps: usize) -> Result<Self> {
        if steps == 0 || steps > self.grid.steps {
            return Err(Error::Config(format!(
                "cannot truncate {} steps to {steps}",
                self.grid.steps
            )));
        }
        Ok(Self {
            dimension: self.dimension,
            grid: TimeGrid::with_steps(self.grid.step, steps)?,
            values: self.values[..(steps + 1) * self.dimension].to_vec(),
            provenance: self.provenance,
        })
    }

    /// See [`refine_bridge`].
    pub fn refine_bridge(&self, factor: usize) -> Result<Self> {
        refine_bridge(self, factor)
    }

    /// See [`extend_path`].
    pub fn extend(self, new_horizon: f64) -> Result<Self> {
        extend_path(self, new_horizon)
    }

    /// Doubles the horizon.
    pub fn extend_doubling(self) -> Result<Self> {
        let h = self.grid.horizon();
        extend_path(self, 2.0 * h)
    }

    fn append_increments(&mut self, new_steps: usize) {
        let d = self.dimension;
        let first = self.grid.steps;
        let mut z = Vec::with_capacity(new_steps * d);
        self.provenance.key.unit_normals(
            self.provenance.increment_tag(),
            first as u64,
            new_steps as u64,
            d,
            &mut z,
        );
        let sd = self.grid.step.sqrt();
        self.values.reserve(new_steps * d);
        for (j, inc) in z.chunks_exact(d).enumerate() {
            let base = (first + j) * d;
            for i in 0..d {
                let v = self.values[base + i] + sd * inc[i];
                self.values.push(v);
            }
        }
        self.grid.steps += new_steps;
    }
}

/// Standard `d`-dimensional Wiener path from the origin on `grid`.
pub fn sample_wiener(dimension: usize, grid: TimeGrid, provenance: Provenance) -> Result<SampledPath> {
    if dimension == 0 {
        return Err(Error::Config("dimension must be >= 1".into()));
    }
    let mut path = SampledPath {
        dimension,
        grid: TimeGrid {
            step: grid.step,
            steps: 0,
        },
        values: vec![0.0; dimension],
        provenance,
    };
    path.append_increments(grid.steps);
    Ok(path)
}

/// Refines the grid by `factor`, filling each interval with a Brownian bridge
/// pinned at the existing grid values.
pub fn refine_bridge(path: &SampledPath, factor: usize) -> Result<SampledPath> {
    if !(2..4096).contains(&factor) {
        return Err(Error::Config(format!(
            "refinement factor must be in 2..4096, got {factor}"
        )));
    }
    let d = path.dimension;
    let steps = path.grid.steps;
    let h = path.grid.step;
    let dt = h / factor as f64;
    let mut z = Vec::with_capacity(steps * (factor - 1) * d);
    path.provenance.key.unit_normals(
        path.provenance.bridge_tag(factor),
        0,
        steps as u64,
        (factor - 1) * d,
        &mut z,
    );
    let mut values = Vec::with_capacity((steps * factor + 1) * d);
    let mut cur = vec![0.0; d];
    for k in 0..steps {
        let a = path.point(k);
        let b = path.point(k + 1);
        values.extend_from_slice(a);
        cur.copy_from_slice(a);
        let zk = &z[k * (factor - 1) * d..(k + 1) * (factor - 1) * d];
        for j in 1..factor {
            // Bridge from (s_{j-1}, cur) to (h, b): next point at s_j.
            let remaining = h - (j - 1) as f64 * dt;
            let w = dt / remaining;
            let sd = (dt * (remaining - dt) / remaining).sqrt();
            for i in 0..d {
                cur[i] += w * (b[i] - cur[i]) + sd * zk[(j - 1) * d + i];
            }
            values.extend_from_slice(&cur);
        }
    }
    values.extend_from_slice(path.point(steps));
    let mut provenance = path.provenance;
    provenance.refinement += 1;
    Ok(SampledPath {
        dimension: d,
        grid: TimeGrid::with_steps(dt, steps * factor)?,
        values,
        provenance,
    })
}

/// Continues the path with fresh increments up to `new_horizon`.
pub fn extend_path(mut path: SampledPath, new_horizon: f64) -> Result<SampledPath> {
    if !(new_horizon > path.grid.horizon()) || !new_horizon.is_finite() {
        return Err(Error::Config(format!(
            "new horizon {new_horizon} must exceed current horizon {}",
            path.grid.horizon()
        )));
    }
    let target = TimeGrid::new(path.grid.step, new_horizon)?;
    let extra = target.steps - path.grid.steps;
    path.append_increments(extra);
    path.provenance.extension_count += 1;
    Ok(path)
}
