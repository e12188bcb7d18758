//! Time-changed multidimensional Wiener processes.
//!
//! The building blocks, bottom up:
//!
//! * [`geometry`]: octants of `R^d` and intensity models `λ` with octant limits `λ_α`.
//! * [`path`] and [`rng`]: reproducible Wiener paths on uniform grids.
//! * [`clock`]: the additive functional `S_B(t) = ∫ ds/λ(B_s)`, its inverse
//!   `τ`, the rescaled processes `B_{τ_{nt}}/√n`, and the octant-skew limit
//!   `W(ν⁻¹(t))`.
//! * [`sde`]: Euler–Maruyama solutions of `dY = √λ(Y) dB̃`.
//! * [`stats`]: empirical distributions and Kolmogorov–Smirnov statistics.
//! * [`experiments`]: declarative Monte Carlo experiments and the `tcw` CLI.
//!
//! The base process is a standard Wiener process (generator `½Δ`), so the
//! time-changed process has generator `½λ(x)Δ`.

pub mod cli;
pub mod clock;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod path;
pub mod rng;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
