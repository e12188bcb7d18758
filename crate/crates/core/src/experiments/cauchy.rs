//! Monte Carlo solution of `∂_t u = ½ λ(x) Δu`, `u(0, ·) = f`, via
//! `u(t, x) = E f(x + B_{τ_t})` with `τ` the inverse of `∫ ds / λ(x + B_s)`.

use serde::{Deserialize, Serialize};

use super::{tag, threshold, Context, ExperimentReport};
use crate::clock::normalized_process;
use crate::error::{Error, Result};
use crate::path::{sample_wiener, Provenance, TimeGrid};
use crate::stats::{mc_mean, TestReport};

const STREAM_CAUCHY: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payoff {
    /// `f(x) = x_i` for the configured coordinate.
    Coordinate,
    /// `f(x) = ‖x‖²`.
    #[default]
    SquaredNorm,
    /// `f(x) = exp(−‖x‖²/2)`.
    GaussianBump,
}

impl Payoff {
    pub fn eval(self, x: &[f64], coordinate: usize) -> f64 {
        let r2 = || x.iter().map(|v| v * v).sum::<f64>();
        match self {
            Payoff::Coordinate => x[coordinate],
            Payoff::SquaredNorm => r2(),
            Payoff::GaussianBump => (-0.5 * r2()).exp(),
        }
    }

    /// `u(t, x)` for `λ ≡ c`, where `X_t = x + √c W_t`.
    pub fn exact_uniform(self, x: &[f64], coordinate: usize, c: f64, t: f64) -> f64 {
        let d = x.len() as f64;
        let r2 = x.iter().map(|v| v * v).sum::<f64>();
        let s2 = c * t;
        match self {
            Payoff::Coordinate => x[coordinate],
            Payoff::SquaredNorm => r2 + d * s2,
            Payoff::GaussianBump => (1.0 + s2).powf(-0.5 * d) * (-0.5 * r2 / (1.0 + s2)).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CauchyConfig {
    #[serde(default)]
    pub payoff: Payoff,
    /// 1-based coordinate for the `coordinate` payoff.
    #[serde(default = "default_coordinate")]
    pub coordinate: usize,
    /// Unset: the origin only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub start_points: Vec<Vec<f64>>,
    #[serde(default = "default_eval_times")]
    pub eval_times: Vec<f64>,
    /// Allowed distance from the exact solution (when known), in standard errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_factor: Option<f64>,
}

fn default_coordinate() -> usize {
    1
}

fn default_eval_times() -> Vec<f64> {
    vec![1.0]
}

impl Default for CauchyConfig {
    fn default() -> Self {
        Self {
            payoff: Payoff::default(),
            coordinate: default_coordinate(),
            start_points: Vec::new(),
            eval_times: default_eval_times(),
            se_factor: None,
        }
    }
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.cauchy_mc.clone().unwrap_or_default();
    let model = &ctx.model;
    let d = model.dimension();
    if cfg.coordinate == 0 || cfg.coordinate > d {
        return Err(Error::Config(format!("cauchy_mc.coordinate must be in 1..={d}")));
    }
    let coord = cfg.coordinate - 1;
    let starts = if cfg.start_points.is_empty() {
        vec![vec![0.0; d]]
    } else {
        cfg.start_points.clone()
    };
    if starts.iter().any(|x| x.len() != d || x.iter().any(|v| !v.is_finite())) {
        return Err(Error::Config(format!("cauchy_mc.start_points must be finite points of length {d}")));
    }
    let times = &cfg.eval_times;
    if times.is_empty()
        || times.iter().any(|t| !(*t >= 0.0 && t.is_finite()))
        || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Config("cauchy_mc.eval_times must be increasing and >= 0".into()));
    }
    let step = ctx.config.grid.step_or(0.01)?;
    let settings = ctx.config.grid.clock_settings();
    let t_max = *times.last().unwrap();
    let c_hi = model.bounded_above().unwrap_or(1.0);
    let horizon = ctx.config.grid.initial_horizon.unwrap_or(1.05 * c_hi * t_max).max(step);
    let seed = ctx.seed();

    // One independent stream per start point.
    let rows = ctx.par_map(ctx.paths(), |i| {
        starts
            .iter()
            .enumerate()
            .map(|(j, x)| {
                let prov = Provenance::new(seed, STREAM_CAUCHY | (j as u64) << 32, i as u64);
                let path = sample_wiener(d, TimeGrid::new(step, horizon)?, prov)?;
                let s = normalized_process(path.translated(x)?, model, 1.0, times, settings)?;
                Ok(s.values.iter().map(|y| cfg.payoff.eval(y, coord)).collect::<Vec<f64>>())
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let paths = ctx.paths();
    let (factor, overridden) = threshold(cfg.se_factor, 3.0);
    let uniform = model.uniform_value();
    let mut csv = String::new();
    for i in 0..d {
        csv.push_str(&format!("x{},", i + 1));
    }
    csv.push_str("t,estimate,standard_error,exact\n");
    for (j, x) in starts.iter().enumerate() {
        for (k, &t) in times.iter().enumerate() {
            let fs: Vec<f64> = rows.iter().map(|r| r[j][k]).collect();
            let (mean, se) = mc_mean(&fs)?;
            let name = format!("u_x{}_t{}", j + 1, tag(t));
            report.push(TestReport::diagnostic(name.clone(), mean, vec![paths]).with_se(se));
            let exact = uniform.map(|c| cfg.payoff.exact_uniform(x, coord, c, t));
            if let Some(exact) = exact {
                let dev = (mean - exact).abs();
                let ok = if se > 0.0 { dev <= factor * se } else { dev <= 1e-12 * (1.0 + exact.abs()) };
                report.push(
                    TestReport::diagnostic(format!("{name}_error"), dev, vec![paths])
                        .with_se(se)
                        .judged(Some(factor * se), ok)
                        .flag_override(overridden),
                );
            }
            for v in x {
                csv.push_str(&format!("{v},"));
            }
            csv.push_str(&format!(
                "{t},{mean},{se},{}\n",
                exact.map_or(String::new(), |e| e.to_string())
            ));
        }
    }
    report.artifact("estimates.csv", csv);
    Ok(())
}
