//! `E[τ_t] ≤ C·t` for intensities bounded by `C`.

use serde::{Deserialize, Serialize};

use super::{positive_all, tag, threshold, Context, ExperimentReport};
use crate::clock::normalized_process;
use crate::error::{Error, Result};
use crate::path::{sample_wiener, Provenance, TimeGrid};
use crate::stats::{mc_mean, TestReport};

const STREAM_TAU: u64 = 6;

/// Relative tolerance for `τ_t = C·t` when `λ ≡ C`.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauMomentConfig {
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    /// Allowed excess over `C·t`, in standard errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_factor: Option<f64>,
}

fn default_t_values() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}

impl Default for TauMomentConfig {
    fn default() -> Self {
        Self {
            t_values: default_t_values(),
            se_factor: None,
        }
    }
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.tau_moment.clone().unwrap_or_default();
    positive_all("tau_moment.t_values", &cfg.t_values)?;
    if cfg.t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("tau_moment.t_values must be increasing".into()));
    }
    let model = &ctx.model;
    let c = model
        .bounded_above()
        .ok_or_else(|| Error::Refused("the moment bound needs λ bounded above".into()))?;
    let step = ctx.config.grid.step_or(0.01)?;
    let settings = ctx.config.grid.clock_settings();
    let t_max = *cfg.t_values.last().unwrap();
    let horizon = ctx.config.grid.initial_horizon.unwrap_or(1.05 * c * t_max).max(step);
    let seed = ctx.seed();
    let rows = ctx.par_map(ctx.paths(), |i| {
        let path = sample_wiener(
            model.dimension(),
            TimeGrid::new(step, horizon)?,
            Provenance::new(seed, STREAM_TAU, i as u64),
        )?;
        Ok(normalized_process(path, model, 1.0, &cfg.t_values, settings)?.nu)
    })?;

    let paths = ctx.paths();
    let (factor, overridden) = threshold(cfg.se_factor, 3.0);
    let mut columns = Vec::new();
    for (k, &t) in cfg.t_values.iter().enumerate() {
        let taus: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        let (mean, se) = mc_mean(&taus)?;
        let bound = c * t + factor * se;
        report.push(
            TestReport::diagnostic(format!("tau_mean_t{}", tag(t)), mean, vec![paths])
                .with_se(se)
                .judged(Some(bound), mean <= bound)
                .flag_override(overridden),
        );
        if model.uniform_value().is_some() {
            let worst = taus.iter().map(|&x| (x - c * t).abs() / (c * t)).fold(0.0, f64::max);
            report.push(
                TestReport::diagnostic(format!("tau_exact_rel_error_t{}", tag(t)), worst, vec![paths])
                    .judged(Some(EXACT_TOLERANCE), worst <= EXACT_TOLERANCE),
            );
        }
        columns.push((format!("tau_t{}", tag(t)), taus));
    }
    let headers: Vec<&str> = columns.iter().map(|c| c.0.as_str()).collect();
    let cols: Vec<&[f64]> = columns.iter().map(|c| c.1.as_slice()).collect();
    report.columns_csv("samples_tau.csv", &headers, &cols)
}
