//! Euler–Maruyama for the limit equation against the time-change construction.

use serde::{Deserialize, Serialize};

use super::{tag, threshold, Context, ExperimentReport};
use crate::clock::limit_process;
use crate::error::{Error, Result};
use crate::path::{sample_wiener, Provenance, TimeGrid};
use crate::sde::{euler_maruyama, DiffusionKind, SdeConfig};
use crate::stats::{ks_standard_error, ks_two_sample, EmpiricalDistribution, TestReport};

const STREAM_EM: u64 = 3;
const STREAM_LIMIT: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeCrosscheckConfig {
    #[serde(default = "default_eval_times")]
    pub eval_times: Vec<f64>,
    /// Bound on every per-coordinate KS distance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

fn default_eval_times() -> Vec<f64> {
    vec![0.5, 1.0]
}

impl Default for SdeCrosscheckConfig {
    fn default() -> Self {
        Self {
            eval_times: default_eval_times(),
            threshold: None,
        }
    }
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.sde_crosscheck.clone().unwrap_or_default();
    let model = &ctx.model;
    if !model.is_octant_constant() {
        return Err(Error::Refused("the limit equation needs an octant-constant intensity (constant profile)".into()));
    }
    let times = &cfg.eval_times;
    if times.is_empty()
        || times.iter().any(|t| !(*t >= 0.0 && t.is_finite()))
        || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::Config("sde_crosscheck.eval_times must be increasing and >= 0".into()));
    }
    let d = model.dimension();
    let step = ctx.config.grid.step_or(1e-3)?;
    let budget = ctx.config.grid.clock_settings().extension_budget;
    let t_max = times.last().unwrap().max(step);
    let sde = SdeConfig::new(step, t_max, DiffusionKind::Limit(model.clone()))?;
    let w_horizon = ctx.config.grid.initial_horizon.unwrap_or(t_max * model.max_limit()).max(step);
    let seed = ctx.seed();
    let origin = vec![0.0; d];

    let em = ctx.par_map(ctx.paths(), |i| {
        let y = euler_maruyama(&sde, &origin, Provenance::new(seed, STREAM_EM, i as u64))?;
        Ok(times.iter().map(|&t| y.interpolate(t)).collect::<Vec<_>>())
    })?;
    let limit = ctx.par_map(ctx.paths(), |i| {
        let w = sample_wiener(d, TimeGrid::new(step, w_horizon)?, Provenance::new(seed, STREAM_LIMIT, i as u64))?;
        Ok(limit_process(w, model, times, budget)?.values)
    })?;

    let paths = ctx.paths();
    let mut worst: f64 = 0.0;
    let mut headers = Vec::new();
    let mut em_cols = Vec::new();
    let mut limit_cols = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        for i in 0..d {
            let a: Vec<f64> = em.iter().map(|r| r[k][i]).collect();
            let b: Vec<f64> = limit.iter().map(|r| r[k][i]).collect();
            let r = ks_two_sample(&EmpiricalDistribution::new(a.clone())?, &EmpiricalDistribution::new(b.clone())?)
                .renamed(format!("ks_t{}_x{}", tag(t), i + 1));
            worst = worst.max(r.value);
            report.push(r);
            headers.push(format!("t{}_x{}", tag(t), i + 1));
            em_cols.push(a);
            limit_cols.push(b);
        }
    }
    let default = if model.uniform_value().is_some() { 0.02 } else { 0.05 };
    let (bound, overridden) = threshold(cfg.threshold, default);
    report.push(
        TestReport::diagnostic("ks_max", worst, vec![paths, paths])
            .with_se(ks_standard_error(paths, Some(paths)))
            .below(bound)
            .flag_override(overridden),
    );
    let h: Vec<&str> = headers.iter().map(String::as_str).collect();
    let c: Vec<&[f64]> = em_cols.iter().map(Vec::as_slice).collect();
    report.columns_csv("samples_em.csv", &h, &c)?;
    let c: Vec<&[f64]> = limit_cols.iter().map(Vec::as_slice).collect();
    report.columns_csv("samples_limit.csv", &h, &c)
}
