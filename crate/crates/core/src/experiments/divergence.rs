//! Growth of the additive functional `S_B(t)`.

use serde::{Deserialize, Serialize};

use super::{positive_all, tag, threshold, Context, ExperimentReport};
use crate::clock::additive_functional;
use crate::error::{Error, Result};
use crate::path::{sample_wiener, Provenance, TimeGrid};
use crate::stats::{mc_mean, proportion_se, TestReport};

const STREAM_DIVERGENCE: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivergenceConfig {
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    /// Exceedance level `M` in `P(S_B(t) > M)`.
    #[serde(default = "default_level")]
    pub level: f64,
    /// Lower bound on the exceedance fraction at the largest `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceedance_threshold: Option<f64>,
}

fn default_t_values() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}

fn default_level() -> f64 {
    10.0
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        Self {
            t_values: default_t_values(),
            level: default_level(),
            exceedance_threshold: None,
        }
    }
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.divergence.clone().unwrap_or_default();
    positive_all("divergence.t_values", &cfg.t_values)?;
    positive_all("divergence.level", &[cfg.level])?;
    if cfg.t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("divergence.t_values must be increasing".into()));
    }
    let a = ctx.model.validate_assumptions();
    ctx.require(
        a.local_integrability.holds() && a.bounded_at_infinity.holds(),
        "1/λ must be locally integrable and λ bounded at infinity",
        report,
    )?;

    let model = &ctx.model;
    let step = ctx.config.grid.step_or(1.0)?;
    let cap = ctx.config.grid.clock_settings().cap;
    let t_max = *cfg.t_values.last().unwrap();
    let grid = TimeGrid::new(step, t_max)?;
    let seed = ctx.seed();
    let rows = ctx.par_map(ctx.paths(), |i| {
        let path = sample_wiener(model.dimension(), grid, Provenance::new(seed, STREAM_DIVERGENCE, i as u64))?;
        let s = additive_functional(&path, model, cap)?;
        Ok(cfg.t_values.iter().map(|&t| s.value_at(t)).collect::<Vec<f64>>())
    })?;

    let paths = ctx.paths();
    let mut means = Vec::new();
    let mut fractions = Vec::new();
    let mut columns = Vec::new();
    for (k, &t) in cfg.t_values.iter().enumerate() {
        let xs: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        let (mean, se) = mc_mean(&xs)?;
        report.push(TestReport::diagnostic(format!("mean_S_t{}", tag(t)), mean, vec![paths]).with_se(se));
        let p = xs.iter().filter(|&&s| s > cfg.level).count() as f64 / paths as f64;
        report.push(
            TestReport::diagnostic(format!("exceedance_t{}", tag(t)), p, vec![paths]).with_se(proportion_se(p, paths)),
        );
        means.push(mean);
        fractions.push(p);
        columns.push((format!("S_t{}", tag(t)), xs));
    }
    let min_gain = means.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if means.len() > 1 {
        report.push(
            TestReport::diagnostic("mean_strictly_increasing", min_gain, vec![paths]).judged(Some(0.0), min_gain > 0.0),
        );
        let min_step = fractions.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        report.push(
            TestReport::diagnostic("exceedance_nondecreasing", min_step, vec![paths])
                .judged(Some(0.0), min_step >= 0.0),
        );
    }
    let (bound, overridden) = threshold(cfg.exceedance_threshold, 0.99);
    let p = *fractions.last().unwrap();
    report.push(
        TestReport::diagnostic("exceedance_at_largest_t", p, vec![paths])
            .with_se(proportion_se(p, paths))
            .at_least(bound)
            .flag_override(overridden),
    );

    let headers: Vec<&str> = columns.iter().map(|c| c.0.as_str()).collect();
    let cols: Vec<&[f64]> = columns.iter().map(|c| c.1.as_slice()).collect();
    report.columns_csv("samples_S.csv", &headers, &cols)
}
