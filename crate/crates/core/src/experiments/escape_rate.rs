//! Escape of `d ≥ 3` Brownian motion beyond `T^{1/2 − 1/d}`.

use serde::{Deserialize, Serialize};

use super::{positive_all, tag, threshold, Context, ExperimentReport};
use crate::error::{Error, Result};
use crate::path::{sample_wiener, Provenance, TimeGrid};
use crate::stats::{chi_cdf, proportion_se, TestReport};

const STREAM_ESCAPE: u64 = 7;

/// `P(‖B_T‖ > T^{1/2 − 1/d})`. Since `‖B_T‖/√T` is chi(d), this is
/// `1 − F_chi(d)(T^{−1/d})`.
pub fn escape_probability(d: usize, t: f64) -> f64 {
    1.0 - chi_cdf(t.powf(-1.0 / d as f64), d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EscapeRateConfig {
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    /// Required endpoint fraction at the largest `T`. Unset: the chi-law probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    /// Allowed shortfall below the level, in standard errors of a proportion.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se_factor: Option<f64>,
}

fn default_t_values() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}

impl Default for EscapeRateConfig {
    fn default() -> Self {
        Self {
            t_values: default_t_values(),
            level: None,
            se_factor: None,
        }
    }
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.escape_rate.clone().unwrap_or_default();
    let d = ctx.model.dimension();
    if d < 3 {
        return Err(Error::Refused(format!(
            "escape beyond T^(1/2-1/d) needs d >= 3 (got d = {d}); in the plane the rate fails"
        )));
    }
    positive_all("escape_rate.t_values", &cfg.t_values)?;
    if cfg.t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("escape_rate.t_values must be increasing".into()));
    }
    let step = ctx.config.grid.step_or(1.0)?;
    let t_max = *cfg.t_values.last().unwrap();
    let grid = TimeGrid::new(step, t_max)?;
    let exponent = 0.5 - 1.0 / d as f64;
    let seed = ctx.seed();
    let rows = ctx.par_map(ctx.paths(), |i| {
        let path = sample_wiener(d, grid, Provenance::new(seed, STREAM_ESCAPE, i as u64))?;
        let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(cfg
            .t_values
            .iter()
            .map(|&t| {
                let end = norm(&path.interpolate(t));
                let first = (0.5 * t / step).ceil() as usize;
                let last = ((t / step).floor() as usize).min(grid.steps());
                let violated = (first.max(1)..=last).any(|k| norm(path.point(k)) <= grid.time(k).powf(exponent));
                (end, violated)
            })
            .collect::<Vec<_>>())
    })?;

    let paths = ctx.paths();
    let mut fractions = Vec::new();
    let mut columns = Vec::new();
    for (k, &t) in cfg.t_values.iter().enumerate() {
        let radius = t.powf(exponent);
        let p = rows.iter().filter(|r| r[k].0 > radius).count() as f64 / paths as f64;
        let w = rows.iter().filter(|r| r[k].1).count() as f64 / paths as f64;
        report.push(
            TestReport::diagnostic(format!("endpoint_fraction_T{}", tag(t)), p, vec![paths]).with_se(proportion_se(p, paths)),
        );
        report.push(TestReport::diagnostic(format!("oracle_probability_T{}", tag(t)), escape_probability(d, t), vec![]));
        report.push(
            TestReport::diagnostic(format!("window_violation_T{}", tag(t)), w, vec![paths]).with_se(proportion_se(w, paths)),
        );
        fractions.push(p);
        columns.push((format!("norm_T{}", tag(t)), rows.iter().map(|r| r[k].0).collect::<Vec<f64>>()));
    }

    let (level, level_overridden) = threshold(cfg.level, escape_probability(d, t_max));
    let (factor, factor_overridden) = threshold(cfg.se_factor, 3.0);
    let bound = level - factor * proportion_se(level, paths);
    let p = *fractions.last().unwrap();
    report.push(
        TestReport::diagnostic("endpoint_fraction_at_largest_T", p, vec![paths])
            .with_se(proportion_se(level, paths))
            .at_least(bound)
            .flag_override(level_overridden || factor_overridden),
    );
    if fractions.len() > 1 {
        // Nondecreasing in T within 2 standard errors of a difference.
        let worst = fractions
            .windows(2)
            .map(|w| {
                let se = (proportion_se(w[0], paths).powi(2) + proportion_se(w[1], paths).powi(2)).sqrt();
                (w[0] - w[1]) - 2.0 * se
            })
            .fold(f64::NEG_INFINITY, f64::max);
        report.push(TestReport::diagnostic("endpoint_fraction_monotone_in_T", worst, vec![paths]).judged(Some(0.0), worst <= 0.0));
    }

    let headers: Vec<&str> = columns.iter().map(|c| c.0.as_str()).collect();
    let cols: Vec<&[f64]> = columns.iter().map(|c| c.1.as_slice()).collect();
    report.columns_csv("samples_norm.csv", &headers, &cols)
}
