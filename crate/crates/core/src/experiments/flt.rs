//! Rescaled processes `B_{τ_{nt}}/√n` against the octant-skew limit `W(ν⁻¹(t))`.
//!
//! The grid step is given in rescaled time: the Brownian path behind scale `n`
//! is sampled with step `n · step`, so every `n` costs the same and the limit
//! process uses the same step.

use serde::{Deserialize, Serialize};

use super::{positive_all, tag, threshold, Context, ExperimentReport};
use crate::clock::{limit_process, normalized_process};
use crate::error::{Error, Result};
use crate::geometry::IntensityModel;
use crate::path::{sample_wiener, Provenance, SampledPath, TimeGrid};
use crate::stats::{ks_standard_error, ks_two_sample, mc_mean, EmpiricalDistribution, TestReport};

const STREAM_LIMIT: u64 = 1;

/// Which limit theorem the run relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Separated,
    Radial,
    Diagonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FltConfig {
    #[serde(default = "default_n_values")]
    pub n_values: Vec<f64>,
    #[serde(default = "default_eval_times")]
    pub eval_times: Vec<f64>,
    /// Unset: any applicable theorem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<Theorem>,
    /// Bound on the largest per-coordinate KS distance at the largest `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Allowed increase of the KS distance between consecutive `n`, in
    /// standard errors of a KS difference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone_slack_se: Option<f64>,
    /// Repeat the largest `n` on bridge-refined paths with half the step.
    #[serde(default)]
    pub step_halving: bool,
    /// Window lengths for the modulus-of-continuity diagnostic of `B_{nt}/√n`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulus_h: Vec<f64>,
}

fn default_n_values() -> Vec<f64> {
    vec![1.0, 10.0, 100.0]
}

fn default_eval_times() -> Vec<f64> {
    vec![1.0]
}

impl Default for FltConfig {
    fn default() -> Self {
        Self {
            n_values: default_n_values(),
            eval_times: default_eval_times(),
            theorem: None,
            threshold: None,
            monotone_slack_se: None,
            step_halving: false,
            modulus_h: Vec::new(),
        }
    }
}

/// Default bound on the KS distance at the largest `n`.
pub(crate) fn default_threshold(model: &IntensityModel) -> f64 {
    if model.uniform_value().is_some() {
        0.02
    } else if model.is_octant_constant() {
        0.05
    } else {
        0.07
    }
}

/// Marginals of one path at each evaluation time: the point and the clock.
struct Marginals {
    points: Vec<Vec<f64>>,
    clock: Vec<f64>,
}

struct ScaledRun {
    main: Marginals,
    half_step: Option<Marginals>,
    /// Oscillation of `B_{nt}/√n` per modulus window.
    modulus: Vec<f64>,
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.flt.clone().unwrap_or_default();
    let model = &ctx.model;
    let d = model.dimension();
    positive_all("flt.eval_times", &cfg.eval_times)?;
    positive_all("flt.n_values", &cfg.n_values)?;
    if cfg.n_values.iter().any(|&n| n < 1.0) || cfg.n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("flt.n_values must be increasing and >= 1".into()));
    }
    if cfg.eval_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("flt.eval_times must be increasing".into()));
    }
    if !cfg.modulus_h.is_empty() {
        positive_all("flt.modulus_h", &cfg.modulus_h)?;
    }

    let assumptions = model.validate_assumptions();
    let (applicable, what) = match cfg.theorem {
        None => (assumptions.any_limit_theorem(), "model satisfies no limit theorem's assumptions"),
        Some(Theorem::Separated) => (assumptions.separated_theorem, "model fails the separated-intensity assumptions"),
        Some(Theorem::Radial) => (assumptions.radial_theorem, "model fails the radial-limit assumptions"),
        Some(Theorem::Diagonal) => (assumptions.diagonal_theorem, "model fails the diagonal-limit assumptions"),
    };
    ctx.require(applicable, what, report)?;

    let step = ctx.config.grid.step_or(0.01)?;
    let settings = ctx.config.grid.clock_settings();
    let times = &cfg.eval_times;
    let t_max = *times.last().unwrap();
    let horizon = ctx
        .config
        .grid
        .initial_horizon
        .unwrap_or(t_max * model.bounded_above().unwrap_or(1.0).max(1.0))
        .max(step);
    let seed = ctx.seed();
    let paths = ctx.paths();

    let limit: Vec<Marginals> = ctx.par_map(paths, |i| {
        let w = sample_wiener(d, TimeGrid::new(step, horizon)?, Provenance::new(seed, STREAM_LIMIT, i as u64))?;
        let s = limit_process(w, model, times, settings.extension_budget)?;
        Ok(Marginals {
            points: s.values,
            clock: s.nu_inverse,
        })
    })?;

    let n_max = *cfg.n_values.last().unwrap();
    let mut scaled: Vec<(f64, Vec<ScaledRun>)> = Vec::new();
    for &n in &cfg.n_values {
        let halve = cfg.step_halving && n == n_max;
        let runs = ctx.par_map(paths, |i| {
            let grid = TimeGrid::new(step * n, horizon * n)?;
            let path = sample_wiener(d, grid, Provenance::new(seed, n.to_bits(), i as u64))?;
            let s = normalized_process(path, model, n, times, settings)?;
            let modulus = cfg
                .modulus_h
                .iter()
                .map(|&h| oscillation(&s.path, n, t_max, h))
                .collect();
            let half_step = if halve {
                let fine = s.path.refine_bridge(2)?;
                let f = normalized_process(fine, model, n, times, settings)?;
                Some(Marginals {
                    points: f.values,
                    clock: f.nu,
                })
            } else {
                None
            };
            Ok(ScaledRun {
                main: Marginals {
                    points: s.values,
                    clock: s.nu,
                },
                half_step,
                modulus,
            })
        })?;
        scaled.push((n, runs));
    }

    // Limit marginals, shared by every n.
    let limit_dists = marginal_distributions(&limit, d, times.len())?;
    let mut per_n_max = Vec::new();
    for (n, runs) in &scaled {
        let mains: Vec<&Marginals> = runs.iter().map(|r| &r.main).collect();
        let dists = marginal_distributions_ref(&mains, d, times.len())?;
        let mut worst: f64 = 0.0;
        for (k, t) in times.iter().enumerate() {
            for i in 0..d {
                let r = ks_two_sample(&dists[k].coords[i], &limit_dists[k].coords[i])
                    .renamed(format!("ks_n{}_t{}_x{}", tag(*n), tag(*t), i + 1));
                worst = worst.max(r.value);
                report.push(r);
            }
            report.push(
                ks_two_sample(&dists[k].sum, &limit_dists[k].sum)
                    .renamed(format!("ks_n{}_t{}_sum", tag(*n), tag(*t))),
            );
            report.push(
                ks_two_sample(&dists[k].clock, &limit_dists[k].clock)
                    .renamed(format!("ks_nu_n{}_t{}", tag(*n), tag(*t))),
            );
        }
        report.push(
            TestReport::diagnostic(format!("ks_max_n{}", tag(*n)), worst, vec![paths, paths])
                .with_se(ks_standard_error(paths, Some(paths))),
        );
        per_n_max.push(worst);

        for (j, h) in cfg.modulus_h.iter().enumerate() {
            let osc: Vec<f64> = runs.iter().map(|r| r.modulus[j]).collect();
            let (mean, se) = mc_mean(&osc)?;
            report.push(
                TestReport::diagnostic(format!("modulus_n{}_h{}", tag(*n), tag(*h)), mean, vec![paths]).with_se(se),
            );
        }
        write_samples(report, &format!("samples_n{}.csv", tag(*n)), &mains, d, times, "nu")?;
    }
    let limit_refs: Vec<&Marginals> = limit.iter().collect();
    write_samples(report, "samples_limit.csv", &limit_refs, d, times, "nu_inverse")?;

    let se = ks_standard_error(paths, Some(paths));
    let (bound, overridden) = threshold(cfg.threshold, default_threshold(model));
    report.push(
        TestReport::diagnostic("ks_max_at_largest_n", *per_n_max.last().unwrap(), vec![paths, paths])
            .with_se(se)
            .below(bound)
            .flag_override(overridden),
    );
    let (slack, overridden) = threshold(cfg.monotone_slack_se, 2.0);
    let allowed = slack * std::f64::consts::SQRT_2 * se;
    let increase = per_n_max.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let increase = if increase.is_finite() { increase } else { 0.0 };
    report.push(
        TestReport::diagnostic("ks_monotone_in_n", increase, vec![paths, paths])
            .with_se(std::f64::consts::SQRT_2 * se)
            .judged(Some(allowed), increase <= allowed)
            .flag_override(overridden),
    );

    if cfg.step_halving {
        let (_, runs) = scaled.last().unwrap();
        let halves: Vec<&Marginals> = runs.iter().map(|r| r.half_step.as_ref().unwrap()).collect();
        let dists = marginal_distributions_ref(&halves, d, times.len())?;
        let mut worst: f64 = 0.0;
        for k in 0..times.len() {
            for i in 0..d {
                worst = worst.max(ks_two_sample(&dists[k].coords[i], &limit_dists[k].coords[i]).value);
            }
        }
        report.push(TestReport::diagnostic("ks_max_at_largest_n_half_step", worst, vec![paths, paths]).with_se(se));
        report.push(TestReport::diagnostic(
            "step_halving_shift",
            (worst - per_n_max.last().unwrap()).abs(),
            vec![paths, paths],
        ));
    }
    Ok(())
}

struct TimeDistributions {
    coords: Vec<EmpiricalDistribution>,
    sum: EmpiricalDistribution,
    clock: EmpiricalDistribution,
}

fn marginal_distributions(rows: &[Marginals], d: usize, times: usize) -> Result<Vec<TimeDistributions>> {
    let refs: Vec<&Marginals> = rows.iter().collect();
    marginal_distributions_ref(&refs, d, times)
}

fn marginal_distributions_ref(rows: &[&Marginals], d: usize, times: usize) -> Result<Vec<TimeDistributions>> {
    (0..times)
        .map(|k| {
            let coords = (0..d)
                .map(|i| EmpiricalDistribution::new(rows.iter().map(|r| r.points[k][i]).collect()))
                .collect::<Result<Vec<_>>>()?;
            Ok(TimeDistributions {
                coords,
                sum: EmpiricalDistribution::new(rows.iter().map(|r| r.points[k].iter().sum()).collect())?,
                clock: EmpiricalDistribution::new(rows.iter().map(|r| r.clock[k]).collect())?,
            })
        })
        .collect()
}

fn write_samples(
    report: &mut ExperimentReport,
    file: &str,
    rows: &[&Marginals],
    d: usize,
    times: &[f64],
    clock_name: &str,
) -> Result<()> {
    let mut headers = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for (k, t) in times.iter().enumerate() {
        for i in 0..d {
            headers.push(format!("t{}_x{}", tag(*t), i + 1));
            columns.push(rows.iter().map(|r| r.points[k][i]).collect());
        }
        headers.push(format!("t{}_{clock_name}", tag(*t)));
        columns.push(rows.iter().map(|r| r.clock[k]).collect());
    }
    let h: Vec<&str> = headers.iter().map(String::as_str).collect();
    let c: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    report.columns_csv(file, &h, &c)
}

/// Largest coordinate oscillation of `Z_n(t) = B_{nt}/√n` over windows of
/// rescaled length `h` inside `[0, t_max]`, on the path's grid points.
fn oscillation(path: &SampledPath, n: f64, t_max: f64, h: f64) -> f64 {
    let d = path.dimension();
    let grid = path.grid();
    let last = ((n * t_max / grid.step()).floor() as usize).min(grid.steps());
    let window = ((n * h / grid.step()).round() as usize).max(1);
    let mut worst: f64 = 0.0;
    for i in 0..d {
        let xs: Vec<f64> = (0..=last).map(|k| path.point(k)[i]).collect();
        worst = worst.max(sliding_range(&xs, window));
    }
    worst / n.sqrt()
}

/// `max_k (max − min)` of `xs` over windows `[k, k + window]`.
fn sliding_range(xs: &[f64], window: usize) -> f64 {
    use std::collections::VecDeque;
    let (mut hi, mut lo) = (VecDeque::<usize>::new(), VecDeque::<usize>::new());
    let mut best: f64 = 0.0;
    for (j, &x) in xs.iter().enumerate() {
        while hi.back().is_some_and(|&b| xs[b] <= x) {
            hi.pop_back();
        }
        while lo.back().is_some_and(|&b| xs[b] >= x) {
            lo.pop_back();
        }
        hi.push_back(j);
        lo.push_back(j);
        while hi.front().is_some_and(|&f| f + window < j) {
            hi.pop_front();
        }
        while lo.front().is_some_and(|&f| f + window < j) {
            lo.pop_front();
        }
        best = best.max(xs[hi[0]] - xs[lo[0]]);
    }
    best
}
