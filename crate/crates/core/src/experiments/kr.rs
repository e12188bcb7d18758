//! Occupation functional `(2π / (‖g‖₁ log T)) ∫_0^T g(B_t) dt` of planar
//! Brownian motion against the standard exponential law.
//!
//! Paths are generated on a coarse grid. Coarse intervals whose endpoints come
//! within `refine_sd · √h + radius` of the origin are filled in by recursive
//! Brownian-bridge midpoints down to `fine_step`; on the fine level the
//! integral is exact for the linear interpolant (disc) or a trapezoid (bump).

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{positive_all, tag, threshold, Context, ExperimentReport};
use crate::error::{Error, Result};
use crate::rng::StreamKey;
use crate::stats::{exp1_cdf, ks_one_sample, mc_mean, EmpiricalDistribution, TestReport};

const STREAM_KR: u64 = 2;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// Indicator of the closed unit disc, `‖g‖₁ = π`.
    #[default]
    Disc,
    /// `exp(−‖x‖²/2)`, `‖g‖₁ = 2π`.
    GaussianBump,
}

impl TestFunction {
    pub fn l1_norm(self) -> f64 {
        match self {
            TestFunction::Disc => std::f64::consts::PI,
            TestFunction::GaussianBump => 2.0 * std::f64::consts::PI,
        }
    }

    /// Radius outside which the function is negligible.
    fn radius(self) -> f64 {
        match self {
            TestFunction::Disc => 1.0,
            TestFunction::GaussianBump => 6.0,
        }
    }

    fn value(self, x: &[f64; 2]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        match self {
            TestFunction::Disc => f64::from(r2 <= 1.0),
            TestFunction::GaussianBump => (-0.5 * r2).exp(),
        }
    }

    /// `∫ g` along the linear segment from `a` to `b` traversed in time `h`.
    fn segment(self, a: &[f64; 2], b: &[f64; 2], h: f64) -> f64 {
        match self {
            TestFunction::Disc => h * disc_fraction(a, b),
            TestFunction::GaussianBump => 0.5 * h * (self.value(a) + self.value(b)),
        }
    }

    /// `E ∫_0^T g(B_t) dt` for `B` started at the origin.
    pub fn exact_mean(self, t: f64) -> f64 {
        match self {
            // ∫_0^T (1 − e^{−1/(2s)}) ds
            TestFunction::Disc => {
                let c = 0.5;
                t * -(-c / t).exp_m1() + c * exp_integral_e1(c / t)
            }
            // ∫_0^T (1 + s)^{-1} ds
            TestFunction::GaussianBump => t.ln_1p(),
        }
    }
}

/// Fraction of the segment `a → b` inside the closed unit disc.
fn disc_fraction(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let v = [b[0] - a[0], b[1] - a[1]];
    let qa = v[0] * v[0] + v[1] * v[1];
    let qb = a[0] * v[0] + a[1] * v[1];
    let qc = a[0] * a[0] + a[1] * a[1] - 1.0;
    if qa == 0.0 {
        return f64::from(qc <= 0.0);
    }
    let disc = qb * qb - qa * qc;
    if disc <= 0.0 {
        return 0.0;
    }
    let root = disc.sqrt();
    let lo = ((-qb - root) / qa).max(0.0);
    let hi = ((-qb + root) / qa).min(1.0);
    (hi - lo).max(0.0)
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{−u}/u du` for `0 < x ≤ 1`.
fn exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..60 {
        term *= -x / k as f64;
        sum -= term / k as f64;
    }
    -EULER_GAMMA - x.ln() + sum
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrConfig {
    #[serde(default = "default_t_values")]
    pub t_values: Vec<f64>,
    #[serde(default)]
    pub test_function: TestFunction,
    #[serde(default = "default_fine_step")]
    pub fine_step: f64,
    /// Refinement reach in bridge standard deviations.
    #[serde(default = "default_refine_sd")]
    pub refine_sd: f64,
    /// Bound on the KS distance at the largest `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Allowed distance of the mean from 1, in standard errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_se: Option<f64>,
}

fn default_t_values() -> Vec<f64> {
    vec![1e4, 1e6]
}

fn default_fine_step() -> f64 {
    1.0 / 64.0
}

fn default_refine_sd() -> f64 {
    5.0
}

impl Default for KrConfig {
    fn default() -> Self {
        Self {
            t_values: default_t_values(),
            test_function: TestFunction::default(),
            fine_step: default_fine_step(),
            refine_sd: default_refine_sd(),
            threshold: None,
            mean_se: None,
        }
    }
}

struct Integrator {
    g: TestFunction,
    fine_step: f64,
    refine_sd: f64,
}

impl Integrator {
    fn interval(&self, a: &[f64; 2], b: &[f64; 2], h: f64, rng: &mut ChaCha8Rng) -> f64 {
        let ra = a[0].hypot(a[1]);
        let rb = b[0].hypot(b[1]);
        let reach = self.g.radius() + self.refine_sd * h.sqrt();
        if ra.min(rb) > reach || h <= self.fine_step * (1.0 + 1e-9) {
            return self.g.segment(a, b, h);
        }
        let sd = (0.25 * h).sqrt();
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        let m = [0.5 * (a[0] + b[0]) + sd * z0, 0.5 * (a[1] + b[1]) + sd * z1];
        self.interval(a, &m, 0.5 * h, rng) + self.interval(&m, b, 0.5 * h, rng)
    }
}

/// Unnormalized integrals `∫_0^T g(B_t) dt` at each checkpoint step.
fn integrals(key: StreamKey, step: f64, checkpoints: &[u64], integ: &Integrator) -> Vec<f64> {
    let mut bridge_rng = key.sequential(1);
    let total = *checkpoints.last().unwrap();
    let sd = step.sqrt();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next_cp = 0;
    let mut acc = 0.0;
    let mut x = [0.0; 2];
    let mut z = Vec::with_capacity(2 * CHUNK as usize);
    let mut first = 0;
    while first < total {
        let count = CHUNK.min(total - first);
        z.clear();
        key.unit_normals(0, first, count, 2, &mut z);
        for (j, inc) in z.chunks_exact(2).enumerate() {
            let y = [x[0] + sd * inc[0], x[1] + sd * inc[1]];
            acc += integ.interval(&x, &y, step, &mut bridge_rng);
            x = y;
            if first + j as u64 + 1 == checkpoints[next_cp] {
                out.push(acc);
                next_cp += 1;
            }
        }
        first += count;
    }
    out
}

pub(crate) fn run(ctx: &Context, report: &mut ExperimentReport) -> Result<()> {
    let cfg = ctx.config.kr.clone().unwrap_or_default();
    if ctx.model.dimension() != 2 {
        return Err(Error::Refused(format!(
            "the occupation-time law is planar; dimension is {}",
            ctx.model.dimension()
        )));
    }
    positive_all("kr.t_values", &cfg.t_values)?;
    positive_all("kr.fine_step", &[cfg.fine_step, cfg.refine_sd])?;
    if cfg.t_values.windows(2).any(|w| w[1] <= w[0]) || cfg.t_values[0] <= 1.0 {
        return Err(Error::Config("kr.t_values must be increasing and > 1".into()));
    }
    let step = ctx.config.grid.step_or(16.0)?;
    let checkpoints = cfg
        .t_values
        .iter()
        .map(|&t| {
            let k = (t / step).round();
            if (k * step - t).abs() > 1e-9 * t {
                Err(Error::Config(format!("kr.t_values entry {t} is not a multiple of grid.step {step}")))
            } else {
                Ok(k as u64)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let integ = Integrator {
        g: cfg.test_function,
        fine_step: cfg.fine_step,
        refine_sd: cfg.refine_sd,
    };
    let seed = ctx.seed();
    let rows = ctx.par_map(ctx.paths(), |i| {
        Ok(integrals(StreamKey::new(seed, STREAM_KR, i as u64), step, &checkpoints, &integ))
    })?;

    let paths = ctx.paths();
    let norm = cfg.test_function.l1_norm();
    let mut columns = Vec::new();
    let mut ks_values = Vec::new();
    for (k, &t) in cfg.t_values.iter().enumerate() {
        let scale = 2.0 * std::f64::consts::PI / (norm * t.ln());
        let xs: Vec<f64> = rows.iter().map(|r| scale * r[k]).collect();
        let (mean, se) = mc_mean(&xs)?;
        report.push(TestReport::diagnostic(format!("mean_T{}", tag(t)), mean, vec![paths]).with_se(se));
        report.push(TestReport::diagnostic(
            format!("exact_mean_T{}", tag(t)),
            scale * cfg.test_function.exact_mean(t),
            vec![],
        ));
        let ks = ks_one_sample(&EmpiricalDistribution::new(xs.clone())?, exp1_cdf)
            .renamed(format!("ks_exp1_T{}", tag(t)));
        ks_values.push((ks.value, ks.standard_error));
        report.push(ks);
        columns.push((format!("T{}", tag(t)), xs));
    }

    let (last, se) = *ks_values.last().unwrap();
    let (bound, overridden) = threshold(cfg.threshold, 0.15);
    let mut r = TestReport::diagnostic("ks_exp1_at_largest_T", last, vec![paths])
        .below(bound)
        .flag_override(overridden);
    r.standard_error = se;
    report.push(r);
    let increase = ks_values.windows(2).map(|w| w[1].0 - w[0].0).fold(f64::NEG_INFINITY, f64::max);
    if ks_values.len() > 1 {
        report.push(TestReport::diagnostic("ks_decreasing_in_T", increase, vec![paths]).judged(Some(0.0), increase < 0.0));
    }
    let xs = &columns.last().unwrap().1;
    let (mean, se) = mc_mean(xs)?;
    let (factor, overridden) = threshold(cfg.mean_se, 3.0);
    let z = (mean - 1.0).abs() / se;
    report.push(
        TestReport::diagnostic("mean_z_at_largest_T", z, vec![paths])
            .with_se(se)
            .judged(Some(factor), z <= factor)
            .flag_override(overridden),
    );

    let headers: Vec<&str> = columns.iter().map(|c| c.0.as_str()).collect();
    let cols: Vec<&[f64]> = columns.iter().map(|c| c.1.as_slice()).collect();
    report.columns_csv("samples_kr.csv", &headers, &cols)
}
