//! Empirical distributions, Kolmogorov–Smirnov distances and Monte Carlo
//! means.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Standard deviation of the Kolmogorov distribution, `sqrt(π²/12 − (π/2)·ln²2)`.
/// Scaled by the effective sample size it gives the sampling error of a KS
/// distance under the null.
pub const KOLMOGOROV_SD: f64 = 0.260_344;

/// Sorted sample set with a right-continuous ECDF.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::Config("sample set contains NaN".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// `#{samples ≤ x} / n`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }
}

/// One statistic with its verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub name: String,
    pub value: f64,
    pub sample_sizes: Vec<usize>,
    pub threshold: Option<f64>,
    /// `None` for purely diagnostic statistics.
    pub passed: Option<bool>,
    pub standard_error: Option<f64>,
    /// The threshold came from a config override rather than the default.
    pub overridden: bool,
}

impl TestReport {
    pub fn diagnostic(name: impl Into<String>, value: f64, sample_sizes: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            value,
            sample_sizes,
            threshold: None,
            passed: None,
            standard_error: None,
            overridden: false,
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_se(mut self, se: f64) -> Self {
        self.standard_error = Some(se);
        self
    }

    /// Passes when `value < threshold`.
    pub fn below(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self.passed = Some(self.value < threshold);
        self
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(mut self, threshold: f64) -> Self {
        self.threshold = Some(threshold);
        self.passed = Some(self.value >= threshold);
        self
    }

    /// Attaches a threshold with an externally decided verdict.
    pub fn judged(mut self, threshold: Option<f64>, passed: bool) -> Self {
        self.threshold = threshold;
        self.passed = Some(passed);
        self
    }

    pub fn flag_override(mut self, overridden: bool) -> Self {
        self.overridden = overridden;
        self
    }

    pub fn failed(&self) -> bool {
        self.passed == Some(false)
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "info",
        };
        write!(f, "[{verdict}] {} = {:.6}", self.name, self.value)?;
        if let Some(se) = self.standard_error {
            write!(f, " (se {se:.6})")?;
        }
        if let Some(t) = self.threshold {
            write!(f, " threshold {t}")?;
        }
        Ok(())
    }
}

/// Two-sample KS distance `sup_x |F_a(x) − F_b(x)|` by a merge scan.
pub fn ks_two_sample(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> TestReport {
    let (xs, ys) = (a.samples(), b.samples());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    // Once one side is exhausted its ECDF is 1; the gap is largest right away.
    d = d.max((i as f64 / n - j as f64 / m).abs());
    TestReport::diagnostic("ks_two_sample", d, vec![xs.len(), ys.len()])
        .with_se(ks_standard_error(xs.len(), Some(ys.len())))
}

/// One-sample KS distance against a continuous reference CDF.
pub fn ks_one_sample(a: &EmpiricalDistribution, cdf: impl Fn(f64) -> f64) -> TestReport {
    let n = a.len() as f64;
    let d = a
        .samples()
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            ((k + 1) as f64 / n - f).max(f - k as f64 / n)
        })
        .fold(0.0, f64::max);
    TestReport::diagnostic("ks_one_sample", d, vec![a.len()])
        .with_se(ks_standard_error(a.len(), None))
}

/// Null sampling error of a KS distance with sizes `n` (and `m` for two samples).
pub fn ks_standard_error(n: usize, m: Option<usize>) -> f64 {
    let eff = match m {
        Some(m) => 1.0 / n as f64 + 1.0 / m as f64,
        None => 1.0 / n as f64,
    };
    KOLMOGOROV_SD * eff.sqrt()
}

/// CDF of the standard exponential law.
pub fn exp1_cdf(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        -(-u).exp_m1()
    }
}

/// CDF of `N(0, variance)`.
pub fn normal_cdf(x: f64, variance: f64) -> f64 {
    0.5 * libm::erfc(-x / (2.0 * variance).sqrt())
}

/// CDF of the chi distribution with `d` degrees of freedom, i.e. of `‖Z‖` for
/// a standard Gaussian `Z` in `R^d`. Uses the regularized incomplete gamma
/// function `P(d/2, x²/2)` built up from `P(1/2, y) = erf(√y)` or `P(1, y)`.
pub fn chi_cdf(x: f64, d: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let y = 0.5 * x * x;
    let (mut a, mut p, mut term): (f64, f64, f64) = if d % 2 == 1 {
        // term = y^a e^{-y} / Γ(a + 1) at a = 1/2.
        (0.5, libm::erf(y.sqrt()), 2.0 * (y / std::f64::consts::PI).sqrt() * (-y).exp())
    } else {
        (1.0, -(-y).exp_m1(), y * (-y).exp())
    };
    // P(a + 1, y) = P(a, y) − y^a e^{-y} / Γ(a + 1).
    while a + 0.5 < d as f64 / 2.0 {
        p -= term;
        a += 1.0;
        term *= y / a;
    }
    p.clamp(0.0, 1.0)
}

/// Sample mean and its standard error `sqrt(s²/n)`.
pub fn mc_mean(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Standard error of a proportion `p` estimated from `n` trials.
pub fn proportion_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Writes equally long sample columns as CSV with a header row.
pub fn write_columns_csv<W: Write>(mut w: W, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    let rows = columns.first().map_or(0, |c| c.len());
    if headers.len() != columns.len() || columns.iter().any(|c| c.len() != rows) {
        return Err(Error::Config("CSV columns must have equal length and one header each".into()));
    }
    writeln!(w, "{}", headers.join(","))?;
    let mut line = String::new();
    for r in 0..rows {
        line.clear();
        for (c, col) in columns.iter().enumerate() {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&col[r].to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}
