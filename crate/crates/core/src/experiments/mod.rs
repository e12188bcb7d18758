//! Declarative Monte Carlo experiments.
//!
//! An [`ExperimentConfig`] is a TOML document with a `[model]` table, optional
//! `[grid]` and `[monte_carlo]` tables, and one optional table per experiment
//! kind. [`run`] dispatches on the kind and returns an [`ExperimentReport`]
//! holding every statistic and the CSV artifacts; [`ExperimentReport::write`]
//! puts them in the output directory.
//!
//! Paths are independent streams keyed by `(master_seed, stream, path_index)`
//! and are collected in index order, so outputs do not depend on the number
//! of workers.

mod cauchy;
mod divergence;
mod escape_rate;
mod flt;
mod kr;
mod sde_crosscheck;
mod tau_moment;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clock::{ClockSettings, DEFAULT_CAP, DEFAULT_EXTENSION_BUDGET};
use crate::error::{Error, Result};
use crate::geometry::{AssumptionReport, IntensityModel, Profile};
use crate::stats::TestReport;

pub use cauchy::{CauchyConfig, Payoff};
pub use divergence::DivergenceConfig;
pub use escape_rate::{escape_probability, EscapeRateConfig};
pub use flt::{FltConfig, Theorem};
pub use kr::{KrConfig, TestFunction};
pub use sde_crosscheck::SdeCrosscheckConfig;
pub use tau_moment::TauMomentConfig;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "TCW_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Flt,
    Kr,
    Divergence,
    TauMoment,
    EscapeRate,
    SdeCrosscheck,
    #[serde(alias = "cauchy")]
    CauchyMc,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Flt,
        ExperimentKind::Kr,
        ExperimentKind::Divergence,
        ExperimentKind::TauMoment,
        ExperimentKind::EscapeRate,
        ExperimentKind::SdeCrosscheck,
        ExperimentKind::CauchyMc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Flt => "flt",
            ExperimentKind::Kr => "kr",
            ExperimentKind::Divergence => "divergence",
            ExperimentKind::TauMoment => "tau_moment",
            ExperimentKind::EscapeRate => "escape_rate",
            ExperimentKind::SdeCrosscheck => "sde_crosscheck",
            ExperimentKind::CauchyMc => "cauchy_mc",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    #[default]
    Constant,
    RadialPower,
    RadialSmooth,
}

/// The `[model]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: usize,
    /// `λ_α` indexed by `Σ α_i 2^i` (bit `i` set: coordinate `i` negative).
    pub octant_limits: Vec<f64>,
    #[serde(default)]
    pub profile: ProfileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl ModelConfig {
    pub fn build(&self) -> Result<IntensityModel> {
        let profile = match self.profile {
            ProfileKind::Constant => Profile::Constant,
            ProfileKind::RadialPower => Profile::RadialPower {
                beta: self
                    .beta
                    .ok_or_else(|| Error::Config("missing field `beta` for profile radial_power".into()))?,
                cutoff: self.cutoff.unwrap_or(1.0),
            },
            ProfileKind::RadialSmooth => Profile::RadialSmooth {
                scale: self.scale.unwrap_or(1.0),
            },
        };
        IntensityModel::new(self.dimension, self.octant_limits.clone(), profile)
    }
}

/// The `[grid]` table. Unset fields take per-experiment defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension_budget: Option<u32>,
}

impl GridConfig {
    pub fn step_or(&self, default: f64) -> Result<f64> {
        let step = self.step.unwrap_or(default);
        positive("grid.step", step)?;
        Ok(step)
    }

    pub fn clock_settings(&self) -> ClockSettings {
        ClockSettings {
            cap: self.cap.unwrap_or(DEFAULT_CAP),
            extension_budget: self.extension_budget.unwrap_or(DEFAULT_EXTENSION_BUDGET),
        }
    }
}

/// The `[monte_carlo]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "default_path_count")]
    pub path_count: usize,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_path_count() -> usize {
    10_000
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            path_count: default_path_count(),
            master_seed: 0,
        }
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub model: ModelConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flt: Option<FltConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kr: Option<KrConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_moment: Option<TauMomentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub escape_rate: Option<EscapeRateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde_crosscheck: Option<SdeCrosscheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none", alias = "cauchy")]
    pub cauchy_mc: Option<CauchyConfig>,
}

impl ExperimentConfig {
    /// A config with default grid, Monte Carlo and kind tables.
    pub fn new(kind: ExperimentKind, model: ModelConfig) -> Self {
        Self {
            kind: Some(kind),
            out_dir: None,
            model,
            grid: GridConfig::default(),
            monte_carlo: MonteCarloConfig::default(),
            flt: None,
            kr: None,
            divergence: None,
            tau_moment: None,
            escape_rate: None,
            sde_crosscheck: None,
            cauchy_mc: None,
        }
    }

    /// Parses TOML text. Errors carry the offending line.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.check().map_err(|e| anchor(text, e))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Semantic checks beyond the schema.
    pub fn check(&self) -> Result<()> {
        self.model.build()?;
        if self.monte_carlo.path_count < 2 {
            return Err(Error::Config(format!(
                "monte_carlo.path_count must be >= 2, got {}",
                self.monte_carlo.path_count
            )));
        }
        for (name, v) in [
            ("grid.step", self.grid.step),
            ("grid.initial_horizon", self.grid.initial_horizon),
            ("grid.cap", self.grid.cap),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<IntensityModel> {
        self.model.build()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

/// Checks that every value is finite and positive.
pub(crate) fn positive_all(name: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("{name} must not be empty")));
    }
    values.iter().try_for_each(|&v| positive(name, v))
}

/// Prefixes a semantic config error with the line of the first config key it
/// names, falling back to the `[model]` header.
fn anchor(text: &str, err: Error) -> Error {
    let Error::Config(msg) = err else { return err };
    let key_line = |key: &str| {
        text.lines().position(|l| {
            l.trim_start()
                .strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
    };
    let line = KEYS
        .iter()
        .filter(|k| msg.contains(*k))
        .find_map(|k| key_line(k))
        .or_else(|| msg.contains("octant limit").then(|| key_line("octant_limits")).flatten())
        .or_else(|| text.lines().position(|l| l.trim() == "[model]"));
    match line {
        Some(i) => Error::Config(format!("line {}: {msg}", i + 1)),
        None => Error::Config(msg),
    }
}

const KEYS: [&str; 10] = [
    "octant_limits",
    "dimension",
    "beta",
    "cutoff",
    "scale",
    "path_count",
    "initial_horizon",
    "step",
    "cap",
    "extension_budget",
];

/// Per-run options not stored in the config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub workers: usize,
    /// Run even when the model fails the assumptions of the invoked theorem.
    pub force: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            force: false,
        }
    }
}

/// A named output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Artifact {
    pub file_name: String,
    #[serde(skip)]
    pub contents: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub tests: Vec<TestReport>,
    pub artifacts: Vec<Artifact>,
    pub notes: Vec<String>,
    pub path_count: usize,
    pub wall_clock_seconds: f64,
    pub passed: bool,
}

impl ExperimentReport {
    fn new(kind: ExperimentKind, config: &ExperimentConfig) -> Self {
        Self {
            kind,
            config: config.clone(),
            tests: Vec::new(),
            artifacts: Vec::new(),
            notes: Vec::new(),
            path_count: config.monte_carlo.path_count,
            wall_clock_seconds: 0.0,
            passed: true,
        }
    }

    fn push(&mut self, test: TestReport) {
        debug_assert!(self.test(&test.name).is_none(), "duplicate statistic {}", test.name);
        self.tests.push(test);
    }

    fn artifact(&mut self, file_name: impl Into<String>, contents: String) {
        self.artifacts.push(Artifact {
            file_name: file_name.into(),
            contents,
        });
    }

    fn columns_csv(&mut self, file_name: impl Into<String>, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
        let mut buf = Vec::new();
        crate::stats::write_columns_csv(&mut buf, headers, columns)?;
        self.artifact(file_name, String::from_utf8(buf).expect("utf-8 csv"));
        Ok(())
    }

    pub fn test(&self, name: &str) -> Option<&TestReport> {
        self.tests.iter().find(|t| t.name == name)
    }

    /// Statistics with a verdict.
    pub fn asserted(&self) -> impl Iterator<Item = &TestReport> {
        self.tests.iter().filter(|t| t.passed.is_some())
    }

    /// One row per statistic, keyed by name.
    pub fn report_csv(&self) -> String {
        let mut out = String::from("statistic,value,standard_error,threshold,passed,threshold_overridden,sample_sizes\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        for t in &self.tests {
            let sizes: Vec<String> = t.sample_sizes.iter().map(|s| s.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t.name,
                t.value,
                opt(t.standard_error),
                opt(t.threshold),
                t.passed.map_or(String::new(), |p| p.to_string()),
                t.overridden,
                sizes.join(";")
            ));
        }
        out
    }

    /// Writes `report.csv`, `report.json`, `config_echo.toml` and every artifact.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, contents: &str| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, contents)?;
            written.push(p);
            Ok(())
        };
        put("report.csv", &self.report_csv())?;
        put(
            "report.json",
            &serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?,
        )?;
        put("config_echo.toml", &self.config.to_toml())?;
        for a in &self.artifacts {
            put(&a.file_name, &a.contents)?;
        }
        Ok(written)
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} ({} paths, {:.1}s)", self.kind, self.path_count, self.wall_clock_seconds)?;
        for t in &self.tests {
            writeln!(f, "  {t}{}", if t.overridden { " (override)" } else { "" })?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        write!(f, "overall: {}", if self.passed { "PASS" } else { "FAIL" })
    }
}

/// Output directory: explicit argument, then `TCW_OUT_DIR`, then the config,
/// then `tcw_out/<kind>`.
pub fn resolve_out_dir(explicit: Option<&Path>, config: &ExperimentConfig, kind: ExperimentKind) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|s| !s.is_empty()) {
        return PathBuf::from(p);
    }
    config
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("tcw_out").join(kind.name()))
}

/// Runs the experiment named by `kind` (or the config's own kind).
pub fn run(kind: Option<ExperimentKind>, config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentReport> {
    let kind = match (kind, config.kind) {
        (Some(k), Some(c)) if k != c => {
            return Err(Error::Config(format!("config is for `{c}`, not `{k}`")));
        }
        (Some(k), _) | (None, Some(k)) => k,
        (None, None) => return Err(Error::Config("missing field `kind`".into())),
    };
    config.check()?;
    let mut config = config.clone();
    config.kind = Some(kind);
    let started = Instant::now();
    let mut report = ExperimentReport::new(kind, &config);
    let ctx = Context {
        config: &config,
        model: config.model()?,
        options,
    };
    match kind {
        ExperimentKind::Flt => flt::run(&ctx, &mut report)?,
        ExperimentKind::Kr => kr::run(&ctx, &mut report)?,
        ExperimentKind::Divergence => divergence::run(&ctx, &mut report)?,
        ExperimentKind::TauMoment => tau_moment::run(&ctx, &mut report)?,
        ExperimentKind::EscapeRate => escape_rate::run(&ctx, &mut report)?,
        ExperimentKind::SdeCrosscheck => sde_crosscheck::run(&ctx, &mut report)?,
        ExperimentKind::CauchyMc => cauchy::run(&ctx, &mut report)?,
    }
    report.passed = report.tests.iter().all(|t| !t.failed());
    report.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

/// Assumption report for the config's model.
pub fn validate(config: &ExperimentConfig) -> Result<AssumptionReport> {
    Ok(config.model()?.validate_assumptions())
}

pub(crate) struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub model: IntensityModel,
    pub options: RunOptions,
}

impl Context<'_> {
    pub fn paths(&self) -> usize {
        self.config.monte_carlo.path_count
    }

    pub fn seed(&self) -> u64 {
        self.config.monte_carlo.master_seed
    }

    /// `f(0), …, f(count − 1)` on the worker pool, in index order.
    pub fn par_map<T, F>(&self, count: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.options.workers.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        pool.install(|| (0..count).into_par_iter().map(f).collect())
    }

    /// Refuses unless `ok` or `--force`; forced runs record a note.
    pub fn require(&self, ok: bool, what: &str, report: &mut ExperimentReport) -> Result<()> {
        if ok {
            Ok(())
        } else if self.options.force {
            report.notes.push(format!("forced run: {what}"));
            Ok(())
        } else {
            Err(Error::Refused(format!("{what} (use --force to run anyway)")))
        }
    }
}

/// Threshold from the config or the default, with the override flag.
pub(crate) fn threshold(configured: Option<f64>, default: f64) -> (f64, bool) {
    match configured {
        Some(t) => (t, true),
        None => (default, false),
    }
}

/// Formats a number for use in a statistic name, e.g. `0.5` → `0.5`, `100` → `100`.
pub(crate) fn tag(x: f64) -> String {
    format!("{x}")
}
