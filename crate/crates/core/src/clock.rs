//! Additive functionals, their inverses, and the time-changed processes built
//! from them.
//!
//! `S(t) = ∫_0^t ds / λ(B_s)` is discretised by the trapezoid rule on the
//! capped integrand `min(1/λ, cap)`. The only grid point where `λ` can vanish
//! exactly is the origin, where every Wiener path starts. For power-law zeros
//! `λ ~ ‖x‖^β` the interval touching such a point is integrated against the
//! profile `s^{-β/2}` anchored at the regular endpoint,
//! `∫_0^h f(h)(s/h)^{-β/2} ds = 2h f(h)/(2-β)`, which vanishes with `h`.
//!
//! The occupation clock `ν(t) = ∫_0^t υ(W_s) ds` uses the left-point rule,
//! since `υ` is piecewise constant in space.

use std::io::Write;

use crate::error::{Error, Result};
use crate::geometry::IntensityModel;
use crate::path::SampledPath;

pub const DEFAULT_CAP: f64 = 1e12;
pub const DEFAULT_EXTENSION_BUDGET: u32 = 40;

/// A sampled nondecreasing function with `values[0] = 0`, linear between
/// breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneClock {
    times: Vec<f64>,
    values: Vec<f64>,
    integrand_cap: f64,
}

impl MonotoneClock {
    pub fn from_parts(times: Vec<f64>, values: Vec<f64>, integrand_cap: f64) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::Config(format!(
                "clock needs matching times/values of length >= 2, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 || values[0] != 0.0 {
            return Err(Error::Config("clock must start at (0, 0)".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("clock times must be strictly increasing".into()));
        }
        if values.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::Config("clock values must be nondecreasing".into()));
        }
        Ok(Self {
            times,
            values,
            integrand_cap,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integrand_cap(&self) -> f64 {
        self.integrand_cap
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Clock value at the horizon.
    pub fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Evaluates the clock at `x`, clamped to `[0, horizon]`.
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let j = self.times.partition_point(|&t| t <= x);
        if j >= self.times.len() {
            return self.final_value();
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let (v0, v1) = (self.values[j - 1], self.values[j]);
        v0 + (x - t0) / (t1 - t0) * (v1 - v0)
    }

    /// Leftmost `x` with `S(x) = t`; see [`inverse_clock`].
    pub fn inverse(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Config(format!("clock level must be >= 0, got {t}")));
        }
        let available = self.final_value();
        if t >= available {
            return Err(Error::HorizonExhausted {
                required: t,
                available,
            });
        }
        let i = self.values.partition_point(|&v| v < t);
        if self.values[i] == t {
            return Ok(self.times[i]);
        }
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let x = t0 + (t - v0) / (v1 - v0) * (t1 - t0);
        Ok(x.clamp(t0, t1))
    }

    /// Two-column CSV `time,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    }
}

/// `τ_t`: the leftmost solution of `S(x) = t` on the sampled horizon.
///
/// Levels at or beyond `S(horizon)` yield [`Error::HorizonExhausted`], the
/// signal to extend the underlying path.
pub fn inverse_clock(clock: &MonotoneClock, t: f64) -> Result<f64> {
    clock.inverse(t)
}

/// Integrand `min(1/λ(x), cap)`, infinite where `λ(x) = 0`.
#[inline]
fn capped_reciprocal(model: &IntensityModel, x: &[f64], cap: f64) -> f64 {
    let lam = model.intensity(x);
    if lam > 0.0 {
        (1.0 / lam).min(cap)
    } else {
        f64::INFINITY
    }
}

#[inline]
fn interval_integral(fa: f64, fb: f64, h: f64, cap: f64, singular: Option<f64>) -> f64 {
    match (fa.is_finite(), fb.is_finite()) {
        (true, true) => 0.5 * h * (fa + fb),
        (false, false) => h * cap,
        (a_ok, _) => {
            let regular = if a_ok { fa } else { fb };
            match singular {
                Some(beta) if beta < 2.0 => (2.0 * h * regular / (2.0 - beta)).min(h * cap),
                _ => 0.5 * h * (regular + cap),
            }
        }
    }
}

fn check_shared_dimension(path: &SampledPath, model: &IntensityModel) -> Result<()> {
    if path.dimension() != model.dimension() {
        return Err(Error::DimensionMismatch {
            expected: model.dimension(),
            got: path.dimension(),
        });
    }
    Ok(())
}

fn check_cap(model: &IntensityModel, cap: f64) -> Result<()> {
    if !(cap > 0.0) {
        return Err(Error::Config(format!("integrand cap must be positive, got {cap}")));
    }
    let needed = 1.0 / model.min_limit();
    if !(cap > needed) {
        return Err(Error::Config(format!(
            "integrand cap {cap} must exceed the largest octant reciprocal {needed}"
        )));
    }
    Ok(())
}

/// Incrementally maintained `S` for a growing path.
struct ClockBuilder<'m> {
    model: &'m IntensityModel,
    cap: f64,
    singular: Option<f64>,
    times: Vec<f64>,
    values: Vec<f64>,
    last_integrand: f64,
}

impl<'m> ClockBuilder<'m> {
    fn new(model: &'m IntensityModel, cap: f64, path: &SampledPath) -> Self {
        let mut b = Self {
            model,
            cap,
            singular: model.singular_exponent(),
            times: Vec::with_capacity(path.grid().len()),
            values: Vec::with_capacity(path.grid().len()),
            last_integrand: capped_reciprocal(model, path.point(0), cap),
        };
        b.times.push(0.0);
        b.values.push(0.0);
        b.catch_up(path);
        b
    }

    fn catch_up(&mut self, path: &SampledPath) {
        let h = path.grid().step();
        for k in self.times.len()..path.grid().len() {
            let f = capped_reciprocal(self.model, path.point(k), self.cap);
            let inc = interval_integral(self.last_integrand, f, h, self.cap, self.singular);
            let v = self.values[k - 1] + inc;
            self.values.push(v);
            self.times.push(path.grid().time(k));
            self.last_integrand = f;
        }
    }

    fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    fn build(self) -> MonotoneClock {
        MonotoneClock {
            times: self.times,
            values: self.values,
            integrand_cap: self.cap,
        }
    }
}

/// `S_B(t) = ∫_0^t min(1/λ(B_s), cap) ds` on the path grid.
pub fn additive_functional(
    path: &SampledPath,
    model: &IntensityModel,
    cap: f64,
) -> Result<MonotoneClock> {
    check_shared_dimension(path, model)?;
    check_cap(model, cap)?;
    Ok(ClockBuilder::new(model, cap, path).build())
}

/// `ν(t) = ∫_0^t υ(W_s) ds` by the left-point rule.
pub fn limit_clock(w_path: &SampledPath, model: &IntensityModel) -> Result<MonotoneClock> {
    check_shared_dimension(w_path, model)?;
    let mut b = LimitClockBuilder::new(w_path);
    b.catch_up(w_path, model);
    Ok(b.build(model))
}

struct LimitClockBuilder {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl LimitClockBuilder {
    fn new(path: &SampledPath) -> Self {
        let mut times = Vec::with_capacity(path.grid().len());
        let mut values = Vec::with_capacity(path.grid().len());
        times.push(0.0);
        values.push(0.0);
        Self { times, values }
    }

    fn catch_up(&mut self, path: &SampledPath, model: &IntensityModel) {
        let h = path.grid().step();
        for k in self.times.len()..path.grid().len() {
            let v = self.values[k - 1] + h * model.upsilon(path.point(k - 1));
            self.values.push(v);
            self.times.push(path.grid().time(k));
        }
    }

    fn final_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    fn build(self, model: &IntensityModel) -> MonotoneClock {
        MonotoneClock {
            times: self.times,
            values: self.values,
            integrand_cap: 1.0 / model.min_limit(),
        }
    }
}

/// `B_{τ_t}` at each evaluation time.
pub fn time_changed_path(
    path: &SampledPath,
    clock: &MonotoneClock,
    eval_times: &[f64],
) -> Result<Vec<Vec<f64>>> {
    check_eval_times(eval_times)?;
    eval_times
        .iter()
        .map(|&t| Ok(path.interpolate(clock.inverse(t)?)))
        .collect()
}

fn check_eval_times(eval_times: &[f64]) -> Result<()> {
    if eval_times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::Config("evaluation times must be finite and >= 0".into()));
    }
    if eval_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config("evaluation times must be nondecreasing".into()));
    }
    Ok(())
}

/// Quadrature cap and horizon-doubling budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClockSettings {
    pub cap: f64,
    pub extension_budget: u32,
}

impl Default for ClockSettings {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            extension_budget: DEFAULT_EXTENSION_BUDGET,
        }
    }
}

/// Output of [`normalized_process`].
#[derive(Debug, Clone)]
pub struct NormalizedSample {
    /// `B_{τ_{nt}} / √n` per evaluation time.
    pub values: Vec<Vec<f64>>,
    /// `ν_n(t) = τ_{nt} / n` per evaluation time.
    pub nu: Vec<f64>,
    /// The (possibly extended) Brownian path.
    pub path: SampledPath,
    pub clock: MonotoneClock,
}

/// `B_{τ_{nt}}/√n` and `τ_{nt}/n`, doubling the path horizon until
/// `S(horizon) > n · max(eval_times)`.
pub fn normalized_process(
    path: SampledPath,
    model: &IntensityModel,
    n: f64,
    eval_times: &[f64],
    settings: ClockSettings,
) -> Result<NormalizedSample> {
    check_shared_dimension(&path, model)?;
    check_cap(model, settings.cap)?;
    check_eval_times(eval_times)?;
    if !(n >= 1.0 && n.is_finite()) {
        return Err(Error::Config(format!("scale n must be >= 1, got {n}")));
    }
    let t_max = eval_times.iter().cloned().fold(0.0, f64::max);
    let required = n * t_max;

    let mut path = path;
    let mut builder = ClockBuilder::new(model, settings.cap, &path);
    let mut doublings = 0;
    while !(builder.final_value() > required) {
        if doublings >= settings.extension_budget {
            return Err(Error::ExtensionBudget {
                budget: settings.extension_budget,
                horizon: path.grid().horizon(),
                reached: builder.final_value(),
                required,
            });
        }
        path = path.extend_doubling()?;
        builder.catch_up(&path);
        doublings += 1;
    }
    let clock = builder.build();
    let scale = n.sqrt().recip();
    let mut values = Vec::with_capacity(eval_times.len());
    let mut nu = Vec::with_capacity(eval_times.len());
    for &t in eval_times {
        let tau = clock.inverse(n * t)?;
        let mut x = path.interpolate(tau);
        x.iter_mut().for_each(|v| *v *= scale);
        values.push(x);
        nu.push(tau / n);
    }
    Ok(NormalizedSample {
        values,
        nu,
        path,
        clock,
    })
}

/// Output of [`limit_process`].
#[derive(Debug, Clone)]
pub struct LimitSample {
    /// `W(ν⁻¹(t))` per evaluation time.
    pub values: Vec<Vec<f64>>,
    /// `ν⁻¹(t)` per evaluation time.
    pub nu_inverse: Vec<f64>,
    pub path: SampledPath,
    pub clock: MonotoneClock,
}

/// `W(ν⁻¹(t))`, the octant-skew limit process, extending `W` as needed.
pub fn limit_process(
    w_path: SampledPath,
    model: &IntensityModel,
    eval_times: &[f64],
    extension_budget: u32,
) -> Result<LimitSample> {
    check_shared_dimension(&w_path, model)?;
    check_eval_times(eval_times)?;
    let required = eval_times.iter().cloned().fold(0.0, f64::max);
    let mut path = w_path;
    let mut builder = LimitClockBuilder::new(&path);
    builder.catch_up(&path, model);
    let mut doublings = 0;
    while !(builder.final_value() > required) {
        if doublings >= extension_budget {
            return Err(Error::ExtensionBudget {
                budget: extension_budget,
                horizon: path.grid().horizon(),
                reached: builder.final_value(),
                required,
            });
        }
        path = path.extend_doubling()?;
        builder.catch_up(&path, model);
        doublings += 1;
    }
    let clock = builder.build(model);
    let mut values = Vec::with_capacity(eval_times.len());
    let mut nu_inverse = Vec::with_capacity(eval_times.len());
    for &t in eval_times {
        let x = clock.inverse(t)?;
        values.push(path.interpolate(x));
        nu_inverse.push(x);
    }
    Ok(LimitSample {
        values,
        nu_inverse,
        path,
        clock,
    })
}
