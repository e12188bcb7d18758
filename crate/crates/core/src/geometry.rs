//! Octants of `R^d` and intensity models.
//!
//! An octant is identified by a multiindex `α ∈ {0,1}^d`; bit `i` set means
//! coordinate `i` is negative. The integer encoding used everywhere in this
//! crate (config files, octant-limit arrays, CSV) is little-endian in the
//! coordinates:
//!
//! ```text
//! index(α) = Σ_i α_i · 2^i
//! ```
//!
//! so in the plane `[λ_(0,0), λ_(1,0), λ_(0,1), λ_(1,1)]` lists the limits of
//! quadrants I, II, IV, III in that order.
//!
//! Points lying on a bounding hyperplane (some coordinate exactly zero) are
//! assigned to the octant where that coordinate counts as positive.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Multiindex `α` of an open octant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OctantIndex {
    bits: Vec<bool>,
}

impl OctantIndex {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Config("octant index needs dimension >= 1".into()));
        }
        Ok(Self { bits })
    }

    pub fn from_index(dimension: usize, index: usize) -> Result<Self> {
        if dimension == 0 || dimension >= usize::BITS as usize || index >> dimension != 0 {
            return Err(Error::Config(format!(
                "octant index {index} out of range for dimension {dimension}"
            )));
        }
        Ok(Self {
            bits: (0..dimension).map(|i| index >> i & 1 == 1).collect(),
        })
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn dimension(&self) -> usize {
        self.bits.len()
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    /// Whether `x` lies in the open octant.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bits.len()
            && x
                .iter()
                .zip(&self.bits)
                .all(|(&xi, &neg)| if neg { xi < 0.0 } else { xi > 0.0 })
    }
}

impl fmt::Display for OctantIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", u8::from(*b))?;
        }
        write!(f, ")")
    }
}

/// Integer octant index of `x` without allocation. Zero coordinates count as positive.
#[inline]
pub(crate) fn octant_bits(x: &[f64]) -> usize {
    x.iter()
        .enumerate()
        .fold(0, |acc, (i, &xi)| acc | (usize::from(xi < 0.0) << i))
}

/// Whether some coordinate of `x` is exactly zero.
#[inline]
pub fn on_boundary(x: &[f64]) -> bool {
    x.iter().any(|&xi| xi == 0.0)
}

pub fn octant_of(x: &[f64], dimension: usize) -> Result<OctantIndex> {
    if x.len() != dimension {
        return Err(Error::DimensionMismatch {
            expected: dimension,
            got: x.len(),
        });
    }
    OctantIndex::from_index(dimension, octant_bits(x))
}

#[inline]
fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Radial modification of the octant limits near the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// `λ(x) = λ_α(x)`.
    Constant,
    /// `λ(x) = λ_α(x) · min(1, (‖x‖/cutoff)^beta)`; vanishes at the origin when `beta > 0`.
    RadialPower { beta: f64, cutoff: f64 },
    /// `λ(x) = λ_α(x) · (1 + exp(-(‖x‖/scale)²))`; smooth bump decaying to the limits.
    RadialSmooth { scale: f64 },
}

impl Profile {
    fn validate(&self) -> Result<()> {
        match *self {
            Profile::Constant => Ok(()),
            Profile::RadialPower { beta, cutoff } => {
                if !(beta >= 0.0 && beta.is_finite()) {
                    return Err(Error::Config(format!("beta must be finite and >= 0, got {beta}")));
                }
                if !(cutoff > 0.0 && cutoff.is_finite()) {
                    return Err(Error::Config(format!("cutoff must be positive, got {cutoff}")));
                }
                Ok(())
            }
            Profile::RadialSmooth { scale } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::Config(format!("scale must be positive, got {scale}")));
                }
                Ok(())
            }
        }
    }

    /// Multiplicative factor at radius `r`.
    #[inline]
    pub fn factor(&self, r: f64) -> f64 {
        match *self {
            Profile::Constant => 1.0,
            Profile::RadialPower { beta, cutoff } => {
                if r >= cutoff || beta == 0.0 {
                    1.0
                } else {
                    (r / cutoff).powf(beta)
                }
            }
            Profile::RadialSmooth { scale } => {
                let u = r / scale;
                1.0 + (-u * u).exp()
            }
        }
    }

    /// Closed-form bound on `|factor(r) - 1|`, i.e. how far `λ` is from its
    /// octant limit at radius `r`.
    pub fn tail_deviation(&self, r: f64) -> f64 {
        match *self {
            Profile::Constant => 0.0,
            Profile::RadialPower { .. } => (self.factor(r) - 1.0).abs(),
            Profile::RadialSmooth { scale } => (-(r / scale).powi(2)).exp(),
        }
    }

    fn sup_factor(&self) -> f64 {
        match self {
            Profile::RadialSmooth { .. } => 2.0,
            _ => 1.0,
        }
    }
}

/// The intensity `λ`: octant limits `λ_α` shaped by an analytic radial profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntensityModel {
    dimension: usize,
    octant_limits: Vec<f64>,
    profile: Profile,
    bounded_above: Option<f64>,
}

impl IntensityModel {
    pub fn new(dimension: usize, octant_limits: Vec<f64>, profile: Profile) -> Result<Self> {
        if dimension == 0 || dimension > 16 {
            return Err(Error::Config(format!(
                "dimension must be in 1..=16, got {dimension}"
            )));
        }
        let expected = 1usize << dimension;
        if octant_limits.len() != expected {
            return Err(Error::Config(format!(
                "octant_limits needs 2^{dimension} = {expected} entries, got {}",
                octant_limits.len()
            )));
        }
        if let Some((i, v)) = octant_limits
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::Config(format!(
                "octant limit #{i} must be positive and finite, got {v}"
            )));
        }
        profile.validate()?;
        let max_limit = octant_limits.iter().cloned().fold(f64::MIN, f64::max);
        Ok(Self {
            dimension,
            bounded_above: Some(max_limit * profile.sup_factor()),
            octant_limits,
            profile,
        })
    }

    /// `λ ≡ c` in dimension `d`.
    pub fn constant(dimension: usize, c: f64) -> Result<Self> {
        let n = 1usize.checked_shl(dimension as u32).unwrap_or(0);
        Self::new(dimension, vec![c; n], Profile::Constant)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn octant_limits(&self) -> &[f64] {
        &self.octant_limits
    }

    pub fn limit(&self, octant: &OctantIndex) -> f64 {
        self.octant_limits[octant.index()]
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// Analytic upper bound `C ≥ λ(x)`, when the family has one.
    pub fn bounded_above(&self) -> Option<f64> {
        self.bounded_above
    }

    pub fn min_limit(&self) -> f64 {
        self.octant_limits.iter().cloned().fold(f64::MAX, f64::min)
    }

    pub fn max_limit(&self) -> f64 {
        self.octant_limits.iter().cloned().fold(f64::MIN, f64::max)
    }

    /// True when `λ` equals its octant limits everywhere.
    pub fn is_octant_constant(&self) -> bool {
        matches!(self.profile, Profile::Constant)
            || matches!(self.profile, Profile::RadialPower { beta, .. } if beta == 0.0)
    }

    /// `Some(c)` when `λ ≡ c` on all of `R^d`.
    pub fn uniform_value(&self) -> Option<f64> {
        let first = self.octant_limits[0];
        (self.is_octant_constant() && self.octant_limits.iter().all(|&v| v == first))
            .then_some(first)
    }

    /// Exponent `β` of a power-law zero at the origin, `λ(x) ~ ‖x‖^β`.
    pub fn singular_exponent(&self) -> Option<f64> {
        match self.profile {
            Profile::RadialPower { beta, .. } if beta > 0.0 => Some(beta),
            _ => None,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn octant_of(&self, x: &[f64]) -> Result<OctantIndex> {
        octant_of(x, self.dimension)
    }

    pub fn intensity_at(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.intensity(x))
    }

    /// Occupation intensity `υ(x) = 1/λ_α` for the octant containing `x`.
    pub fn upsilon_at(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.upsilon(x))
    }

    #[inline]
    pub(crate) fn intensity(&self, x: &[f64]) -> f64 {
        let limit = self.octant_limits[octant_bits(x)];
        match self.profile {
            Profile::Constant => limit,
            p => limit * p.factor(norm(x)),
        }
    }

    #[inline]
    pub(crate) fn upsilon(&self, x: &[f64]) -> f64 {
        1.0 / self.octant_limits[octant_bits(x)]
    }

    /// `Σ_α λ_α 1_{Δ_α}(x)`, the pointwise limit of `λ(x√n)` off the boundary.
    #[inline]
    pub(crate) fn limit_intensity(&self, x: &[f64]) -> f64 {
        self.octant_limits[octant_bits(x)]
    }

    /// Decide the standing assumptions for this analytic family in closed form.
    pub fn validate_assumptions(&self) -> AssumptionReport {
        validate_assumptions(self)
    }
}

/// Outcome of a closed-form assumption check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Undetermined,
}

impl Verdict {
    fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Which hypotheses hold for a model, and which limit theorems they unlock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// `1/λ` is locally integrable.
    pub local_integrability: Verdict,
    /// `λ → λ_α > 0` as `min_i |x_i| → ∞` inside each octant.
    pub diagonal_limits: Verdict,
    /// `limsup_{‖x‖→∞} λ(x) < ∞`.
    pub bounded_at_infinity: Verdict,
    /// `λ → λ_α > 0` as `‖x‖ → ∞` inside each octant.
    pub radial_limits: Verdict,
    /// `∫_{‖x‖≤R} λ⁻¹(x)‖x‖^{-2γ} dx < ∞` for some `γ ∈ (0,1/2)` when `d = 2`,
    /// `∫_{‖x‖≤R} λ⁻¹(x)‖x‖^{2-d} dx < ∞` when `d > 2`.
    pub origin_integrability: Verdict,
    /// `λ ≥ c > 0` everywhere.
    pub separated_from_zero: bool,
    pub bounded_above: Option<f64>,
    /// Limit theorem for intensities separated from zero.
    pub separated_theorem: bool,
    /// Limit theorem under radial limits.
    pub radial_theorem: bool,
    /// Limit theorem under diagonal limits plus boundedness at infinity.
    pub diagonal_theorem: bool,
}

impl AssumptionReport {
    /// Some functional limit theorem covers the model.
    pub fn any_limit_theorem(&self) -> bool {
        self.separated_theorem || self.radial_theorem || self.diagonal_theorem
    }
}

impl fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "local_integrability   {}", self.local_integrability)?;
        writeln!(f, "diagonal_limits       {}", self.diagonal_limits)?;
        writeln!(f, "bounded_at_infinity   {}", self.bounded_at_infinity)?;
        writeln!(f, "radial_limits         {}", self.radial_limits)?;
        writeln!(f, "origin_integrability  {}", self.origin_integrability)?;
        writeln!(f, "separated_from_zero   {}", self.separated_from_zero)?;
        match self.bounded_above {
            Some(c) => writeln!(f, "bounded_above         {c}")?,
            None => writeln!(f, "bounded_above         no")?,
        }
        writeln!(f, "theorem.separated     {}", self.separated_theorem)?;
        writeln!(f, "theorem.radial        {}", self.radial_theorem)?;
        write!(f, "theorem.diagonal      {}", self.diagonal_theorem)
    }
}

pub fn validate_assumptions(model: &IntensityModel) -> AssumptionReport {
    let d = model.dimension;
    // All built-in profiles tend to the octant limits radially (hence also
    // diagonally) and are bounded, so only the behaviour at the origin varies.
    let (local, origin, separated) = match model.profile {
        Profile::Constant | Profile::RadialSmooth { .. } => (
            Verdict::Holds,
            if d >= 2 {
                Verdict::Holds
            } else {
                Verdict::Undetermined
            },
            true,
        ),
        Profile::RadialPower { beta, .. } => {
            // Near 0, 1/λ ~ r^{-β}: ∫ r^{-β} r^{d-1} dr < ∞ iff β < d.
            let local = Verdict::from_bool(beta < d as f64);
            // d > 2: ∫ r^{-β} r^{2-d} r^{d-1} dr = ∫ r^{1-β} dr < ∞ iff β < 2.
            // d = 2: ∫ r^{1-β-2γ} dr < ∞ iff β + 2γ < 2, feasible for some γ ∈ (0,1/2) iff β < 2.
            let origin = if d >= 2 {
                Verdict::from_bool(beta < 2.0)
            } else {
                Verdict::Undetermined
            };
            (local, origin, beta == 0.0)
        }
    };
    let diagonal = Verdict::Holds;
    let bounded = Verdict::Holds;
    let radial = Verdict::Holds;
    AssumptionReport {
        local_integrability: local,
        diagonal_limits: diagonal,
        bounded_at_infinity: bounded,
        radial_limits: radial,
        origin_integrability: origin,
        separated_from_zero: separated,
        bounded_above: model.bounded_above,
        separated_theorem: local.holds() && diagonal.holds() && separated,
        radial_theorem: local.holds() && radial.holds() && origin.holds(),
        diagonal_theorem: local.holds() && diagonal.holds() && bounded.holds() && origin.holds(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn power(d: usize, limits: Vec<f64>, beta: f64) -> IntensityModel {
        IntensityModel::new(d, limits, Profile::RadialPower { beta, cutoff: 1.0 }).unwrap()
    }

    #[test]
    fn quadrant_examples() {
        assert_eq!(octant_of(&[1.0, 1.0], 2).unwrap().bits(), &[false, false]);
        assert_eq!(octant_of(&[-1.0, 2.0], 2).unwrap().bits(), &[true, false]);
        assert_eq!(
            octant_of(&[0.0, 0.0, 0.0], 3).unwrap().bits(),
            &[false, false, false]
        );
        // quadrant III is (1,1) -> index 3, quadrant IV is (0,1) -> index 2
        assert_eq!(octant_of(&[-1.0, -1.0], 2).unwrap().index(), 3);
        assert_eq!(octant_of(&[1.0, -1.0], 2).unwrap().index(), 2);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        assert!(matches!(
            octant_of(&[1.0], 2),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        let m = IntensityModel::constant(2, 1.0).unwrap();
        assert!(m.intensity_at(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn index_roundtrip() {
        for d in 1..6 {
            for i in 0..(1 << d) {
                assert_eq!(OctantIndex::from_index(d, i).unwrap().index(), i);
            }
        }
        assert!(OctantIndex::from_index(2, 4).is_err());
    }

    #[test]
    fn intensity_examples() {
        let m = IntensityModel::constant(3, 1.0).unwrap();
        assert_eq!(m.intensity_at(&[0.3, -2.0, 7.0]).unwrap(), 1.0);

        let m = power(2, vec![4.0, 1.0, 1.0, 1.0], 1.0);
        let v = m.intensity_at(&[0.5, 0.5]).unwrap();
        assert!((v - 4.0 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((v - 2.8284).abs() < 1e-4);
        assert_eq!(m.intensity_at(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn upsilon_examples() {
        let m = IntensityModel::constant(2, 1.0).unwrap();
        assert_eq!(m.upsilon_at(&[3.0, -1.0]).unwrap(), 1.0);
        let m = IntensityModel::new(2, vec![4.0, 1.0, 1.0, 0.5], Profile::Constant).unwrap();
        assert_eq!(m.upsilon_at(&[1.0, 1.0]).unwrap(), 0.25);
        assert_eq!(m.upsilon_at(&[-1.0, -1.0]).unwrap(), 2.0);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(IntensityModel::new(2, vec![1.0; 3], Profile::Constant).is_err());
        assert!(IntensityModel::new(1, vec![1.0, 0.0], Profile::Constant).is_err());
        assert!(IntensityModel::new(1, vec![1.0, -2.0], Profile::Constant).is_err());
        assert!(IntensityModel::new(0, vec![1.0], Profile::Constant).is_err());
        assert!(IntensityModel::new(
            1,
            vec![1.0, 1.0],
            Profile::RadialPower {
                beta: 1.0,
                cutoff: 0.0
            }
        )
        .is_err());
    }

    #[test]
    fn assumptions_constant() {
        let r = IntensityModel::constant(2, 3.0).unwrap().validate_assumptions();
        assert!(r.local_integrability.holds());
        assert!(r.diagonal_limits.holds());
        assert!(r.bounded_at_infinity.holds());
        assert!(r.radial_limits.holds());
        assert!(r.origin_integrability.holds());
        assert!(r.separated_theorem);
        assert_eq!(r.bounded_above, Some(3.0));
    }

    #[test]
    fn assumptions_radial_power() {
        let r = power(3, vec![1.0; 8], 1.5).validate_assumptions();
        assert!(r.origin_integrability.holds());
        assert!(r.bounded_at_infinity.holds());
        assert!(!r.separated_from_zero);
        assert!(!r.separated_theorem);
        assert!(r.radial_theorem);

        let r = power(3, vec![1.0; 8], 2.5).validate_assumptions();
        assert_eq!(r.origin_integrability, Verdict::Fails);
        assert!(r.local_integrability.holds());
        assert!(!r.radial_theorem && !r.diagonal_theorem);

        let r = power(2, vec![1.0; 4], 2.0).validate_assumptions();
        assert_eq!(r.local_integrability, Verdict::Fails);
        assert_eq!(r.origin_integrability, Verdict::Fails);

        let r = power(1, vec![1.0; 2], 0.5).validate_assumptions();
        assert_eq!(r.origin_integrability, Verdict::Undetermined);
    }

    #[test]
    fn smooth_profile_bound() {
        let m = IntensityModel::new(2, vec![1.0, 2.0, 3.0, 4.0], Profile::RadialSmooth { scale: 1.0 })
            .unwrap();
        assert_eq!(m.bounded_above(), Some(8.0));
        assert_eq!(m.intensity_at(&[0.0, 0.0]).unwrap(), 2.0);
        assert!(m.validate_assumptions().separated_theorem);
    }

    fn nonzero() -> impl Strategy<Value = f64> {
        prop_oneof![1e-6..1e3f64, -1e3..-1e-6f64]
    }

    fn model_strategy() -> impl Strategy<Value = IntensityModel> {
        (1usize..4).prop_flat_map(|d| {
            (
                Just(d),
                proptest::collection::vec(0.1..10.0f64, 1 << d),
                0usize..3,
                0.0..1.9f64,
            )
                .prop_map(|(d, limits, kind, beta)| {
                    let profile = match kind {
                        0 => Profile::Constant,
                        1 => Profile::RadialPower { beta, cutoff: 1.0 },
                        _ => Profile::RadialSmooth { scale: 1.0 },
                    };
                    IntensityModel::new(d, limits, profile).unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn point_lies_in_its_octant(x in proptest::collection::vec(nonzero(), 1..6)) {
            let o = octant_of(&x, x.len()).unwrap();
            prop_assert!(o.contains(&x));
        }

        #[test]
        fn octant_constant_along_rays(
            x in proptest::collection::vec(nonzero(), 1..6),
            t in 1e-3..1e3f64,
        ) {
            let y: Vec<f64> = x.iter().map(|v| v * t).collect();
            prop_assert_eq!(octant_of(&x, x.len()).unwrap(), octant_of(&y, y.len()).unwrap());
        }

        #[test]
        fn upsilon_times_limit_is_one(
            m in model_strategy(),
            seed in proptest::collection::vec(-5.0..5.0f64, 3),
        ) {
            let x: Vec<f64> = seed.iter().cycle().take(m.dimension()).cloned().collect();
            let o = m.octant_of(&x).unwrap();
            // 1/λ·λ is 1 up to one rounding of the reciprocal
            prop_assert!((m.upsilon_at(&x).unwrap() * m.limit(&o) - 1.0).abs() <= f64::EPSILON);
        }

        #[test]
        fn intensity_positive_and_converges_along_rays(
            m in model_strategy(),
            dir in proptest::collection::vec(nonzero(), 3),
        ) {
            let d = m.dimension();
            let u: Vec<f64> = dir.iter().take(d).cloned().collect();
            let nu = norm(&u);
            let o = m.octant_of(&u).unwrap();
            prop_assert!(m.intensity_at(&u).unwrap() > 0.0);
            for r in [1e2, 1e4] {
                let x: Vec<f64> = u.iter().map(|v| v / nu * r).collect();
                let lam = m.intensity_at(&x).unwrap();
                let tol = m.limit(&o) * m.profile().tail_deviation(r) + 1e-12;
                prop_assert!((lam - m.limit(&o)).abs() <= tol);
            }
        }
    }
}
