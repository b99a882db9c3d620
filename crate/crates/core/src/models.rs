//! The three prediction engines and the single-particle measurement rule.
//!
//! Outcomes of a spin measurement are modelled by [`SpinOutcome`]. The
//! measurement function [`measure_from_distribution`] takes the hidden
//! variable λ *and* the hidden-variable distribution R the particle is
//! assigned to. For the uniform sphere the outcome is the deterministic sign
//! rule [`naive_measure`]; for the hemisphere and ring distributions it is a
//! Born-rule draw that ignores λ entirely. That asymmetry is what makes R an
//! extra hidden variable, and it is kept visible here rather than smoothed
//! over.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample_ring, sample_uniform_sphere, Sign, UnitVector};

/// Tolerance for membership of λ in a constrained distribution's support.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;

/// Prefactor `1/(√3 π)` of the eigenstate ring density. Recorded for
/// reference only; samplers draw from the normalized ring directly.
pub const EIGEN_RING_DENSITY_PREFACTOR: f64 = 0.183_776_298_473_930_72;

/// Result of a spin-½ measurement: `+½` or `−½` in units of ħ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub enum SpinOutcome {
    Up,
    Down,
}

impl SpinOutcome {
    pub fn from_sign(sign: Sign) -> Self {
        match sign {
            Sign::Plus => SpinOutcome::Up,
            Sign::Minus => SpinOutcome::Down,
        }
    }

    pub fn sign(self) -> Sign {
        match self {
            SpinOutcome::Up => Sign::Plus,
            SpinOutcome::Down => Sign::Minus,
        }
    }

    /// Physical spin component, `±½`.
    pub fn value(self) -> f64 {
        0.5 * self.sign().as_f64()
    }

    /// Sign of the product of two outcomes. The product of values is this
    /// times `¼`.
    pub fn product_sign(self, other: SpinOutcome) -> i8 {
        self.sign().as_i8() * other.sign().as_i8()
    }

    pub fn product_value(self, other: SpinOutcome) -> f64 {
        0.25 * f64::from(self.product_sign(other))
    }
}

impl std::ops::Neg for SpinOutcome {
    type Output = SpinOutcome;

    fn neg(self) -> SpinOutcome {
        SpinOutcome::from_sign(-self.sign())
    }
}

impl From<SpinOutcome> for f64 {
    fn from(o: SpinOutcome) -> f64 {
        o.value()
    }
}

impl TryFrom<f64> for SpinOutcome {
    type Error = String;

    fn try_from(v: f64) -> std::result::Result<Self, String> {
        if v == 0.5 {
            Ok(SpinOutcome::Up)
        } else if v == -0.5 {
            Ok(SpinOutcome::Down)
        } else {
            Err(format!("spin outcome must be +0.5 or -0.5, got {v}"))
        }
    }
}

impl fmt::Display for SpinOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinOutcome::Up => "+1/2",
            SpinOutcome::Down => "-1/2",
        })
    }
}

/// Distribution of a particle's hidden variable λ over the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HvDistribution {
    /// Uniform on the whole sphere; the singlet preparation for each wing.
    UniformSphere,
    /// Uniform on the closed hemisphere `{λ : sign·(λ·axis) ≥ 0}`.
    HalfSphere { axis: UnitVector, sign: Sign },
    /// The eigenstate ring `{λ : λ·axis = sign·½}` of spin `sign·½` along
    /// `axis`.
    EigenRing { axis: UnitVector, sign: Sign },
}

impl HvDistribution {
    /// Whether λ lies in the support, within [`SUPPORT_TOLERANCE`].
    pub fn contains(&self, lambda: &UnitVector) -> bool {
        match self {
            HvDistribution::UniformSphere => true,
            HvDistribution::HalfSphere { axis, sign } => {
                sign.as_f64() * lambda.dot(axis) >= -SUPPORT_TOLERANCE
            }
            HvDistribution::EigenRing { axis, sign } => {
                (lambda.dot(axis) - 0.5 * sign.as_f64()).abs() <= SUPPORT_TOLERANCE
            }
        }
    }

    /// Draws λ from the distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitVector {
        match self {
            HvDistribution::UniformSphere => sample_uniform_sphere(rng),
            HvDistribution::HalfSphere { axis, sign } => {
                // Reflection through the origin maps the uniform measure onto
                // itself, so flipping the wrong half is exact.
                let v = sample_uniform_sphere(rng);
                if sign.as_f64() * v.dot(axis) >= 0.0 {
                    v
                } else {
                    -v
                }
            }
            HvDistribution::EigenRing { axis, sign } => sample_ring(axis, *sign, rng),
        }
    }

    /// The eigenstate `(axis, sign)` a particle with this distribution is
    /// postulated to behave like, if any.
    pub fn eigenstate(&self) -> Option<(UnitVector, Sign)> {
        match *self {
            HvDistribution::UniformSphere => None,
            HvDistribution::HalfSphere { axis, sign }
            | HvDistribution::EigenRing { axis, sign } => Some((axis, sign)),
        }
    }
}

impl fmt::Display for HvDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HvDistribution::UniformSphere => f.write_str("UniformSphere"),
            HvDistribution::HalfSphere { axis, sign } => write!(f, "HalfSphere({axis}, {sign})"),
            HvDistribution::EigenRing { axis, sign } => write!(f, "EigenRing({axis}, {sign})"),
        }
    }
}

/// Which engine produces the pair statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Sequential Born-rule sampling of the singlet correlations.
    #[serde(rename = "qm")]
    QuantumReference,
    /// Both outcomes from the sign rule on λ₁ and λ₂ = −λ₁.
    #[serde(rename = "bell-naive")]
    BellNaive,
    /// Particle 2's distribution is replaced by a hemisphere conditioned on
    /// particle 1's axis and outcome before it is measured.
    #[serde(rename = "matzkin")]
    MatzkinConditioned,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [
        ModelKind::QuantumReference,
        ModelKind::BellNaive,
        ModelKind::MatzkinConditioned,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::QuantumReference => "qm",
            ModelKind::BellNaive => "bell-naive",
            ModelKind::MatzkinConditioned => "matzkin",
        }
    }

    /// Closed-form pair correlation this engine is expected to reproduce.
    pub fn analytic_expectation(self, a: &UnitVector, b: &UnitVector) -> f64 {
        match self {
            ModelKind::QuantumReference => qm_pair_expectation(a, b),
            ModelKind::BellNaive => {
                naive_pair_expectation_analytic(crate::geometry::angle_between(a, b))
                    .expect("angle_between is always within [0, π]")
            }
            ModelKind::MatzkinConditioned => matzkin_pair_expectation_analytic(a, b),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown model `{s}` (expected qm, bell-naive or matzkin)"))
    }
}

/// Singlet expectation of the product of spin components, `−(a·b)/4`.
pub fn qm_pair_expectation(a: &UnitVector, b: &UnitVector) -> f64 {
    -a.dot(b) / 4.0
}

/// Probability of `outcome` when the eigenstate `(state_axis, state_sign)`
/// is measured along `meas_axis`.
///
/// The same-sign probability is `cos²(θ/2) = (1 + cos θ)/2`; the opposite
/// sign gets its complement, so the two always sum to exactly 1.
pub fn born_probability(
    state_axis: &UnitVector,
    state_sign: Sign,
    meas_axis: &UnitVector,
    outcome: SpinOutcome,
) -> f64 {
    let same = 0.5 * (1.0 + state_axis.dot(meas_axis).clamp(-1.0, 1.0));
    if outcome.sign() == state_sign {
        same
    } else {
        1.0 - same
    }
}

/// The sign rule: `+½` when `u·λ > 0`, `−½` when `u·λ < 0`.
///
/// The measure-zero tie `u·λ = 0` resolves to `+½`.
pub fn naive_measure(u: &UnitVector, lambda: &UnitVector) -> SpinOutcome {
    if u.dot(lambda) >= 0.0 {
        SpinOutcome::Up
    } else {
        SpinOutcome::Down
    }
}

/// Outcome of measuring along `u` a particle with hidden variable λ assigned
/// to distribution `dist`.
///
/// * `UniformSphere`: the sign rule, deterministic in λ; `rng` is untouched.
/// * `HalfSphere` / `EigenRing`: a draw from the Born probabilities of the
///   associated eigenstate. λ only has to lie in the support; it does not
///   influence the result.
pub fn measure_from_distribution<R: Rng + ?Sized>(
    dist: &HvDistribution,
    u: &UnitVector,
    lambda: &UnitVector,
    rng: &mut R,
) -> Result<SpinOutcome> {
    if !dist.contains(lambda) {
        return Err(Error::SupportViolation {
            lambda: lambda.to_array(),
            distribution: dist.to_string(),
        });
    }
    match dist.eigenstate() {
        None => Ok(naive_measure(u, lambda)),
        Some((axis, sign)) => Ok(born_draw(&axis, sign, u, rng)),
    }
}

/// Born-rule draw for the eigenstate `(axis, sign)` measured along `u`.
pub(crate) fn born_draw<R: Rng + ?Sized>(
    axis: &UnitVector,
    sign: Sign,
    u: &UnitVector,
    rng: &mut R,
) -> SpinOutcome {
    let p_up = born_probability(axis, sign, u, SpinOutcome::Up);
    if rng.random::<f64>() < p_up {
        SpinOutcome::Up
    } else {
        SpinOutcome::Down
    }
}

/// Pair correlation of the sign-rule model, `−¼ + θ/(2π)`.
pub fn naive_pair_expectation_analytic(theta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Domain {
            what: "theta",
            value: theta,
            domain: "[0, π]",
        });
    }
    Ok(-0.25 + theta / (2.0 * std::f64::consts::PI))
}

/// Pair correlation of the conditioned-distribution model. It coincides with
/// the singlet prediction `−(a·b)/4`.
pub fn matzkin_pair_expectation_analytic(a: &UnitVector, b: &UnitVector) -> f64 {
    -a.dot(b) / 4.0
}

/// Distribution assigned to particle 2 once particle 1 gave `outcome1` along
/// `a`: the hemisphere opposite to that outcome.
///
/// This update reads particle 1's setting and result; it is the step that
/// makes the conditioned model non-local.
pub fn conditioned_distribution(a: &UnitVector, outcome1: SpinOutcome) -> HvDistribution {
    HvDistribution::HalfSphere {
        axis: *a,
        sign: -outcome1.sign(),
    }
}
