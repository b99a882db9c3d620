//! Directions on the unit sphere and the samplers built on them.
//!
//! A [`UnitVector`] plays every geometric role in the EPRB setup: the two
//! analyzer axes, the hidden variables carried by each particle, and the axis
//! of a prepared eigenstate. All sampling goes through [`RandomSource`], so
//! every draw is reproducible from a seed and a stream index.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use crate::rng::RandomSource;

/// Maximum deviation of |v| from 1 after construction.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Inputs whose norm is within this distance of 1 are renormalized; anything
/// farther is rejected as a caller bug rather than round-off.
pub const RENORMALIZE_WINDOW: f64 = 1e-6;

/// A direction in R³ with |v| = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub const X: UnitVector = UnitVector {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };
    pub const Y: UnitVector = UnitVector {
        x: 0.0,
        y: 1.0,
        z: 0.0,
    };
    pub const Z: UnitVector = UnitVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
    };

    /// Builds a unit vector, renormalizing inputs within [`RENORMALIZE_WINDOW`]
    /// of unit length and rejecting the rest.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > RENORMALIZE_WINDOW {
            return Err(Error::NotUnit { x, y, z, norm });
        }
        Ok(Self::from_components_unchecked(
            x / norm,
            y / norm,
            z / norm,
        ))
    }

    /// Normalizes an arbitrary nonzero finite vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotUnit { x, y, z, norm });
        }
        Ok(Self::from_components_unchecked(
            x / norm,
            y / norm,
            z / norm,
        ))
    }

    /// Direction with polar angle `theta` from +z and azimuth `phi` from +x.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::from_components_unchecked(st * cp, st * sp, ct)
    }

    /// Direction in the x–z plane at angle `theta` from +z, towards +x.
    ///
    /// This is the coplanar convention used for all angle-parameterized
    /// experiments: the first analyzer sits on +z and the second at `theta`.
    pub fn in_xz_plane(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_components_unchecked(s, 0.0, c)
    }

    pub(crate) const fn from_components_unchecked(x: f64, y: f64, z: f64) -> Self {
        UnitVector { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Angle between two directions in `[0, π]`.
    pub fn angle_to(&self, other: &UnitVector) -> f64 {
        angle_between(self, other)
    }

    /// Two unit vectors that complete `self` to a right-handed orthonormal
    /// frame (branchless construction of Duff et al.).
    pub fn orthonormal_basis(&self) -> (UnitVector, UnitVector) {
        let sign = 1.0_f64.copysign(self.z);
        let a = -1.0 / (sign + self.z);
        let b = self.x * self.y * a;
        let e1 = UnitVector::from_components_unchecked(
            1.0 + sign * self.x * self.x * a,
            sign * b,
            -sign * self.x,
        );
        let e2 = UnitVector::from_components_unchecked(b, sign + self.y * self.y * a, -self.y);
        (e1, e2)
    }

    /// Rotates `self` by `theta` towards `toward` within the plane they span.
    ///
    /// `toward` must be orthogonal to `self`.
    pub fn rotate_towards(&self, toward: &UnitVector, theta: f64) -> UnitVector {
        let (s, c) = theta.sin_cos();
        UnitVector::from_components_unchecked(
            c * self.x + s * toward.x,
            c * self.y + s * toward.y,
            c * self.z + s * toward.z,
        )
    }
}

impl Neg for UnitVector {
    type Output = UnitVector;

    fn neg(self) -> UnitVector {
        UnitVector::from_components_unchecked(-self.x, -self.y, -self.z)
    }
}

impl TryFrom<[f64; 3]> for UnitVector {
    type Error = Error;

    fn try_from([x, y, z]: [f64; 3]) -> Result<Self> {
        UnitVector::new(x, y, z)
    }
}

impl From<UnitVector> for [f64; 3] {
    fn from(v: UnitVector) -> [f64; 3] {
        v.to_array()
    }
}

impl fmt::Display for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A sign ±1, used for eigenstate labels and hemisphere orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_i8())
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.as_i8()
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Sign::Plus),
            "-1" | "-" | "minus" => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got `{other}`")),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Angle between `u` and `v` in radians, `arccos(clamp(u·v, −1, 1))`.
pub fn angle_between(u: &UnitVector, v: &UnitVector) -> f64 {
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// Draws a direction uniformly distributed over the sphere.
///
/// Uses a uniform cosine of the polar angle and a uniform azimuth, which has
/// constant cost per draw.
pub fn sample_uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> UnitVector {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = 2.0 * PI * rng.random::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (s, c) = phi.sin_cos();
    UnitVector::from_components_unchecked(r * c, r * s, z)
}

/// Draws a direction on the ring `{λ : λ·axis = sign·½}` with uniform azimuth
/// about `axis`.
///
/// The ring is the support of the eigenstate distribution; since |λ| = 1 it
/// is a cone of half-angle 60° around `sign·axis`.
pub fn sample_ring<R: Rng + ?Sized>(axis: &UnitVector, sign: Sign, rng: &mut R) -> UnitVector {
    let phi: f64 = 2.0 * PI * rng.random::<f64>();
    ring_point(axis, sign, phi)
}

/// Point of the ring at azimuth `phi`, measured from the first basis vector
/// of [`UnitVector::orthonormal_basis`].
pub fn ring_point(axis: &UnitVector, sign: Sign, phi: f64) -> UnitVector {
    const RADIAL: f64 = 0.866_025_403_784_438_6; // √3/2
    let (e1, e2) = axis.orthonormal_basis();
    let along = 0.5 * sign.as_f64();
    let (s, c) = phi.sin_cos();
    let x = along * axis.x + RADIAL * (c * e1.x + s * e2.x);
    let y = along * axis.y + RADIAL * (c * e1.y + s * e2.y);
    let z = along * axis.z + RADIAL * (c * e1.z + s * e2.z);
    UnitVector::from_components_unchecked(x, y, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn angle_identity_antipode_orthogonal() {
        let z = UnitVector::Z;
        assert_eq!(angle_between(&z, &z), 0.0);
        assert_eq!(angle_between(&z, &-z), PI);
        assert_eq!(angle_between(&z, &UnitVector::X), FRAC_PI_2);
    }

    #[test]
    fn angle_clamps_round_off() {
        let v = UnitVector::new(1.0, 1e-9, 0.0).unwrap();
        let a = angle_between(&v, &v);
        assert!(a.is_finite() && a < 1e-7);
    }

    #[test]
    fn construction_renormalizes_within_window() {
        let v = UnitVector::new(0.0, 0.0, 1.0 + 5e-7).unwrap();
        assert!((v.norm() - 1.0).abs() <= UNIT_TOLERANCE);
        let w = UnitVector::new(0.6, 0.8, 1e-7).unwrap();
        assert!((w.norm() - 1.0).abs() <= UNIT_TOLERANCE);
    }

    #[test]
    fn construction_rejects_far_from_unit() {
        assert!(matches!(
            UnitVector::new(1.0, 1.0, 0.0),
            Err(Error::NotUnit { .. })
        ));
        assert!(UnitVector::new(0.0, 0.0, 0.0).is_err());
        assert!(UnitVector::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(UnitVector::normalize(0.0, 0.0, 0.0).is_err());
        assert!(UnitVector::normalize(3.0, 4.0, 0.0).is_ok());
    }

    #[test]
    fn negation_is_exact_involution() {
        let v = UnitVector::normalize(0.3, -0.2, 0.9).unwrap();
        assert_eq!(-(-v), v);
    }

    #[test]
    fn basis_is_orthonormal() {
        for v in [
            UnitVector::X,
            UnitVector::Z,
            -UnitVector::Z,
            UnitVector::normalize(0.1, -0.7, 0.2).unwrap(),
            UnitVector::normalize(-1e-9, 0.0, -1.0).unwrap(),
        ] {
            let (e1, e2) = v.orthonormal_basis();
            assert!((e1.norm() - 1.0).abs() < 1e-12);
            assert!((e2.norm() - 1.0).abs() < 1e-12);
            assert!(e1.dot(&v).abs() < 1e-12);
            assert!(e2.dot(&v).abs() < 1e-12);
            assert!(e1.dot(&e2).abs() < 1e-12);
        }
        let (e1, e2) = UnitVector::Z.orthonormal_basis();
        assert_eq!(e1, UnitVector::X);
        assert_eq!(e2, UnitVector::Y);
    }

    #[test]
    fn ring_points_sit_on_the_ring() {
        let mut rng = RandomSource::new(3, 0);
        for sign in [Sign::Plus, Sign::Minus] {
            for _ in 0..1000 {
                let l = sample_ring(&UnitVector::Z, sign, &mut rng);
                assert!((l.z() - 0.5 * sign.as_f64()).abs() <= 1e-12);
                assert!((l.norm() - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("+1".parse::<Sign>().unwrap(), Sign::Plus);
        assert_eq!("-1".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("0".parse::<Sign>().is_err());
        assert_eq!(-Sign::Plus, Sign::Minus);
    }

    #[test]
    fn array_conversion_validates() {
        assert_eq!(<[f64; 3]>::from(UnitVector::X), [1.0, 0.0, 0.0]);
        assert!(UnitVector::try_from([2.0, 0.0, 0.0]).is_err());
    }
}
