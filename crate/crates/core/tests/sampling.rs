//! Statistical checks of the sphere and ring samplers and the stream
//! contract.

use std::f64::consts::PI;

use eprb_core::{sample_ring, sample_uniform_sphere, RandomSource, Sign, UnitVector};
use nalgebra::{Rotation3, Unit, Vector3};
use proptest::prelude::*;
use rand::RngCore;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const N: u64 = 1_000_000;

fn draws(seed: u64) -> impl Iterator<Item = UnitVector> {
    let base = RandomSource::new(seed, 0);
    let mut rng = base.derive_stream(0);
    (0..N).map(move |_| sample_uniform_sphere(&mut rng))
}

fn chi_squared_critical(dof: f64) -> f64 {
    ChiSquared::new(dof).unwrap().inverse_cdf(0.999)
}

/// ∫ z² dΩ / 4π on a fine midpoint grid in cos θ.
fn z_squared_moment_by_quadrature() -> f64 {
    let n = 100_000;
    (0..n)
        .map(|i| {
            let mu = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
            mu * mu
        })
        .sum::<f64>()
        / n as f64
}

#[test]
fn uniform_sphere_moments() {
    let (mut sx, mut sy, mut sz, mut szz) = (0.0, 0.0, 0.0, 0.0);
    for v in draws(1) {
        assert!((v.norm() - 1.0).abs() <= 1e-12);
        sx += v.x();
        sy += v.y();
        sz += v.z();
        szz += v.z() * v.z();
    }
    let n = N as f64;
    let tol = 4.0 / n.sqrt();
    for (name, m) in [("x", sx / n), ("y", sy / n), ("z", sz / n)] {
        assert!(m.abs() < tol, "mean {name} = {m}");
    }
    let oracle = z_squared_moment_by_quadrature();
    assert!((oracle - 1.0 / 3.0).abs() < 1e-9);
    assert!((szz / n - oracle).abs() < 0.005, "<z²> = {}", szz / n);
}

#[test]
fn uniform_sphere_chi_squared_on_equal_area_bins() {
    // 10 bands of equal width in cos θ times 10 azimuth sectors: 100 cells
    // of equal solid angle.
    let mut counts = [0u64; 100];
    for v in draws(2) {
        let band = (((v.z() + 1.0) / 2.0 * 10.0) as usize).min(9);
        let phi = v.y().atan2(v.x()).rem_euclid(2.0 * PI);
        let sector = ((phi / (2.0 * PI) * 10.0) as usize).min(9);
        counts[band * 10 + sector] += 1;
    }
    let expected = N as f64 / 100.0;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < chi_squared_critical(99.0), "chi² = {chi2}");
}

#[test]
fn ring_support_and_symmetry() {
    let mut rng = RandomSource::new(3, 0);
    let mut sum_x = 0.0;
    let mut sectors = [0u64; 36];
    for _ in 0..N {
        let l = sample_ring(&UnitVector::Z, Sign::Plus, &mut rng);
        assert!((l.z() - 0.5).abs() <= 1e-12);
        sum_x += l.x();
        let phi = l.y().atan2(l.x()).rem_euclid(2.0 * PI);
        sectors[((phi / (2.0 * PI) * 36.0) as usize).min(35)] += 1;
    }
    assert!((sum_x / N as f64).abs() < 0.004);

    let expected = N as f64 / 36.0;
    let chi2: f64 = sectors
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < chi_squared_critical(35.0), "chi² = {chi2}");

    for _ in 0..10_000 {
        let l = sample_ring(&UnitVector::Z, Sign::Minus, &mut rng);
        assert!((l.z() + 0.5).abs() <= 1e-12);
    }
}

#[test]
fn ring_azimuth_uniform_about_tilted_axis() {
    let axis = UnitVector::normalize(0.4, -0.3, 0.5).unwrap();
    let (e1, e2) = axis.orthonormal_basis();
    let mut rng = RandomSource::new(4, 9);
    let mut sectors = [0u64; 36];
    let n = 360_000u64;
    for _ in 0..n {
        let l = sample_ring(&axis, Sign::Minus, &mut rng);
        assert!((l.dot(&axis) + 0.5).abs() <= 1e-12);
        let phi = l.dot(&e2).atan2(l.dot(&e1)).rem_euclid(2.0 * PI);
        sectors[((phi / (2.0 * PI) * 36.0) as usize).min(35)] += 1;
    }
    let expected = n as f64 / 36.0;
    let chi2: f64 = sectors
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    assert!(chi2 < chi_squared_critical(35.0), "chi² = {chi2}");
}

#[test]
fn derived_streams_are_reproducible_and_distinct() {
    let s = RandomSource::new(77, 0);
    assert_eq!(s.derive_stream(5).next_u64(), s.derive_stream(5).next_u64());
    assert_ne!(s.derive_stream(0).next_u64(), s.derive_stream(1).next_u64());
    assert_ne!(
        RandomSource::new(1, 0).derive_stream(0).next_u64(),
        RandomSource::new(2, 0).derive_stream(0).next_u64()
    );
}

fn unit() -> impl Strategy<Value = UnitVector> {
    (-1.0f64..1.0, 0.0f64..2.0 * PI)
        .prop_map(|(mu, phi)| UnitVector::from_spherical(mu.acos(), phi))
}

fn rotate(q: &Rotation3<f64>, v: &UnitVector) -> UnitVector {
    let r = q * Vector3::new(v.x(), v.y(), v.z());
    UnitVector::new(r.x, r.y, r.z).unwrap()
}

proptest! {
    #[test]
    fn angle_is_rotation_invariant(u in unit(), v in unit(), axis in unit(), angle in 0.0f64..2.0 * PI) {
        let q = Rotation3::from_axis_angle(
            &Unit::new_normalize(Vector3::new(axis.x(), axis.y(), axis.z())),
            angle,
        );
        let before = eprb_core::angle_between(&u, &v);
        let after = eprb_core::angle_between(&rotate(&q, &u), &rotate(&q, &v));
        // arccos loses half its digits next to 0 and π
        let tol = if before.sin() > 1e-4 { 1e-9 } else { 1e-7 };
        prop_assert!((before - after).abs() < tol, "{} vs {}", before, after);
    }

    #[test]
    fn angle_is_symmetric_and_bounded(u in unit(), v in unit()) {
        let a = eprb_core::angle_between(&u, &v);
        prop_assert_eq!(a, eprb_core::angle_between(&v, &u));
        prop_assert!((0.0..=PI).contains(&a));
    }

    #[test]
    fn constructed_vectors_are_unit(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        prop_assume!(x * x + y * y + z * z > 1e-6);
        let v = UnitVector::normalize(x, y, z).unwrap();
        prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(-(-v), v);
        let w = UnitVector::new(v.x() * (1.0 + 1e-7), v.y() * (1.0 + 1e-7), v.z() * (1.0 + 1e-7)).unwrap();
        prop_assert!((w.norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn ring_samples_stay_on_ring(axis in unit(), seed in any::<u64>(), plus in any::<bool>()) {
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let mut rng = RandomSource::new(seed, 0);
        for _ in 0..32 {
            let l = sample_ring(&axis, sign, &mut rng);
            prop_assert!((l.dot(&axis) - 0.5 * sign.as_f64()).abs() <= 1e-12);
            prop_assert!((l.norm() - 1.0).abs() <= 1e-12);
        }
    }
}
