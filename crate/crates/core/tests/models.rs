use std::f64::consts::PI;

use eprb_core::{
    born_probability, matzkin_pair_expectation_analytic, measure_from_distribution, naive_measure,
    naive_pair_expectation_analytic, qm_pair_expectation, sample_uniform_sphere, HvDistribution,
    RandomSource, Sign, SpinOutcome, UnitVector,
};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = UnitVector> {
    (-1.0f64..1.0, 0.0f64..2.0 * PI)
        .prop_map(|(mu, phi)| UnitVector::from_spherical(mu.acos(), phi))
}

fn sign() -> impl Strategy<Value = Sign> {
    any::<bool>().prop_map(|p| if p { Sign::Plus } else { Sign::Minus })
}

proptest! {
    #[test]
    fn born_outcomes_sum_to_one_exactly(state in unit(), s in sign(), meas in unit()) {
        let up = born_probability(&state, s, &meas, SpinOutcome::Up);
        let down = born_probability(&state, s, &meas, SpinOutcome::Down);
        prop_assert_eq!(up + down, 1.0);
        prop_assert!((0.0..=1.0).contains(&up));
    }

    #[test]
    fn born_matches_half_angle_form(state in unit(), meas in unit()) {
        let theta = eprb_core::angle_between(&state, &meas);
        let up = born_probability(&state, Sign::Plus, &meas, SpinOutcome::Up);
        prop_assert!((up - (theta / 2.0).cos().powi(2)).abs() < 1e-12);
        let up_minus = born_probability(&state, Sign::Minus, &meas, SpinOutcome::Up);
        prop_assert!((up_minus - (theta / 2.0).sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn sign_rule_antisymmetry(u in unit(), l in unit()) {
        prop_assume!(u.dot(&l).abs() > 1e-15);
        prop_assert_eq!(naive_measure(&u, &l), -naive_measure(&u, &-l));
        prop_assert_eq!(naive_measure(&-u, &l), -naive_measure(&u, &l));
    }

    #[test]
    fn conditioned_analytic_is_singlet(a in unit(), b in unit()) {
        prop_assert_eq!(matzkin_pair_expectation_analytic(&a, &b), qm_pair_expectation(&a, &b));
        let e = qm_pair_expectation(&a, &b);
        prop_assert!((-0.25..=0.25).contains(&e));
    }

    #[test]
    fn naive_analytic_is_monotone(t1 in 0.0f64..=PI, t2 in 0.0f64..=PI) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(naive_pair_expectation_analytic(lo).unwrap() <= naive_pair_expectation_analytic(hi).unwrap());
    }

    #[test]
    fn outcome_products_are_quarter_valued(a in any::<bool>(), b in any::<bool>()) {
        let o = |up| if up { SpinOutcome::Up } else { SpinOutcome::Down };
        let p = o(a).product_value(o(b));
        prop_assert!(p == 0.25 || p == -0.25);
        prop_assert_eq!(p, o(a).value() * o(b).value());
    }
}

#[test]
fn sign_rule_is_balanced_on_the_sphere() {
    let u = UnitVector::normalize(0.3, 0.5, -0.8).unwrap();
    let mut rng = RandomSource::new(21, 0);
    let n = 1_000_000;
    let ups = (0..n)
        .filter(|_| naive_measure(&u, &sample_uniform_sphere(&mut rng)) == SpinOutcome::Up)
        .count();
    assert!((ups as f64 / n as f64 - 0.5).abs() < 0.002);
}

#[test]
fn conditioned_hemisphere_along_its_own_axis_is_certain() {
    let a = UnitVector::normalize(1.0, 1.0, 1.0).unwrap();
    let dist = HvDistribution::HalfSphere {
        axis: a,
        sign: Sign::Minus,
    };
    let mut rng = RandomSource::new(22, 0);
    for _ in 0..1_000_000 {
        let lambda = dist.sample(&mut rng);
        let o = measure_from_distribution(&dist, &a, &lambda, &mut rng).unwrap();
        assert_eq!(o, SpinOutcome::Down);
    }
}

#[test]
fn conditioned_hemisphere_follows_born_rule() {
    // eigenstate −½ along z measured at 60°: cos²30° = 0.75 for −½, so 0.25 for +½
    let oracle_down = (30f64.to_radians().cos()).powi(2);
    let oracle_up = 1.0 - oracle_down;
    assert!((oracle_up - 0.25).abs() < 1e-15);

    let b = UnitVector::in_xz_plane(PI / 3.0);
    let dist = HvDistribution::HalfSphere {
        axis: UnitVector::Z,
        sign: Sign::Minus,
    };
    let mut rng = RandomSource::new(23, 0);
    let n = 1_000_000;
    let mut ups = 0;
    for _ in 0..n {
        let lambda = dist.sample(&mut rng);
        if measure_from_distribution(&dist, &b, &lambda, &mut rng).unwrap() == SpinOutcome::Up {
            ups += 1;
        }
    }
    assert!((ups as f64 / n as f64 - oracle_up).abs() < 0.002);
}

#[test]
fn ring_distribution_uses_born_rule_not_lambda() {
    let ring = HvDistribution::EigenRing {
        axis: UnitVector::Z,
        sign: Sign::Plus,
    };
    let b = UnitVector::in_xz_plane(PI / 3.0);
    let mut rng = RandomSource::new(24, 0);
    // a λ on the ring pointing away from b; the sign rule would give −½
    let lambda = eprb_core::geometry::ring_point(&UnitVector::Z, Sign::Plus, PI);
    assert_eq!(naive_measure(&b, &lambda), SpinOutcome::Down);
    let n = 200_000;
    let ups = (0..n)
        .filter(|_| {
            measure_from_distribution(&ring, &b, &lambda, &mut rng).unwrap() == SpinOutcome::Up
        })
        .count();
    assert!((ups as f64 / n as f64 - 0.75).abs() < 0.005);
}
