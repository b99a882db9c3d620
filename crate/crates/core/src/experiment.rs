//! Monte Carlo EPRB pair experiments and the sphere quadrature that checks
//! them.
//!
//! Every trial draws λ₁ uniformly on the sphere and pairs it with λ₂ = −λ₁.
//! Trial `i` of an experiment always runs on stream `i` derived from the
//! experiment's base [`RandomSource`], and tallies are integer counts, so the
//! result is bit-identical for any thread count or scheduling order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between, sample_uniform_sphere, RandomSource, UnitVector};
use crate::models::{
    born_draw, born_probability, conditioned_distribution, measure_from_distribution,
    naive_measure, ModelKind, SpinOutcome,
};

/// Trials handled by one parallel work item.
const CHUNK: u64 = 4096;

/// Grid side used when callers do not choose one.
pub const DEFAULT_QUADRATURE_SIDE: usize = 256;

/// Below this many nodes the quadrature result carries an accuracy warning.
pub const MIN_QUADRATURE_NODES: usize = 64;

/// One correlation experiment: an engine, two analyzer axes, a trial count
/// and a seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub a: UnitVector,
    pub b: UnitVector,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(model: ModelKind, a: UnitVector, b: UnitVector, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            model,
            a,
            b,
            trials,
            seed,
        }
    }

    /// Coplanar settings: `a` on +z and `b` at `theta` in the x–z plane.
    pub fn at_angle(model: ModelKind, theta: f64, trials: u64, seed: u64) -> Self {
        Self::new(
            model,
            UnitVector::Z,
            UnitVector::in_xz_plane(theta),
            trials,
            seed,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Base stream every trial is derived from.
    pub fn source(&self) -> RandomSource {
        RandomSource::new(self.seed, 0)
    }
}

/// Monte Carlo estimate of the pair correlation `E(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub model: ModelKind,
    pub a: UnitVector,
    pub b: UnitVector,
    /// Mean of the products of the two outcome values.
    pub mean: f64,
    /// Sample standard deviation over √trials.
    pub std_error: f64,
    pub trials: u64,
    /// Trials whose outcomes had equal signs (product `+¼`).
    pub concordant: u64,
}

impl CorrelationEstimate {
    /// Builds the estimate from the count of `+¼` products.
    ///
    /// Products are two-valued, so the unbiased sample variance is
    /// `(1/16 − mean²)·n/(n−1)` exactly. A single trial has no spread
    /// estimate and reports a zero standard error.
    pub fn from_tally(
        model: ModelKind,
        a: UnitVector,
        b: UnitVector,
        trials: u64,
        concordant: u64,
    ) -> Self {
        assert!(trials >= 1 && concordant <= trials);
        let n = trials as f64;
        let net = 2.0 * concordant as f64 - n;
        let mean = 0.25 * net / n;
        let std_error = if trials == 1 {
            0.0
        } else {
            let var = (0.0625 - mean * mean).max(0.0) * n / (n - 1.0);
            (var / n).sqrt()
        };
        CorrelationEstimate {
            model,
            a,
            b,
            mean,
            std_error,
            trials,
            concordant,
        }
    }

    pub fn theta(&self) -> f64 {
        angle_between(&self.a, &self.b)
    }
}

/// One EPRB trial: returns the outcomes of particle 1 (along `a`) and
/// particle 2 (along `b`).
pub fn run_pair_trial(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    rng: &mut RandomSource,
) -> Result<(SpinOutcome, SpinOutcome)> {
    let lambda1 = sample_uniform_sphere(rng);
    run_pair_trial_with_lambda(model, a, b, &lambda1, rng)
}

/// Pair trial with particle 1's hidden variable fixed to `lambda1`.
///
/// The quantum reference has no hidden variable and ignores `lambda1`.
pub fn run_pair_trial_with_lambda(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    lambda1: &UnitVector,
    rng: &mut RandomSource,
) -> Result<(SpinOutcome, SpinOutcome)> {
    let lambda2 = -*lambda1;
    match model {
        ModelKind::BellNaive => Ok((naive_measure(a, lambda1), naive_measure(b, &lambda2))),
        ModelKind::MatzkinConditioned => {
            let first = naive_measure(a, lambda1);
            let dist2 = conditioned_distribution(a, first);
            // λ₂·a has the sign opposite to the outcome, so λ₂ is always in
            // the conditioned hemisphere; a support error here is a bug.
            let second = measure_from_distribution(&dist2, b, &lambda2, rng)?;
            Ok((first, second))
        }
        ModelKind::QuantumReference => {
            let first = if rand::Rng::random::<bool>(rng) {
                SpinOutcome::Up
            } else {
                SpinOutcome::Down
            };
            let second = born_draw(a, -first.sign(), b, rng);
            Ok((first, second))
        }
    }
}

/// Runs `config.trials` independent trials and averages the outcome
/// products.
pub fn estimate_correlation(config: &ExperimentConfig) -> Result<CorrelationEstimate> {
    config.validate()?;
    estimate_with_source(
        config.model,
        &config.a,
        &config.b,
        config.trials,
        &config.source(),
    )
}

/// [`estimate_correlation`] with an explicit base stream. Trial `i` runs on
/// `base.derive_stream(i)`.
pub fn estimate_with_source(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    trials: u64,
    base: &RandomSource,
) -> Result<CorrelationEstimate> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let concordant = count_parallel(trials, |i| {
        let mut rng = base.derive_stream(i);
        let (o1, o2) = run_pair_trial(model, a, b, &mut rng)?;
        Ok(o1 == o2)
    })?;
    Ok(CorrelationEstimate::from_tally(
        model, *a, *b, trials, concordant,
    ))
}

/// Counts the trials in `0..trials` for which `hit` returns true, in
/// parallel chunks. The count does not depend on how chunks are scheduled.
pub(crate) fn count_parallel<F>(trials: u64, hit: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(trials);
            let mut count = 0u64;
            for i in start..end {
                if hit(i)? {
                    count += 1;
                }
            }
            Ok(count)
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))
}

/// Outcome of a sphere quadrature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
    /// Set when the grid is too coarse for the result to be trusted.
    pub warning: Option<String>,
}

impl QuadratureResult {
    pub fn nodes(&self) -> usize {
        self.polar_nodes * self.azimuth_nodes
    }
}

/// Integrates the trial-level expected product over λ₁ with the uniform
/// measure `dΩ/4π`, on a square grid with about `nodes` points.
///
/// Only the two hidden-variable engines have a λ₁ integrand.
pub fn quadrature_expectation(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    nodes: usize,
) -> Result<QuadratureResult> {
    let side = (nodes as f64).sqrt().floor().max(1.0) as usize;
    quadrature_expectation_grid(model, a, b, side, side)
}

/// Midpoint rule on a product grid uniform in `cos θ` and `φ`. Cells of that
/// grid have equal solid angle, so all weights are `1/(polar·azimuth)`.
pub fn quadrature_expectation_grid(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    polar: usize,
    azimuth: usize,
) -> Result<QuadratureResult> {
    if model == ModelKind::QuantumReference {
        return Err(Error::UnsupportedModel {
            model,
            operation: "quadrature_expectation",
        });
    }
    let polar = polar.max(1);
    let azimuth = azimuth.max(1);
    let d_mu = 2.0 / polar as f64;
    let d_phi = 2.0 * std::f64::consts::PI / azimuth as f64;

    let mut total = 0.0;
    for i in 0..polar {
        let mu = -1.0 + (i as f64 + 0.5) * d_mu;
        let rho = (1.0 - mu * mu).max(0.0).sqrt();
        let mut ring = 0.0;
        for j in 0..azimuth {
            let (s, c) = ((j as f64 + 0.5) * d_phi).sin_cos();
            let lambda1 = UnitVector::from_components_unchecked(rho * c, rho * s, mu);
            ring += expected_product(model, a, b, &lambda1);
        }
        total += ring;
    }
    let count = polar * azimuth;
    let warning = (count < MIN_QUADRATURE_NODES).then(|| {
        format!("{count} quadrature nodes is below the minimum of {MIN_QUADRATURE_NODES}")
    });
    Ok(QuadratureResult {
        value: total / count as f64,
        polar_nodes: polar,
        azimuth_nodes: azimuth,
        warning,
    })
}

/// Expected product of outcome values for a fixed λ₁, averaging only over
/// the model's own randomness.
fn expected_product(model: ModelKind, a: &UnitVector, b: &UnitVector, lambda1: &UnitVector) -> f64 {
    let lambda2 = -*lambda1;
    let first = naive_measure(a, lambda1);
    match model {
        ModelKind::BellNaive => first.product_value(naive_measure(b, &lambda2)),
        ModelKind::MatzkinConditioned => {
            let dist2 = conditioned_distribution(a, first);
            let (axis, sign) = dist2
                .eigenstate()
                .expect("conditioned distribution is a hemisphere");
            debug_assert!(dist2.contains(&lambda2));
            let p_up = born_probability(&axis, sign, b, SpinOutcome::Up);
            let p_down = born_probability(&axis, sign, b, SpinOutcome::Down);
            first.value() * (p_up * SpinOutcome::Up.value() + p_down * SpinOutcome::Down.value())
        }
        ModelKind::QuantumReference => unreachable!("rejected by caller"),
    }
}
