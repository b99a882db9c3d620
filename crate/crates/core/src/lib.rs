//! Simulation toolkit for hidden-variable models of the EPRB experiment.
//!
//! Three engines predict the spin correlations of a singlet pair:
//!
//! * [`ModelKind::QuantumReference`]: sequential Born-rule sampling,
//!   `E(a,b) = −(a·b)/4`.
//! * [`ModelKind::BellNaive`]: both outcomes from the sign of `u·λ` with
//!   λ₂ = −λ₁, giving `E = −¼ + θ/2π`.
//! * [`ModelKind::MatzkinConditioned`]: particle 1 uses the sign rule, then
//!   particle 2's hidden-variable distribution is replaced by the hemisphere
//!   selected by particle 1's axis and outcome. It reproduces the singlet
//!   correlations, and [`analysis::locality_audit`] shows that it does so by
//!   reading remote information.
//!
//! The [`experiment`] module runs reproducible Monte Carlo trials and sphere
//! quadratures; [`analysis`] builds the CHSH and Bell-1964 checks, the
//! locality and no-signaling audits and the ring-consistency check on top.

pub mod analysis;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod models;
pub mod rng;

pub use analysis::{
    angle_sweep, bell1964_check, chsh_scan, locality_audit, no_signaling_check,
    ring_consistency_check, Bell1964Report, ChshReport, ChshSettings, LocalityEntry,
    LocalityReport, MarginalEntry, NoSignalingReport, RingConsistencyReport, SweepRow, TiePolicy,
};
pub use error::{Error, Result};
pub use experiment::{
    estimate_correlation, quadrature_expectation, quadrature_expectation_grid, run_pair_trial,
    CorrelationEstimate, ExperimentConfig, QuadratureResult,
};
pub use geometry::{angle_between, sample_ring, sample_uniform_sphere, Sign, UnitVector};
pub use models::{
    born_probability, conditioned_distribution, matzkin_pair_expectation_analytic,
    measure_from_distribution, naive_measure, naive_pair_expectation_analytic, qm_pair_expectation,
    HvDistribution, ModelKind, SpinOutcome,
};
pub use rng::{derive_stream, RandomSource};
