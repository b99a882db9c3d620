//! Inequality checks and locality audits built on the experiment runner.
//!
//! Outcomes here are `±½`, so the usual bounds shrink by a factor of 4:
//! local models satisfy `|S| ≤ ½` for CHSH and quantum mechanics reaches
//! `√2/2`. Every violation or dependence flag carries statistical slack so
//! Monte Carlo noise alone cannot raise it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{
    count_parallel, estimate_with_source, run_pair_trial_with_lambda, CorrelationEstimate,
};
use crate::geometry::{angle_between, RandomSource, Sign, UnitVector};
use crate::models::{
    born_probability, matzkin_pair_expectation_analytic, naive_measure,
    naive_pair_expectation_analytic, qm_pair_expectation, HvDistribution, ModelKind, SpinOutcome,
};
use crate::rng::stream_key;

/// CHSH bound for local models with `±½` outcomes.
pub const CHSH_LOCAL_BOUND: f64 = 0.5;

/// Largest CHSH value quantum mechanics allows with `±½` outcomes (`√2/2`).
pub const CHSH_TSIRELSON_BOUND: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Slack, in standard errors, before an inequality counts as violated.
pub const VIOLATION_SIGMAS: f64 = 3.0;

/// Two-proportion z-score above which conditional statistics count as
/// different.
pub const DEPENDENCE_SIGMAS: f64 = 5.0;

/// Probe λ₁ closer than this to a setting's equator falls on the sign-rule
/// tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Base stream for the experiment at settings `(a, b)`. Identical settings
/// share a stream; distinct settings get distinct ones.
fn settings_source(seed: u64, a: &UnitVector, b: &UnitVector) -> RandomSource {
    let key = stream_key(
        a.to_array()
            .into_iter()
            .chain(b.to_array())
            .map(f64::to_bits),
    );
    RandomSource::new(seed, 0).derive_stream(key)
}

fn correlation_at(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    trials: u64,
    seed: u64,
) -> Result<CorrelationEstimate> {
    estimate_with_source(model, a, b, trials, &settings_source(seed, a, b))
}

/// Analyzer axes for one CHSH run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: UnitVector,
    pub a_prime: UnitVector,
    pub b: UnitVector,
    pub b_prime: UnitVector,
}

impl ChshSettings {
    /// Coplanar preset at 0°, 90° (particle 1) and 45°, 135° (particle 2),
    /// measured from +z in the x–z plane.
    pub fn optimal_planar() -> Self {
        let at = |deg: f64| UnitVector::in_xz_plane(deg / 180.0 * std::f64::consts::PI);
        ChshSettings {
            a: at(0.0),
            a_prime: at(90.0),
            b: at(45.0),
            b_prime: at(135.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub model: ModelKind,
    pub settings: ChshSettings,
    pub e_ab: CorrelationEstimate,
    pub e_ab_prime: CorrelationEstimate,
    pub e_a_prime_b: CorrelationEstimate,
    pub e_a_prime_b_prime: CorrelationEstimate,
    /// `E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
    pub s_value: f64,
    pub s_std_error: f64,
    pub local_bound: f64,
    pub tsirelson_bound: f64,
    /// `|S| > local_bound + 3·s_std_error`.
    pub violated: bool,
}

/// Estimates the four CHSH correlations and combines them.
pub fn chsh_scan(
    model: ModelKind,
    settings: &ChshSettings,
    trials: u64,
    seed: u64,
) -> Result<ChshReport> {
    let ChshSettings {
        a,
        a_prime,
        b,
        b_prime,
    } = settings;
    let e_ab = correlation_at(model, a, b, trials, seed)?;
    let e_ab_prime = correlation_at(model, a, b_prime, trials, seed)?;
    let e_a_prime_b = correlation_at(model, a_prime, b, trials, seed)?;
    let e_a_prime_b_prime = correlation_at(model, a_prime, b_prime, trials, seed)?;

    let s_value = e_ab.mean - e_ab_prime.mean + e_a_prime_b.mean + e_a_prime_b_prime.mean;
    // Identical setting pairs share a stream, so their errors add coherently.
    let s_std_error = combined_std_error(&[
        (&e_ab, 1.0),
        (&e_ab_prime, -1.0),
        (&e_a_prime_b, 1.0),
        (&e_a_prime_b_prime, 1.0),
    ]);
    let violated = s_value.abs() > CHSH_LOCAL_BOUND + VIOLATION_SIGMAS * s_std_error;
    Ok(ChshReport {
        model,
        settings: *settings,
        e_ab,
        e_ab_prime,
        e_a_prime_b,
        e_a_prime_b_prime,
        s_value,
        s_std_error,
        local_bound: CHSH_LOCAL_BOUND,
        tsirelson_bound: CHSH_TSIRELSON_BOUND,
        violated,
    })
}

/// Standard error of `Σ cᵢ·Eᵢ`. Estimates at identical settings are the same
/// random variable and are merged before adding variances.
fn combined_std_error(terms: &[(&CorrelationEstimate, f64)]) -> f64 {
    let mut groups: Vec<(&CorrelationEstimate, f64)> = Vec::new();
    for &(e, c) in terms {
        match groups
            .iter_mut()
            .find(|(g, _)| g.a == e.a && g.b == e.b && g.trials == e.trials)
        {
            Some((_, coeff)) => *coeff += c,
            None => groups.push((e, c)),
        }
    }
    groups
        .iter()
        .map(|(e, c)| (c * e.std_error).powi(2))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bell1964Report {
    pub model: ModelKind,
    pub a: UnitVector,
    pub b: UnitVector,
    pub c: UnitVector,
    pub e_ab: CorrelationEstimate,
    pub e_ac: CorrelationEstimate,
    pub e_bc: CorrelationEstimate,
    /// `|E(a,b) − E(a,c)|`.
    pub lhs: f64,
    /// `¼ + E(b,c)`.
    pub rhs: f64,
    pub lhs_std_error: f64,
    pub rhs_std_error: f64,
    /// `lhs − rhs > 3·√(σ_lhs² + σ_rhs²)`.
    pub violated: bool,
}

impl Bell1964Report {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }

    pub fn margin_std_error(&self) -> f64 {
        self.lhs_std_error.hypot(self.rhs_std_error)
    }
}

/// Three-setting inequality `|E(a,b) − E(a,c)| ≤ ¼ + E(b,c)`, valid for
/// local models with perfect anti-correlation at equal settings.
pub fn bell1964_check(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    c: &UnitVector,
    trials: u64,
    seed: u64,
) -> Result<Bell1964Report> {
    let e_ab = correlation_at(model, a, b, trials, seed)?;
    let e_ac = correlation_at(model, a, c, trials, seed)?;
    let e_bc = correlation_at(model, b, c, trials, seed)?;
    let lhs = (e_ab.mean - e_ac.mean).abs();
    let rhs = 0.25 + e_bc.mean;
    let lhs_std_error = combined_std_error(&[(&e_ab, 1.0), (&e_ac, -1.0)]);
    let rhs_std_error = e_bc.std_error;
    let violated = lhs - rhs > VIOLATION_SIGMAS * lhs_std_error.hypot(rhs_std_error);
    Ok(Bell1964Report {
        model,
        a: *a,
        b: *b,
        c: *c,
        e_ab,
        e_ac,
        e_bc,
        lhs,
        rhs,
        lhs_std_error,
        rhs_std_error,
        violated,
    })
}

/// Particle-2 statistics for one remote setting with λ₁ held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalityEntry {
    /// Particle 1's analyzer axis.
    pub a: UnitVector,
    /// Particle 1's outcome, forced by the fixed probe.
    pub outcome1: SpinOutcome,
    /// Whether the probe lies on the equator of `a`, so that `outcome1` comes
    /// from the tie convention of the sign rule.
    pub tie: bool,
    /// Empirical `P(outcome₂ = +½ | a)`.
    pub p_up: f64,
    pub std_error: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub model: ModelKind,
    pub probe_lambda: UnitVector,
    pub b: UnitVector,
    pub entries: Vec<LocalityEntry>,
    /// Largest pairwise difference of the conditional probabilities.
    pub max_divergence: f64,
    /// Largest pairwise two-proportion z-score.
    pub max_z_score: f64,
    pub threshold_sigmas: f64,
    pub depends_on_remote: bool,
}

/// How the audit treats a remote setting orthogonal to the probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Resolve with the sign rule's convention (`+½`) and flag the entry.
    #[default]
    Convention,
    /// Reject the audit with a precondition error.
    Reject,
}

/// Holds particle 1's hidden variable at `probe_lambda` (so λ₂ is fixed too)
/// and measures particle 2 along `b` for each remote setting `a`.
///
/// A local model's particle-2 statistics can only depend on `(b, λ₂)`; if
/// they change with `a` the outcome depends on the remote side. Fixing λ is
/// a simulator capability with no experimental counterpart.
pub fn locality_audit(
    model: ModelKind,
    probe_lambda: &UnitVector,
    b: &UnitVector,
    settings: &[UnitVector],
    trials_per_setting: u64,
    seed: u64,
    ties: TiePolicy,
) -> Result<LocalityReport> {
    if model == ModelKind::QuantumReference {
        return Err(Error::UnsupportedModel {
            model,
            operation: "locality_audit",
        });
    }
    if trials_per_setting == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(settings.len());
    for a in settings {
        let tie = probe_lambda.dot(a).abs() <= TIE_TOLERANCE;
        if tie && ties == TiePolicy::Reject {
            return Err(Error::Precondition(format!(
                "probe {probe_lambda} is orthogonal to setting {a}; particle 1's outcome would rest on the tie convention"
            )));
        }
        let base = settings_source(seed, a, b);
        let ups = count_parallel(trials_per_setting, |i| {
            let mut rng = base.derive_stream(i);
            let (_, second) = run_pair_trial_with_lambda(model, a, b, probe_lambda, &mut rng)?;
            Ok(second == SpinOutcome::Up)
        })?;
        let (p_up, std_error) = proportion(ups, trials_per_setting);
        entries.push(LocalityEntry {
            a: *a,
            outcome1: naive_measure(a, probe_lambda),
            tie,
            p_up,
            std_error,
            trials: trials_per_setting,
        });
    }
    let (max_divergence, max_z_score) =
        pairwise_divergence(entries.iter().map(|e| (e.p_up, e.trials)));
    Ok(LocalityReport {
        model,
        probe_lambda: *probe_lambda,
        b: *b,
        entries,
        max_divergence,
        max_z_score,
        threshold_sigmas: DEPENDENCE_SIGMAS,
        depends_on_remote: max_z_score > DEPENDENCE_SIGMAS,
    })
}

/// Particle-2 marginal for one remote setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalEntry {
    pub a: UnitVector,
    /// Empirical `P(outcome₂ = +½)` with λ₁ resampled every trial.
    pub p_up: f64,
    pub std_error: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingReport {
    pub model: ModelKind,
    pub b: UnitVector,
    pub entries: Vec<MarginalEntry>,
    pub max_divergence: f64,
    pub max_z_score: f64,
    pub threshold_sigmas: f64,
    /// Marginals differ across settings beyond `threshold_sigmas`.
    pub signaling_detected: bool,
}

/// Estimates particle 2's unconditional marginal for each remote setting.
pub fn no_signaling_check(
    model: ModelKind,
    b: &UnitVector,
    settings: &[UnitVector],
    trials: u64,
    seed: u64,
) -> Result<NoSignalingReport> {
    if trials == 0 && !settings.is_empty() {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let mut entries = Vec::with_capacity(settings.len());
    for a in settings {
        let base = settings_source(seed, a, b);
        let ups = count_parallel(trials, |i| {
            let mut rng = base.derive_stream(i);
            let (_, second) = crate::experiment::run_pair_trial(model, a, b, &mut rng)?;
            Ok(second == SpinOutcome::Up)
        })?;
        let (p_up, std_error) = proportion(ups, trials);
        entries.push(MarginalEntry {
            a: *a,
            p_up,
            std_error,
            trials,
        });
    }
    let (max_divergence, max_z_score) =
        pairwise_divergence(entries.iter().map(|e| (e.p_up, e.trials)));
    Ok(NoSignalingReport {
        model,
        b: *b,
        entries,
        max_divergence,
        max_z_score,
        threshold_sigmas: DEPENDENCE_SIGMAS,
        signaling_detected: max_z_score > DEPENDENCE_SIGMAS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingConsistencyReport {
    pub state_axis: UnitVector,
    pub state_sign: Sign,
    pub meas_axis: UnitVector,
    /// Angle between the state and measurement axes.
    pub theta: f64,
    pub trials: u64,
    /// `P(+½)` from the sign rule applied to λ drawn on the eigenstate ring.
    pub sign_rule_p_up: f64,
    pub sign_rule_std_error: f64,
    /// `P(+½)` from the Born rule for the same eigenstate.
    pub born_p_up: f64,
    /// `|sign_rule_p_up − born_p_up|`.
    pub gap: f64,
}

/// Compares the λ-only sign rule on the eigenstate ring with the Born
/// probabilities that ring is supposed to reproduce.
///
/// A gap shows that outcomes under the ring distribution cannot be a
/// function of λ alone; the distribution itself carries information.
pub fn ring_consistency_check(
    state_axis: &UnitVector,
    state_sign: Sign,
    meas_axis: &UnitVector,
    trials: u64,
    seed: u64,
) -> Result<RingConsistencyReport> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    let ring = HvDistribution::EigenRing {
        axis: *state_axis,
        sign: state_sign,
    };
    let base = settings_source(seed, state_axis, meas_axis);
    let ups = count_parallel(trials, |i| {
        let mut rng = base.derive_stream(i);
        let lambda = ring.sample(&mut rng);
        Ok(naive_measure(meas_axis, &lambda) == SpinOutcome::Up)
    })?;
    let (sign_rule_p_up, sign_rule_std_error) = proportion(ups, trials);
    let born_p_up = born_probability(state_axis, state_sign, meas_axis, SpinOutcome::Up);
    Ok(RingConsistencyReport {
        state_axis: *state_axis,
        state_sign,
        meas_axis: *meas_axis,
        theta: angle_between(state_axis, meas_axis),
        trials,
        sign_rule_p_up,
        sign_rule_std_error,
        born_p_up,
        gap: (sign_rule_p_up - born_p_up).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// The engine's own closed form at this angle.
    pub analytic_model: f64,
    /// The singlet prediction at this angle.
    pub analytic_qm: f64,
}

/// Correlation versus analyzer angle, with `a` on +z and `b` at each θ in
/// the x–z plane. Every row uses the same seed.
pub fn angle_sweep(
    model: ModelKind,
    theta_grid: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    theta_grid
        .iter()
        .map(|&theta| {
            let analytic_naive = naive_pair_expectation_analytic(theta)?;
            let config = crate::experiment::ExperimentConfig::at_angle(model, theta, trials, seed);
            let estimate = crate::experiment::estimate_correlation(&config)?;
            let analytic_qm = qm_pair_expectation(&config.a, &config.b);
            let analytic_model = match model {
                ModelKind::BellNaive => analytic_naive,
                ModelKind::MatzkinConditioned => {
                    matzkin_pair_expectation_analytic(&config.a, &config.b)
                }
                ModelKind::QuantumReference => analytic_qm,
            };
            Ok(SweepRow {
                theta,
                estimate: estimate.mean,
                std_error: estimate.std_error,
                analytic_model,
                analytic_qm,
            })
        })
        .collect()
}

/// Proportion and its binomial standard error.
fn proportion(hits: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    (p, (p * (1.0 - p) / n).sqrt())
}

/// Largest pairwise difference and largest pooled two-proportion z-score.
fn pairwise_divergence(items: impl Iterator<Item = (f64, u64)> + Clone) -> (f64, f64) {
    let list: Vec<(f64, u64)> = items.collect();
    let mut max_div = 0.0f64;
    let mut max_z = 0.0f64;
    for (i, &(p1, n1)) in list.iter().enumerate() {
        for &(p2, n2) in &list[i + 1..] {
            let diff = (p1 - p2).abs();
            max_div = max_div.max(diff);
            max_z = max_z.max(two_proportion_z(p1, n1, p2, n2));
        }
    }
    (max_div, max_z)
}

fn two_proportion_z(p1: f64, n1: u64, p2: f64, n2: u64) -> f64 {
    let (n1, n2) = (n1 as f64, n2 as f64);
    let pooled = (p1 * n1 + p2 * n2) / (n1 + n2);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2)).sqrt();
    let diff = (p1 - p2).abs();
    if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        diff / se
    }
}
