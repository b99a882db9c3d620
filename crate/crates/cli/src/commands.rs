//! Subcommand bodies. Each one computes its result once and renders it as
//! both a JSON value and a CSV table; the caller picks the format.

use std::f64::consts::PI;

use eprb_core::{
    angle_between, angle_sweep, chsh_scan, estimate_correlation, locality_audit,
    matzkin_pair_expectation_analytic, naive_pair_expectation_analytic, no_signaling_check,
    qm_pair_expectation, quadrature_expectation, ring_consistency_check, ChshSettings,
    ExperimentConfig, ModelKind, QuadratureResult, TiePolicy, UnitVector,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{AuditArgs, Check, ChshArgs, CorrelateArgs, GlobalArgs, SweepArgs, Triple};
use crate::error::CliError;
use crate::output::{to_csv_bytes, F17};

/// Exit code reserved for a CHSH violation.
pub const EXIT_VIOLATED: i32 = 10;
/// Exit code reserved for detected dependence on the remote wing.
pub const EXIT_REMOTE_DEPENDENCE: i32 = 11;

/// A computed result in both output encodings.
pub struct Outcome {
    pub result: Value,
    pub csv: Vec<u8>,
    pub exit_code: i32,
}

/// Degrees to radians, exact at 0°, 90° and 180°.
pub fn deg_to_rad(deg: f64) -> f64 {
    deg / 180.0 * PI
}

fn rad_to_deg(rad: f64) -> f64 {
    rad / PI * 180.0
}

fn unit(t: &Triple, flag: &str) -> Result<UnitVector, CliError> {
    let [x, y, z] = t.0;
    UnitVector::new(x, y, z).map_err(|e| CliError::NotUnit(format!("--{flag}: {e}")))
}

fn check_angle(deg: f64, flag: &str) -> Result<f64, CliError> {
    if !(0.0..=180.0).contains(&deg) {
        return Err(CliError::Usage(format!(
            "--{flag} must lie in [0, 180], got {deg}"
        )));
    }
    Ok(deg_to_rad(deg))
}

fn check_trials(global: &GlobalArgs) -> Result<u64, CliError> {
    if global.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(global.trials)
}

fn model_analytic(
    model: ModelKind,
    a: &UnitVector,
    b: &UnitVector,
    theta: f64,
) -> Result<f64, CliError> {
    Ok(match model {
        ModelKind::BellNaive => naive_pair_expectation_analytic(theta)?,
        ModelKind::MatzkinConditioned => matzkin_pair_expectation_analytic(a, b),
        ModelKind::QuantumReference => qm_pair_expectation(a, b),
    })
}

#[derive(Debug, Serialize)]
struct CorrelateResult {
    model: ModelKind,
    theta: f64,
    theta_deg: f64,
    a: UnitVector,
    b: UnitVector,
    estimate: f64,
    std_error: f64,
    analytic: f64,
    quadrature: Option<QuadratureResult>,
    trials: u64,
    seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelateRow {
    pub model: String,
    pub theta_deg: F17,
    pub a_x: F17,
    pub a_y: F17,
    pub a_z: F17,
    pub b_x: F17,
    pub b_y: F17,
    pub b_z: F17,
    pub estimate: F17,
    pub std_error: F17,
    pub analytic: F17,
    pub quadrature: Option<F17>,
    pub quadrature_nodes: Option<usize>,
    pub trials: u64,
    pub seed: u64,
}

pub fn correlate(args: &CorrelateArgs, global: &GlobalArgs) -> Result<Outcome, CliError> {
    let model: ModelKind = args.model.into();
    let trials = check_trials(global)?;
    let (a, b, theta, theta_deg) = match (args.angle_deg, &args.a, &args.b) {
        (Some(deg), None, None) => {
            let theta = check_angle(deg, "angle-deg")?;
            (UnitVector::Z, UnitVector::in_xz_plane(theta), theta, deg)
        }
        (None, Some(a), Some(b)) => {
            let (a, b) = (unit(a, "a")?, unit(b, "b")?);
            let theta = angle_between(&a, &b);
            (a, b, theta, rad_to_deg(theta))
        }
        _ => {
            return Err(CliError::Usage(
                "give either --angle-deg or both --a and --b".into(),
            ))
        }
    };
    let estimate = estimate_correlation(&ExperimentConfig::new(model, a, b, trials, global.seed))?;
    let analytic = model_analytic(model, &a, &b, theta)?;
    let quadrature = match args.quadrature_nodes {
        Some(nodes) if model != ModelKind::QuantumReference => {
            Some(quadrature_expectation(model, &a, &b, nodes)?)
        }
        _ => None,
    };

    let row = CorrelateRow {
        model: model.name().to_string(),
        theta_deg: F17(theta_deg),
        a_x: F17(a.x()),
        a_y: F17(a.y()),
        a_z: F17(a.z()),
        b_x: F17(b.x()),
        b_y: F17(b.y()),
        b_z: F17(b.z()),
        estimate: F17(estimate.mean),
        std_error: F17(estimate.std_error),
        analytic: F17(analytic),
        quadrature: quadrature.as_ref().map(|q| F17(q.value)),
        quadrature_nodes: quadrature.as_ref().map(QuadratureResult::nodes),
        trials,
        seed: global.seed,
    };
    let result = CorrelateResult {
        model,
        theta,
        theta_deg,
        a,
        b,
        estimate: estimate.mean,
        std_error: estimate.std_error,
        analytic,
        quadrature,
        trials,
        seed: global.seed,
    };
    Ok(Outcome {
        result: serde_json::to_value(result)?,
        csv: to_csv_bytes(&[row])?,
        exit_code: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCsvRow {
    pub theta_deg: F17,
    pub estimate: F17,
    pub std_error: F17,
    pub analytic_model: F17,
    pub analytic_qm: F17,
}

#[derive(Debug, Serialize)]
struct SweepJsonRow {
    theta_deg: f64,
    theta: f64,
    estimate: f64,
    std_error: f64,
    analytic_model: f64,
    analytic_qm: f64,
}

/// Evenly spaced grid from `start` to `end` inclusive; a single step gives
/// just `start`.
pub fn degree_grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps < 1 {
        return Err(CliError::Usage("--theta-steps must be at least 1".into()));
    }
    if !(start.is_finite() && end.is_finite()) || start > end {
        return Err(CliError::Usage(format!(
            "--theta-start ({start}) must not exceed --theta-end ({end})"
        )));
    }
    if start < 0.0 || end > 180.0 {
        return Err(CliError::Usage("sweep angles must lie in [0, 180]".into()));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let step = (end - start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                end
            } else {
                start + i as f64 * step
            }
        })
        .collect())
}

pub fn sweep(args: &SweepArgs, global: &GlobalArgs) -> Result<Outcome, CliError> {
    let model: ModelKind = args.model.into();
    let trials = check_trials(global)?;
    let degrees = degree_grid(args.theta_start, args.theta_end, args.theta_steps)?;
    let radians: Vec<f64> = degrees.iter().map(|&d| deg_to_rad(d)).collect();
    let rows = angle_sweep(model, &radians, trials, global.seed)?;

    let csv_rows: Vec<SweepCsvRow> = rows
        .iter()
        .zip(&degrees)
        .map(|(r, &d)| SweepCsvRow {
            theta_deg: F17(d),
            estimate: F17(r.estimate),
            std_error: F17(r.std_error),
            analytic_model: F17(r.analytic_model),
            analytic_qm: F17(r.analytic_qm),
        })
        .collect();
    let json_rows: Vec<SweepJsonRow> = rows
        .iter()
        .zip(&degrees)
        .map(|(r, &d)| SweepJsonRow {
            theta_deg: d,
            theta: r.theta,
            estimate: r.estimate,
            std_error: r.std_error,
            analytic_model: r.analytic_model,
            analytic_qm: r.analytic_qm,
        })
        .collect();
    let result = serde_json::json!({
        "model": model,
        "trials": trials,
        "seed": global.seed,
        "rows": json_rows,
    });
    Ok(Outcome {
        result,
        csv: to_csv_bytes(&csv_rows)?,
        exit_code: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshCsvRow {
    pub model: String,
    pub s_value: F17,
    pub s_std_error: F17,
    pub local_bound: F17,
    pub tsirelson_bound: F17,
    pub violated: bool,
    pub e_ab: F17,
    pub e_ab_std_error: F17,
    pub e_ab_prime: F17,
    pub e_ab_prime_std_error: F17,
    pub e_a_prime_b: F17,
    pub e_a_prime_b_std_error: F17,
    pub e_a_prime_b_prime: F17,
    pub e_a_prime_b_prime_std_error: F17,
    pub trials: u64,
    pub seed: u64,
}

pub fn chsh(args: &ChshArgs, global: &GlobalArgs) -> Result<Outcome, CliError> {
    let model: ModelKind = args.model.into();
    let trials = check_trials(global)?;
    let settings = if args.optimal_planar {
        ChshSettings::optimal_planar()
    } else {
        match (&args.a, &args.a_prime, &args.b, &args.b_prime) {
            (Some(a), Some(ap), Some(b), Some(bp)) => ChshSettings {
                a: unit(a, "a")?,
                a_prime: unit(ap, "a-prime")?,
                b: unit(b, "b")?,
                b_prime: unit(bp, "b-prime")?,
            },
            _ => {
                return Err(CliError::Usage(
                    "give --optimal-planar or all of --a, --a-prime, --b, --b-prime".into(),
                ))
            }
        }
    };
    let report = chsh_scan(model, &settings, trials, global.seed)?;
    let row = ChshCsvRow {
        model: model.name().to_string(),
        s_value: F17(report.s_value),
        s_std_error: F17(report.s_std_error),
        local_bound: F17(report.local_bound),
        tsirelson_bound: F17(report.tsirelson_bound),
        violated: report.violated,
        e_ab: F17(report.e_ab.mean),
        e_ab_std_error: F17(report.e_ab.std_error),
        e_ab_prime: F17(report.e_ab_prime.mean),
        e_ab_prime_std_error: F17(report.e_ab_prime.std_error),
        e_a_prime_b: F17(report.e_a_prime_b.mean),
        e_a_prime_b_std_error: F17(report.e_a_prime_b.std_error),
        e_a_prime_b_prime: F17(report.e_a_prime_b_prime.mean),
        e_a_prime_b_prime_std_error: F17(report.e_a_prime_b_prime.std_error),
        trials,
        seed: global.seed,
    };
    let mut result = serde_json::to_value(&report)?;
    result["trials"] = trials.into();
    result["seed"] = global.seed.into();
    Ok(Outcome {
        result,
        csv: to_csv_bytes(&[row])?,
        exit_code: if report.violated { EXIT_VIOLATED } else { 0 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityCsvRow {
    pub model: String,
    pub a_x: F17,
    pub a_y: F17,
    pub a_z: F17,
    pub outcome1: F17,
    pub tie: bool,
    pub p_up: F17,
    pub std_error: F17,
    pub trials: u64,
    pub max_divergence: F17,
    pub max_z_score: F17,
    pub depends_on_remote: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSignalingCsvRow {
    pub model: String,
    pub a_x: F17,
    pub a_y: F17,
    pub a_z: F17,
    pub p_up: F17,
    pub std_error: F17,
    pub trials: u64,
    pub max_divergence: F17,
    pub max_z_score: F17,
    pub signaling_detected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingCsvRow {
    pub state_x: F17,
    pub state_y: F17,
    pub state_z: F17,
    pub state_sign: i8,
    pub meas_x: F17,
    pub meas_y: F17,
    pub meas_z: F17,
    pub theta_deg: F17,
    pub trials: u64,
    pub sign_rule_p_up: F17,
    pub sign_rule_std_error: F17,
    pub born_p_up: F17,
    pub gap: F17,
}

fn audit_b(args: &AuditArgs) -> Result<UnitVector, CliError> {
    match (&args.b, args.b_angle_deg) {
        (Some(b), _) => unit(b, "b"),
        (None, Some(deg)) => Ok(UnitVector::in_xz_plane(check_angle(deg, "b-angle-deg")?)),
        (None, None) => Err(CliError::Usage("give --b or --b-angle-deg".into())),
    }
}

fn audit_model(args: &AuditArgs) -> Result<ModelKind, CliError> {
    args.model
        .map(Into::into)
        .ok_or_else(|| CliError::Usage("this check needs --model".into()))
}

fn audit_settings(args: &AuditArgs) -> Result<Vec<UnitVector>, CliError> {
    args.settings
        .0
        .iter()
        .enumerate()
        .map(|(i, t)| unit(t, &format!("settings[{i}]")))
        .collect()
}

fn tagged(mut value: Value, check: &str, seed: u64) -> Value {
    value["check"] = check.into();
    value["seed"] = seed.into();
    value
}

pub fn audit(args: &AuditArgs, global: &GlobalArgs) -> Result<Outcome, CliError> {
    let trials = check_trials(global)?;
    match args.check {
        Check::Locality => {
            let model = audit_model(args)?;
            let probe = unit(&args.probe, "probe")?;
            let b = audit_b(args)?;
            let settings = audit_settings(args)?;
            let ties = if args.reject_ties {
                TiePolicy::Reject
            } else {
                TiePolicy::Convention
            };
            let report = locality_audit(model, &probe, &b, &settings, trials, global.seed, ties)?;
            let rows: Vec<LocalityCsvRow> = report
                .entries
                .iter()
                .map(|e| LocalityCsvRow {
                    model: model.name().to_string(),
                    a_x: F17(e.a.x()),
                    a_y: F17(e.a.y()),
                    a_z: F17(e.a.z()),
                    outcome1: F17(e.outcome1.value()),
                    tie: e.tie,
                    p_up: F17(e.p_up),
                    std_error: F17(e.std_error),
                    trials: e.trials,
                    max_divergence: F17(report.max_divergence),
                    max_z_score: F17(report.max_z_score),
                    depends_on_remote: report.depends_on_remote,
                })
                .collect();
            Ok(Outcome {
                result: tagged(serde_json::to_value(&report)?, "locality", global.seed),
                csv: to_csv_bytes(&rows)?,
                exit_code: if report.depends_on_remote {
                    EXIT_REMOTE_DEPENDENCE
                } else {
                    0
                },
            })
        }
        Check::NoSignaling => {
            let model = audit_model(args)?;
            let b = audit_b(args)?;
            let settings = audit_settings(args)?;
            let report = no_signaling_check(model, &b, &settings, trials, global.seed)?;
            let rows: Vec<NoSignalingCsvRow> = report
                .entries
                .iter()
                .map(|e| NoSignalingCsvRow {
                    model: model.name().to_string(),
                    a_x: F17(e.a.x()),
                    a_y: F17(e.a.y()),
                    a_z: F17(e.a.z()),
                    p_up: F17(e.p_up),
                    std_error: F17(e.std_error),
                    trials: e.trials,
                    max_divergence: F17(report.max_divergence),
                    max_z_score: F17(report.max_z_score),
                    signaling_detected: report.signaling_detected,
                })
                .collect();
            Ok(Outcome {
                result: tagged(serde_json::to_value(&report)?, "no_signaling", global.seed),
                csv: to_csv_bytes(&rows)?,
                exit_code: if report.signaling_detected {
                    EXIT_REMOTE_DEPENDENCE
                } else {
                    0
                },
            })
        }
        Check::Ring => {
            let state = unit(&args.state_axis, "state-axis")?;
            let meas = match (&args.meas_axis, args.meas_angle_deg) {
                (Some(m), _) => unit(m, "meas-axis")?,
                (None, Some(deg)) => {
                    let (e1, _) = state.orthonormal_basis();
                    state.rotate_towards(&e1, check_angle(deg, "meas-angle-deg")?)
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "give --meas-axis or --meas-angle-deg".into(),
                    ))
                }
            };
            let report =
                ring_consistency_check(&state, args.state_sign, &meas, trials, global.seed)?;
            let row = RingCsvRow {
                state_x: F17(state.x()),
                state_y: F17(state.y()),
                state_z: F17(state.z()),
                state_sign: report.state_sign.as_i8(),
                meas_x: F17(meas.x()),
                meas_y: F17(meas.y()),
                meas_z: F17(meas.z()),
                theta_deg: F17(rad_to_deg(report.theta)),
                trials,
                sign_rule_p_up: F17(report.sign_rule_p_up),
                sign_rule_std_error: F17(report.sign_rule_std_error),
                born_p_up: F17(report.born_p_up),
                gap: F17(report.gap),
            };
            Ok(Outcome {
                result: tagged(serde_json::to_value(&report)?, "ring", global.seed),
                csv: to_csv_bytes(&[row])?,
                exit_code: 0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::from_csv_bytes;

    #[test]
    fn grid_endpoints() {
        assert_eq!(degree_grid(0.0, 180.0, 13).unwrap().len(), 13);
        assert_eq!(degree_grid(0.0, 180.0, 13).unwrap()[12], 180.0);
        assert_eq!(degree_grid(0.0, 180.0, 13).unwrap()[1], 15.0);
        assert_eq!(degree_grid(30.0, 90.0, 1).unwrap(), vec![30.0]);
        assert!(degree_grid(90.0, 30.0, 3).is_err());
        assert!(degree_grid(0.0, 90.0, 0).is_err());
        assert!(degree_grid(0.0, 200.0, 3).is_err());
    }

    #[test]
    fn right_angles_are_exact() {
        assert_eq!(deg_to_rad(180.0), PI);
        assert_eq!(deg_to_rad(90.0), PI / 2.0);
        assert_eq!(deg_to_rad(0.0), 0.0);
    }

    #[test]
    fn csv_rows_round_trip() {
        let rows = vec![
            SweepCsvRow {
                theta_deg: F17(15.0),
                estimate: F17(-0.2415_f64),
                std_error: F17(2.4e-4),
                analytic_model: F17(-1.0 / 12.0),
                analytic_qm: F17(-(15f64.to_radians().cos()) / 4.0),
            },
            SweepCsvRow {
                theta_deg: F17(180.0),
                estimate: F17(0.25),
                std_error: F17(0.0),
                analytic_model: F17(0.25),
                analytic_qm: F17(0.25),
            },
        ];
        let bytes = to_csv_bytes(&rows).unwrap();
        let text = std::str::from_utf8(&bytes).unwrap();
        assert!(text.starts_with("theta_deg,estimate,std_error,analytic_model,analytic_qm\n"));
        assert!(!text.contains('\r'));
        let back: Vec<SweepCsvRow> = from_csv_bytes(&bytes).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn optional_cells_round_trip() {
        let row = CorrelateRow {
            model: "qm".into(),
            theta_deg: F17(0.0),
            a_x: F17(0.0),
            a_y: F17(0.0),
            a_z: F17(1.0),
            b_x: F17(0.0),
            b_y: F17(0.0),
            b_z: F17(1.0),
            estimate: F17(-0.25),
            std_error: F17(0.0),
            analytic: F17(-0.25),
            quadrature: None,
            quadrature_nodes: None,
            trials: 10,
            seed: 1,
        };
        let back: Vec<CorrelateRow> =
            from_csv_bytes(&to_csv_bytes(std::slice::from_ref(&row)).unwrap()).unwrap();
        assert_eq!(back, vec![row]);
    }
}
