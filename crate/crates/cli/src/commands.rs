//! One function per subcommand. Each returns the envelope to print plus an
//! optional failure to report afterwards: some domain errors (a vanishing
//! weak value, a failed scenario check) still produce a complete payload,
//! and the contract is to emit it before exiting nonzero.

use std::path::Path;

use ndarray::Array2;
use serde_json::{json, Value};

use kdcalc_core::linalg::{substream_seed, SeededStream};
use kdcalc_core::{
    action_phase, conditional_kernel, conditional_weak_value, estimate_weak_value,
    haar_random_basis, hardy, kd_distribution, marginals, mub_qubit_phase, predict_probabilities,
    random_density, reconstruct_density, three_box, transform_representation, verify, C64,
    DensityOperator, Error as CoreError, KDDistribution, MeterConfig, MeterMode, Scenario,
    Tolerances,
};

use crate::envelope::{
    args_map, DensityPayload, DistributionPayload, InputDigest, Payload, PredictionPayload,
    ResultEnvelope, ScenarioEntry, ScenarioEstimates, ScenarioPayload, SelftestPayload,
    SimulationPayload, ToleranceEcho, WeakValuePayload, Warning,
};
use crate::fail::CliError;
use crate::schema::{
    file_digest, from_c64, load_basis, load_distribution, load_pure_state, load_state, Cx,
    SCHEMA_VERSION,
};

/// Global run configuration shared by every command.
pub struct Ctx {
    pub seed: u64,
    pub hbar: f64,
    pub tol: Tolerances,
}

impl Ctx {
    pub fn new(seed: u64, hbar: f64, overlap_floor: f64) -> Result<Self, CliError> {
        if !hbar.is_finite() || hbar <= 0.0 {
            return Err(CoreError::InvalidHbar { hbar }.into());
        }
        if !overlap_floor.is_finite() || overlap_floor <= 0.0 || overlap_floor >= 1.0 {
            return Err(CliError::Usage {
                message: format!(
                    "--tolerance-overlap must lie in (0, 1), got {overlap_floor}"
                ),
            });
        }
        let tol = Tolerances {
            overlap_floor,
            ..Tolerances::default()
        };
        Ok(Ctx {
            seed,
            hbar,
            tol,
        })
    }
}

/// Envelope plus an error to surface after printing it.
pub struct Outcome {
    pub envelope: ResultEnvelope,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(envelope: ResultEnvelope) -> Self {
        Outcome {
            envelope,
            failure: None,
        }
    }
}

fn envelope(
    ctx: &Ctx,
    command: &'static str,
    args: &[(&str, Value)],
    input_paths: &[&Path],
    warnings: Vec<Warning>,
    payload: Payload,
) -> Result<ResultEnvelope, CliError> {
    let mut inputs = Vec::with_capacity(input_paths.len());
    for path in input_paths {
        inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: file_digest(path)?,
        });
    }
    Ok(ResultEnvelope {
        schema_version: SCHEMA_VERSION,
        tool: "kdcalc",
        version: env!("CARGO_PKG_VERSION"),
        command,
        args: args_map(args),
        inputs,
        seed: ctx.seed,
        hbar: ctx.hbar,
        tolerances: ToleranceEcho {
            overlap_floor: ctx.tol.overlap_floor,
        },
        warnings,
        payload,
    })
}

fn matrix_out(m: &Array2<C64>) -> Vec<Vec<Cx>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| from_c64(m[[r, c]])).collect())
        .collect()
}

fn path_arg(path: &Path) -> Value {
    Value::String(path.display().to_string())
}

fn distribution_payload(
    kd: &KDDistribution,
    labels_a: &[String],
    labels_b: &[String],
    tol: &Tolerances,
) -> Result<DistributionPayload, CliError> {
    let (marginal_a, marginal_b) = marginals(kd, tol)?;
    Ok(DistributionPayload {
        dim: kd.dim(),
        basis_a_id: kd.basis_a_id().to_string(),
        basis_b_id: kd.basis_b_id().to_string(),
        labels_a: labels_a.to_vec(),
        labels_b: labels_b.to_vec(),
        values: matrix_out(kd.values()),
        marginal_a,
        marginal_b,
        normalization_deviation: kd.normalization_deviation(),
        max_imaginary: kd.max_imaginary(),
    })
}

pub fn cmd_kd(ctx: &Ctx, state: &Path, basis_a: &Path, basis_b: &Path) -> Result<Outcome, CliError> {
    let rho = load_state(state, &ctx.tol)?.density();
    let a = load_basis(basis_a, &ctx.tol)?;
    let b = load_basis(basis_b, &ctx.tol)?;
    let kd = kd_distribution(&rho, &a, &b, &ctx.tol)?;
    let payload = distribution_payload(&kd, a.labels(), b.labels(), &ctx.tol)?;
    let env = envelope(
        ctx,
        "kd",
        &[
            ("state", path_arg(state)),
            ("basis_a", path_arg(basis_a)),
            ("basis_b", path_arg(basis_b)),
        ],
        &[state, basis_a, basis_b],
        Vec::new(),
        Payload::Distribution(payload),
    )?;
    Ok(Outcome::ok(env))
}

pub fn cmd_reconstruct(
    ctx: &Ctx,
    kd_path: &Path,
    basis_a: &Path,
    basis_b: &Path,
) -> Result<Outcome, CliError> {
    let kd = load_distribution(kd_path, &ctx.tol)?;
    let a = load_basis(basis_a, &ctx.tol)?;
    let b = load_basis(basis_b, &ctx.tol)?;
    let rec = reconstruct_density(&kd, &a, &b, &ctx.tol)?;

    let mut warnings = vec![Warning {
        kind: "hermiticity_deviation",
        message: format!(
            "raw inverse deviated from Hermitian by {:.3e} before symmetrization",
            rec.hermiticity_deviation
        ),
    }];
    if rec.min_overlap < ctx.tol.conditioning_overlap {
        warnings.push(Warning {
            kind: "ill_conditioned",
            message: format!(
                "smallest basis overlap {:.3e} is below {:.1e}; the inversion \
                 amplifies input noise in the corresponding cells",
                rec.min_overlap, ctx.tol.conditioning_overlap
            ),
        });
    }

    let payload = DensityPayload {
        dim: rec.rho.dim(),
        matrix: matrix_out(rec.rho.matrix()),
        eigenvalues: rec.rho.eigenvalues(),
        hermiticity_deviation: rec.hermiticity_deviation,
        min_overlap: rec.min_overlap,
    };
    let env = envelope(
        ctx,
        "reconstruct",
        &[
            ("kd", path_arg(kd_path)),
            ("basis_a", path_arg(basis_a)),
            ("basis_b", path_arg(basis_b)),
        ],
        &[kd_path, basis_a, basis_b],
        warnings,
        Payload::Density(payload),
    )?;
    Ok(Outcome::ok(env))
}

pub fn cmd_predict(
    ctx: &Ctx,
    state: &Path,
    basis_a: &Path,
    basis_b: &Path,
    basis_m: &Path,
) -> Result<Outcome, CliError> {
    let rho = load_state(state, &ctx.tol)?.density();
    let a = load_basis(basis_a, &ctx.tol)?;
    let b = load_basis(basis_b, &ctx.tol)?;
    let m = load_basis(basis_m, &ctx.tol)?;
    let kd = kd_distribution(&rho, &a, &b, &ctx.tol)?;
    let kernel = conditional_kernel(&a, &b, &m, &ctx.tol)?;
    let predicted = predict_probabilities(&kd, &kernel, &ctx.tol)?;

    let mut born = Vec::with_capacity(m.dim());
    for i in 0..m.dim() {
        born.push(rho.born_probability(m.vector(i))?);
    }
    let max_deviation = predicted
        .iter()
        .zip(born.iter())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0f64, f64::max);

    let mut warnings = Vec::new();
    if kernel.undefined_cells() > 0 {
        warnings.push(Warning {
            kind: "undefined_cells_skipped",
            message: format!(
                "{} conditional cells are undefined but carry no weight in \
                 the joint distribution; they were skipped",
                kernel.undefined_cells()
            ),
        });
    }

    let payload = PredictionPayload {
        dim: m.dim(),
        basis_m_id: m.identity().to_string(),
        labels: m.labels().to_vec(),
        predicted,
        born,
        max_deviation,
    };
    let env = envelope(
        ctx,
        "predict",
        &[
            ("state", path_arg(state)),
            ("basis_a", path_arg(basis_a)),
            ("basis_b", path_arg(basis_b)),
            ("basis_m", path_arg(basis_m)),
        ],
        &[state, basis_a, basis_b, basis_m],
        warnings,
        Payload::Prediction(payload),
    )?;
    Ok(Outcome::ok(env))
}

/// Seeded random consistency check behind `predict --selftest`: the
/// two-step prediction (joint distribution, then conditional recombination)
/// must agree with direct Born probabilities on every instance.
pub fn cmd_predict_selftest(ctx: &Ctx) -> Result<Outcome, CliError> {
    const INSTANCES: usize = 60;
    const DIMS: [usize; 3] = [2, 3, 4];
    const THRESHOLD: f64 = 1e-9;

    let mut max_deviation = 0.0f64;
    for i in 0..INSTANCES {
        let dim = DIMS[i % DIMS.len()];
        let mut stream = SeededStream::from_seed(substream_seed(ctx.seed, i as u64));
        let rho = random_density(dim, dim, &mut stream)?;
        let a = haar_random_basis(dim, &mut stream)?;
        let b = haar_random_basis(dim, &mut stream)?;
        let m = haar_random_basis(dim, &mut stream)?;

        let kd = kd_distribution(&rho, &a, &b, &ctx.tol)?;
        let kernel = conditional_kernel(&a, &b, &m, &ctx.tol)?;
        let predicted = predict_probabilities(&kd, &kernel, &ctx.tol)?;
        for (outcome, p) in predicted.iter().enumerate() {
            let born = rho.born_probability(m.vector(outcome))?;
            max_deviation = max_deviation.max((p - born).abs());
        }
    }

    let passed = max_deviation <= THRESHOLD;
    let payload = SelftestPayload {
        instances: INSTANCES,
        dims: DIMS.to_vec(),
        max_deviation,
        threshold: THRESHOLD,
        passed,
    };
    let env = envelope(
        ctx,
        "predict",
        &[("selftest", Value::Bool(true))],
        &[],
        Vec::new(),
        Payload::Selftest(payload),
    )?;
    let failure = (!passed).then(|| CliError::CheckFailed {
        what: "selftest_failed",
        message: format!(
            "prediction deviated from Born probabilities by {max_deviation:.3e} \
             (threshold {THRESHOLD:.1e})"
        ),
    });
    Ok(Outcome {
        envelope: env,
        failure,
    })
}

pub fn cmd_transform(
    ctx: &Ctx,
    kd_path: &Path,
    basis_a: &Path,
    basis_b: &Path,
    basis_m: &Path,
) -> Result<Outcome, CliError> {
    let kd = load_distribution(kd_path, &ctx.tol)?;
    let a = load_basis(basis_a, &ctx.tol)?;
    let b = load_basis(basis_b, &ctx.tol)?;
    let m = load_basis(basis_m, &ctx.tol)?;
    let transformed = transform_representation(&kd, &a, &b, &m, &ctx.tol)?;
    let payload = distribution_payload(&transformed, a.labels(), m.labels(), &ctx.tol)?;
    let env = envelope(
        ctx,
        "transform",
        &[
            ("kd", path_arg(kd_path)),
            ("basis_a", path_arg(basis_a)),
            ("basis_b", path_arg(basis_b)),
            ("basis_m", path_arg(basis_m)),
        ],
        &[kd_path, basis_a, basis_b, basis_m],
        Vec::new(),
        Payload::Distribution(payload),
    )?;
    Ok(Outcome::ok(env))
}

pub fn cmd_weakvalue(
    ctx: &Ctx,
    pre: &Path,
    post: &Path,
    projector: &Path,
) -> Result<Outcome, CliError> {
    let a = load_pure_state(pre, &ctx.tol)?;
    let b = load_pure_state(post, &ctx.tol)?;
    let m = load_pure_state(projector, &ctx.tol)?;
    let value = conditional_weak_value(&a, &b, &m, &ctx.tol)?;

    let (payload, failure) = match action_phase(value, ctx.hbar, &ctx.tol) {
        Ok(ap) => (
            WeakValuePayload {
                value: from_c64(value),
                magnitude: ap.magnitude,
                phase: Some(ap.phase),
                action: Some(ap.action),
                hbar: ctx.hbar,
            },
            None,
        ),
        // The conditional vanished: the magnitude is still reportable but
        // no phase exists. Emit the payload, then fail.
        Err(e @ CoreError::ZeroWeakValue { .. }) => (
            WeakValuePayload {
                value: from_c64(value),
                magnitude: value.norm(),
                phase: None,
                action: None,
                hbar: ctx.hbar,
            },
            Some(CliError::from(e)),
        ),
        Err(e) => return Err(e.into()),
    };

    let env = envelope(
        ctx,
        "weakvalue",
        &[
            ("pre", path_arg(pre)),
            ("post", path_arg(post)),
            ("projector", path_arg(projector)),
        ],
        &[pre, post, projector],
        Vec::new(),
        Payload::WeakValue(payload),
    )?;
    Ok(Outcome {
        envelope: env,
        failure,
    })
}

pub struct SimulateOpts {
    pub coupling: f64,
    pub sampled: bool,
    pub shots: Option<u64>,
}

pub fn cmd_simulate(
    ctx: &Ctx,
    state: &Path,
    basis_a: &Path,
    basis_b: &Path,
    opts: &SimulateOpts,
) -> Result<Outcome, CliError> {
    let mode = match (opts.sampled, opts.shots) {
        (true, Some(shots)) => MeterMode::Sampled { shots },
        (true, None) => {
            return Err(CliError::Usage {
                message: "sampled mode requires --shots".to_string(),
            })
        }
        (false, None) => MeterMode::Exact,
        (false, Some(_)) => {
            return Err(CliError::Usage {
                message: "--shots only applies to sampled mode".to_string(),
            })
        }
    };

    let rho = load_state(state, &ctx.tol)?.density();
    let a = load_basis(basis_a, &ctx.tol)?;
    let b = load_basis(basis_b, &ctx.tol)?;
    let reference = kd_distribution(&rho, &a, &b, &ctx.tol)?;
    let dim = reference.dim();

    // Per-cell loop instead of the library's whole-table estimator so a
    // cell whose postselection never succeeds degrades to a warning and a
    // null entry rather than aborting the run. Seeds match the library's
    // per-cell substreams exactly.
    let mut values: Vec<Vec<Option<Cx>>> = vec![vec![None; dim]; dim];
    let mut deviations: Vec<Vec<Option<f64>>> = vec![vec![None; dim]; dim];
    let mut standard_errors: Vec<Vec<Option<f64>>> = vec![vec![None; dim]; dim];
    let mut postselection = vec![vec![0.0f64; dim]; dim];
    let mut warnings = Vec::new();
    let mut max_deviation = 0.0f64;
    let mut any_sampled_se = false;

    for j in 0..dim {
        for k in 0..dim {
            let config = MeterConfig {
                coupling: opts.coupling,
                mode,
                seed: substream_seed(ctx.seed, ((j as u64) << 32) | k as u64),
            };
            match estimate_weak_value(&rho, a.vector(j), b.vector(k), &config, &ctx.tol) {
                Ok(est) => {
                    let cell = est.value * est.postselection_probability;
                    let deviation = (cell - reference.value(j, k)).norm();
                    values[j][k] = Some(from_c64(cell));
                    deviations[j][k] = Some(deviation);
                    postselection[j][k] = est.postselection_probability;
                    if let Some(se) = est.standard_error {
                        standard_errors[j][k] = Some(se * est.postselection_probability);
                        any_sampled_se = true;
                    }
                    max_deviation = max_deviation.max(deviation);
                }
                Err(CoreError::PostselectionImpossible { probability }) => {
                    postselection[j][k] = probability;
                    warnings.push(Warning {
                        kind: "postselection_impossible",
                        message: format!(
                            "cell ({}, {}): postselection probability {probability:.3e} \
                             is zero within tolerance; estimate omitted",
                            a.label(j),
                            b.label(k)
                        ),
                    });
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    let payload = SimulationPayload {
        dim,
        basis_a_id: reference.basis_a_id().to_string(),
        basis_b_id: reference.basis_b_id().to_string(),
        labels_a: a.labels().to_vec(),
        labels_b: b.labels().to_vec(),
        coupling: opts.coupling,
        mode: if opts.sampled { "sampled" } else { "exact" },
        shots: opts.shots,
        values,
        reference: matrix_out(reference.values()),
        deviations,
        standard_errors: any_sampled_se.then_some(standard_errors),
        postselection,
        max_deviation,
    };
    let env = envelope(
        ctx,
        "simulate",
        &[
            ("state", path_arg(state)),
            ("basis_a", path_arg(basis_a)),
            ("basis_b", path_arg(basis_b)),
            ("coupling", json!(opts.coupling)),
            (
                "mode",
                Value::String(if opts.sampled { "sampled" } else { "exact" }.to_string()),
            ),
            ("shots", opts.shots.map_or(Value::Null, |s| json!(s))),
        ],
        &[state, basis_a, basis_b],
        warnings,
        Payload::Simulation(payload),
    )?;
    Ok(Outcome::ok(env))
}

fn lookup_scenario(name: &str) -> Result<Scenario, CliError> {
    match name {
        "three-box" => Ok(three_box()),
        "hardy" => Ok(hardy()),
        "mub-qubit" => Ok(mub_qubit_phase()),
        _ => Err(CliError::Usage {
            message: format!(
                "unknown scenario {name:?}; available scenarios: three-box, hardy, mub-qubit"
            ),
        }),
    }
}

pub fn cmd_scenario(
    ctx: &Ctx,
    name: &str,
    coupling: Option<f64>,
    tolerance: f64,
) -> Result<Outcome, CliError> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(CliError::Usage {
            message: format!("--tolerance must be a positive number, got {tolerance}"),
        });
    }
    let scenario = lookup_scenario(name)?;
    let report = verify(&scenario, tolerance)?;

    let estimates = match coupling {
        Some(g) => Some(estimate_scenario(&scenario, g, ctx)?),
        None => None,
    };

    let entries = report
        .entries
        .iter()
        .map(|e| ScenarioEntry {
            label: e.label.clone(),
            expected: from_c64(e.expected),
            computed: from_c64(e.computed),
            deviation: e.deviation,
            expected_phase: e.expected_phase,
            computed_phase: e.computed_phase,
            phase_deviation: e.phase_deviation,
            passed: e.passed,
        })
        .collect();

    let passed = report.passed;
    let max_deviation = report.max_deviation;
    let payload = ScenarioPayload {
        name: scenario.name,
        summary: scenario.summary,
        entries,
        weak_value_sum: from_c64(report.weak_value_sum),
        postselection_probability: report.postselection_probability,
        max_deviation,
        tolerance,
        passed,
        estimates,
    };
    let env = envelope(
        ctx,
        "scenario",
        &[
            ("name", Value::String(name.to_string())),
            ("coupling", coupling.map_or(Value::Null, |g| json!(g))),
            ("tolerance", json!(tolerance)),
        ],
        &[],
        Vec::new(),
        Payload::Scenario(payload),
    )?;
    let failure = (!passed).then(|| CliError::CheckFailed {
        what: "scenario_failed",
        message: format!(
            "scenario {name} deviates from its stored values by {max_deviation:.3e} \
             (tolerance {tolerance:.1e})"
        ),
    });
    Ok(Outcome {
        envelope: env,
        failure,
    })
}

/// Cross-checks a scenario's conditionals with the pointer simulator at
/// finite coupling.
fn estimate_scenario(
    scenario: &Scenario,
    coupling: f64,
    ctx: &Ctx,
) -> Result<ScenarioEstimates, CliError> {
    let rho = DensityOperator::from_pure(&scenario.preselection);
    let mut values = Vec::with_capacity(scenario.projectors.dim());
    let mut max_deviation = 0.0f64;
    for j in 0..scenario.projectors.dim() {
        let config = MeterConfig {
            coupling,
            mode: MeterMode::Exact,
            seed: ctx.seed,
        };
        let est = estimate_weak_value(
            &rho,
            scenario.projectors.vector(j),
            &scenario.postselection,
            &config,
            &ctx.tol,
        )?;
        max_deviation = max_deviation.max((est.value - scenario.expected_weak_values[j]).norm());
        values.push(from_c64(est.value));
    }
    Ok(ScenarioEstimates {
        coupling,
        values,
        max_deviation,
    })
}
