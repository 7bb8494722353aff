use std::path::Path;

use fidelimax_core::{
    derive_seed, pauli_expectations, plan_to_json, qubits_for_dim, MeasurementPlan, PauliString, PlanFile,
    StabilizerGroup,
};
use fidelimax_mle::{bootstrap_interval, mle_reconstruct, MleConfig};
use fidelimax_risk as risk;
use fidelimax_saddle::{
    extract_estimator, outer_minimize, solve_reduced_two_outcome, SaddlePoint, SolverConfig, TwoOutcomeProblem,
};
use fidelimax_schemes::{dfe_scheme, optimal_povm, pauli_povm, pauli_scheme, stabilizer_scheme, PauliPovmMode};
use fidelimax_sim::{format_sci as sci, perturb_and_estimate, risk_curve, risk_curve_csv, run_coverage, sample_outcomes};

use crate::error::CliError;
use crate::target::{parse_group, parse_state, state_with_noise};
use crate::{io, BuildArgs, Command, PlanCommand, PlanOut, RiskCommand, RiskCommon, SchemeCommand, SolverArgs};

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Plan(PlanCommand::Validate { plan }) => validate(&plan),
        Command::Build(a) => build(a),
        Command::Estimate(a) => {
            let est = io::load_estimator(&a.estimator)?;
            let e = est.evaluate(&io::load_data(&a.data)?)?;
            println!("F = {} ± {} (confidence {})", sci(e.value), sci(e.risk), sci(1.0 - est.epsilon()));
            if e.unphysical {
                eprintln!("note: the affine estimate lies outside [0, 1]");
            }
            Ok(())
        }
        Command::Risk(cmd) => risk_cmd(cmd),
        Command::Scheme(cmd) => scheme(cmd),
        Command::Simulate(a) => {
            io::check_out(&a.out)?;
            let plan = io::load_plan(&a.plan)?;
            let state = state_with_noise(a.state.state.as_deref(), plan.target(), a.state.depolarize)?;
            let data = sample_outcomes(&plan, &state, a.seed)?;
            io::write(&a.out, &data.to_json())?;
            println!("shots = {:?}", data.repetitions());
            Ok(())
        }
        Command::Trials(a) => {
            if let Some(out) = &a.out {
                io::check_out(out)?;
            }
            let plan = io::load_plan(&a.plan)?;
            let est = io::load_estimator(&a.estimator)?;
            let state = state_with_noise(a.state.state.as_deref(), plan.target(), a.state.depolarize)?;
            let r = run_coverage(&plan, &est, &state, a.trials, a.seed)?;
            println!("trials = {}", r.trials);
            println!("true fidelity = {}", sci(r.true_fidelity));
            println!("risk = {}", sci(r.risk));
            println!("coverage = {} ({}/{})", sci(r.empirical_coverage), r.coverage_count, r.trials);
            println!("mean estimate = {}", sci(r.mean_estimate));
            println!("mean abs error = {}", sci(r.mean_abs_error));
            if let Some(out) = &a.out {
                io::write(out, &r.to_json())?;
            }
            Ok(())
        }
        Command::Curve(a) => {
            if let Some(out) = &a.out {
                io::check_out(out)?;
            }
            let target = parse_state(&a.target)?;
            let n = qubits_for_dim(target.dim())?;
            let all = PauliString::all_nonidentity(n)?;
            let pool: Vec<PauliString> = match a.pool.as_str() {
                "all" => all,
                "support" => {
                    let x = pauli_expectations(&target, n)?;
                    all.into_iter().zip(x).filter(|(_, v)| v.abs() > 1e-12).map(|(w, _)| w).collect()
                }
                other => return Err(CliError::Usage(format!("unknown pool '{other}' (expected all or support)"))),
            };
            let mode: PauliPovmMode = a.mode.parse()?;
            let cfg = solver_config(&a.solver)?;
            let cells = risk_curve(&target, &pool, &a.l, &a.r, a.epsilon, a.epsilon_o, mode, a.seed, &cfg)?;
            let csv = risk_curve_csv(&cells);
            match &a.out {
                Some(out) => io::write(out, &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Mle(a) => {
            if let Some(out) = &a.out {
                io::check_out(out)?;
            }
            let plan = io::load_plan(&a.plan)?;
            let data = io::load_data(&a.data)?;
            let cfg = MleConfig::default();
            let (fit, interval) = match a.bootstrap {
                Some(b) => {
                    let eps = a.epsilon.unwrap_or(plan.epsilon());
                    let (fit, iv) = bootstrap_interval(&plan, &data, b, eps, a.seed, &cfg)?;
                    (fit, Some(iv))
                }
                None => (mle_reconstruct(&plan, &data, &cfg)?, None),
            };
            println!("MLE fidelity = {}", sci(fit.fidelity));
            println!("nll = {}", sci(fit.nll));
            println!("iterations = {} (converged: {})", fit.iterations, fit.converged);
            if let Some(iv) = &interval {
                println!("bootstrap interval = [{}, {}], median {}", sci(iv.lo), sci(iv.hi), sci(iv.median));
            }
            if let Some(out) = &a.out {
                io::write(out, &fit.to_json(interval.as_ref()))?;
            }
            Ok(())
        }
        Command::Robustness(a) => {
            if let Some(out) = &a.out {
                io::check_out(out)?;
            }
            if a.runs == 0 {
                return Err(CliError::Usage("--runs must be positive".into()));
            }
            let plan = io::load_plan(&a.plan)?;
            let est = io::load_estimator(&a.estimator)?;
            let state = state_with_noise(a.state.state.as_deref(), plan.target(), a.state.depolarize)?;
            let reports = (0..a.runs as u64)
                .map(|i| perturb_and_estimate(&plan, &est, &state, a.delta_s, a.delta_m, derive_seed(a.seed, i)))
                .collect::<fidelimax_core::Result<Vec<_>>>()?;
            let within = reports.iter().filter(|r| r.observed_difference <= r.bound).count();
            let max_diff = reports.iter().map(|r| r.observed_difference).fold(0.0, f64::max);
            let max_bound = reports.iter().map(|r| r.bound).fold(0.0, f64::max);
            println!("runs = {}", a.runs);
            println!("within bound = {within}/{}", a.runs);
            println!("max observed difference = {}", sci(max_diff));
            println!("max bound = {}", sci(max_bound));
            if let Some(out) = &a.out {
                io::write(out, &serde_json::to_string_pretty(&reports).expect("report serialization"))?;
            }
            Ok(())
        }
    }
}

fn validate(path: &Path) -> Result<(), CliError> {
    let file = PlanFile::parse(&io::read(path)?)?;
    let problems = file.violations();
    if problems.is_empty() {
        println!("valid: {} setting(s), dimension {}", file.settings.len(), file.dimension);
        return Ok(());
    }
    for p in &problems {
        println!("violation: {p}");
    }
    Err(CliError::Failed(format!("{} violation(s) in {}", problems.len(), path.display())))
}

fn solver_config(a: &SolverArgs) -> Result<SolverConfig, CliError> {
    let mut cfg = SolverConfig { precision: a.delta, ..SolverConfig::default() };
    if let Some(v) = a.inner_tolerance {
        cfg.inner_tolerance = v;
    }
    if let Some(v) = a.inner_max_iters {
        cfg.inner_max_iters = v;
    }
    if let Some(v) = a.outer_tolerance {
        cfg.outer_tolerance = v;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn print_diagnostics(sp: &SaddlePoint) {
    let d = &sp.diagnostics;
    println!("alpha* = {}", sci(sp.alpha_star));
    println!("saddle value = {}", sci(sp.saddle_value));
    println!(
        "outer evaluations = {}, inner iterations = {}, final inner iterations = {}",
        d.outer_evaluations, d.inner_iterations, d.final_inner_iterations
    );
    println!("stationarity = {} (converged: {})", sci(d.stationarity), d.converged);
    for w in &d.warnings {
        println!("warning: {w}");
    }
}

fn build(a: BuildArgs) -> Result<(), CliError> {
    io::check_out(&a.out)?;
    let plan = io::load_plan(&a.plan)?;
    let cfg = solver_config(&a.solver)?;
    let sp = if a.reduced_two_outcome {
        solve_reduced_two_outcome(&TwoOutcomeProblem::from_plan(&plan)?, &cfg)?
    } else {
        outer_minimize(&plan, &cfg)?
    };
    print_diagnostics(&sp);
    if !sp.converged() {
        return Err(CliError::Failed("the inner solve did not converge; no estimator written".into()));
    }
    let est = extract_estimator(&sp, &plan)?;
    println!("risk = {}", sci(est.risk()));
    println!("constant = {}", sci(est.constant()));
    for (s, a) in plan.settings().iter().zip(est.coefficients()) {
        let coeffs: Vec<String> = a.iter().map(|v| sci(*v)).collect();
        println!("setting '{}': [{}]", s.label(), coeffs.join(", "));
    }
    io::write(&a.out, &est.to_json())?;
    Ok(())
}

fn target_risk(c: &RiskCommon) -> Result<f64, CliError> {
    c.risk.ok_or_else(|| CliError::Usage("--invert needs --risk".into()))
}

fn reps(c: &RiskCommon) -> Result<u64, CliError> {
    c.reps.ok_or_else(|| CliError::Usage("--reps is required".into()))
}

fn risk_cmd(cmd: RiskCommand) -> Result<(), CliError> {
    match cmd {
        RiskCommand::LowerBound(c) => {
            if c.invert {
                println!("{}", risk::sample_complexity_optimal(target_risk(&c)?, c.epsilon)?);
            } else {
                println!("{}", sci(risk::risk_lower_bound(reps(&c)?, c.epsilon)?));
            }
        }
        RiskCommand::TwoOutcome { omega1, omega2, common: c } => {
            if c.invert {
                println!("{}", risk::sample_complexity_two_outcome(target_risk(&c)?, c.epsilon, omega1, omega2)?);
            } else {
                let m = risk::TwoOutcomeModel::new(omega1, omega2, reps(&c)?, c.epsilon)?;
                println!("{}", sci(risk::risk_two_outcome(&m)));
            }
        }
        RiskCommand::Stabilizer { d, common: c } => {
            if c.invert {
                println!("{}", risk::sample_complexity_stabilizer(target_risk(&c)?, c.epsilon, d)?);
            } else {
                println!("{}", sci(risk::risk_stabilizer(d as f64, reps(&c)?, c.epsilon)?));
            }
        }
        RiskCommand::Pauli { norm, d, common: c } => {
            if c.invert {
                println!("{}", risk::sample_complexity_pauli(target_risk(&c)?, c.epsilon, norm, d)?);
            } else {
                if !(norm > 0.0) || d < 2 {
                    return Err(CliError::Usage("need --norm > 0 and --d ≥ 2".into()));
                }
                let df = d as f64;
                let m = risk::TwoOutcomeModel::new(
                    (df + norm - 1.0) / (2.0 * norm),
                    (norm - 1.0) / (2.0 * norm),
                    reps(&c)?,
                    c.epsilon,
                )?;
                println!("{}", sci(risk::risk_two_outcome(&m)));
            }
        }
        RiskCommand::Vartheta { epsilon } => println!("{}", sci(risk::vartheta(epsilon)?)),
    }
    Ok(())
}

fn write_plan(out: &PlanOut, plan: &MeasurementPlan) -> Result<(), CliError> {
    io::write(&out.out, &plan_to_json(plan))?;
    println!(
        "wrote {} setting(s), {} shots, to {}",
        plan.settings().len(),
        plan.total_repetitions(),
        out.out.display()
    );
    Ok(())
}

fn write_samples(path: &Path, samples: Vec<String>) -> Result<(), CliError> {
    io::write(path, &serde_json::to_string_pretty(&samples).expect("sample serialization"))
}

fn parse_paulis(list: &str) -> Result<Vec<PauliString>, CliError> {
    Ok(list.split(',').map(str::parse).collect::<fidelimax_core::Result<Vec<_>>>()?)
}

fn scheme(cmd: SchemeCommand) -> Result<(), CliError> {
    match cmd {
        SchemeCommand::Optimal { target, reps, out } => {
            io::check_out(&out.out)?;
            let rho = parse_state(&target)?;
            let plan = MeasurementPlan::new(rho.clone(), out.epsilon, out.epsilon_o, vec![optimal_povm(&rho, reps)?])?;
            write_plan(&out, &plan)
        }
        SchemeCommand::Stabilizer { n, generators, reps, seed, samples_out, out } => {
            io::check_out(&out.out)?;
            let group = match (n, generators) {
                (Some(n), _) => StabilizerGroup::ghz(n)?,
                (None, Some(g)) => parse_group(&format!("stabilizer:{g}"))?.expect("stabilizer spec"),
                (None, None) => return Err(CliError::Usage("give --n or --generators".into())),
            };
            let s = stabilizer_scheme(&group, reps, seed)?;
            let plan = s.povm.plan(&group.state()?, reps, out.epsilon, out.epsilon_o)?;
            println!("omega1 = {}, omega2 = {}", sci(s.povm.omega1()), sci(s.povm.omega2()));
            if let Some(path) = samples_out {
                write_samples(&path, s.samples.iter().map(|p| p.to_string()).collect())?;
            }
            write_plan(&out, &plan)
        }
        SchemeCommand::Pauli { target, reps, seed, samples_out, out } => {
            io::check_out(&out.out)?;
            let rho = parse_state(&target)?;
            let s = pauli_scheme(&rho, reps, seed)?;
            let plan = s.povm.plan(&rho, reps, out.epsilon, out.epsilon_o)?;
            println!("N = {}", sci(s.spec.norm_n));
            println!("omega1 = {}, omega2 = {}", sci(s.povm.omega1()), sci(s.povm.omega2()));
            if let Some(path) = samples_out {
                write_samples(&path, s.samples.iter().map(|p| p.pauli.to_string()).collect())?;
            }
            write_plan(&out, &plan)
        }
        SchemeCommand::Dfe { target, risk, mode, seed, out } => {
            io::check_out(&out.out)?;
            let mode: PauliPovmMode = mode.parse()?;
            let rho = parse_state(&target)?;
            let s = dfe_scheme(&rho, risk, out.epsilon, seed)?;
            println!("sampled Paulis = {}, distinct = {}", s.ell, s.settings.len());
            write_plan(&out, &s.plan(mode, out.epsilon_o)?)
        }
        SchemeCommand::PauliSet { target, paulis, mode, reps, out } => {
            io::check_out(&out.out)?;
            let mode: PauliPovmMode = mode.parse()?;
            let rho = parse_state(&target)?;
            let settings =
                parse_paulis(&paulis)?.iter().map(|w| pauli_povm(w, mode, reps)).collect::<fidelimax_core::Result<_>>()?;
            write_plan(&out, &MeasurementPlan::new(rho, out.epsilon, out.epsilon_o, settings)?)
        }
    }
}
