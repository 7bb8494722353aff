//! Acceptance criteria, one PASS/FAIL line each. Criterion 11 is long and
//! runs only with FIDELIMAX_EXTENDED=1.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fidelimax_core::*;
use fidelimax_estimator::Dataset;
use fidelimax_mle::{bootstrap_interval, mle_reconstruct, nll, nll_gradient, MleConfig};
use fidelimax_risk::*;
use fidelimax_saddle::*;
use fidelimax_schemes::*;
use fidelimax_sim::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sci(v: f64) -> String {
    format_sci(v)
}

fn z_plan(reps: u64) -> MeasurementPlan {
    let rho = DensityMatrix::basis_state(2, 1).unwrap();
    let z = pauli_povm(&"Z".parse().unwrap(), PauliPovmMode::Eigenbasis, reps).unwrap();
    MeasurementPlan::new(rho, 0.05, 1e-5, vec![z]).unwrap()
}

fn within_time(pass: bool, elapsed: Duration, budget_s: f64) -> bool {
    pass && elapsed.as_secs_f64() < budget_s
}

fn toy_regression() -> Outcome {
    let t = Instant::now();
    let (_, est) = build_estimator(&z_plan(100), &SolverConfig::default()).unwrap();
    let el = t.elapsed();
    let a = &est.coefficients()[0];
    let c = est.constant();
    // F̂ = offset + slope·n₁ with n₀ + n₁ = 100.
    let slope = a[1] - a[0];
    let offset = c + 100.0 * a[0];
    let pass = (a[0] + 0.476e-2).abs() <= 2e-4
        && (a[1] - 0.476e-2).abs() <= 2e-4
        && (c - 0.5).abs() <= 1e-3
        && (slope * 100.0 - 0.952).abs() <= 2e-3
        && (offset - 0.024).abs() <= 2e-3;
    outcome(
        within_time(pass, el, 5.0),
        format!(
            "a = ({}, {}), c = {}, slope = {}/100, offset = {}, {:.2?}",
            sci(a[0]),
            sci(a[1]),
            sci(c),
            sci(slope * 100.0),
            sci(offset),
            el
        ),
    )
}

fn irrelevant_setting() -> Outcome {
    let cfg = SolverConfig::default();
    let base = z_plan(100);
    let (_, e0) = build_estimator(&base, &cfg).unwrap();
    let x = pauli_povm(&"X".parse().unwrap(), PauliPovmMode::Eigenbasis, 100).unwrap();
    let (_, e1) = build_estimator(&base.with_setting(x).unwrap(), &cfg).unwrap();
    let dz = e0.coefficients()[0].iter().zip(&e1.coefficients()[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ax = e1.coefficients()[1].iter().map(|v| v.abs()).fold(0.0, f64::max);
    outcome(dz < 5e-4 && ax < 1e-3, format!("max Z shift = {}, max |X coefficient| = {}", sci(dz), sci(ax)))
}

fn table_two_counts() -> Outcome {
    let got: Vec<u64> = [4, 8, 16].iter().map(|&d| sample_complexity_stabilizer(0.05, 0.05, d).unwrap()).collect();
    outcome(got == [1657, 2256, 2591], format!("d = 4/8/16 → {got:?}"))
}

fn closed_form_vs_solver() -> Outcome {
    let t = Instant::now();
    let cfg = SolverConfig::default();
    let mut worst = 0.0f64;
    for d in [2usize, 4] {
        for reps in [50u64, 100, 500] {
            let rho = random_pure_state_dim(d, 1000 + d as u64).unwrap();
            let plan = MeasurementPlan::new(rho.clone(), 0.05, 1e-5, vec![optimal_povm(&rho, reps).unwrap()]).unwrap();
            let risk = outer_minimize(&plan, &cfg).unwrap().risk();
            let closed = 0.5 * (1.0 - (0.025f64).powf(2.0 / reps as f64)).sqrt();
            worst = worst.max((risk - closed).abs());
        }
    }
    let el = t.elapsed();
    outcome(within_time(worst <= 2e-3, el, 60.0), format!("max |solver − closed form| = {}, {el:.2?}", sci(worst)))
}

fn proposition_two() -> Outcome {
    let t = Instant::now();
    let bell = StabilizerGroup::ghz(2).unwrap().state().unwrap();
    let mut risks = Vec::new();
    for reps in [100u64, 1000] {
        let s = pauli_povm(&"XX".parse().unwrap(), PauliPovmMode::Subspace, reps).unwrap();
        let plan = MeasurementPlan::new(bell.clone(), 0.05, 1e-5, vec![s]).unwrap();
        risks.push(outer_minimize(&plan, &SolverConfig::default()).unwrap().risk());
    }
    let el = t.elapsed();
    let pass = risks.iter().all(|r| (r - 0.5).abs() <= 1e-3);
    outcome(within_time(pass, el, 30.0), format!("R = 100/1000 → {}, {}, {el:.2?}", sci(risks[0]), sci(risks[1])))
}

/// Each trial draws its own R stabilizers, measures each once on σ and
/// records +1 outcomes under Θ and −1 outcomes under Δ_Θ.
fn statistical_coverage() -> Outcome {
    let t = Instant::now();
    let reps = 1657;
    let group = StabilizerGroup::ghz(2).unwrap();
    let rho = group.state().unwrap();
    let scheme = stabilizer_scheme(&group, reps, 0).unwrap();
    let plan = scheme.povm.plan(&rho, reps, 0.05, 1e-5).unwrap();
    let sp = solve_reduced_two_outcome(&TwoOutcomeProblem::from_plan(&plan).unwrap(), &SolverConfig::default()).unwrap();
    let est = extract_estimator(&sp, &plan).unwrap();
    let sigma = depolarize(&rho, 0.1).unwrap();
    let truth = fidelity_pure(&rho, &sigma).unwrap();
    let trials = 200u64;
    let mut covered = 0;
    for trial in 0..trials {
        let draws = stabilizer_scheme(&group, reps, derive_seed(1, trial)).unwrap();
        let mut rng = rng_from_seed(derive_seed(2, trial));
        let mut plus = 0u64;
        for g in &draws.samples {
            let p = 0.5 * (1.0 + g.expectation(sigma.op()));
            plus += random::sample_counts(&[p, 1.0 - p], 1, &mut rng)[0];
        }
        let data = Dataset::for_plan(&plan, vec![vec![plus, reps - plus]]).unwrap();
        if (est.estimate(&data).unwrap() - truth).abs() <= 0.05 {
            covered += 1;
        }
    }
    let el = t.elapsed();
    let frac = covered as f64 / trials as f64;
    outcome(
        within_time(frac >= 0.90 && (truth - 0.925).abs() < 1e-12, el, 300.0),
        format!("{covered}/{trials} within 0.05 of F = {}, risk {}, {el:.2?}", sci(truth), sci(est.risk())),
    )
}

fn vartheta_constant() -> Outcome {
    let v = vartheta(0.1).unwrap();
    outcome((v - 6.539).abs() <= 1e-3 && v < 6.54, format!("vartheta(0.1) = {}", sci(v)))
}

fn optimal_sample_complexity() -> Outcome {
    let n = sample_complexity_optimal(0.05, 0.05).unwrap();
    outcome(n == 735, format!("{n} shots"))
}

fn mle_pathology() -> Outcome {
    let t = Instant::now();
    let bell = StabilizerGroup::ghz(2).unwrap().state().unwrap();
    let sigma = depolarize(&bell, 0.1).unwrap();
    let truth = fidelity_pure(&bell, &sigma).unwrap();
    let s = pauli_povm(&"XX".parse().unwrap(), PauliPovmMode::Eigenbasis, 500).unwrap();
    let plan = MeasurementPlan::new(bell, 0.05, 1e-5, vec![s]).unwrap();
    let cfg = MleConfig::default();
    let trials = 100u64;
    let (mut sum, mut covered) = (0.0, 0);
    for trial in 0..trials {
        let data = sample_outcomes(&plan, &sigma, derive_seed(3, trial)).unwrap();
        sum += mle_reconstruct(&plan, &data, &cfg).unwrap().fidelity;
        let (_, iv) = bootstrap_interval(&plan, &data, 100, 0.05, derive_seed(4, trial), &cfg).unwrap();
        covered += iv.contains(truth) as usize;
    }
    let el = t.elapsed();
    let mean = sum / trials as f64;
    let coverage = covered as f64 / trials as f64;
    outcome(
        within_time((mean - 0.44).abs() <= 0.15 && coverage < 0.10, el, 600.0),
        format!("mean MLE fidelity = {}, bootstrap coverage = {covered}/{trials}, {el:.2?}", sci(mean)),
    )
}

fn random_plan(d: usize, settings: usize, reps: u64, seed: u64) -> MeasurementPlan {
    let rho = random_pure_state_dim(d, seed).unwrap();
    let s = (0..settings as u64)
        .map(|i| random_povm(d, 3, derive_seed(seed, i + 1)).unwrap().with_repetitions(reps).unwrap())
        .collect();
    MeasurementPlan::new(rho, 0.05, 1e-5, s).unwrap()
}

fn traceless_direction(d: usize, seed: u64) -> HermitianOperator {
    let mut rng = rng_from_seed(seed);
    let m = CMatrix::from_fn(d, d, |_, _| random::standard_complex(&mut rng));
    let h = HermitianOperator::symmetrized(m);
    h.add_scaled(-h.trace() / d as f64, &HermitianOperator::identity(d))
}

fn fd_agrees(fd: f64, analytic: f64) -> bool {
    (fd - analytic).abs() <= 1e-5 * analytic.abs().max(1e-3)
}

/// Deterministic sweeps over the same properties the proptest suites check.
fn property_suites() -> Outcome {
    let t = Instant::now();
    let cfg = SolverConfig::default();
    let mut failures = Vec::new();

    // Risk range and duality gap.
    for seed in 0..6u64 {
        let plan = random_plan(3, (seed % 3) as usize, 20 + 60 * seed, seed);
        let sp = outer_minimize(&plan, &cfg).unwrap();
        if !(sp.saddle_value >= 0.0 && sp.risk() <= 0.5 + cfg.precision) {
            failures.push(format!("risk range (seed {seed}): {}", sp.risk()));
        }
        let phi = optimal_coefficients(&sp, &plan).unwrap();
        let value = eval_phi(&plan, &sp.chi1_star, &sp.chi2_star, &phi, sp.alpha_star).unwrap();
        if (value - sp.saddle_value).abs() > 2.0 * (cfg.precision + cfg.inner_tolerance) {
            failures.push(format!("duality gap (seed {seed}): {}", (value - sp.saddle_value).abs()));
        }
    }

    // Monotonicity in L and R.
    let ghz = StabilizerGroup::ghz(2).unwrap().state().unwrap();
    let pool = PauliString::all_nonidentity(2).unwrap();
    let cells = risk_curve(&ghz, &pool, &[1, 3, 6], &[50, 100, 200], 0.05, 1e-5, PauliPovmMode::Subspace, 7, &cfg).unwrap();
    let get = |l, r| cells.iter().find(|c| c.l == l && c.r == r).unwrap().risk;
    for (l, r) in [(1, 50), (1, 100), (3, 50), (3, 100), (6, 50), (6, 100)] {
        if get(l, 2 * r) > get(l, r) + 2e-3 {
            failures.push(format!("monotone in R at L={l}, R={r}"));
        }
    }
    for r in [50, 100, 200] {
        if get(3, r) > get(1, r) + 2e-3 || get(6, r) > get(3, r) + 2e-3 {
            failures.push(format!("monotone in L at R={r}"));
        }
    }

    // Gradients of the inner objective and of the NLL.
    for seed in 0..10u64 {
        let d = 2 + (seed % 3) as usize;
        let plan = random_plan(d, 2, 50, 100 + seed);
        let chi1 = depolarize(&random_pure_state_dim(d, derive_seed(seed, 1)).unwrap(), 0.4).unwrap();
        let chi2 = depolarize(&random_pure_state_dim(d, derive_seed(seed, 2)).unwrap(), 0.6).unwrap();
        let (h1, h2) = (traceless_direction(d, derive_seed(seed, 3)), traceless_direction(d, derive_seed(seed, 4)));
        let shift = |c: &DensityMatrix, h: &HermitianOperator, s: f64| DensityMatrix::new(c.op().add_scaled(s, h)).unwrap();
        let alpha = 0.05;
        let (g1, g2) = inner_gradient(&plan, alpha, &chi1, &chi2).unwrap();
        let f = |s: f64| inner_objective(&plan, alpha, &shift(&chi1, &h1, s), &shift(&chi2, &h2, s));
        let fd = (f(1e-6) - f(-1e-6)) / 2e-6;
        if !fd_agrees(fd, g1.inner(&h1) + g2.inner(&h2)) {
            failures.push(format!("inner gradient (seed {seed})"));
        }
        let freqs = plan.probs(&chi2).unwrap();
        let g = nll_gradient(&plan, &freqs, &chi1).unwrap();
        let n = |s: f64| nll(&plan, &freqs, &shift(&chi1, &h1, s)).unwrap();
        if !fd_agrees((n(1e-6) - n(-1e-6)) / 2e-6, g.inner(&h1)) {
            failures.push(format!("NLL gradient (seed {seed})"));
        }
    }

    // Affinity activity above R₀ on two-outcome plans.
    for (w1, w2, reps) in [(1.0, 1.0 / 3.0, 300u64), (0.9, 0.3, 500), (0.8, 0.2, 1000)] {
        let model = TwoOutcomeModel::new(w1, w2, reps, 0.05).unwrap();
        assert!(reps as f64 > model.r0());
        let rho = random_pure_state_dim(4, reps).unwrap();
        let plan = TwoOutcomeProblem::new(rho, w1, w2, reps, 0.05, 1e-5).unwrap().plan().unwrap();
        let sp = outer_minimize(&plan, &cfg).unwrap();
        let aff = hellinger_affinity(&plan, &sp.chi1_star, &sp.chi2_star).unwrap();
        if (aff - 0.025).abs() > 1e-3 {
            failures.push(format!("affinity {aff} at ({w1}, {w2}, {reps})"));
        }
    }

    // Pauli weights of random pure states.
    for seed in 0..20u64 {
        let n = 1 + (seed % 3) as usize;
        let rho = random_pure_state(n, seed).unwrap();
        let x = pauli_expectations(&rho, n).unwrap();
        let d = rho.dim() as f64;
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let norm: f64 = x.iter().map(|v| v.abs()).sum();
        if (sq - (d - 1.0)).abs() > 1e-9 || norm > pauli_norm_bound(rho.dim()).unwrap() + 1e-8 {
            failures.push(format!("Pauli weights (n={n}, seed {seed})"));
        }
    }

    // Robustness bound in every perturbation run.
    let plan = z_plan(100);
    let (_, est) = build_estimator(&plan, &cfg).unwrap();
    let sigma = depolarize(plan.target(), 0.1).unwrap();
    let within = (0..100u64)
        .filter(|&s| {
            let r = perturb_and_estimate(&plan, &est, &sigma, 0.05, 0.02, s).unwrap();
            r.observed_difference <= r.bound
        })
        .count();
    if within != 100 {
        failures.push(format!("robustness bound held in {within}/100 runs"));
    }

    let el = t.elapsed();
    if failures.is_empty() {
        outcome(true, format!("all sweeps passed, robustness 100/100, {el:.2?}"))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn table_three() -> Outcome {
    let t = Instant::now();
    let rho = StabilizerGroup::ghz(4).unwrap().state().unwrap();
    let scheme = dfe_scheme(&rho, 0.05, 0.05, 0).unwrap();
    let cfg = SolverConfig::default();
    let risk = |mode| outer_minimize(&scheme.plan(mode, 1e-5).unwrap(), &cfg).unwrap().risk();
    let (sub, eig) = (risk(PauliPovmMode::Subspace), risk(PauliPovmMode::Eigenbasis));
    let el = t.elapsed();
    outcome(
        within_time(sub < 0.05 && eig < sub, el, 7200.0),
        format!(
            "{} Paulis ({} distinct, {} shots): subspace {}, eigenbasis {}, {el:.2?}",
            scheme.ell,
            scheme.settings.len(),
            scheme.total_shots(),
            sci(sub),
            sci(eig)
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("toy estimator regression", toy_regression),
        ("irrelevant measurement suppressed", irrelevant_setting),
        ("stabilizer sample complexities", table_two_counts),
        ("closed form vs solver", closed_form_vs_solver),
        ("insufficient generators give risk 0.5", proposition_two),
        ("statistical coverage", statistical_coverage),
        ("minimax guarantee constant", vartheta_constant),
        ("optimal sample complexity", optimal_sample_complexity),
        ("MLE overconfidence", mle_pathology),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += !o.pass as usize;
        println!("[{}] {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    if std::env::var("FIDELIMAX_EXTENDED").is_ok_and(|v| v == "1") {
        let o = table_three();
        println!("[{}] 11. DFE plans at four qubits (extended): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    } else {
        println!("[SKIP] 11. DFE plans at four qubits (extended): set FIDELIMAX_EXTENDED=1");
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
