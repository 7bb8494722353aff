//! Scalar minimization over α wrapped around the inner solve.

use fidelimax_core::{DensityMatrix, MeasurementPlan, Result};

use crate::config::SolverConfig;
use crate::inner::inner_maximize;

/// Which end of the α bracket the minimizer ran into, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketEnd {
    Lower,
    Upper,
}

/// Solver bookkeeping reported alongside the saddle point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverDiagnostics {
    /// Objective evaluations of the outer search (each is an inner solve).
    pub outer_evaluations: usize,
    /// Inner iterations summed over all evaluations.
    pub inner_iterations: usize,
    /// Iterations of the final inner solve at α*.
    pub final_inner_iterations: usize,
    /// Whether the final inner solve met its stopping rule.
    pub converged: bool,
    /// Gradient-mapping norm of the final inner solve.
    pub stationarity: f64,
    pub boundary: Option<BracketEnd>,
    pub warnings: Vec<String>,
}

/// Approximate saddle point of Φ.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddlePoint {
    pub chi1_star: DensityMatrix,
    pub chi2_star: DensityMatrix,
    pub alpha_star: f64,
    /// Twice the risk, before precision padding.
    pub saddle_value: f64,
    /// Padding δ added to the reported risk.
    pub precision: f64,
    pub diagnostics: SolverDiagnostics,
}

impl SaddlePoint {
    /// saddle_value / 2
    pub fn risk(&self) -> f64 {
        self.saddle_value / 2.0
    }

    /// saddle_value / 2 + δ
    pub fn reported_risk(&self) -> f64 {
        self.risk() + self.precision
    }

    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }
}

/// Golden-section search for the minimum of a unimodal `f` on [lo, hi].
/// Returns the midpoint of the final bracket.
pub(crate) fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// One inner solve as seen by the outer loop.
pub(crate) struct Solved<W> {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stationarity: f64,
    pub point: W,
}

/// Result of the outer loop before the maximizer is turned into states.
pub(crate) struct OuterResult<W> {
    pub alpha_star: f64,
    pub saddle_value: f64,
    pub point: W,
    pub diagnostics: SolverDiagnostics,
}

/// Shared outer loop: `solve(α, warm start)` maximizes the inner problem.
pub(crate) fn minimize_over_alpha<W, S>(epsilon: f64, config: &SolverConfig, cold: W, mut solve: S) -> Result<OuterResult<W>>
where
    S: FnMut(f64, &W) -> Result<Solved<W>>,
{
    config.validate()?;
    let log_term = 2.0 * (2.0 / epsilon).ln();
    let mut warm = cold;
    let mut diag = SolverDiagnostics::default();
    let lo = config.alpha_lo.log10();
    let hi = config.alpha_hi.log10();
    let tol = (1.0 + config.outer_tolerance).log10();

    let u_star = golden_section(
        |u| {
            let alpha = 10f64.powf(u);
            let sol = solve(alpha, &warm)?;
            diag.outer_evaluations += 1;
            diag.inner_iterations += sol.iterations;
            warm = sol.point;
            Ok(alpha * log_term + sol.value)
        },
        lo,
        hi,
        tol,
    )?;

    let alpha_star = 10f64.powf(u_star);
    let sol = solve(alpha_star, &warm)?;
    diag.outer_evaluations += 1;
    diag.inner_iterations += sol.iterations;
    diag.final_inner_iterations = sol.iterations;
    diag.converged = sol.converged;
    diag.stationarity = sol.stationarity;
    let edge = 10.0 * tol;
    if u_star - lo < edge {
        diag.boundary = Some(BracketEnd::Lower);
        diag.warnings.push(format!("alpha* = {alpha_star:.3e} sits at the lower end of the bracket"));
    } else if hi - u_star < edge {
        diag.boundary = Some(BracketEnd::Upper);
        diag.warnings.push(format!("alpha* = {alpha_star:.3e} sits at the upper end of the bracket"));
    }
    if !sol.converged {
        diag.warnings.push(format!(
            "final inner solve stopped after {} iterations without meeting the stall criterion",
            sol.iterations
        ));
    }
    Ok(OuterResult {
        alpha_star,
        saddle_value: (alpha_star * log_term + sol.value).max(0.0),
        point: sol.point,
        diagnostics: diag,
    })
}

/// Saddle point of Φ for a general plan: golden-section search on log₁₀ α
/// over the configured bracket, warm-starting each inner solve from the
/// previous maximizer.
pub fn outer_minimize(plan: &MeasurementPlan, config: &SolverConfig) -> Result<SaddlePoint> {
    let cold = (plan.target().clone(), DensityMatrix::maximally_mixed(plan.dim()));
    let out = minimize_over_alpha(plan.epsilon(), config, cold, |alpha, start: &(DensityMatrix, DensityMatrix)| {
        let sol = inner_maximize(plan, alpha, config, Some((&start.0, &start.1)))?;
        Ok(Solved {
            value: sol.value,
            iterations: sol.iterations,
            converged: sol.converged,
            stationarity: sol.stationarity,
            point: (sol.chi1, sol.chi2),
        })
    })?;
    Ok(SaddlePoint {
        chi1_star: out.point.0,
        chi2_star: out.point.1,
        alpha_star: out.alpha_star,
        saddle_value: out.saddle_value,
        precision: config.precision,
        diagnostics: out.diagnostics,
    })
}
