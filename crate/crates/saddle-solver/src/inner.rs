//! The inner concave problem
//! f(χ₁, χ₂) = tr(ρχ₁) − tr(ρχ₂) + 2α ln AffH(χ₁, χ₂)
//! in the real embedding of Hermitian matrices.

use fidelimax_core::optim::{maximize, ConstrainedProblem};
use fidelimax_core::povm::smooth;
use fidelimax_core::{project_density, DensityMatrix, Error, HermitianOperator, MeasurementPlan, Result};

use crate::config::SolverConfig;

struct SettingData {
    effects: Vec<Vec<f64>>,
    repetitions: f64,
}

/// Embedded plan data for repeated evaluations at one α.
pub(crate) struct InnerProblem {
    d: usize,
    rho: Vec<f64>,
    settings: Vec<SettingData>,
    epsilon_o: f64,
    pub(crate) alpha: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl InnerProblem {
    pub(crate) fn new(plan: &MeasurementPlan, alpha: f64) -> Self {
        Self {
            d: plan.dim(),
            rho: plan.target().op().embed(),
            settings: plan
                .settings()
                .iter()
                .map(|s| SettingData {
                    effects: s.effects().iter().map(HermitianOperator::embed).collect(),
                    repetitions: s.repetitions() as f64,
                })
                .collect(),
            epsilon_o: plan.epsilon_o(),
            alpha,
        }
    }

    fn n(&self) -> usize {
        self.d * self.d
    }

    fn probs(&self, s: &SettingData, x: &[f64]) -> Vec<f64> {
        let n = s.effects.len();
        s.effects.iter().map(|e| smooth(dot(e, x), n, self.epsilon_o)).collect()
    }

    /// Objective value; −∞ if the affinity vanishes.
    pub(crate) fn objective(&self, x: &[f64]) -> f64 {
        let (x1, x2) = x.split_at(self.n());
        let mut log_aff = 0.0;
        for s in &self.settings {
            let p1 = self.probs(s, x1);
            let p2 = self.probs(s, x2);
            let bc: f64 = p1.iter().zip(&p2).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum();
            log_aff += s.repetitions * bc.ln();
        }
        dot(&self.rho, x1) - dot(&self.rho, x2) + 2.0 * self.alpha * log_aff
    }

    /// Gradient; errors if a probability entering a ratio is not positive.
    pub(crate) fn try_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        let (x1, x2) = x.split_at(n);
        let mut g: Vec<f64> = self.rho.iter().copied().chain(self.rho.iter().map(|v| -v)).collect();
        let scale_o = 1.0 / (1.0 + self.epsilon_o);
        for s in &self.settings {
            let p1 = self.probs(s, x1);
            let p2 = self.probs(s, x2);
            if p1.iter().chain(&p2).any(|&p| !(p > 0.0)) {
                return Err(Error::Singularity(
                    "zero outcome probability in the affinity gradient; use epsilon_o > 0".into(),
                ));
            }
            let bc: f64 = p1.iter().zip(&p2).map(|(a, b)| (a * b).sqrt()).sum();
            let w = 2.0 * self.alpha * s.repetitions / bc * 0.5 * scale_o;
            for (k, e) in s.effects.iter().enumerate() {
                let r = (p2[k] / p1[k]).sqrt();
                let (c1, c2) = (w * r, w / r);
                for (i, ei) in e.iter().enumerate() {
                    g[i] += c1 * ei;
                    g[n + i] += c2 * ei;
                }
            }
        }
        Ok(g)
    }

    pub(crate) fn pack(chi1: &DensityMatrix, chi2: &DensityMatrix) -> Vec<f64> {
        let mut x = chi1.op().embed();
        x.extend(chi2.op().embed());
        x
    }

    pub(crate) fn unpack(&self, x: &[f64]) -> (DensityMatrix, DensityMatrix) {
        let n = self.n();
        // Iterates are projections, so re-projecting only removes rounding.
        (
            project_density(&HermitianOperator::from_embedding(self.d, &x[..n])),
            project_density(&HermitianOperator::from_embedding(self.d, &x[n..])),
        )
    }
}

impl ConstrainedProblem for InnerProblem {
    fn value(&mut self, x: &[f64]) -> f64 {
        self.objective(x)
    }

    fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        // Smoothed probabilities of feasible points are positive whenever
        // epsilon_o > 0; with epsilon_o = 0 fall back to a zero ascent
        // direction, which ends the solve at the current point.
        self.try_gradient(x).unwrap_or_else(|_| vec![0.0; x.len()])
    }

    fn project(&mut self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = project_density(&HermitianOperator::from_embedding(self.d, &x[..n])).op().embed();
        out.extend(project_density(&HermitianOperator::from_embedding(self.d, &x[n..])).op().embed());
        out
    }
}

/// Approximate maximizer of the inner problem at one α.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerSolution {
    pub chi1: DensityMatrix,
    pub chi2: DensityMatrix,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Gradient-mapping norm at the returned point.
    pub stationarity: f64,
    /// Objective after every iteration (non-decreasing).
    pub trace: Vec<f64>,
}

/// Maximizes tr(ρχ₁) − tr(ρχ₂) + 2α ln AffH over pairs of density
/// matrices, starting from `start` or from (ρ, I/d).
pub fn inner_maximize(
    plan: &MeasurementPlan,
    alpha: f64,
    config: &SolverConfig,
    start: Option<(&DensityMatrix, &DensityMatrix)>,
) -> Result<InnerSolution> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    config.validate()?;
    let mut problem = InnerProblem::new(plan, alpha);
    let x0 = match start {
        Some((a, b)) => InnerProblem::pack(a, b),
        None => InnerProblem::pack(plan.target(), &DensityMatrix::maximally_mixed(plan.dim())),
    };
    let out = maximize(&mut problem, &x0, &config.accelerated());
    let (chi1, chi2) = problem.unpack(&out.x);
    Ok(InnerSolution {
        chi1,
        chi2,
        value: out.value,
        iterations: out.iterations,
        converged: out.converged,
        stationarity: out.stationarity,
        trace: out.trace,
    })
}

/// Gradients of the inner objective with respect to χ₁ and χ₂.
pub fn inner_gradient(
    plan: &MeasurementPlan,
    alpha: f64,
    chi1: &DensityMatrix,
    chi2: &DensityMatrix,
) -> Result<(HermitianOperator, HermitianOperator)> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let problem = InnerProblem::new(plan, alpha);
    let g = problem.try_gradient(&InnerProblem::pack(chi1, chi2))?;
    let n = problem.n();
    Ok((
        HermitianOperator::from_embedding(problem.d, &g[..n]),
        HermitianOperator::from_embedding(problem.d, &g[n..]),
    ))
}

/// The inner objective value at a given pair.
pub fn inner_objective(plan: &MeasurementPlan, alpha: f64, chi1: &DensityMatrix, chi2: &DensityMatrix) -> f64 {
    InnerProblem::new(plan, alpha).objective(&InnerProblem::pack(chi1, chi2))
}

fn log_sum_exp(terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    // Σ_k w_k e^{t_k} for weights w_k > 0, evaluated stably.
    let items: Vec<(f64, f64)> = terms.filter(|(w, _)| *w > 0.0).collect();
    let m = items.iter().map(|(w, t)| w.ln() + t).fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + items.iter().map(|(w, t)| (w.ln() + t - m).exp()).sum::<f64>().ln()
}

/// Φ(χ₁, χ₂; φ, α) = tr(ρχ₁) − tr(ρχ₂) + 2α ln(2/ε)
///   + α Σ_l R_l [ln Σ_k e^{−φ_k/α} p₁_k + ln Σ_k e^{φ_k/α} p₂_k].
pub fn eval_phi(
    plan: &MeasurementPlan,
    chi1: &DensityMatrix,
    chi2: &DensityMatrix,
    phi: &[Vec<f64>],
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    if phi.len() != plan.settings().len()
        || phi.iter().zip(plan.settings()).any(|(p, s)| p.len() != s.num_outcomes())
    {
        return Err(Error::InvalidInput("phi must hold one vector per setting of matching length".into()));
    }
    let rho = plan.target().op();
    let mut value = rho.inner(chi1.op()) - rho.inner(chi2.op()) + 2.0 * alpha * (2.0 / plan.epsilon()).ln();
    for (s, f) in plan.settings().iter().zip(phi) {
        let p1 = fidelimax_core::born_probs(s, chi1, plan.epsilon_o())?;
        let p2 = fidelimax_core::born_probs(s, chi2, plan.epsilon_o())?;
        let a = log_sum_exp(p1.iter().zip(f).map(|(&p, &v)| (p, -v / alpha)));
        let b = log_sum_exp(p2.iter().zip(f).map(|(&p, &v)| (p, v / alpha)));
        value += alpha * s.repetitions() as f64 * (a + b);
    }
    Ok(value)
}
