//! Two-variable form of the inner problem for a single two-outcome setting
//! {Θ, I − Θ} with Θ = ω₁ρ + ω₂Δ_ρ.
//!
//! Restricting χᵢ = aᵢρ + (1 − aᵢ)Δ_ρ/(d − 1) loses nothing for such plans,
//! so the inner solve runs over (a₁, a₂) ∈ [0, 1]².

use fidelimax_core::optim::{maximize, ConstrainedProblem};
use fidelimax_core::{DensityMatrix, Error, HermitianOperator, MeasurementPlan, PovmSetting, Result};

use crate::config::SolverConfig;
use crate::outer::{minimize_over_alpha, SaddlePoint, Solved};

/// Residual allowed when recognizing Θ = ω₁ρ + ω₂Δ_ρ inside a plan.
const STRUCTURE_TOL: f64 = 1e-8;

/// A single two-outcome setting described by (ω₁, ω₂).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoOutcomeProblem {
    target: DensityMatrix,
    omega1: f64,
    omega2: f64,
    repetitions: u64,
    epsilon: f64,
    epsilon_o: f64,
}

impl TwoOutcomeProblem {
    pub fn new(
        target: DensityMatrix,
        omega1: f64,
        omega2: f64,
        repetitions: u64,
        epsilon: f64,
        epsilon_o: f64,
    ) -> Result<Self> {
        target.require_pure()?;
        if target.dim() < 2 {
            return Err(Error::InvalidInput("the two-outcome reduction needs d >= 2".into()));
        }
        if !(0.0..=1.0).contains(&omega1) || !(0.0..=1.0).contains(&omega2) {
            return Err(Error::InvalidInput(format!("omega values must lie in [0, 1], got ({omega1}, {omega2})")));
        }
        if !(omega1 > omega2) {
            return Err(Error::InvalidInput(format!("need omega1 > omega2, got ({omega1}, {omega2})")));
        }
        if !(epsilon > 0.0 && epsilon < 0.25) {
            return Err(Error::InvalidInput(format!("epsilon must lie in (0, 0.25), got {epsilon}")));
        }
        if !(epsilon_o >= 0.0 && epsilon_o.is_finite()) {
            return Err(Error::InvalidInput(format!("epsilon_o must be nonnegative, got {epsilon_o}")));
        }
        Ok(Self { target, omega1, omega2, repetitions, epsilon, epsilon_o })
    }

    /// Recognizes a plan with one two-outcome setting whose effects are
    /// diagonal in the (ρ, Δ_ρ) split.
    pub fn from_plan(plan: &MeasurementPlan) -> Result<Self> {
        let [setting] = plan.settings() else {
            return Err(Error::InvalidInput("the two-outcome reduction needs exactly one setting".into()));
        };
        if setting.num_outcomes() != 2 {
            return Err(Error::InvalidInput("the two-outcome reduction needs a two-outcome setting".into()));
        }
        let rho = plan.target();
        let d = plan.dim();
        if d < 2 {
            return Err(Error::InvalidInput("the two-outcome reduction needs d >= 2".into()));
        }
        let delta = rho.complement();
        // Either effect may play the role of Θ; take the one aligned with ρ.
        let decompose = |theta: &HermitianOperator| {
            let omega1 = theta.inner(rho.op());
            let omega2 = theta.inner(&delta) / (d - 1) as f64;
            let rebuilt = rho.op().scale(omega1).add_scaled(omega2, &delta);
            (omega1, omega2, theta.sub(&rebuilt).max_abs_entry())
        };
        let (mut omega1, mut omega2, residual) = decompose(&setting.effects()[0]);
        if residual > STRUCTURE_TOL {
            return Err(Error::InvalidInput(format!(
                "effects are not of the form omega1*rho + omega2*(I - rho) (residual {residual:.3e})"
            )));
        }
        if omega1 < omega2 {
            (omega1, omega2) = (1.0 - omega1, 1.0 - omega2);
        }
        Self::new(rho.clone(), omega1, omega2, setting.repetitions(), plan.epsilon(), plan.epsilon_o())
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn repetitions(&self) -> u64 {
        self.repetitions
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The full-dimensional plan {Θ, I − Θ} this problem stands for.
    pub fn plan(&self) -> Result<MeasurementPlan> {
        let delta = self.target.complement();
        let theta = self.target.op().scale(self.omega1).add_scaled(self.omega2, &delta);
        let rest = HermitianOperator::identity(self.target.dim()).sub(&theta);
        let setting = PovmSetting::new("theta", vec![theta, rest], self.repetitions)?;
        MeasurementPlan::new(self.target.clone(), self.epsilon, self.epsilon_o, vec![setting])
    }

    /// aρ + (1 − a)Δ_ρ/(d − 1)
    pub fn state(&self, a: f64) -> DensityMatrix {
        let d = self.target.dim();
        let op = self.target.op().scale(a).add_scaled((1.0 - a) / (d - 1) as f64, &self.target.complement());
        fidelimax_core::project_density(&op)
    }
}

struct Reduced<'a> {
    p: &'a TwoOutcomeProblem,
    alpha: f64,
}

impl Reduced<'_> {
    /// Smoothed (P, Q) for the outcome pair at fidelity a.
    fn probs(&self, a: f64) -> (f64, f64) {
        let eo = self.p.epsilon_o;
        let q = self.p.omega2 + (self.p.omega1 - self.p.omega2) * a;
        ((q + eo / 2.0) / (1.0 + eo), (1.0 - q + eo / 2.0) / (1.0 + eo))
    }
}

impl ConstrainedProblem for Reduced<'_> {
    fn value(&mut self, x: &[f64]) -> f64 {
        let (p1, q1) = self.probs(x[0]);
        let (p2, q2) = self.probs(x[1]);
        let s = (p1.max(0.0) * p2.max(0.0)).sqrt() + (q1.max(0.0) * q2.max(0.0)).sqrt();
        x[0] - x[1] + 2.0 * self.alpha * self.p.repetitions as f64 * s.ln()
    }

    fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        let (p1, q1) = self.probs(x[0]);
        let (p2, q2) = self.probs(x[1]);
        if [p1, q1, p2, q2].iter().any(|v| !(*v > 0.0)) {
            return vec![0.0; 2];
        }
        let s = (p1 * p2).sqrt() + (q1 * q2).sqrt();
        let k = (self.p.omega1 - self.p.omega2) / (1.0 + self.p.epsilon_o) * 0.5;
        let w = 2.0 * self.alpha * self.p.repetitions as f64 / s;
        let ds1 = k * ((p2 / p1).sqrt() - (q2 / q1).sqrt());
        let ds2 = k * ((p1 / p2).sqrt() - (q1 / q2).sqrt());
        vec![1.0 + w * ds1, -1.0 + w * ds2]
    }

    fn project(&mut self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| v.clamp(0.0, 1.0)).collect()
    }
}

/// Saddle point for a two-outcome problem, solved over (a₁, a₂) instead of
/// full density matrices. The returned states are assembled at the end.
pub fn solve_reduced_two_outcome(problem: &TwoOutcomeProblem, config: &SolverConfig) -> Result<SaddlePoint> {
    let acc = config.accelerated();
    let out = minimize_over_alpha(problem.epsilon, config, vec![1.0, 0.0], |alpha, start: &Vec<f64>| {
        let mut reduced = Reduced { p: problem, alpha };
        let res = maximize(&mut reduced, start, &acc);
        Ok(Solved {
            value: res.value,
            iterations: res.iterations,
            converged: res.converged,
            stationarity: res.stationarity,
            point: res.x,
        })
    })?;
    Ok(SaddlePoint {
        chi1_star: problem.state(out.point[0]),
        chi2_star: problem.state(out.point[1]),
        alpha_star: out.alpha_star,
        saddle_value: out.saddle_value,
        precision: config.precision,
        diagnostics: out.diagnostics,
    })
}
