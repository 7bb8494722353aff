use fidelimax_core::{DensityMatrix, Error, HermitianOperator, MeasurementPlan, PovmSetting, Result};

/// Tolerance on Θ lying in span{ρ, Δ_ρ}.
const SPAN_TOL: f64 = 1e-8;

/// The two-outcome measurement {ρ, I − ρ}.
pub fn optimal_povm(target: &DensityMatrix, repetitions: u64) -> Result<PovmSetting> {
    target.require_pure()?;
    PovmSetting::new("optimal", vec![target.op().clone(), target.complement()], repetitions)
}

/// Two-outcome POVM {Θ, Δ_Θ} with Θ = ω₁ρ + ω₂Δ_ρ that summarizes the
/// statistics of a randomized scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectivePovm {
    theta: HermitianOperator,
    delta_theta: HermitianOperator,
    omega1: f64,
    omega2: f64,
}

impl EffectivePovm {
    pub fn new(target: &DensityMatrix, omega1: f64, omega2: f64) -> Result<Self> {
        target.require_pure()?;
        if !((0.0..=1.0).contains(&omega1) && (0.0..=1.0).contains(&omega2)) {
            return Err(Error::InvalidInput(format!("omegas ({omega1}, {omega2}) must lie in [0, 1]")));
        }
        let theta = target.op().scale(omega1).add_scaled(omega2, &target.complement());
        let delta_theta = HermitianOperator::identity(target.dim()).sub(&theta);
        Ok(Self { theta, delta_theta, omega1, omega2 })
    }

    /// Recovers (ω₁, ω₂) from an explicit Θ, checking span membership.
    pub fn from_theta(target: &DensityMatrix, theta: &HermitianOperator) -> Result<Self> {
        target.require_pure()?;
        let d = target.dim();
        if d < 2 || theta.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: theta.dim() });
        }
        let delta = target.complement();
        let omega1 = theta.inner(target.op());
        let omega2 = theta.inner(&delta) / (d - 1) as f64;
        let residual = theta.sub(&target.op().scale(omega1).add_scaled(omega2, &delta)).max_abs_entry();
        if residual > SPAN_TOL {
            return Err(Error::InvalidInput(format!("theta is not in span{{rho, I - rho}} (residual {residual:.3e})")));
        }
        let mut out = Self::new(target, omega1.clamp(0.0, 1.0), omega2.clamp(0.0, 1.0))?;
        out.theta = theta.clone();
        out.delta_theta = HermitianOperator::identity(d).sub(theta);
        Ok(out)
    }

    pub fn theta(&self) -> &HermitianOperator {
        &self.theta
    }

    pub fn delta_theta(&self) -> &HermitianOperator {
        &self.delta_theta
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    pub fn setting(&self, label: &str, repetitions: u64) -> Result<PovmSetting> {
        PovmSetting::new(label, vec![self.theta.clone(), self.delta_theta.clone()], repetitions)
    }

    /// Single-setting plan with R repetitions of {Θ, Δ_Θ}.
    pub fn plan(&self, target: &DensityMatrix, repetitions: u64, epsilon: f64, epsilon_o: f64) -> Result<MeasurementPlan> {
        MeasurementPlan::new(target.clone(), epsilon, epsilon_o, vec![self.setting("effective", repetitions)?])
    }
}
