//! POVM settings, measurement plans and the smoothed Born rule.

use crate::error::{invalid, Result};
use crate::hermitian::{check_dims, DensityMatrix, HermitianOperator, PSD_TOL};

/// Entrywise tolerance for Σ_k E_k = I.
pub const COMPLETENESS_TOL: f64 = 1e-10;
/// Default Born-rule smoothing.
pub const DEFAULT_EPSILON_O: f64 = 1e-5;

/// One measurement setting: a POVM and how many times it is repeated.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmSetting {
    label: String,
    effects: Vec<HermitianOperator>,
    repetitions: u64,
}

impl PovmSetting {
    pub fn new(label: impl Into<String>, effects: Vec<HermitianOperator>, repetitions: u64) -> Result<Self> {
        let label = label.into();
        let problems = setting_violations(&label, &effects, repetitions);
        if !problems.is_empty() {
            return Err(invalid(problems.join("; ")));
        }
        Ok(Self { label, effects, repetitions })
    }

    /// Same POVM with a different shot count.
    pub fn with_repetitions(&self, repetitions: u64) -> Result<Self> {
        Self::new(self.label.clone(), self.effects.clone(), repetitions)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn repetitions(&self) -> u64 {
        self.repetitions
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Unsmoothed probabilities tr(E_k σ).
    pub fn raw_probs(&self, state: &HermitianOperator) -> Vec<f64> {
        self.effects.iter().map(|e| e.inner(state)).collect()
    }
}

/// Every way in which a candidate setting breaks the POVM invariants.
pub fn setting_violations(label: &str, effects: &[HermitianOperator], repetitions: u64) -> Vec<String> {
    let mut out = Vec::new();
    if effects.is_empty() {
        out.push(format!("setting '{label}': no effects"));
        return out;
    }
    if repetitions == 0 {
        out.push(format!("setting '{label}': repetitions must be at least 1"));
    }
    let d = effects[0].dim();
    if effects.iter().any(|e| e.dim() != d) {
        out.push(format!("setting '{label}': effects have differing dimensions"));
        return out;
    }
    for (k, e) in effects.iter().enumerate() {
        let min = e.min_eigenvalue();
        if min < -PSD_TOL {
            out.push(format!("setting '{label}': effect {k} is not PSD (eigenvalue {min:.3e})"));
        }
    }
    let total = effects
        .iter()
        .fold(HermitianOperator::zeros(d), |acc, e| acc.add(e));
    let dev = total.sub(&HermitianOperator::identity(d)).max_abs_entry();
    if dev > COMPLETENESS_TOL {
        out.push(format!("setting '{label}': effects do not sum to identity (max deviation {dev:.3e})"));
    }
    out
}

/// (raw + ε_o/N)/(1 + ε_o)
#[inline]
pub fn smooth(raw: f64, outcomes: usize, epsilon_o: f64) -> f64 {
    (raw + epsilon_o / outcomes as f64) / (1.0 + epsilon_o)
}

/// Smoothed Born probabilities of one setting.
pub fn born_probs(setting: &PovmSetting, state: &DensityMatrix, epsilon_o: f64) -> Result<Vec<f64>> {
    check_dims(setting.dim(), state.dim())?;
    if !(epsilon_o >= 0.0) {
        return Err(invalid(format!("epsilon_o must be nonnegative, got {epsilon_o}")));
    }
    let n = setting.num_outcomes();
    Ok(setting
        .raw_probs(state.op())
        .into_iter()
        .map(|p| smooth(p, n, epsilon_o))
        .collect())
}

/// (Σ_k √(p_k q_k))²
pub fn classical_fidelity(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(invalid(format!("probability vectors differ in length ({} vs {})", p.len(), q.len())));
    }
    let bc: f64 = p.iter().zip(q).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum();
    Ok(bc * bc)
}

/// Everything needed to define the estimation problem.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementPlan {
    target: DensityMatrix,
    epsilon: f64,
    epsilon_o: f64,
    settings: Vec<PovmSetting>,
}

impl MeasurementPlan {
    pub fn new(target: DensityMatrix, epsilon: f64, epsilon_o: f64, settings: Vec<PovmSetting>) -> Result<Self> {
        let problems = plan_violations(&target, epsilon, epsilon_o, &settings);
        if !problems.is_empty() {
            return Err(invalid(problems.join("; ")));
        }
        Ok(Self { target, epsilon, epsilon_o, settings })
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn epsilon_o(&self) -> f64 {
        self.epsilon_o
    }

    pub fn settings(&self) -> &[PovmSetting] {
        &self.settings
    }

    pub fn total_repetitions(&self) -> u64 {
        self.settings.iter().map(|s| s.repetitions).sum()
    }

    /// Copy with one more setting.
    pub fn with_setting(&self, setting: PovmSetting) -> Result<Self> {
        let mut settings = self.settings.clone();
        settings.push(setting);
        Self::new(self.target.clone(), self.epsilon, self.epsilon_o, settings)
    }

    /// Copy with different settings.
    pub fn with_settings(&self, settings: Vec<PovmSetting>) -> Result<Self> {
        Self::new(self.target.clone(), self.epsilon, self.epsilon_o, settings)
    }

    /// Smoothed probabilities for every setting.
    pub fn probs(&self, state: &DensityMatrix) -> Result<Vec<Vec<f64>>> {
        self.settings
            .iter()
            .map(|s| born_probs(s, state, self.epsilon_o))
            .collect()
    }
}

/// Every way in which a candidate plan breaks the plan invariants.
pub fn plan_violations(target: &DensityMatrix, epsilon: f64, epsilon_o: f64, settings: &[PovmSetting]) -> Vec<String> {
    let mut out = Vec::new();
    if !(epsilon > 0.0 && epsilon < 0.25) {
        out.push(format!("epsilon {epsilon} outside (0, 0.25)"));
    }
    if !(epsilon_o >= 0.0 && epsilon_o.is_finite()) {
        out.push(format!("epsilon_o {epsilon_o} must be a finite nonnegative number"));
    }
    if !target.is_pure() {
        out.push(format!("target is not pure (purity {:.12})", target.purity()));
    }
    for s in settings {
        if s.dim() != target.dim() {
            out.push(format!(
                "setting '{}': dimension {} differs from target dimension {}",
                s.label,
                s.dim(),
                target.dim()
            ));
        }
    }
    out
}

/// ln Π_l (Σ_k √(p₁_k p₂_k))^{R_l} with smoothed probabilities.
pub fn log_hellinger_affinity(plan: &MeasurementPlan, chi1: &DensityMatrix, chi2: &DensityMatrix) -> Result<f64> {
    check_dims(plan.dim(), chi1.dim())?;
    check_dims(plan.dim(), chi2.dim())?;
    let mut total = 0.0;
    for s in plan.settings() {
        let p1 = born_probs(s, chi1, plan.epsilon_o)?;
        let p2 = born_probs(s, chi2, plan.epsilon_o)?;
        let bc: f64 = p1.iter().zip(&p2).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum();
        total += s.repetitions as f64 * bc.ln();
    }
    Ok(total)
}

/// Π_l (Σ_k √(p₁_k p₂_k))^{R_l} with smoothed probabilities.
pub fn hellinger_affinity(plan: &MeasurementPlan, chi1: &DensityMatrix, chi2: &DensityMatrix) -> Result<f64> {
    log_hellinger_affinity(plan, chi1, chi2).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z_basis() -> PovmSetting {
        PovmSetting::new(
            "Z",
            vec![HermitianOperator::diagonal(&[1.0, 0.0]), HermitianOperator::diagonal(&[0.0, 1.0])],
            1,
        )
        .unwrap()
    }

    #[test]
    fn born_examples() {
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        assert_eq!(born_probs(&z_basis(), &zero, 0.0).unwrap(), vec![1.0, 0.0]);
        let p = born_probs(&z_basis(), &zero, 1e-5).unwrap();
        assert!((p[0] - (1.0 + 5e-6) / (1.0 + 1e-5)).abs() < 1e-16);
        assert!((p[1] - 5e-6 / (1.0 + 1e-5)).abs() < 1e-20);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(born_probs(&z_basis(), &mixed, 0.0).unwrap(), vec![0.5, 0.5]);
        let big = DensityMatrix::maximally_mixed(3);
        assert!(born_probs(&z_basis(), &big, 0.0).is_err());
    }

    #[test]
    fn classical_fidelity_examples() {
        assert!((classical_fidelity(&[0.3, 0.7], &[0.3, 0.7]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(classical_fidelity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((classical_fidelity(&[0.5, 0.5], &[1.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(classical_fidelity(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn hellinger_examples() {
        let d = 3;
        let rho = DensityMatrix::basis_state(d, 0).unwrap();
        let setting = PovmSetting::new("opt", vec![rho.op().clone(), rho.complement()], 2).unwrap();
        let plan = MeasurementPlan::new(rho.clone(), 0.05, 0.0, vec![setting]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(d);
        let aff = hellinger_affinity(&plan, &rho, &mixed).unwrap();
        assert!((aff - 1.0 / d as f64).abs() < 1e-14);
        assert!((hellinger_affinity(&plan, &mixed, &mixed).unwrap() - 1.0).abs() < 1e-14);
        let empty = MeasurementPlan::new(rho.clone(), 0.05, 0.0, vec![]).unwrap();
        assert_eq!(hellinger_affinity(&empty, &rho, &mixed).unwrap(), 1.0);
    }

    #[test]
    fn violations_are_reported() {
        let bad = setting_violations("broken", &[HermitianOperator::diagonal(&[1.0, 0.0])], 3);
        assert_eq!(bad.len(), 1);
        assert!(bad[0].contains("broken"));
        let rho = DensityMatrix::basis_state(2, 0).unwrap();
        assert!(MeasurementPlan::new(rho, 0.3, 1e-5, vec![]).is_err());
    }
}
