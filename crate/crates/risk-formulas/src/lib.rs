//! Closed-form risks, sample complexities and guarantee constants for
//! minimax fidelity estimation.
//!
//! Risks are half-widths of confidence intervals at confidence 1 − ε.
//! Sample complexities are shot counts rounded up to the next integer.

#![forbid(unsafe_code)]

use fidelimax_core::{Error, Result};

/// Largest shot count a sample-complexity function will return.
pub const MAX_SAMPLES: f64 = 4.611_686_018_427_388e18; // 2^62

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.25 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("epsilon {epsilon} outside (0, 0.25)")))
    }
}

fn check_risk(risk: f64) -> Result<()> {
    if risk > 0.0 && risk < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("risk {risk} outside (0, 0.5)")))
    }
}

fn ceil_count(x: f64) -> Result<u64> {
    if !x.is_finite() || x > MAX_SAMPLES {
        return Err(Error::ResourceLimit(format!("sample complexity {x:e} exceeds 2^62")));
    }
    Ok(x.ceil().max(1.0) as u64)
}

/// (ε/2)^{2/R}
pub fn gamma(repetitions: u64, epsilon: f64) -> f64 {
    (epsilon / 2.0).powf(2.0 / repetitions as f64)
}

/// Factor ϑ(ε) = 2 + ln 64 / ln(0.25/ε) by which the computed risk may
/// exceed the minimax optimum.
pub fn vartheta(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(2.0 + 64f64.ln() / (0.25 / epsilon).ln())
}

/// Smallest risk any estimator can reach with R shots: ½√(1 − (ε/2)^{2/R}).
pub fn risk_lower_bound(repetitions: u64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    if repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be at least 1".into()));
    }
    Ok(0.5 * (1.0 - gamma(repetitions, epsilon)).sqrt())
}

/// ⌈2 ln(2/ε) / |ln(1 − c·risk²)|⌉
fn sample_complexity_with(risk: f64, epsilon: f64, c: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    check_risk(risk)?;
    let arg = 1.0 - c * risk * risk;
    if arg <= 0.0 {
        return Err(Error::InvalidInput(format!("risk {risk} is not attainable by this scheme")));
    }
    ceil_count(2.0 * (2.0 / epsilon).ln() / arg.ln().abs())
}

/// Shots needed by the optimal measurement {ρ, I − ρ} to reach `risk`.
pub fn sample_complexity_optimal(risk: f64, epsilon: f64) -> Result<u64> {
    sample_complexity_with(risk, epsilon, 4.0)
}

/// Shots needed by uniform stabilizer sampling in dimension `d`.
pub fn sample_complexity_stabilizer(risk: f64, epsilon: f64, d: usize) -> Result<u64> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension {d} must be at least 2")));
    }
    let r = d as f64 / (d as f64 - 1.0);
    sample_complexity_with(risk, epsilon, r * r)
}

/// Shots needed by randomized Pauli sampling with weight N = Σ|tr(W_iρ)|.
pub fn sample_complexity_pauli(risk: f64, epsilon: f64, norm_n: f64, d: usize) -> Result<u64> {
    if !(norm_n > 0.0) || d < 2 {
        return Err(Error::InvalidInput("need N > 0 and d ≥ 2".into()));
    }
    if risk * d as f64 / norm_n >= 1.0 {
        return Err(Error::InvalidInput(format!("risk {risk} ≥ N/d = {} is infeasible", norm_n / d as f64)));
    }
    let r = d as f64 / norm_n;
    sample_complexity_with(risk, epsilon, r * r)
}

/// Shots sufficient for a two-outcome effective POVM with coefficients
/// ω₁ > ω₂ to reach `risk`.
pub fn sample_complexity_two_outcome(risk: f64, epsilon: f64, omega1: f64, omega2: f64) -> Result<u64> {
    if !(omega1 > omega2) {
        return Err(Error::InvalidInput(format!("need omega1 > omega2, got {omega1} ≤ {omega2}")));
    }
    let s = 2.0 * (omega1 - omega2);
    sample_complexity_with(risk, epsilon, s * s)
}

/// Upper bound (d − 1)√(d + 1) on N = Σ_i |tr(W_iρ)| over pure states.
pub fn pauli_norm_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("dimension {d} must be at least 2")));
    }
    let d = d as f64;
    Ok((d - 1.0) * (d + 1.0).sqrt())
}

/// Two-outcome effective POVM {Θ, I − Θ} with Θ = ω₁ρ + ω₂(I − ρ),
/// repeated R times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoOutcomeModel {
    pub omega1: f64,
    pub omega2: f64,
    pub repetitions: u64,
    pub epsilon: f64,
}

impl TwoOutcomeModel {
    pub fn new(omega1: f64, omega2: f64, repetitions: u64, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !((0.0..=1.0).contains(&omega1) && (0.0..=1.0).contains(&omega2)) {
            return Err(Error::InvalidInput(format!("omegas ({omega1}, {omega2}) must lie in [0, 1]")));
        }
        if !(omega1 > omega2) {
            return Err(Error::InvalidInput(format!("need omega1 > omega2, got {omega1} ≤ {omega2}")));
        }
        if repetitions == 0 {
            return Err(Error::InvalidInput("repetitions must be at least 1".into()));
        }
        Ok(Self { omega1, omega2, repetitions, epsilon })
    }

    pub fn gamma(&self) -> f64 {
        gamma(self.repetitions, self.epsilon)
    }

    /// Shot threshold R₀ at or below which no estimator beats risk 0.5.
    pub fn r0(&self) -> f64 {
        let (w1, w2) = (self.omega1, self.omega2);
        let bc = (w1 * w2).sqrt() + ((1.0 - w1) * (1.0 - w2)).sqrt();
        if bc <= 0.0 {
            0.0
        } else {
            (2.0 / self.epsilon).ln() / bc.ln().abs()
        }
    }

    /// (a₋, a₊) = ω ± √(ω(1 − ω)(1 − γ)/γ) for ω = ω₁ or ω₂.
    pub fn a_bounds(&self, omega: f64) -> (f64, f64) {
        let g = self.gamma();
        let h = (omega * (1.0 - omega) * (1.0 - g) / g).sqrt();
        (omega - h, omega + h)
    }

    /// The feasible set A_a as disjoint closed intervals inside [0, 1].
    ///
    /// Besides the quadratic conditions on a, both α₂ ≥ 0 and α₁ ≤ 1 need
    /// the side that was squared to be nonnegative:
    /// (2a − 1)γ ≥ 2ω₂ − 1 and (2a − 1)γ ≤ 2ω₁ − 1. Without these, values of a
    /// with a negative α₂ slip in once ω₂ > ½.
    pub fn feasible_set(&self) -> Vec<(f64, f64)> {
        let g = self.gamma();
        let sign_lo = 0.5 * (1.0 + (2.0 * self.omega2 - 1.0) / g);
        let sign_hi = 0.5 * (1.0 + (2.0 * self.omega1 - 1.0) / g);
        let mut set = vec![(sign_lo.max(0.0), sign_hi.min(1.0))];
        set.retain(|(l, u)| l <= u);
        for omega in [self.omega1, self.omega2] {
            let (lo, hi) = self.a_bounds(omega);
            set = set
                .into_iter()
                .flat_map(|(l, u)| {
                    let mut parts = Vec::new();
                    if lo > hi || hi <= l || lo >= u {
                        // Empty or disjoint hole.
                        parts.push((l, u));
                    } else {
                        if l <= lo {
                            parts.push((l, lo));
                        }
                        if hi <= u {
                            parts.push((hi, u));
                        }
                    }
                    parts
                })
                .collect();
        }
        set
    }

    /// Feasible a closest to ½, where √(1 − (2a − 1)²γ) is largest.
    pub fn best_a(&self) -> Option<f64> {
        self.feasible_set()
            .into_iter()
            .map(|(l, u)| 0.5f64.clamp(l, u))
            .min_by(|a, b| (a - 0.5).abs().total_cmp(&(b - 0.5).abs()))
    }
}

/// Minimax risk of R repetitions of a two-outcome effective POVM.
pub fn risk_two_outcome(m: &TwoOutcomeModel) -> f64 {
    if m.repetitions as f64 <= m.r0() {
        return 0.5;
    }
    let g = m.gamma();
    let Some(a) = m.best_a() else {
        return 0.5;
    };
    let value = (1.0 - g).sqrt() / (2.0 * (m.omega1 - m.omega2)) * (1.0 - (2.0 * a - 1.0).powi(2) * g).sqrt();
    value.min(0.5)
}

/// Risk of R stabilizer samples in dimension δ ≥ 2 (three-case formula).
pub fn risk_stabilizer(delta: f64, repetitions: u64, epsilon: f64) -> Result<f64> {
    if !(delta >= 2.0) {
        return Err(Error::InvalidInput(format!("delta {delta} must be at least 2")));
    }
    check_epsilon(epsilon)?;
    if repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be at least 1".into()));
    }
    let r0 = if delta == 2.0 {
        0.0
    } else {
        2.0 * (2.0 / epsilon).ln() / ((delta - 1.0) / (delta / 2.0 - 1.0)).ln()
    };
    if repetitions as f64 <= r0 {
        return Ok(0.5);
    }
    let g = gamma(repetitions, epsilon);
    let pre = (delta - 1.0) / delta;
    let s = ((1.0 - g) / g * (delta - 2.0) / delta).sqrt();
    let scale = delta / (delta - 1.0);
    let (b_minus, b_plus) = (scale * (1.0 - s), scale * (1.0 + s));
    let value = if b_minus >= 1.0 {
        pre * (1.0 - g).sqrt()
    } else {
        let b = if (b_minus - 1.0).abs() <= (b_plus - 1.0).abs() { b_minus } else { b_plus };
        pre * (1.0 - g) * (1.0 + b * (2.0 - b) * g / (1.0 - g)).sqrt()
    };
    Ok(value.min(0.5))
}

/// ω₂ of the stabilizer effective POVM in dimension δ.
pub fn stabilizer_omega2(delta: f64) -> f64 {
    (delta / 2.0 - 1.0) / (delta - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vartheta_values() {
        let v = vartheta(0.1).unwrap();
        assert!((v - 6.539).abs() < 1e-3 && v < 6.54);
        assert!(vartheta(0.01).unwrap() < v);
        assert!((vartheta(0.25 / 64.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(vartheta(0.25).is_err());
    }

    #[test]
    fn lower_bound_values() {
        assert!((risk_lower_bound(734, 0.05).unwrap() - 0.05).abs() < 1e-4);
        // Hand value: ½√(1 − 0.025²).
        assert!((risk_lower_bound(1, 0.05).unwrap() - 0.499_843_725_574_9).abs() < 1e-9);
        assert!(risk_lower_bound(10_000, 0.05).unwrap() < risk_lower_bound(1000, 0.05).unwrap());
    }

    #[test]
    fn optimal_sample_complexity() {
        assert_eq!(sample_complexity_optimal(0.05, 0.05).unwrap(), 735);
        for r in [0.01, 0.05, 0.1] {
            let n = sample_complexity_optimal(r, 0.05).unwrap();
            assert!(risk_lower_bound(n, 0.05).unwrap() <= r);
            assert!(risk_lower_bound(n - 1, 0.05).unwrap() > r);
        }
        assert!(matches!(sample_complexity_optimal(1e-12, 0.05), Err(Error::ResourceLimit(_))));
        assert!(sample_complexity_optimal(0.5, 0.05).is_err());
    }

    #[test]
    fn stabilizer_table_values() {
        assert_eq!(sample_complexity_stabilizer(0.05, 0.05, 4).unwrap(), 1657);
        assert_eq!(sample_complexity_stabilizer(0.05, 0.05, 8).unwrap(), 2256);
        assert_eq!(sample_complexity_stabilizer(0.05, 0.05, 16).unwrap(), 2591);
    }

    #[test]
    fn pauli_complexity() {
        for d in [2usize, 4, 8, 16] {
            assert_eq!(
                sample_complexity_pauli(0.05, 0.05, d as f64 - 1.0, d).unwrap(),
                sample_complexity_stabilizer(0.05, 0.05, d).unwrap()
            );
        }
        let n = pauli_norm_bound(4).unwrap();
        let expect = (2.0 * 40f64.ln() / (1.0 - 16.0 / 45.0 * 0.0025f64).ln().abs()).ceil() as u64;
        assert_eq!(sample_complexity_pauli(0.05, 0.05, n, 4).unwrap(), expect);
        assert!(sample_complexity_pauli(0.75, 0.05, 3.0, 4).is_err());
        assert!((pauli_norm_bound(2).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((pauli_norm_bound(4).unwrap() - 3.0 * 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn two_outcome_values() {
        let m = TwoOutcomeModel::new(1.0, 0.0, 100, 0.05).unwrap();
        assert_eq!(m.feasible_set(), vec![(0.0, 1.0)]);
        assert!((risk_two_outcome(&m) - 0.13334).abs() < 1e-5);
        let m = TwoOutcomeModel::new(1.0, 1.0 / 3.0, 1657, 0.05).unwrap();
        let r = risk_two_outcome(&m);
        assert!(r <= 0.05 && r > 0.045, "{r}");
        assert!(TwoOutcomeModel::new(0.3, 0.3, 10, 0.05).is_err());
    }

    #[test]
    fn threshold_gives_half() {
        let m = TwoOutcomeModel::new(0.9, 0.4, 1, 0.05).unwrap();
        let r0 = m.r0();
        let at = TwoOutcomeModel { repetitions: r0.floor() as u64, ..m };
        assert_eq!(risk_two_outcome(&at), 0.5);
        let above = TwoOutcomeModel { repetitions: r0.floor() as u64 + 1, ..m };
        assert!(risk_two_outcome(&above) < 0.5);
    }

    #[test]
    fn stabilizer_delta_two() {
        let g = gamma(100, 0.05);
        assert!((risk_stabilizer(2.0, 100, 0.05).unwrap() - 0.5 * (1.0 - g).sqrt()).abs() < 1e-15);
        assert!(risk_stabilizer(1.5, 100, 0.05).is_err());
    }
}
