//! Maximum-likelihood state reconstruction, the MLE fidelity, and parametric
//! bootstrap intervals built from it. This is the baseline whose intervals
//! can badly undercover on informationally incomplete plans.

#![forbid(unsafe_code)]

use fidelimax_core::json::{matrix_to_json, MatrixJson};
use fidelimax_core::optim::{maximize, AcceleratedConfig, ConstrainedProblem};
use fidelimax_core::povm::smooth;
use fidelimax_core::random::sample_counts;
use fidelimax_core::{
    born_probs, derive_seed, fidelity_pure, project_density, rng_from_seed, DensityMatrix, Error, HermitianOperator,
    MeasurementPlan, Result,
};
use fidelimax_estimator::Dataset;
use rayon::prelude::*;
use serde::Serialize;

/// Stopping rule of the reconstruction.
#[derive(Clone, Debug, PartialEq)]
pub struct MleConfig {
    /// Relative change of the objective that counts as stalled.
    pub tolerance: f64,
    pub max_iters: usize,
    pub stall_window: usize,
}

impl Default for MleConfig {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iters: 5000, stall_window: 5 }
    }
}

impl MleConfig {
    fn accelerated(&self) -> AcceleratedConfig {
        AcceleratedConfig {
            tolerance: self.tolerance,
            max_iters: self.max_iters,
            stall_window: self.stall_window,
            // The MLE is typically non-unique on incomplete plans; the
            // relative-change rule alone decides convergence.
            stationarity: f64::INFINITY,
            ..AcceleratedConfig::default()
        }
    }
}

/// Reconstructed state and its fidelity with the target.
#[derive(Clone, Debug, PartialEq)]
pub struct MleResult {
    pub state: DensityMatrix,
    pub nll: f64,
    /// tr(ρσ̂)
    pub fidelity: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every iteration (non-increasing).
    pub trace: Vec<f64>,
}

#[derive(Serialize)]
struct MleResultFile<'a> {
    version: u32,
    fidelity: f64,
    nll: f64,
    iterations: usize,
    converged: bool,
    state: MatrixJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    interval: Option<&'a BootstrapInterval>,
}

impl MleResult {
    /// JSON with the state matrix and, if given, a bootstrap interval.
    pub fn to_json(&self, interval: Option<&BootstrapInterval>) -> String {
        let file = MleResultFile {
            version: 1,
            fidelity: self.fidelity,
            nll: self.nll,
            iterations: self.iterations,
            converged: self.converged,
            state: matrix_to_json(self.state.op().matrix()),
            interval,
        };
        serde_json::to_string_pretty(&file).expect("MLE serialization")
    }
}

/// Percentile interval of bootstrap fidelities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BootstrapInterval {
    pub lo: f64,
    pub median: f64,
    pub hi: f64,
    pub replicates: usize,
}

impl BootstrapInterval {
    pub fn contains(&self, f: f64) -> bool {
        self.lo <= f && f <= self.hi
    }
}

fn check_freqs(plan: &MeasurementPlan, freqs: &[Vec<f64>]) -> Result<()> {
    if freqs.len() != plan.settings().len()
        || freqs.iter().zip(plan.settings()).any(|(f, s)| f.len() != s.num_outcomes())
    {
        return Err(Error::InvalidInput("frequencies do not match the plan's settings".into()));
    }
    Ok(())
}

/// −Σ_l Σ_k f_k^(l) ln p_k^(l)(χ) with ε_o-smoothed probabilities.
pub fn nll(plan: &MeasurementPlan, freqs: &[Vec<f64>], chi: &DensityMatrix) -> Result<f64> {
    check_freqs(plan, freqs)?;
    let mut total = 0.0;
    for (s, f) in plan.settings().iter().zip(freqs) {
        let p = born_probs(s, chi, plan.epsilon_o())?;
        total -= f.iter().zip(&p).filter(|(fk, _)| **fk != 0.0).map(|(fk, pk)| fk * pk.ln()).sum::<f64>();
    }
    Ok(total)
}

/// Gradient of [`nll`] with respect to χ.
pub fn nll_gradient(plan: &MeasurementPlan, freqs: &[Vec<f64>], chi: &DensityMatrix) -> Result<HermitianOperator> {
    check_freqs(plan, freqs)?;
    let scale = 1.0 / (1.0 + plan.epsilon_o());
    let mut g = HermitianOperator::zeros(plan.dim());
    for (s, f) in plan.settings().iter().zip(freqs) {
        let p = born_probs(s, chi, plan.epsilon_o())?;
        for ((e, fk), pk) in s.effects().iter().zip(f).zip(&p) {
            if *fk != 0.0 {
                g = g.add_scaled(-fk / pk * scale, e);
            }
        }
    }
    Ok(g)
}

/// −nll in embedded coordinates, for the shared ascent routine.
struct Likelihood {
    d: usize,
    effects: Vec<Vec<(Vec<f64>, f64)>>,
    epsilon_o: f64,
}

impl Likelihood {
    fn new(plan: &MeasurementPlan, freqs: &[Vec<f64>]) -> Self {
        Self {
            d: plan.dim(),
            effects: plan
                .settings()
                .iter()
                .zip(freqs)
                .map(|(s, f)| s.effects().iter().map(HermitianOperator::embed).zip(f.iter().copied()).collect())
                .collect(),
            epsilon_o: plan.epsilon_o(),
        }
    }

    fn prob(&self, e: &[f64], n: usize, x: &[f64]) -> f64 {
        smooth(e.iter().zip(x).map(|(a, b)| a * b).sum(), n, self.epsilon_o)
    }
}

impl ConstrainedProblem for Likelihood {
    fn value(&mut self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for s in &self.effects {
            for (e, f) in s {
                if *f != 0.0 {
                    v += f * self.prob(e, s.len(), x).max(f64::MIN_POSITIVE).ln();
                }
            }
        }
        v
    }

    fn gradient(&mut self, x: &[f64]) -> Vec<f64> {
        let scale = 1.0 / (1.0 + self.epsilon_o);
        let mut g = vec![0.0; x.len()];
        for s in &self.effects {
            for (e, f) in s {
                if *f != 0.0 {
                    let c = f / self.prob(e, s.len(), x).max(f64::MIN_POSITIVE) * scale;
                    g.iter_mut().zip(e).for_each(|(gi, ei)| *gi += c * ei);
                }
            }
        }
        g
    }

    fn project(&mut self, x: &[f64]) -> Vec<f64> {
        project_density(&HermitianOperator::from_embedding(self.d, x)).op().embed()
    }
}

fn reconstruct_from(
    plan: &MeasurementPlan,
    freqs: &[Vec<f64>],
    start: &DensityMatrix,
    config: &MleConfig,
) -> Result<MleResult> {
    let mut problem = Likelihood::new(plan, freqs);
    let out = maximize(&mut problem, &start.op().embed(), &config.accelerated());
    let state = project_density(&HermitianOperator::from_embedding(plan.dim(), &out.x));
    Ok(MleResult {
        nll: nll(plan, freqs, &state)?,
        fidelity: fidelity_pure(plan.target(), &state)?,
        state,
        iterations: out.iterations,
        converged: out.converged,
        trace: out.trace.iter().map(|v| -v).collect(),
    })
}

/// Maximum-likelihood state from per-setting frequencies, by accelerated
/// projected gradient from I/d.
pub fn mle_from_frequencies(plan: &MeasurementPlan, freqs: &[Vec<f64>], config: &MleConfig) -> Result<MleResult> {
    if plan.settings().is_empty() {
        return Err(Error::InvalidInput("the plan has no settings to reconstruct from".into()));
    }
    check_freqs(plan, freqs)?;
    reconstruct_from(plan, freqs, &DensityMatrix::maximally_mixed(plan.dim()), config)
}

/// Maximum-likelihood reconstruction from counts.
pub fn mle_reconstruct(plan: &MeasurementPlan, data: &Dataset, config: &MleConfig) -> Result<MleResult> {
    data.check_shape(plan)?;
    mle_from_frequencies(plan, &data.frequencies(), config)
}

/// Empirical q-quantile with linear interpolation between order statistics.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (i, t) = (pos.floor() as usize, pos.fract());
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - t) + sorted[i + 1] * t
    } else {
        sorted[i]
    }
}

/// Parametric bootstrap: B datasets are drawn from the probabilities of
/// the MLE state, each is reconstructed from I/d, and the ε/2 and 1 − ε/2 quantiles
/// of the resulting fidelities are returned with their median. Replicate b
/// uses stream `derive_seed(seed, b)`.
pub fn bootstrap_interval(
    plan: &MeasurementPlan,
    data: &Dataset,
    replicates: usize,
    epsilon: f64,
    seed: u64,
    config: &MleConfig,
) -> Result<(MleResult, BootstrapInterval)> {
    if replicates < 100 {
        return Err(Error::InvalidInput(format!("bootstrap needs at least 100 replicates, got {replicates}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let fit = mle_reconstruct(plan, data, config)?;
    let probs = plan.probs(&fit.state)?;
    let reps = data.repetitions();
    let mut fids = (0..replicates as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_from_seed(derive_seed(seed, b));
            let freqs: Vec<Vec<f64>> = probs
                .iter()
                .zip(&reps)
                .map(|(p, &r)| sample_counts(p, r, &mut rng).iter().map(|&c| c as f64 / r as f64).collect())
                .collect();
            Ok(reconstruct_from(plan, &freqs, &DensityMatrix::maximally_mixed(plan.dim()), config)?.fidelity)
        })
        .collect::<Result<Vec<f64>>>()?;
    fids.sort_by(f64::total_cmp);
    let interval = BootstrapInterval {
        lo: quantile(&fids, epsilon / 2.0),
        median: quantile(&fids, 0.5),
        hi: quantile(&fids, 1.0 - epsilon / 2.0),
        replicates,
    };
    Ok((fit, interval))
}
