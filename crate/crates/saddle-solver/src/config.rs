use fidelimax_core::optim::AcceleratedConfig;
use fidelimax_core::{Error, Result};

/// Tolerances and line-search parameters of the saddle-point solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Relative objective change that counts as a stalled inner iteration.
    pub inner_tolerance: f64,
    pub inner_max_iters: usize,
    /// Consecutive stalled iterations that end an inner solve, provided the
    /// gradient-mapping norm is below `inner_stationarity`.
    pub stall_window: usize,
    pub inner_stationarity: f64,
    /// Relative precision of α* (the golden-section search stops once the
    /// bracket spans a factor 1 + outer_tolerance).
    pub outer_tolerance: f64,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_increase: f64,
    /// Padding δ added to the reported risk.
    pub precision: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            inner_tolerance: 1e-6,
            inner_max_iters: 5000,
            stall_window: 20,
            inner_stationarity: 1e-6,
            outer_tolerance: 1e-6,
            alpha_lo: 1e-8,
            alpha_hi: 1e3,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_increase: 1e-4,
            precision: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.inner_tolerance,
            self.inner_stationarity,
            self.outer_tolerance,
            self.alpha_lo,
            self.alpha_hi,
            self.initial_step,
            self.sufficient_increase,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidInput("solver tolerances and step sizes must be positive".into()));
        }
        if !(self.precision >= 0.0) {
            return Err(Error::InvalidInput("precision must be nonnegative".into()));
        }
        if !(self.alpha_lo < self.alpha_hi) {
            return Err(Error::InvalidInput("alpha bracket must satisfy alpha_lo < alpha_hi".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidInput("shrink factor must lie in (0, 1)".into()));
        }
        if self.inner_max_iters == 0 || self.stall_window == 0 {
            return Err(Error::InvalidInput("iteration limits must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn accelerated(&self) -> AcceleratedConfig {
        AcceleratedConfig {
            tolerance: self.inner_tolerance,
            max_iters: self.inner_max_iters,
            stall_window: self.stall_window,
            stationarity: self.inner_stationarity,
            initial_step: self.initial_step,
            shrink: self.shrink,
            sufficient_increase: self.sufficient_increase,
        }
    }
}
