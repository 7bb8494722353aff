//! Accelerated projected-gradient ascent over a convex set in real
//! coordinates.
//!
//! This is Nesterov's second method in the Auslender–Teboulle form: the
//! extrapolated point is a convex combination of feasible points, so every
//! evaluation happens inside the feasible set (the objectives used here are
//! undefined outside it). The Lipschitz constant is found by backtracking and
//! momentum is restarted whenever the objective would decrease.

/// Stopping and line-search parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AcceleratedConfig {
    /// Relative objective change that counts as a stalled iteration.
    pub tolerance: f64,
    pub max_iters: usize,
    /// Consecutive stalled iterations that trigger a convergence check.
    pub stall_window: usize,
    /// Gradient-mapping norm a stalled point must reach to count as
    /// converged; otherwise iteration continues.
    pub stationarity: f64,
    pub initial_step: f64,
    /// Step multiplier applied on each failed line-search trial.
    pub shrink: f64,
    /// Armijo constant for the plain gradient step taken on restart.
    pub sufficient_increase: f64,
}

impl Default for AcceleratedConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iters: 5000,
            stall_window: 20,
            stationarity: 1e-6,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_increase: 1e-4,
        }
    }
}

/// A smooth concave objective with a Euclidean projection onto its domain.
pub trait ConstrainedProblem {
    fn value(&mut self, x: &[f64]) -> f64;
    fn gradient(&mut self, x: &[f64]) -> Vec<f64>;
    fn project(&mut self, x: &[f64]) -> Vec<f64>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcceleratedOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of the gradient mapping P(x + ∇f) − x at the returned point.
    pub stationarity: f64,
    /// Objective after every iteration (non-decreasing).
    pub trace: Vec<f64>,
}

const MIN_STEP: f64 = 1e-30;
const MAX_STEP: f64 = 1e12;
const STEP_GROWTH: f64 = 1.25;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

fn axpy(x: &[f64], s: f64, g: &[f64]) -> Vec<f64> {
    x.iter().zip(g).map(|(a, b)| a + s * b).collect()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Unit-step gradient mapping ‖P(x + ∇f(x)) − x‖: zero exactly at KKT
/// points, and free of the rounding blow-up that dividing by a tiny
/// backtracked step would cause.
pub fn gradient_mapping<P: ConstrainedProblem>(problem: &mut P, x: &[f64]) -> f64 {
    let g = problem.gradient(x);
    let p = problem.project(&axpy(x, 1.0, &g));
    dist_sq(&p, x).sqrt()
}

/// Maximizes `problem` starting from the projection of `x0`.
pub fn maximize<P: ConstrainedProblem>(problem: &mut P, x0: &[f64], cfg: &AcceleratedConfig) -> AcceleratedOutcome {
    let mut x = problem.project(x0);
    let mut fx = problem.value(&x);
    let mut z = x.clone();
    let mut theta = 1.0f64;
    let mut step = cfg.initial_step;
    let mut stall = 0usize;
    let mut converged = false;
    let mut iterations = 0;
    let mut trace = vec![fx];

    while iterations < cfg.max_iters {
        iterations += 1;
        let y = lerp(&x, &z, theta);
        let fy = problem.value(&y);
        let g = problem.gradient(&y);

        let mut backtracked = false;
        let (mut x_new, mut z_new, mut f_new);
        loop {
            z_new = problem.project(&axpy(&z, step / theta, &g));
            x_new = lerp(&x, &z_new, theta);
            f_new = problem.value(&x_new);
            let d: Vec<f64> = x_new.iter().zip(&y).map(|(a, b)| a - b).collect();
            let model = fy + dot(&g, &d) - dot(&d, &d) / (2.0 * step);
            if f_new >= model - 1e-14 * fy.abs().max(1.0) || step <= MIN_STEP {
                break;
            }
            step *= cfg.shrink;
            backtracked = true;
        }

        if !(f_new >= fx) {
            // Momentum overshot: restart with an Armijo gradient step from x.
            let gx = problem.gradient(&x);
            let mut s = step;
            let mut accepted = None;
            while s > MIN_STEP {
                let cand = problem.project(&axpy(&x, s, &gx));
                let fc = problem.value(&cand);
                let dir: f64 = cand.iter().zip(&x).zip(&gx).map(|((c, a), g)| (c - a) * g).sum();
                if fc >= fx + cfg.sufficient_increase * dir && fc >= fx {
                    accepted = Some((cand, fc));
                    break;
                }
                s *= cfg.shrink;
            }
            match accepted {
                Some((c, fc)) => {
                    step = s;
                    x_new = c;
                    f_new = fc;
                }
                // No ascent left at any step size: x is stationary up to
                // rounding, so keep the step for the next attempt.
                None => {
                    x_new = x.clone();
                    f_new = fx;
                }
            }
            z_new = x_new.clone();
            theta = 1.0;
        } else {
            let t2 = theta * theta;
            theta = ((t2 * t2 + 4.0 * t2).sqrt() - t2) / 2.0;
        }

        let change = (f_new - fx).abs();
        x = x_new;
        z = z_new;
        fx = f_new;
        trace.push(fx);
        if change <= cfg.tolerance * fx.abs().max(1.0) {
            stall += 1;
            if stall >= cfg.stall_window {
                if gradient_mapping(problem, &x) <= cfg.stationarity {
                    converged = true;
                    break;
                }
                stall = 0;
            }
        } else {
            stall = 0;
        }
        if !backtracked {
            step = (step * STEP_GROWTH).min(MAX_STEP);
        }
    }

    let stationarity = gradient_mapping(problem, &x);
    AcceleratedOutcome { x, value: fx, iterations, converged, stationarity, trace }
}
