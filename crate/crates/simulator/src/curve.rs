use fidelimax_core::{rng_from_seed, DensityMatrix, Error, MeasurementPlan, PauliString, Result};
use fidelimax_saddle::{outer_minimize, SolverConfig};
use fidelimax_schemes::{pauli_povm, PauliPovmMode};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format_sci;

/// Solver risk of the plan with the first L sampled Paulis at R shots each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveCell {
    pub l: usize,
    pub r: u64,
    pub risk: f64,
}

/// Risk over a grid of Pauli counts L and repetitions R. One random order
/// of the pool is drawn from `seed`, and the plan for L uses its first L
/// entries, so plans are nested in L. Cells are ordered L-major.
#[allow(clippy::too_many_arguments)]
pub fn risk_curve(
    target: &DensityMatrix,
    pool: &[PauliString],
    ls: &[usize],
    rs: &[u64],
    epsilon: f64,
    epsilon_o: f64,
    mode: PauliPovmMode,
    seed: u64,
    config: &SolverConfig,
) -> Result<Vec<CurveCell>> {
    if ls.is_empty() || rs.is_empty() {
        return Err(Error::InvalidInput("the L and R grids must be nonempty".into()));
    }
    if let Some(&l) = ls.iter().find(|&&l| l > pool.len()) {
        return Err(Error::InvalidInput(format!("L = {l} exceeds the pool of {} Paulis", pool.len())));
    }
    if rs.contains(&0) {
        return Err(Error::InvalidInput("repetitions must be positive".into()));
    }
    let mut order = pool.to_vec();
    order.shuffle(&mut rng_from_seed(seed));
    let grid: Vec<(usize, u64)> = ls.iter().flat_map(|&l| rs.iter().map(move |&r| (l, r))).collect();
    grid.into_par_iter()
        .map(|(l, r)| {
            let settings = order[..l].iter().map(|w| pauli_povm(w, mode, r)).collect::<Result<Vec<_>>>()?;
            let plan = MeasurementPlan::new(target.clone(), epsilon, epsilon_o, settings)?;
            let sp = outer_minimize(&plan, config)?;
            Ok(CurveCell { l, r, risk: sp.risk() })
        })
        .collect()
}

/// CSV with header `L,R,risk`.
pub fn risk_curve_csv(cells: &[CurveCell]) -> String {
    let mut out = String::from("L,R,risk\n");
    for c in cells {
        out.push_str(&format!("{},{},{}\n", c.l, c.r, format_sci(c.risk)));
    }
    out
}
