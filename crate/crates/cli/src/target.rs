//! Parsing of `--target` / `--state` specifications.

use std::path::Path;

use fidelimax_core::json::{density_from_json, MatrixJson};
use fidelimax_core::{depolarize, random_pure_state, DensityMatrix, PauliString, StabilizerGroup};

use crate::error::CliError;

pub const STATE_HELP: &str = "ghz:<n> | stabilizer:<g1>,<g2>,... | basis:<d>:<k> | random:<n>:<seed> | file:<matrix.json>";

fn usage(spec: &str) -> CliError {
    CliError::Usage(format!("cannot parse state '{spec}' (expected {STATE_HELP})"))
}

fn number<T: std::str::FromStr>(s: &str, spec: &str) -> Result<T, CliError> {
    s.parse().map_err(|_| usage(spec))
}

/// Stabilizer group named by a specification, if it names one.
pub fn parse_group(spec: &str) -> Result<Option<StabilizerGroup>, CliError> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| usage(spec))?;
    match kind {
        "ghz" => Ok(Some(StabilizerGroup::ghz(number(rest, spec)?)?)),
        "stabilizer" => {
            let gens = rest
                .split(',')
                .map(|g| g.trim().parse::<PauliString>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Some(StabilizerGroup::new(gens)?))
        }
        _ => Ok(None),
    }
}

pub fn parse_state(spec: &str) -> Result<DensityMatrix, CliError> {
    if let Some(group) = parse_group(spec)? {
        return Ok(group.state()?);
    }
    let (kind, rest) = spec.split_once(':').ok_or_else(|| usage(spec))?;
    match kind {
        "basis" => {
            let (d, k) = rest.split_once(':').ok_or_else(|| usage(spec))?;
            Ok(DensityMatrix::basis_state(number(d, spec)?, number(k, spec)?)?)
        }
        "random" => {
            let (n, seed) = rest.split_once(':').ok_or_else(|| usage(spec))?;
            Ok(random_pure_state(number(n, spec)?, number(seed, spec)?)?)
        }
        "file" => {
            let text = crate::io::read(Path::new(rest))?;
            let rows: MatrixJson = serde_json::from_str(&text).map_err(fidelimax_core::Error::from)?;
            Ok(density_from_json(&rows)?)
        }
        _ => Err(usage(spec)),
    }
}

/// The state named by `spec` (or `fallback`), depolarized by `p`.
pub fn state_with_noise(spec: Option<&str>, fallback: &DensityMatrix, p: f64) -> Result<DensityMatrix, CliError> {
    let base = match spec {
        Some(s) => parse_state(s)?,
        None => fallback.clone(),
    };
    Ok(if p == 0.0 { base } else { depolarize(&base, p)? })
}
