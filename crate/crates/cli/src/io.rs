use std::fs;
use std::path::Path;

use fidelimax_core::{MeasurementPlan, PlanFile};
use fidelimax_estimator::{AffineEstimator, Dataset};

use crate::error::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Fails early if the output's directory does not exist.
pub fn check_out(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(CliError::Usage(format!("output directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

pub fn load_plan(path: &Path) -> Result<MeasurementPlan, CliError> {
    let file = PlanFile::parse(&read(path)?)?;
    let problems = file.violations();
    if !problems.is_empty() {
        return Err(CliError::Failed(format!("invalid plan {}:\n  {}", path.display(), problems.join("\n  "))));
    }
    Ok(file.into_plan()?)
}

pub fn load_estimator(path: &Path) -> Result<AffineEstimator, CliError> {
    Ok(AffineEstimator::from_json(&read(path)?)?)
}

pub fn load_data(path: &Path) -> Result<Dataset, CliError> {
    Ok(Dataset::from_json(&read(path)?)?)
}
