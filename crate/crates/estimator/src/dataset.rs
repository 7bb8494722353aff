//! Per-setting outcome counts.

use fidelimax_core::json::is_fingerprint;
use fidelimax_core::{plan_fingerprint, Error, MeasurementPlan, Result};
use serde::{Deserialize, Serialize};

/// Outcome counts for each setting of a plan, optionally tagged with the
/// plan fingerprint they were recorded against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dataset {
    counts: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plan_fingerprint: Option<String>,
}

impl Dataset {
    /// Every setting needs at least one outcome slot and one shot.
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        for (l, c) in counts.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::InvalidInput(format!("setting {l} has no outcomes")));
            }
            if c.iter().sum::<u64>() == 0 {
                return Err(Error::InvalidInput(format!("setting {l} has no recorded shots")));
            }
        }
        Ok(Self { counts, plan_fingerprint: None })
    }

    /// Counts checked against the plan's shapes and shot numbers, tagged
    /// with its fingerprint.
    pub fn for_plan(plan: &MeasurementPlan, counts: Vec<Vec<u64>>) -> Result<Self> {
        let data = Self::new(counts)?.with_fingerprint(plan_fingerprint(plan));
        data.check_shape(plan)?;
        Ok(data)
    }

    pub fn with_fingerprint(mut self, fingerprint: String) -> Self {
        self.plan_fingerprint = Some(fingerprint);
        self
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn plan_fingerprint(&self) -> Option<&str> {
        self.plan_fingerprint.as_deref()
    }

    pub fn num_settings(&self) -> usize {
        self.counts.len()
    }

    /// Σ_k counts for each setting.
    pub fn repetitions(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c.iter().sum()).collect()
    }

    /// f^(l) = counts^(l)/R_l.
    pub fn frequencies(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|c| {
                let r = c.iter().sum::<u64>() as f64;
                c.iter().map(|&k| k as f64 / r).collect()
            })
            .collect()
    }

    /// Errors unless outcome counts and shot numbers match the plan.
    pub fn check_shape(&self, plan: &MeasurementPlan) -> Result<()> {
        if self.counts.len() != plan.settings().len() {
            return Err(Error::InvalidInput(format!(
                "dataset has {} settings, plan has {}",
                self.counts.len(),
                plan.settings().len()
            )));
        }
        for (c, s) in self.counts.iter().zip(plan.settings()) {
            if c.len() != s.num_outcomes() {
                return Err(Error::InvalidInput(format!(
                    "setting '{}': {} counts for {} outcomes",
                    s.label(),
                    c.len(),
                    s.num_outcomes()
                )));
            }
            let total: u64 = c.iter().sum();
            if total != s.repetitions() {
                return Err(Error::InvalidInput(format!(
                    "setting '{}': {total} shots recorded, plan has {}",
                    s.label(),
                    s.repetitions()
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Self = serde_json::from_str(text)?;
        if let Some(fp) = &raw.plan_fingerprint {
            if !is_fingerprint(fp) {
                return Err(Error::Integrity(format!("malformed plan fingerprint '{fp}'")));
            }
        }
        let fp = raw.plan_fingerprint.clone();
        let mut data = Self::new(raw.counts)?;
        data.plan_fingerprint = fp;
        Ok(data)
    }
}

/// Bins per-setting outcome indices into counts.
pub fn frequencies(outcomes: &[Vec<usize>], num_outcomes: &[usize]) -> Result<Dataset> {
    if outcomes.len() != num_outcomes.len() {
        return Err(Error::InvalidInput(format!(
            "{} outcome lists for {} settings",
            outcomes.len(),
            num_outcomes.len()
        )));
    }
    let mut counts = Vec::with_capacity(outcomes.len());
    for (l, (list, &n)) in outcomes.iter().zip(num_outcomes).enumerate() {
        if list.is_empty() {
            return Err(Error::InvalidInput(format!("setting {l}: empty outcome list")));
        }
        let mut c = vec![0u64; n];
        for &k in list {
            if k >= n {
                return Err(Error::InvalidInput(format!("setting {l}: outcome {k} out of range 0..{n}")));
            }
            c[k] += 1;
        }
        counts.push(c);
    }
    Dataset::new(counts)
}
