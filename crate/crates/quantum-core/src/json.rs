//! JSON encodings of matrices and plans, and the canonical plan fingerprint.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hermitian::{CMatrix, DensityMatrix, HermitianOperator};
use crate::povm::{plan_violations, setting_violations, MeasurementPlan, PovmSetting, DEFAULT_EPSILON_O};

/// Schema version written into plan files.
pub const PLAN_VERSION: u32 = 1;

/// Row-major rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Parse("matrix must be a nonempty square list of rows".into()));
    }
    Ok(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn hermitian_from_json(rows: &MatrixJson) -> Result<HermitianOperator> {
    HermitianOperator::new(matrix_from_json(rows)?)
}

pub fn density_from_json(rows: &MatrixJson) -> Result<DensityMatrix> {
    DensityMatrix::new(hermitian_from_json(rows)?)
}

fn default_version() -> u32 {
    PLAN_VERSION
}

fn default_epsilon_o() -> f64 {
    DEFAULT_EPSILON_O
}

/// On-disk plan layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    #[serde(default = "default_version")]
    pub version: u32,
    pub dimension: usize,
    pub epsilon: f64,
    #[serde(default = "default_epsilon_o")]
    pub epsilon_o: f64,
    pub target: MatrixJson,
    pub settings: Vec<SettingFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingFile {
    pub label: String,
    pub repetitions: u64,
    pub effects: Vec<MatrixJson>,
}

impl PlanFile {
    pub fn from_plan(plan: &MeasurementPlan) -> Self {
        Self {
            version: PLAN_VERSION,
            dimension: plan.dim(),
            epsilon: plan.epsilon(),
            epsilon_o: plan.epsilon_o(),
            target: matrix_to_json(plan.target().op().matrix()),
            settings: plan
                .settings()
                .iter()
                .map(|s| SettingFile {
                    label: s.label().to_string(),
                    repetitions: s.repetitions(),
                    effects: s.effects().iter().map(|e| matrix_to_json(e.matrix())).collect(),
                })
                .collect(),
        }
    }

    /// Parses JSON text; structural problems are parse errors.
    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)?;
        if file.version != PLAN_VERSION {
            return Err(Error::Parse(format!("unsupported plan version {}", file.version)));
        }
        Ok(file)
    }

    pub fn to_json_string(&self) -> String {
        // Plain data with string keys always serializes.
        serde_json::to_string_pretty(self).expect("plan serialization")
    }

    /// Every invariant violation, one message each. Empty means valid.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let target = match hermitian_from_json(&self.target).and_then(DensityMatrix::new) {
            Ok(t) => Some(t),
            Err(e) => {
                out.push(format!("target: {e}"));
                None
            }
        };
        let d = self.dimension;
        if let Some(t) = &target {
            if t.dim() != d {
                out.push(format!("target dimension {} differs from declared dimension {d}", t.dim()));
            }
        }
        let mut settings = Vec::new();
        for s in &self.settings {
            let effects: Result<Vec<HermitianOperator>> = s.effects.iter().map(hermitian_from_json).collect();
            match effects {
                Err(e) => out.push(format!("setting '{}': {e}", s.label)),
                Ok(effects) => {
                    if effects.iter().any(|e| e.dim() != d) {
                        out.push(format!("setting '{}': effect dimension differs from {d}", s.label));
                        continue;
                    }
                    let v = setting_violations(&s.label, &effects, s.repetitions);
                    if v.is_empty() {
                        settings.push(PovmSetting::new(s.label.clone(), effects, s.repetitions).expect("checked"));
                    } else {
                        out.extend(v);
                    }
                }
            }
        }
        match &target {
            Some(t) => out.extend(plan_violations(t, self.epsilon, self.epsilon_o, &settings)),
            None => {
                if !(self.epsilon > 0.0 && self.epsilon < 0.25) {
                    out.push(format!("epsilon {} outside (0, 0.25)", self.epsilon));
                }
            }
        }
        out
    }

    pub fn into_plan(self) -> Result<MeasurementPlan> {
        let problems = self.violations();
        if !problems.is_empty() {
            return Err(Error::InvalidInput(problems.join("; ")));
        }
        let target = density_from_json(&self.target)?;
        let settings = self
            .settings
            .iter()
            .map(|s| {
                let effects = s.effects.iter().map(hermitian_from_json).collect::<Result<Vec<_>>>()?;
                PovmSetting::new(s.label.clone(), effects, s.repetitions)
            })
            .collect::<Result<Vec<_>>>()?;
        MeasurementPlan::new(target, self.epsilon, self.epsilon_o, settings)
    }
}

pub fn plan_to_json(plan: &MeasurementPlan) -> String {
    PlanFile::from_plan(plan).to_json_string()
}

pub fn plan_from_json(text: &str) -> Result<MeasurementPlan> {
    PlanFile::parse(text)?.into_plan()
}

/// JSON with sorted object keys, no whitespace, and every non-integer
/// number printed with 17 significant digits.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                let x = n.as_f64().unwrap_or(0.0);
                let x = if x == 0.0 { 0.0 } else { x };
                out.push_str(&format!("{x:.16e}"));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push(':');
                write_canonical(&map[*k], out);
            }
            out.push('}');
        }
    }
}

/// Lowercase hex SHA-256 of the canonical plan encoding. Matrix entries are
/// always written as floats so that 1 and 1.0 hash identically.
pub fn plan_fingerprint(plan: &MeasurementPlan) -> String {
    let file = PlanFile::from_plan(plan);
    let matrix = |m: &MatrixJson| -> Value {
        Value::Array(
            m.iter()
                .map(|row| {
                    Value::Array(
                        row.iter()
                            .map(|z| Value::Array(vec![float_value(z[0]), float_value(z[1])]))
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    let settings: Vec<Value> = file
        .settings
        .iter()
        .map(|s| {
            serde_json::json!({
                "label": s.label,
                "repetitions": s.repetitions,
                "effects": s.effects.iter().map(matrix).collect::<Vec<_>>(),
            })
        })
        .collect();
    let v = serde_json::json!({
        "dimension": file.dimension,
        "epsilon": float_value(file.epsilon),
        "epsilon_o": float_value(file.epsilon_o),
        "target": matrix(&file.target),
        "settings": settings,
    });
    hex_digest(canonical_json(&v).as_bytes())
}

fn float_value(x: f64) -> Value {
    // Non-finite values cannot occur in a validated plan.
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// True for a 64-character lowercase hexadecimal string.
pub fn is_fingerprint(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}
