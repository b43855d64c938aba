use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use super::{HarnessError, SUITES};
use crate::field::FieldCtx;
use crate::ratfunc::RationalFunction;
use crate::setspec::SetSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub n: u32,
}

fn one() -> u32 {
    1
}

/// A batch run. `field`, `suites` and `seed` are required; everything else
/// has a default.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub field: FieldSpec,
    /// Extra sets, in the set-spec language, run alongside the random ones.
    pub sets: Vec<String>,
    /// Rational function for the decomposition and lemma suites.
    pub function: String,
    /// Multiplicative character index j.
    pub chi: u64,
    /// Additive character index a.
    pub psi: u64,
    pub suites: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Fill `runtime_ms`. Off by default so reruns are byte-identical.
    pub timing: bool,
    /// Replaces M(A) in the partition suite's second mode.
    pub m_override: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(p: u64, n: u32, suites: &[&str], seed: u64) -> Self {
        ExperimentConfig {
            field: FieldSpec { p, n },
            sets: Vec::new(),
            function: "1/0,1".into(),
            chi: 1,
            psi: 1,
            suites: suites.iter().map(|s| s.to_string()).collect(),
            trials: 20,
            seed,
            output: None,
            timing: false,
            m_override: None,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        let value: Value = serde_json::from_str(text).map_err(|e| HarnessError::Config {
            key: "<document>".into(),
            reason: e.to_string(),
        })?;
        let Value::Object(map) = value else {
            return Err(HarnessError::Config {
                key: "<document>".into(),
                reason: "expected a JSON object".into(),
            });
        };
        const KEYS: [&str; 11] = [
            "field",
            "sets",
            "function",
            "chi",
            "psi",
            "suites",
            "trials",
            "seed",
            "output",
            "timing",
            "m_override",
        ];
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(HarnessError::Config {
                key: k.clone(),
                reason: "unknown key".into(),
            });
        }
        let field: FieldSpec = required(&map, "field")?;
        let suites: Vec<String> = required(&map, "suites")?;
        let seed: u64 = required(&map, "seed")?;
        let mut cfg = ExperimentConfig::new(field.p, field.n, &[], seed);
        cfg.suites = suites;
        if let Some(v) = optional(&map, "sets")? {
            cfg.sets = v;
        }
        if let Some(v) = optional(&map, "function")? {
            cfg.function = v;
        }
        if let Some(v) = optional(&map, "chi")? {
            cfg.chi = v;
        }
        if let Some(v) = optional(&map, "psi")? {
            cfg.psi = v;
        }
        if let Some(v) = optional(&map, "trials")? {
            cfg.trials = v;
        }
        cfg.output = optional(&map, "output")?;
        if let Some(v) = optional(&map, "timing")? {
            cfg.timing = v;
        }
        cfg.m_override = optional(&map, "m_override")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config {
            key: "<file>".into(),
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::from_json_str(&text)
    }

    /// Checks every value that can be checked without running anything.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |key: String, reason: String| HarnessError::Config { key, reason };
        let ctx = FieldCtx::new(self.field.p, self.field.n)
            .map_err(|e| bad("field".into(), e.to_string()))?;
        for (i, s) in self.sets.iter().enumerate() {
            s.parse::<SetSpec>()
                .and_then(|spec| spec.build(&ctx))
                .map_err(|e| bad(format!("sets[{i}]"), e.to_string()))?;
        }
        RationalFunction::parse(&ctx, &self.function)
            .map_err(|e| bad("function".into(), e.to_string()))?;
        if self.psi >= u64::from(ctx.q()) {
            return Err(bad(
                "psi".into(),
                format!("index {} outside GF({})", self.psi, ctx.q()),
            ));
        }
        if self.suites.is_empty() {
            return Err(bad("suites".into(), "no suite selected".into()));
        }
        for (i, s) in self.suites.iter().enumerate() {
            if !SUITES.contains(&s.as_str()) {
                return Err(bad(format!("suites[{i}]"), format!("unknown suite {s:?}")));
            }
        }
        if self.trials == 0 {
            return Err(bad("trials".into(), "must be positive".into()));
        }
        if let Some(m) = self.m_override {
            if !(m.is_finite() && m > 0.0) {
                return Err(bad("m_override".into(), "must be a positive number".into()));
            }
        }
        Ok(())
    }
}

fn parse_key<T: DeserializeOwned>(key: &str, v: &Value) -> Result<T, HarnessError> {
    T::deserialize(v).map_err(|e| HarnessError::Config {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn required<T: DeserializeOwned>(map: &Map<String, Value>, key: &str) -> Result<T, HarnessError> {
    match map.get(key) {
        Some(v) => parse_key(key, v),
        None => Err(HarnessError::Config {
            key: key.to_string(),
            reason: "missing required key".into(),
        }),
    }
}

fn optional<T: DeserializeOwned>(
    map: &Map<String, Value>,
    key: &str,
) -> Result<Option<T>, HarnessError> {
    match map.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => parse_key(key, v).map(Some),
    }
}
