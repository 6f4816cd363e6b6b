//! JSON scenario documents.
//!
//! ```json
//! {
//!   "grid": { "bins": 120, "x_min": -6, "x_max": 6 },
//!   "envelopes": { "kind": "gaussian", "mean": 0, "sigma": 1.5 },
//!   "phase": { "kind": "freewave", "p1": 3.14159, "p2": -3.14159, "h": 1 },
//!   "sampling": { "n_emitted": 1000000, "runs": 1, "seed": 42 }
//! }
//! ```
//!
//! `envelopes` is either one envelope shared by both slits or an object
//! `{ "slit1": {..}, "slit2": {..} }`.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::context::NORMALIZATION_TOL;
use crate::twoslit::{gaussian_envelope, uniform_envelope, Grid, PhaseModel, TwoSlitScenario};

#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl FieldError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub bins: usize,
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeSpec {
    Gaussian { mean: f64, sigma: f64 },
    Uniform,
    Table { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PhaseSpec {
    Explicit { values: Vec<f64> },
    Freewave { p1: f64, p2: f64, h: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianFields {
    mean: f64,
    sigma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoFields {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuesFields {
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FreewaveFields {
    p1: f64,
    p2: f64,
    #[serde(default = "one")]
    h: f64,
}

fn one() -> f64 {
    1.0
}

/// Split a `{"kind": .., ...}` object into its kind and remaining fields.
fn split_kind(value: &Value, path: &str) -> Result<(String, Value), FieldError> {
    let Value::Object(map) = value else {
        return Err(FieldError::new(path, "expected an object with a `kind` field"));
    };
    let mut rest = map.clone();
    match rest.remove("kind") {
        Some(Value::String(kind)) => Ok((kind, Value::Object(rest))),
        Some(_) => Err(FieldError::new(format!("{path}.kind"), "expected a string")),
        None => Err(FieldError::new(format!("{path}.kind"), "missing field")),
    }
}

impl EnvelopeSpec {
    fn parse(value: &Value, path: &str) -> Result<Self, FieldError> {
        let (kind, rest) = split_kind(value, path)?;
        match kind.as_str() {
            "gaussian" => {
                let f: GaussianFields = parse_at(&rest, path)?;
                Ok(EnvelopeSpec::Gaussian {
                    mean: f.mean,
                    sigma: f.sigma,
                })
            }
            "uniform" => parse_at::<NoFields>(&rest, path).map(|_| EnvelopeSpec::Uniform),
            "table" => parse_at::<ValuesFields>(&rest, path).map(|f| EnvelopeSpec::Table { values: f.values }),
            other => Err(FieldError::new(
                format!("{path}.kind"),
                format!("unknown envelope kind `{other}` (expected gaussian, uniform or table)"),
            )),
        }
    }
}

impl PhaseSpec {
    fn parse(value: &Value, path: &str) -> Result<Self, FieldError> {
        let (kind, rest) = split_kind(value, path)?;
        match kind.as_str() {
            "explicit" => parse_at::<ValuesFields>(&rest, path).map(|f| PhaseSpec::Explicit { values: f.values }),
            "freewave" => parse_at::<FreewaveFields>(&rest, path).map(|f| PhaseSpec::Freewave {
                p1: f.p1,
                p2: f.p2,
                h: f.h,
            }),
            other => Err(FieldError::new(
                format!("{path}.kind"),
                format!("unknown phase kind `{other}` (expected explicit or freewave)"),
            )),
        }
    }
}

fn default_runs() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    pub n_emitted: u64,
    #[serde(default = "default_runs")]
    pub runs: u32,
    pub seed: u64,
}

/// Parsed scenario document; `envelopes` and `phase` are kept as written
/// and interpreted by [`ScenarioFile::to_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub grid: GridSpec,
    pub envelopes: Value,
    pub phase: Value,
    pub sampling: SamplingSpec,
}

fn parse_at<T: DeserializeOwned>(value: &Value, prefix: &str) -> Result<T, FieldError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix.is_empty(), inner.as_str()) {
            (true, _) => inner.clone(),
            (false, ".") => prefix.to_string(),
            (false, _) => format!("{prefix}.{inner}"),
        };
        FieldError::new(path, e.into_inner().to_string())
    })
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, Vec<FieldError>> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| vec![FieldError::new(".", format!("malformed JSON: {e}"))])?;
        parse_at(&value, "").map_err(|e| vec![e])
    }

    pub fn read(path: &Path) -> Result<Self, Vec<FieldError>> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            vec![FieldError::new(
                ".",
                format!("cannot read scenario file {}: {e}", path.display()),
            )]
        })?;
        Self::from_json(&text)
    }

    fn envelope_specs(&self) -> Result<[(String, EnvelopeSpec); 2], Vec<FieldError>> {
        let shared = match &self.envelopes {
            Value::Object(m) => m.contains_key("kind"),
            _ => {
                return Err(vec![FieldError::new(
                    "envelopes",
                    "expected an envelope object or {slit1, slit2}",
                )])
            }
        };
        if shared {
            let spec = EnvelopeSpec::parse(&self.envelopes, "envelopes").map_err(|e| vec![e])?;
            return Ok([("envelopes".to_string(), spec.clone()), ("envelopes".to_string(), spec)]);
        }
        let mut errors = Vec::new();
        let mut specs = Vec::new();
        for key in ["slit1", "slit2"] {
            let path = format!("envelopes.{key}");
            match self.envelopes.get(key) {
                None => errors.push(FieldError::new(path, "missing field")),
                Some(v) => match EnvelopeSpec::parse(v, &path) {
                    Ok(s) => specs.push((path, s)),
                    Err(e) => errors.push(e),
                },
            }
        }
        if let Some(extra) = self
            .envelopes
            .as_object()
            .and_then(|m| m.keys().find(|k| *k != "slit1" && *k != "slit2"))
        {
            errors.push(FieldError::new(format!("envelopes.{extra}"), "unknown field"));
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let s2 = specs.pop().expect("two specs");
        let s1 = specs.pop().expect("two specs");
        Ok([s1, s2])
    }

    /// Validate every field and build the scenario, reporting all problems at once.
    pub fn to_scenario(&self) -> Result<TwoSlitScenario, Vec<FieldError>> {
        let mut errors = Vec::new();
        let g = &self.grid;
        if g.bins == 0 {
            errors.push(FieldError::new("grid.bins", "must be at least 1"));
        }
        if !(g.x_min.is_finite() && g.x_max.is_finite() && g.x_max > g.x_min) {
            errors.push(FieldError::new(
                "grid.x_max",
                format!("must be finite and greater than grid.x_min ({})", g.x_min),
            ));
        }
        let specs = match self.envelope_specs() {
            Ok(s) => Some(s),
            Err(e) => {
                errors.extend(e);
                None
            }
        };
        let phase = match PhaseSpec::parse(&self.phase, "phase") {
            Ok(p) => Some(p),
            Err(e) => {
                errors.push(e);
                None
            }
        };
        match &phase {
            Some(PhaseSpec::Explicit { values }) if values.len() != g.bins => errors.push(FieldError::new(
                "phase.values",
                format!("has {} values, grid has {} bins", values.len(), g.bins),
            )),
            Some(PhaseSpec::Explicit { values }) if values.iter().any(|v| !v.is_finite()) => {
                errors.push(FieldError::new("phase.values", "values must be finite"))
            }
            Some(PhaseSpec::Freewave { h, .. }) if !(*h > 0.0 && h.is_finite()) => {
                errors.push(FieldError::new("phase.h", format!("must be positive, got {h}")))
            }
            _ => {}
        }
        if self.sampling.runs == 0 {
            errors.push(FieldError::new("sampling.runs", "must be at least 1"));
        }
        if !errors.is_empty() {
            return Err(errors);
        }

        let grid = Grid {
            bins: g.bins,
            x_min: g.x_min,
            x_max: g.x_max,
        };
        let space = grid.space().map_err(|e| vec![FieldError::new("grid", e.to_string())])?;
        let positions = space.positions().expect("grid space has positions");
        let mut envelopes = Vec::with_capacity(2);
        for (path, spec) in specs.expect("checked above") {
            match build_envelope(&spec, positions, &path) {
                Ok(v) => envelopes.push(v),
                Err(e) => errors.push(e),
            }
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        let phase = match phase.expect("checked above") {
            PhaseSpec::Explicit { values } => PhaseModel::Explicit { values },
            PhaseSpec::Freewave { p1, p2, h } => PhaseModel::FreeWave {
                momentum1: p1,
                momentum2: p2,
                h,
            },
        };
        let env2 = envelopes.pop().expect("two envelopes");
        let env1 = envelopes.pop().expect("two envelopes");
        TwoSlitScenario::new(
            grid,
            env1,
            env2,
            phase,
            self.sampling.n_emitted,
            self.sampling.seed,
            self.sampling.runs,
        )
        .map_err(|e| vec![FieldError::new(".", e.to_string())])
    }
}

fn build_envelope(spec: &EnvelopeSpec, positions: &[f64], path: &str) -> Result<Vec<f64>, FieldError> {
    match spec {
        EnvelopeSpec::Gaussian { mean, sigma } => {
            if !(*sigma > 0.0 && sigma.is_finite()) || !mean.is_finite() {
                return Err(FieldError::new(
                    format!("{path}.sigma"),
                    format!("need finite mean and sigma > 0 (got mean {mean}, sigma {sigma})"),
                ));
            }
            let env = gaussian_envelope(positions, *mean, *sigma);
            if env.iter().any(|v| !v.is_finite()) {
                return Err(FieldError::new(path, "gaussian has no mass on the grid"));
            }
            Ok(env)
        }
        EnvelopeSpec::Uniform => Ok(uniform_envelope(positions.len())),
        EnvelopeSpec::Table { values } => {
            let vpath = format!("{path}.values");
            if values.len() != positions.len() {
                return Err(FieldError::new(
                    vpath,
                    format!("has {} values, grid has {} bins", values.len(), positions.len()),
                ));
            }
            if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
                return Err(FieldError::new(format!("{vpath}[{i}]"), format!("{v} outside [0, 1]")));
            }
            let sum: f64 = values.iter().sum();
            if !((sum - 1.0).abs() <= NORMALIZATION_TOL) {
                return Err(FieldError::new(vpath, format!("sums to {sum}, not 1")));
            }
            Ok(values.clone())
        }
    }
}
