//! Plain-text key/value model configuration.
//!
//! ```text
//! model.sigma = 1.0
//! model.gamma = 0.0
//! model.jumps = stable        # none | stable | tempered | cpp_exp
//! stable.alpha = 1.5
//! stable.c = 1.0
//! ```
//!
//! Lines are `key = value`; `#` starts a comment; unknown keys are
//! rejected. The `inversion.*` keys tune the numerical transform
//! inversion of the generic model route.

use std::collections::HashMap;

use snlevy_core::{InversionParams, JumpFamily, ModelSpec, ScaleEngine};

/// A parsed configuration: the model plus inversion tuning.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub model: ModelSpec,
    pub inversion: InversionParams,
}

impl Config {
    pub fn engine(&self) -> Result<ScaleEngine, snlevy_core::Error> {
        ScaleEngine::with_params(self.model, self.inversion)
    }
}

fn parse_f64(map: &HashMap<String, String>, key: &str) -> Result<f64, String> {
    let raw = map
        .get(key)
        .ok_or_else(|| format!("missing required key `{key}`"))?;
    raw.parse::<f64>()
        .map_err(|_| format!("key `{key}`: `{raw}` is not a number"))
}

fn parse_f64_or(map: &HashMap<String, String>, key: &str, default: f64) -> Result<f64, String> {
    match map.get(key) {
        None => Ok(default),
        Some(raw) => raw
            .parse::<f64>()
            .map_err(|_| format!("key `{key}`: `{raw}` is not a number")),
    }
}

const KNOWN_KEYS: &[&str] = &[
    "model.sigma",
    "model.gamma",
    "model.jumps",
    "stable.alpha",
    "stable.c",
    "tempered.alpha",
    "tempered.c",
    "tempered.theta0",
    "cpp_exp.rate",
    "cpp_exp.mean",
    "inversion.tol",
    "inversion.max_terms",
    "inversion.contour_eps",
];

/// Parses configuration text into a validated model.
pub fn parse(text: &str) -> Result<Config, String> {
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        let key = key.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(format!("line {}: unknown key `{key}`", lineno + 1));
        }
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
    }

    let sigma = parse_f64_or(&map, "model.sigma", 0.0)?;
    let gamma = parse_f64_or(&map, "model.gamma", 0.0)?;
    let jumps = match map.get("model.jumps").map(String::as_str).unwrap_or("none") {
        "none" => JumpFamily::None,
        "stable" => JumpFamily::Stable {
            alpha: parse_f64(&map, "stable.alpha")?,
            c: parse_f64(&map, "stable.c")?,
        },
        "tempered" => JumpFamily::TemperedStable {
            alpha: parse_f64(&map, "tempered.alpha")?,
            c: parse_f64(&map, "tempered.c")?,
            theta0: parse_f64(&map, "tempered.theta0")?,
        },
        "cpp_exp" => JumpFamily::CompoundPoissonExp {
            rate: parse_f64(&map, "cpp_exp.rate")?,
            mean: parse_f64(&map, "cpp_exp.mean")?,
        },
        other => {
            return Err(format!(
                "model.jumps: `{other}` is not one of none|stable|tempered|cpp_exp"
            ))
        }
    };
    let model = ModelSpec::new(sigma, gamma, jumps).map_err(|e| format!("invalid model: {e}"))?;

    let defaults = InversionParams::default();
    let inversion = InversionParams {
        tol: parse_f64_or(&map, "inversion.tol", defaults.tol)?,
        max_terms: parse_f64_or(&map, "inversion.max_terms", defaults.max_terms as f64)? as usize,
        contour_eps: parse_f64_or(&map, "inversion.contour_eps", defaults.contour_eps)?,
    };
    Ok(Config { model, inversion })
}

/// Reads and parses a configuration file.
pub fn load(path: &std::path::Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&text)
}
