//! Problem files: one TOML document per problem.
//!
//! ```toml
//! germs = ["z1^2", "z2^3"]
//! seed = 0
//!
//! [caps]
//! jet_cap = 32
//! retry_cap = 16
//! max_steps = 64
//! exponent_cap = 32
//!
//! [flags]
//! include_inputs_as_multipliers = false
//!
//! [rules]
//! initial_gain = "1/2"
//! determinant_scale = "1/2"
//! radical_scale = "1/2"
//! ```
//!
//! Only `germs` is required.

use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::germ::Germ;
use crate::kohn::{KohnConfig, LedgerRules, DEFAULT_EXPONENT_CAP, DEFAULT_MAX_STEPS};
use crate::local::DEFAULT_JET_CAP;
use crate::parse::{parse_germ, ParseError};
use crate::projections::DEFAULT_RETRY_CAP;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Syntax(String),
    #[error("field `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("field `germs[{index}]`: {source}")]
    Germ {
        index: usize,
        #[source]
        source: ParseError,
    },
}

fn schema(field: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    germs: Vec<String>,
    seed: Option<u64>,
    caps: Option<RawCaps>,
    flags: Option<RawFlags>,
    rules: Option<RawRules>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawCaps {
    jet_cap: Option<u32>,
    retry_cap: Option<u32>,
    max_steps: Option<u32>,
    exponent_cap: Option<u32>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawFlags {
    include_inputs_as_multipliers: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawRules {
    initial_gain: Option<String>,
    determinant_scale: Option<String>,
    radical_scale: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub jet_cap: u32,
    pub retry_cap: u32,
    pub max_steps: u32,
    pub exponent_cap: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            jet_cap: DEFAULT_JET_CAP,
            retry_cap: DEFAULT_RETRY_CAP,
            max_steps: DEFAULT_MAX_STEPS,
            exponent_cap: DEFAULT_EXPONENT_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub include_inputs_as_multipliers: bool,
}

/// A validated problem with every default filled in.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub germ_texts: Vec<String>,
    pub germs: Vec<Germ>,
    pub seed: u64,
    pub caps: Caps,
    pub flags: Flags,
    pub rules: LedgerRules,
}

impl ProblemSpec {
    /// A problem over the given germs with all defaults.
    pub fn from_germ_texts<S: AsRef<str>>(texts: &[S]) -> Result<Self, ProblemError> {
        let germs = texts
            .iter()
            .map(|t| format!("{:?}", t.as_ref()))
            .collect::<Vec<_>>()
            .join(", ");
        parse_problem_str(&format!("germs = [{germs}]"))
    }

    pub fn kohn_config(&self) -> KohnConfig {
        KohnConfig {
            max_steps: self.caps.max_steps,
            jet_cap: self.caps.jet_cap,
            exponent_cap: self.caps.exponent_cap,
            include_inputs_as_multipliers: self.flags.include_inputs_as_multipliers,
        }
    }

    /// Revalidates caps after command-line overrides.
    pub fn validate_caps(&self) -> Result<(), ProblemError> {
        let c = &self.caps;
        for (name, v, min) in [
            ("caps.jet_cap", c.jet_cap, 2),
            ("caps.retry_cap", c.retry_cap, 1),
            ("caps.max_steps", c.max_steps, 1),
            ("caps.exponent_cap", c.exponent_cap, 1),
        ] {
            if v < min {
                return Err(schema(name, format!("must be at least {min}, got {v}")));
            }
        }
        Ok(())
    }
}

fn parse_rational(field: &str, text: &str) -> Result<BigRational, ProblemError> {
    BigRational::from_str(text.trim())
        .map_err(|_| schema(field, format!("expected an exact rational like \"1/2\", got {text:?}")))
}

pub fn parse_problem_str(text: &str) -> Result<ProblemSpec, ProblemError> {
    let raw: RawProblem = toml::from_str(text).map_err(|e| ProblemError::Syntax(e.to_string()))?;
    if raw.germs.len() < 2 {
        return Err(schema(
            "germs",
            format!("need at least 2 germs, got {}", raw.germs.len()),
        ));
    }
    let germs = raw
        .germs
        .iter()
        .enumerate()
        .map(|(index, t)| parse_germ(t).map_err(|source| ProblemError::Germ { index, source }))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(index) = germs.iter().position(Germ::is_zero) {
        return Err(schema(format!("germs[{index}]"), "germ is identically zero"));
    }

    let defaults = Caps::default();
    let rc = raw.caps.unwrap_or_default();
    let caps = Caps {
        jet_cap: rc.jet_cap.unwrap_or(defaults.jet_cap),
        retry_cap: rc.retry_cap.unwrap_or(defaults.retry_cap),
        max_steps: rc.max_steps.unwrap_or(defaults.max_steps),
        exponent_cap: rc.exponent_cap.unwrap_or(defaults.exponent_cap),
    };
    let flags = Flags {
        include_inputs_as_multipliers: raw
            .flags
            .unwrap_or_default()
            .include_inputs_as_multipliers
            .unwrap_or(false),
    };
    let base = LedgerRules::default();
    let rr = raw.rules.unwrap_or_default();
    let pick = |field: &str, v: Option<String>, d: BigRational| match v {
        Some(t) => parse_rational(field, &t),
        None => Ok(d),
    };
    let rules = LedgerRules::new(
        pick("rules.initial_gain", rr.initial_gain, base.initial_gain)?,
        pick("rules.determinant_scale", rr.determinant_scale, base.determinant_scale)?,
        pick("rules.radical_scale", rr.radical_scale, base.radical_scale)?,
    )
    .map_err(|e| schema(format!("rules.{}", e.field), e.to_string()))?;

    let spec = ProblemSpec {
        germ_texts: raw.germs,
        germs,
        seed: raw.seed.unwrap_or(0),
        caps,
        flags,
        rules,
    };
    spec.validate_caps()?;
    Ok(spec)
}

pub fn parse_input_file(path: impl AsRef<Path>) -> Result<ProblemSpec, ProblemError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem_str(&text)
}
