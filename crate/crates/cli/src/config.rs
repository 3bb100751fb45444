//! Run configuration: TOML (sections of `key = value`) or JSON with the same
//! nesting. Unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Deserialize;

use fracbound::{Expr, Var};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bound,
    Solve,
    Check,
    Verify,
    /// Run a preset in the mode it declares.
    Example,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Bound => "bound",
            Mode::Solve => "solve",
            Mode::Check => "check",
            Mode::Verify => "verify",
            Mode::Example => "example",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A number, or text holding a constant expression such as `"2/3"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Text(String),
}

impl Real {
    pub fn value(&self, key: &str) -> Result<f64, CliError> {
        match self {
            Real::Number(x) => Ok(*x),
            Real::Text(s) => Expr::parse(s, &[])
                .ok()
                .and_then(|e| e.constant_value())
                .ok_or_else(|| CliError::Config(format!("{key}: `{s}` is not a constant"))),
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Number(x)
    }
}

/// An expression given as text or as a bare number.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ExprText {
    Number(f64),
    Text(String),
}

impl ExprText {
    pub fn parse(&self, key: &str, vars: &[Var]) -> Result<Expr, CliError> {
        match self {
            ExprText::Number(x) => Ok(Expr::constant(*x)),
            ExprText::Text(s) => {
                Expr::parse(s, vars).map_err(|e| CliError::Config(format!("{key}: {e}")))
            }
        }
    }
}

impl From<&str> for ExprText {
    fn from(s: &str) -> Self {
        ExprText::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub mode: Option<Mode>,
    pub problem: Option<ProblemSection>,
    pub fivp: Option<FivpSection>,
    pub envelope: Option<EnvelopeSection>,
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub numeric: NumericSection,
    #[serde(default)]
    pub output: OutputSection,
    pub sample: Option<SampleSection>,
}

/// An inequality for `bound`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub theorem: String,
    pub a: ExprText,
    pub b: ExprText,
    pub l: ExprText,
    pub omega: ExprText,
    pub beta: Option<Real>,
    pub alpha: Option<Real>,
    pub delta: Option<Real>,
    pub gamma: Option<Real>,
}

/// `D^β x = f(t, x)`, `t^{1-β} x(t) → x0`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FivpSection {
    pub beta: Real,
    pub x0: Real,
    pub f: ExprText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeKind {
    Omega,
    Growth,
    Lipschitz,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct EnvelopeSection {
    pub kind: EnvelopeKind,
    pub l: ExprText,
    pub omega: Option<ExprText>,
    pub k: Option<ExprText>,
    pub gamma: Option<Real>,
    /// Declared exponent at 0 of the weighted `l` term.
    pub l_exponent: Option<Real>,
    /// Declared exponent at 0 of the weighted `k` (or `f(t,0)`) term.
    pub k_exponent: Option<Real>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    #[serde(rename = "T")]
    pub horizon: Option<Real>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub r: Option<Real>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct NumericSection {
    pub p: Option<Real>,
    pub tol: Option<Real>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
    /// Add the extremal solution as a column of `bound` output.
    pub extremal: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SampleSection {
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
    pub x_lo: Option<f64>,
    pub x_hi: Option<f64>,
    pub nt: Option<usize>,
    pub nx: Option<usize>,
}

impl Config {
    /// Parses JSON when the text starts with `{`, TOML otherwise.
    pub fn parse(text: &str) -> Result<Config, CliError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("json: {e}")))
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Config::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}
