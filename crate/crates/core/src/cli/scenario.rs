//! Scenario files: one verification or attack, its parameters and extra assertions.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::adversary::DelayExtensionScenario;
use crate::protocols::{AbortToUnfairGeometry, BlumGeometry, CdToCfGeometry, UnfairToBiasedGeometry};
use crate::rational::{self, RatString, Rational};

use super::CliError;

#[derive(Clone, Debug, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(flatten)]
    pub task: Task,
    #[serde(default)]
    pub analysis: Analysis,
    /// Extra checks on the report, written `<path> <op> <value>`, e.g.
    /// `cases.0.advantage == 0`.
    #[serde(default)]
    pub assertions: Vec<String>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    ConstructCf {
        geometry: Option<CdToCfGeometry>,
    },
    UnfairToBiased {
        geometry: Option<UnfairToBiasedGeometry>,
    },
    AbortToUnfair {
        geometry: Option<AbortToUnfairGeometry>,
    },
    AbortChannelCertificate {
        #[serde(default)]
        candidates: Vec<String>,
    },
    Mitm {
        p: RatString,
        candidate: Option<String>,
    },
    DelayExtension {
        #[serde(default)]
        channels: Option<DelayExtensionScenario>,
        k: Option<u32>,
    },
    Epr {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Blum {
        geometry: Option<BlumGeometry>,
    },
}

fn default_dim() -> usize {
    2
}

fn default_samples() -> usize {
    10
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Exact,
    Mc,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Analysis {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub rng_seed: u64,
}

fn default_n() -> u64 {
    20_000
}

fn default_delta() -> f64 {
    0.05
}

impl Default for Analysis {
    fn default() -> Self {
        Self { mode: Mode::Exact, n: default_n(), delta: default_delta(), rng_seed: 0 }
    }
}

/// Position of the first quoted literal from a serde message inside `text`.
///
/// Tagged and flattened content is buffered before it is checked, so serde
/// reports those errors at the end of the document.
fn quoted_location(text: &str, msg: &str) -> Option<(usize, usize)> {
    let start = msg.find('"')?;
    let end = start + 1 + msg[start + 1..].find('"')?;
    let at = text.find(&msg[start..=end])?;
    let before = &text[..at];
    let line = before.matches('\n').count() + 1;
    let col = at - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Some((line, col))
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(m) => CliError::Parse(format!("{}:{m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| {
            let (line, col) = quoted_location(text, &e.to_string()).unwrap_or((e.line(), e.column()));
            CliError::Parse(format!("{line}:{col}: {e}"))
        })?;
        for a in &s.assertions {
            Assertion::parse(a)?;
        }
        Ok(s)
    }

    /// Name of the parameter a sweep varies.
    pub fn sweep_parameter(&self) -> Option<&'static str> {
        match self.task {
            Task::Mitm { .. } => Some("p"),
            Task::DelayExtension { .. } => Some("k"),
            Task::Epr { .. } => Some("dim"),
            _ => None,
        }
    }

    pub fn with_parameter(&self, param: &str, value: &str) -> Result<Self, CliError> {
        let mut s = self.clone();
        let bad = || CliError::Parse(format!("bad value {value:?} for {param}"));
        match (&mut s.task, param) {
            (Task::Mitm { p, .. }, "p") => *p = RatString(rational::parse(value).map_err(|_| bad())?),
            (Task::DelayExtension { k, .. }, "k") => *k = Some(value.trim().parse().map_err(|_| bad())?),
            (Task::Epr { dim, .. }, "dim") => *dim = value.trim().parse().map_err(|_| bad())?,
            _ => return Err(CliError::Parse(format!("scenario {:?} has no parameter {param}", self.name))),
        }
        Ok(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expected {
    Rat(Rational),
    Bool(bool),
    Text(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub path: String,
    pub op: Op,
    pub value: Expected,
    pub text: String,
}

impl Assertion {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = text.split_whitespace().collect();
        let [path, op, value] = parts[..] else {
            return Err(CliError::Parse(format!("assertion {text:?}: expected `<path> <op> <value>`")));
        };
        let op = match op {
            "==" => Op::Eq,
            "!=" => Op::Ne,
            "<=" => Op::Le,
            ">=" => Op::Ge,
            "<" => Op::Lt,
            ">" => Op::Gt,
            _ => return Err(CliError::Parse(format!("assertion {text:?}: unknown operator {op}"))),
        };
        let value = match value {
            "true" => Expected::Bool(true),
            "false" => Expected::Bool(false),
            v => match rational::parse(v) {
                Ok(r) => Expected::Rat(r),
                Err(_) => Expected::Text(v.to_string()),
            },
        };
        if !matches!((op, &value), (_, Expected::Rat(_)) | (Op::Eq | Op::Ne, _)) {
            return Err(CliError::Parse(format!("assertion {text:?}: ordering needs a number")));
        }
        Ok(Self { path: path.to_string(), op, value, text: text.to_string() })
    }

    /// Evaluates against a report; the detail names the value found.
    pub fn check(&self, report: &serde_json::Value) -> (bool, String) {
        let mut node = report;
        for key in self.path.split('.') {
            let next = match node {
                serde_json::Value::Array(a) => key.parse::<usize>().ok().and_then(|i| a.get(i)),
                serde_json::Value::Object(m) => m.get(key),
                _ => None,
            };
            match next {
                Some(n) => node = n,
                None => return (false, format!("{} not found", self.path)),
            }
        }
        let found = match node {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let ord = match (&self.value, node) {
            (Expected::Bool(b), serde_json::Value::Bool(v)) => Some(v.cmp(b)),
            (Expected::Rat(r), _) => rational::parse(&found).ok().map(|v| v.cmp(r)),
            (Expected::Text(t), _) => Some(found.as_str().cmp(t.as_str())),
            _ => None,
        };
        let Some(ord) = ord else {
            return (false, format!("{} = {found} is not comparable", self.path));
        };
        use std::cmp::Ordering::*;
        let ok = match self.op {
            Op::Eq => ord == Equal,
            Op::Ne => ord != Equal,
            Op::Le => ord != Greater,
            Op::Ge => ord != Less,
            Op::Lt => ord == Less,
            Op::Gt => ord == Greater,
        };
        (ok, format!("{} = {found}", self.path))
    }
}
