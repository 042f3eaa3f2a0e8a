//! Loading and validating `{"kind": ..., "payload": ...}` input files.

use std::io::Read;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;
use steinhc::handle_dynamics::HandleSpec;
use steinhc::prequant::PrequantSpec;
use steinhc::SteinDomainSpec;

use crate::CliError;

/// Payload of a `polarization` file. `b` and `c` may be omitted; they are
/// then solved for from `a`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationInput {
  pub n: u32,
  pub a: Vec<u64>,
  #[serde(default)]
  pub b: Option<Vec<u64>>,
  pub k: i64,
  #[serde(default)]
  pub c: Option<i64>,
}

#[derive(Debug, Clone)]
pub enum ManifoldFile {
  Stein(SteinDomainSpec),
  Handle(HandleSpec),
  Prequant(PrequantSpec),
  Polarization(PolarizationInput),
}

impl ManifoldFile {
  pub fn kind(&self) -> &'static str {
    match self {
      ManifoldFile::Stein(_) => "stein",
      ManifoldFile::Handle(_) => "handle",
      ManifoldFile::Prequant(_) => "prequant",
      ManifoldFile::Polarization(_) => "polarization",
    }
  }
}

fn payload<T: DeserializeOwned>(value: Value) -> Result<T, CliError> {
  serde_path_to_error::deserialize(value).map_err(|e| {
    let path = e.path().to_string();
    let at = if path == "." { "payload".to_string() } else { format!("payload.{path}") };
    CliError::Invalid(format!("{at}: {}", e.inner()))
  })
}

pub fn parse(text: &str) -> Result<ManifoldFile, CliError> {
  let value: Value = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("input is not JSON: {e}")))?;
  let Value::Object(mut top) = value else { return Err(CliError::Invalid("$: expected an object".into())) };
  if let Some(extra) = top.keys().find(|k| *k != "kind" && *k != "payload") {
    return Err(CliError::Invalid(format!("{extra}: unknown field")));
  }
  let kind = match top.remove("kind") {
    Some(Value::String(s)) => s,
    Some(_) => return Err(CliError::Invalid("kind: expected a string".into())),
    None => return Err(CliError::Invalid("kind: missing field".into())),
  };
  let body = top.remove("payload").ok_or_else(|| CliError::Invalid("payload: missing field".into()))?;
  match kind.as_str() {
    "stein" => Ok(ManifoldFile::Stein(payload(body)?)),
    "handle" => Ok(ManifoldFile::Handle(payload(body)?)),
    "prequant" => Ok(ManifoldFile::Prequant(payload(body)?)),
    "polarization" => Ok(ManifoldFile::Polarization(payload(body)?)),
    other => Err(CliError::Invalid(format!(
      "kind: unknown kind {other:?}, expected one of stein, handle, prequant, polarization"
    ))),
  }
}

/// Reads `path`, or stdin when `path` is `-`.
pub fn load(path: &str) -> Result<ManifoldFile, CliError> {
  let text = if path == "-" {
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Invalid(format!("reading stdin: {e}")))?;
    s
  } else {
    std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("reading {path}: {e}")))?
  };
  parse(&text)
}
