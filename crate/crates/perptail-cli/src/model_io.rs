//! Strict JSON descriptors for factor models and matrix ensembles.
//!
//! Models: `{"kind": "log_gamma", "gamma": 4.0, "beta": 1.0, "mu": 5.0}` and
//! friends; unknown fields and unknown kinds are rejected.
//!
//! Ensembles: `{"d": 2, "entries": [[<model-or-entry>, ...], ...]}` or
//! `{"atoms": [{"matrix": [[...], ...], "prob": 0.25}, ...]}`. Entry cells
//! accept a bare number (constant), `{"kind": "zero"}`,
//! `{"kind": "const", "value": c}`, or a model object.

use perptail_core::{EnsembleKind, FactorModel, Matrix, MatrixEnsemble, MatrixEntry};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug)]
pub struct ParseError(pub String);

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ParseError {}

type ParseResult<T> = Result<T, ParseError>;

fn err<T>(msg: impl Into<String>) -> ParseResult<T> {
    Err(ParseError(msg.into()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LogNormalFields {
    mu: f64,
    #[serde(alias = "s")]
    sigma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaFields {
    gamma: f64,
    beta: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LogGammaFields {
    gamma: f64,
    beta: f64,
    mu: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignedMixtureFields {
    base: Value,
    q: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoPointFields {
    a: f64,
    b: f64,
    p_a: f64,
}

fn take_kind(value: &Value) -> ParseResult<(String, Value)> {
    let Value::Object(map) = value else {
        return err("model descriptor must be a JSON object");
    };
    let mut rest = map.clone();
    let Some(Value::String(kind)) = rest.remove("kind") else {
        return err("model descriptor needs a string \"kind\" field");
    };
    Ok((kind, Value::Object(rest)))
}

/// Parse and validate a factor model descriptor.
pub fn parse_model(value: &Value) -> ParseResult<FactorModel> {
    let (kind, rest) = take_kind(value)?;
    let model = match kind.as_str() {
        "log_normal" => {
            let f: LogNormalFields =
                serde_json::from_value(rest).map_err(|e| ParseError(format!("log_normal: {e}")))?;
            FactorModel::LogNormal { mu: f.mu, sigma: f.sigma }
        }
        "gamma_factor" => {
            let f: GammaFields = serde_json::from_value(rest)
                .map_err(|e| ParseError(format!("gamma_factor: {e}")))?;
            FactorModel::GammaFactor { gamma: f.gamma, beta: f.beta }
        }
        "log_gamma" => {
            let f: LogGammaFields =
                serde_json::from_value(rest).map_err(|e| ParseError(format!("log_gamma: {e}")))?;
            FactorModel::LogGamma { gamma: f.gamma, beta: f.beta, mu: f.mu }
        }
        "signed_mixture" => {
            let f: SignedMixtureFields = serde_json::from_value(rest)
                .map_err(|e| ParseError(format!("signed_mixture: {e}")))?;
            FactorModel::SignedMixture { base: Box::new(parse_model(&f.base)?), q: f.q }
        }
        "two_point" => {
            let f: TwoPointFields =
                serde_json::from_value(rest).map_err(|e| ParseError(format!("two_point: {e}")))?;
            FactorModel::TwoPoint { a: f.a, b: f.b, p_a: f.p_a }
        }
        other => return err(format!("unknown model kind: {other:?}")),
    };
    model
        .validate()
        .map_err(|e| ParseError(e.to_string()))?;
    Ok(model)
}

pub fn parse_model_str(text: &str) -> ParseResult<FactorModel> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ParseError(format!("malformed JSON: {e}")))?;
    parse_model(&value)
}

fn parse_entry(value: &Value) -> ParseResult<MatrixEntry> {
    match value {
        Value::Number(n) => {
            let v = n.as_f64().ok_or_else(|| ParseError("bad numeric entry".into()))?;
            Ok(if v == 0.0 { MatrixEntry::Zero } else { MatrixEntry::Const { value: v } })
        }
        Value::Object(map) => match map.get("kind").and_then(Value::as_str) {
            Some("zero") => {
                if map.len() != 1 {
                    return err("zero entry takes no other fields");
                }
                Ok(MatrixEntry::Zero)
            }
            Some("const") => {
                if map.len() != 2 {
                    return err("const entry takes exactly {kind, value}");
                }
                let v = map
                    .get("value")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| ParseError("const entry needs a numeric \"value\"".into()))?;
                Ok(MatrixEntry::Const { value: v })
            }
            Some(_) => Ok(MatrixEntry::Model { model: parse_model(value)? }),
            None => err("matrix entry object needs a \"kind\" field"),
        },
        _ => err("matrix entries must be numbers or objects"),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomFields {
    matrix: Vec<Vec<f64>>,
    prob: f64,
}

/// Parse and validate a matrix-ensemble descriptor.
pub fn parse_ensemble(value: &Value) -> ParseResult<MatrixEnsemble> {
    let Value::Object(map) = value else {
        return err("ensemble descriptor must be a JSON object");
    };
    let dense_subgroup_assumed = match map.get("dense_subgroup_assumed") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return err("dense_subgroup_assumed must be a boolean"),
    };
    let known = ["d", "entries", "atoms", "dense_subgroup_assumed"];
    if let Some(k) = map.keys().find(|k| !known.contains(&k.as_str())) {
        return err(format!("unknown ensemble field: {k:?}"));
    }

    let ensemble = if let Some(entries) = map.get("entries") {
        let Some(Value::Number(d)) = map.get("d") else {
            return err("entrywise ensembles need a numeric \"d\"");
        };
        let d = d.as_u64().ok_or_else(|| ParseError("d must be a positive integer".into()))?
            as usize;
        let Value::Array(rows) = entries else {
            return err("\"entries\" must be an array of rows");
        };
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let Value::Array(cells) = row else {
                return err("each entries row must be an array");
            };
            parsed.push(cells.iter().map(parse_entry).collect::<ParseResult<Vec<_>>>()?);
        }
        MatrixEnsemble { d, kind: EnsembleKind::Entries(parsed), dense_subgroup_assumed }
    } else if let Some(atoms) = map.get("atoms") {
        let Value::Array(list) = atoms else {
            return err("\"atoms\" must be an array");
        };
        let mut matrices = Vec::new();
        let mut probs = Vec::new();
        for a in list {
            let f: AtomFields = serde_json::from_value(a.clone())
                .map_err(|e| ParseError(format!("atom: {e}")))?;
            matrices.push(
                Matrix::from_rows(&f.matrix).map_err(|e| ParseError(e.to_string()))?,
            );
            probs.push(f.prob);
        }
        let d = matrices.first().map(|m| m.d).unwrap_or(0);
        MatrixEnsemble { d, kind: EnsembleKind::Atoms { matrices, probs }, dense_subgroup_assumed }
    } else {
        return err("ensemble descriptor needs either \"entries\" or \"atoms\"");
    };
    ensemble.validate().map_err(|e| ParseError(e.to_string()))?;
    Ok(ensemble)
}

pub fn parse_ensemble_str(text: &str) -> ParseResult<MatrixEnsemble> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ParseError(format!("malformed JSON: {e}")))?;
    parse_ensemble(&value)
}
