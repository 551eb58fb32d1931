//! Dataset ingestion and the small descriptor languages used by flags.
//!
//! Everything here treats its input as untrusted: malformed text becomes an
//! [`InputError`], never a panic.

use serde::Deserialize;

use crate::bounds::{AnchorStrategy, BoundName, WeightVector};
use crate::sip::DEFAULT_TOL;
use crate::space::{NormSpec, Vector};

use super::InputError;

/// Schema tag accepted in dataset files.
pub const DATASET_SCHEMA: &str = "normsip.dataset/v1";

const WEIGHT_WARN_TOL: f64 = 1e-9;

/// Parses `lp:<p>`, `lp:inf` or `wlp:<p>:<w1>,<w2>,...`.
pub fn parse_norm(text: &str) -> Result<NormSpec, InputError> {
    let text = text.trim();
    let bad = |why: &str| InputError::Descriptor(format!("norm `{text}`: {why}"));
    let mut parts = text.splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    let p = parts.next().ok_or_else(|| bad("missing exponent"))?;
    let p = parse_exponent(p).ok_or_else(|| bad("exponent must be a number >= 1 or `inf`"))?;
    match kind {
        "lp" => {
            if parts.next().is_some() {
                return Err(bad("unexpected trailing field"));
            }
            Ok(NormSpec::lp(p)?)
        }
        "wlp" => {
            let weights = parts.next().ok_or_else(|| bad("missing weights"))?;
            let weights = parse_list(weights).map_err(|e| bad(&e))?;
            Ok(NormSpec::weighted_lp(p, weights)?)
        }
        _ => Err(bad("expected `lp` or `wlp`")),
    }
}

fn parse_exponent(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "infinity" | "Inf" => Some(f64::INFINITY),
        other => other.parse::<f64>().ok().filter(|p| p.is_finite()),
    }
}

/// Comma-separated finite reals.
pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{item}` is not a finite number"))
        })
        .collect()
}

/// Parses `mean`, `index:<k>` (zero-based) or `coords:<c1>,<c2>,...`.
pub fn parse_anchor(text: &str) -> Result<AnchorStrategy, InputError> {
    let text = text.trim();
    let bad = |why: String| InputError::Descriptor(format!("anchor `{text}`: {why}"));
    if text == "mean" {
        return Ok(AnchorStrategy::Mean);
    }
    match text.split_once(':') {
        Some(("index", k)) => k
            .trim()
            .parse::<usize>()
            .map(AnchorStrategy::Index)
            .map_err(|e| bad(e.to_string())),
        Some(("coords", list)) => {
            let coords = parse_list(list).map_err(bad)?;
            Ok(AnchorStrategy::Coords(Vector::new(coords)?))
        }
        _ => Err(bad("expected `mean`, `index:<k>` or `coords:<list>`".into())),
    }
}

/// Parses `all` or a comma-separated list of bound tags.
pub fn parse_bounds(text: &str) -> Result<Vec<BoundName>, InputError> {
    let text = text.trim();
    if text == "all" {
        return Ok(BoundName::ALL.to_vec());
    }
    let mut out = Vec::new();
    for tag in text.split(',').map(str::trim) {
        let name = BoundName::from_tag(tag)
            .ok_or_else(|| InputError::Descriptor(format!("unknown bound `{tag}`")))?;
        if !out.contains(&name) {
            out.push(name);
        }
    }
    Ok(out)
}

/// Parses a comma-separated epsilon list. Ordering is checked by the
/// witness code.
pub fn parse_eps_list(text: &str) -> Result<Vec<f64>, InputError> {
    parse_list(text).map_err(|e| InputError::Descriptor(format!("epsilon list: {e}")))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetFile {
    schema: Option<String>,
    norm: Option<String>,
    vectors: Vec<Vec<f64>>,
    weights: Option<Vec<f64>>,
    anchor: Option<Vec<f64>>,
    tol: Option<f64>,
}

/// Values supplied on the command line; they take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub norm: Option<NormSpec>,
    pub weights: Option<Vec<f64>>,
    pub anchor: Option<AnchorStrategy>,
    pub tol: Option<f64>,
}

/// A validated dataset.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub norm: NormSpec,
    pub vectors: Vec<Vector>,
    pub weights: WeightVector,
    pub anchor: AnchorStrategy,
    pub tol: f64,
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn from_json(text: &str, overrides: &Overrides) -> Result<Self, InputError> {
        let file: DatasetFile = serde_json::from_str(text)?;
        if let Some(schema) = &file.schema {
            if schema != DATASET_SCHEMA {
                return Err(InputError::Schema(format!(
                    "unsupported dataset schema `{schema}`, expected `{DATASET_SCHEMA}`"
                )));
            }
        }
        let norm = match (&overrides.norm, &file.norm) {
            (Some(n), _) => n.clone(),
            (None, Some(text)) => parse_norm(text)?,
            (None, None) => {
                return Err(InputError::Schema(
                    "no norm given: set `norm` in the file or pass --norm".into(),
                ))
            }
        };
        let anchor = match (&overrides.anchor, file.anchor) {
            (Some(a), _) => a.clone(),
            (None, Some(coords)) => AnchorStrategy::Coords(Vector::new(coords)?),
            (None, None) => AnchorStrategy::Mean,
        };
        let weights = overrides.weights.clone().or(file.weights);
        let tol = overrides.tol.or(file.tol);
        Self::assemble(norm, file.vectors, weights, anchor, tol)
    }

    /// Rows of comma-separated coordinates. `#` starts a comment; a first
    /// row that does not parse as numbers is taken as a header.
    pub fn from_csv(text: &str, overrides: &Overrides) -> Result<Self, InputError> {
        let norm = overrides.norm.clone().ok_or_else(|| {
            InputError::Schema("CSV input needs the norm passed with --norm".into())
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(e) => {
                    return Err(InputError::Schema(format!(
                        "row {}: {e}",
                        record.position().map_or(i as u64 + 1, |p| p.line())
                    )))
                }
            }
        }
        Self::assemble(
            norm,
            rows,
            overrides.weights.clone(),
            overrides.anchor.clone().unwrap_or(AnchorStrategy::Mean),
            overrides.tol,
        )
    }

    fn assemble(
        norm: NormSpec,
        rows: Vec<Vec<f64>>,
        weights: Option<Vec<f64>>,
        anchor: AnchorStrategy,
        tol: Option<f64>,
    ) -> Result<Self, InputError> {
        if rows.is_empty() {
            return Err(InputError::Schema("dataset has no vectors".into()));
        }
        let dim = rows[0].len();
        let mut vectors = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(InputError::Schema(format!(
                    "vector {i} has {} coordinates, expected {dim}",
                    row.len()
                )));
            }
            vectors.push(Vector::new(row)?);
        }
        norm.check(dim)?;
        if let AnchorStrategy::Coords(a) = &anchor {
            if a.dim() != dim {
                return Err(InputError::Schema(format!(
                    "anchor has {} coordinates, expected {dim}",
                    a.dim()
                )));
            }
        }
        if let AnchorStrategy::Index(k) = anchor {
            if k >= vectors.len() {
                return Err(InputError::Schema(format!(
                    "anchor index {k} out of range for {} vectors",
                    vectors.len()
                )));
            }
        }
        let mut warnings = Vec::new();
        let weights = match weights {
            Some(raw) => {
                if raw.len() != vectors.len() {
                    return Err(InputError::Schema(format!(
                        "{} weights given for {} vectors",
                        raw.len(),
                        vectors.len()
                    )));
                }
                let (w, sum) = WeightVector::normalized(raw)?;
                if (sum - 1.0).abs() > WEIGHT_WARN_TOL {
                    warnings.push(format!("weights summed to {sum}; normalized to 1"));
                }
                w
            }
            None => WeightVector::uniform(vectors.len())?,
        };
        let tol = tol.unwrap_or(DEFAULT_TOL);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(InputError::Schema(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        Ok(Dataset {
            norm,
            vectors,
            weights,
            anchor,
            tol,
            warnings,
        })
    }
}
