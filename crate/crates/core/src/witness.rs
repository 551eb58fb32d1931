//! Sharpness witnesses: families `x_1 = ... = x_n = eps * a` on which the
//! constants of the bounds are approached (`1/2`) or attained (equality).
//!
//! Each slack row is measured by running the real bound code on the
//! witness, then compared against the closed-form constant the family
//! admits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{
    reverse_ratio_bound, sip_lower_bound, triangle_ratio, weighted_inequality_check, ReverseForm,
    SipLowerBound, WeightVector, WeightedForm,
};
use crate::error::{Error, Result};
use crate::sip::{sip_value, Which};
use crate::space::{NormSpec, Vector};

/// Default number of identical vectors in multi-vector witnesses.
pub const DEFAULT_WITNESS_COUNT: usize = 3;

/// Relative tolerance for agreement between measured and closed-form
/// constants, and the absolute slack allowed for equality witnesses.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WitnessKind {
    /// `<x,a>_i >= C (||a||^2 - ||x - a||^2)` forces `C <= 1/(2 - eps)`.
    #[serde(rename = "lemma21")]
    QuadraticSip,
    /// `||xbar|| ||a|| + 1/2 sum p_j ||x_j - a||^2 >= D ||a||^2` forces
    /// `D <= eps + (1 - eps)^2 / 2`.
    #[serde(rename = "thm21")]
    WeightedQuadratic,
    /// The quadratic-deficit ratio bound with constant `E` forces
    /// `E <= 1/(2 - eps)`.
    #[serde(rename = "thm22")]
    QuadraticDeficitRatio,
    /// `<x,a>_i >= ||a|| (||a|| - ||x - a||)` holds with equality.
    #[serde(rename = "lemma22")]
    NormGapSip,
    /// The norm-gap ratio bound holds with equality.
    #[serde(rename = "thm23")]
    NormGapRatio,
}

impl WitnessKind {
    pub const ALL: [WitnessKind; 5] = [
        WitnessKind::QuadraticSip,
        WitnessKind::WeightedQuadratic,
        WitnessKind::QuadraticDeficitRatio,
        WitnessKind::NormGapSip,
        WitnessKind::NormGapRatio,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            WitnessKind::QuadraticSip => "lemma21",
            WitnessKind::WeightedQuadratic => "thm21",
            WitnessKind::QuadraticDeficitRatio => "thm22",
            WitnessKind::NormGapSip => "lemma22",
            WitnessKind::NormGapRatio => "thm23",
        }
    }

    fn multi_vector(self) -> bool {
        !matches!(self, WitnessKind::QuadraticSip | WitnessKind::NormGapSip)
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for WitnessKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| format!("unknown witness kind `{s}`"))
    }
}

/// What the witness family shows about its inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sharpness {
    /// Largest constant compatible with the witness; tends to 1/2.
    Constant(f64),
    /// The inequality is attained exactly.
    Equality,
}

impl Sharpness {
    /// The admissible constant, or the expected slack `0` for equality cases.
    pub fn value(self) -> f64 {
        match self {
            Sharpness::Constant(c) => c,
            Sharpness::Equality => 0.0,
        }
    }
}

/// Closed-form sharpness of `kind` at `eps`.
pub fn admissible_constant(kind: WitnessKind, eps: f64) -> Sharpness {
    match kind {
        WitnessKind::QuadraticSip | WitnessKind::QuadraticDeficitRatio => {
            Sharpness::Constant(1.0 / (2.0 - eps))
        }
        WitnessKind::WeightedQuadratic => {
            Sharpness::Constant(eps + 0.5 * (1.0 - eps) * (1.0 - eps))
        }
        WitnessKind::NormGapSip | WitnessKind::NormGapRatio => Sharpness::Equality,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessCase {
    pub kind: WitnessKind,
    pub epsilon: f64,
    pub a: Vector,
    pub xs: Vec<Vector>,
    pub ps: WeightVector,
    pub sharpness: Sharpness,
}

impl WitnessCase {
    pub fn admissible_constant(&self) -> f64 {
        self.sharpness.value()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Builds the witness `x_j = eps * a` with uniform weights.
///
/// Single-vector kinds ignore `n_count`.
pub fn sharpness_witness(
    kind: WitnessKind,
    a: &Vector,
    eps: f64,
    n_count: usize,
) -> Result<WitnessCase> {
    check_eps(eps)?;
    if a.is_zero() {
        return Err(Error::ZeroVector("a"));
    }
    let count = if kind.multi_vector() { n_count } else { 1 };
    if count == 0 {
        return Err(Error::EmptyWitness);
    }
    let x = eps * a;
    Ok(WitnessCase {
        kind,
        epsilon: eps,
        a: a.clone(),
        xs: vec![x; count],
        ps: WeightVector::uniform(count)?,
        sharpness: admissible_constant(kind, eps),
    })
}

/// One row of a slack curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackRow {
    pub eps: f64,
    pub admissible_constant: f64,
    /// Largest constant the witness admits, from evaluated bounds. Absent for
    /// equality kinds.
    pub measured_constant: Option<f64>,
    /// Evaluated bound divided by the quantity it bounds.
    pub bound_quotient: f64,
    /// `measured_constant - admissible_constant`, or for equality kinds the
    /// gap between the bounded quantity and the bound.
    pub measured_slack: f64,
}

impl SlackRow {
    /// Whether the measurement disagrees with the closed form.
    pub fn violation(&self) -> Option<String> {
        match self.measured_constant {
            Some(m) => {
                let tol = WITNESS_TOL * self.admissible_constant.abs().max(1.0);
                ((m - self.admissible_constant).abs() > tol).then(|| {
                    format!(
                        "eps = {}: measured constant {m} differs from admissible {}",
                        self.eps, self.admissible_constant
                    )
                })
            }
            None => (self.measured_slack.abs() > WITNESS_TOL).then(|| {
                format!(
                    "eps = {}: equality witness has slack {}",
                    self.eps, self.measured_slack
                )
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackTable {
    pub kind: WitnessKind,
    pub norm: String,
    pub anchor: Vector,
    pub count: usize,
    pub rows: Vec<SlackRow>,
}

impl SlackTable {
    pub fn violations(&self) -> Vec<String> {
        self.rows.iter().filter_map(SlackRow::violation).collect()
    }
}

/// Evaluates the witness at each `eps` (strictly decreasing, inside (0, 1))
/// and tabulates the admissible constant against the measured one.
pub fn slack_curve(
    kind: WitnessKind,
    a: &Vector,
    n: &NormSpec,
    eps_list: &[f64],
    n_count: usize,
) -> Result<SlackTable> {
    if eps_list.is_empty() || eps_list.windows(2).any(|w| w[1] >= w[0] || w[1].is_nan()) {
        return Err(Error::UnorderedEpsilons);
    }
    n.check(a.dim())?;
    let mut rows = Vec::with_capacity(eps_list.len());
    let mut count = 1;
    for &eps in eps_list {
        let case = sharpness_witness(kind, a, eps, n_count)?;
        count = case.xs.len();
        rows.push(measure(&case, n)?);
    }
    Ok(SlackTable {
        kind,
        norm: n.to_string(),
        anchor: a.clone(),
        count,
        rows,
    })
}

fn measure(case: &WitnessCase, n: &NormSpec) -> Result<SlackRow> {
    let a = &case.a;
    let x = &case.xs[0];
    let admissible = case.admissible_constant();
    let (measured_constant, bound_quotient, measured_slack) = match case.kind {
        WitnessKind::QuadraticSip => {
            let sip_i = sip_value(x, a, n, Which::Inferior)?;
            let bound = sip_lower_bound(x, a, n, SipLowerBound::Quadratic)?;
            let c = sip_i / (2.0 * bound);
            (Some(c), bound / sip_i, c - admissible)
        }
        WitnessKind::WeightedQuadratic => {
            let check =
                weighted_inequality_check(&case.xs, &case.ps, a, n, WeightedForm::Quadratic)?;
            let norm_a = n.eval(a)?;
            let d = check.lhs / (norm_a * norm_a);
            (Some(d), check.rhs / check.lhs, d - admissible)
        }
        WitnessKind::QuadraticDeficitRatio => {
            let ratio = triangle_ratio(&case.xs, &case.ps, n)?;
            let bound = certified_value(&case.xs, &case.ps, a, n, ReverseForm::QuadraticDeficit)?;
            let e = ratio / (2.0 * bound);
            (Some(e), bound / ratio, e - admissible)
        }
        WitnessKind::NormGapSip => {
            let sip_i = sip_value(x, a, n, Which::Inferior)?;
            let bound = sip_lower_bound(x, a, n, SipLowerBound::NormGap)?;
            (None, bound / sip_i, sip_i - bound)
        }
        WitnessKind::NormGapRatio => {
            let ratio = triangle_ratio(&case.xs, &case.ps, n)?;
            let bound = certified_value(&case.xs, &case.ps, a, n, ReverseForm::NormGap)?;
            (None, bound / ratio, ratio - bound)
        }
    };
    Ok(SlackRow {
        eps: case.epsilon,
        admissible_constant: admissible,
        measured_constant,
        bound_quotient,
        measured_slack,
    })
}

fn certified_value(
    xs: &[Vector],
    ps: &WeightVector,
    a: &Vector,
    n: &NormSpec,
    form: ReverseForm,
) -> Result<f64> {
    let r = reverse_ratio_bound(xs, ps, a, n, form)?;
    match (r.applicable, r.value) {
        (true, Some(v)) => Ok(v),
        _ => Err(Error::Precondition(r.diagnostics)),
    }
}
