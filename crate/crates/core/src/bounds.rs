//! Lower bounds on semi-inner products, weighted aggregate inequalities and
//! certified lower/upper bounds on the triangle ratio
//! `||sum p_j x_j|| / sum p_j ||x_j||`.
//!
//! A bound whose hypotheses fail on the given data is not an error: it comes
//! back with `applicable = false` and one [`Diagnostic`] per failed condition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sip::{sip_certified_lower, sip_certified_upper, DEFAULT_TOL};
use crate::space::{NormSpec, Vector};

/// Relative slack allowed in hypotheses such as `||x_j - a|| <= ||a||`, so
/// that boundary cases count as satisfied.
pub const PRECONDITION_RTOL: f64 = 1e-12;

/// Tolerance, relative to the compared magnitudes, for soundness checks of
/// certificates against the triangle ratio.
pub const SOUNDNESS_RTOL: f64 = 1e-9;

const WEIGHT_SUM_RTOL: f64 = 1e-12;

/// Nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    p: Vec<f64>,
}

impl WeightVector {
    /// Normalizes `raw` to sum to one.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        Self::normalized(raw).map(|(w, _)| w)
    }

    /// Like [`WeightVector::new`], also returning the raw sum so callers can
    /// warn when the input was not already normalized.
    pub fn normalized(raw: Vec<f64>) -> Result<(Self, f64)> {
        if raw.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if let Some((index, &value)) = raw
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w >= 0.0))
        {
            return Err(Error::InvalidWeight { index, value });
        }
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::ZeroWeightSum);
        }
        let p = if (sum - 1.0).abs() <= WEIGHT_SUM_RTOL {
            raw
        } else {
            raw.into_iter().map(|w| w / sum).collect()
        };
        Ok((WeightVector { p }, sum))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyFamily);
        }
        Ok(WeightVector {
            p: vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }
}

/// Hypothesis that a [`Diagnostic`] reports as violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `x_j = 0` where a nonzero vector is required.
    ZeroVector,
    /// The anchor `a` is zero.
    ZeroAnchor,
    /// `||x_j - a|| > ||a||`.
    AnchorDistance,
    /// `||a|| - ||x_j - a|| < rho ||x_j||`.
    RhoGap,
    /// The weighted combination `sum p_j x_j` vanishes.
    ZeroCombination,
    /// The self-anchored lower constant is not positive.
    NonPositiveConstant,
    /// The self-anchored upper constant is not below one.
    ConstantNotBelowOne,
}

/// A violated hypothesis, attached to the offending index when there is one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub index: Option<usize>,
    pub condition: Condition,
    pub detail: String,
}

impl Diagnostic {
    fn at(index: usize, condition: Condition, detail: String) -> Self {
        Diagnostic {
            index: Some(index),
            condition,
            detail,
        }
    }

    fn global(condition: Condition, detail: impl Into<String>) -> Self {
        Diagnostic {
            index: None,
            condition,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(j) => write!(f, "[{j}] {:?}: {}", self.condition, self.detail),
            None => write!(f, "{:?}: {}", self.condition, self.detail),
        }
    }
}

/// Identifier of a certified ratio bound. Serialized with its short tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundName {
    /// `1/2 min_j (||a||^2 - ||a - x_j||^2) / (||x_j|| ||a||)`
    #[serde(rename = "thm22")]
    QuadraticDeficit,
    /// `(||a|| - max_j ||x_j - a||) / (2 ||a||)`
    #[serde(rename = "prop22")]
    MaxDeviation,
    /// `min_j (||a|| - ||x_j - a||) / ||x_j||`
    #[serde(rename = "thm23")]
    NormGap,
    /// An explicit `rho` validated against `||a|| - ||x_j - a|| >= rho ||x_j||`.
    #[serde(rename = "rho")]
    Rho,
    /// `min_j <x_j, xbar>_i / (||x_j|| ||xbar||)`, anchored at the weighted mean.
    #[serde(rename = "thm31")]
    SelfAnchorLower,
    /// `max_j <x_j, xbar>_s / (||x_j|| ||xbar||)`, anchored at the weighted mean.
    #[serde(rename = "thm32")]
    SelfAnchorUpper,
}

impl BoundName {
    pub const ALL: [BoundName; 6] = [
        BoundName::QuadraticDeficit,
        BoundName::MaxDeviation,
        BoundName::NormGap,
        BoundName::Rho,
        BoundName::SelfAnchorLower,
        BoundName::SelfAnchorUpper,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BoundName::QuadraticDeficit => "thm22",
            BoundName::MaxDeviation => "prop22",
            BoundName::NormGap => "thm23",
            BoundName::Rho => "rho",
            BoundName::SelfAnchorLower => "thm31",
            BoundName::SelfAnchorUpper => "thm32",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.tag() == tag)
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateSide {
    Lower,
    Upper,
}

/// One evaluated bound on the triangle ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub name: BoundName,
    /// `None` when the formula cannot be evaluated at all (zero vectors).
    pub value: Option<f64>,
    pub applicable: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub certificate_side: CertificateSide,
    /// Index into the report's anchor list, for anchored bounds.
    pub anchor: Option<usize>,
    /// Per-index quantities reduced by min or max into `value`.
    pub terms: Vec<f64>,
}

impl BoundResult {
    fn new(name: BoundName, side: CertificateSide) -> Self {
        BoundResult {
            name,
            value: None,
            applicable: false,
            diagnostics: Vec::new(),
            certificate_side: side,
            anchor: None,
            terms: Vec::new(),
        }
    }

    fn finish(mut self, value: Option<f64>) -> Self {
        self.applicable = self.diagnostics.is_empty() && value.is_some();
        self.value = value;
        self
    }

    /// `Some(description)` if this bound is applicable yet contradicts `ratio`.
    pub fn soundness_violation(&self, ratio: f64) -> Option<String> {
        let value = self.value.filter(|_| self.applicable)?;
        let slack = SOUNDNESS_RTOL * value.abs().max(ratio.abs()).max(1.0);
        match self.certificate_side {
            CertificateSide::Lower if value > ratio + slack => Some(format!(
                "lower certificate {} = {value} exceeds triangle ratio {ratio}",
                self.name
            )),
            CertificateSide::Upper if value < ratio - slack => Some(format!(
                "upper certificate {} = {value} is below triangle ratio {ratio}",
                self.name
            )),
            _ => None,
        }
    }
}

/// Which pointwise lower bound on `<x, a>_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SipLowerBound {
    /// `(||a||^2 - ||x - a||^2) / 2`, no hypotheses.
    Quadratic,
    /// `||x|| (||a|| - ||x - a||) / 2`, requires `||a|| >= ||x - a||`.
    Coarse,
    /// `||a|| (||a|| - ||x - a||)`, requires `a != 0`.
    NormGap,
}

/// Which weighted aggregate inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightedForm {
    /// `||xbar|| ||a|| + 1/2 sum p_j ||x_j - a||^2 >= 1/2 ||a||^2`
    #[serde(rename = "thm21")]
    Quadratic,
    /// `||xbar|| ||a|| + 1/2 sum p_j ||x_j|| ||x_j - a|| >= 1/2 ||a|| sum p_j ||x_j||`,
    /// requires `||x_j - a|| <= ||a||` for all `j`.
    #[serde(rename = "prop21")]
    Product,
}

impl WeightedForm {
    pub fn tag(self) -> &'static str {
        match self {
            WeightedForm::Quadratic => "thm21",
            WeightedForm::Product => "prop21",
        }
    }
}

/// Anchored reverse bounds on the triangle ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ReverseForm {
    QuadraticDeficit,
    MaxDeviation,
    NormGap,
    Rho(f64),
}

impl ReverseForm {
    pub fn name(self) -> BoundName {
        match self {
            ReverseForm::QuadraticDeficit => BoundName::QuadraticDeficit,
            ReverseForm::MaxDeviation => BoundName::MaxDeviation,
            ReverseForm::NormGap => BoundName::NormGap,
            ReverseForm::Rho(_) => BoundName::Rho,
        }
    }
}

/// Outcome of [`weighted_inequality_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Deliberate corruption of one comparison, used to prove that the soundness
/// audit catches broken bound code.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// The minimum reduction in the anchored lower bounds keeps the larger
    /// element instead of the smaller.
    MinAsMax,
}

fn min_reduce(values: impl IntoIterator<Item = f64>, fault: Option<Fault>) -> Option<f64> {
    values.into_iter().reduce(|acc, v| {
        let keep_new = match fault {
            Some(Fault::MinAsMax) => v > acc,
            None => v < acc,
        };
        if keep_new {
            v
        } else {
            acc
        }
    })
}

fn max_reduce(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    values.into_iter().reduce(f64::max)
}

/// Is `lhs <= rhs` up to the boundary slack?
fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + PRECONDITION_RTOL * lhs.abs().max(rhs.abs())
}

fn check_family(xs: &[Vector], ps: &WeightVector, n: &NormSpec) -> Result<usize> {
    let first = xs.first().ok_or(Error::EmptyFamily)?;
    if ps.len() != xs.len() {
        return Err(Error::WeightCountMismatch {
            weights: ps.len(),
            vectors: xs.len(),
        });
    }
    for x in &xs[1..] {
        first.check_same_dim(x)?;
    }
    n.check(first.dim())?;
    Ok(first.dim())
}

fn check_anchor(xs: &[Vector], ps: &WeightVector, a: &Vector, n: &NormSpec) -> Result<()> {
    check_family(xs, ps, n)?;
    xs[0].check_same_dim(a)
}

fn weighted_mean(xs: &[Vector], ps: &WeightVector) -> Vector {
    Vector::combination(ps.as_slice().iter().copied(), xs)
}

/// Lower bound for `<x, a>_i` of the requested variant.
pub fn sip_lower_bound(
    x: &Vector,
    a: &Vector,
    n: &NormSpec,
    variant: SipLowerBound,
) -> Result<f64> {
    x.check_same_dim(a)?;
    n.check(x.dim())?;
    let norm_a = n.eval_raw(a.coords());
    let dev = n.eval_raw((x - a).coords());
    match variant {
        SipLowerBound::Quadratic => Ok(0.5 * (norm_a - dev) * (norm_a + dev)),
        SipLowerBound::Coarse => {
            if !within(dev, norm_a) {
                return Err(Error::Precondition(vec![Diagnostic::global(
                    Condition::AnchorDistance,
                    format!("||x - a|| = {dev} exceeds ||a|| = {norm_a}"),
                )]));
            }
            Ok(0.5 * n.eval_raw(x.coords()) * (norm_a - dev))
        }
        SipLowerBound::NormGap => {
            if a.is_zero() {
                return Err(Error::ZeroVector("a"));
            }
            Ok(norm_a * (norm_a - dev))
        }
    }
}

/// Evaluates both sides of a weighted aggregate inequality.
pub fn weighted_inequality_check(
    xs: &[Vector],
    ps: &WeightVector,
    a: &Vector,
    n: &NormSpec,
    form: WeightedForm,
) -> Result<WeightedCheck> {
    check_anchor(xs, ps, a, n)?;
    if a.is_zero() {
        return Err(Error::ZeroVector("a"));
    }
    let norm_a = n.eval_raw(a.coords());
    let mean_term = n.eval_raw(weighted_mean(xs, ps).coords()) * norm_a;
    let devs: Vec<f64> = xs.iter().map(|x| n.eval_raw((x - a).coords())).collect();
    let weights = ps.as_slice();
    let (lhs, rhs) = match form {
        WeightedForm::Quadratic => {
            let spread: f64 = weights.iter().zip(&devs).map(|(p, d)| p * d * d).sum();
            (mean_term + 0.5 * spread, 0.5 * norm_a * norm_a)
        }
        WeightedForm::Product => {
            let violations: Vec<Diagnostic> = devs
                .iter()
                .enumerate()
                .filter(|(_, &d)| !within(d, norm_a))
                .map(|(j, d)| {
                    Diagnostic::at(
                        j,
                        Condition::AnchorDistance,
                        format!("||x_j - a|| = {d} exceeds ||a|| = {norm_a}"),
                    )
                })
                .collect();
            if !violations.is_empty() {
                return Err(Error::Precondition(violations));
            }
            let norms: Vec<f64> = xs.iter().map(|x| n.eval_raw(x.coords())).collect();
            let spread: f64 = weights
                .iter()
                .zip(norms.iter().zip(&devs))
                .map(|(p, (nx, d))| p * nx * d)
                .sum();
            let mass: f64 = weights.iter().zip(&norms).map(|(p, nx)| p * nx).sum();
            (mean_term + 0.5 * spread, 0.5 * norm_a * mass)
        }
    };
    let scale = lhs.abs().max(rhs.abs());
    Ok(WeightedCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - SOUNDNESS_RTOL * scale,
    })
}

/// `||sum p_j x_j|| / sum p_j ||x_j||`.
pub fn triangle_ratio(xs: &[Vector], ps: &WeightVector, n: &NormSpec) -> Result<f64> {
    check_family(xs, ps, n)?;
    let mass: f64 = ps
        .as_slice()
        .iter()
        .zip(xs)
        .map(|(p, x)| p * n.eval_raw(x.coords()))
        .sum();
    if mass <= 0.0 {
        return Err(Error::DegenerateRatio);
    }
    Ok(n.eval_raw(weighted_mean(xs, ps).coords()) / mass)
}

/// Anchored lower certificate for the triangle ratio.
pub fn reverse_ratio_bound(
    xs: &[Vector],
    ps: &WeightVector,
    a: &Vector,
    n: &NormSpec,
    form: ReverseForm,
) -> Result<BoundResult> {
    reverse_ratio_bound_with(xs, ps, a, n, form, None)
}

pub(crate) fn reverse_ratio_bound_with(
    xs: &[Vector],
    ps: &WeightVector,
    a: &Vector,
    n: &NormSpec,
    form: ReverseForm,
    fault: Option<Fault>,
) -> Result<BoundResult> {
    check_anchor(xs, ps, a, n)?;
    if let ReverseForm::Rho(rho) = form {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidRho(rho));
        }
    }
    let mut out = BoundResult::new(form.name(), CertificateSide::Lower);
    let norm_a = n.eval_raw(a.coords());
    if a.is_zero() {
        out.diagnostics.push(Diagnostic::global(
            Condition::ZeroAnchor,
            "anchor is the zero vector",
        ));
    }
    let norms: Vec<f64> = xs.iter().map(|x| n.eval_raw(x.coords())).collect();
    let devs: Vec<f64> = xs.iter().map(|x| n.eval_raw((x - a).coords())).collect();
    for (j, x) in xs.iter().enumerate() {
        if x.is_zero() {
            out.diagnostics.push(Diagnostic::at(
                j,
                Condition::ZeroVector,
                "vector is zero".into(),
            ));
        }
        let dev = devs[j];
        match form {
            ReverseForm::Rho(rho) => {
                let gap = norm_a - dev;
                if !within(rho * norms[j], gap) {
                    out.diagnostics.push(Diagnostic::at(
                        j,
                        Condition::RhoGap,
                        format!(
                            "||a|| - ||x_j - a|| = {gap} is below rho ||x_j|| = {}",
                            rho * norms[j]
                        ),
                    ));
                }
            }
            _ => {
                if !within(dev, norm_a) {
                    out.diagnostics.push(Diagnostic::at(
                        j,
                        Condition::AnchorDistance,
                        format!("||x_j - a|| = {dev} exceeds ||a|| = {norm_a}"),
                    ));
                }
            }
        }
    }
    let computable = norm_a > 0.0 && norms.iter().all(|&nx| nx > 0.0);
    if !computable {
        return Ok(out.finish(None));
    }

    let value = match form {
        ReverseForm::QuadraticDeficit => {
            out.terms = norms
                .iter()
                .zip(&devs)
                .map(|(nx, d)| 0.5 * (norm_a - d) * (norm_a + d) / (nx * norm_a))
                .collect();
            min_reduce(out.terms.iter().copied(), fault)
        }
        ReverseForm::MaxDeviation => {
            out.terms = devs.clone();
            max_reduce(devs.iter().copied()).map(|d| (norm_a - d) / (2.0 * norm_a))
        }
        ReverseForm::NormGap => {
            out.terms = norms
                .iter()
                .zip(&devs)
                .map(|(nx, d)| (norm_a - d) / nx)
                .collect();
            min_reduce(out.terms.iter().copied(), fault)
        }
        ReverseForm::Rho(rho) => {
            out.terms = norms
                .iter()
                .zip(&devs)
                .map(|(nx, d)| (norm_a - d) / nx)
                .collect();
            Some(rho)
        }
    };
    let value = value.map(|v| {
        if out.diagnostics.is_empty() {
            v.max(0.0)
        } else {
            v
        }
    });
    Ok(out.finish(value))
}

/// Lower (`r`) or upper (`R`) certificate anchored at `xbar = sum p_j x_j`,
/// using the conservative end of each semi-inner product enclosure.
pub fn self_anchor_bound(
    xs: &[Vector],
    ps: &WeightVector,
    n: &NormSpec,
    side: CertificateSide,
    tol: f64,
) -> Result<BoundResult> {
    check_family(xs, ps, n)?;
    let name = match side {
        CertificateSide::Lower => BoundName::SelfAnchorLower,
        CertificateSide::Upper => BoundName::SelfAnchorUpper,
    };
    let mut out = BoundResult::new(name, side);
    let mean = weighted_mean(xs, ps);
    if mean.is_zero() {
        out.diagnostics.push(Diagnostic::global(
            Condition::ZeroCombination,
            "weighted combination of the vectors is zero",
        ));
    }
    for (j, x) in xs.iter().enumerate() {
        if x.is_zero() {
            out.diagnostics.push(Diagnostic::at(
                j,
                Condition::ZeroVector,
                "vector is zero".into(),
            ));
        }
    }
    if !out.diagnostics.is_empty() {
        return Ok(out.finish(None));
    }

    let norm_mean = n.eval_raw(mean.coords());
    let mut terms = Vec::with_capacity(xs.len());
    for x in xs {
        let denom = n.eval_raw(x.coords()) * norm_mean;
        let s = match side {
            CertificateSide::Lower => sip_certified_lower(x, &mean, n, tol)?,
            CertificateSide::Upper => sip_certified_upper(x, &mean, n, tol)?,
        };
        terms.push(s / denom);
    }
    let value = match side {
        CertificateSide::Lower => min_reduce(terms.iter().copied(), None),
        CertificateSide::Upper => max_reduce(terms.iter().copied()),
    };
    out.terms = terms;
    if let Some(v) = value {
        match side {
            CertificateSide::Lower if v <= 0.0 => out.diagnostics.push(Diagnostic::global(
                Condition::NonPositiveConstant,
                format!("r = {v} is not positive"),
            )),
            CertificateSide::Upper if v >= 1.0 - PRECONDITION_RTOL => {
                out.diagnostics.push(Diagnostic::global(
                    Condition::ConstantNotBelowOne,
                    format!("R = {v} is not below one"),
                ))
            }
            _ => {}
        }
    }
    Ok(out.finish(value))
}

/// How anchors for the anchored bounds are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum AnchorStrategy {
    /// The weighted combination `sum p_j x_j`.
    Mean,
    /// One of the input vectors.
    Index(usize),
    Coords(Vector),
    List(Vec<Vector>),
}

impl AnchorStrategy {
    pub fn resolve(&self, xs: &[Vector], ps: &WeightVector) -> Result<Vec<Vector>> {
        match self {
            AnchorStrategy::Mean => {
                if xs.is_empty() {
                    return Err(Error::EmptyFamily);
                }
                Ok(vec![weighted_mean(xs, ps)])
            }
            AnchorStrategy::Index(k) => {
                xs.get(*k)
                    .cloned()
                    .map(|a| vec![a])
                    .ok_or(Error::AnchorIndex {
                        index: *k,
                        count: xs.len(),
                    })
            }
            AnchorStrategy::Coords(a) => Ok(vec![a.clone()]),
            AnchorStrategy::List(list) => Ok(list.clone()),
        }
    }
}

/// Options for [`best_lower_bound`].
#[derive(Clone, Debug)]
pub struct BoundOptions {
    /// Stopping tolerance for numeric semi-inner products.
    pub tol: f64,
    /// Bounds to evaluate; `rho` is only evaluated when `rho` is set.
    pub bounds: Vec<BoundName>,
    pub rho: Option<f64>,
    #[doc(hidden)]
    pub fault: Option<Fault>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            tol: DEFAULT_TOL,
            bounds: BoundName::ALL.to_vec(),
            rho: None,
            fault: None,
        }
    }
}

/// Every evaluated bound for one weighted family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub ratio: f64,
    pub anchors: Vec<Vector>,
    pub results: Vec<BoundResult>,
    pub best_lower: Option<BoundResult>,
    pub upper_refinement: Option<BoundResult>,
}

impl BoundReport {
    /// Applicable certificates that contradict the ratio. Nonempty output
    /// means the implementation is broken, since the inequalities hold
    /// whenever their hypotheses do.
    pub fn soundness_violations(&self) -> Vec<String> {
        self.results
            .iter()
            .filter_map(|r| r.soundness_violation(self.ratio))
            .collect()
    }
}

/// Evaluates the anchored bounds for every anchor and both self-anchored
/// bounds, keeping the largest applicable lower certificate.
pub fn best_lower_bound(
    xs: &[Vector],
    ps: &WeightVector,
    n: &NormSpec,
    anchors: &AnchorStrategy,
    options: &BoundOptions,
) -> Result<BoundReport> {
    let ratio = triangle_ratio(xs, ps, n)?;
    let anchors = anchors.resolve(xs, ps)?;
    let wanted = |b: BoundName| options.bounds.contains(&b);

    let mut forms = Vec::new();
    if wanted(BoundName::QuadraticDeficit) {
        forms.push(ReverseForm::QuadraticDeficit);
    }
    if wanted(BoundName::MaxDeviation) {
        forms.push(ReverseForm::MaxDeviation);
    }
    if wanted(BoundName::NormGap) {
        forms.push(ReverseForm::NormGap);
    }
    if let (true, Some(rho)) = (wanted(BoundName::Rho), options.rho) {
        forms.push(ReverseForm::Rho(rho));
    }

    let mut results = Vec::new();
    for (i, a) in anchors.iter().enumerate() {
        for &form in &forms {
            let mut r = reverse_ratio_bound_with(xs, ps, a, n, form, options.fault)?;
            r.anchor = Some(i);
            results.push(r);
        }
    }
    if wanted(BoundName::SelfAnchorLower) {
        results.push(self_anchor_bound(
            xs,
            ps,
            n,
            CertificateSide::Lower,
            options.tol,
        )?);
    }
    if wanted(BoundName::SelfAnchorUpper) {
        results.push(self_anchor_bound(
            xs,
            ps,
            n,
            CertificateSide::Upper,
            options.tol,
        )?);
    }

    let best_lower = results
        .iter()
        .filter(|r| r.applicable && r.certificate_side == CertificateSide::Lower)
        .filter_map(|r| r.value.map(|v| (v, r)))
        .fold(None::<(f64, &BoundResult)>, |best, (v, r)| match best {
            Some((bv, _)) if bv >= v => best,
            _ => Some((v, r)),
        })
        .map(|(_, r)| r.clone());
    let upper_refinement = results
        .iter()
        .filter(|r| r.applicable && r.certificate_side == CertificateSide::Upper)
        .filter_map(|r| r.value.map(|v| (v, r)))
        .fold(None::<(f64, &BoundResult)>, |best, (v, r)| match best {
            Some((bv, _)) if bv <= v => best,
            _ => Some((v, r)),
        })
        .map(|(_, r)| r.clone());

    Ok(BoundReport {
        ratio,
        anchors,
        results,
        best_lower,
        upper_refinement,
    })
}
