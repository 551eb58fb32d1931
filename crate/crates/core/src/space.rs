//! Finite-dimensional real normed spaces: coordinate vectors and the norms
//! every other module evaluates against.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest finite exponent for which `lp` evaluation stays on the power path
/// in closed-form semi-inner products. Beyond this the derivative formula is
/// badly conditioned.
pub const CLOSED_FORM_MAX_EXPONENT: f64 = 64.0;

/// Default number of random trials used to vet a custom norm.
pub const DEFAULT_VALIDATION_TRIALS: usize = 256;

const AXIOM_RTOL: f64 = 1e-9;

/// A finite real coordinate vector of dimension at least one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index, value });
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Vector(vec![0.0; dim])
    }

    /// The `k`-th standard basis vector.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self + t * x`, the point on the line through `self` in direction `x`.
    pub fn offset(&self, t: f64, x: &Vector) -> Vector {
        assert_eq!(self.dim(), x.dim(), "dimension mismatch");
        Vector(self.0.iter().zip(&x.0).map(|(y, x)| y + t * x).collect())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Weighted combination `sum_j p_j x_j` over equally sized vectors.
    pub fn combination<'a>(
        weights: impl IntoIterator<Item = f64>,
        vectors: impl IntoIterator<Item = &'a Vector>,
    ) -> Vector {
        let mut acc: Option<Vec<f64>> = None;
        for (p, v) in weights.into_iter().zip(vectors) {
            let acc = acc.get_or_insert_with(|| vec![0.0; v.dim()]);
            assert_eq!(acc.len(), v.dim(), "dimension mismatch");
            for (a, c) in acc.iter_mut().zip(&v.0) {
                *a += p * c;
            }
        }
        Vector(acc.expect("combination of an empty family"))
    }

    pub(crate) fn check_same_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.offset(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.offset(-1.0, rhs)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        Vector(rhs.0.iter().map(|c| self * c).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|c| -c).collect())
    }
}

/// Exponent of an `lp` norm. `p = inf` is its own case so it never goes
/// through `powf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    /// Accepts any `p >= 1`, mapping `f64::INFINITY` to [`Exponent::Infinity`].
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    fn validate(self) -> Result<Self> {
        match self {
            Exponent::Finite(p) => Exponent::new(p),
            Exponent::Infinity => Ok(self),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A user-supplied norm. Only obtainable through [`NormSpec::custom`], which
/// vets the axioms first.
#[derive(Clone)]
pub struct CustomNorm {
    name: String,
    eval: Arc<Evaluator>,
}

impl CustomNorm {
    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNorm")
            .field("name", &self.name)
            .finish()
    }
}

/// Description of the norm on `R^d`.
#[derive(Clone, Debug)]
pub enum NormSpec {
    /// `(sum |v_k|^p)^(1/p)`, or `max |v_k|`.
    Lp(Exponent),
    /// `(sum w_k |v_k|^p)^(1/p)`, or `max w_k |v_k|`.
    WeightedLp {
        p: Exponent,
        weights: Vec<f64>,
    },
    Custom(CustomNorm),
}

/// Internal classification used to pick a closed-form derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum LpShape {
    One,
    Two,
    Power(f64),
    Max,
}

impl NormSpec {
    pub fn lp(p: f64) -> Result<Self> {
        Ok(NormSpec::Lp(Exponent::new(p)?))
    }

    pub fn lp_inf() -> Self {
        NormSpec::Lp(Exponent::Infinity)
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        let p = Exponent::new(p)?;
        check_weights(&weights)?;
        Ok(NormSpec::WeightedLp { p, weights })
    }

    /// Wraps an arbitrary evaluator after checking the norm axioms on
    /// `DEFAULT_VALIDATION_TRIALS` sampled vectors of dimension `dim`.
    pub fn custom<F>(name: impl Into<String>, dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::custom_with_trials(name, dim, DEFAULT_VALIDATION_TRIALS, eval)
    }

    pub fn custom_with_trials<F>(
        name: impl Into<String>,
        dim: usize,
        trials: usize,
        eval: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        let spec = NormSpec::Custom(CustomNorm {
            name: name.into(),
            eval: Arc::new(eval),
        });
        let violations = validate_norm(&spec, dim, trials);
        if violations.is_empty() {
            Ok(spec)
        } else {
            let NormSpec::Custom(c) = spec else {
                unreachable!()
            };
            Err(Error::CustomNormRejected {
                name: c.name,
                violations,
            })
        }
    }

    /// Checks that the norm is well formed and can act on vectors of `dim`
    /// coordinates.
    pub fn check(&self, dim: usize) -> Result<()> {
        match self {
            NormSpec::Lp(p) => p.validate().map(|_| ()),
            NormSpec::WeightedLp { p, weights } => {
                p.validate()?;
                check_weights(weights)?;
                if weights.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: weights.len(),
                        found: dim,
                    });
                }
                Ok(())
            }
            NormSpec::Custom(_) => Ok(()),
        }
    }

    /// `||v||`. See [`norm_eval`] for the checked entry point.
    pub fn eval(&self, v: &Vector) -> Result<f64> {
        self.check(v.dim())?;
        Ok(self.eval_raw(v.coords()))
    }

    /// Evaluates without validation. Callers must have run [`NormSpec::check`].
    pub(crate) fn eval_raw(&self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Lp(p) => lp_norm(v.iter().map(|c| c.abs()), *p),
            NormSpec::WeightedLp { p, weights } => lp_norm(weighted_magnitudes(v, weights, *p), *p),
            NormSpec::Custom(c) => (c.eval)(v),
        }
    }

    /// Closed-form shape of the norm after the weighting transform, if any.
    pub(crate) fn lp_shape(&self) -> Option<LpShape> {
        let p = match self {
            NormSpec::Lp(p) | NormSpec::WeightedLp { p, .. } => *p,
            NormSpec::Custom(_) => return None,
        };
        match p {
            Exponent::Infinity => Some(LpShape::Max),
            Exponent::Finite(1.0) => Some(LpShape::One),
            Exponent::Finite(2.0) => Some(LpShape::Two),
            Exponent::Finite(p) if p <= CLOSED_FORM_MAX_EXPONENT => Some(LpShape::Power(p)),
            Exponent::Finite(_) => None,
        }
    }

    /// Maps `v` to coordinates in which the norm is the plain `lp` norm.
    /// Identity for unweighted norms.
    pub(crate) fn to_plain_coords(&self, v: &[f64]) -> Vec<f64> {
        match self {
            NormSpec::WeightedLp { p, weights } => {
                let scale = |w: f64| match p {
                    Exponent::Finite(p) => w.powf(1.0 / p),
                    Exponent::Infinity => w,
                };
                v.iter().zip(weights).map(|(c, &w)| scale(w) * c).collect()
            }
            _ => v.to_vec(),
        }
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::Lp(p) => write!(f, "lp:{p}"),
            NormSpec::WeightedLp { p, weights } => {
                write!(f, "wlp:{p}:")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            NormSpec::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::EmptyVector);
    }
    match weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        Some((index, &value)) => Err(Error::InvalidNormWeight { index, value }),
        None => Ok(()),
    }
}

fn weighted_magnitudes<'a>(
    v: &'a [f64],
    weights: &'a [f64],
    p: Exponent,
) -> impl Iterator<Item = f64> + Clone + 'a {
    v.iter().zip(weights).map(move |(c, &w)| match p {
        Exponent::Finite(1.0) => w * c.abs(),
        Exponent::Finite(p) => w.powf(1.0 / p) * c.abs(),
        Exponent::Infinity => w * c.abs(),
    })
}

/// `lp` norm of a sequence of magnitudes, rescaled by the largest one so the
/// powers cannot overflow or underflow.
fn lp_norm<I>(mags: I, p: Exponent) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let max = mags.clone().fold(0.0_f64, f64::max);
    match p {
        Exponent::Infinity => max,
        Exponent::Finite(1.0) => mags.sum(),
        _ if max == 0.0 => 0.0,
        Exponent::Finite(2.0) => max * mags.map(|m| (m / max) * (m / max)).sum::<f64>().sqrt(),
        Exponent::Finite(p) => max * mags.map(|m| (m / max).powf(p)).sum::<f64>().powf(1.0 / p),
    }
}

/// `||v||` for the given norm.
pub fn norm_eval(v: &Vector, n: &NormSpec) -> Result<f64> {
    n.eval(v)
}

/// Norm axiom that a [`NormViolation`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    /// The norm could not be evaluated at all (bad exponent, wrong dimension).
    WellFormed,
    Positivity,
    Homogeneity,
    TriangleInequality,
}

/// A witnessed failure of one norm axiom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormViolation {
    pub axiom: Axiom,
    /// The offending inputs: `[v]` for positivity, `[v, alpha * v]` for
    /// homogeneity, `[u, v]` for the triangle inequality.
    pub witness: Vec<Vec<f64>>,
    pub detail: String,
}

impl fmt::Display for NormViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} at {:?}: {}", self.axiom, self.witness, self.detail)
    }
}

/// Samples vectors in `R^sample_dim` and reports the axioms the norm breaks.
///
/// Standard basis vectors and their pairwise sums and differences are probed
/// before `trials` random triples. Only the first witness per axiom is kept.
/// An empty list means nothing was found.
pub fn validate_norm(n: &NormSpec, sample_dim: usize, trials: usize) -> Vec<NormViolation> {
    let mut found: Vec<NormViolation> = Vec::new();
    if sample_dim == 0 {
        return vec![NormViolation {
            axiom: Axiom::WellFormed,
            witness: vec![],
            detail: "sample dimension must be positive".into(),
        }];
    }
    if let Err(e) = n.check(sample_dim) {
        return vec![NormViolation {
            axiom: Axiom::WellFormed,
            witness: vec![],
            detail: e.to_string(),
        }];
    }

    let mut record = |v: NormViolation| {
        if !found.iter().any(|f| f.axiom == v.axiom) {
            found.push(v);
        }
    };
    let eval = |v: &[f64]| n.eval_raw(v);

    let check_positive = |v: &[f64], record: &mut dyn FnMut(NormViolation)| {
        let value = eval(v);
        let nonzero = v.iter().any(|&c| c != 0.0);
        if !value.is_finite()
            || value < 0.0
            || (nonzero && value <= 0.0)
            || (!nonzero && value != 0.0)
        {
            record(NormViolation {
                axiom: Axiom::Positivity,
                witness: vec![v.to_vec()],
                detail: format!("norm evaluated to {value}"),
            });
        }
    };
    let check_triangle = |u: &[f64], v: &[f64], record: &mut dyn FnMut(NormViolation)| {
        let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
        let (nu, nv, ns) = (eval(u), eval(v), eval(&sum));
        if ns > nu + nv + AXIOM_RTOL * (nu + nv).max(f64::MIN_POSITIVE) {
            record(NormViolation {
                axiom: Axiom::TriangleInequality,
                witness: vec![u.to_vec(), v.to_vec()],
                detail: format!("||u+v|| = {ns} exceeds ||u|| + ||v|| = {}", nu + nv),
            });
        }
    };
    let check_homogeneous = |v: &[f64], alpha: f64, record: &mut dyn FnMut(NormViolation)| {
        let scaled: Vec<f64> = v.iter().map(|c| alpha * c).collect();
        let expected = alpha.abs() * eval(v);
        let got = eval(&scaled);
        let scale = expected.abs().max(got.abs()).max(f64::MIN_POSITIVE);
        if (got - expected).abs() > AXIOM_RTOL * scale || got.is_nan() {
            record(NormViolation {
                axiom: Axiom::Homogeneity,
                witness: vec![v.to_vec(), scaled],
                detail: format!("||alpha v|| = {got} but |alpha| ||v|| = {expected}"),
            });
        }
    };

    let basis: Vec<Vec<f64>> = (0..sample_dim)
        .map(|k| Vector::basis(sample_dim, k).into_coords())
        .collect();
    check_positive(&vec![0.0; sample_dim], &mut record);
    for e in &basis {
        check_positive(e, &mut record);
        check_homogeneous(e, -2.5, &mut record);
    }
    for (i, ei) in basis.iter().enumerate() {
        for ej in &basis[i + 1..] {
            let diff: Vec<f64> = ei.iter().zip(ej).map(|(a, b)| a - b).collect();
            let sum: Vec<f64> = ei.iter().zip(ej).map(|(a, b)| a + b).collect();
            check_positive(&diff, &mut record);
            check_positive(&sum, &mut record);
            check_triangle(ei, ej, &mut record);
            let neg: Vec<f64> = ej.iter().map(|c| -c).collect();
            check_triangle(ei, &neg, &mut record);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6f_726d ^ sample_dim as u64);
    for _ in 0..trials {
        let u = random_coords(&mut rng, sample_dim);
        let v = random_coords(&mut rng, sample_dim);
        let alpha = rng.gen_range(-4.0..4.0);
        check_positive(&u, &mut record);
        check_homogeneous(&u, alpha, &mut record);
        check_triangle(&u, &v, &mut record);
    }
    found
}

fn random_coords(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let magnitude = 10f64.powf(rng.gen_range(-3.0..3.0));
    (0..dim)
        .map(|_| {
            if rng.gen_bool(0.2) {
                0.0
            } else {
                magnitude * rng.gen_range(-1.0..1.0)
            }
        })
        .collect()
}
