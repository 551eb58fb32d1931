//! Superior and inferior semi-inner products.
//!
//! For a norm on `R^d` the map `t -> ||y + t x||^2 / 2` is convex, so the
//! difference quotient
//!
//! ```text
//! q(t) = (||y + t x||^2 - ||y||^2) / (2 t)
//! ```
//!
//! is nondecreasing in `t`. Its left limit at zero is the inferior
//! semi-inner product `<x, y>_i` and its right limit the superior one
//! `<x, y>_s`, hence `q(s) <= <x, y>_i <= <x, y>_s <= q(t)` for `s < 0 < t`.
//!
//! `lp` norms (weighted or not, `p <= 64` or `p = inf`) get exact one-sided
//! derivatives. Everything else goes through a shrinking-step bracket built
//! from that monotonicity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{LpShape, NormSpec, Vector};

/// Step shrink factor between successive difference quotients.
pub const SHRINK: f64 = 4.0;
/// Maximum number of step reductions on either side.
pub const MAX_REDUCTIONS: u32 = 40;
/// Relative tolerance used to decide ties in `argmax |y_k|` for the max norm.
pub const ARGMAX_RTOL: f64 = 1e-12;
/// Default stopping tolerance for numeric enclosures, relative to `||x|| ||y||`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative rounding allowance on `||y + t x|| - ||y||`, in units of
/// `||y + t x|| + ||y||`. Numeric endpoints are widened by it.
const ROUNDOFF: f64 = 2.0 * f64::EPSILON;

/// Side of a one-sided derivative at zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Minus => -1.0,
            Side::Plus => 1.0,
        }
    }
}

/// Which semi-inner product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Inferior,
    Superior,
}

impl Which {
    pub fn side(self) -> Side {
        match self {
            Which::Inferior => Side::Minus,
            Which::Superior => Side::Plus,
        }
    }

    /// The other semi-inner product.
    pub fn flip(self) -> Which {
        match self {
            Which::Inferior => Which::Superior,
            Which::Superior => Which::Inferior,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Numeric,
}

/// Interval `[lo, hi]` known to contain a semi-inner product.
///
/// A closed-form enclosure is degenerate. A numeric enclosure brackets both
/// semi-inner products at once: `lo <= <x,y>_i <= <x,y>_s <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
    pub method: Method,
    pub smooth_detected: bool,
    pub iterations: u32,
}

impl Enclosure {
    fn exact(value: f64) -> Self {
        Enclosure {
            lo: value,
            hi: value,
            method: Method::ClosedForm,
            smooth_detected: true,
            iterations: 0,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }

    /// Best point estimate of the requested product: the value itself for a
    /// closed form, otherwise the endpoint on the matching side.
    pub fn point(&self, which: Which) -> f64 {
        match (self.method, which) {
            (Method::ClosedForm, _) => self.lo,
            (Method::Numeric, Which::Inferior) => self.lo,
            (Method::Numeric, Which::Superior) => self.hi,
        }
    }
}

/// Arguments of a semi-inner product evaluation.
#[derive(Clone, Copy, Debug)]
pub struct SipQuery<'a> {
    pub x: &'a Vector,
    pub y: &'a Vector,
    pub norm: &'a NormSpec,
    pub which: Which,
    pub tol: f64,
}

impl<'a> SipQuery<'a> {
    pub fn new(x: &'a Vector, y: &'a Vector, norm: &'a NormSpec, which: Which) -> Self {
        SipQuery {
            x,
            y,
            norm,
            which,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        self.x.check_same_dim(self.y)?;
        self.norm.check(self.x.dim())?;
        check_tol(self.tol)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

fn check_pair(x: &Vector, y: &Vector, n: &NormSpec) -> Result<()> {
    x.check_same_dim(y)?;
    n.check(x.dim())
}

/// `q(t) = (||y+tx||^2 - ||y||^2) / (2t)`, evaluated as
/// `(||y+tx|| - ||y||)(||y+tx|| + ||y||) / (2t)`.
pub fn diff_quotient(x: &Vector, y: &Vector, n: &NormSpec, t: f64) -> Result<f64> {
    check_pair(x, y, n)?;
    if t == 0.0 {
        return Err(Error::ZeroStep);
    }
    let norm_y = n.eval_raw(y.coords());
    Ok(quotient(x, y, n, norm_y, t)?.0)
}

/// Returns the quotient at `t` and a bound on its rounding error.
fn quotient(x: &Vector, y: &Vector, n: &NormSpec, norm_y: f64, t: f64) -> Result<(f64, f64)> {
    let shifted = y.offset(t, x);
    if !shifted.is_finite() {
        return Err(Error::NonFinite("y + t x"));
    }
    let norm_shift = n.eval_raw(shifted.coords());
    let sum = norm_shift + norm_y;
    let q = (norm_shift - norm_y) * sum / (2.0 * t);
    if !q.is_finite() {
        return Err(Error::NonFinite("difference quotient"));
    }
    Ok((q, ROUNDOFF * sum * sum / (2.0 * t.abs())))
}

/// One-sided derivative of `s -> ||y + s x||` at zero.
///
/// Exact for `lp`-type norms; other norms use the numeric bracket and
/// return its endpoint on the requested side divided by `||y||`.
pub fn tau_one_sided(x: &Vector, y: &Vector, n: &NormSpec, side: Side) -> Result<f64> {
    check_pair(x, y, n)?;
    if y.is_zero() {
        return Err(Error::ZeroVector("y"));
    }
    if let Some((tau, _)) = closed_form(x, y, n, side) {
        return Ok(tau);
    }
    let enc = numeric_enclosure(x, y, n, DEFAULT_TOL)?;
    let norm_y = n.eval_raw(y.coords());
    let endpoint = match side {
        Side::Minus => enc.lo,
        Side::Plus => enc.hi,
    };
    Ok(endpoint / norm_y)
}

/// Exact `(tau, <x,y>)` on the requested side, for nonzero `y` and norms
/// with a known derivative.
fn closed_form(x: &Vector, y: &Vector, n: &NormSpec, side: Side) -> Option<(f64, f64)> {
    let shape = n.lp_shape()?;
    let u = n.to_plain_coords(x.coords());
    let w = n.to_plain_coords(y.coords());
    let pairs = || u.iter().copied().zip(w.iter().copied());
    match shape {
        LpShape::Two => {
            let max = w.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let norm = max * w.iter().map(|c| (c / max) * (c / max)).sum::<f64>().sqrt();
            let dot: f64 = pairs().map(|(a, b)| a * b).sum();
            Some((dot / norm, dot))
        }
        LpShape::One => {
            let (mut smooth, mut kink) = (0.0, 0.0);
            for (a, b) in pairs() {
                if b == 0.0 {
                    kink += a.abs();
                } else {
                    smooth += b.signum() * a;
                }
            }
            let tau = smooth + side.sign() * kink;
            let norm: f64 = w.iter().map(|c| c.abs()).sum();
            Some((tau, tau * norm))
        }
        LpShape::Power(p) => {
            let norm = n.eval_raw(y.coords());
            let tau: f64 = pairs()
                .filter(|&(_, b)| b != 0.0)
                .map(|(a, b)| (b.abs() / norm).powf(p - 1.0) * b.signum() * a)
                .sum();
            Some((tau, tau * norm))
        }
        LpShape::Max => {
            let norm = w.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
            let cutoff = norm - ARGMAX_RTOL * norm;
            let candidates = pairs()
                .filter(|&(_, b)| b.abs() >= cutoff)
                .map(|(a, b)| b.signum() * a);
            let tau = match side {
                Side::Minus => candidates.fold(f64::INFINITY, f64::min),
                Side::Plus => candidates.fold(f64::NEG_INFINITY, f64::max),
            };
            Some((tau, tau * norm))
        }
    }
}

/// Semi-inner product enclosure, using the exact derivative when the norm
/// admits one.
///
/// `y = 0` yields the exact enclosure `[0, 0]` for both products.
pub fn sip(q: &SipQuery<'_>) -> Result<Enclosure> {
    q.validate()?;
    if q.y.is_zero() {
        return Ok(Enclosure::exact(0.0));
    }
    match closed_form(q.x, q.y, q.norm, q.which.side()) {
        Some((_, value)) if value.is_finite() => Ok(Enclosure::exact(value)),
        Some(_) => Err(Error::NonFinite("closed-form semi-inner product")),
        None => numeric_enclosure(q.x, q.y, q.norm, q.tol),
    }
}

/// Numeric bracket `[lo, hi]` around both semi-inner products, regardless of
/// whether the norm has a closed form.
///
/// Each side shrinks `t_k = t0 / 4^k` from `t0 = ||y|| / ||x||`, at most 40
/// times. It stops early once its quotient moves by less than
/// `tol * ||x|| ||y||` or once the widened quotient stops improving. The
/// returned endpoints are the best widened quotients seen.
pub fn sip_numeric(x: &Vector, y: &Vector, n: &NormSpec, tol: f64) -> Result<Enclosure> {
    check_pair(x, y, n)?;
    check_tol(tol)?;
    if y.is_zero() {
        return Ok(Enclosure {
            method: Method::Numeric,
            ..Enclosure::exact(0.0)
        });
    }
    numeric_enclosure(x, y, n, tol)
}

fn numeric_enclosure(x: &Vector, y: &Vector, n: &NormSpec, tol: f64) -> Result<Enclosure> {
    let norm_y = n.eval_raw(y.coords());
    let norm_x = n.eval_raw(x.coords());
    if norm_x == 0.0 {
        return Ok(Enclosure {
            lo: 0.0,
            hi: 0.0,
            method: Method::Numeric,
            smooth_detected: true,
            iterations: 0,
        });
    }
    let t0 = if norm_y > 0.0 { norm_y / norm_x } else { 1.0 };
    let tol = tol * norm_x * norm_y;
    let (mut lo, k_lo) = one_sided(x, y, n, norm_y, t0, tol, Side::Minus)?;
    let (mut hi, k_hi) = one_sided(x, y, n, norm_y, t0, tol, Side::Plus)?;
    if lo > hi {
        // only reachable through rounding when both limits coincide
        let mid = 0.5 * (lo + hi);
        lo = mid;
        hi = mid;
    }
    Ok(Enclosure {
        lo,
        hi,
        method: Method::Numeric,
        smooth_detected: hi - lo <= tol,
        iterations: k_lo.max(k_hi),
    })
}

fn one_sided(
    x: &Vector,
    y: &Vector,
    n: &NormSpec,
    norm_y: f64,
    t0: f64,
    tol: f64,
    side: Side,
) -> Result<(f64, u32)> {
    let sign = side.sign();
    // minus side climbs toward <x,y>_i, plus side descends toward <x,y>_s
    let better = |a: f64, b: f64| if sign < 0.0 { a > b } else { a < b };
    let mut best: Option<f64> = None;
    let mut prev_raw: Option<f64> = None;
    let mut step = t0;
    let mut iterations = 0;
    for k in 0..=MAX_REDUCTIONS {
        let (raw, err) = quotient(x, y, n, norm_y, sign * step)?;
        let widened = raw + sign * err;
        match best {
            Some(b) if !better(widened, b) => break,
            _ => {
                best = Some(widened);
                iterations = k;
            }
        }
        if prev_raw.is_some_and(|p| (raw - p).abs() < tol) {
            break;
        }
        prev_raw = Some(raw);
        step /= SHRINK;
    }
    Ok((best.expect("at least one step"), iterations))
}

/// Certified lower bound for `<x, y>_i`: the low end of the inferior
/// enclosure.
pub fn sip_certified_lower(x: &Vector, y: &Vector, n: &NormSpec, tol: f64) -> Result<f64> {
    sip(&SipQuery::new(x, y, n, Which::Inferior).with_tol(tol)).map(|e| e.lo)
}

/// Certified upper bound for `<x, y>_s`: the high end of the superior
/// enclosure.
pub fn sip_certified_upper(x: &Vector, y: &Vector, n: &NormSpec, tol: f64) -> Result<f64> {
    sip(&SipQuery::new(x, y, n, Which::Superior).with_tol(tol)).map(|e| e.hi)
}

/// Point value of a semi-inner product at the default tolerance.
pub fn sip_value(x: &Vector, y: &Vector, n: &NormSpec, which: Which) -> Result<f64> {
    sip(&SipQuery::new(x, y, n, which)).map(|e| e.point(which))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn l1() -> NormSpec {
        NormSpec::lp(1.0).unwrap()
    }

    fn l2() -> NormSpec {
        NormSpec::lp(2.0).unwrap()
    }

    /// Independent one-sided derivative of the norm by a plain quotient.
    fn tau_oracle(x: &Vector, y: &Vector, n: &NormSpec, t: f64) -> f64 {
        let ny = n.eval(y).unwrap();
        (n.eval(&y.offset(t, x)).unwrap() - ny) / t
    }

    #[test]
    fn quotient_examples() {
        let e1 = v(&[1.0, 0.0]);
        assert_eq!(diff_quotient(&e1, &e1, &l2(), 1.0).unwrap(), 1.5);
        assert_eq!(diff_quotient(&e1, &e1, &l2(), -0.5).unwrap(), 0.75);
        let e2 = v(&[0.0, 1.0]);
        assert_eq!(diff_quotient(&e2, &e1, &l1(), 1.0).unwrap(), 1.5);
        assert_eq!(diff_quotient(&e2, &e1, &l1(), 0.0), Err(Error::ZeroStep));
    }

    #[test]
    fn tau_l1_examples() {
        let x = v(&[1.0, -2.0]);
        let y = v(&[3.0, 0.0]);
        let minus = tau_one_sided(&x, &y, &l1(), Side::Minus).unwrap();
        let plus = tau_one_sided(&x, &y, &l1(), Side::Plus).unwrap();
        assert_eq!(minus, -1.0);
        assert_eq!(plus, 3.0);
        assert!((tau_oracle(&x, &y, &l1(), -1e-6) - minus).abs() < 1e-6);
        assert!((tau_oracle(&x, &y, &l1(), 1e-6) - plus).abs() < 1e-6);
    }

    #[test]
    fn tau_max_norm_ties() {
        let x = v(&[1.0, 0.0, 3.0]);
        let y = v(&[2.0, -2.0, 1.0]);
        let n = NormSpec::lp_inf();
        let plus = tau_one_sided(&x, &y, &n, Side::Plus).unwrap();
        let minus = tau_one_sided(&x, &y, &n, Side::Minus).unwrap();
        assert_eq!((plus, minus), (1.0, 0.0));
        assert!((tau_oracle(&x, &y, &n, 1e-6) - plus).abs() < 1e-6);
        assert!((tau_oracle(&x, &y, &n, -1e-6) - minus).abs() < 1e-6);
    }

    #[test]
    fn tau_requires_nonzero_y() {
        let x = v(&[1.0]);
        assert_eq!(
            tau_one_sided(&x, &v(&[0.0]), &l2(), Side::Plus),
            Err(Error::ZeroVector("y"))
        );
    }

    #[test]
    fn inner_product_space_collapses() {
        let x = v(&[1.0, 2.0]);
        let y = v(&[3.0, 4.0]);
        for which in [Which::Inferior, Which::Superior] {
            let e = sip(&SipQuery::new(&x, &y, &l2(), which)).unwrap();
            assert_eq!(e.method, Method::ClosedForm);
            assert!((e.lo - 11.0).abs() < 1e-12 && e.lo == e.hi);
        }
        let num = sip_numeric(&x, &y, &l2(), 1e-10).unwrap();
        assert!(num.contains(11.0));
        assert!(num.width() < 1e-6 * 11.0, "{num:?}");
    }

    #[test]
    fn l1_gap_and_numeric_bracket() {
        let x = v(&[1.0, -2.0]);
        let y = v(&[3.0, 0.0]);
        assert_eq!(sip_value(&x, &y, &l1(), Which::Inferior).unwrap(), -3.0);
        assert_eq!(sip_value(&x, &y, &l1(), Which::Superior).unwrap(), 9.0);
        let num = sip_numeric(&x, &y, &l1(), 1e-12).unwrap();
        assert!(num.lo <= -3.0 && num.hi >= 9.0);
        assert!((num.lo + 3.0).abs() < 1e-6 && (num.hi - 9.0).abs() < 1e-6);
        assert!(!num.smooth_detected);
    }

    #[test]
    fn certified_endpoints() {
        let x = v(&[1.0, 1.0]);
        let lo = sip_certified_lower(&x, &x, &l1(), 1e-9).unwrap();
        let hi = sip_certified_upper(&x, &x, &l1(), 1e-9).unwrap();
        assert!(lo <= 4.0 && 4.0 <= hi);
        assert!((lo - 4.0).abs() < 1e-9 && (hi - 4.0).abs() < 1e-9);

        let num = sip_numeric(&v(&[0.0, 1.0]), &v(&[1.0, 0.0]), &l1(), 1e-12).unwrap();
        assert!((num.lo + 1.0).abs() < 1e-6 && (num.hi - 1.0).abs() < 1e-6);
        assert!(num.lo <= -1.0 && num.hi >= 1.0);
        assert!(!num.smooth_detected);

        let zero = v(&[0.0, 0.0]);
        assert_eq!(
            sip_certified_lower(&v(&[1.0, 0.0]), &zero, &l2(), 1e-9),
            Ok(0.0)
        );
        assert_eq!(
            sip_certified_upper(&v(&[1.0, 0.0]), &zero, &l2(), 1e-9),
            Ok(0.0)
        );
    }

    #[test]
    fn scaled_anchor_equality() {
        let a = v(&[2.0, 0.0]);
        let x = 0.5 * &a;
        assert_eq!(sip_value(&x, &a, &l2(), Which::Inferior).unwrap(), 2.0);
    }

    #[test]
    fn invalid_queries() {
        let x = v(&[1.0, 0.0]);
        let y = v(&[1.0]);
        assert!(matches!(
            sip(&SipQuery::new(&x, &y, &l2(), Which::Inferior)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            sip(&SipQuery::new(&x, &x, &l2(), Which::Inferior).with_tol(0.0)),
            Err(Error::InvalidTolerance(0.0))
        );
        let huge = v(&[f64::MAX, f64::MAX]);
        assert!(matches!(
            diff_quotient(&huge, &huge, &l2(), 1.0),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn large_exponent_routes_to_numeric() {
        let n = NormSpec::lp(100.0).unwrap();
        let x = v(&[0.3, -1.0, 0.2]);
        let y = v(&[1.0, 0.5, -0.25]);
        let e = sip(&SipQuery::new(&x, &y, &n, Which::Superior)).unwrap();
        assert_eq!(e.method, Method::Numeric);
        let q_lo = diff_quotient(&x, &y, &n, -1e-3).unwrap();
        let q_hi = diff_quotient(&x, &y, &n, 1e-3).unwrap();
        assert!(q_lo <= e.lo && e.hi <= q_hi);
    }

    #[test]
    fn weighted_closed_form_matches_numeric() {
        let n = NormSpec::weighted_lp(3.0, vec![1.0, 2.0, 0.5]).unwrap();
        let x = v(&[0.3, -1.0, 0.2]);
        let y = v(&[1.0, 0.5, -0.25]);
        let exact = sip_value(&x, &y, &n, Which::Inferior).unwrap();
        let num = sip_numeric(&x, &y, &n, 1e-10).unwrap();
        assert!(num.contains(exact), "{num:?} vs {exact}");
        let winf = NormSpec::weighted_lp(f64::INFINITY, vec![1.0, 2.0, 4.0]).unwrap();
        for which in [Which::Inferior, Which::Superior] {
            let exact = sip_value(&x, &y, &winf, which).unwrap();
            assert!(sip_numeric(&x, &y, &winf, 1e-10).unwrap().contains(exact));
        }
    }
}
