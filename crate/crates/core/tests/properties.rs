mod common;

use common::{Kind, KINDS};
use normsip::bounds::{
    best_lower_bound, reverse_ratio_bound, self_anchor_bound, sip_lower_bound, triangle_ratio,
    AnchorStrategy, BoundName, BoundOptions, CertificateSide, ReverseForm, SipLowerBound,
    WeightVector,
};
use normsip::sip::{diff_quotient, sip_numeric, sip_value, Which, DEFAULT_TOL};
use normsip::space::{NormSpec, Vector};
use normsip::witness::{admissible_constant, WitnessKind};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = Kind> {
    prop::sample::select(KINDS.to_vec())
}

fn coords(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0f64..4.0, d)
}

fn pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..=16).prop_flat_map(|d| (coords(d), coords(d)))
}

fn family() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..=8, 1usize..=12).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(coords(d), n),
            prop::collection::vec(0.05f64..1.0, n),
        )
    })
}

fn v(c: &[f64]) -> Vector {
    common::vector(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_absolutely_homogeneous(k in kind(), (x, _) in pair(), a in -1e3f64..1e3) {
        let n = k.spec();
        let lhs = n.eval(&v(&x.iter().map(|c| a * c).collect::<Vec<_>>())).unwrap();
        let rhs = a.abs() * n.eval(&v(&x)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn norm_triangle_inequality(k in kind(), (x, y) in pair()) {
        let n = k.spec();
        let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let (nx, ny) = (n.eval(&v(&x)).unwrap(), n.eval(&v(&y)).unwrap());
        prop_assert!(n.eval(&v(&s)).unwrap() <= nx + ny + 1e-12 * (nx + ny));
    }

    #[test]
    fn norm_matches_textbook_formula(k in kind(), (x, _) in pair()) {
        let lib = k.spec().eval(&v(&x)).unwrap();
        let reference = common::norm(&x, k);
        prop_assert!((lib - reference).abs() <= 1e-12 * reference.max(1e-300));
    }

    #[test]
    fn large_exponent_near_max_norm(x in prop::collection::vec(-1.0f64..1.0, 1..=16)) {
        let p64 = NormSpec::lp(64.0).unwrap().eval(&v(&x)).unwrap();
        let inf = NormSpec::lp_inf().eval(&v(&x)).unwrap();
        prop_assert!((p64 - inf).abs() <= 0.1 * inf);
    }

    #[test]
    fn closed_form_matches_subgradient_oracle(k in kind(), (x, y) in pair()) {
        let n = k.spec();
        for (w, sup) in [(Which::Inferior, false), (Which::Superior, true)] {
            let lib = sip_value(&v(&x), &v(&y), &n, w).unwrap();
            let reference = common::sip(&x, &y, k, sup);
            let scale = common::norm(&x, k) * common::norm(&y, k);
            prop_assert!((lib - reference).abs() <= 1e-9 * scale.max(1e-300), "{lib} vs {reference}");
        }
    }

    #[test]
    fn numeric_enclosure_brackets_closed_form(k in kind(), (x, y) in pair()) {
        let n = k.spec();
        let (xv, yv) = (v(&x), v(&y));
        let enc = sip_numeric(&xv, &yv, &n, DEFAULT_TOL).unwrap();
        prop_assert!(enc.contains(sip_value(&xv, &yv, &n, Which::Inferior).unwrap()));
        prop_assert!(enc.contains(sip_value(&xv, &yv, &n, Which::Superior).unwrap()));
    }

    #[test]
    fn quotient_is_monotone(k in kind(), (x, y) in pair(), s in 1e-4f64..1.0, t in 1e-4f64..1.0) {
        let n = k.spec();
        let (xv, yv) = (v(&x), v(&y));
        let scale = common::norm(&x, k) * (common::norm(&y, k) + common::norm(&x, k));
        let (lo, hi) = (s.min(t), s.max(t));
        let q = |t: f64| diff_quotient(&xv, &yv, &n, t).unwrap();
        prop_assert!(q(-hi) <= q(-lo) + 1e-9 * scale);
        prop_assert!(q(-lo) <= q(lo) + 1e-9 * scale);
        prop_assert!(q(lo) <= q(hi) + 1e-9 * scale);
    }

    #[test]
    fn sip_lower_bounds_hold(k in kind(), (x, a) in pair()) {
        prop_assume!(a.iter().any(|c| *c != 0.0));
        let n = k.spec();
        let (xv, av) = (v(&x), v(&a));
        let si = sip_value(&xv, &av, &n, Which::Inferior).unwrap();
        let na = common::norm(&a, k);
        let scale = na * (na + common::norm(&x, k));
        let quad = sip_lower_bound(&xv, &av, &n, SipLowerBound::Quadratic).unwrap();
        let gap = sip_lower_bound(&xv, &av, &n, SipLowerBound::NormGap).unwrap();
        prop_assert!(si >= quad - 1e-9 * scale);
        prop_assert!(si >= gap - 1e-9 * scale);
        if let Ok(coarse) = sip_lower_bound(&xv, &av, &n, SipLowerBound::Coarse) {
            prop_assert!(coarse <= quad + 1e-9 * scale);
        }
    }

    #[test]
    fn certificates_bracket_the_ratio(k in kind(), (xs, raw) in family(), rho in 0.01f64..0.99) {
        let n = k.spec();
        let xv: Vec<Vector> = xs.iter().map(|c| v(c)).collect();
        let (ps, _) = WeightVector::normalized(raw).unwrap();
        let options = BoundOptions { rho: Some(rho), ..BoundOptions::default() };
        let Ok(report) = best_lower_bound(&xv, &ps, &n, &AnchorStrategy::Mean, &options) else {
            return Ok(());
        };
        prop_assert!(report.soundness_violations().is_empty());
        for r in report.results.iter().filter(|r| r.applicable) {
            let value = r.value.unwrap();
            if matches!(r.name, BoundName::QuadraticDeficit | BoundName::NormGap) {
                prop_assert!(value >= 0.0);
            }
        }
    }

    #[test]
    fn ratio_certificates_are_scale_free(k in kind(), (xs, raw) in family(), lam in 0.01f64..100.0) {
        let n = k.spec();
        let (ps, _) = WeightVector::normalized(raw).unwrap();
        let xv: Vec<Vector> = xs.iter().map(|c| v(c)).collect();
        let sv: Vec<Vector> = xs.iter().map(|c| v(&c.iter().map(|x| lam * x).collect::<Vec<_>>())).collect();
        let Ok(r1) = triangle_ratio(&xv, &ps, &n) else { return Ok(()); };
        let r2 = triangle_ratio(&sv, &ps, &n).unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-12 * 8.0);
        let mean = |f: &[Vector]| AnchorStrategy::Mean.resolve(f, &ps).unwrap().remove(0);
        let a1 = reverse_ratio_bound(&xv, &ps, &mean(&xv), &n, ReverseForm::NormGap).unwrap();
        let a2 = reverse_ratio_bound(&sv, &ps, &mean(&sv), &n, ReverseForm::NormGap).unwrap();
        prop_assert_eq!(a1.applicable, a2.applicable);
        if let (Some(x), Some(y)) = (a1.value, a2.value) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
        for side in [CertificateSide::Lower, CertificateSide::Upper] {
            let b1 = self_anchor_bound(&xv, &ps, &n, side, DEFAULT_TOL).unwrap();
            let b2 = self_anchor_bound(&sv, &ps, &n, side, DEFAULT_TOL).unwrap();
            if let (Some(x), Some(y)) = (b1.value, b2.value) {
                prop_assert!((x - y).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn admissible_constants_approach_one_half(eps in 1e-6f64..0.999) {
        for kind in [WitnessKind::QuadraticSip, WitnessKind::WeightedQuadratic, WitnessKind::QuadraticDeficitRatio] {
            let c = admissible_constant(kind, eps).value();
            prop_assert!(c > 0.5);
            prop_assert!(c - 0.5 <= eps);
        }
    }
}

#[test]
fn parallel_family_is_tight() {
    // x_j = c_j u with c_j > 0: every term equals one, so r = R = ratio = 1
    let n = NormSpec::lp(3.0).unwrap();
    let u = [0.3, -1.2, 0.7];
    let xs: Vec<Vector> = [0.5, 2.0, 1.0]
        .iter()
        .map(|c| v(&u.iter().map(|x| c * x).collect::<Vec<_>>()))
        .collect();
    let ps = WeightVector::new(vec![0.2, 0.3, 0.5]).unwrap();
    let lower = self_anchor_bound(&xs, &ps, &n, CertificateSide::Lower, DEFAULT_TOL).unwrap();
    assert!(lower.applicable);
    assert!((lower.value.unwrap() - 1.0).abs() <= 1e-12);
    assert!((triangle_ratio(&xs, &ps, &n).unwrap() - 1.0).abs() <= 1e-12);
}
