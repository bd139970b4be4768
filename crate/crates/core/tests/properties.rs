use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use tropcyl_core::lattice::ChartImage;
use tropcyl_core::num::{frac, int, q};
use tropcyl_core::series::binomial;
use tropcyl_core::spine::CanonicalImage;
use tropcyl_core::{
    a_value, build_base, canonical_image, count, extend, extend_ordered, focus_focus_apply, focus_focus_inverse,
    intersection_matrix, is_positive, lift_to_tilde, spine_family, validate_spine, wedge_lattice_length, ChartInput,
    CountQuery, Crossing, Extension, ExtensionOrder, LooijengaPair, SparseLaurentSeries, TangentVector, TropicalBase,
    Q, DEFAULT_MAX_STEPS,
};

fn pair_strategy() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 3..=6)
}

fn base_of(v: &[i64]) -> TropicalBase {
    build_base(LooijengaPair::new(v.to_vec()).unwrap()).unwrap()
}

fn rational() -> impl Strategy<Value = Q> {
    (-20i64..=20, 1i64..=7).prop_map(|(n, d)| frac(n, d))
}

fn positive_rational() -> impl Strategy<Value = Q> {
    (1i64..=20, 1i64..=7).prop_map(|(n, d)| frac(n, d))
}

/// Parameters of a family spine `L(l,m,n)` at height `b`.
fn family_params() -> impl Strategy<Value = (i64, i64, i64, Q)> {
    (1i64..=4, -3i64..=3).prop_flat_map(|(l, m)| (Just(l), Just(m), 0..=l, positive_rational()))
}

fn series_strategy() -> impl Strategy<Value = SparseLaurentSeries> {
    prop::collection::vec(((-3i64..=3, -2i64..=3), -4i64..=4), 0..5)
        .prop_map(|terms| SparseLaurentSeries::from_terms(terms.into_iter().map(|(k, c)| (k, q(c)))))
}

proptest! {
    #[test]
    fn transports_are_unimodular_and_invert(pair in pair_strategy(), wall in 0usize..6, u in -30i64..=30, v in -30i64..=30) {
        let base = base_of(&pair);
        let wall = wall % base.len();
        prop_assert_eq!(base.forward_matrix(wall).det(), int(1));
        let x = TangentVector::new(base.prev(wall), u, v);
        let there = base.transport(&x, wall, Crossing::Forward).unwrap();
        prop_assert_eq!(base.transport(&there, wall, Crossing::Backward).unwrap(), x);
    }

    #[test]
    fn wedge_is_transport_invariant(pair in pair_strategy(), wall in 0usize..6, a in (-9i64..=9, -9i64..=9), b in (-9i64..=9, -9i64..=9)) {
        let base = base_of(&pair);
        let wall = wall % base.len();
        let from = base.prev(wall);
        let (x, y) = (TangentVector::new(from, a.0, a.1), TangentVector::new(from, b.0, b.1));
        let tx = base.transport(&x, wall, Crossing::Forward).unwrap();
        let ty = base.transport(&y, wall, Crossing::Forward).unwrap();
        prop_assert_eq!(wedge_lattice_length(&x.coords, &y.coords), wedge_lattice_length(&tx.coords, &ty.coords));
    }

    #[test]
    fn charts_are_linear_on_cones(pair in pair_strategy(), wall in 0usize..6, side in 0usize..2, p in (rational(), rational()), r in (rational(), rational())) {
        let base = base_of(&pair);
        let wall = wall % base.len();
        let cone = if side == 0 { base.prev(wall) } else { wall };
        let abs = |x: &Q| if x < &Q::zero() { -x } else { x.clone() };
        let (p, r) = ([abs(&p.0), abs(&p.1)], [abs(&r.0), abs(&r.1)]);
        let sum = [&p[0] + &r[0], &p[1] + &r[1]];
        let image = |c: &[Q; 2]| -> Option<[Q; 2]> {
            let pt = base.point(cone, c[0].clone(), c[1].clone()).ok()?;
            match base.chart_psi(wall, ChartInput::Point(&pt)).ok()? {
                ChartImage::Point(x) => Some(x),
                ChartImage::Vector(_) => None,
            }
        };
        if let (Some(a), Some(b), Some(s)) = (image(&p), image(&r), image(&sum)) {
            prop_assert_eq!([&a[0] + &b[0], &a[1] + &b[1]], s);
        }
    }

    #[test]
    fn positive_form_value_implies_positive(pair in pair_strategy(), x in prop::collection::vec(-4i64..=4, 6)) {
        let m = intersection_matrix(&LooijengaPair::new(pair.clone()).unwrap());
        let l = pair.len();
        let value: i64 = (0..l).flat_map(|i| (0..l).map(move |j| (i, j))).map(|(i, j)| x[i] * m[i][j] * x[j]).sum();
        if value > 0 {
            prop_assert!(is_positive(&LooijengaPair::new(pair).unwrap()));
        }
    }

    #[test]
    fn canonical_image_is_idempotent((l, m, n, b) in family_params(), extended in any::<bool>()) {
        let base = base_of(&[0, -1, 0, 0]);
        let s = spine_family(l, m, n, &b).unwrap();
        let tree = if extended { extend(&base, &s, DEFAULT_MAX_STEPS).unwrap().extended.into_inner() } else { s.into_inner() };
        let image = canonical_image(&base, &tree);
        let again = canonical_image(&base, &image.realize(&base).unwrap());
        prop_assert_eq!(&again, &image);
        prop_assert_eq!(CanonicalImage::from_pieces(&base, image.pieces().to_vec()).unwrap(), image);
    }

    #[test]
    fn validation_ignores_labels_and_subdivision((l, m, n, b) in family_params(), edge in 0usize..2, at in 1i64..=9) {
        let base = base_of(&[0, -1, 0, 0]);
        let s = spine_family(l, m, n, &b).unwrap().into_inner();
        let len = s.tree().edges()[edge].length.finite().unwrap().clone();
        let sub = s.subdivided(&base, edge, &(len * frac(at, 10)), "mid").unwrap();
        let renamed = s.relabeled(&base, |v| format!("z_{v}")).unwrap();
        prop_assert!(validate_spine(&base, &s).is_empty());
        prop_assert!(validate_spine(&base, &sub).is_empty());
        prop_assert!(validate_spine(&base, &renamed).is_empty());
        prop_assert_eq!(canonical_image(&base, &sub), canonical_image(&base, &s));
    }

    #[test]
    fn lift_is_consistent_and_a_value_ignores_shift((l, m, n, b) in family_params(), c in rational()) {
        let base = base_of(&[0, -1, 0, 0]);
        let r = extend(&base, &spine_family(l, m, n, &b).unwrap(), DEFAULT_MAX_STEPS).unwrap();
        let z = lift_to_tilde(&base, &r.extended).unwrap();
        let shifted = z.shifted(&c);
        prop_assert_eq!(a_value(&base, &z).unwrap(), a_value(&base, &shifted).unwrap());
    }

    #[test]
    fn extension_split_and_order((l, m, n, b) in family_params(), split in 0usize..6) {
        let base = base_of(&[0, -1, 0, 0]);
        let s = spine_family(l, m, n, &b).unwrap();
        let once = extend(&base, &s, DEFAULT_MAX_STEPS).unwrap();
        let mut staged = Extension::new(&base, &s, ExtensionOrder::Alternating).unwrap();
        staged.advance(&base, split).unwrap();
        staged.advance(&base, DEFAULT_MAX_STEPS).unwrap();
        let staged = staged.finish().unwrap();
        prop_assert_eq!(&staged.curve_class, &once.curve_class);
        prop_assert_eq!(&staged, &once);
        let seq = extend_ordered(&base, &s, DEFAULT_MAX_STEPS, ExtensionOrder::Sequential).unwrap();
        prop_assert_eq!(&seq.curve_class, &once.curve_class);
        prop_assert_eq!(canonical_image(&base, seq.extended.inner()), canonical_image(&base, once.extended.inner()));
    }

    #[test]
    fn focus_focus_is_multiplicative(f in series_strategy(), g in series_strategy()) {
        let n = 8;
        let lhs = focus_focus_apply(&(&f * &g), n);
        let rhs = &focus_focus_apply(&f, n) * &focus_focus_apply(&g, n);
        // Compare where both sides are known.
        let known = match (lhs.truncation(), rhs.truncation()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let cut = |s: &SparseLaurentSeries| match known { Some(k) => s.clone().truncated(k), None => s.clone() };
        prop_assert_eq!(cut(&lhs), cut(&rhs));
    }
}

#[test]
fn inverse_undoes_focus_focus() {
    let n = 12;
    for a in -6..=6 {
        for b in -6..=6 {
            let x = SparseLaurentSeries::monomial(a, b);
            let back = focus_focus_inverse(&focus_focus_apply(&x, n), n);
            assert_eq!(back.clone().truncated(n), x.clone().truncated(n), "x^{a} y^{b}");
            let forth = focus_focus_apply(&focus_focus_inverse(&x, n), n);
            assert_eq!(forth.truncated(n), x.truncated(n), "x^{a} y^{b}");
        }
    }
}

#[test]
fn pascal_and_row_sums() {
    let c = |l, m, n| count(CountQuery::new(l, m, n)).unwrap();
    for l in 2..=12 {
        for m in -5..=5 {
            for n in 1..l {
                assert_eq!(c(l, m, n), c(l - 1, m, n) + c(l - 1, m, n - 1));
            }
        }
    }
    for l in 1..=12 {
        for m in -5..=5 {
            let sum: num_bigint::BigUint = (0..=l).map(|n| c(l, m, n)).sum();
            assert_eq!(sum, num_bigint::BigUint::from(1u64 << l));
        }
    }
    assert_eq!(binomial(12, 6), BigInt::from(924));
}
