use conestab::ext::ExtReal;
use conestab::harness::{perturb, BaseMap, NoiseKind, NoiseSpec};
use conestab::instances::{make_extended_reals, make_vector_uc, NormKind};
use conestab::stabilizer::{
    check_cauchy_rate, check_induction_bounds, find_lambda, stabilize, PexiderInstance, StabilizeConfig,
};
use conestab::{Domain, Value, VectorValue};
use proptest::prelude::*;

fn ext() -> impl Strategy<Value = ExtReal> {
    prop_oneof![
        1 => Just(ExtReal::PosInf),
        9 => (-1e6f64..1e6).prop_map(ExtReal::Finite),
    ]
}

fn vector(dim: usize) -> impl Strategy<Value = Value> {
    (prop::collection::vec(-100f64..100.0, dim), -50f64..50.0)
        .prop_map(|(coords, level)| Value::Vector(VectorValue { coords, level }))
}

proptest! {
    #[test]
    fn ext_addition_is_a_commutative_monoid(a in ext(), b in ext(), c in ext()) {
        prop_assert_eq!(a.add(b), b.add(a));
        prop_assert_eq!(a.add(ExtReal::Finite(0.0)), a);
        if let (Some(x), Some(y), Some(z)) = (a.finite(), b.finite(), c.finite()) {
            let l = (x + y) + z;
            let r = x + (y + z);
            prop_assert!((l - r).abs() <= 1e-9 * (1.0 + l.abs()));
        } else {
            prop_assert_eq!(a.add(b).add(c), a.add(b.add(c)));
        }
    }

    #[test]
    fn ext_order_is_total_and_compatible(a in ext(), b in ext(), c in ext(), s in 0f64..8.0) {
        prop_assert!(a.le(b) || b.le(a));
        if a.le(b) {
            prop_assert!(a.add(c).le(b.add(c)));
            prop_assert!(a.scale(s).le(b.scale(s)));
        }
        prop_assert_eq!(a.scale(0.0), ExtReal::Finite(0.0));
    }

    #[test]
    fn vector_preorder_is_transitive_and_additive(a in vector(3), b in vector(3), c in vector(3), s in 0f64..4.0) {
        let t = make_vector_uc(3, NormKind::Sup).unwrap();
        let (a, b, c) = (t.element(a).unwrap(), t.element(b).unwrap(), t.element(c).unwrap());
        prop_assert!(t.leq(&a, &a).unwrap());
        if t.leq(&a, &b).unwrap() && t.leq(&b, &c).unwrap() {
            prop_assert!(t.leq(&a, &c).unwrap());
        }
        if t.leq(&a, &b).unwrap() {
            prop_assert!(t.leq(&t.add(&a, &c).unwrap(), &t.add(&b, &c).unwrap()).unwrap());
            prop_assert!(t.leq(&t.scale(s, &a).unwrap(), &t.scale(s, &b).unwrap()).unwrap());
        }
    }

    #[test]
    fn seminorm_is_sublinear(a in vector(2), b in vector(2), s in 0f64..10.0) {
        let t = make_vector_uc(2, NormKind::Euclidean).unwrap();
        let (a, b) = (t.element(a).unwrap(), t.element(b).unwrap());
        let q = |e: &conestab::Element| t.seminorm(e).unwrap().to_f64();
        prop_assert!(q(&t.add(&a, &b).unwrap()) <= q(&a) + q(&b) + 1e-9);
        prop_assert!((q(&t.scale(s, &a).unwrap()) - s * q(&a)).abs() <= 1e-9 * (1.0 + s * q(&a)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich_and_cauchy_envelopes_hold(
        c in -4f64..4.0,
        frac in 0.05f64..1.0,
        seed in any::<u64>(),
        kind in prop_oneof![Just(NoiseKind::BoundedHash), Just(NoiseKind::BoundedSin), Just(NoiseKind::AdversarialStep)],
        offset in -1f64..1.0,
    ) {
        let t = make_extended_reals(false);
        let base = BaseMap::Coefficient(c);
        let (f, g, h) = perturb(&t, &base, NoiseSpec::new(kind, frac / 3.0, seed));
        let f = conestab::PointMap::new(move |x| if x.is_zero() { Value::ext(offset) } else { f.eval(x) });
        let domain = Domain::grid(6, 0.375, 1, 22).unwrap();
        let p = PexiderInstance::new(t.clone(), domain.clone(), f, g, h, t.nbhd(1.0).unwrap()).unwrap();
        let report = stabilize(&p, &StabilizeConfig::fixed_depth(20)).unwrap();
        prop_assert!(report.verdicts.all());
        prop_assert_eq!(report.delta, 4.0 * (report.lambda + 2.0));
        let w = p.w().unwrap();
        let lambda = find_lambda(&t, &p.f0().unwrap(), &w).unwrap();
        for x in domain.points() {
            prop_assert!(check_induction_bounds(&p, lambda, &w, x, 20).unwrap().passed());
            prop_assert!(check_cauchy_rate(&p, lambda, &w, x, 12, 20).unwrap().passed());
        }
    }

    #[test]
    fn additive_maps_are_fixed_points(c in -8f64..8.0, depth in 1u32..=24) {
        let t = make_extended_reals(false);
        let f = conestab::PointMap::new(move |x| Value::ext(c * x.total()));
        let domain = Domain::grid(5, 0.5, 1, 24).unwrap();
        let p = PexiderInstance::new(t.clone(), domain, f.clone(), f.clone(), f, t.nbhd(1.0).unwrap()).unwrap();
        let report = stabilize(&p, &StabilizeConfig::fixed_depth(depth)).unwrap();
        for (x, a) in report.table.entries() {
            prop_assert_eq!(a, &p.f(x).unwrap());
        }
    }
}
