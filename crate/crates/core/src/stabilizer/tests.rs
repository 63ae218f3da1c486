use super::*;
use crate::ext::ExtReal;
use crate::instances::{make_extended_reals, make_interval_cone};
use crate::value::{Interval, Value};

fn reals() -> ConeInstance {
    make_extended_reals(false)
}

fn map(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> PointMap {
    PointMap::new(move |x| Value::ext(f(x.total())))
}

/// Bounded noise with `p(0) = 0`, independent of the harness generator.
fn wobble(scale: f64, phase: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |x: f64| if x == 0.0 { 0.0 } else { scale * (7.3 * x + phase).sin() }
}

fn instance(f: PointMap, g: PointMap, h: PointMap, v: f64, depth: u32) -> PexiderInstance {
    let t = reals();
    let v = t.nbhd(v).unwrap();
    PexiderInstance::new(t, Domain::grid(9, 0.25, 1, depth).unwrap(), f, g, h, v).unwrap()
}

fn additive(c: f64, depth: u32) -> PexiderInstance {
    instance(map(move |x| c * x), map(move |x| c * x), map(move |x| c * x), 1.0, depth)
}

fn noisy(depth: u32) -> PexiderInstance {
    let (pf, pg, ph) = (wobble(0.25, 0.1), wobble(0.25, 1.3), wobble(0.25, 2.9));
    instance(
        map(move |x| 3.0 * x + pf(x)),
        map(move |x| 3.0 * x + pg(x)),
        map(move |x| 3.0 * x + ph(x)),
        1.0,
        depth,
    )
}

fn num(e: &Element) -> f64 {
    e.value().as_ext().unwrap().finite().unwrap()
}

fn pt(x: f64) -> Point {
    Point::scalar(x).unwrap()
}

#[test]
fn hypothesis_examples() {
    let p = additive(3.0, 4);
    let report = verify_hypothesis(&p, &p.domain().pairs()).unwrap();
    assert!(report.passed());
    assert_eq!(report.max_residual, 0.0);

    let p = noisy(4);
    assert!(verify_hypothesis(&p, &p.domain().pairs()).unwrap().passed());

    let p = instance(map(|x| x * x), map(|x| x), map(|x| x), 1.0, 4);
    let report = verify_hypothesis(&p, &[(pt(8.0), pt(8.0))]).unwrap();
    assert_eq!(report.failures, 1);
    let w = &report.witnesses[0];
    assert_eq!((num(&w.f_of_sum), num(&w.g_plus_h)), (256.0, 16.0));
    assert!(matches!(
        verify_hypothesis(&p, &[(pt(0.3), pt(0.0))]),
        Err(Error::OutsideDomain(_))
    ));
}

#[test]
fn single_function_bounds_follow_from_the_hypothesis() {
    for p in [additive(3.0, 4), noisy(4)] {
        let bounds = derive_single_function_bounds(&p, &p.domain().pairs()).unwrap();
        assert_eq!(num(bounds.w.element()), 4.0);
        assert_eq!(bounds.w.scale(), Some(4.0));
    }
}

#[test]
fn lambda_examples() {
    let t = reals();
    let w = t.nbhd(4.0).unwrap();
    let el = |x: f64| t.element(Value::ext(x)).unwrap();
    assert_eq!(find_lambda(&t, &el(0.0), &w).unwrap(), 0.0);
    assert_eq!(find_lambda(&t, &el(6.0), &w).unwrap(), 1.5);
    assert_eq!(find_lambda(&t, &el(-6.0), &w).unwrap(), 1.5);
    let top = t.element(Value::Ext(ExtReal::PosInf)).unwrap();
    assert_eq!(find_lambda(&t, &top, &w), Err(Error::UnboundedAtOrigin));
    assert_eq!(find_lambda_by_search(&t, &top, &w), Err(Error::UnboundedAtOrigin));
    for x in [0.0, 6.0, -6.0, 0.1, 1e5] {
        let by_search = find_lambda_by_search(&t, &el(x), &w).unwrap();
        assert!((by_search - x.abs() / 4.0).abs() <= 2f64.powi(-30) * (1.0 + x.abs()), "{x}: {by_search}");
    }
    let i = make_interval_cone();
    let w = i.nbhd(4.0).unwrap();
    let a = i.element(Value::Interval(Interval::new(2.0, 6.0).unwrap())).unwrap();
    // [2, 6] ⊆ λ[-4, 4] needs λ >= 1.5; 0 ∈ [2 - 4λ, 6 + 4λ] needs λ >= 0.5
    assert_eq!(find_lambda(&i, &a, &w).unwrap(), 1.5);
    assert!((find_lambda_by_search(&i, &a, &w).unwrap() - 1.5).abs() <= 2f64.powi(-30));
}

#[test]
fn unbounded_origin_is_rejected_at_construction() {
    let t = reals();
    let f = PointMap::new(|x| if x.is_zero() { Value::Ext(ExtReal::PosInf) } else { Value::ext(x.total()) });
    let err = PexiderInstance::new(
        t.clone(),
        Domain::grid(3, 1.0, 1, 2).unwrap(),
        f,
        map(|x| x),
        map(|x| x),
        t.nbhd(1.0).unwrap(),
    )
    .unwrap_err();
    assert_eq!(err, Error::UnboundedAtOrigin);
    assert_eq!(err.to_string(), "unbounded f(0)");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn hyers_term_examples() {
    let p = additive(3.0, 12);
    assert_eq!(num(&hyers_term(&p, &pt(1.0), 10).unwrap()), 3.0);
    let p = instance(
        map(|x| if x == 1.0 { 1.25 } else { x + 0.5 }),
        map(|x| x),
        map(|x| x),
        2.0,
        24,
    );
    let t20 = num(&hyers_term(&p, &pt(1.0), 20).unwrap());
    assert_eq!(t20, 1.0 + 0.5 * 2f64.powi(-20));
    assert_eq!(num(&hyers_term(&p, &pt(1.0), 0).unwrap()), 1.25);
    assert!(matches!(hyers_term(&p, &pt(1.0), 25), Err(Error::DomainExhausted { .. })));
}

#[test]
fn induction_and_cauchy_bounds_hold() {
    for p in [additive(3.0, 24), noisy(24)] {
        let w = p.w().unwrap();
        let lambda = find_lambda(p.target(), &p.f0().unwrap(), &w).unwrap();
        for x in p.domain().points() {
            let report = check_induction_bounds(&p, lambda, &w, x, 20).unwrap();
            assert!(report.passed(), "{:?}", report.witness);
            assert_eq!(report.checks, 40);
            let report = check_cauchy_rate(&p, lambda, &w, x, 20, 24).unwrap();
            assert!(report.passed(), "{:?}", report.witness);
        }
    }
}

#[test]
fn first_induction_step_is_the_doubling_inequality() {
    // n = 1 reads f(2x) <= (λ+1)w + 2f(x) after multiplying by 2
    let p = noisy(4);
    let t = p.target();
    let w = p.w().unwrap();
    for x in p.domain().points() {
        let f2x = p.f(&x.doubled(1)).unwrap();
        let rhs = t
            .add(&t.scale(1.0, w.element()).unwrap(), &t.scale(2.0, &p.f(x).unwrap()).unwrap())
            .unwrap();
        assert!(t.leq(&f2x, &rhs).unwrap());
    }
    assert!(check_induction_bounds(&p, 0.0, &w, &pt(0.5), 1).unwrap().passed());
}

#[test]
fn exact_additive_map_is_its_own_limit() {
    let p = additive(3.0, 8);
    let report = stabilize(&p, &StabilizeConfig::fixed_depth(8)).unwrap();
    assert_eq!(report.lambda, 0.0);
    assert_eq!(report.delta, 8.0);
    assert_eq!(num(&report.w), 4.0);
    assert!(report.verdicts.all());
    assert_eq!(report.additivity_max_violation, 0.0);
    for (x, a) in report.table.entries() {
        assert_eq!(num(a), 3.0 * x.total());
    }
    assert!(report.cauchy_residuals.iter().all(|&r| r == 0.0));
}

#[test]
fn constant_offset_at_origin_sets_lambda() {
    let p = instance(map(|x| 3.0 * x + 6.0), map(|x| 3.0 * x + 3.0), map(|x| 3.0 * x + 3.0), 1.0, 40);
    let report = stabilize(&p, &StabilizeConfig::default()).unwrap();
    assert_eq!(report.lambda, 1.5);
    assert_eq!(report.delta, 14.0);
    assert!(report.verdicts.all());
    for (x, a) in report.table.entries() {
        assert!((num(a) - 3.0 * x.total()).abs() <= 2f64.powi(-20));
    }
}

#[test]
fn noisy_instance_matches_the_brute_force_limit() {
    let p = noisy(20);
    let report = stabilize(&p, &StabilizeConfig::fixed_depth(20)).unwrap();
    assert!(report.verdicts.all());
    assert_eq!(report.iterations, 20);
    for (x, a) in report.table.entries() {
        // reference: one evaluation at 2³⁰x, computed without the engine
        let far = x.total() * 2f64.powi(30);
        let reference = (3.0 * far + wobble(0.25, 0.1)(far)) / 2f64.powi(30);
        assert!((num(a) - reference).abs() <= 2f64.powi(-18), "{x}");
    }
    assert!(report.additivity_max_violation <= 2f64.powi(-15));
    let radius = report.certified_radius.unwrap();
    assert_eq!(radius, 2f64.powi(-20) * (report.lambda + 1.0) * 4.0);
}

#[test]
fn tolerance_mode_stops_early_or_reports_non_convergence() {
    let p = noisy(40);
    let report = stabilize(&p, &StabilizeConfig::default()).unwrap();
    assert!(report.final_residual <= DEFAULT_TOLERANCE);
    assert!(report.iterations <= 40);
    let shallow = noisy(6);
    let config = StabilizeConfig {
        depth: 6,
        ..StabilizeConfig::default()
    };
    assert!(matches!(stabilize(&shallow, &config), Err(Error::NonConvergence { depth: 6, .. })));
}

#[test]
fn infinite_values_away_from_origin_do_not_converge() {
    let f = PointMap::new(|x| {
        if x.total() >= 1.0 {
            Value::Ext(ExtReal::PosInf)
        } else {
            Value::ext(x.total())
        }
    });
    let t = reals();
    let p = PexiderInstance::new(
        t.clone(),
        Domain::grid(2, 0.25, 1, 4).unwrap(),
        f,
        map(|x| x),
        map(|x| x),
        t.nbhd(1.0).unwrap(),
    )
    .unwrap();
    let err = stabilize(&p, &StabilizeConfig::fixed_depth(4)).unwrap_err();
    assert!(matches!(err, Error::NonConvergence { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn hypothesis_violation_aborts_with_witness() {
    let p = instance(map(|x| x * x), map(|x| x), map(|x| x), 1.0, 4);
    match stabilize(&p, &StabilizeConfig::fixed_depth(4)) {
        Err(Error::HypothesisViolation { witness }) => assert!(witness.contains("f(x+y)")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn additivity_examples() {
    let p = additive(3.0, 4);
    let report = stabilize(&p, &StabilizeConfig::fixed_depth(4)).unwrap();
    let pairs = p.domain().additive_pairs();
    let result = verify_additivity(&report.table, &pairs, 0.0).unwrap();
    assert!(result.passed);
    let zero = p.domain().zero();
    let shifted = report
        .table
        .map(|_, a| p.target().add(a, &p.target().element(Value::ext(0.5)).unwrap()))
        .unwrap();
    let at_origin = verify_additivity(&shifted, &[(zero.clone(), zero)], 1e-9).unwrap();
    assert_eq!(at_origin.max_violation, 0.5);
    assert!(matches!(
        verify_additivity(&report.table, &[(pt(2.0), pt(2.0))], 1.0),
        Err(Error::MissingTabulation(_))
    ));
}

#[test]
fn uniqueness_examples() {
    let p = noisy(24);
    let a18 = stabilize(&p, &StabilizeConfig::fixed_depth(18)).unwrap().table;
    let a24 = stabilize(&p, &StabilizeConfig::fixed_depth(24)).unwrap().table;
    assert!(verify_uniqueness(&p, &a24, &a24, ADDITIVITY_TOLERANCE).unwrap());
    assert!(verify_uniqueness(&p, &a18, &a24, ADDITIVITY_TOLERANCE).unwrap());
    let t = p.target();
    let one = t.element(Value::ext(1.0)).unwrap();
    let offset = a24.map(|_, a| t.add(a, &one)).unwrap();
    assert!(matches!(
        verify_uniqueness(&p, &a24, &offset, ADDITIVITY_TOLERANCE),
        Err(Error::Precondition(_))
    ));
    let far = a24
        .map(|_, a| t.add(a, &t.element(Value::ext(20.0)).unwrap()))
        .unwrap();
    match verify_uniqueness(&p, &a24, &far, ADDITIVITY_TOLERANCE) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("sandwich")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn jensen_adapter_examples() {
    let t = reals();
    let domain = Domain::grid(9, 0.25, 1, 24).unwrap();
    let p = jensen_adapter(&t, domain.clone(), map(|x| 3.0 * x), t.nbhd(1.0).unwrap()).unwrap();
    for x in domain.points() {
        assert_eq!(p.g(x).unwrap(), p.f(x).unwrap());
        assert_eq!(p.h(x).unwrap(), p.f(x).unwrap());
    }

    let p = jensen_adapter(&t, domain.clone(), map(|x| x + 0.3), t.nbhd(0.6).unwrap()).unwrap();
    assert!((num(&p.g(&pt(1.0)).unwrap()) - 1.15).abs() < 1e-15);
    assert!((num(&p.h(&pt(1.0)).unwrap()) - 1.15).abs() < 1e-15);
    assert!(verify_hypothesis(&p, &domain.pairs()).unwrap().passed());

    let noise = wobble(0.1, 0.7);
    let p = jensen_adapter(&t, domain, map(move |x| 2.0 * x + noise(x)), t.nbhd(0.5).unwrap()).unwrap();
    let report = stabilize(&p, &StabilizeConfig::fixed_depth(24)).unwrap();
    let rho = t.scale_nbhd(report.delta, p.v()).unwrap();
    for (x, a) in report.table.entries() {
        assert!(t.in_symmetric_nbhd(a, &p.f(x).unwrap(), &rho).unwrap());
    }

    let shallow = Domain::grid(3, 1.0, 1, 0).unwrap();
    assert!(matches!(
        jensen_adapter(&t, shallow, map(|x| x), t.nbhd(1.0).unwrap()),
        Err(Error::InvalidDomain(_))
    ));
}

#[test]
fn linear_adapter_examples() {
    let t = reals();
    let domain = Domain::grid(9, 0.75, 1, 24).unwrap();
    let p = linear_adapter(&t, domain.clone(), map(|x| 3.0 * x), 1.0, t.nbhd(1.0).unwrap()).unwrap();
    for x in domain.points() {
        assert_eq!(p.g(x).unwrap(), p.f(x).unwrap());
    }
    let p = linear_adapter(&t, domain.clone(), map(|x| 2.5 * x), 3.0, t.nbhd(1.0).unwrap()).unwrap();
    for x in domain.points() {
        assert!((num(&p.g(x).unwrap()) - num(&p.f(x).unwrap())).abs() <= 1e-12);
    }

    let noise = wobble(0.05, 0.2);
    let p = linear_adapter(&t, domain.clone(), map(move |x| 2.5 * x + noise(x)), 3.0, t.nbhd(0.5).unwrap()).unwrap();
    let report = stabilize(&p, &StabilizeConfig::fixed_depth(24)).unwrap();
    assert!(report.verdicts.all());
    for x in domain.points() {
        let x3 = x.scale(3.0);
        if let Ok(a3) = report.table.get(&x3) {
            let a = num(report.table.get(x).unwrap());
            assert!((num(a3) - 3.0 * a).abs() <= 2f64.powi(-15), "{x}");
        }
    }
    assert!(matches!(
        linear_adapter(&t, domain, map(|x| x), 0.0, t.nbhd(1.0).unwrap()),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn interval_target_stabilizes() {
    let t = make_interval_cone();
    let noise = wobble(0.2, 0.4);
    let f = PointMap::new(move |x| {
        let s = noise(x.total());
        Value::Interval(Interval::new(-x.total() + s, 2.0 * x.total() + s).unwrap())
    });
    let p = PexiderInstance::new(
        t.clone(),
        Domain::grid(6, 0.5, 1, 24).unwrap(),
        f.clone(),
        f.clone(),
        f,
        t.nbhd(1.0).unwrap(),
    )
    .unwrap();
    let report = stabilize(&p, &StabilizeConfig::fixed_depth(24)).unwrap();
    assert!(report.verdicts.all());
    let a = report.table.get(&pt(2.0)).unwrap().value().as_interval().unwrap();
    assert!((a.lo + 2.0).abs() <= 2f64.powi(-18) && (a.hi - 4.0).abs() <= 2f64.powi(-18));
}

#[test]
fn report_serializes_with_the_documented_fields() {
    let report = stabilize(&additive(2.0, 4), &StabilizeConfig::fixed_depth(4)).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    for key in ["lambda", "delta", "iterations", "verdicts", "additivity_max_violation", "table"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["table"][1]["x"][0], 0.25);
    assert_eq!(json["table"][1]["A_of_x"], 0.5);
}
