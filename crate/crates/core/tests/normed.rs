use conestab::instances::{make_extended_reals, make_vector_uc, NormKind};
use conestab::normed::{
    classical_stabilize, derived_residuals, q_residual, telescoping_check, NormedPexiderInstance, DEFAULT_R,
};
use conestab::stabilizer::{stabilize, PexiderInstance, StabilizeConfig};
use conestab::{ConeInstance, Domain, Error, Point, PointMap, Value, VectorValue};

fn target(dim: usize) -> ConeInstance {
    make_vector_uc(dim, NormKind::Sup).unwrap()
}

/// `x ↦ (c₁t + p(t, 1), …, c_d t + p(t, d))` with `t = Σx` and `|p| <= eps0`.
fn vmap(coeffs: Vec<f64>, eps0: f64, phase: f64) -> PointMap {
    PointMap::new(move |x| {
        let t = x.total();
        Value::Vector(VectorValue::point(
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| {
                    let p = if t == 0.0 { 0.0 } else { eps0 * (5.1 * t + phase + j as f64).sin() };
                    c * t + p
                })
                .collect(),
        ))
    })
}

fn instance(dim: usize, eps0: f64, epsilon: f64, depth: u32) -> NormedPexiderInstance {
    let coeffs: Vec<f64> = (0..dim).map(|j| 1.5 - j as f64).collect();
    NormedPexiderInstance::new(
        target(dim),
        Domain::grid(8, 0.5, 1, depth).unwrap(),
        vmap(coeffs.clone(), eps0, 0.3),
        vmap(coeffs.clone(), eps0, 1.9),
        vmap(coeffs, eps0, 4.4),
        epsilon,
        DEFAULT_R,
    )
    .unwrap()
}

fn pt(x: f64) -> Point {
    Point::scalar(x).unwrap()
}

#[test]
fn residual_examples() {
    let exact = instance(2, 0.0, 0.25, 4);
    assert_eq!(q_residual(&exact, &pt(1.0), &pt(0.5)).unwrap(), 0.0);

    let noisy = instance(3, 0.25 / 3.0, 0.25, 4);
    for x in noisy.domain().points() {
        for y in noisy.domain().points() {
            assert!(q_residual(&noisy, x, y).unwrap() <= 0.25);
        }
    }

    let t = target(1);
    let square = PointMap::new(|x| Value::Vector(VectorValue::point(vec![x.total() * x.total()])));
    let half = PointMap::new(|x| Value::Vector(VectorValue::point(vec![0.5 * x.total() * x.total()])));
    let p = NormedPexiderInstance::new(t, Domain::grid(3, 1.0, 1, 2).unwrap(), square, half.clone(), half, 1.0, 2.0)
        .unwrap();
    assert_eq!(q_residual(&p, &pt(1.0), &pt(1.0)).unwrap(), 3.0);
}

#[test]
fn derived_residual_examples() {
    let exact = instance(2, 0.0, 0.25, 4);
    let zero = derived_residuals(&exact, &pt(1.5)).unwrap();
    assert_eq!((zero.diagonal, zero.right_zero, zero.left_zero, zero.origin, zero.combined), (0.0, 0.0, 0.0, 0.0, 0.0));

    let noisy = instance(3, 0.25 / 3.0, 0.25, 4);
    for x in noisy.domain().points() {
        let d = derived_residuals(&noisy, x).unwrap();
        assert!(d.within(0.25), "{x}: {d:?}");
        assert!(d.combined <= 1.0);
    }
}

#[test]
fn telescoping_examples() {
    let eps = 0.25;
    let noisy = instance(3, eps / 3.0, eps, 16);
    for x in noisy.domain().points() {
        let first = telescoping_check(&noisy, x, 0, 0).unwrap();
        assert_eq!(first.rhs, 2.0 * eps);
        assert!(first.holds);
        let long = telescoping_check(&noisy, x, 0, 10).unwrap();
        assert!((long.rhs - 4.0 * eps * (1.0 - 2f64.powi(-11))).abs() <= 1e-15);
        assert!(long.holds);
        for m in 0..=12 {
            for n in m..=12 {
                assert!(telescoping_check(&noisy, x, m, n).unwrap().holds, "{x} m={m} n={n}");
            }
        }
    }
    let exact = instance(2, 0.0, eps, 16);
    assert_eq!(telescoping_check(&exact, &pt(2.0), 1, 6).unwrap().lhs, 0.0);
    assert!(matches!(telescoping_check(&exact, &pt(2.0), 3, 2), Err(Error::InvalidConfig(_))));
    assert!(matches!(telescoping_check(&exact, &pt(2.0), 0, 16), Err(Error::DomainExhausted { .. })));
}

#[test]
fn exact_solution_recovers_itself() {
    let exact = instance(3, 0.0, 0.25, 12);
    let report = classical_stabilize(&exact, &StabilizeConfig::fixed_depth(12)).unwrap();
    assert_eq!((report.sup_q_f, report.sup_q_g, report.sup_q_h), (0.0, 0.0, 0.0));
    assert_eq!((report.beta, report.gamma, report.delta_c), (0.0, 0.0, 0.0));
    assert!(report.verdicts.all());
    for (x, a) in report.table.entries() {
        assert_eq!(a, &exact.f(x).unwrap());
    }
}

#[test]
fn seminorm_bounds_at_quarter_epsilon() {
    for dim in [1, 3] {
        let noisy = instance(dim, 0.25 / 3.0, 0.25, 24);
        let report = classical_stabilize(&noisy, &StabilizeConfig::fixed_depth(24)).unwrap();
        let slack = 2f64.powi(-20);
        assert!(report.sup_q_f <= 1.0 + slack);
        assert!(report.sup_q_g <= 1.25 + slack && report.sup_q_h <= 1.25 + slack);
        assert!(report.verdicts.all());
        assert!(report.additivity_max_violation <= 2f64.powi(-15));
        assert_eq!(report.constants, "artifact-minimal");
        let json = serde_json::to_value(&report).unwrap();
        for key in ["epsilon", "r", "beta", "gamma", "delta_c", "sup_q_f", "sup_q_g", "sup_q_h", "table"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn both_engines_agree_on_vector_targets() {
    let noisy = instance(3, 0.25 / 3.0, 0.25, 24);
    let normed = classical_stabilize(&noisy, &StabilizeConfig::fixed_depth(24)).unwrap();
    let t = noisy.target().clone();
    let coeffs: Vec<f64> = (0..3).map(|j| 1.5 - j as f64).collect();
    let eps0 = 0.25 / 3.0;
    let p = PexiderInstance::new(
        t.clone(),
        noisy.domain().clone(),
        vmap(coeffs.clone(), eps0, 0.3),
        vmap(coeffs.clone(), eps0, 1.9),
        vmap(coeffs, eps0, 4.4),
        t.nbhd(0.25).unwrap(),
    )
    .unwrap();
    let cone = stabilize(&p, &StabilizeConfig::fixed_depth(24)).unwrap();
    assert!(cone.table.max_gap(&normed.table).unwrap() <= 2f64.powi(-15));
}

#[test]
fn construction_preconditions() {
    let d = Domain::grid(3, 1.0, 1, 2).unwrap();
    let f = PointMap::new(|x| Value::ext(x.total()));
    let err = NormedPexiderInstance::new(make_extended_reals(false), d.clone(), f.clone(), f.clone(), f, 1.0, 2.0)
        .unwrap_err();
    assert!(matches!(err, Error::NotVectorSpace(_)));
    let v = vmap(vec![1.0], 0.0, 0.0);
    assert!(NormedPexiderInstance::new(target(1), d.clone(), v.clone(), v.clone(), v.clone(), 0.0, 2.0).is_err());
    assert!(NormedPexiderInstance::new(target(1), d, v.clone(), v.clone(), v, 1.0, 1.0).is_err());
}

#[test]
fn residual_above_epsilon_is_a_hypothesis_violation() {
    let loose = instance(2, 0.25, 0.1, 8);
    match classical_stabilize(&loose, &StabilizeConfig::fixed_depth(8)) {
        Err(e @ Error::HypothesisViolation { .. }) => assert_eq!(e.exit_code(), 2),
        other => panic!("{other:?}"),
    }
}
