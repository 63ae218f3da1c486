//! Sampled verification of the cone, preorder and neighborhood axioms.

use serde::Serialize;

use crate::cone::{ConeInstance, Element, Nbhd};
use crate::value::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub checked: usize,
    pub failures: usize,
    /// First failing witness.
    pub witness: Option<String>,
}

impl LawCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub instance: String,
    pub sample_size: usize,
    pub scalar_count: usize,
    pub laws: Vec<LawCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.laws.iter().all(LawCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.laws.iter().filter(|l| !l.passed())
    }

    pub fn law(&self, name: &str) -> Option<&LawCheck> {
        self.laws.iter().find(|l| l.law == name)
    }
}

struct Tally {
    check: LawCheck,
}

impl Tally {
    fn new(law: &str) -> Self {
        Tally {
            check: LawCheck {
                law: law.to_owned(),
                checked: 0,
                failures: 0,
                witness: None,
            },
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.check.checked += 1;
        if !ok {
            self.check.failures += 1;
            if self.check.witness.is_none() {
                self.check.witness = Some(witness());
            }
        }
    }
}

/// Checks every cone law on the sample. Elements from another instance are
/// reported under `sample-membership` and skipped.
pub fn check_axioms(instance: &ConeInstance, sample: &[Element], scalars: &[f64]) -> AxiomReport {
    let rules = instance.rules();
    let mut membership = Tally::new("sample-membership");
    let values: Vec<&Value> = sample
        .iter()
        .filter(|e| {
            let ok = e.tag() == instance.tag();
            membership.record(ok, || format!("{e} belongs to `{}`", e.tag()));
            ok
        })
        .map(Element::value)
        .collect();
    let scalars: Vec<f64> = scalars
        .iter()
        .copied()
        .filter(|s| s.is_finite() && *s >= 0.0)
        .collect();
    let n = values.len();
    let m = scalars.len();
    let eq = |a: &Value, b: &Value| rules.equal(a, b);
    let third = |i: usize, j: usize| values[(i * 7 + j * 13 + 1) % n];

    let mut laws = vec![membership.check];
    if n == 0 {
        return AxiomReport {
            instance: instance.name().to_owned(),
            sample_size: 0,
            scalar_count: m,
            laws,
        };
    }

    let mut assoc = Tally::new("add-associative");
    let mut comm = Tally::new("add-commutative");
    let mut scale_over_add = Tally::new("scale-distributes-over-add");
    for (i, a) in values.iter().enumerate() {
        for (j, b) in values.iter().enumerate() {
            let ab = rules.add(a, b);
            let c = third(i, j);
            let left = rules.add(&ab, c);
            let right = rules.add(a, &rules.add(b, c));
            assoc.record(eq(&left, &right), || format!("a = {a}, b = {b}, c = {c}"));
            comm.record(eq(&ab, &rules.add(b, a)), || format!("a = {a}, b = {b}"));
            if m > 0 {
                let lambda = scalars[(i + j) % m];
                let left = rules.scale(lambda, &ab);
                let right = rules.add(&rules.scale(lambda, a), &rules.scale(lambda, b));
                scale_over_add.record(eq(&left, &right), || format!("λ = {lambda}, a = {a}, b = {b}"));
            }
        }
    }

    let zero = rules.zero();
    let mut neutral = Tally::new("add-neutral");
    let mut unit = Tally::new("scale-unit");
    let mut zero_law = Tally::new("scale-zero");
    let mut reflexive = Tally::new("preorder-reflexive");
    let mut scale_assoc = Tally::new("scale-associative");
    let mut scalar_distrib = Tally::new("scale-distributes-over-scalars");
    for (i, a) in values.iter().enumerate() {
        neutral.record(eq(&rules.add(a, &zero), a), || format!("a = {a}"));
        unit.record(eq(&rules.scale(1.0, a), a), || format!("a = {a}"));
        zero_law.record(eq(&rules.scale(0.0, a), &zero), || format!("a = {a}"));
        reflexive.record(rules.leq(a, a), || format!("a = {a}"));
        for k in 0..m {
            let lambda = scalars[k];
            let mu = scalars[(k + i + 1) % m];
            let left = rules.scale(lambda, &rules.scale(mu, a));
            let right = rules.scale(lambda * mu, a);
            scale_assoc.record(eq(&left, &right), || format!("λ = {lambda}, μ = {mu}, a = {a}"));
            let left = rules.scale(lambda + mu, a);
            let right = rules.add(&rules.scale(lambda, a), &rules.scale(mu, a));
            scalar_distrib.record(eq(&left, &right), || format!("λ = {lambda}, μ = {mu}, a = {a}"));
        }
    }

    // Comparable triples: every sampled pair plus chains a <= a+u <= a+u+u'.
    let generators = instance.generators();
    let mut chains: Vec<(Value, Value, Value)> = Vec::new();
    if !generators.is_empty() {
        for (i, a) in values.iter().enumerate() {
            let u = generators[i % generators.len()].element().value();
            let u2 = generators[(i + 3) % generators.len()].element().value();
            let b = rules.add(a, u);
            let c = rules.add(&b, u2);
            chains.push(((*a).clone(), b, c));
        }
    }

    let mut transitive = Tally::new("preorder-transitive");
    let mut add_compat = Tally::new("order-add-compatible");
    let mut scale_compat = Tally::new("order-scale-compatible");
    let mut compat = |i: usize, j: usize, a: &Value, b: &Value| {
        let c = third(i, j);
        add_compat.record(rules.leq(&rules.add(a, c), &rules.add(b, c)), || {
            format!("a = {a}, b = {b}, c = {c}")
        });
        if m > 0 {
            let lambda = scalars[(i + j) % m];
            scale_compat.record(
                rules.leq(&rules.scale(lambda, a), &rules.scale(lambda, b)),
                || format!("λ = {lambda}, a = {a}, b = {b}"),
            );
        }
    };
    for (i, a) in values.iter().enumerate() {
        for (j, b) in values.iter().enumerate() {
            if !rules.leq(a, b) {
                continue;
            }
            compat(i, j, a, b);
            let c = third(i, j);
            if rules.leq(b, c) {
                transitive.record(rules.leq(a, c), || format!("a = {a}, b = {b}, c = {c}"));
            }
        }
    }
    for (i, (a, b, c)) in chains.iter().enumerate() {
        let (ab, bc) = (rules.leq(a, b), rules.leq(b, c));
        if ab {
            compat(i, i + 1, a, b);
        }
        if ab && bc {
            transitive.record(rules.leq(a, c), || format!("a = {a}, b = {b}, c = {c}"));
        }
    }

    let (positive, directed, closed) = check_neighborhoods(instance, &generators, &scalars);

    let mut bounded_below = Tally::new("bounded-below");
    for a in &values {
        for v in &generators {
            let element = instance
                .element((*a).clone())
                .expect("sample value accepted by the instance");
            let ok = instance
                .lower_bound_coefficient(&element, v)
                .map(|rho| {
                    let shifted = rules.add(a, &rules.scale(rho, v.element().value()));
                    rules.leq(&zero, &shifted)
                })
                .unwrap_or(false);
            bounded_below.record(ok, || format!("a = {a}, v = {v}"));
        }
    }

    laws.extend(
        [
            assoc,
            comm,
            neutral,
            scale_assoc,
            scalar_distrib,
            scale_over_add,
            unit,
            zero_law,
            reflexive,
            transitive,
            add_compat,
            scale_compat,
            positive,
            directed,
            closed,
            bounded_below,
        ]
        .into_iter()
        .map(|t| t.check),
    );

    AxiomReport {
        instance: instance.name().to_owned(),
        sample_size: n,
        scalar_count: m,
        laws,
    }
}

/// Axioms (i)–(iii) of an abstract 0-neighborhood system over generator pairs.
fn check_neighborhoods(instance: &ConeInstance, generators: &[Nbhd], scalars: &[f64]) -> (Tally, Tally, Tally) {
    let rules = instance.rules();
    let zero = rules.zero();
    let strictly_positive = |v: &Value| rules.leq(&zero, v) && !rules.leq(v, &zero);
    let member = |v: &Value| {
        strictly_positive(v) && (rules.generator().is_none() || rules.neighborhood_scale(v).is_some())
    };

    let mut positive = Tally::new("nbhd-positive");
    let mut directed = Tally::new("nbhd-directed");
    let mut closed = Tally::new("nbhd-closed");
    for u in generators {
        let uv = u.element().value();
        positive.record(strictly_positive(uv), || format!("v = {u}"));
        for v in generators {
            let vv = v.element().value();
            let found = (0..=10).any(|k| {
                let s = 0.5f64.powi(k);
                [rules.scale(s, uv), rules.scale(s, vv)]
                    .iter()
                    .any(|w| member(w) && rules.leq(w, uv) && rules.leq(w, vv))
            });
            directed.record(found, || format!("u = {u}, v = {v}"));
            let sum = rules.add(uv, vv);
            closed.record(member(&sum), || format!("u + v = {sum}"));
        }
        for &lambda in scalars.iter().filter(|&&s| s > 0.0) {
            let scaled = rules.scale(lambda, uv);
            closed.record(member(&scaled), || format!("λ = {lambda}, v = {u}"));
        }
    }
    (positive, directed, closed)
}

/// The seeded scalar list used by the axiom suite: `0`, `1` and pseudo-random
/// values in `[0, 4)`.
pub fn standard_scalars(seed: u64, count: usize) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![0.0, 1.0, 0.5, 2.0];
    while out.len() < count {
        out.push(rng.random_range(0.0..4.0));
    }
    out.truncate(count);
    out
}
